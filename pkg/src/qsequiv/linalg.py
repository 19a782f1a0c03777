"""Dense exact linear algebra: matrices, RREF, inverses, kernels, subspaces.

Everything is computed with exact field arithmetic; determinism matters more
than speed here (flattenings stay small: ambient dimensions are q^n with the
configured size limit guarding the exponent).
"""

from __future__ import annotations

from .fields import Field

__all__ = [
    "LinAlgError",
    "SingularMatrixError",
    "DimensionMismatchError",
    "AmbientMismatchError",
    "SizeLimitError",
    "Matrix",
    "Subspace",
]

SIZE_LIMIT = 1 << 20  # largest allowed ambient dimension q^n


class LinAlgError(ValueError):
    pass


class SingularMatrixError(LinAlgError):
    pass


class DimensionMismatchError(LinAlgError):
    pass


class AmbientMismatchError(LinAlgError):
    pass


class SizeLimitError(LinAlgError):
    pass


class Matrix:
    """Dense matrix over an exact field; immutable by convention."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: Field, data: list[list]):
        self.field = field
        self.data = [list(r) for r in data]
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.data else 0
        if any(len(r) != self.cols for r in self.data):
            raise DimensionMismatchError("ragged rows")

    @classmethod
    def from_ints(cls, field: Field, data) -> "Matrix":
        return cls(field, [[field.of(x) for x in row] for row in data])

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        z, o = field.zero(), field.one()
        return cls(field, [[o if i == j else z for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, field: Field, rows: int, cols: int) -> "Matrix":
        z = field.zero()
        return cls(field, [[z] * cols for _ in range(rows)])

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and all(self.data[i][j] == other.data[i][j] for i in range(self.rows) for j in range(self.cols))
        )

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols})"

    def transpose(self) -> "Matrix":
        return Matrix(self.field, [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionMismatchError(f"{self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        z = self.field.zero()
        bt = other.transpose().data
        out = []
        for arow in self.data:
            out.append([sum((a * b for a, b in zip(arow, bcol) if a and b), z) for bcol in bt])
        return Matrix(self.field, out)

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("shape mismatch")
        return Matrix(self.field, [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError("shape mismatch")
        return Matrix(self.field, [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)])

    def scale(self, c) -> "Matrix":
        return Matrix(self.field, [[c * x for x in row] for row in self.data])

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, [[-x for x in row] for row in self.data])

    def mul_vec(self, v: list) -> list:
        if self.cols != len(v):
            raise DimensionMismatchError("matrix-vector shape mismatch")
        z = self.field.zero()
        return [sum((a * x for a, x in zip(row, v) if a and x), z) for row in self.data]

    def trace(self):
        if self.rows != self.cols:
            raise DimensionMismatchError("trace of non-square matrix")
        z = self.field.zero()
        return sum((self.data[i][i] for i in range(self.rows)), z)

    def rref(self) -> tuple["Matrix", list[int]]:
        """Reduced row echelon form and pivot column indices."""
        m = [list(r) for r in self.data]
        pivots: list[int] = []
        pr = 0
        for pc in range(self.cols):
            pivot_row = None
            for r in range(pr, self.rows):
                if m[r][pc]:
                    pivot_row = r
                    break
            if pivot_row is None:
                continue
            m[pr], m[pivot_row] = m[pivot_row], m[pr]
            inv = self.field.one() / m[pr][pc]
            m[pr] = [x * inv for x in m[pr]]
            for r in range(self.rows):
                if r != pr and m[r][pc]:
                    f = m[r][pc]
                    m[r] = [a - f * b for a, b in zip(m[r], m[pr])]
            pivots.append(pc)
            pr += 1
            if pr == self.rows:
                break
        return Matrix(self.field, m), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def invert(self) -> "Matrix":
        """Exact inverse; raises SingularMatrixError on singular input."""
        if self.rows != self.cols:
            raise DimensionMismatchError("inverse of non-square matrix")
        n = self.rows
        aug = Matrix(self.field, [self.data[i] + Matrix.identity(self.field, n).data[i] for i in range(n)])
        red, pivots = aug.rref()
        if pivots != list(range(n)):
            raise SingularMatrixError("matrix is singular")
        return Matrix(self.field, [row[n:] for row in red.data])

    def kron(self, other: "Matrix") -> "Matrix":
        out_rows = self.rows * other.rows
        out_cols = self.cols * other.cols
        if out_rows * out_cols > SIZE_LIMIT * 64:
            raise SizeLimitError("Kronecker product too large")
        data = []
        for i in range(self.rows):
            arow = self.data[i]
            for k in range(other.rows):
                brow = other.data[k]
                data.append([a * b for a in arow for b in brow])
        return Matrix(self.field, data)

    def kron_power(self, n: int) -> "Matrix":
        """n-fold Kronecker power in the lexicographic multi-index basis."""
        if n < 1:
            raise ValueError("n must be >= 1")
        out = self
        for _ in range(n - 1):
            out = out.kron(self)
        return out

    def nullspace(self) -> list[list]:
        """Basis of the right kernel {v : Mv = 0}, one vector per free column."""
        red, pivots = self.rref()
        pivot_set = set(pivots)
        free = [c for c in range(self.cols) if c not in pivot_set]
        z, o = self.field.zero(), self.field.one()
        basis = []
        for fc in free:
            v = [z] * self.cols
            v[fc] = o
            for r, pc in enumerate(pivots):
                v[pc] = -red.data[r][fc]
            basis.append(v)
        return basis

    def to_lists(self):
        return [list(r) for r in self.data]


def _apply_on_slot(field: Field, M: Matrix, vec: list, slot: int, n: int, q: int) -> list:
    """Apply q x q matrix M on tensor slot `slot` (1-based) of a length-q^n
    coordinate vector in lexicographic multi-index order."""
    stride = q ** (n - slot)
    block = stride * q
    z = field.zero()
    out = [z] * len(vec)
    for base in range(0, len(vec), block):
        for off in range(stride):
            col = [vec[base + i * stride + off] for i in range(q)]
            if not any(col):
                continue
            new = M.mul_vec(col)
            for i in range(q):
                out[base + i * stride + off] = new[i]
    return out


def apply_kron(M: Matrix, n: int, vec: list) -> list:
    """Apply M^{tensor n} to a coordinate vector without materializing the
    Kronecker power."""
    q = M.rows
    if M.cols != q:
        raise DimensionMismatchError("kron application needs a square matrix")
    if q**n != len(vec):
        raise DimensionMismatchError("vector length is not q^n")
    for slot in range(1, n + 1):
        vec = _apply_on_slot(M.field, M, vec, slot, n, q)
    return vec


class Subspace:
    """Subspace of k^ambient_dim stored as an RREF row basis."""

    __slots__ = ("field", "ambient_dim", "basis", "pivots")

    def __init__(self, field: Field, ambient_dim: int, basis: Matrix, pivots: list[int]):
        self.field = field
        self.ambient_dim = ambient_dim
        self.basis = basis
        self.pivots = pivots

    @classmethod
    def from_vectors(cls, field: Field, ambient_dim: int, vectors: list[list]) -> "Subspace":
        if ambient_dim > SIZE_LIMIT:
            raise SizeLimitError(f"ambient dimension {ambient_dim} exceeds limit")
        vectors = [v for v in vectors if any(v)]
        if not vectors:
            return cls(field, ambient_dim, Matrix(field, []), [])
        red, pivots = Matrix(field, vectors).rref()
        rows = red.data[: len(pivots)]
        return cls(field, ambient_dim, Matrix(field, rows), pivots)

    @classmethod
    def zero(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, Matrix(field, []), [])

    @classmethod
    def full(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, Matrix.identity(field, ambient_dim), list(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.pivots == other.pivots
            and self.basis == other.basis
        )

    def __repr__(self):
        return f"Subspace(dim {self.dim} of k^{self.ambient_dim})"

    def coords_of(self, v: list) -> list | None:
        """Coefficients of v in the RREF basis, or None if v is not in the
        subspace."""
        v = list(v)
        coeffs = []
        for row, pc in zip(self.basis.data, self.pivots):
            c = v[pc]
            coeffs.append(c)
            if c:
                v = [a - c * b for a, b in zip(v, row)]
        if any(v):
            return None
        return coeffs

    def contains(self, v: list) -> bool:
        return self.coords_of(v) is not None

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other.basis.data)

    def intersect(self, other: "Subspace") -> "Subspace":
        """Exact intersection via the left kernel of the stacked bases."""
        if self.ambient_dim != other.ambient_dim:
            raise AmbientMismatchError("ambient dimensions differ")
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.field, self.ambient_dim)
        stacked = Matrix(self.field, self.basis.data + other.basis.data)
        vectors = []
        for w in stacked.transpose().nullspace():
            u = w[: self.dim]
            vec = [self.field.zero()] * self.ambient_dim
            for c, row in zip(u, self.basis.data):
                if c:
                    vec = [a + c * b for a, b in zip(vec, row)]
            vectors.append(vec)
        return Subspace.from_vectors(self.field, self.ambient_dim, vectors)

    def sum(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise AmbientMismatchError("ambient dimensions differ")
        return Subspace.from_vectors(self.field, self.ambient_dim, self.basis.data + other.basis.data)
