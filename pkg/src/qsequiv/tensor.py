"""Sparse exact tensors in V^{tensor m} and the operations on them.

Coordinates of V^{tensor n} are ordered lexicographically by multi-index
(1-based entries); this convention is fixed here and used everywhere.
"""

from __future__ import annotations

from .fields import Field, parse_field
from .linalg import DimensionMismatchError, Matrix, Subspace

__all__ = ["Tensor", "IndexOutOfRangeError", "derivative_space", "embed_padded"]


class IndexOutOfRangeError(IndexError):
    pass


def multiindex_code(idx: tuple[int, ...], dim: int) -> int:
    """Lexicographic coordinate of a 1-based multi-index."""
    code = 0
    for i in idx:
        code = code * dim + (i - 1)
    return code


def code_multiindex(code: int, dim: int, arity: int) -> tuple[int, ...]:
    out = []
    for _ in range(arity):
        out.append(code % dim + 1)
        code //= dim
    return tuple(reversed(out))


class Tensor:
    """Sparse element of V^{tensor m}: map from 1-based multi-indices to
    nonzero field elements."""

    __slots__ = ("field", "arity", "dim", "coeffs")

    def __init__(self, field: Field, arity: int, dim: int, coeffs: dict[tuple[int, ...], object]):
        if arity < 1 or dim < 1:
            raise ValueError("arity and dim must be positive")
        self.field = field
        self.arity = arity
        self.dim = dim
        clean = {}
        for idx, c in coeffs.items():
            idx = tuple(idx)
            if len(idx) != arity or any(not (1 <= i <= dim) for i in idx):
                raise IndexOutOfRangeError(f"bad multi-index {idx}")
            if c:
                clean[idx] = c
        self.coeffs = clean

    @classmethod
    def zero(cls, field: Field, arity: int, dim: int) -> "Tensor":
        return cls(field, arity, dim, {})

    @classmethod
    def basis_vector(cls, field: Field, arity: int, dim: int, idx: tuple[int, ...]) -> "Tensor":
        return cls(field, arity, dim, {tuple(idx): field.one()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return (
            isinstance(other, Tensor)
            and self.arity == other.arity
            and self.dim == other.dim
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        return f"Tensor(m={self.arity}, dim={self.dim}, {len(self.coeffs)} terms)"

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_shape(other)
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            s = out.get(idx)
            out[idx] = c if s is None else s + c
        return Tensor(self.field, self.arity, self.dim, out)

    def __sub__(self, other: "Tensor") -> "Tensor":
        return self + other.scale(-self.field.one())

    def scale(self, c) -> "Tensor":
        if not c:
            return Tensor.zero(self.field, self.arity, self.dim)
        return Tensor(self.field, self.arity, self.dim, {idx: c * v for idx, v in self.coeffs.items()})

    def _check_shape(self, other: "Tensor"):
        if self.arity != other.arity or self.dim != other.dim:
            raise DimensionMismatchError("tensor shapes differ")

    # -- operations -----------------------------------------------------

    def cyclic_shift(self) -> "Tensor":
        """The cyclic permutation moving the last tensor factor to the front."""
        if self.arity < 2:
            raise ValueError("cyclic shift needs arity >= 2")
        out = {(idx[-1],) + idx[:-1]: c for idx, c in self.coeffs.items()}
        return Tensor(self.field, self.arity, self.dim, out)

    def apply_on_factor(self, M: Matrix, slot: int) -> "Tensor":
        """Linear action of M on the chosen (1-based) tensor factor."""
        if M.rows != self.dim or M.cols != self.dim:
            raise DimensionMismatchError("matrix size must match tensor dimension")
        if not (1 <= slot <= self.arity):
            raise IndexOutOfRangeError(f"slot {slot} out of range")
        out: dict[tuple[int, ...], object] = {}
        k = slot - 1
        for idx, c in self.coeffs.items():
            j = idx[k]
            for i in range(self.dim):
                m = M.data[i][j - 1]
                if not m:
                    continue
                nidx = idx[:k] + (i + 1,) + idx[k + 1 :]
                s = out.get(nidx)
                v = m * c
                out[nidx] = v if s is None else s + v
        return Tensor(self.field, self.arity, self.dim, out)

    def apply_all_factors(self, M: Matrix) -> "Tensor":
        """M^{tensor m} applied to the tensor."""
        t = self
        for slot in range(1, self.arity + 1):
            t = t.apply_on_factor(M, slot)
        return t

    def flatten_first(self) -> Matrix:
        """q x q^{m-1} matrix pairing the first slot against the rest."""
        if self.arity < 2:
            raise ValueError("flattening needs arity >= 2")
        q = self.dim
        cols = q ** (self.arity - 1)
        z = self.field.zero()
        data = [[z] * cols for _ in range(q)]
        for idx, c in self.coeffs.items():
            data[idx[0] - 1][multiindex_code(idx[1:], q)] = c
        return Matrix(self.field, data)

    def contract_first(self, dual_index: int) -> "Tensor":
        """Pair the first slot with the dual basis vector v^{dual_index}."""
        if self.arity < 2:
            raise ValueError("contraction needs arity >= 2")
        if not (1 <= dual_index <= self.dim):
            raise IndexOutOfRangeError(f"dual index {dual_index} out of range")
        out = {idx[1:]: c for idx, c in self.coeffs.items() if idx[0] == dual_index}
        return Tensor(self.field, self.arity - 1, self.dim, out)

    # -- coordinates ----------------------------------------------------

    def to_vector(self) -> list:
        v = [self.field.zero()] * (self.dim**self.arity)
        for idx, c in self.coeffs.items():
            v[multiindex_code(idx, self.dim)] = c
        return v

    @classmethod
    def from_vector(cls, field: Field, arity: int, dim: int, v: list) -> "Tensor":
        coeffs = {}
        for code, c in enumerate(v):
            if c:
                coeffs[code_multiindex(code, dim, arity)] = c
        return cls(field, arity, dim, coeffs)

    def span(self) -> Subspace:
        return Subspace.from_vectors(self.field, self.dim**self.arity, [self.to_vector()])

    # -- JSON schema ----------------------------------------------------

    def to_json(self) -> dict:
        entries = []
        for idx in sorted(self.coeffs):
            num, den = self.field.coeff_str(self.coeffs[idx])
            entries.append({"idx": list(idx), "num": num, "den": den})
        return {"m": self.arity, "dim": self.dim, "field": self.field.spec(), "entries": entries}

    @classmethod
    def from_json(cls, obj: dict) -> "Tensor":
        field = parse_field(obj["field"])
        coeffs = {}
        for e in obj["entries"]:
            coeffs[tuple(e["idx"])] = field.parse_coeff(e["num"], e.get("den", "1"))
        return cls(field, obj["m"], obj["dim"], coeffs)


def derivative_space(W: Subspace, dim: int, arity: int) -> Subspace:
    """Span of all first-slot contractions of a subspace of V^{tensor arity}.

    In lexicographic coordinates contracting against v^i is the i-th
    contiguous slice of length dim^(arity-1).
    """
    if arity < 2:
        raise ValueError("derivative space needs arity >= 2")
    block = dim ** (arity - 1)
    vectors = []
    for row in W.basis.data:
        for i in range(dim):
            piece = row[i * block : (i + 1) * block]
            if any(piece):
                vectors.append(piece)
    return Subspace.from_vectors(W.field, block, vectors)


def embed_padded(W: Subspace, dim: int, arity: int, left: int, right: int) -> Subspace:
    """RREF basis of V^{tensor left} (x) W (x) V^{tensor right} inside
    V^{tensor (left+arity+right)}."""
    if left == 0 and right == 0:
        return W
    ql, qr = dim**left, dim**right
    block = dim**arity
    out_dim = ql * block * qr
    z = W.field.zero()
    vectors = []
    for li in range(ql):
        for row in W.basis.data:
            for ri in range(qr):
                v = [z] * out_dim
                for code, c in enumerate(row):
                    if c:
                        v[(li * block + code) * qr + ri] = c
                vectors.append(v)
    return Subspace.from_vectors(W.field, out_dim, vectors)
