"""Analysis of (twisted) superpotentials.

Nondegeneracy, twist recovery, relation spaces, traceability, the
Calabi-Yau/Nakayama data, quantum dimensions of subspaces and quantum
Hilbert series.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .fields import Field
from .linalg import Matrix, SingularMatrixError, SizeLimitError, SIZE_LIMIT, Subspace, apply_kron
from .tensor import Tensor, derivative_space, embed_padded

__all__ = [
    "DegenerateError",
    "NotStableError",
    "TwistedSuperpotential",
    "AlgebraData",
    "WSequence",
    "QSeries",
    "is_nondegenerate",
    "find_twist",
    "analyze",
    "relations",
    "is_L_traceable",
    "is_cy_shape",
    "nakayama_matrix",
    "qdim_subspace",
    "w_sequence",
    "quantum_hilbert_series",
    "m2_pack",
    "m2_unpack",
]


class DegenerateError(ValueError):
    pass


class NotStableError(ValueError):
    """The subspace is not stable under the twist's Kronecker action."""


def is_nondegenerate(t: Tensor) -> bool:
    """True iff the pairing of the first slot against all dual vectors is
    injective, i.e. the first flattening has full rank."""
    return t.flatten_first().rank() == t.dim


def find_twist(t: Tensor) -> Matrix | None:
    """The unique invertible P with (P (x) id^{m-1}) applied to the cyclic
    shift of t giving back t, or None if no such P exists.

    Requires a nondegenerate input (which makes P unique when it exists);
    raises DegenerateError otherwise.
    """
    if not is_nondegenerate(t):
        raise DegenerateError("twist recovery requires a nondegenerate tensor")
    G = t.cyclic_shift().flatten_first()  # P @ G must equal H
    H = t.flatten_first()
    q = t.dim
    # solve G^T X = H^T column-wise, X = P^T
    gt = G.transpose()
    ht = H.transpose()
    aug = Matrix(t.field, [gt.data[i] + ht.data[i] for i in range(gt.rows)])
    red, pivots = aug.rref()
    lhs_pivots = [p for p in pivots if p < q]
    if len(lhs_pivots) < q:
        return None  # underdetermined: no unique twist
    if any(p >= q for p in pivots):
        return None  # inconsistent system
    X = Matrix(t.field, [red.data[r][q:] for r in range(q)])
    P = X.transpose()
    try:
        P.invert()
    except SingularMatrixError:
        return None
    # re-verify the defining equation exactly
    if t.cyclic_shift().apply_on_factor(P, 1) != t:
        return None
    return P


@dataclass(frozen=True)
class TwistedSuperpotential:
    """A tensor s in V^{tensor m} together with its recovered twist P and a
    nondegeneracy certificate."""

    tensor: Tensor
    twist: Matrix
    nondegenerate: bool = True

    @property
    def arity(self) -> int:
        return self.tensor.arity

    @property
    def dim(self) -> int:
        return self.tensor.dim

    @property
    def fld(self) -> Field:
        return self.tensor.field


def analyze(t: Tensor) -> TwistedSuperpotential:
    """Certify t as a nondegenerate twisted superpotential.

    Raises DegenerateError if t is degenerate or admits no twist.
    """
    if not is_nondegenerate(t):
        raise DegenerateError("tensor is degenerate")
    P = find_twist(t)
    if P is None:
        raise DegenerateError("tensor admits no twist matrix")
    return TwistedSuperpotential(tensor=t, twist=P, nondegenerate=True)


def relations(sp: TwistedSuperpotential, N: int) -> Subspace:
    """The (m-N)-fold derivative space of k*s, as an RREF subspace of
    V^{tensor N}."""
    m = sp.arity
    if not (2 <= N <= m):
        raise ValueError(f"need 2 <= N <= {m}")
    W = sp.tensor.span()
    for k in range(m - N):
        W = derivative_space(W, sp.dim, m - k)
    return W


@dataclass(frozen=True)
class AlgebraData:
    """A superpotential algebra: generators V, relations in degree N."""

    superpotential: TwistedSuperpotential
    N: int
    relations: Subspace

    @classmethod
    def build(cls, sp: TwistedSuperpotential, N: int) -> "AlgebraData":
        return cls(superpotential=sp, N=N, relations=relations(sp, N))


def is_L_traceable(sp: TwistedSuperpotential, L: int) -> bool:
    """True iff span{s} equals the intersection of all paddings of the
    (m-L)-fold derivative space."""
    m, q = sp.arity, sp.dim
    if not (2 <= L <= m):
        raise ValueError(f"need 2 <= L <= {m}")
    span_s = sp.tensor.span()
    if L == m:
        return True  # empty padding range: condition is span{s} = span{s}
    D = relations(sp, L)
    inter = None
    for i in range(m - L + 1):
        j = m - L - i
        padded = embed_padded(D, q, L, i, j)
        inter = padded if inter is None else inter.intersect(padded)
        if inter.dim == 0:
            break
    return inter == span_s


def is_cy_shape(sp: TwistedSuperpotential, d: int) -> bool:
    """True iff the cyclic shift of s equals (-1)^(d+1) * s."""
    sign = sp.fld.one() if (d + 1) % 2 == 0 else -sp.fld.one()
    return sp.tensor.cyclic_shift() == sp.tensor.scale(sign)


def nakayama_matrix(sp: TwistedSuperpotential, d: int) -> Matrix:
    """Degree-1 action of the Nakayama automorphism: (-1)^(d+1) (P^T)^(-1)."""
    M = sp.twist.transpose().invert()
    if (d + 1) % 2 == 1:
        M = -M
    return M


def qdim_subspace(W: Subspace, P: Matrix) -> object:
    """Quantum dimension of a subspace W of V^{tensor n}: the exact trace of
    (P^{-T})^{tensor n} restricted to W.

    Raises NotStableError if W is not stable under that action (so the trace
    formula would not apply).
    """
    q = P.rows
    n = 0
    d = W.ambient_dim
    while d > 1:
        if d % q:
            raise ValueError("ambient dimension is not a power of dim(P)")
        d //= q
        n += 1
    A = P.invert().transpose()
    total = W.field.zero()
    for i, row in enumerate(W.basis.data):
        image = apply_kron(A, n, list(row)) if n > 0 else list(row)
        coords = W.coords_of(image)
        if coords is None:
            raise NotStableError("subspace is not stable under the twist action")
        total = total + coords[i]
    return total


@dataclass(frozen=True)
class WSequence:
    """The Koszul-type subspace sequence W_0, W_1, ... of an algebra."""

    spaces: list[Subspace] = dc_field(default_factory=list)

    def dims(self) -> list[int]:
        return [W.dim for W in self.spaces]


def w_sequence(alg: AlgebraData, bound: int) -> WSequence:
    """W_i = V^{tensor i} for i < N; the intersection of all paddings of the
    relation space for i >= N."""
    sp = alg.superpotential
    q, N = sp.dim, alg.N
    if q**bound > SIZE_LIMIT:
        raise SizeLimitError(f"ambient dimension {q}^{bound} exceeds limit")
    spaces = []
    for i in range(bound + 1):
        if i < N:
            spaces.append(Subspace.full(sp.fld, q**i))
            continue
        inter = None
        for s in range(i - N + 1):
            t = i - N - s
            padded = embed_padded(alg.relations, q, N, s, t)
            inter = padded if inter is None else inter.intersect(padded)
            if inter.dim == 0:
                break
        spaces.append(inter)
    return WSequence(spaces=spaces)


@dataclass(frozen=True)
class QSeries:
    """Truncated power series of quantum dimensions; coefficient 0 is 1."""

    coefficients: list
    trunc: int

    def to_json(self, fld: Field) -> dict:
        coeffs = []
        for c in self.coefficients:
            num, den = fld.coeff_str(c)
            coeffs.append(num if den == "1" else f"{num}/{den}")
        return {"coeffs": coeffs, "trunc": self.trunc}


def rho(i: int, N: int) -> int:
    """Exponents of the Koszul-type resolution: rho(2j) = jN, rho(2j+1) = jN+1."""
    j, r = divmod(i, 2)
    return j * N + (1 if r else 0)


def quantum_hilbert_series(alg: AlgebraData, d: int, trunc: int) -> QSeries:
    """Power-series expansion of
    1 / sum_{0<=i<=d} (-1)^i qdim(W_{rho(i)}) t^{rho(i)} to degree trunc.

    This is the quantum Hilbert series when the algebra is N-Koszul AS-regular
    of global dimension d (caller-asserted); the formal value is computed
    regardless.
    """
    fld = alg.superpotential.fld
    P = alg.superpotential.twist
    N = alg.N
    top = rho(d, N)
    seq = w_sequence(alg, top)
    den = [fld.zero()] * (top + 1)
    for i in range(d + 1):
        r = rho(i, N)
        qd = qdim_subspace(seq.spaces[r], P)
        den[r] = den[r] + (qd if i % 2 == 0 else -qd)
    # invert the polynomial as a power series; constant term is qdim(W_0) = 1
    coeffs = [fld.one() / den[0]]
    for k in range(1, trunc + 1):
        acc = fld.zero()
        for j in range(1, min(k, top) + 1):
            if den[j]:
                acc = acc + den[j] * coeffs[k - j]
        coeffs.append(-acc / den[0])
    return QSeries(coefficients=coeffs, trunc=trunc)


def m2_pack(E: Matrix) -> TwistedSuperpotential:
    """The m=2 twisted superpotential with coefficient matrix E; its twist is
    E E^{-T} (the cyclic shift transposes E, and P must undo that)."""
    Einv = E.invert()  # raises SingularMatrixError when degenerate
    q = E.rows
    coeffs = {}
    for i in range(q):
        for j in range(q):
            if E.data[i][j]:
                coeffs[(i + 1, j + 1)] = E.data[i][j]
    t = Tensor(E.field, 2, q, coeffs)
    P = E @ Einv.transpose()
    return TwistedSuperpotential(tensor=t, twist=P, nondegenerate=True)


def m2_unpack(sp: TwistedSuperpotential) -> Matrix:
    if sp.arity != 2:
        raise ValueError("m2_unpack needs an arity-2 superpotential")
    return sp.tensor.flatten_first()
