"""Cubic-surface superpotential atlas.

Symmetric-group idempotents on three tensor slots, the alternating tensors
w^(ijk), symmetrization of cubic forms in four variables, the catalog of
surface families (x3*f2 = f3 plus the smooth Clebsch/Fermat surfaces), and
pairwise vanishing classification with component reports.
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from importlib import resources

import sympy

from .fields import Field, PrimeField, QQ, to_prime_field
from .ncgb import MonomialOrder, Verdict, complete, verdict
from .presentation import Presentation, build_GL, build_SL, emit
from .superpotential import DegenerateError, TwistedSuperpotential, analyze
from .tensor import Tensor

__all__ = [
    "BadCharacteristicError",
    "RepeatedIndexError",
    "ConstraintViolatedError",
    "InconsistentEvidenceError",
    "CubicForm",
    "SurfaceFamily",
    "Degenerate",
    "PairResult",
    "ClassifyConfig",
    "ComponentReport",
    "idempotent_apply",
    "w_ijk",
    "w0",
    "symmetrize",
    "overline",
    "poly_superpotential",
    "load_catalog",
    "GENERIC_PARAMS",
    "GENERIC_A",
    "build_family_superpotential",
    "classify_pair",
    "component_report",
]

SCREEN_PRIME = 32003


class BadCharacteristicError(ValueError):
    """Characteristic 2 or 3: the idempotents 1/2, 1/3 do not exist."""


class RepeatedIndexError(ValueError):
    pass


class ConstraintViolatedError(ValueError):
    pass


class InconsistentEvidenceError(RuntimeError):
    """Contradictory certified edges between the same two items."""


def _check_char(fld: Field):
    if isinstance(fld, PrimeField) and fld.p in (2, 3):
        raise BadCharacteristicError(f"characteristic {fld.p} not supported here")


# -- slot permutations and idempotents -----------------------------------


def _swap12(t: Tensor) -> Tensor:
    out = {(idx[1], idx[0]) + idx[2:]: c for idx, c in t.coeffs.items()}
    return Tensor(t.field, t.arity, t.dim, out)


def idempotent_apply(which: str, t: Tensor) -> Tensor:
    """Apply c = (1 + shift + shift^2)/3, s = c(1 - swap12)/2, c - s, or 1 - c
    to an arity-3 tensor by permuting slots."""
    if t.arity != 3:
        raise ValueError("idempotents act on arity-3 tensors")
    _check_char(t.field)
    fld = t.field
    third = fld.of(1, 3)

    def c_of(u: Tensor) -> Tensor:
        sh = u.cyclic_shift()
        return (u + sh + sh.cyclic_shift()).scale(third)

    if which == "c":
        return c_of(t)
    if which == "s":
        return c_of(t - _swap12(t)).scale(fld.of(1, 2))
    if which == "c-s":
        return idempotent_apply("c", t) - idempotent_apply("s", t)
    if which == "1-c":
        return t - c_of(t)
    raise ValueError(f"unknown idempotent {which!r}")


def w_ijk(fld: Field, i: int, j: int, k: int) -> Tensor:
    """The 6-term alternating tensor on three distinct variable indices in
    0..3: (x_i x_j x_k + x_k x_i x_j + x_j x_k x_i)/3 minus the reversed
    cycle."""
    if len({i, j, k}) != 3:
        raise RepeatedIndexError(f"indices {(i, j, k)} must be distinct")
    if not all(0 <= v <= 3 for v in (i, j, k)):
        raise ValueError("indices must lie in 0..3")
    _check_char(fld)
    third = fld.of(1, 3)
    coeffs = {}
    for a, b, c in ((i, j, k), (k, i, j), (j, k, i)):
        coeffs[(a + 1, b + 1, c + 1)] = third
    for a, b, c in ((k, j, i), (i, k, j), (j, i, k)):
        coeffs[(a + 1, b + 1, c + 1)] = -third
    return Tensor(fld, 3, 4, coeffs)


def w0(fld: Field, a) -> Tensor:
    """a0*w^(012) + a1*w^(023) + a2*w^(013) + a3*w^(123)."""
    a0, a1, a2, a3 = (x if not isinstance(x, int) else fld.of(x) for x in a)
    t = Tensor.zero(fld, 3, 4)
    for coef, (i, j, k) in ((a0, (0, 1, 2)), (a1, (0, 2, 3)), (a2, (0, 1, 3)), (a3, (1, 2, 3))):
        if coef:
            t = t + w_ijk(fld, i, j, k).scale(coef)
    return t


# -- cubic forms ---------------------------------------------------------


class CubicForm:
    """Homogeneous degree-3 form in x0..x3: map from sorted variable triples
    (0-based) to nonzero coefficients."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: dict[tuple[int, int, int], object]):
        self.field = field
        clean = {}
        for mono, c in coeffs.items():
            mono = tuple(sorted(mono))
            if len(mono) != 3 or not all(0 <= v <= 3 for v in mono):
                raise ValueError(f"bad cubic monomial {mono}")
            if c:
                clean[mono] = clean.get(mono, field.zero()) + c
        self.coeffs = {m: c for m, c in clean.items() if c}

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return isinstance(other, CubicForm) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"CubicForm({len(self.coeffs)} terms)"


_PERMS3 = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


def symmetrize(F: CubicForm) -> Tensor:
    """The unique symmetric tensor mapping onto F: each monomial's coefficient
    is split evenly over the distinct orderings of its variables."""
    fld = F.field
    _check_char(fld)
    coeffs: dict[tuple[int, ...], object] = {}
    for mono, c in F.coeffs.items():
        orderings = {tuple(mono[p] for p in perm) for perm in _PERMS3}
        share = c / fld.of(len(orderings))
        for o in orderings:
            idx = tuple(v + 1 for v in o)
            coeffs[idx] = coeffs.get(idx, fld.zero()) + share
    return Tensor(fld, 3, 4, coeffs)


def overline(t: Tensor) -> CubicForm:
    """Image of an arity-3 tensor in the commutative cubic forms."""
    if t.arity != 3 or t.dim != 4:
        raise ValueError("expected an arity-3 tensor over a 4-dim space")
    coeffs: dict[tuple[int, int, int], object] = {}
    for idx, c in t.coeffs.items():
        mono = tuple(sorted(v - 1 for v in idx))
        coeffs[mono] = coeffs.get(mono, t.field.zero()) + c
    return CubicForm(t.field, coeffs)


def poly_superpotential(fld: Field = QQ) -> TwistedSuperpotential:
    """The antisymmetrizer on three 3-dim slots: the superpotential whose
    algebra is the commutative polynomial ring in 3 variables (twist = I)."""
    _check_char(fld)
    sign = {(0, 1, 2): 1, (1, 2, 0): 1, (2, 0, 1): 1, (0, 2, 1): -1, (1, 0, 2): -1, (2, 1, 0): -1}
    coeffs = {tuple(v + 1 for v in p): fld.of(s) for p, s in sign.items()}
    return analyze(Tensor(fld, 3, 3, coeffs))


# -- the family catalog --------------------------------------------------


@dataclass(frozen=True)
class SurfaceFamily:
    name: str
    f2: str | None
    f3: str | None
    F: str | None
    params: tuple[str, ...]
    constraints: tuple[str, ...]
    component: str | None


def load_catalog() -> dict[str, SurfaceFamily]:
    text = resources.files("qsequiv.data").joinpath("families.json").read_text()
    out = {}
    for row in json.loads(text)["families"]:
        fam = SurfaceFamily(
            name=row["name"],
            f2=row.get("f2"),
            f3=row.get("f3"),
            F=row.get("F"),
            params=tuple(row.get("params", [])),
            constraints=tuple(row.get("constraints", [])),
            component=row.get("component"),
        )
        out[fam.name] = fam
    return out


GENERIC_PARAMS = {"alpha": 2, "beta": 3, "gamma": 5, "delta": 2, "eta": 3, "u": 2}
GENERIC_A = (1, 2, 3, 5)

_SYMS = {n: sympy.Symbol(n) for n in ["x0", "x1", "x2", "x3", "alpha", "beta", "gamma", "delta", "eta", "u"]}


def _to_rational(v) -> sympy.Rational:
    if isinstance(v, (int, Fraction)):
        return sympy.Rational(v)
    return sympy.Rational(Fraction(str(v)))


def _cubic_from_expr(expr, fld: Field) -> CubicForm:
    xs = [_SYMS[f"x{i}"] for i in range(4)]
    poly = sympy.Poly(sympy.expand(expr), *xs)
    coeffs: dict[tuple[int, int, int], object] = {}
    for monom, coef in poly.terms():
        if sum(monom) != 3:
            raise ValueError("form is not homogeneous of degree 3")
        mono = []
        for var, e in enumerate(monom):
            mono.extend([var] * e)
        r = sympy.Rational(coef)
        coeffs[tuple(mono)] = fld.of(int(r.p), int(r.q))
    return CubicForm(fld, coeffs)


@dataclass(frozen=True)
class Degenerate:
    """Non-error outcome: the constructed tensor has no invertible twist."""

    reason: str
    tensor: Tensor


def build_family_superpotential(
    fam: SurfaceFamily,
    params: dict | None = None,
    a=(0, 0, 0, 0),
    lam=1,
    fld: Field = QQ,
):
    """e = w0(a) + lam * symmetrize(x3*f2 - f3), analyzed; returns the
    certified superpotential or a Degenerate result."""
    _check_char(fld)
    params = dict(params or {})
    for name in fam.params:
        if name not in params:
            params[name] = GENERIC_PARAMS[name]
    subs = {_SYMS[k]: _to_rational(v) for k, v in params.items() if k in _SYMS}
    for con in fam.constraints:
        val = sympy.sympify(con, locals=_SYMS).subs(subs)
        if sympy.simplify(val) == 0:
            raise ConstraintViolatedError(f"{fam.name}: constraint {con!r} violated")

    if fam.F is not None:
        expr = sympy.sympify(fam.F, locals=_SYMS)
    else:
        f2 = sympy.sympify(fam.f2, locals=_SYMS).subs(subs)
        f3 = sympy.sympify(fam.f3, locals=_SYMS).subs(subs)
        expr = _SYMS["x3"] * f2 - f3
    expr = sympy.expand(expr.subs(subs))

    lam = lam if not isinstance(lam, int) else fld.of(lam)
    t = w0(fld, a)
    if expr != 0 and lam:
        t = t + symmetrize(_cubic_from_expr(expr, fld)).scale(lam)
    if t.is_zero():
        return Degenerate(reason="zero tensor", tensor=t)
    try:
        return analyze(t)
    except DegenerateError as exc:
        return Degenerate(reason=str(exc), tensor=t)


# -- pairwise classification ---------------------------------------------


@dataclass(frozen=True)
class ClassifyConfig:
    bound: int = 8
    construction: str = "GL"  # or "SL"
    screen_prime: int | None = SCREEN_PRIME
    certify_zero: bool = True
    budget: int = 25_000_000
    cache_dir: str | None = None
    jobs: int = 1
    # "reversed" (b/D generators greatest) keeps the truncated bases roughly
    # an order of magnitude smaller than "default" on these presentations
    order: str = "reversed"

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "construction": self.construction,
            "screen_prime": self.screen_prime,
            "certify_zero": self.certify_zero,
            "budget": self.budget,
            "order": self.order,
        }


@dataclass(frozen=True)
class PairResult:
    left: str
    right: str
    verdict: Verdict
    config: dict

    def to_json(self) -> dict:
        return {"left": self.left, "right": self.right, "verdict": self.verdict.to_json(), "config": self.config}


def _content_hash(pres: Presentation, bound: int, field_spec: str, order: str) -> str:
    payload = emit(pres, "json") + f"|bound={bound}|field={field_spec}|order={order}"
    return hashlib.sha256(payload.encode()).hexdigest()


def _cached_verdict(cache_dir: str | None, key: str) -> Verdict | None:
    if not cache_dir:
        return None
    path = os.path.join(cache_dir, key + ".json")
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        obj = json.load(fh)
    return Verdict(
        status=obj["status"],
        witness_degree=obj["witness_degree"],
        bound=obj["bound"],
        field=obj["field"],
        order=obj["order"],
        stats=obj["stats"],
    )


def _store_verdict(cache_dir: str | None, key: str, v: Verdict):
    if not cache_dir:
        return
    os.makedirs(cache_dir, exist_ok=True)
    with open(os.path.join(cache_dir, key + ".json"), "w") as fh:
        json.dump(v.to_json(), fh, sort_keys=True)


def _run(pres: Presentation, cfg: ClassifyConfig) -> Verdict:
    key = _content_hash(pres, cfg.bound, pres.field.spec(), cfg.order)
    cached = _cached_verdict(cfg.cache_dir, key)
    if cached is not None:
        return cached
    if cfg.order == "reversed":
        order = MonomialOrder(pres.ngens, list(range(pres.ngens - 1, -1, -1)))
    else:
        order = MonomialOrder(pres.ngens)
    state = complete(pres, cfg.bound, order=order, budget=cfg.budget)
    v = verdict(state)
    _store_verdict(cfg.cache_dir, key, v)
    return v


def classify_pair(
    e: TwistedSuperpotential,
    f: TwistedSuperpotential,
    cfg: ClassifyConfig = ClassifyConfig(),
    left: str = "e",
    right: str = "f",
) -> PairResult:
    """Decide vanishing of the connecting algebra of (e, f): screen over a
    prime field first, then certify any zero verdict over Q."""
    builder = build_GL if cfg.construction == "GL" else build_SL
    pres = builder(e, f)
    v = None
    if cfg.screen_prime and pres.field == QQ:
        fp = PrimeField(cfg.screen_prime)
        screened = pres.change_field(fp, lambda c: to_prime_field(c, fp))
        v = _run(screened, cfg)
        if v.status == "zero" and cfg.certify_zero:
            v = _run(pres, cfg)
    if v is None:
        v = _run(pres, cfg)
    return PairResult(left=left, right=right, verdict=v, config=cfg.to_json())


def _pair_job(args):
    ln, e, rn, f, cfg = args
    return classify_pair(e, f, cfg, left=ln, right=rn)


@dataclass
class ComponentReport:
    items: list[str]
    pair_results: list[PairResult]
    groups: list[list[str]]
    separations: list[tuple[str, str]]
    conjectural: bool
    notes: list[str] = dc_field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "items": self.items,
            "pairs": [p.to_json() for p in self.pair_results],
            "groups": self.groups,
            "separations": [list(s) for s in self.separations],
            "conjectural": self.conjectural,
            "notes": self.notes,
        }


def component_report(items: list[tuple[str, TwistedSuperpotential]], cfg: ClassifyConfig = ClassifyConfig()) -> ComponentReport:
    """Pairwise classification plus a union-find grouping: NonzeroCertified
    edges join, ZeroCertified edges separate, anything touched by an
    Inconclusive edge is flagged conjectural."""
    items = sorted(items, key=lambda kv: kv[0])
    names = [n for n, _ in items]
    jobs = []
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            jobs.append((items[i][0], items[i][1], items[j][0], items[j][1], cfg))
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_pair_job, jobs))
    else:
        results = [_pair_job(j) for j in jobs]
    results.sort(key=lambda r: (r.left, r.right))

    parent = {n: n for n in names}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    zero_edges = []
    conjectural = False
    for r in results:
        if r.verdict.status == "nonzero":
            parent[find(r.left)] = find(r.right)
        elif r.verdict.status == "zero":
            zero_edges.append((r.left, r.right))
        else:
            conjectural = True
    for a, b in zero_edges:
        if find(a) == find(b):
            raise InconsistentEvidenceError(f"{a} and {b} are both joined and certified apart")

    groups_map: dict[str, list[str]] = {}
    for n in names:
        groups_map.setdefault(find(n), []).append(n)
    groups = sorted(groups_map.values())
    notes = []
    if conjectural:
        notes.append("grouping involves inconclusive edges; component membership is conjectural")
    return ComponentReport(
        items=names,
        pair_results=results,
        groups=groups,
        separations=sorted(zero_edges),
        conjectural=conjectural,
        notes=notes,
    )
