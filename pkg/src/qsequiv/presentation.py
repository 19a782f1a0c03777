"""Generators-and-relations presentations.

Builds the universal quantum-group connecting algebras for a pair of
nondegenerate twisted superpotentials (the full form with quantum determinant
and the determinant-free quotient), the reduced m=2 form, and superpotential
algebras themselves; plus generator-level counit/antipode/basis-change data
and deterministic serialization (text, Magma script, JSON).

Words are tuples of generator indices; generator list order IS the monomial
order precedence (index 0 greatest).
"""

from __future__ import annotations

import itertools
import json

from .fields import Field, parse_field
from .linalg import Matrix
from .superpotential import AlgebraData, TwistedSuperpotential, analyze
from .tensor import Tensor

__all__ = [
    "ArityMismatchError",
    "NotDiagonalError",
    "NcPoly",
    "Presentation",
    "build_GL",
    "build_SL",
    "build_SL2_reduced",
    "build_algebra",
    "counit_residual",
    "antipode_images",
    "basis_change",
    "emit",
    "parse_presentation_json",
]

Word = tuple[int, ...]


class ArityMismatchError(ValueError):
    pass


class NotDiagonalError(ValueError):
    """Counit data only exists on the diagonal (e = f)."""


def word_key(word: Word, ngens: int):
    """Deglex sort key; larger key = larger word. Generator 0 is greatest."""
    return (len(word), tuple(ngens - g for g in word))


class NcPoly:
    """Noncommutative polynomial: map word -> nonzero coefficient."""

    __slots__ = ("field", "terms")

    def __init__(self, field: Field, terms: dict[Word, object]):
        self.field = field
        self.terms = {tuple(w): c for w, c in terms.items() if c}

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, NcPoly) and self.terms == other.terms

    def __add__(self, other: "NcPoly") -> "NcPoly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = out.get(w)
            out[w] = c if s is None else s + c
        return NcPoly(self.field, out)

    def __sub__(self, other: "NcPoly") -> "NcPoly":
        return self + other.scale(-self.field.one())

    def scale(self, c) -> "NcPoly":
        if not c:
            return NcPoly(self.field, {})
        return NcPoly(self.field, {w: c * v for w, v in self.terms.items()})

    def __mul__(self, other: "NcPoly") -> "NcPoly":
        out: dict[Word, object] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                v = c1 * c2
                s = out.get(w)
                out[w] = v if s is None else s + v
        return NcPoly(self.field, out)

    def sorted_terms(self, ngens: int) -> list[tuple[Word, object]]:
        return sorted(self.terms.items(), key=lambda t: word_key(t[0], ngens), reverse=True)

    def leading_word(self, ngens: int) -> Word:
        return max(self.terms, key=lambda w: word_key(w, ngens))


class Presentation:
    """Named generators (in monomial-order precedence) plus relations."""

    __slots__ = ("field", "gens", "rels", "meta")

    def __init__(self, field: Field, gens: list[str], rels: list[NcPoly], meta: dict):
        if len(set(gens)) != len(gens):
            raise ValueError("generator names must be unique")
        self.field = field
        self.gens = list(gens)
        self.rels = [r for r in rels if not r.is_zero()]
        self.meta = dict(meta)

    @property
    def ngens(self) -> int:
        return len(self.gens)

    def gen_index(self, name: str) -> int:
        return self.gens.index(name)

    def poly(self, terms: dict[Word, object]) -> NcPoly:
        return NcPoly(self.field, terms)

    def change_field(self, field: Field, convert) -> "Presentation":
        """Map all coefficients through `convert` into a new field (used for
        prime-field screening of rational presentations)."""
        rels = [NcPoly(field, {w: convert(c) for w, c in r.terms.items()}) for r in self.rels]
        meta = dict(self.meta)
        meta["field"] = field.spec()
        return Presentation(field, self.gens, rels, meta)

    def __repr__(self):
        return f"Presentation({self.ngens} gens, {len(self.rels)} rels)"


def _gen_name(prefix: str, i: int, j: int, compact: bool) -> str:
    return f"{prefix}{i}{j}" if compact else f"{prefix}{i}_{j}"


def _ab_gens(p: int, q: int, with_det: bool) -> list[str]:
    compact = p <= 9 and q <= 9
    gens = [_gen_name("a", i, j, compact) for i in range(1, p + 1) for j in range(1, q + 1)]
    gens += [_gen_name("b", i, j, compact) for i in range(1, q + 1) for j in range(1, p + 1)]
    if with_det:
        gens += ["D", "Dinv"]
    return gens


def build_GL(e: TwistedSuperpotential, f: TwistedSuperpotential) -> Presentation:
    """Connecting algebra of the pair (e, f): 2(pq+1) generators A, B, D^{+-1}.

    Relations (stored as LHS - RHS):
      sum_i f_{i1..im} a_{j1 i1}...a_{jm im} - e_{j1..jm} D^{-1}   (p^m of them)
      sum_i e_{i1..im} b_{jm im}...b_{j1 i1} - f_{j1..jm} D        (q^m of them)
      D Dinv - 1, Dinv D - 1
      B A - I                                                      (q^2 of them)
    """
    if e.arity != f.arity:
        raise ArityMismatchError("superpotentials must have equal arity")
    m, p, q = e.arity, e.dim, f.dim
    fld = e.fld
    gens = _ab_gens(p, q, with_det=True)
    a = lambda i, j: (i - 1) * q + (j - 1)
    b = lambda i, j: p * q + (i - 1) * p + (j - 1)
    D, Dinv = 2 * p * q, 2 * p * q + 1

    rels = []
    for jt in itertools.product(range(1, p + 1), repeat=m):
        terms: dict[Word, object] = {}
        for it, fc in f.tensor.coeffs.items():
            w = tuple(a(jt[k], it[k]) for k in range(m))
            s = terms.get(w)
            terms[w] = fc if s is None else s + fc
        ec = e.tensor.coeffs.get(jt)
        if ec:
            terms[(Dinv,)] = terms.get((Dinv,), fld.zero()) - ec
        rels.append(NcPoly(fld, terms))
    for jt in itertools.product(range(1, q + 1), repeat=m):
        terms = {}
        for it, ec in e.tensor.coeffs.items():
            w = tuple(b(jt[k], it[k]) for k in reversed(range(m)))
            s = terms.get(w)
            terms[w] = ec if s is None else s + ec
        fc = f.tensor.coeffs.get(jt)
        if fc:
            terms[(D,)] = terms.get((D,), fld.zero()) - fc
        rels.append(NcPoly(fld, terms))
    one = fld.one()
    rels.append(NcPoly(fld, {(D, Dinv): one, (): -one}))
    rels.append(NcPoly(fld, {(Dinv, D): one, (): -one}))
    for i in range(1, q + 1):
        for j in range(1, q + 1):
            terms = {(b(i, k), a(k, j)): one for k in range(1, p + 1)}
            if i == j:
                terms[()] = -one
            rels.append(NcPoly(fld, terms))

    meta = {
        "construction": "GL",
        "m": m,
        "p": p,
        "q": q,
        "field": fld.spec(),
        "e": e.tensor.to_json(),
        "f": f.tensor.to_json(),
    }
    return Presentation(fld, gens, rels, meta)


def build_SL(e: TwistedSuperpotential, f: TwistedSuperpotential) -> Presentation:
    """The determinant-free quotient: D and D^{-1} replaced by 1."""
    if e.arity != f.arity:
        raise ArityMismatchError("superpotentials must have equal arity")
    m, p, q = e.arity, e.dim, f.dim
    fld = e.fld
    gens = _ab_gens(p, q, with_det=False)
    a = lambda i, j: (i - 1) * q + (j - 1)
    b = lambda i, j: p * q + (i - 1) * p + (j - 1)

    rels = []
    for jt in itertools.product(range(1, p + 1), repeat=m):
        terms: dict[Word, object] = {}
        for it, fc in f.tensor.coeffs.items():
            w = tuple(a(jt[k], it[k]) for k in range(m))
            s = terms.get(w)
            terms[w] = fc if s is None else s + fc
        ec = e.tensor.coeffs.get(jt)
        if ec:
            terms[()] = terms.get((), fld.zero()) - ec
        rels.append(NcPoly(fld, terms))
    for jt in itertools.product(range(1, q + 1), repeat=m):
        terms = {}
        for it, ec in e.tensor.coeffs.items():
            w = tuple(b(jt[k], it[k]) for k in reversed(range(m)))
            s = terms.get(w)
            terms[w] = ec if s is None else s + ec
        fc = f.tensor.coeffs.get(jt)
        if fc:
            terms[()] = terms.get((), fld.zero()) - fc
        rels.append(NcPoly(fld, terms))
    one = fld.one()
    for i in range(1, q + 1):
        for j in range(1, q + 1):
            terms = {(b(i, k), a(k, j)): one for k in range(1, p + 1)}
            if i == j:
                terms[()] = -one
            rels.append(NcPoly(fld, terms))

    meta = {
        "construction": "SL",
        "m": m,
        "p": p,
        "q": q,
        "field": fld.spec(),
        "e": e.tensor.to_json(),
        "f": f.tensor.to_json(),
    }
    return Presentation(fld, gens, rels, meta)


def build_SL2_reduced(E: Matrix, F: Matrix) -> Presentation:
    """m=2 determinant-free presentation on the a-generators alone:
    A F A^T E^{-1} = I_p and F A^T E^{-1} A = I_q."""
    fld = E.field
    Einv = E.invert()
    F.invert()  # raise early when F is singular
    p, q = E.rows, F.rows
    compact = p <= 9 and q <= 9
    gens = [_gen_name("a", i, j, compact) for i in range(1, p + 1) for j in range(1, q + 1)]
    a = lambda i, j: (i - 1) * q + (j - 1)
    one = fld.one()

    rels = []
    # (A F A^T E^{-1})_{ij} = sum_{k,l,t} F_{kl} Einv_{tj} a_{ik} a_{tl}
    for i in range(1, p + 1):
        for j in range(1, p + 1):
            terms: dict[Word, object] = {}
            for k in range(1, q + 1):
                for l in range(1, q + 1):
                    fkl = F.data[k - 1][l - 1]
                    if not fkl:
                        continue
                    for t in range(1, p + 1):
                        c = fkl * Einv.data[t - 1][j - 1]
                        if not c:
                            continue
                        w = (a(i, k), a(t, l))
                        s = terms.get(w)
                        terms[w] = c if s is None else s + c
            if i == j:
                terms[()] = terms.get((), fld.zero()) - one
            rels.append(NcPoly(fld, terms))
    # (F A^T E^{-1} A)_{ij} = sum_{k,l,t} F_{ik} Einv_{lt} a_{lk} a_{tj}
    for i in range(1, q + 1):
        for j in range(1, q + 1):
            terms = {}
            for k in range(1, q + 1):
                fik = F.data[i - 1][k - 1]
                if not fik:
                    continue
                for l in range(1, p + 1):
                    for t in range(1, p + 1):
                        c = fik * Einv.data[l - 1][t - 1]
                        if not c:
                            continue
                        w = (a(l, k), a(t, j))
                        s = terms.get(w)
                        terms[w] = c if s is None else s + c
            if i == j:
                terms[()] = terms.get((), fld.zero()) - one
            rels.append(NcPoly(fld, terms))

    meta = {
        "construction": "SL2_reduced",
        "p": p,
        "q": q,
        "field": fld.spec(),
        "E": [[fld.coeff_str(x) for x in row] for row in E.data],
        "F": [[fld.coeff_str(x) for x in row] for row in F.data],
    }
    return Presentation(fld, gens, rels, meta)


def build_algebra(alg: AlgebraData) -> Presentation:
    """The superpotential algebra itself: x_1..x_q with one degree-N relation
    per RREF basis vector of the relation space."""
    sp = alg.superpotential
    q, N = sp.dim, alg.N
    fld = sp.fld
    gens = [f"x{i}" for i in range(1, q + 1)]
    rels = []
    for row in alg.relations.basis.data:
        t = Tensor.from_vector(fld, N, q, row)
        terms = {tuple(i - 1 for i in idx): c for idx, c in t.coeffs.items()}
        rels.append(NcPoly(fld, terms))
    meta = {
        "construction": "algebra",
        "m": sp.arity,
        "N": N,
        "q": q,
        "field": fld.spec(),
        "e": sp.tensor.to_json(),
    }
    return Presentation(fld, gens, rels, meta)


def _is_diagonal_gen(name: str) -> bool:
    if name in ("D", "Dinv"):
        return True
    body = name[1:]
    if "_" in body:
        i, j = body.split("_")
    else:
        half = len(body) // 2
        i, j = body[:half], body[half:]
    return i == j


def counit_residual(pres: Presentation) -> list:
    """Evaluate every relation under a_ij -> delta_ij, b_ij -> delta_ij,
    D^{+-1} -> 1.  Only defined on the diagonal (e = f)."""
    if pres.meta.get("construction") not in ("GL", "SL"):
        raise NotDiagonalError("counit data requires a GL/SL presentation")
    if pres.meta.get("e") != pres.meta.get("f"):
        raise NotDiagonalError("counit exists only when e = f")
    diag = [_is_diagonal_gen(g) for g in pres.gens]
    residuals = []
    for r in pres.rels:
        total = pres.field.zero()
        for w, c in r.terms.items():
            if all(diag[g] for g in w):
                total = total + c
        residuals.append(total)
    return residuals


def antipode_images(e: TwistedSuperpotential, f: TwistedSuperpotential) -> dict[str, NcPoly]:
    """Generator-level antipode data: images of the generators of the (e,f)
    algebra inside the (f,e) algebra.

    S(A) = B', S(B) = D'^{-1} Q^{-T} A' P^T D', S(D^{+-1}) = D'^{-+1},
    where primes live in the (f,e) algebra and P, Q are the twists of e, f.
    """
    if e.arity != f.arity:
        raise ArityMismatchError("superpotentials must have equal arity")
    p, q = e.dim, f.dim
    fld = e.fld
    src_gens = _ab_gens(p, q, with_det=True)
    # target algebra (f, e): A' is q x p, B' is p x q
    a_t = lambda i, j: (i - 1) * p + (j - 1)
    b_t = lambda i, j: q * p + (i - 1) * q + (j - 1)
    D_t, Dinv_t = 2 * p * q, 2 * p * q + 1
    QinvT = f.twist.invert().transpose()
    PT = e.twist.transpose()

    images: dict[str, NcPoly] = {}
    src_a = lambda i, j: src_gens[(i - 1) * q + (j - 1)]
    src_b = lambda i, j: src_gens[p * q + (i - 1) * p + (j - 1)]
    for i in range(1, p + 1):
        for j in range(1, q + 1):
            images[src_a(i, j)] = NcPoly(fld, {(b_t(i, j),): fld.one()})
    for i in range(1, q + 1):
        for j in range(1, p + 1):
            terms: dict[Word, object] = {}
            for k in range(1, q + 1):
                cik = QinvT.data[i - 1][k - 1]
                if not cik:
                    continue
                for l in range(1, p + 1):
                    c = cik * PT.data[l - 1][j - 1]
                    if not c:
                        continue
                    w = (Dinv_t, a_t(k, l), D_t)
                    s = terms.get(w)
                    terms[w] = c if s is None else s + c
            images[src_b(i, j)] = NcPoly(fld, terms)
    images["D"] = NcPoly(fld, {(Dinv_t,): fld.one()})
    images["Dinv"] = NcPoly(fld, {(D_t,): fld.one()})
    return images


def _normalize_scaled(t: Tensor):
    """Scale a nonzero tensor so its lexicographically first coefficient is 1;
    returns (normalized tensor, extracted scalar)."""
    first = min(t.coeffs)
    alpha = t.coeffs[first]
    return t.scale(t.field.one() / alpha), alpha


def basis_change(
    e: TwistedSuperpotential,
    f: TwistedSuperpotential,
    phi: Matrix,
    psi: Matrix,
):
    """Transform the pair by invertible phi, psi: e' ~ phi^{tensor m}(e),
    f' ~ psi^{tensor m}(f), with the generator substitution
    A -> phi A' psi, B -> psi^{-1} B' phi^{-1}, D^{+-1} -> (D'/(alpha beta))^{+-1}.

    Returns (e', f', substitution map, alpha, beta).
    """
    p, q = e.dim, f.dim
    fld = e.fld
    e_raw = e.tensor.apply_all_factors(phi)
    f_raw = f.tensor.apply_all_factors(psi)
    e_new, alpha = _normalize_scaled(e_raw)
    f_new, beta = _normalize_scaled(f_raw)
    e2 = analyze(e_new)
    f2 = analyze(f_new)

    phi_inv = phi.invert()
    psi_inv = psi.invert()
    src_gens = _ab_gens(p, q, with_det=True)
    a_t = lambda i, j: (i - 1) * q + (j - 1)
    b_t = lambda i, j: p * q + (i - 1) * p + (j - 1)
    D_t, Dinv_t = 2 * p * q, 2 * p * q + 1

    subst: dict[str, NcPoly] = {}
    for i in range(1, p + 1):
        for j in range(1, q + 1):
            terms: dict[Word, object] = {}
            for k in range(1, p + 1):
                c1 = phi.data[i - 1][k - 1]
                if not c1:
                    continue
                for l in range(1, q + 1):
                    c = c1 * psi.data[l - 1][j - 1]
                    if c:
                        terms[(a_t(k, l),)] = c
            subst[src_gens[(i - 1) * q + (j - 1)]] = NcPoly(fld, terms)
    for i in range(1, q + 1):
        for j in range(1, p + 1):
            terms = {}
            for k in range(1, q + 1):
                c1 = psi_inv.data[i - 1][k - 1]
                if not c1:
                    continue
                for l in range(1, p + 1):
                    c = c1 * phi_inv.data[l - 1][j - 1]
                    if c:
                        terms[(b_t(k, l),)] = c
            subst[src_gens[p * q + (i - 1) * p + (j - 1)]] = NcPoly(fld, terms)
    ab = alpha * beta
    subst["D"] = NcPoly(fld, {(D_t,): fld.one() / ab})
    subst["Dinv"] = NcPoly(fld, {(Dinv_t,): ab})
    return e2, f2, subst, alpha, beta


# -- serialization -------------------------------------------------------


def _coeff_text(fld: Field, c) -> str:
    num, den = fld.coeff_str(c)
    return num if den == "1" else f"{num}/{den}"


def _term_text(pres: Presentation, w: Word, c) -> str:
    mono = "*".join(pres.gens[g] for g in w) if w else ""
    num, den = pres.field.coeff_str(c)
    unit = (num, den) in (("1", "1"), ("-1", "1"))
    if not mono:
        return _coeff_text(pres.field, c)
    if unit:
        return mono if num == "1" else f"-{mono}"
    return f"{_coeff_text(pres.field, c)}*{mono}"


def poly_text(pres: Presentation, poly: NcPoly) -> str:
    if poly.is_zero():
        return "0"
    parts = []
    for w, c in poly.sorted_terms(pres.ngens):
        txt = _term_text(pres, w, c)
        if not parts:
            parts.append(txt)
        elif txt.startswith("-"):
            parts.append(f"- {txt[1:]}")
        else:
            parts.append(f"+ {txt}")
    return " ".join(parts)


MAGMA_HEADER = "// free-algebra presentation export\n// generated deterministically; do not edit\n"


def emit(pres: Presentation, fmt: str) -> str:
    """Deterministic serialization: canonical-text, magma-script or json."""
    if fmt == "canonical-text":
        lines = ["gens: " + ", ".join(pres.gens)]
        lines += [poly_text(pres, r) for r in pres.rels]
        return "\n".join(lines) + "\n"
    if fmt == "magma-script":
        n = pres.ngens
        names = ", ".join(pres.gens)
        lines = [
            MAGMA_HEADER.rstrip("\n"),
            f"F<{names}> := FreeAlgebra(RationalField(), {n});",
            "rels := [",
        ]
        for i, r in enumerate(pres.rels):
            sep = "," if i + 1 < len(pres.rels) else ""
            lines.append(f"    {poly_text(pres, r)}{sep}")
        lines += [
            "];",
            "I := ideal<F | rels>;",
            "GroebnerBasis(I);",
        ]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        rels = []
        for r in pres.rels:
            terms = []
            for w, c in r.sorted_terms(pres.ngens):
                num, den = pres.field.coeff_str(c)
                terms.append({"word": [pres.gens[g] for g in w], "num": num, "den": den})
            rels.append(terms)
        obj = {"gens": pres.gens, "rels": rels, "meta": pres.meta}
        return json.dumps(obj, sort_keys=True, indent=1) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def parse_presentation_json(text: str) -> Presentation:
    obj = json.loads(text)
    fld = parse_field(obj["meta"].get("field", "Q"))
    gens = list(obj["gens"])
    index = {g: i for i, g in enumerate(gens)}
    rels = []
    for terms in obj["rels"]:
        d: dict[Word, object] = {}
        for t in terms:
            w = tuple(index[g] for g in t["word"])
            d[w] = fld.parse_coeff(t["num"], t.get("den", "1"))
        rels.append(NcPoly(fld, d))
    return Presentation(fld, gens, rels, obj["meta"])
