"""Degree-truncated noncommutative Groebner bases over the free algebra.

Normal selection (ascending obstruction degree, FIFO within a degree) makes
every run deterministic for a fixed (presentation, order, bound, field).
Coefficients run over Q (gmpy2 rationals) or F_p (raw ints mod p) -- the
prime-field path is the fast screening path, rational runs certify.

Words are tuples of generator indices.  The basis keeps hash indexes of
leading-word prefixes, suffixes and subwords so that divisor lookup, overlap
enumeration and demotion are dictionary probes rather than scans.

A vanishing verdict is one of:
  ZeroCertified      -- a nonzero constant was derived by exact rewriting;
  NonzeroCertified   -- the obstruction queue emptied, so the (finite) basis
                        is complete and normal words witness a nonzero algebra;
  Inconclusive       -- the degree bound was reached cleanly.
"""

from __future__ import annotations

import heapq
import json
import os
import resource
import time
from dataclasses import dataclass, field as dc_field

from gmpy2 import mpq

from .fields import Field, ModP, PrimeField, parse_field
from .presentation import NcPoly, Presentation

__all__ = [
    "BudgetExceededError",
    "MemoryBudgetError",
    "InhomogeneousError",
    "InsufficientDegreeError",
    "MonomialOrder",
    "GBState",
    "Verdict",
    "reduce_poly",
    "reduce",
    "overlaps",
    "complete",
    "verdict",
    "truncated_hilbert",
    "save_checkpoint",
    "load_checkpoint",
    "resume",
]

Word = tuple[int, ...]

DEFAULT_BUDGET = 25_000_000  # rewrite steps


class BudgetExceededError(RuntimeError):
    """Step budget hit; reported distinctly from a clean Inconclusive stop."""

    def __init__(self, steps: int):
        super().__init__(f"rewrite budget exceeded after {steps} steps")
        self.steps = steps


class MemoryBudgetError(BudgetExceededError):
    """Peak memory cap hit; raised instead of letting the OS kill the run."""

    def __init__(self, steps: int, peak_mb: int):
        RuntimeError.__init__(self, f"memory cap exceeded at {peak_mb} MB after {steps} steps")
        self.steps = steps
        self.peak_mb = peak_mb


def _memory_cap_mb() -> int:
    return int(os.environ.get("QSEQUIV_MEMORY_MB", "5000"))


class InhomogeneousError(ValueError):
    pass


class InsufficientDegreeError(ValueError):
    pass


class MonomialOrder:
    """Degree-lexicographic order on words; precedence is a permutation of the
    generator indices, earliest = greatest."""

    def __init__(self, ngens: int, precedence: list[int] | None = None):
        if precedence is None:
            precedence = list(range(ngens))
        if sorted(precedence) != list(range(ngens)):
            raise ValueError("precedence must be a permutation of the generators")
        self.ngens = ngens
        self.precedence = list(precedence)
        rank = [0] * ngens
        for pos, g in enumerate(precedence):
            rank[g] = pos
        # weight: larger = greater in the order
        self.weight = tuple(ngens - r for r in rank)

    def key(self, w: Word):
        wt = self.weight
        return (len(w), tuple(wt[g] for g in w))

    def neg_key(self, w: Word):
        wt = self.weight
        return (-len(w), tuple(-wt[g] for g in w))

    def leading(self, terms: dict) -> Word:
        return max(terms, key=self.key)

    def sorted_words(self, words) -> list[Word]:
        return sorted(words, key=self.key, reverse=True)

    def is_trivial(self) -> bool:
        return self.precedence == list(range(self.ngens))


# -- coefficient adapters ------------------------------------------------


class _RatOps:
    kind = "Q"
    one = mpq(1)

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def inv(a):
        return 1 / a

    @staticmethod
    def neg(a):
        return -a


class _ModOps:
    kind = "Fp"

    def __init__(self, p: int):
        self.p = p
        self.one = 1

    def mul(self, a, b):
        return a * b % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def inv(self, a):
        return pow(a, -1, self.p)

    def neg(self, a):
        return -a % self.p


def _ops_for(fld: Field):
    if isinstance(fld, PrimeField):
        return _ModOps(fld.p)
    return _RatOps()


def _raw_terms(poly: NcPoly, fld: Field, order: MonomialOrder) -> dict:
    """Engine terms: words remapped through the precedence so that gen 0 is
    always greatest (plain reverse-tuple comparison then matches the order);
    prime-field coefficients unwrapped to ints."""
    remap = None if order.is_trivial() else [order.precedence.index(g) for g in range(order.ngens)]
    rank = remap  # rank[g] = precedence position of g
    if isinstance(fld, PrimeField):
        if rank is None:
            return {w: c.v for w, c in poly.terms.items()}
        return {tuple(rank[g] for g in w): c.v for w, c in poly.terms.items()}
    if rank is None:
        return dict(poly.terms)
    return {tuple(rank[g] for g in w): c for w, c in poly.terms.items()}


def _unmap_poly(terms: dict, fld: Field, order: MonomialOrder) -> NcPoly:
    prec = None if order.is_trivial() else order.precedence
    if isinstance(fld, PrimeField):
        if prec is None:
            return NcPoly(fld, {w: ModP(c, fld.p) for w, c in terms.items()})
        return NcPoly(fld, {tuple(prec[r] for r in w): ModP(c, fld.p) for w, c in terms.items()})
    if prec is None:
        return NcPoly(fld, dict(terms))
    return NcPoly(fld, {tuple(prec[r] for r in w): c for w, c in terms.items()})


# engine-side deglex on rank words: longer first, then smaller rank = greater
def _ekey(w: Word):
    return (len(w), tuple(-r for r in w))


def _neg_ekey(w: Word):
    return (-len(w), w)


# -- the reduction core --------------------------------------------------


class _Basis:
    """Alive monic basis elements with leading-word hash indexes.

    Stored terms are interned: identical words (and, over a prime field,
    identical coefficient ints) share one object across the whole basis,
    which keeps large truncated bases several times smaller in memory.
    """

    def __init__(self):
        self.polys: list[dict] = []  # full polynomial, monic, by index
        self._wcache: dict[Word, Word] = {}
        self._vcache: dict = {}
        self.leads: list[Word] = []
        self.alive: list[bool] = []
        self.lead_map: dict[Word, int] = {}
        self.by_prefix: dict[Word, list[int]] = {}  # proper prefixes of leads
        self.by_suffix: dict[Word, list[int]] = {}  # proper suffixes of leads
        self.by_subword: dict[Word, list[int]] = {}  # strict contiguous subwords
        self.max_lead_len = 0

    def intern_terms(self, terms: dict, share_values: bool) -> dict:
        wc = self._wcache
        if not share_values:
            return {wc.setdefault(w, w): c for w, c in terms.items()}
        vc = self._vcache
        return {wc.setdefault(w, w): vc.setdefault(c, c) for w, c in terms.items()}

    def add(self, terms: dict, lead: Word) -> int:
        idx = len(self.polys)
        self.polys.append(terms)
        self.leads.append(lead)
        self.alive.append(True)
        self.lead_map[lead] = idx
        L = len(lead)
        self.max_lead_len = max(self.max_lead_len, L)
        for k in range(1, L):
            self.by_prefix.setdefault(lead[:k], []).append(idx)
            self.by_suffix.setdefault(lead[L - k :], []).append(idx)
        for s in range(L):
            for t in range(s + 1, L + 1):
                if t - s < L:
                    self.by_subword.setdefault(lead[s:t], []).append(idx)
        return idx

    def kill(self, idx: int):
        self.alive[idx] = False
        del self.lead_map[self.leads[idx]]

    def find_divisor(self, w: Word):
        """Leftmost-shortest (idx, pos) with leads[idx] a subword of w."""
        lead_map = self.lead_map
        n = len(w)
        top = self.max_lead_len
        for pos in range(n):
            limit = min(top, n - pos) + 1
            for L in range(1, limit):
                idx = lead_map.get(w[pos : pos + L])
                if idx is not None:
                    return idx, pos
        return None

    def alive_indices(self) -> list[int]:
        return [i for i, a in enumerate(self.alive) if a]


class _Budget:
    __slots__ = ("limit", "steps")

    def __init__(self, limit: int):
        self.limit = limit
        self.steps = 0

    def charge(self, n: int):
        self.steps += n
        if self.steps > self.limit:
            raise BudgetExceededError(self.steps)


def _normal_form(terms: dict, basis: _Basis, ops, budget: _Budget) -> dict:
    """Full normal form of `terms` modulo the alive basis (all monic)."""
    h = dict(terms)
    out: dict = {}
    heap = [_neg_ekey(w) + (w,) for w in h]
    heapq.heapify(heap)
    sub = ops.sub
    mul = ops.mul
    neg = ops.neg
    find = basis.find_divisor
    while heap:
        w = heapq.heappop(heap)[-1]
        c = h.get(w)
        if not c:
            h.pop(w, None)
            continue
        hit = find(w)
        if hit is None:
            out[w] = c
            del h[w]
            continue
        idx, pos = hit
        del h[w]
        lw = basis.leads[idx]
        g = basis.polys[idx]
        budget.charge(len(g))
        u = w[:pos]
        v = w[pos + len(lw) :]
        for gw, gc in g.items():
            if gw == lw:
                continue
            nw = u + gw + v
            cur = h.get(nw)
            if cur is None:
                val = neg(mul(c, gc))
                if val:
                    h[nw] = val
                    heapq.heappush(heap, _neg_ekey(nw) + (nw,))
            else:
                val = sub(cur, mul(c, gc))
                if val:
                    h[nw] = val
                else:
                    del h[nw]
    return out


def _make_monic(terms: dict, lead: Word, ops) -> dict:
    c = terms[lead]
    if c == ops.one:
        return terms
    inv = ops.inv(c)
    return {w: ops.mul(inv, v) for w, v in terms.items()}


def _spoly(p1: dict, l1: Word, p2: dict, l2: Word, u: Word, v: Word, ops) -> dict:
    """p1 * v - u * p2 for the overlap word l1 + v = u + l2; leads cancel."""
    out: dict = {}
    for w, c in p1.items():
        out[w + v] = c
    sub = ops.sub
    neg = ops.neg
    for w, c in p2.items():
        nw = u + w
        cur = out.get(nw)
        val = sub(cur, c) if cur is not None else neg(c)
        if val:
            out[nw] = val
        else:
            out.pop(nw, None)
    return out


# -- public single-step operations (NcPoly level) ------------------------


def _max_gen(polys: list[NcPoly]) -> int:
    m = 0
    for p in polys:
        for w in p.terms:
            if w:
                m = max(m, max(w))
    return m


def reduce_poly(p: NcPoly, basis: list[NcPoly], order: MonomialOrder | None = None) -> NcPoly:
    """Normal form of p modulo a list of monic polynomials."""
    fld = p.field
    if order is None:
        order = MonomialOrder(_max_gen(basis + [p]) + 1)
    ops = _ops_for(fld)
    B = _Basis()
    for g in basis:
        if g.is_zero():
            continue
        terms = _raw_terms(g, fld, order)
        lead = max(terms, key=_ekey)
        if not lead:
            return NcPoly(fld, {})  # a unit in the basis kills everything
        B.add(_make_monic(terms, lead, ops), lead)
    out = _normal_form(_raw_terms(p, fld, order), B, ops, _Budget(DEFAULT_BUDGET))
    return _unmap_poly(out, fld, order)


reduce = reduce_poly


def _overlap_words(lw1: Word, lw2: Word):
    """Proper overlaps: suffix of lw1 of length k = prefix of lw2, yielding
    (u, v) with u + lw2 = lw1 + v (the overlap word)."""
    L1, L2 = len(lw1), len(lw2)
    for k in range(1, min(L1, L2)):
        if lw1[L1 - k :] == lw2[:k]:
            yield lw1[: L1 - k], lw2[k:]


def overlaps(f: NcPoly, g: NcPoly, order: MonomialOrder | None = None) -> list[NcPoly]:
    """All S-polynomials from overlap and inclusion ambiguities of the two
    monic polynomials (both orientations, including self-overlaps)."""
    fld = f.field
    if order is None:
        order = MonomialOrder(_max_gen([f, g]) + 1)
    ops = _ops_for(fld)
    tf = _raw_terms(f, fld, order)
    tg = _raw_terms(g, fld, order)
    lf = max(tf, key=_ekey)
    lg = max(tg, key=_ekey)
    out = []
    pairs = [(tf, lf, tg, lg)]
    if f is not g:
        pairs.append((tg, lg, tf, lf))
    for p1, l1, p2, l2 in pairs:
        for u, v in _overlap_words(l1, l2):
            out.append(_spoly(p1, l1, p2, l2, u, v, ops))
        # inclusion: l2 occurs strictly inside l1
        L1, L2 = len(l1), len(l2)
        if L2 < L1:
            for pos in range(L1 - L2 + 1):
                if l1[pos : pos + L2] == l2:
                    u = l1[:pos]
                    v = l1[pos + L2 :]
                    d = dict(p1)
                    for w, c in p2.items():
                        nw = u + w + v
                        cur = d.get(nw)
                        val = ops.sub(cur, c) if cur is not None else ops.neg(c)
                        if val:
                            d[nw] = val
                        else:
                            d.pop(nw, None)
                    out.append(d)
    polys = [_unmap_poly(s, fld, order) for s in out]
    return [s for s in polys if not s.is_zero()]


# -- completion ----------------------------------------------------------


@dataclass
class GBState:
    """Truncated reduced Groebner basis plus run provenance."""

    field: Field
    gens: list[str]
    order: MonomialOrder
    bound: int
    basis: list[NcPoly]
    processed_degree: int
    queue_empty: bool
    found_constant: bool
    witness_degree: int | None
    homogeneous: bool
    stats: dict = dc_field(default_factory=dict)


def _presentation_is_homogeneous(rels: list[NcPoly]) -> bool:
    for r in rels:
        degs = {len(w) for w in r.terms}
        if len(degs) > 1:
            return False
    return True


def complete(
    pres: Presentation,
    bound: int,
    order: MonomialOrder | None = None,
    budget: int = DEFAULT_BUDGET,
) -> GBState:
    """Process all obstructions of degree <= bound in ascending degree (normal
    selection); stops early once a nonzero constant is derived."""
    fld = pres.field
    if order is None:
        order = MonomialOrder(pres.ngens)
    if order.ngens != pres.ngens:
        raise ValueError("order and presentation generator counts differ")
    ops = _ops_for(fld)
    bud = _Budget(budget)
    basis = _Basis()
    t0 = time.monotonic()

    # task heap entries: (degree, seq, kind, payload)
    #   kind 0: payload = raw polynomial dict
    #   kind 1: payload = (i, j, u, v) overlap descriptor: polys[i]*v - u*polys[j]
    heap: list = []
    seq = 0
    deferred = 0
    max_rel_deg = 0
    for r in pres.rels:
        terms = _raw_terms(r, fld, order)
        if not terms:
            continue
        deg = len(max(terms, key=_ekey))
        max_rel_deg = max(max_rel_deg, deg)
        heapq.heappush(heap, (deg, seq, 0, terms))
        seq += 1
    if bound < max_rel_deg:
        raise ValueError(f"bound {bound} below maximal relation degree {max_rel_deg}")

    found_constant = False
    witness_degree = None
    n_spolys = 0
    n_nonzero = 0
    processed_degree = 0
    mem_cap = _memory_cap_mb()

    while heap:
        deg = heap[0][0]
        if deg > bound:
            break
        if n_spolys % 512 == 0:
            peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss // 1024
            if peak > mem_cap:
                raise MemoryBudgetError(bud.steps, peak)
        _, _, kind, payload = heapq.heappop(heap)
        processed_degree = max(processed_degree, deg)
        if kind == 0:
            terms = payload
        else:
            i, j, u, v = payload
            terms = _spoly(basis.polys[i], basis.leads[i], basis.polys[j], basis.leads[j], u, v, ops)
        nf = _normal_form(terms, basis, ops, bud)
        n_spolys += 1
        if not nf:
            continue
        lead = max(nf, key=_ekey)
        if not lead:
            found_constant = True
            witness_degree = deg
            break
        nf = _make_monic(nf, lead, ops)
        nf = basis.intern_terms(nf, ops.kind == "Fp")
        n_nonzero += 1
        L = len(lead)
        # demote alive elements whose lead strictly contains the new lead
        for idx in basis.by_subword.get(lead, ()):
            if basis.alive[idx]:
                basis.kill(idx)
                heapq.heappush(heap, (len(basis.leads[idx]), seq, 0, basis.polys[idx]))
                seq += 1
        new_idx = basis.add(nf, lead)
        # overlaps where the new lead comes first: its proper suffix is a
        # proper prefix of another alive lead (self-overlaps included)
        for k in range(1, L):
            for idx in basis.by_prefix.get(lead[L - k :], ()):
                if not basis.alive[idx]:
                    continue
                lw = basis.leads[idx]
                od = L + len(lw) - k
                if od > bound:
                    deferred += 1
                    continue
                heapq.heappush(heap, (od, seq, 1, (new_idx, idx, lead[: L - k], lw[k:])))
                seq += 1
        # overlaps where the new lead comes second
        for k in range(1, L):
            for idx in basis.by_suffix.get(lead[:k], ()):
                if not basis.alive[idx] or idx == new_idx:
                    continue
                lw = basis.leads[idx]
                od = len(lw) + L - k
                if od > bound:
                    deferred += 1
                    continue
                heapq.heappush(heap, (od, seq, 1, (idx, new_idx, lw[: len(lw) - k], lead[k:])))
                seq += 1

    queue_empty = not heap and deferred == 0 and not found_constant

    if found_constant:
        final = [NcPoly(fld, {(): fld.one()})]
        processed = witness_degree
    else:
        final = _interreduce(basis, ops, order, bud, fld)
        processed = bound if not heap or heap[0][0] > bound else processed_degree

    stats = {
        "spolys_processed": n_spolys,
        "basis_additions": n_nonzero,
        "basis_size": len(final),
        "deferred_obstructions": deferred,
        "rewrite_steps": bud.steps,
        "elapsed_s": round(time.monotonic() - t0, 3),
    }
    return GBState(
        field=fld,
        gens=list(pres.gens),
        order=order,
        bound=bound,
        basis=final,
        processed_degree=processed,
        queue_empty=queue_empty,
        found_constant=found_constant,
        witness_degree=witness_degree,
        homogeneous=_presentation_is_homogeneous(pres.rels),
        stats=stats,
    )


def _interreduce(basis: _Basis, ops, order: MonomialOrder, bud: _Budget, fld: Field) -> list[NcPoly]:
    """Reduce every tail against the full alive basis; leads are already
    pairwise non-divisible.  Ascending lead order plus in-place updates give a
    fully reduced basis."""
    out = []
    mem_cap = _memory_cap_mb()
    for n, idx in enumerate(sorted(basis.alive_indices(), key=lambda i: _ekey(basis.leads[i]))):
        if n % 512 == 0:
            peak = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss // 1024
            if peak > mem_cap:
                raise MemoryBudgetError(bud.steps, peak)
        terms = basis.polys[idx]
        lead = basis.leads[idx]
        tail = {w: c for w, c in terms.items() if w != lead}
        red = _normal_form(tail, basis, ops, bud)
        red[lead] = terms[lead]
        red = basis.intern_terms(red, ops.kind == "Fp")
        basis.polys[idx] = red
        out.append(_unmap_poly(red, fld, order))
    return out


# -- verdicts ------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    status: str  # "zero" | "nonzero" | "inconclusive"
    witness_degree: int | None
    bound: int
    field: str
    order: list[int]
    stats: dict

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "witness_degree": self.witness_degree,
            "bound": self.bound,
            "field": self.field,
            "order": self.order,
            "stats": self.stats,
        }


def verdict(state: GBState) -> Verdict:
    if state.found_constant:
        status = "zero"
    elif state.queue_empty:
        status = "nonzero"
    else:
        status = "inconclusive"
    return Verdict(
        status=status,
        witness_degree=state.witness_degree,
        bound=state.bound,
        field=state.field.spec(),
        order=list(state.order.precedence),
        stats=dict(state.stats),
    )


# -- normal-word counting ------------------------------------------------

HILBERT_WORD_CAP = 5_000_000


def truncated_hilbert(state: GBState, d: int) -> list[int]:
    """Counts of normal words (avoiding every basis leading word as a subword)
    in degrees 0..d; the Hilbert function of the quotient up to degree d for a
    homogeneous presentation."""
    if not state.homogeneous:
        raise InhomogeneousError("presentation is not homogeneous")
    if state.processed_degree < d and not state.queue_empty:
        raise InsufficientDegreeError(f"basis only processed to degree {state.processed_degree}")
    ngens = len(state.gens)
    forbidden: dict[int, set[Word]] = {}
    for p in state.basis:
        lw = p.leading_word(ngens)
        forbidden.setdefault(len(lw), set()).add(lw)
    if 0 in forbidden:
        return [0] * (d + 1)
    counts = [1]
    frontier: list[Word] = [()]
    total = 1
    for _ in range(d):
        nxt = []
        for w in frontier:
            for g in range(ngens):
                nw = w + (g,)
                n = len(nw)
                ok = True
                for L, words in forbidden.items():
                    if L <= n and nw[n - L :] in words:
                        ok = False
                        break
                if ok:
                    nxt.append(nw)
        total += len(nxt)
        if total > HILBERT_WORD_CAP:
            raise BudgetExceededError(total)
        counts.append(len(nxt))
        frontier = nxt
    return counts


# -- checkpoints ---------------------------------------------------------


def save_checkpoint(state: GBState, path: str):
    fld = state.field
    basis = []
    for p in state.basis:
        terms = []
        for w, c in p.sorted_terms(len(state.gens)):
            num, den = fld.coeff_str(c)
            terms.append({"word": [state.gens[g] for g in w], "num": num, "den": den})
        basis.append(terms)
    obj = {
        "field": fld.spec(),
        "gens": state.gens,
        "order": state.order.precedence,
        "bound": state.bound,
        "basis": basis,
        "processed_degree": state.processed_degree,
        "queue_empty": state.queue_empty,
        "found_constant": state.found_constant,
        "witness_degree": state.witness_degree,
        "homogeneous": state.homogeneous,
        "stats": state.stats,
    }
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True)


def load_checkpoint(path: str) -> GBState:
    with open(path) as fh:
        obj = json.load(fh)
    fld = parse_field(obj["field"])
    gens = obj["gens"]
    index = {g: i for i, g in enumerate(gens)}
    basis = []
    for terms in obj["basis"]:
        d: dict[Word, object] = {}
        for t in terms:
            d[tuple(index[g] for g in t["word"])] = fld.parse_coeff(t["num"], t.get("den", "1"))
        basis.append(NcPoly(fld, d))
    return GBState(
        field=fld,
        gens=gens,
        order=MonomialOrder(len(gens), obj["order"]),
        bound=obj["bound"],
        basis=basis,
        processed_degree=obj["processed_degree"],
        queue_empty=obj["queue_empty"],
        found_constant=obj["found_constant"],
        witness_degree=obj["witness_degree"],
        homogeneous=obj["homogeneous"],
        stats=obj["stats"],
    )


def resume(state: GBState, pres: Presentation, bound: int, budget: int = DEFAULT_BUDGET) -> GBState:
    """Continue a completed-to-lower-bound run at a higher bound by seeding the
    completion with the checkpointed basis (same two-sided ideal)."""
    if bound < state.bound:
        raise ValueError("resume bound must not decrease")
    if state.field != pres.field:
        raise ValueError("checkpoint and presentation fields differ")
    if state.found_constant:
        return state
    seeded = Presentation(pres.field, pres.gens, state.basis + pres.rels, pres.meta)
    return complete(seeded, bound, order=state.order, budget=budget)
