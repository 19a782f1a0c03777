"""Sparse tensor operations and the lexicographic coordinate convention."""

import random

import pytest

from qsequiv.fields import QQ, PrimeField
from qsequiv.linalg import Matrix, Subspace
from qsequiv.tensor import (
    IndexOutOfRangeError,
    Tensor,
    code_multiindex,
    derivative_space,
    embed_padded,
    multiindex_code,
)


def rand_tensor(rng, arity, dim, density=0.5):
    coeffs = {}
    import itertools

    for idx in itertools.product(range(1, dim + 1), repeat=arity):
        if rng.random() < density:
            coeffs[idx] = QQ.of(rng.randint(-4, 4))
    return Tensor(QQ, arity, dim, coeffs)


def test_multiindex_codes_round_trip():
    for dim in (2, 3):
        for arity in (1, 2, 3):
            seen = set()
            import itertools

            for idx in itertools.product(range(1, dim + 1), repeat=arity):
                code = multiindex_code(idx, dim)
                assert code_multiindex(code, dim, arity) == idx
                seen.add(code)
            assert seen == set(range(dim**arity))


def test_validation():
    with pytest.raises(IndexOutOfRangeError):
        Tensor(QQ, 2, 2, {(1, 3): QQ.one()})
    with pytest.raises(IndexOutOfRangeError):
        Tensor(QQ, 2, 2, {(1,): QQ.one()})
    t = Tensor(QQ, 2, 2, {(1, 1): QQ.zero()})
    assert t.is_zero()


def test_cyclic_shift_order():
    rng = random.Random(21)
    t = rand_tensor(rng, 3, 2)
    s = t
    for _ in range(3):
        s = s.cyclic_shift()
    assert s == t
    u = Tensor.basis_vector(QQ, 3, 2, (1, 2, 2))
    assert u.cyclic_shift() == Tensor.basis_vector(QQ, 3, 2, (2, 1, 2))


def test_apply_on_factor_matches_vector_action():
    # acting on slot k then flattening equals multiplying coordinates by a
    # Kronecker factor; check against explicit recomputation
    rng = random.Random(22)
    t = rand_tensor(rng, 2, 3)
    M = Matrix.from_ints(QQ, [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)])
    left = t.apply_on_factor(M, 1).flatten_first()
    assert left == M @ t.flatten_first()


def test_apply_all_factors_composes():
    rng = random.Random(23)
    t = rand_tensor(rng, 2, 2)
    M = Matrix.from_ints(QQ, [[1, 2], [0, 1]])
    N = Matrix.from_ints(QQ, [[1, 0], [3, 1]])
    assert t.apply_all_factors(M @ N) == t.apply_all_factors(N).apply_all_factors(M)


def test_contract_first():
    t = Tensor(QQ, 3, 2, {(1, 2, 1): QQ.of(5), (2, 1, 1): QQ.of(7)})
    c = t.contract_first(1)
    assert c.arity == 2 and c.coeffs == {(2, 1): QQ.of(5)}


def test_vector_round_trip_and_span():
    rng = random.Random(24)
    t = rand_tensor(rng, 3, 2)
    assert Tensor.from_vector(QQ, 3, 2, t.to_vector()) == t
    assert t.span().dim == (0 if t.is_zero() else 1)


def test_json_round_trip():
    t = Tensor(QQ, 2, 3, {(1, 3): QQ.of(-2, 3), (2, 1): QQ.of(4)})
    assert Tensor.from_json(t.to_json()) == t
    fp = PrimeField(7)
    u = Tensor(fp, 2, 2, {(1, 2): fp.of(3)})
    assert Tensor.from_json(u.to_json()) == u


def test_derivative_space_slices():
    # derivatives of a rank-one subspace recover first-slot contractions
    t = Tensor(QQ, 3, 2, {(1, 1, 2): QQ.one(), (2, 2, 1): QQ.of(3)})
    D = derivative_space(t.span(), 2, 3)
    assert D.dim == 2
    for i in (1, 2):
        v = t.contract_first(i).to_vector()
        assert D.coords_of(v) is not None


def test_embed_padded_dimensions():
    t = Tensor(QQ, 2, 2, {(1, 2): QQ.one()})
    W = t.span()
    P = embed_padded(W, 2, 2, 1, 1)
    assert P.ambient_dim == 2**4
    assert P.dim == 4  # 2 left choices x 2 right choices, independent
    # each embedded vector is basis_vector (x) t (x) basis_vector
    probe = Tensor(QQ, 4, 2, {(2, 1, 2, 1): QQ.one()})
    assert P.coords_of(probe.to_vector()) is not None
    miss = Tensor(QQ, 4, 2, {(2, 1, 1, 1): QQ.one()})
    assert P.coords_of(miss.to_vector()) is None
