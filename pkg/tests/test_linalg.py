"""Linear algebra checked against sympy and numpy as independent oracles."""

import random

import numpy as np
import pytest
import sympy

from qsequiv.fields import PrimeField, QQ
from qsequiv.linalg import (
    DimensionMismatchError,
    Matrix,
    SingularMatrixError,
    Subspace,
    apply_kron,
)


def rand_matrix(rng, rows, cols, lo=-5, hi=5):
    return Matrix.from_ints(QQ, [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)])


def to_sympy(M):
    return sympy.Matrix([[sympy.Rational(str(x)) for x in row] for row in M.data])


def test_rref_rank_against_sympy():
    rng = random.Random(11)
    for _ in range(30):
        M = rand_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
        red, pivots = M.rref()
        s_red, s_pivots = to_sympy(M).rref()
        assert list(s_pivots) == pivots
        assert to_sympy(red)[: len(pivots), :] == s_red[: len(pivots), :]
        assert M.rank() == to_sympy(M).rank()


def test_inverse_against_sympy():
    rng = random.Random(12)
    found = 0
    while found < 15:
        M = rand_matrix(rng, 3, 3)
        try:
            inv = M.invert()
        except SingularMatrixError:
            assert to_sympy(M).det() == 0
            continue
        found += 1
        assert to_sympy(inv) == to_sympy(M).inv()
        assert M @ inv == Matrix.identity(QQ, 3)


def test_nullspace_property():
    rng = random.Random(13)
    for _ in range(20):
        M = rand_matrix(rng, rng.randint(1, 4), rng.randint(1, 5))
        ns = M.nullspace()
        assert len(ns) == M.cols - M.rank()
        for v in ns:
            assert all(not x for x in M.mul_vec(v))


def test_kron_against_numpy():
    rng = random.Random(14)
    for _ in range(10):
        A = rand_matrix(rng, 2, 2)
        B = rand_matrix(rng, 3, 2)
        K = A.kron(B)
        an = np.array([[int(x) for x in r] for r in A.data])
        bn = np.array([[int(x) for x in r] for r in B.data])
        kn = np.kron(an, bn)
        assert [[int(x) for x in r] for r in K.data] == kn.tolist()


def test_apply_kron_matches_materialized_power():
    rng = random.Random(15)
    M = rand_matrix(rng, 3, 3)
    K = M.kron_power(3)
    v = [QQ.of(rng.randint(-3, 3)) for _ in range(27)]
    assert apply_kron(M, 3, list(v)) == K.mul_vec(v)


def test_apply_kron_shape_errors():
    M = Matrix.from_ints(QQ, [[1, 0], [0, 1]])
    with pytest.raises(DimensionMismatchError):
        apply_kron(M, 2, [QQ.one()] * 5)


def test_subspace_dimension_formula():
    # dim U + dim W = dim(U cap W) + dim(U + W)
    rng = random.Random(16)
    for _ in range(15):
        amb = 6
        U = Subspace.from_vectors(QQ, amb, [[QQ.of(rng.randint(-2, 2)) for _ in range(amb)] for _ in range(3)])
        W = Subspace.from_vectors(QQ, amb, [[QQ.of(rng.randint(-2, 2)) for _ in range(amb)] for _ in range(3)])
        inter = U.intersect(W)
        assert U.dim + W.dim == inter.dim + U.sum(W).dim
        assert U.contains_subspace(inter) and W.contains_subspace(inter)


def test_subspace_coords_of():
    U = Subspace.from_vectors(QQ, 4, [[QQ.of(x) for x in row] for row in [[1, 0, 1, 0], [0, 1, 0, 2]]])
    v = [QQ.of(x) for x in [3, -1, 3, -2]]
    coords = U.coords_of(v)
    assert coords is not None
    rebuilt = [QQ.zero()] * 4
    for c, row in zip(coords, U.basis.data):
        rebuilt = [a + c * b for a, b in zip(rebuilt, row)]
    assert rebuilt == v
    assert U.coords_of([QQ.of(x) for x in [1, 0, 0, 0]]) is None


def test_prime_field_matrices():
    fp = PrimeField(7)
    M = Matrix.from_ints(fp, [[2, 1], [3, 4]])
    inv = M.invert()
    assert M @ inv == Matrix.identity(fp, 2)
    assert M.rank() == 2
