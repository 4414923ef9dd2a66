import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qsphere.haar import (
    APoly, PreconditionError, a_eigenvalue, expectation, haar, haar_A, haar_classical,
    haar_curve, haar_numeric, lambda_point, measure_mass, measure_weight, simplex_reduce, theta,
)
from qsphere.rep import TruncParams, basis_indices, build_rep, represent
from qsphere.scalarq import QRat, QScalar, limit_q1, one_minus_q2, qpow, rat_eval
from qsphere.sphere import build_A, mul, sphere, star

from conftest import random_poly

HALF = Fraction(1, 2)


def z(j, ell=1, starred=False):
    return sphere(ell).z(j, starred)


def zz(j, ell=1):
    return z(j, ell) * z(j, ell, True)


# -- independent oracles ---------------------------------------------------

def dirichlet_oracle(m):
    """q = 1 value of A^m: (|z_1|^2, .., |z_N|^2) is uniform on the simplex.

    Expands prod_j (x_1 + .. + x_j)^{m_j} and integrates each monomial
    against Dirichlet(1, .., 1): E[x^a] = l! prod a_i! / (l + |a|)!.
    """
    ell = len(m)
    poly = {(0,) * (ell + 1): 1}
    for j, e in enumerate(m, start=1):
        for _ in range(e):
            nxt = {}
            for a, c in poly.items():
                for i in range(j):
                    b = list(a)
                    b[i] += 1
                    nxt[tuple(b)] = nxt.get(tuple(b), 0) + c
            poly = nxt
    total = Fraction(0)
    for a, c in poly.items():
        total += Fraction(c * math.factorial(ell) * math.prod(math.factorial(x) for x in a),
                          math.factorial(ell + sum(a)))
    return total


def operator_trace_oracle(x, q0, d, M):
    """sum_n mu(n) <e_n, pi(x) e_n> with weights from the closed-form measure.

    Uses the truncated operators directly, bypassing simplex_reduce.  The
    cyclic factor needs 2M + 1 > deg(x) so no power of U wraps to 1.
    """
    ell = x.algebra.ell
    params = TruncParams(ell, q0, d, M)
    mat = represent(x, build_rep(params), params)
    idx = basis_indices(params)
    rows = idx[:, -1] == 0
    weights = np.ones(rows.sum())
    q2 = q0 * q0
    N = ell + 1
    for k in range(1, ell + 1):
        weights *= (1 - q2 ** k) * q2 ** ((N - k) * idx[rows, k - 1])
    return float(np.dot(weights, mat.diagonal()[rows]))


# -- expectation / theta / simplex -----------------------------------------

def test_expectation_examples():
    assert expectation(z(1)).is_zero()
    assert expectation(zz(1)) == zz(1)
    x = z(1) * zz(2) * z(1, starred=True)
    assert expectation(x) == x


def test_theta_examples():
    assert theta(z(1)) == z(1)
    assert theta(z(2)) == z(2) * qpow(2)
    assert theta(z(2, starred=True)) == z(2, starred=True) * qpow(-2)


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_theta_is_multiplicative(ell, rnd):
    for _ in range(30):
        a, b = random_poly(rnd, ell, 3, 2), random_poly(rnd, ell, 3, 2)
        assert theta(a * b) == theta(a) * theta(b)


def test_simplex_examples():
    A1 = APoly.gen(1, 1)
    assert simplex_reduce(zz(1)) == A1
    x = z(1) ** 2 * z(1, starred=True) ** 2
    assert simplex_reduce(x) == A1 * A1
    assert simplex_reduce(z(1) * zz(2) * z(1, starred=True)) == A1 - A1 * A1


def test_simplex_requires_diagonal():
    with pytest.raises(PreconditionError):
        simplex_reduce(z(1))


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_expand_back(ell):
    alg = sphere(ell)
    # every matched monomial of degree <= 12
    for n in itertools.product(range(7), repeat=ell):
        if sum(n) > 6:
            continue
        full = list(n) + [0]
        x = alg.monomial(full, full)
        assert simplex_reduce(x).to_ncpoly(alg) == x


def test_apoly_generators():
    assert APoly.gen(2, 0).is_zero()
    assert APoly.gen(2, 3) == APoly.one(2)
    assert APoly.gen(2, 1).to_ncpoly(sphere(2)) == build_A(1, 2)


# -- exact Haar values -------------------------------------------------------

def test_haar_A_examples():
    assert haar_A((0,)) == QRat(1)
    assert haar_A((1,)) == QRat(one_minus_q2(1), one_minus_q2(2))
    assert haar_A((1, 0)) == QRat(one_minus_q2(1), one_minus_q2(3))


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_haar_examples(ell):
    alg = sphere(ell)
    assert haar(alg.one()) == QRat(1)
    assert haar(zz(1, ell)) == QRat(one_minus_q2(1), one_minus_q2(ell + 1))


def test_haar_z2_worked_case():
    expected = QRat(qpow(2), QScalar({0: 1, 2: 1}))
    assert haar(zz(2)) == expected
    assert haar(z(2, starred=True) * theta(z(2))) == expected


def test_recurrence_up_to_six():
    for ell in (1, 2, 3):
        N = ell + 1
        for j in range(1, ell + 1):
            for m in itertools.product(range(7), repeat=j):
                s = sum(m)
                if s > 6:
                    continue
                mm = list(m) + [0] * (ell - j)
                bumped = list(mm)
                bumped[j - 1] += 1
                factor = QRat(one_minus_q2(j + s), one_minus_q2(N + s))
                assert haar_A(bumped) == factor * haar_A(mm)


@given(st.integers(0, 10 ** 6))
def test_haar_of_expectation(seed):
    rnd = random.Random(seed)
    x = random_poly(rnd, rnd.randint(1, 2), 4, 3)
    assert haar(expectation(x)) == haar(x)


@given(st.integers(0, 10 ** 6))
def test_modular_property(seed):
    rnd = random.Random(seed)
    ell = rnd.randint(1, 2)
    x, y = random_poly(rnd, ell, 2, 2), random_poly(rnd, ell, 2, 2)
    assert haar(mul(x, y)) == haar(mul(y, theta(x)))


@given(st.integers(0, 10 ** 6))
def test_positivity(seed):
    rnd = random.Random(seed)
    x = random_poly(rnd, rnd.randint(1, 2), 3, 3)
    if x.is_zero():
        return
    assert rat_eval(haar(mul(star(x), x)), HALF) > 0


def test_haar_is_linear(rnd):
    for _ in range(20):
        a, b = random_poly(rnd, 2, 4), random_poly(rnd, 2, 4)
        c = QScalar({1: 2, 0: -1})
        assert haar(a + b * c) == haar(a) + haar(b) * QRat(c)


# -- classical limit ---------------------------------------------------------

@pytest.mark.parametrize("m, expected", [((1,), Fraction(1, 2)), ((0, 0), Fraction(1)),
                                         ((1, 0), Fraction(1, 3))])
def test_haar_classical_examples(m, expected):
    assert haar_classical(m) == expected


def test_haar_classical_matches_dirichlet():
    for ell in (1, 2, 3):
        for m in itertools.product(range(6), repeat=ell):
            if sum(m) <= 5:
                assert haar_classical(m) == dirichlet_oracle(m)
                assert limit_q1(haar_A(m)) == haar_classical(m)


# -- measure -----------------------------------------------------------------

def test_measure_weight_examples():
    assert measure_weight((0,)) == one_minus_q2(1)
    assert measure_weight((3,)) == one_minus_q2(1) * qpow(6)
    assert measure_weight((1, 2)) == one_minus_q2(1) * one_minus_q2(2) * qpow(8)


@pytest.mark.parametrize("ell", [1, 2, 3, 4])
def test_measure_mass(ell):
    assert measure_mass(ell) == QRat(1)


def test_lambda_point_and_eigenvalues():
    assert lambda_point((0, 0), HALF) == (1, 0)
    assert lambda_point((3,), HALF) == (HALF ** 6,)
    assert lambda_point((1, 0), HALF) == (HALF ** 2, 0)
    assert a_eigenvalue(1, (1, 1)) == qpow(4)
    assert a_eigenvalue(3, (1, 1)) == QScalar.const(1)
    # A_j is the sum of the first j coordinates of the atom
    for n in itertools.product(range(3), repeat=3):
        pts = lambda_point(n, HALF)
        for j in range(1, 4):
            assert sum(pts[:j]) == a_eigenvalue(j, n)(HALF)


# -- numeric / curve ---------------------------------------------------------

def test_haar_numeric_examples():
    r = haar_numeric(zz(1), HALF, 1e-12)
    assert abs(r.value - 0.8) <= 1e-12 and r.bound <= 1e-12
    one = haar_numeric(sphere(1).one(), Fraction(3, 10))
    # the grid misses exactly the certified tail mass
    assert one.value + float(one.tail_bound) == pytest.approx(1, abs=1e-15)
    assert abs(one.value - 1) <= one.bound <= 1e-10
    assert abs(haar_numeric(zz(2), HALF).value - 0.2) <= 1e-10


@pytest.mark.parametrize("ell, d", [(1, 60), (2, 30)])
def test_operator_trace_oracle(ell, d, rnd):
    for _ in range(6):
        x = random_poly(rnd, ell, 4, 3)
        exact = float(rat_eval(haar(x), HALF))
        assert abs(operator_trace_oracle(x, 0.5, d, M=3) - exact) < 1e-12


def test_haar_curve_examples():
    assert haar_curve(zz(1), [HALF]) == [(HALF, Fraction(4, 5))]
    assert haar_curve(zz(1), [1]) == [(1, HALF)]
    grid = [Fraction(1, 3), Fraction(9, 10), 1]
    assert [v for _, v in haar_curve(sphere(2).one(), grid)] == [1, 1, 1]
