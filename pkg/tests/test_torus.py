import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from veechlab.scalar import Scalar
from veechlab.torus import (
    BudgetExhausted,
    Dense,
    Exceptional,
    FiniteOrbit,
    Hit,
    TorusSubspace,
    covering_radius,
    diagonal_apply,
    horizontal_model_solutions,
    invariant_surface_count_bound,
    jacobsthal,
    jacobsthal_bruteforce,
    jacobsthal_table,
    kronecker_hit,
    orbit_closure_bruteforce,
    orbit_density,
    orbit_size,
    torus_orbit_classify,
    torus_subspace_solutions,
    varodot_apply,
)

F = Fraction
SQRT2 = Scalar(0, 1, 2)


def test_orbit_of_origin():
    assert torus_orbit_classify((0, 0)) == FiniteOrbit(1, [(0, 0)])


def test_orbit_of_half():
    res = torus_orbit_classify((F(1, 2), 0))
    assert res.n == 2
    assert sorted(res.points) == [(0, F(1, 2)), (F(1, 2), 0), (F(1, 2), F(1, 2))]


def test_irrational_point_is_dense():
    assert isinstance(torus_orbit_classify((SQRT2 - 1, 0)), Dense)


def _orbit_size_formula(n):
    out = n * n
    for p in range(2, n + 1):
        if n % p == 0 and all(p % r for r in range(2, p)):
            out = out * (p * p - 1) // (p * p)
    return out


@pytest.mark.parametrize("n", range(1, 51))
def test_orbit_size_formula(n):
    assert orbit_size(n) == _orbit_size_formula(n)
    if n <= 16:
        assert len(orbit_closure_bruteforce((F(1, n), 0))) == _orbit_size_formula(n)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(0, 11), st.integers(0, 11))
def test_classification_matches_bruteforce(n, a, b):
    z = (F(a % n, n), F(b % n, n))
    res = torus_orbit_classify(z)
    assert sorted(res.points) == sorted(orbit_closure_bruteforce(z))


def test_subspace_examples():
    assert len(torus_subspace_solutions(0, 1, 1, 4)) == 16
    assert len(torus_subspace_solutions(2, 2, 2, 4)) == 16 * 3
    level_one = set(torus_subspace_solutions(1, 1, 1, 4).tolist())
    level_two = set(torus_subspace_solutions(2, 2, 2, 4).tolist())
    assert not level_one & level_two


def test_antidiagonal_characterizations_agree():
    a = torus_subspace_solutions(1, 1, 1, 6)
    b = horizontal_model_solutions(1, 1, 1, 6)
    assert np.array_equal(a, b)


def test_grid_too_coarse():
    with pytest.raises(ValueError, match="grid too coarse"):
        torus_subspace_solutions(3, 3, 3, 4)


def test_subspace_normalization():
    assert TorusSubspace(-2, -4) == TorusSubspace(2, 4)
    assert TorusSubspace(1, 2, 3) == (3, 6, 3)
    assert TorusSubspace(6, 9).primitive == (2, 3)


def test_varodot_examples():
    z = ((F(1, 3), 0), (0, 0))
    assert varodot_apply((1, 0, 0, 1), z) == z
    assert varodot_apply((0, -1, 1, 0), z) == ((0, 0), (F(1, 3), 0))


sl2 = st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)).filter(
    lambda t: t[0] != 0 and (1 + t[1] * t[2]) % t[0] == 0
).map(lambda t: (t[0], t[1], t[2], (1 + t[1] * t[2]) // t[0]))
points = st.tuples(*[st.fractions(0, 1, max_denominator=30).filter(lambda x: x < 1)] * 4).map(
    lambda t: ((t[0], t[1]), (t[2], t[3]))
)


@settings(max_examples=200, deadline=None)
@given(sl2, sl2, points)
def test_varodot_commutes_with_diagonal(A, B, z):
    assert varodot_apply(A, diagonal_apply(B, z)) == diagonal_apply(B, varodot_apply(A, z))


@settings(max_examples=100, deadline=None)
@given(sl2, sl2, points)
def test_varodot_is_an_action(A, B, z):
    a, b, c, d = A
    e, f, g, h = B
    AB = (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    assert varodot_apply(A, varodot_apply(B, z)) == varodot_apply(AB, z)


def test_jacobsthal_values():
    assert [jacobsthal(n) for n in (1, 2, 6, 30, 210)] == [1, 2, 4, 6, 10]


def test_jacobsthal_table_matches_bruteforce():
    table = jacobsthal_table(1500)
    assert all(table[n] == jacobsthal_bruteforce(n) for n in range(1, 1501))


def _radical(n):
    r, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            r *= p
            while n % p == 0:
                n //= p
        p += 1
    return r * (n if n > 1 else 1)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5000))
def test_jacobsthal_depends_on_radical(n):
    assert jacobsthal(n) == jacobsthal(_radical(n)) == jacobsthal_bruteforce(_radical(n))


def test_large_primorial_jacobsthal():
    # frozen values of the primorial Jacobsthal function
    assert jacobsthal(2 * 3 * 5 * 7 * 11) == 14
    assert jacobsthal(2 * 3 * 5 * 7 * 11 * 13) == 22


def _covering_radius_bruteforce(n):
    orbit = [(a, b) for a in range(n) for b in range(n) if math.gcd(math.gcd(a, b), n) == 1]
    m = 2 * n
    worst = Fraction(0)
    for i in range(m):
        for j in range(m):
            best = None
            for a, b in orbit:
                dx = abs(Fraction(i, m) - Fraction(a, n)) % 1
                dy = abs(Fraction(j, m) - Fraction(b, n)) % 1
                d = max(min(dx, 1 - dx), min(dy, 1 - dy))
                best = d if best is None or d < best else best
            worst = max(worst, best)
    return worst


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6, 8, 9, 12])
def test_covering_radius_bruteforce(n):
    assert covering_radius(n) == _covering_radius_bruteforce(n)


def test_orbit_density():
    assert covering_radius(1) == F(1, 2)
    r, dense = orbit_density(101, F(1, 10))
    assert r == F(1, 101) and dense
    primes = [5, 7, 11, 13, 17, 19, 23]
    radii = [covering_radius(p) for p in primes]
    assert radii == sorted(radii, reverse=True)


def _first_hit_float(phi, theta, c, d, e, eps, limit):
    for n in range(1, limit + 1):
        x = (n * phi) % 1
        y = (d + n * theta - e) % 1
        if min(x, 1 - x) < eps and min(y, 1 - y) < eps:
            return n
    return None


def test_kronecker_identity_rotation():
    assert kronecker_hit(0, 0, 0, 0, 0, F(1, 3)) == Hit(1)


def test_kronecker_rational_case():
    res = kronecker_hit(F(1, 3), F(2, 5), 0, 0, 0, F(1, 4))
    assert res == Hit(_first_hit_float(1 / 3, 2 / 5, 0, 0, 0, 0.25, 15))


def test_kronecker_rational_miss():
    res = kronecker_hit(F(1, 2), F(1, 2), 0, 0, F(1, 4), F(1, 8))
    assert isinstance(res, Exceptional) and res.delta == 1


def test_kronecker_loop_case():
    phi = SQRT2 - 1
    theta = 1 - phi
    res = kronecker_hit(phi, theta, 0, 0, 0, F(1, 10))
    assert isinstance(res, Hit)
    assert res.n == _first_hit_float(float(phi), float(theta), 0, 0, 0, 0.1, 1000)
    miss = kronecker_hit(phi, theta, 0, 0, F(1, 2), F(1, 10))
    assert isinstance(miss, Exceptional) and miss.delta == 2
    assert _first_hit_float(float(phi), float(theta), 0, 0, 0.5, 0.1, 20000) is None


def test_kronecker_budget():
    with pytest.raises(BudgetExhausted):
        kronecker_hit(SQRT2 - 1, 1 - (SQRT2 - 1), 0, 0, 0, F(1, 10**6), budget=10)


def test_invariant_surface_count_bound():
    res = invariant_surface_count_bound([1, 1, 1, 1, 1, 3])
    assert res == {"bound": 8, "total_order": 8}
