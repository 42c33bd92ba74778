"""The flat torus lab: SL2(Z) orbits on T^2, invariant subtori of T^4,
Jacobsthal gaps and rotation orbits.

Points of tori are tuples of Fractions (or quadratic Scalars) reduced mod 1.
"""

from __future__ import annotations

import math
from collections import namedtuple
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .scalar import Scalar, as_scalar, simplify

__all__ = [
    "FiniteOrbit",
    "Dense",
    "torus_orbit_classify",
    "orbit_closure_bruteforce",
    "orbit_size",
    "TorusSubspace",
    "torus_subspace_solutions",
    "horizontal_model_solutions",
    "completing_matrix",
    "varodot_apply",
    "diagonal_apply",
    "jacobsthal",
    "jacobsthal_bruteforce",
    "jacobsthal_table",
    "jacobsthal_constant",
    "covering_radius",
    "orbit_density",
    "Hit",
    "Exceptional",
    "BudgetExhausted",
    "kronecker_hit",
    "invariant_surface_count_bound",
]

FiniteOrbit = namedtuple("FiniteOrbit", "n points")


class Dense(namedtuple("Dense", "reason")):
    pass


def _mod1(x):
    x = simplify(as_scalar(x)) if isinstance(x, Scalar) else Fraction(x)
    if isinstance(x, Fraction):
        return x - math.floor(x)
    return simplify(x.frac_part())


def _is_rational(x):
    return isinstance(simplify(as_scalar(x)), Fraction)


# -- SL2(Z) orbits on T^2 ----------------------------------------------------------


def orbit_size(n):
    """|O_n| = n^2 prod_{p | n} (1 - p^-2)."""
    size = n * n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            size = size // (p * p) * (p * p - 1)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        size = size // (m * m) * (m * m - 1)
    return size


def _level_points(n):
    pts = []
    for a in range(n):
        for b in range(n):
            if math.gcd(math.gcd(a, b), n) == 1:
                pts.append((Fraction(a, n), Fraction(b, n)))
    return pts


def torus_orbit_classify(z):
    """Orbit of a point of T^2 under SL2(Z): finite ``O_n`` or dense."""
    x, y = z
    if not (_is_rational(x) and _is_rational(y)):
        return Dense("irrational coordinate")
    x, y = _mod1(Fraction(simplify(as_scalar(x)))), _mod1(Fraction(simplify(as_scalar(y))))
    n = x.denominator * y.denominator // math.gcd(x.denominator, y.denominator)
    return FiniteOrbit(n, _level_points(n))


def orbit_closure_bruteforce(z):
    """Closure of a rational point under the generators (1 1;0 1) and (0 -1;1 0)."""
    start = (_mod1(Fraction(z[0])), _mod1(Fraction(z[1])))
    seen = {start}
    stack = [start]
    while stack:
        x, y = stack.pop()
        for nxt in ((x + y, y), (-y, x)):
            nxt = (_mod1(nxt[0]), _mod1(nxt[1]))
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return sorted(seen)


# -- the T^4 action -------------------------------------------------------------


def _int_matrix(A):
    a, b, c, d = (int(e) for e in A)
    if a * d - b * c != 1:
        raise ValueError("matrix must have determinant 1")
    return a, b, c, d


def varodot_apply(A, z):
    """``A (z_h, z_v) = (a z_h + b z_v, c z_h + d z_v)`` on T^2 x T^2."""
    a, b, c, d = _int_matrix(A)
    zh, zv = z
    h = tuple(_mod1(a * zh[k] + b * zv[k]) for k in range(2))
    v = tuple(_mod1(c * zh[k] + d * zv[k]) for k in range(2))
    return h, v


def diagonal_apply(B, z):
    """The same matrix acting on both factors."""
    a, b, c, d = _int_matrix(B)

    def act(p):
        return (_mod1(a * p[0] + b * p[1]), _mod1(c * p[0] + d * p[1]))

    return act(z[0]), act(z[1])


class TorusSubspace(namedtuple("TorusSubspace", "a b n")):
    """Solutions of ``a z_h + b z_v = 0`` that solve no lower level equation.

    Stored with ``gcd(a, b) = n`` and the first nonzero coefficient positive.
    """

    __slots__ = ()

    def __new__(cls, a, b, n=None):
        a, b = int(a), int(b)
        g = math.gcd(a, b)
        if g == 0:
            raise ValueError("coefficients must not both vanish")
        if n is not None and n != g:
            if g != 1:
                raise ValueError("level must equal gcd(a, b)")
            a, b, g = a * n, b * n, n
        if a < 0 or (a == 0 and b < 0):
            a, b = -a, -b
        return super().__new__(cls, a, b, g)

    @property
    def primitive(self):
        return self.a // self.n, self.b // self.n


def completing_matrix(c, d):
    """An integer matrix of determinant 1 with second row ``(c, d)``."""
    g, x, y = _egcd(c, d)
    if g != 1:
        raise ValueError("row must be primitive")
    # x c + y d = 1, so (y, -x; c, d) has determinant y d + x c = 1
    return (y, -x, c, d)


def _egcd(a, b):
    if b == 0:
        return (abs(a), 1 if a >= 0 else -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _grid(N):
    k = np.arange(N)
    zh0, zh1, zv0, zv1 = np.meshgrid(k, k, k, k, indexing="ij")
    return zh0.ravel(), zh1.ravel(), zv0.ravel(), zv1.ravel()


def _encode(N, zh0, zh1, zv0, zv1):
    return ((zh0 * N + zh1) * N + zv0) * N + zv1


def torus_subspace_solutions(a, b, n, N):
    """Grid points of (1/N)Z^4 solving the level-``n`` equation, encoded as integers.

    A point ``(i, j, k, l)`` stands for ``z_h = (i, j)/N``, ``z_v = (k, l)/N`` and
    is encoded as ``((i N + j) N + k) N + l``.  Returns a sorted numpy array.
    """
    S = TorusSubspace(a, b, n)
    if N % S.n:
        raise ValueError("grid too coarse")
    c, d = S.primitive
    zh0, zh1, zv0, zv1 = _grid(N)
    w0 = (c * zh0 + d * zv0) % N
    w1 = (c * zh1 + d * zv1) % N
    level = _exact_level(w0, w1, N)
    keep = level == S.n
    return np.sort(_encode(N, zh0[keep], zh1[keep], zv0[keep], zv1[keep]))


def _exact_level(w0, w1, N):
    # order of (w0, w1)/N in T^2
    g = np.gcd(np.gcd(w0, w1), N)
    return N // g


def horizontal_model_solutions(a, b, n, N):
    """The same set built the other way: pull back ``T^2 x O_n`` by a matrix
    making the subspace horizontal."""
    S = TorusSubspace(a, b, n)
    if N % S.n:
        raise ValueError("grid too coarse")
    c, d = S.primitive
    A = completing_matrix(c, d)
    ai, bi, ci, di = A[3], -A[1], -A[2], A[0]  # inverse matrix
    k = np.arange(N)
    step = N // S.n
    cross = [(p * step, q * step) for p in range(S.n) for q in range(S.n)
             if math.gcd(math.gcd(p, q), S.n) == 1]
    u0, u1 = np.meshgrid(k, k, indexing="ij")
    u0, u1 = u0.ravel(), u1.ravel()
    parts = []
    for w0, w1 in cross:
        zh0 = (ai * u0 + bi * w0) % N
        zh1 = (ai * u1 + bi * w1) % N
        zv0 = (ci * u0 + di * w0) % N
        zv1 = (ci * u1 + di * w1) % N
        parts.append(_encode(N, zh0, zh1, zv0, zv1))
    return np.unique(np.concatenate(parts))


# -- Jacobsthal ------------------------------------------------------------------


def jacobsthal_bruteforce(n):
    """Largest gap between consecutive integers coprime to ``n`` (scan of two periods)."""
    if n < 1:
        raise ValueError("n must be positive")
    prev = None
    gap = 0
    for k in range(1, 2 * n + 2):
        if math.gcd(k, n) == 1:
            if prev is not None:
                gap = max(gap, k - prev)
            prev = k
    return gap


def _prime_factors(n):
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _coverable(primes, m):
    """Can one residue class per prime cover the integers 0..m-1?"""
    covered = [False] * m

    def solve(used):
        try:
            j = covered.index(False)
        except ValueError:
            return True
        for k, p in enumerate(primes):
            if used >> k & 1:
                continue
            marked = [i for i in range(j, m, p) if not covered[i]]
            for i in marked:
                covered[i] = True
            if solve(used | (1 << k)):
                for i in marked:
                    covered[i] = False
                return True
            for i in marked:
                covered[i] = False
        return False

    return solve(0)


@lru_cache(maxsize=None)
def _jacobsthal_primes(primes):
    # J - 1 is the longest run of integers each sharing a prime with n; by the
    # Chinese remainder theorem the residues of the run start are independent
    m = 0
    while _coverable(primes, m + 1):
        m += 1
    return m + 1


def jacobsthal(n):
    """J(n), computed from the prime divisors of ``n`` by an exact covering search."""
    if n < 1:
        raise ValueError("n must be positive")
    return _jacobsthal_of(_prime_factors(n))


def _jacobsthal_of(primes):
    # a prime at least as large as the run meets it at most once, so only the
    # number of such primes matters; fall back to the literal primes otherwise
    small = tuple(p for p in primes if p < 64)
    large = len(primes) - len(small)
    j = _jacobsthal_primes(small + (10**9,) * large)
    if large and j > 64:
        j = _jacobsthal_primes(tuple(primes))
    return j


def jacobsthal_table(limit):
    """``J(n)`` for ``1 <= n <= limit`` as a numpy array (index 0 unused)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if spf[p] == 0:
            spf[p::p][spf[p::p] == 0] = p
    out = np.zeros(limit + 1, dtype=np.int64)
    for n in range(1, limit + 1):
        primes = []
        m = n
        while m > 1:
            p = int(spf[m])
            primes.append(p)
            while m % p == 0:
                m //= p
        out[n] = _jacobsthal_of(primes)
    return out


def jacobsthal_constant(limit):
    """Smallest ``K`` with ``J(n) <= K (ln n)^2`` for ``2 <= n <= limit``.

    Returns ``(K, n_at_max, table)``.
    """
    table = jacobsthal_table(limit)
    n = np.arange(2, limit + 1)
    ratios = table[2:] / np.log(n) ** 2
    k = int(np.argmax(ratios))
    return float(ratios[k]), int(n[k]), table


# -- covering radius of O_n ------------------------------------------------


def covering_radius(n):
    """Exact covering radius of O_n in the sup metric on T^2.

    The distance to a finite subset of (1/n)Z^2 is piecewise linear with
    corners on (1/2n)Z^2, so the radius is the least ``k/(2n)`` for which
    squares of that half-side around the orbit cover the finer grid.
    """
    m = 2 * n
    occ = np.zeros((m, m), dtype=bool)
    for a in range(n):
        for b in range(n):
            if math.gcd(math.gcd(a, b), n) == 1:
                occ[2 * a, 2 * b] = True
    grown = occ.copy()
    k = 0
    while not grown.all():
        k += 1
        step = grown.copy()
        for axis in (0, 1):
            step = step | np.roll(step, 1, axis=axis) | np.roll(step, -1, axis=axis)
        grown = step
    return Fraction(k, m)


def orbit_density(n, eps):
    """``(covering radius, whether O_n is eps-dense)``."""
    r = covering_radius(n)
    return r, r < Fraction(eps)


# -- rotations of T^2 --------------------------------------------------------------


class Hit(namedtuple("Hit", "n")):
    pass


class Exceptional(namedtuple("Exceptional", "delta reason")):
    pass


class BudgetExhausted(RuntimeError):
    pass


def _circ_dist_lt(x, eps):
    f = _mod1(x)
    return f < eps or 1 - f < eps


def _rational_relation(phi, theta):
    """Integers (A, B, C), gcd 1, with A phi + B theta = C, or None if independent."""
    phi, theta = as_scalar(phi), as_scalar(theta)
    b1, b2 = phi.b if phi.b else Fraction(0), theta.b if theta.b else Fraction(0)
    if b1 == 0 and b2 == 0:
        return None  # both rational: every pair is a relation
    A, B = Fraction(b2), Fraction(-b1)
    C = simplify(A * phi + B * theta)
    den = math.lcm(A.denominator, B.denominator, Fraction(C).denominator)
    A, B, C = int(A * den), int(B * den), int(Fraction(C) * den)
    g = math.gcd(math.gcd(A, B), C)
    return A // g, B // g, C // g


def kronecker_hit(phi, theta, c, d, e, eps, budget=100_000):
    """Least ``n >= 1`` with ``(c + n phi, d + n theta)`` in the open box of
    half-side ``eps`` around ``(c, e)``, or the reason why none exists.
    """
    eps = Fraction(eps)
    values = [simplify(as_scalar(v)) for v in (phi, theta, c, d, e)]
    phi, theta, c, d, e = values
    if all(isinstance(v, Fraction) for v in (phi, theta)):
        period = math.lcm(Fraction(phi).denominator, Fraction(theta).denominator)
        for n in range(1, period + 1):
            if _circ_dist_lt(n * phi, eps) and _circ_dist_lt(d + n * theta - e, eps):
                return Hit(n)
        return Exceptional(1, f"finite orbit of period {period} misses the box")
    A, B, C = _rational_relation(phi, theta)
    D = math.gcd(A, B)
    Ap, Bp = A // D, B // D
    if Ap < 0 or (Ap == 0 and Bp < 0):
        # the loop test below is symmetric under negating the form
        Ap, Bp = -Ap, -Bp
    # the orbit closure of (c, d) is the union of the loops
    # A'(x - c) + B'(y - d) = k/D; the box meets it iff the values of that
    # form over the box reach (1/D)Z
    centre = simplify(as_scalar(Bp * (e - d)))
    half = eps * (abs(Ap) + abs(Bp))
    lo = simplify(as_scalar(D * (centre - half)))
    hi = simplify(as_scalar(D * (centre + half)))
    j = math.floor(lo) + 1
    if not j < hi:
        sign = "+" if Bp >= 0 else "-"
        return Exceptional(2, f"orbit closure {Ap}x{sign}{abs(Bp)}y=k/{D} misses the box")
    for n in range(1, budget + 1):
        if _circ_dist_lt(n * phi, eps) and _circ_dist_lt(d + n * theta - e, eps):
            return Hit(n)
    raise BudgetExhausted("search budget exhausted in a dense case")


def invariant_surface_count_bound(orders):
    """Upper bound on the number of slope +-1 invariant surfaces from the
    cone orders of the periodic points: ``sum o_p o_q / sum o_p = sum o_p``."""
    total = sum(orders)
    pairs = sum(a * b for a in orders for b in orders)
    return {"bound": Fraction(pairs, total), "total_order": total}
