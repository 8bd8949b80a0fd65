"""Shared field builders and independent oracles for the test suite."""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

from ramlock.localfield import make_field, tower_F_n


def base(p: int, e: int = 1, precision: int = 8):
    return _base(p, e, precision)


def F_n(p: int, e: int, n: int, precision: int = 8):
    return _F_n(p, e, n, precision)


@lru_cache(maxsize=None)
def _base(p, e, precision):
    return make_field(p, 1, [-p] + [0] * (e - 1) + [1], precision)


@lru_cache(maxsize=None)
def _F_n(p, e, n, precision):
    return tower_F_n(base(p, e, precision), n)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def bound_oracle(p: int, e: int, r: int, n: int) -> Fraction:
    """Piecewise formula written out independently of the library."""
    if r == 0:
        return Fraction(0)
    if r == 1:
        return 1 + e * (n + Fraction(1, p - 1))
    return 1 - Fraction(1, p ** n) + e * (n + Fraction(r, p - 1))


def ghost_vector(p: int, xs) -> list[Fraction]:
    return [sum(Fraction(p) ** i * Fraction(xs[i]) ** (p ** (k - i)) for i in range(k + 1))
            for k in range(len(xs))]


def unghost(p: int, gs) -> list[Fraction]:
    out: list[Fraction] = []
    for k, g in enumerate(gs):
        s = Fraction(g) - sum(Fraction(p) ** i * out[i] ** (p ** (k - i)) for i in range(k))
        out.append(s / p ** k)
    return out


def witt_add_oracle(p, a, b):
    return unghost(p, [x + y for x, y in zip(ghost_vector(p, a), ghost_vector(p, b))])


def witt_mul_oracle(p, a, b):
    return unghost(p, [x * y for x, y in zip(ghost_vector(p, a), ghost_vector(p, b))])


def lower_hull_slopes(points):
    """Root valuations from the lower convex hull, by brute force over point pairs."""
    pts = sorted(points)
    out = []
    i = 0
    while i < len(pts) - 1:
        x1, y1 = pts[i]
        best = None
        for j in range(i + 1, len(pts)):
            x2, y2 = pts[j]
            s = Fraction(y2 - y1, 1) / (x2 - x1)
            if best is None or s < best[0] or (s == best[0] and j > best[1]):
                best = (s, j)
        s, j = best
        out.extend([-s] * (pts[j][0] - x1))
        i = j
    return sorted(out)


def residue_fixed_points(p: int, m: int, scale: int, power: int = 1) -> int:
    """Count ``z`` in ``F_{p^m}`` with ``z = scale * z^(p*power)``, using ``F_p[i]`` for ``m = 2``.

    Elements of ``F_{p^2}`` are pairs ``(a, b)`` for ``a + b i`` with ``i^2 = -1``
    (valid for ``p = 3``).
    """
    if m == 1:
        return sum(1 for z in range(p) if (z - scale * pow(z, p * power, p)) % p == 0)

    def mul(x, y):
        return ((x[0] * y[0] - x[1] * y[1]) % p, (x[0] * y[1] + x[1] * y[0]) % p)

    def pw(x, k):
        r = (1, 0)
        for _ in range(k):
            r = mul(r, x)
        return r

    count = 0
    for z in itertools.product(range(p), repeat=2):
        w = pw(z, p * power)
        if ((z[0] - scale * w[0]) % p, (z[1] - scale * w[1]) % p) == (0, 0):
            count += 1
    return count
