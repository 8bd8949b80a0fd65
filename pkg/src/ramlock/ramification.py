"""Ramification invariants of explicit towers.

All breaks use the shifted upper numbering ``G^(j) = G^(j-1)``, so an
unramified extension has break 0 and a tame one break 1.  Every value is
an exact ``Fraction``; valuations are normalised by ``v_N(pi_N) = 1`` on
the base field ``N`` of the computation.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import PrecisionLoss, RangeError, Reducible, TooLarge, UnsupportedPresentation
from .localfield import (
    EISENSTEIN,
    UNRAMIFIED,
    LFElement,
    LocalField,
    adjoin_root,
    newton_polygon,
    poly_coerce,
    poly_derivative,
    poly_eval,
    poly_taylor_shift,
    roots_in_field,
)

DEFAULT_PJ_BUDGET = 200_000


def _budget(default: int) -> int:
    raw = os.environ.get("RAMLOCK_BUDGET")
    return int(raw) if raw else default


def fraction_text(x: Fraction | int) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootProfile:
    """Valuations ``v_N(z_k - z_i)`` for ``k != i`` of a separable monic polynomial."""

    diffs: tuple[Fraction, ...]
    s_f: Fraction
    alpha_f: Fraction
    independent_of_i: bool
    derivative_valuation: Fraction

    @property
    def conductor(self) -> Fraction:
        return self.s_f + self.alpha_f


@dataclass(frozen=True)
class RamBound:
    p: int
    e: int
    r: int
    n: int
    value: Fraction


@dataclass(frozen=True)
class BreakDatum:
    """Greatest upper break ``u`` and different of an extension, in base units."""

    extension: str
    u: Fraction
    different: Fraction | None = None
    exact: bool = True
    profile: RootProfile | None = None
    notes: tuple[str, ...] = field(default_factory=tuple)

    def row(self, **inputs) -> dict:
        out = dict(inputs)
        out["extension"] = self.extension
        if self.profile is not None:
            out["s_f"] = fraction_text(self.profile.s_f)
            out["alpha_f"] = fraction_text(self.profile.alpha_f)
        out["u"] = fraction_text(self.u)
        out["different"] = None if self.different is None else fraction_text(self.different)
        out["exact"] = self.exact
        return out


# ---------------------------------------------------------------------------
# the bound
# ---------------------------------------------------------------------------

def bound_value(p: int, e: int, r: int, n: int) -> Fraction:
    if r < 0 or r >= p - 1:
        raise RangeError(f"r must satisfy 0 <= r < p - 1 (got r={r}, p={p})")
    if r == 0:
        return Fraction(0)
    if n < 1:
        raise RangeError("n must be at least 1")
    if r == 1:
        return 1 + e * (n + Fraction(1, p - 1))
    return 1 - Fraction(1, p ** n) + e * (n + Fraction(r, p - 1))


def bound_u(K: LocalField, r: int, n: int) -> RamBound:
    """The bound ``u(K, r, n)`` on the upper breaks of ``p^n``-torsion with weights in ``[0, r]``."""
    return RamBound(K.p, K.e, r, n, bound_value(K.p, K.e, r, n))


# ---------------------------------------------------------------------------
# root-difference profiles
# ---------------------------------------------------------------------------

def root_difference_profile(f: Sequence, N: LocalField, precision: int | None = None) -> RootProfile:
    """Profile of an irreducible separable monic ``f`` over ``N``.

    A root ``z`` is adjoined, ``f(T + z) / T`` is formed over ``O_{N(z)}``
    and its Newton polygon gives the valuations of ``z_k - z``.
    """
    coeffs = poly_coerce(N, f)
    d = len(coeffs) - 1
    if d < 1:
        raise ValueError("polynomial must have positive degree")
    if d == 1:
        return RootProfile((), Fraction(0), Fraction(0), True, Fraction(0))
    L = adjoin_root(N, coeffs, precision)
    z = L.adjoined_root
    g = poly_taylor_shift(poly_coerce(L, coeffs), z)
    if not g[0].is_zero():
        raise PrecisionLoss("adjoined root does not annihilate the polynomial")
    quotient = g[1:]
    poly = newton_polygon(quotient)
    scale = Fraction(1, L.e // N.e)
    diffs = tuple(sorted(v * scale for v in poly.root_valuations()))
    s_f = sum(diffs, Fraction(0))
    alpha_f = max(diffs)
    dz = poly_eval(poly_derivative(poly_coerce(L, coeffs)), z)
    dval = dz.valuation() * scale
    if dval != s_f:
        raise PrecisionLoss(f"derivative identity failed: {dval} != {s_f}")
    return RootProfile(diffs, s_f, alpha_f, True, dval)


def _is_eisenstein(coeffs: Sequence[LFElement]) -> bool:
    if coeffs[-1] != 1:
        return False
    if coeffs[0].is_zero() or coeffs[0].val_lower() != 1:
        return False
    return all(c.is_zero() or c.val_lower() >= 1 for c in coeffs[1:-1])


def break_from_polynomial(f: Sequence, N: LocalField, galois: bool = False) -> BreakDatum:
    """Break ``s_f + alpha_f`` of the extension cut out by ``f``.

    For an Eisenstein ``f`` the ring ``O_N[T]/(f)`` is the full ring of
    integers, so ``j > s_f + alpha_f`` is equivalent to ``G^(j)`` fixing
    the extension and the value is exact.  Otherwise only the upper bound
    is reported.
    """
    coeffs = poly_coerce(N, f)
    prof = root_difference_profile(coeffs, N)
    eis = len(coeffs) == 2 or _is_eisenstein(coeffs)
    notes = []
    if not eis:
        notes.append("upper bound only: O_N[T]/(f) not certified maximal")
    return BreakDatum("polynomial", prof.s_f + prof.alpha_f, prof.s_f, exact=eis, profile=prof,
                      notes=tuple(notes))


def _kummer_poly(K: LocalField, n: int) -> list:
    pi = K.uniformizer()
    return [-pi] + [0] * (K.p ** n - 1) + [1]


def kummer_break(K: LocalField, n: int) -> BreakDatum:
    """Break of ``K_n = K(pi^{1/p^n})`` from the profile of ``T^{p^n} - pi``."""
    d = break_from_polynomial(_kummer_poly(K, n), K)
    return BreakDatum(f"K_{n}/K", d.u, d.different, d.exact, d.profile)


def _ramification_index_of_zeta_p(K: LocalField) -> int:
    """``e(K(zeta_p)/K)``.

    ``K(zeta_p) = K((-p)^(1/(p-1)))`` is tame, so the index is the
    denominator of the root valuation of ``Phi_p(T + 1)``; adjoining a root
    confirms it when the polynomial stays irreducible.
    """
    phi = [1] * K.p
    if roots_in_field(phi, K):
        return 1
    shifted = poly_taylor_shift(poly_coerce(K, phi), K.one())
    slope = newton_polygon(shifted).slopes[0][0]
    e_prime = slope.denominator
    try:
        L = adjoin_root(K, phi)
    except (Reducible, UnsupportedPresentation):
        return e_prime
    if L.e // K.e != e_prime:  # pragma: no cover - tame Kummer theory
        raise ArithmeticError("cyclotomic ramification index disagrees with the polygon")
    return e_prime


def break_cyclotomic(K: LocalField, n: int) -> Fraction:
    """Upper bound ``1 - 1/e' + e (n + 1/(p-1))`` for ``K(zeta_{p^{n+1}})/K``."""
    e_prime = _ramification_index_of_zeta_p(K)
    return 1 - Fraction(1, e_prime) + K.e * (n + Fraction(1, K.p - 1))


def cyclotomic_profile(K: LocalField, n: int) -> RootProfile:
    """Profile of ``T^{p^n} - zeta_p`` over ``N = K(zeta_p)`` (in ``v_N`` units)."""
    from .localfield import adjoin_zeta

    N = adjoin_zeta(K, 1)
    z = N.named(f"zeta_{K.p}")
    return root_difference_profile([-z] + [0] * (K.p ** n - 1) + [1], N)


def closed_form_F_n(p: int, e: int, n: int) -> Fraction:
    return 1 + e * (n + Fraction(1, p - 1))


def break_F_n(K: LocalField, n: int) -> BreakDatum:
    """Greatest upper break of ``F_n = K_n(zeta_{p^{n+1}})`` over ``K``.

    ``G_{F_n}`` is the intersection of ``G_{K_n}`` and ``G_{K(zeta)}``, so the
    break is the larger of the Kummer break (exact) and the cyclotomic
    bound, which never exceeds it.
    """
    if K.p < 3:
        raise RangeError("break_F_n needs p >= 3")
    kum = kummer_break(K, n)
    cyc = break_cyclotomic(K, n)
    u = max(kum.u, cyc)
    closed = closed_form_F_n(K.p, K.e, n)
    notes = (f"kummer={fraction_text(kum.u)}", f"cyclotomic_bound={fraction_text(cyc)}",
             f"closed_form={fraction_text(closed)}")
    return BreakDatum(f"F_{n}/K", u, None, exact=True, profile=kum.profile, notes=notes)


def break_tate(K: LocalField, n: int) -> BreakDatum:
    """Break of ``K_n(zeta_{p^n})/K``, the Galois closure of ``K_n/K``.

    Upper ramification subgroups are normal, so ``G^(j)`` fixes ``K_n`` iff
    it fixes every conjugate, hence the closure has the Kummer break.
    """
    kum = kummer_break(K, n)
    cyc = break_cyclotomic(K, n - 1)
    if cyc > kum.u:  # pragma: no cover - excluded by the inequality above
        raise ArithmeticError("cyclotomic part exceeds the Kummer break")
    return BreakDatum(f"K_{n}(zeta_{K.p ** n})/K", kum.u, None, exact=True, profile=kum.profile,
                      notes=(f"cyclotomic_bound={fraction_text(cyc)}",))


# ---------------------------------------------------------------------------
# differents
# ---------------------------------------------------------------------------

def step_different(G: LocalField) -> Fraction:
    """Different of one tower step, in units of the step's base field."""
    if G.kind == UNRAMIFIED or G.step_degree == 1:
        return Fraction(0)
    h = G.step_polynomial()
    hp = poly_derivative([G.coerce(c) for c in h])
    val = poly_eval(hp, G.generator()).valuation()
    return Fraction(val) / G.step_degree


def different_valuation(L: LocalField, K: LocalField | None = None) -> Fraction:
    """``v_K`` of the different of ``L/K`` by transitivity over the tower steps."""
    if K is None:
        K = L.ancestors()[-1]
    if not L.is_ancestor(K):
        from .errors import NotInTower

        raise NotInTower("K is not an ancestor of L")
    total = Fraction(0)
    for G in L.ancestors():
        if G is K:
            break
        if G.kind == EISENSTEIN:
            total += step_different(G) * Fraction(K.e, G.parent.e)
    return total


def check_discriminant_bound(L: LocalField, K: LocalField, r: int, n: int) -> bool:
    """``v_K(D_{L/K}) < u(K, r, n)`` for ``r > 0``; ``v_K(D_{L/K}) = 0`` for ``r = 0``."""
    d = different_valuation(L, K)
    if r == 0:
        bound_value(K.p, K.e, r, n)
        return d == 0
    return d < bound_value(K.p, K.e, r, n)


# ---------------------------------------------------------------------------
# Fontaine's property (P_j)
# ---------------------------------------------------------------------------

def _hom_exists(f: list, F: LocalField, N: LocalField, j: Fraction, budget: int) -> bool:
    """Is there ``x`` in ``O_F`` with ``v_N(f(x)) >= j``?"""
    e_rel = F.e // N.e
    target = Fraction(j) * e_rel  # in F digits
    digits = -(-target.numerator // target.denominator)
    if digits > F.cap - 1:
        raise TooLarge("j exceeds the working precision of the test field")
    coeffs = poly_coerce(F, f)
    pi = F.uniformizer()
    reps = F.residue_reps()
    nodes = 0
    stack: list[tuple[LFElement, int, LFElement]] = [(F.zero(), 0, F.one())]
    while stack:
        x, k, power = stack.pop()
        nodes += 1
        if nodes > budget:
            raise TooLarge(f"(P_j) search exceeded the budget of {budget} nodes")
        value = poly_eval(coeffs, x.with_prec(k))
        if not value.is_zero():
            if value.val_lower() < target:
                continue
            return True
        if value.prec >= target:
            return True
        nxt = power * pi
        for r in reps:
            stack.append((x + r * power, k + 1, nxt))
    return False


def property_Pj_holds(Q_poly: Sequence, N: LocalField, F: LocalField, j, budget: int | None = None) -> bool:
    """Decide ``(P_j)`` for the extension ``O_N[T]/(f)`` against one test field ``F``.

    Returns ``False`` exactly when some ``x`` in ``O_F`` has
    ``v_N(f(x)) >= j`` while ``f`` has no root in ``F``.
    """
    budget = _budget(DEFAULT_PJ_BUDGET) if budget is None else budget
    j = Fraction(j)
    if not F.is_ancestor(N):
        from .errors import NotInTower

        raise NotInTower("test field must lie over N")
    coeffs = poly_coerce(N, Q_poly)
    if len(coeffs) == 2:
        return True
    if roots_in_field(coeffs, F):
        return True
    return not _hom_exists(coeffs, F, N, j, budget)


def property_Pj_family(Q_poly: Sequence, N: LocalField, family: Sequence[LocalField], j,
                       budget: int | None = None) -> bool:
    return all(property_Pj_holds(Q_poly, N, F, j, budget) for F in family)


def bracket_break(Q_poly: Sequence, N: LocalField, family: Sequence[LocalField],
                  grid: Sequence[Fraction], budget: int | None = None) -> tuple[Fraction | None, Fraction | None]:
    """Bisect a sorted grid for the largest failing and smallest holding ``j``.

    ``(P_j)`` is monotone in ``j``, so bisection over the grid is sound.
    """
    grid = sorted(Fraction(g) for g in grid)
    lo, hi = 0, len(grid) - 1
    if property_Pj_family(Q_poly, N, family, grid[lo], budget):
        return None, grid[lo]
    if not property_Pj_family(Q_poly, N, family, grid[hi], budget):
        return grid[hi], None
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if property_Pj_family(Q_poly, N, family, grid[mid], budget):
            hi = mid
        else:
            lo = mid
    return grid[lo], grid[hi]


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

def bound_rows(p: int, e: int, rs: Sequence[int], ns: Sequence[int]) -> list[dict]:
    rows = []
    for r in rs:
        for n in ns:
            rows.append({"p": p, "e": e, "r": r, "n": n, "u": fraction_text(bound_value(p, e, r, n))})
    return rows


__all__ = [
    "RootProfile", "RamBound", "BreakDatum", "bound_u", "bound_value",
    "root_difference_profile", "break_from_polynomial", "kummer_break", "break_cyclotomic",
    "cyclotomic_profile", "break_F_n", "break_tate", "closed_form_F_n", "step_different",
    "different_valuation", "check_discriminant_bound", "property_Pj_holds", "property_Pj_family",
    "bracket_break", "bound_rows", "fraction_text", "Reducible",
]
