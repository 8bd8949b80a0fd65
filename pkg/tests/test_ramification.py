from fractions import Fraction
from itertools import product

import pytest

from helpers import F_n, base, bound_oracle
from ramlock.errors import RangeError, TooLarge
from ramlock.localfield import (
    adjoin_root,
    adjoin_zeta,
    eisenstein_step,
    tower_tate,
    unramified_step,
)
from ramlock.ramification import (
    bound_rows,
    bound_u,
    bound_value,
    bracket_break,
    break_cyclotomic,
    break_F_n,
    break_from_polynomial,
    break_tate,
    check_discriminant_bound,
    closed_form_F_n,
    cyclotomic_profile,
    different_valuation,
    fraction_text,
    kummer_break,
    property_Pj_holds,
    root_difference_profile,
)


def kummer_poly(K, n):
    return [-K.uniformizer()] + [0] * (K.p ** n - 1) + [1]


# ---------------------------------------------------------------------------
# the bound
# ---------------------------------------------------------------------------

def test_bound_examples():
    assert bound_value(3, 1, 1, 1) == Fraction(5, 2)
    assert bound_value(7, 3, 0, 2) == 0
    assert bound_value(5, 2, 2, 1) == Fraction(19, 5)


def test_bound_range_error():
    with pytest.raises(RangeError):
        bound_value(3, 1, 2, 1)
    with pytest.raises(RangeError):
        bound_u(base(3, 1), 2, 1)


def test_bound_u_handle():
    b = bound_u(base(5, 1), 2, 1)
    assert (b.p, b.e, b.r, b.n) == (5, 1, 2, 1)
    assert b.value == bound_oracle(5, 1, 2, 1)


def test_bound_grid_against_oracle():
    for p, e, n in product((3, 5, 7), (1, 2, 3), (1, 2, 3)):
        for r in range(p - 1):
            assert bound_value(p, e, r, n) == bound_oracle(p, e, r, n)


def test_bound_monotone():
    for p, e in product((3, 5, 7), (1, 2)):
        for r in range(1, p - 1):
            vals = [bound_value(p, e, r, n) for n in (1, 2, 3, 4)]
            assert vals == sorted(set(vals))
        for n in (1, 2):
            vals = [bound_value(p, e, r, n) for r in range(1, p - 1)]
            assert vals == sorted(vals)


def test_bound_rows_and_text():
    rows = bound_rows(3, 1, [0, 1], [1])
    assert rows == [{"p": 3, "e": 1, "r": 0, "n": 1, "u": "0"},
                    {"p": 3, "e": 1, "r": 1, "n": 1, "u": "5/2"}]
    assert fraction_text(Fraction(4, 2)) == "2"


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def test_kummer_profile_p3_n1():
    K = base(3, 1)
    prof = root_difference_profile(kummer_poly(K, 1), K)
    assert prof.diffs == (Fraction(5, 6), Fraction(5, 6))
    assert prof.s_f == Fraction(5, 3) and prof.alpha_f == Fraction(5, 6)
    assert prof.derivative_valuation == prof.s_f


@pytest.mark.parametrize("p,e,n", [(3, 1, 2), (3, 2, 1), (5, 1, 1), (5, 2, 2)])
def test_kummer_profile_closed_form(p, e, n):
    K = base(p, e)
    prof = root_difference_profile(kummer_poly(K, n), K)
    assert prof.s_f == 1 - Fraction(1, p ** n) + n * e
    assert prof.alpha_f == Fraction(1, p ** n) + Fraction(e, p - 1)
    assert len(prof.diffs) == p ** n - 1


def test_profile_independent_of_root():
    # every root of T^3 - 3 lies in F_1; all pairwise differences are computed directly
    K = base(3, 1)
    F = F_n(3, 1, 1)
    z = F.named("pi_1")
    w = F.named("zeta_3") if F.has_name("zeta_3") else F.named("zeta_9") ** 3
    roots = [z, z * w, z * w * w]
    for i, zi in enumerate(roots):
        diffs = sorted((zk - zi).valuation(K) for k, zk in enumerate(roots) if k != i)
        assert diffs == [Fraction(5, 6), Fraction(5, 6)]


def test_cyclotomic_profile():
    K = base(3, 1)
    prof = cyclotomic_profile(K, 1)
    assert prof.s_f == 1 * 2  # n e(K(zeta_p))
    assert prof.alpha_f == Fraction(2, 2)


def test_tame_profile():
    K = base(3, 1)
    d = break_from_polynomial([-K.uniformizer(), 0, 1], K)
    assert d.profile.diffs == (Fraction(1, 2),)
    assert d.u == 1


def test_linear_polynomial_profile():
    K = base(3, 1)
    d = break_from_polynomial([-K.uniformizer(), 1], K)
    assert d.u == 0 and d.profile.s_f == 0


# ---------------------------------------------------------------------------
# breaks
# ---------------------------------------------------------------------------

def test_kummer_break_matches_closed_form():
    K = base(3, 1)
    d = kummer_break(K, 1)
    assert d.u == Fraction(5, 2)
    assert d.different == Fraction(5, 3)


@pytest.mark.parametrize("p,e,n", [(3, 1, 1), (3, 2, 2), (5, 2, 2), (7, 1, 1)])
def test_break_F_n(p, e, n):
    K = base(p, e)
    d = break_F_n(K, n)
    assert d.u == closed_form_F_n(p, e, n) == 1 + e * (n + Fraction(1, p - 1))
    assert d.u >= kummer_break(K, n).u
    assert d.u >= break_cyclotomic(K, n)


def test_break_F_n_example_values():
    assert break_F_n(base(3, 1), 1).u == Fraction(5, 2)
    assert break_F_n(base(5, 2), 2).u == Fraction(11, 2)


def test_break_F_n_needs_odd_p():
    with pytest.raises(RangeError):
        break_F_n(base(2, 1), 1)


def test_break_cyclotomic_values():
    assert break_cyclotomic(base(3, 1), 1) == 2
    assert break_cyclotomic(base(5, 1), 1) == 2
    L = adjoin_zeta(base(3, 1), 1)
    # over a field already containing zeta_p the index is 1
    assert break_cyclotomic(L, 1) == L.e * (1 + Fraction(1, 2))


@pytest.mark.parametrize("e,n", [(1, 1), (2, 1), (1, 2), (2, 2)])
def test_tate_attains_bound(e, n):
    K = base(3, e)
    assert break_tate(K, n).u == bound_value(3, e, 1, n)


# ---------------------------------------------------------------------------
# differents
# ---------------------------------------------------------------------------

def test_different_kummer_step():
    K = base(3, 1)
    L = adjoin_root(K, kummer_poly(K, 1))
    assert different_valuation(L, K) == Fraction(5, 3)


def test_different_unramified():
    K = base(3, 1)
    L = unramified_step(K, [1, 0, 1])
    assert different_valuation(L, K) == 0


def test_different_cyclotomic_step():
    K = base(5, 1)
    L = adjoin_zeta(K, 1)
    e_prime = L.e // K.e
    assert different_valuation(L, K) == 1 - Fraction(1, e_prime)


def test_different_transitivity_F1():
    # Galois oracle: v_K(D) = integral of (1 - 1/|G^(j)|) dj with |G^(j)| = 18, 9, 3, 1
    # on (0,1], (1,2], (2,5/2], beyond (cyclotomic jumps at 1 and 2, Kummer jump at 5/2)
    K = base(3, 1)
    F = F_n(3, 1, 1)
    oracle = (1 - Fraction(1, 18)) + (1 - Fraction(1, 9)) + (1 - Fraction(1, 3)) * Fraction(1, 2)
    assert different_valuation(F, K) == oracle == Fraction(13, 6)


def test_discriminant_bound_cases():
    K = base(3, 1)
    assert check_discriminant_bound(F_n(3, 1, 1), K, 1, 1)
    assert check_discriminant_bound(K, K, 1, 1)
    assert check_discriminant_bound(unramified_step(K, [1, 0, 1]), K, 0, 1)
    assert not check_discriminant_bound(adjoin_zeta(K, 1), K, 0, 1)


# ---------------------------------------------------------------------------
# (P_j)
# ---------------------------------------------------------------------------

def _family(K):
    return [K, adjoin_zeta(K, 1), adjoin_root(K, kummer_poly(K, 1)),
            eisenstein_step(K, [-3, -9, 0, 1]), eisenstein_step(K, [-3, 0, -9, 1])]


def test_pj_trivial_extension():
    K = base(3, 1)
    for j in (Fraction(0), Fraction(3), Fraction(7, 2)):
        assert property_Pj_holds([-K.uniformizer(), 1], K, K, j)


def test_pj_above_break():
    K = base(3, 1)
    f = kummer_poly(K, 1)
    for F in _family(K):
        assert property_Pj_holds(f, K, F, Fraction(8, 3))


def test_pj_fails_below_break():
    K = base(3, 1)
    f = kummer_poly(K, 1)
    assert not all(property_Pj_holds(f, K, F, Fraction(7, 3)) for F in _family(K))


def test_pj_bracket():
    K = base(3, 1)
    grid = [Fraction(k, 6) for k in range(25)]
    lo, hi = bracket_break(kummer_poly(K, 1), K, _family(K), grid)
    assert hi - lo == Fraction(1, 6)
    assert lo < Fraction(5, 2) <= hi


def test_pj_budget():
    K = base(3, 1)
    with pytest.raises(TooLarge):
        property_Pj_holds(kummer_poly(K, 1), K, adjoin_zeta(K, 1), Fraction(3), budget=3)


def test_tate_tower_contains_names():
    F = tower_tate(base(3, 1), 1)
    assert F.has_name("pi_1") and F.has_name("zeta_3")
