"""Property-based checks of the algebraic invariants."""

from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from helpers import F_n, base, bound_oracle, witt_add_oracle, witt_mul_oracle
from ramlock.localfield import (
    INFINITY,
    adjoin_root,
    newton_polygon,
    norm_to_base,
    poly_coerce,
    poly_mul,
)
from ramlock.ramification import bound_value
from ramlock.witt import WittContext, b_digits, frobenius_lift, ideal_divide, teichmuller

SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

small_ints = st.integers(min_value=-200, max_value=200)


def element(K, coeffs):
    pi = K.uniformizer()
    acc = K.zero()
    power = K.one()
    for c in coeffs:
        acc = acc + power * c
        power = power * pi
    return acc


coeff_lists = st.lists(small_ints, min_size=1, max_size=4)


# ---------------------------------------------------------------------------
# valuations
# ---------------------------------------------------------------------------

@SETTINGS
@given(coeff_lists, coeff_lists)
def test_ultrametric_and_multiplicative(a, b):
    K = base(3, 2, 12)
    x, y = element(K, a), element(K, b)
    vx, vy = x.valuation(), y.valuation()
    vxy = (x * y).valuation()
    if INFINITY in (vx, vy):
        assert vxy == INFINITY
        return
    assert vxy == vx + vy
    s = x + y
    if not s.is_zero():
        assert s.valuation() >= min(vx, vy)
        if vx != vy:
            assert s.valuation() == min(vx, vy)


@SETTINGS
@given(coeff_lists, coeff_lists)
def test_norm_multiplicative(a, b):
    K = base(3, 1, 10)
    L = _kummer_field()
    pi1 = L.uniformizer()
    x = element(K, a) * pi1 + element(K, b)
    y = pi1 * pi1 + 1
    nx, ny = norm_to_base(x, K), norm_to_base(y, K)
    assert (norm_to_base(x * y, K) - nx * ny).is_zero()
    if not x.is_zero():
        assert nx.valuation() == x.valuation(K) * 3


_KUMMER = {}


def _kummer_field():
    if "L" not in _KUMMER:
        K = base(3, 1, 10)
        _KUMMER["L"] = adjoin_root(K, [-K.uniformizer(), 0, 0, 1])
    return _KUMMER["L"]


@SETTINGS
@given(st.lists(st.integers(-30, 30), min_size=2, max_size=4),
       st.lists(st.integers(-30, 30), min_size=2, max_size=4))
def test_newton_slopes_of_product(f, g):
    K = base(5, 1, 12)
    f = [c if i else (c or 5) for i, c in enumerate(f)]
    g = [c if i else (c or 25) for i, c in enumerate(g)]
    f[-1] = g[-1] = 1
    F, G = poly_coerce(K, f), poly_coerce(K, g)
    lhs = sorted(newton_polygon(poly_mul(F, G)).root_valuations())
    rhs = sorted(newton_polygon(F).root_valuations() + newton_polygon(G).root_valuations())
    assert lhs == rhs


# ---------------------------------------------------------------------------
# Witt vectors
# ---------------------------------------------------------------------------

@SETTINGS
@given(st.sampled_from([2, 3, 5]), st.integers(1, 4), st.data())
def test_witt_ghost_oracle(p, n, data):
    if p == 5 and n == 4:
        n = 3
    ctx = WittContext(p, n)
    a = data.draw(st.lists(st.integers(-50, 50), min_size=n, max_size=n))
    b = data.draw(st.lists(st.integers(-50, 50), min_size=n, max_size=n))
    assert (ctx.vector(a) + ctx.vector(b)).entries == witt_add_oracle(p, a, b)
    assert (ctx.vector(a) * ctx.vector(b)).entries == witt_mul_oracle(p, a, b)


@SETTINGS
@given(st.sampled_from([2, 3, 5]), small_ints, small_ints)
def test_teichmuller_multiplicative(p, a, b):
    ctx = WittContext(p, 3 if p < 5 else 2)
    assert teichmuller(a, ctx) * teichmuller(b, ctx) == teichmuller(a * b, ctx)
    assert frobenius_lift(teichmuller(a, ctx)) == teichmuller(a ** p, ctx)


@SETTINGS
@given(st.sampled_from([2, 3]), st.lists(small_ints, min_size=3, max_size=3))
def test_frobenius_mod_p(p, xs):
    ctx = WittContext(p, 3)
    phi = frobenius_lift(ctx.vector(xs)).entries
    assert [c % p for c in phi] == [pow(x, p, p) for x in xs]


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 2), st.integers(0, 1), st.lists(st.integers(0, 2), min_size=24, max_size=24))
def test_b_F_inside_ideal(n, r, digits):
    F = F_n(3, 1, 1)
    ctx = WittContext(3, n)
    x = (ctx.teichmuller(F.named(f"zeta_{3 ** n}")) - ctx.one(F.one())) ** r
    B = b_digits(F, r)
    pi = F.uniformizer()
    entries = []
    for k in range(n):
        acc = F.zero()
        power = pi ** B
        for d in digits[k * 12:(k + 1) * 12]:
            acc = acc + power * d
            power = power * pi
        entries.append(acc)
    y = ideal_divide(ctx.vector(entries), x, digits=30)
    assert all(c.is_zero() or c.val_lower() >= 1 for c in y.entries)


# ---------------------------------------------------------------------------
# the bound
# ---------------------------------------------------------------------------

@SETTINGS
@given(st.sampled_from([3, 5, 7, 11]), st.integers(1, 6), st.integers(1, 5), st.data())
def test_bound_formula(p, e, n, data):
    r = data.draw(st.integers(0, p - 2))
    u = bound_value(p, e, r, n)
    assert u == bound_oracle(p, e, r, n)
    if r >= 1:
        assert bound_value(p, e, r, n + 1) > u
        if r + 1 <= p - 2:
            assert bound_value(p, e, r + 1, n) >= u
    assert isinstance(u, Fraction)
