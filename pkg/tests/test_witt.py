import random
from fractions import Fraction

import pytest

from helpers import F_n, base, witt_add_oracle, witt_mul_oracle
from ramlock.errors import ContextMismatch, MissingRoots, NotDivisible, TooLarge
from ramlock.localfield import adjoin_zeta
from ramlock.witt import (
    WittContext,
    b_digits,
    delta_coefficients,
    frobenius_lift,
    from_ghost,
    ghost_components,
    ideal_divide,
    ideal_membership,
    quotient_ring_A,
    teichmuller,
    universal_polynomials,
    vector_from_json,
    vector_to_json,
    verschiebung,
    witt_add,
    witt_divide,
    witt_inverse,
    witt_mul,
    witt_sub,
)


# ---------------------------------------------------------------------------
# universal polynomials
# ---------------------------------------------------------------------------

def test_sum_p2_n2():
    ctx = WittContext(2, 2)
    S1 = ctx.polynomial("add", 1)
    a0, a1, b0, b1 = ctx.variables()
    assert S1 == a1 + b1 - a0 * b0


def test_product_p3_n2():
    ctx = WittContext(3, 2)
    P1 = ctx.polynomial("mul", 1)
    a0, a1, b0, b1 = ctx.variables()
    assert P1 == a0 ** 3 * b1 + a1 * b0 ** 3 + 3 * a1 * b1


@pytest.mark.parametrize("p,n", [(2, 3), (3, 3), (5, 2)])
def test_universal_polynomials_integral_and_cached(p, n):
    first = universal_polynomials(p, n, "add")
    assert universal_polynomials(p, n, "add") is first
    ctx = WittContext(p, n)
    assert WittContext(p, n) is ctx


@pytest.mark.parametrize("p,n", [(2, 4), (3, 3), (5, 2)])
def test_ghost_oracle_integers(p, n):
    rng = random.Random(p * 10 + n)
    ctx = WittContext(p, n)
    for _ in range(20):
        a = [rng.randint(-30, 30) for _ in range(n)]
        b = [rng.randint(-30, 30) for _ in range(n)]
        assert witt_add(ctx.vector(a), ctx.vector(b)).entries == witt_add_oracle(p, a, b)
        assert witt_mul(ctx.vector(a), ctx.vector(b)).entries == witt_mul_oracle(p, a, b)


def test_subtraction_inverts_addition():
    for p in (2, 3):
        ctx = WittContext(p, 3)
        rng = random.Random(p)
        for _ in range(10):
            a = ctx.vector([rng.randint(-9, 9) for _ in range(3)])
            b = ctx.vector([rng.randint(-9, 9) for _ in range(3)])
            assert witt_sub(witt_add(a, b), b) == a


def test_identities():
    ctx = WittContext(3, 3)
    x = ctx.vector([4, -2, 7])
    assert x + ctx.zero(0) == x
    assert x * ctx.one(0) == x


def test_ghost_roundtrip():
    ctx = WittContext(3, 3)
    x = ctx.vector([2, 5, -1])
    assert from_ghost(ctx, ghost_components(x)) == [2, 5, -1]


def test_context_mismatch():
    with pytest.raises(ContextMismatch):
        WittContext(3, 2).vector([1, 2]) + WittContext(3, 3).vector([1, 2, 3])


def test_dump_polynomials_text():
    text = WittContext(2, 2).dump_polynomials()
    assert "S1" in text and "P1" in text


def test_carry_polynomials_and_limit():
    ctx = WittContext(3, 2)
    U, Up = ctx.carry_polynomials()
    assert len(U) == 2 and len(Up) == 2
    with pytest.raises(TooLarge):
        WittContext(5, 3).carry_polynomials()


# ---------------------------------------------------------------------------
# Teichmuller, Frobenius, Verschiebung
# ---------------------------------------------------------------------------

def test_teichmuller_basics():
    ctx = WittContext(3, 3)
    assert teichmuller(1, ctx) == ctx.one(0)
    assert teichmuller(0, ctx) == ctx.zero(0)
    for a, b in [(2, 5), (-4, 7), (3, 9)]:
        assert teichmuller(a, ctx) * teichmuller(b, ctx) == teichmuller(a * b, ctx)


def test_frobenius_on_teichmuller_and_one():
    ctx = WittContext(3, 2)
    assert frobenius_lift(teichmuller(5, ctx)) == teichmuller(125, ctx)
    assert frobenius_lift(ctx.one(0)) == ctx.one(0)


def test_frobenius_mod_p_entrywise():
    ctx = WittContext(3, 3)
    x = ctx.vector([2, 4, 5])
    assert [c % 3 for c in frobenius_lift(x).entries] == [c ** 3 % 3 for c in x.entries]


def test_frobenius_carry_identity():
    p = 3
    ctx = WittContext(p, 2)
    U, Up = ctx.carry_polynomials()
    rng = random.Random(5)
    for _ in range(10):
        x = ctx.vector([rng.randint(-5, 5) for _ in range(2)])
        y = ctx.vector([rng.randint(-5, 5) for _ in range(2)])
        vals = list(x.entries) + list(y.entries)
        lhs = frobenius_lift(x + y)
        rhs = frobenius_lift(x) + frobenius_lift(y)
        corr = ctx.vector([p * u.evaluate(vals) for u in U])
        assert lhs == rhs + corr
        lhs = frobenius_lift(x * y)
        rhs = frobenius_lift(x) * frobenius_lift(y)
        corr = ctx.vector([p * u.evaluate(vals) for u in Up])
        assert lhs == rhs + corr


def test_verschiebung_ghost():
    ctx = WittContext(3, 3)
    x = ctx.vector([2, 1, 0])
    gv = ghost_components(verschiebung(x))
    gx = ghost_components(x)
    assert gv == [0, 3 * gx[0], 3 * gx[1]]


# ---------------------------------------------------------------------------
# division and ideals
# ---------------------------------------------------------------------------

def test_witt_divide_and_inverse():
    K = base(3, 1, 10)
    ctx = WittContext(3, 2)
    x = ctx.vector([K.from_int(2), K.from_int(5)])
    y = ctx.vector([K.from_int(7), K.from_int(1)])
    q = witt_divide(x * y, y)
    assert (q - x).is_zero()
    inv = witt_inverse(y)
    assert (inv * y - ctx.one(K.one())).is_zero()


def test_ideal_divide_n1_zeta3():
    K = base(3, 1, 10)
    L = adjoin_zeta(K, 1)
    ctx = WittContext(3, 1)
    z = L.named("zeta_3")
    x = ctx.teichmuller(z) - ctx.one(L.one())
    w = ctx.vector([L.from_int(3) * 5])  # valuation 1 > 1/2
    y = ideal_divide(w, x, digits=10)
    assert y.entries[0].val_lower() >= 1
    assert ((x * y).entries[0] - w.entries[0]).with_prec(10).is_zero()


def test_ideal_divide_rejects_small_valuation():
    K = base(3, 1, 10)
    L = adjoin_zeta(K, 1)
    ctx = WittContext(3, 1)
    x = ctx.teichmuller(L.named("zeta_3")) - ctx.one(L.one())
    with pytest.raises(NotDivisible):
        ideal_divide(ctx.vector([L.uniformizer()]), x, digits=10)
    assert ideal_membership(ctx.vector([L.uniformizer()]), x, 10) is False


def test_ideal_divide_exact_multiple():
    F = F_n(3, 1, 1)
    ctx = WittContext(3, 2)
    zeta = F.named("zeta_9")
    x = ctx.teichmuller(zeta) - ctx.one(F.one())
    a = F.uniformizer() * 2 + F.uniformizer() ** 3
    y = ideal_divide(x * ctx.teichmuller(a), x, digits=40)
    assert (y.entries[0] - a).with_prec(40).is_zero()
    assert y.entries[1].with_prec(40 - 1).is_zero() or y.entries[1].val_lower() >= 1


def test_b_digits():
    F = F_n(3, 1, 1)
    assert b_digits(F, 0) == 1
    assert b_digits(F, 1) == 10


def test_delta_coefficients():
    # E = u - 3, p = 3: ((u^3 - 3) - (u - 3)^3) / 3 = 3u^2 - 9u + 8
    assert delta_coefficients([-3, 1], 3) == [8, -9, 3]


def test_vector_json_roundtrip():
    F = base(3, 1, 6)
    ctx = WittContext(3, 2)
    w = ctx.vector([F.from_int(4), F.from_int(2)])
    assert (vector_from_json(vector_to_json(w), F) - w).is_zero()
    v = ctx.vector([3, 5])
    assert vector_from_json(vector_to_json(v)) == v


# ---------------------------------------------------------------------------
# the quotient ring
# ---------------------------------------------------------------------------

def test_quotient_ring_missing_roots():
    with pytest.raises(MissingRoots):
        quotient_ring_A(1, base(3, 1), 1)


def test_quotient_ring_r0_is_residue_level():
    F = F_n(3, 1, 1)
    A = quotient_ring_A(1, F, 0)
    assert A.is_zero(A.element([F.uniformizer()]))
    assert not A.is_zero(A.one())


def test_quotient_ring_kernel():
    F = F_n(3, 1, 1)
    A = quotient_ring_A(1, F, 1)
    rng = random.Random(3)
    pi = F.uniformizer()
    for _ in range(5):
        a = pi * rng.choice(F.residue_reps()) + pi ** 2
        assert A.is_zero(A.x * A.ctx.teichmuller(a))
        assert A.is_zero(A.element([pi ** A.digits]))
    assert not A.is_zero(A.x)  # x * 1 is not in x * m_F
    assert not A.is_zero(A.element([pi ** (A.digits - 1)]))


def test_structure_v_is_unit():
    F = F_n(3, 1, 1)
    A = quotient_ring_A(1, F, 1)
    s = A.structure()
    assert s["v"].entries[0].valuation() == 0
    assert ((s["gamma"] * s["v"]) - s["t"]).is_zero()
    assert s["c"].entries[0].valuation() == 0


def test_normal_form_is_canonical():
    F = F_n(3, 1, 1)
    A = quotient_ring_A(1, F, 1)
    w = A.element([F.from_int(2) + F.uniformizer() ** 5])
    shifted = w + A.x * A.ctx.teichmuller(F.uniformizer() ** 2)
    assert A.key(w) == A.key(shifted)
    assert A.equal(w, shifted)


def test_fil_membership():
    F = F_n(3, 1, 1)
    A = quotient_ring_A(1, F, 1)
    gamma = A.structure()["gamma"]
    assert A.fil_contains(gamma * A.ctx.teichmuller(F.from_int(2)))
    assert not A.fil_contains(A.one())


def test_ideal_membership_undecided_at_low_precision():
    F = F_n(3, 1, 1)
    A = quotient_ring_A(1, F, 1)
    w = A.ctx.vector([F.zero().with_prec(3)])
    assert ideal_membership(w, A.x, A.digits) is None


def test_exact_rational_entries():
    ctx = WittContext(2, 2)
    x = ctx.vector([Fraction(1, 3), Fraction(2, 5)])
    y = ctx.vector([Fraction(3), Fraction(-1, 7)])
    assert (x * y).entries == witt_mul_oracle(2, x.entries, y.entries)
