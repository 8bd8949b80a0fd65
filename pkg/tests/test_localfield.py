from fractions import Fraction

import pytest

from helpers import base, lower_hull_slopes
from ramlock.errors import (
    NotEisenstein,
    NotInTower,
    PrecisionLoss,
    PrecisionTooLow,
    Reducible,
)
from ramlock.localfield import (
    INFINITY,
    Automorphism,
    LFElement,
    adjoin_root,
    adjoin_zeta,
    element_from_json,
    element_to_json,
    field_from_json,
    field_to_json,
    identity_automorphism,
    make_field,
    newton_polygon,
    newton_polygon_from_points,
    norm_to_base,
    poly_coerce,
    poly_eval,
    roots_in_field,
    tower_F_n,
    unramified_step,
    valuation,
)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def test_make_field_q3():
    K = make_field(3, 1, [-3, 1], 20)
    assert K.e == 1 and K.m == 1 and K.degree == 1
    assert valuation(K.from_int(3)) == 1


def test_make_field_ramified_quadratic():
    K = make_field(3, 1, [-3, 0, 1], 20)
    assert K.e == 2
    assert valuation(K.from_int(3)) == 2
    assert valuation(K.uniformizer()) == 1


def test_make_field_rejects_unit_constant():
    with pytest.raises(NotEisenstein):
        make_field(3, 1, [-1, 0, 1], 20)


def test_make_field_rejects_unit_middle_coefficient():
    with pytest.raises(NotEisenstein):
        make_field(3, 1, [3, 1, 1], 20)


def test_make_field_precision_too_low():
    with pytest.raises(PrecisionTooLow):
        make_field(3, 1, [-3, 1], 1)


def test_unramified_base():
    K = make_field(3, 2, [-3, 1], 6)
    assert K.m == 2 and K.e == 1
    assert len(K.residue_reps()) == 9


# ---------------------------------------------------------------------------
# valuations and arithmetic
# ---------------------------------------------------------------------------

def test_valuation_examples():
    K = base(3, 2, 10)
    pi = K.uniformizer()
    assert valuation(K.from_int(3)) == 2
    assert valuation(pi + 3) == 1
    assert valuation(K.zero()) == INFINITY


def test_valuation_zero_to_precision_raises():
    K = base(3, 1, 10)
    x = K.from_int(9).with_prec(2)
    with pytest.raises(PrecisionLoss):
        x.valuation()


def test_valuation_units_rescaling():
    K = base(3, 1, 10)
    L = adjoin_root(K, [-K.uniformizer(), 0, 0, 1])
    pi1 = L.uniformizer()
    assert pi1.valuation() == 1
    assert pi1.valuation(K) == Fraction(1, 3)


def test_division_and_inverse():
    K = base(5, 2, 10)
    pi = K.uniformizer()
    x = pi * pi + K.from_int(2)
    y = x.inverse()
    assert (x * y - K.one()).is_zero()
    z = (pi ** 3).divide(pi)
    assert (z - pi * pi).is_zero()


def test_precision_never_increases():
    K = base(3, 1, 10)
    x = K.from_int(4).with_prec(5)
    y = K.from_int(7)
    assert (x + y).prec <= 5
    assert (x * y).prec <= 5


def test_element_json_roundtrip():
    K = base(3, 2, 8)
    x = K.uniformizer() * 5 + K.from_int(2)
    y = element_from_json(K, element_to_json(x))
    assert (x - y).is_zero() and x.prec == y.prec


def test_field_json_roundtrip():
    K = make_field(5, 2, [-5, 0, 1], 7)
    doc = field_to_json(K)
    L = field_from_json(doc)
    assert (L.p, L.m, L.e, L.precision) == (5, 2, 2, 7)
    assert field_to_json(L) == doc


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def test_norm_of_uniformizer():
    K = make_field(3, 1, [-3, 0, 1], 10)
    Q = K.ancestors()[-1]
    n = norm_to_base(K.uniformizer(), Q)
    assert (n + 3).is_zero()


def test_norm_of_unit_in_quadratic_unramified():
    Q = make_field(3, 1, [-3, 1], 10)
    L = unramified_step(Q, [1, 0, 1])
    u = L.generator() + 1  # residue 1 + i
    n = norm_to_base(u, Q)
    assert n.valuation() == 0
    assert n.residue() == (2,)  # (1 + i)(1 - i) = 2


def test_norm_of_kummer_root():
    K = base(3, 1, 10)
    L = adjoin_root(K, [-K.uniformizer(), 0, 0, 1])
    n = norm_to_base(L.adjoined_root, K)
    assert (n - K.uniformizer()).is_zero()
    assert n.valuation() == 1


def test_norm_not_in_tower():
    K = base(3, 1, 10)
    other = make_field(5, 1, [-5, 1], 6)
    with pytest.raises(NotInTower):
        norm_to_base(K.one(), other)


# ---------------------------------------------------------------------------
# Newton polygons
# ---------------------------------------------------------------------------

def test_newton_polygon_eisenstein():
    K = base(3, 1, 10)
    poly = newton_polygon(poly_coerce(K, [-K.uniformizer(), 0, 0, 1]))
    assert poly.root_valuations() == [Fraction(1, 3)] * 3


def test_newton_polygon_three_points():
    K = base(3, 1, 10)
    f = poly_coerce(K, [3, -3, 1])
    assert sorted(newton_polygon(f).root_valuations()) == lower_hull_slopes([(0, 1), (1, 1), (2, 0)])
    assert newton_polygon(f).root_valuations() == [Fraction(1, 2)] * 2


def test_newton_polygon_split():
    K = base(3, 1, 10)
    f = poly_coerce(K, [3, -4, 1])  # (T - 1)(T - 3)
    assert sorted(newton_polygon(f).root_valuations()) == [0, 1]


def test_newton_polygon_zero_roots():
    poly = newton_polygon_from_points([(2, 0), (3, 0)], 3)
    assert poly.zero_roots == 2


# ---------------------------------------------------------------------------
# towers
# ---------------------------------------------------------------------------

def test_adjoin_kummer_step():
    K = base(3, 1, 10)
    L = adjoin_root(K, [-K.uniformizer(), 0, 0, 1])
    assert L.e == 3
    assert poly_eval(poly_coerce(L, [-K.uniformizer(), 0, 0, 1]), L.adjoined_root).is_zero()


def test_adjoin_cyclotomic():
    K = base(3, 1, 10)
    L = adjoin_root(K, [1, 1, 1])
    assert L.e == 2


def test_adjoin_unramified_quadratic():
    K = base(3, 1, 10)
    L = adjoin_root(K, [1, 0, 1])
    assert L.e == 1 and L.m == 2


def test_adjoin_reducible():
    K = base(3, 1, 10)
    with pytest.raises(Reducible):
        adjoin_root(K, [3, -4, 1])


def test_roots_in_field():
    K = base(5, 1, 10)
    roots = roots_in_field([1, 0, 1], K)  # -1 is a square mod 5
    assert len(roots) == 2
    for z in roots:
        assert (z * z + 1).is_zero()


def test_tower_F1_shape():
    K = base(3, 1)
    F = tower_F_n(K, 1)
    assert F.e == 18 and F.m == 1 and F.degree == 18
    assert F.has_name("pi_1") and F.has_name("zeta_9")
    assert (F.named("pi_1") ** 3 - F.coerce(K.uniformizer())).is_zero()
    z9 = F.named("zeta_9")
    assert (z9 ** 9 - 1).is_zero() and not (z9 ** 3 - 1).is_zero()


def test_adjoin_zeta_reuses_names():
    K = base(3, 1)
    L = adjoin_zeta(K, 1)
    assert adjoin_zeta(L, 1) is L


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------

def test_identity_automorphism():
    K = base(3, 1)
    L = adjoin_zeta(K, 1)
    sigma = identity_automorphism(L, K)
    z = L.named("zeta_3")
    assert (sigma(z) - z).is_zero()
    assert sigma.is_identity()


def test_conjugation_of_zeta3():
    K = base(3, 1)
    L = adjoin_zeta(K, 1)
    z = L.named("zeta_3")
    sigma = Automorphism(L, K, {"zeta_3": z * z})
    assert (sigma(z) - z * z).is_zero()
    assert sigma.compose(sigma).is_identity()
    x = z + 2
    assert (sigma(x * x) - sigma(x) * sigma(x)).is_zero()


def test_lfelement_type():
    K = base(3, 1)
    assert isinstance(K.one(), LFElement)
