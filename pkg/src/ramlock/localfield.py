"""Exact arithmetic in finite extensions of Q_p.

A field is a tower of simple steps over Q_p.  Each step is either
unramified (generated by a unit whose residue polynomial is irreducible)
or Eisenstein (generated by a uniformiser).  Elements of the ring of
integers are stored as flat integer vectors over the nested monomial
basis, with integer coefficients reduced modulo ``p**M``.  Because every
step is monogenic over the previous ring of integers, this basis is a
``Z_p``-basis of ``O_F`` and ``O_F / p^M`` is represented exactly.

Valuations are normalised so that the uniformiser of the field has
valuation 1, hence ``v(p) = e``.  Every element carries an absolute
precision ``prec`` in uniformiser digits: it is known modulo
``pi_F ** prec``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    NotEisenstein,
    NotInTower,
    PrecisionLoss,
    PrecisionTooLow,
    Reducible,
    UnsupportedPresentation,
)

INFINITY = float("inf")

BASE = "base"
EISENSTEIN = "eisenstein"
UNRAMIFIED = "unramified"


# ---------------------------------------------------------------------------
# flat-vector kernels
# ---------------------------------------------------------------------------

def _zeros(n: int) -> list[int]:
    return [0] * n


def _fadd(a: list[int], b: list[int], mod: int) -> list[int]:
    return [(x + y) % mod for x, y in zip(a, b)]


def _fsub(a: list[int], b: list[int], mod: int) -> list[int]:
    return [(x - y) % mod for x, y in zip(a, b)]


def _fmul(F: "LocalField", a: list[int], b: list[int], mod: int) -> list[int]:
    if F.kind == BASE:
        return [a[0] * b[0] % mod]
    d = F.step_degree
    N = F.parent
    s = N.degree
    if s == 1:
        prod = [0] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        poly = F._poly_int
        for k in range(2 * d - 2, d - 1, -1):
            c = prod[k] % mod
            if c:
                base = k - d
                for i in range(d):
                    if poly[i]:
                        prod[base + i] -= c * poly[i]
        return [x % mod for x in prod[:d]]
    A = [a[i * s:(i + 1) * s] for i in range(d)]
    B = [b[i * s:(i + 1) * s] for i in range(d)]
    nzA = [any(x) for x in A]
    nzB = [any(x) for x in B]
    prod: list[list[int] | None] = [None] * (2 * d - 1)
    for i in range(d):
        if not nzA[i]:
            continue
        for j in range(d):
            if not nzB[j]:
                continue
            t = _fmul(N, A[i], B[j], mod)
            cur = prod[i + j]
            prod[i + j] = t if cur is None else [(x + y) for x, y in zip(cur, t)]
    poly = F._poly
    for k in range(2 * d - 2, d - 1, -1):
        c = prod[k]
        if c is None:
            continue
        c = [x % mod for x in c]
        if not any(c):
            continue
        base = k - d
        for i in range(d):
            if not F._poly_nz[i]:
                continue
            t = _fmul(N, c, poly[i], mod)
            cur = prod[base + i]
            prod[base + i] = [-y for y in t] if cur is None else [x - y for x, y in zip(cur, t)]
    out: list[int] = []
    for k in range(d):
        c = prod[k]
        out.extend(_zeros(s) if c is None else [x % mod for x in c])
    return out


def _fval(F: "LocalField", a: list[int], mod: int) -> int | None:
    """Exact valuation of a stored vector, ``None`` for the zero vector."""
    if F.kind == BASE:
        x = a[0] % mod
        if x == 0:
            return None
        p = F.p
        v = 0
        while x % p == 0:
            x //= p
            v += 1
        return v
    d = F.step_degree
    N = F.parent
    s = N.degree
    best = None
    for i in range(d):
        chunk = a[i * s:(i + 1) * s]
        if not any(x % mod for x in chunk):
            continue
        v = _fval(N, chunk, mod)
        if v is None:
            continue
        w = d * v + i if F.kind == EISENSTEIN else v
        if best is None or w < best:
            best = w
    return best


def _fshift(F: "LocalField", a: list[int], mod: int) -> list[int]:
    """Divide by the uniformiser; the caller guarantees divisibility."""
    if F.kind == BASE:
        return [(a[0] % mod) // F.p]
    d = F.step_degree
    N = F.parent
    s = N.degree
    chunks = [a[i * s:(i + 1) * s] for i in range(d)]
    if F.kind == UNRAMIFIED:
        out: list[int] = []
        for c in chunks:
            out.extend(_fshift(N, c, mod))
        return out
    q = _fmul(N, _fshift(N, chunks[0], mod), F._u0inv, mod)
    res: list[list[int]] = []
    for i in range(d - 1):
        res.append(_fsub(chunks[i + 1], _fmul(N, q, F._poly[i + 1], mod), mod))
    res.append([(-x) % mod for x in q])
    out = []
    for c in res:
        out.extend(c)
    return out


def _fresidue(F: "LocalField", a: list[int]) -> tuple[int, ...]:
    if F.kind == BASE:
        return (a[0] % F.p,)
    N = F.parent
    s = N.degree
    if F.kind == EISENSTEIN:
        return _fresidue(N, a[:s])
    out: tuple[int, ...] = ()
    for i in range(F.step_degree):
        out += _fresidue(N, a[i * s:(i + 1) * s])
    return out


def _flift(F: "LocalField", r: Sequence[int]) -> list[int]:
    if F.kind == BASE:
        return [r[0] % F.p]
    N = F.parent
    s = N.degree
    if F.kind == EISENSTEIN:
        return _flift(N, r) + _zeros(s * (F.step_degree - 1))
    mN = N.m
    out: list[int] = []
    for i in range(F.step_degree):
        out.extend(_flift(N, r[i * mN:(i + 1) * mN]))
    return out


def _fembed(F: "LocalField", a: list[int]) -> list[int]:
    """Embed a vector of ``F.parent`` into ``F``."""
    return list(a) + _zeros(F.degree - len(a))


def _fpow(F: "LocalField", a: list[int], k: int, mod: int) -> list[int]:
    result = F._one_data()
    base = list(a)
    while k:
        if k & 1:
            result = _fmul(F, result, base, mod)
        k >>= 1
        if k:
            base = _fmul(F, base, base, mod)
    return result


def _finv_unit(F: "LocalField", a: list[int], mod: int) -> list[int]:
    q = F.p ** F.m
    y = _fpow(F, a, q - 2, mod)
    two = F._int_data(2)
    digits = 1
    while digits < F.cap:
        t = _fsub(two, _fmul(F, a, y, mod), mod)
        y = _fmul(F, y, t, mod)
        digits *= 2
    return y


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

class LocalField:
    """A finite extension of ``Q_p`` given as a tower of simple steps.

    Attributes:
        p: residue characteristic.
        m: absolute residue degree (residue field has ``p**m`` elements).
        e: absolute ramification index, so ``v(p) = e``.
        precision: number of p-adic digits kept (``M``).
        parent: the previous field of the tower, ``None`` for ``Q_p``.
        kind: ``"base"``, ``"eisenstein"`` or ``"unramified"``.
        step_degree: degree over ``parent``.
    """

    def __init__(self, p: int, precision: int, parent: "LocalField | None" = None,
                 kind: str = BASE, poly: "Sequence[LFElement] | None" = None,
                 label: str | None = None):
        self.p = p
        self.precision = precision
        self.modulus = p ** precision
        self.parent = parent
        self.kind = kind
        self.label = label
        self._own_names: dict[str, LFElement] = {}
        if kind == BASE:
            self.step_degree = 1
            self.degree = 1
            self.e = 1
            self.m = 1
            self.level = 0
            self._poly = []
            self._poly_int = []
            self._poly_nz = []
        else:
            assert parent is not None and poly is not None
            d = len(poly)
            self.step_degree = d
            self.degree = parent.degree * d
            self.level = parent.level + 1
            if kind == EISENSTEIN:
                self.e = parent.e * d
                self.m = parent.m
            else:
                self.e = parent.e
                self.m = parent.m * d
            mod = self.modulus
            self._poly = [[x % mod for x in c.data] for c in poly]
            self._poly_nz = [any(c) for c in self._poly]
            self._poly_int = [c[0] for c in self._poly] if parent.degree == 1 else []
            self._poly_elems = [LFElement(parent, list(c.data), c.prec) for c in poly]
            if kind == EISENSTEIN:
                a0 = self._poly[0]
                unit = _fshift(parent, a0, mod)
                self._u0inv = _finv_unit(parent, unit, mod)
        self.cap = self.e * self.precision

    # -- construction helpers -------------------------------------------------
    def _one_data(self) -> list[int]:
        out = _zeros(self.degree)
        out[0] = 1 % self.modulus
        return out

    def _int_data(self, n: int) -> list[int]:
        out = _zeros(self.degree)
        out[0] = n % self.modulus
        return out

    def element(self, data: Sequence[int], prec: int | None = None) -> "LFElement":
        mod = self.modulus
        data = [int(x) % mod for x in data]
        if len(data) != self.degree:
            raise ValueError("coefficient vector has wrong length")
        return LFElement(self, data, self.cap if prec is None else min(prec, self.cap))

    def from_int(self, n: int) -> "LFElement":
        return LFElement(self, self._int_data(n), self.cap)

    def zero(self) -> "LFElement":
        return self.from_int(0)

    def one(self) -> "LFElement":
        return self.from_int(1)

    def coerce(self, x) -> "LFElement":
        if isinstance(x, LFElement):
            if x.field is self:
                return x
            return self.embed(x)
        if isinstance(x, int):
            return self.from_int(x)
        raise TypeError(f"cannot coerce {type(x).__name__} into {self}")

    def embed(self, x: "LFElement") -> "LFElement":
        """Embed an element of an ancestor field."""
        chain = []
        F: LocalField | None = self
        while F is not None and F is not x.field:
            chain.append(F)
            F = F.parent
        if F is None:
            raise NotInTower("element does not belong to an ancestor of this field")
        data = list(x.data)
        prec = x.prec
        for G in reversed(chain):
            data = _fembed(G, data)
            if G.kind == EISENSTEIN:
                prec = prec * G.step_degree if prec != INFINITY else prec
        return self.element(data, prec)

    def ancestors(self) -> list["LocalField"]:
        out = []
        F = self
        while F is not None:
            out.append(F)
            F = F.parent
        return out

    def is_ancestor(self, other: "LocalField") -> bool:
        return any(F is other for F in self.ancestors())

    # -- distinguished elements -----------------------------------------------
    def generator(self) -> "LFElement":
        """The element adjoined at this step."""
        if self.kind == BASE:
            return self.from_int(self.p)
        if self.kind == EISENSTEIN and self.step_degree == 1:
            return -self.embed(self._poly_elems[0])
        data = _zeros(self.degree)
        data[self.parent.degree] = 1
        return self.element(data)

    def uniformizer(self) -> "LFElement":
        if self.kind == BASE:
            return self.from_int(self.p)
        if self.kind == EISENSTEIN:
            return self.generator()
        return self.embed(self.parent.uniformizer())

    def set_name(self, name: str, x: "LFElement") -> None:
        self._own_names[name] = self.coerce(x)

    def named(self, name: str) -> "LFElement":
        F = self
        while F is not None:
            if name in F._own_names:
                return self.coerce(F._own_names[name])
            F = F.parent
        raise KeyError(name)

    def has_name(self, name: str) -> bool:
        return any(name in F._own_names for F in self.ancestors())

    def names(self) -> list[str]:
        out: list[str] = []
        for F in reversed(self.ancestors()):
            out.extend(F._own_names)
        return out

    def step_polynomial(self) -> list["LFElement"]:
        """Monic defining polynomial of this step over the parent (low to high)."""
        if self.kind == BASE:
            raise ValueError("the base field has no defining step")
        return list(self._poly_elems) + [self.parent.one()]

    # -- residue field --------------------------------------------------------
    @property
    def residue_size(self) -> int:
        return self.p ** self.m

    def residue(self, x: "LFElement") -> tuple[int, ...]:
        if x.prec < 1:
            raise PrecisionLoss("residue of an element known to precision 0")
        return _fresidue(self, x.data)

    def residue_lift(self, r: Sequence[int]) -> "LFElement":
        return self.element(_flift(self, list(r)))

    def residue_reps(self) -> list["LFElement"]:
        return [self.residue_lift(r) for r in itertools.product(range(self.p), repeat=self.m)]

    # -- misc -----------------------------------------------------------------
    def steps(self) -> list["LocalField"]:
        return [F for F in reversed(self.ancestors()) if F.kind != BASE]

    def relative_degree(self, base: "LocalField") -> int:
        if not self.is_ancestor(base):
            raise NotInTower("base is not an ancestor")
        return self.degree // base.degree

    def __repr__(self) -> str:
        lab = f" {self.label}" if self.label else ""
        return f"<LocalField{lab} p={self.p} e={self.e} m={self.m} M={self.precision}>"


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

class LFElement:
    """An element of ``O_F`` known modulo ``pi_F ** prec``."""

    __slots__ = ("field", "data", "prec")

    def __init__(self, field: LocalField, data: list[int], prec):
        self.field = field
        self.data = data
        self.prec = prec

    # -- valuation ------------------------------------------------------------
    def _raw_val(self) -> int | None:
        return _fval(self.field, self.data, self.field.modulus)

    def val_lower(self):
        """Valuation if determined, else the precision (a lower bound)."""
        v = self._raw_val()
        if v is None or v >= self.prec:
            return self.prec
        return v

    def is_zero(self) -> bool:
        v = self._raw_val()
        return v is None or v >= self.prec

    def valuation(self, units: LocalField | None = None):
        """Exact valuation as a Fraction, or ``INFINITY`` for zero."""
        v = self._raw_val()
        if v is None or v >= self.prec:
            if self.prec >= self.field.cap:
                return INFINITY
            raise PrecisionLoss(f"element is zero to precision {self.prec}")
        out = Fraction(v)
        if units is not None:
            out = out * Fraction(units.e, self.field.e)
        return out

    # -- arithmetic -----------------------------------------------------------
    def _other(self, y) -> "LFElement":
        if isinstance(y, LFElement):
            if y.field is self.field:
                return y
            return self.field.coerce(y)
        return self.field.from_int(y)

    def _promoted(self, y) -> "LFElement | None":
        """``self`` embedded in ``y``'s field when that field lies above ours."""
        if isinstance(y, LFElement) and y.field is not self.field and y.field.is_ancestor(self.field):
            return y.field.coerce(self)
        return None

    def __add__(self, y):
        up = self._promoted(y)
        if up is not None:
            return up + y
        y = self._other(y)
        return LFElement(self.field, _fadd(self.data, y.data, self.field.modulus), min(self.prec, y.prec))

    __radd__ = __add__

    def __sub__(self, y):
        up = self._promoted(y)
        if up is not None:
            return up - y
        y = self._other(y)
        return LFElement(self.field, _fsub(self.data, y.data, self.field.modulus), min(self.prec, y.prec))

    def __rsub__(self, y):
        return self._other(y) - self

    def __neg__(self):
        mod = self.field.modulus
        return LFElement(self.field, [(-x) % mod for x in self.data], self.prec)

    def __mul__(self, y):
        if isinstance(y, int):
            mod = self.field.modulus
            data = [x * y % mod for x in self.data]
            vy = _int_val(y, self.field.p) * self.field.e
            return LFElement(self.field, data, min(self.prec + vy, self.field.cap))
        up = self._promoted(y)
        if up is not None:
            return up * y
        y = self._other(y)
        F = self.field
        data = _fmul(F, self.data, y.data, F.modulus)
        prec = min(self.prec + y.val_lower(), y.prec + self.val_lower(), F.cap)
        return LFElement(F, data, prec)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        F = self.field
        data = _fpow(F, self.data, k, F.modulus)
        return LFElement(F, data, _power_precision(F, self.val_lower(), self.prec, k))

    def shift_down(self, k: int) -> "LFElement":
        """Exact division by ``pi_F ** k``."""
        if k == 0:
            return self
        if k < 0:
            return self * self.field.uniformizer() ** (-k)
        if self.val_lower() < k:
            raise ValueError("element is not divisible by the requested power of the uniformiser")
        F = self.field
        data = self.data
        raw = self._raw_val()
        if raw is None or raw >= self.prec:
            # zero to precision: the quotient is zero to a smaller precision
            if self.prec - k < 0:
                raise PrecisionLoss("division exhausts the available precision")
            return LFElement(F, _zeros(F.degree), self.prec - k)
        for _ in range(k):
            data = _fshift(F, data, F.modulus)
        return LFElement(F, data, self.prec - k)

    def inverse(self) -> "LFElement":
        if self.val_lower() != 0 or self.is_zero():
            raise ValueError("only units can be inverted inside O_F")
        F = self.field
        return LFElement(F, _finv_unit(F, self.data, F.modulus), self.prec)

    def divide(self, y) -> "LFElement":
        """Exact quotient ``self / y`` inside ``O_F``."""
        y = self._other(y)
        if y.is_zero():
            raise ZeroDivisionError("division by an element that is zero to precision")
        k = y.val_lower()
        unit = y.shift_down(k)
        num = self.shift_down(k)
        return num * unit.inverse()

    def with_prec(self, prec) -> "LFElement":
        return LFElement(self.field, self.data, min(prec, self.prec))

    def residue(self) -> tuple[int, ...]:
        return self.field.residue(self)

    def canonical(self, k: int | None = None) -> "LFElement":
        """Canonical representative modulo ``pi_F ** k`` built from residue digits."""
        F = self.field
        if k is None:
            k = self.prec
        k = min(k, self.prec)
        if k <= 0:
            return F.zero()
        pi = F.uniformizer()
        out = F.zero()
        power = F.one()
        x = self
        for i in range(k):
            if x.prec < 1:
                break
            r = F.residue_lift(F.residue(x))
            out = out + r * power
            x = (x - r)
            if i + 1 < k:
                x = x.shift_down(1)
                power = power * pi
        return LFElement(F, out.data, F.cap)

    def digits(self, k: int) -> list[tuple[int, ...]]:
        """Residue digits of the canonical expansion up to ``pi_F ** k``."""
        F = self.field
        out = []
        x = self
        for i in range(k):
            r = F.residue(x)
            out.append(r)
            x = x - F.residue_lift(r)
            if i + 1 < k:
                x = x.shift_down(1)
        return out

    def __eq__(self, other):
        if not isinstance(other, (LFElement, int)):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"LFElement({self.data}, prec={self.prec})"


def _power_precision(F: LocalField, a, P, k: int):
    """Precision of ``x**k`` for ``x`` of valuation ``a`` known modulo ``pi^P``.

    The error of ``(x + eps)**k`` is a sum of ``C(k, i) x^(k-i) eps^i``.
    """
    if k == 0 or P >= F.cap:
        return F.cap
    if k > 512:
        return min(F.cap, P + (k - 1) * a)
    best = F.cap
    c = 1
    for i in range(1, k + 1):
        c = c * (k - i + 1) // i
        w = _int_val(c, F.p) * F.e + (k - i) * a + i * P
        if w < best:
            best = w
    return best


def _int_val(n: int, p: int) -> int:
    if n == 0:
        return 10 ** 9
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# polynomials over a field (lists of LFElement, lowest degree first)
# ---------------------------------------------------------------------------

def poly_coerce(F: LocalField, f: Iterable) -> list[LFElement]:
    return [F.coerce(c) for c in f]


def poly_eval(f: Sequence[LFElement], x: LFElement) -> LFElement:
    acc = f[-1]
    for c in reversed(f[:-1]):
        acc = acc * x + c
    return acc


def poly_derivative(f: Sequence[LFElement]) -> list[LFElement]:
    return [f[i] * i for i in range(1, len(f))]


def poly_mul(f: Sequence[LFElement], g: Sequence[LFElement]) -> list[LFElement]:
    F = f[0].field
    out = [F.zero() for _ in range(len(f) + len(g) - 1)]
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return out


def poly_taylor_shift(f: Sequence[LFElement], c: LFElement) -> list[LFElement]:
    """Coefficients of ``f(T + c)``."""
    g = list(f)
    n = len(g)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            g[j] = g[j] + c * g[j + 1]
    return g


def poly_scale(f: Sequence[LFElement], k: int) -> list[LFElement]:
    """Coefficients of ``f(pi^k T)``."""
    pi_k = f[0].field.uniformizer() ** k
    out = []
    power = f[0].field.one()
    for c in f:
        out.append(c * power)
        power = power * pi_k
    return out


def poly_normalize(f: Sequence[LFElement]) -> tuple[list[LFElement], int]:
    """Divide by the largest uniformiser power dividing every coefficient."""
    vals = []
    for c in f:
        if not c.is_zero():
            vals.append(c.val_lower())
    if not vals:
        raise PrecisionLoss("polynomial is zero to precision")
    mu = min(vals)
    out = []
    for c in f:
        if c.is_zero() and c.prec < mu:
            out.append(LFElement(c.field, _zeros(c.field.degree), 0))
        else:
            out.append(c.shift_down(mu))
    return out, mu


# ---------------------------------------------------------------------------
# Newton polygons
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of ``(i, v(a_i))``.

    ``slopes`` lists root valuations (positive numbers for integral roots)
    with multiplicities, ordered from the largest root valuation down.
    """

    vertices: tuple[tuple[int, Fraction], ...]
    slopes: tuple[tuple[Fraction, int], ...]
    zero_roots: int = 0

    def root_valuations(self) -> list[Fraction]:
        out: list[Fraction] = []
        for s, mult in self.slopes:
            out.extend([s] * mult)
        return out

    def degree(self) -> int:
        return sum(m for _, m in self.slopes) + self.zero_roots


def _lower_hull(points: list[tuple[int, Fraction]]) -> list[tuple[int, Fraction]]:
    hull: list[tuple[int, Fraction]] = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # keep hull[-1] only if it lies strictly below the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def newton_polygon_from_points(points: Sequence[tuple[int, Fraction]], degree: int) -> NewtonPolygon:
    pts = sorted((int(i), Fraction(v)) for i, v in points)
    if not pts:
        raise ValueError("zero polynomial has no Newton polygon")
    zero_roots = pts[0][0]
    hull = _lower_hull(pts)
    slopes: list[tuple[Fraction, int]] = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slopes.append(((y1 - y2) / (x2 - x1), x2 - x1))
    return NewtonPolygon(tuple(hull), tuple(slopes), zero_roots)


def newton_polygon(f: Sequence) -> NewtonPolygon:
    """Newton polygon of a polynomial with ``LFElement`` coefficients.

    Coefficients that are zero only to their working precision are
    allowed when they cannot affect the hull; otherwise ``PrecisionLoss``.
    """
    F = None
    for c in f:
        if isinstance(c, LFElement):
            F = c.field
            break
    if F is None:
        raise ValueError("polynomial needs at least one field element coefficient")
    f = [F.coerce(c) for c in f]
    known = []
    unknown = []
    for i, c in enumerate(f):
        v = c._raw_val()
        if v is not None and v < c.prec:
            known.append((i, Fraction(v)))
        elif c.prec < F.cap:
            unknown.append((i, Fraction(c.prec)))
    if not known:
        raise PrecisionLoss("every coefficient is zero to precision")
    poly = newton_polygon_from_points(known, len(f) - 1)
    # an unknown coefficient is harmless iff its precision lies on or above the hull
    hull = list(poly.vertices)
    for i, bound in unknown:
        if i < hull[0][0]:
            raise PrecisionLoss("low-order coefficient is indeterminate")
        if i > hull[-1][0]:
            if hull[-1][0] != len(f) - 1 or i > len(f) - 1:
                raise PrecisionLoss("leading coefficient is indeterminate")
            continue
        for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
            if x1 <= i <= x2:
                h = y1 + (y2 - y1) * Fraction(i - x1, x2 - x1)
                if bound < h:
                    raise PrecisionLoss("an indeterminate coefficient may change the polygon")
                break
    return poly


# ---------------------------------------------------------------------------
# characteristic polynomials and norms
# ---------------------------------------------------------------------------

def charpoly(matrix: Sequence[Sequence[LFElement]], one: LFElement) -> list[LFElement]:
    """Characteristic polynomial ``det(X I - A)`` (lowest degree first).

    Uses Berkowitz's division-free algorithm, so it is exact over ``O_F``.
    """
    n = len(matrix)
    zero = one - one
    if n == 0:
        return [one]
    vect = [one, -matrix[0][0]]
    for r in range(1, n):
        a = matrix[r][r]
        R = [matrix[r][j] for j in range(r)]
        C = [matrix[i][r] for i in range(r)]
        Am = [[matrix[i][j] for j in range(r)] for i in range(r)]
        q = [one, -a]
        cur = C
        for _ in range(r):
            s = zero
            for x, y in zip(R, cur):
                s = s + x * y
            q.append(-s)
            cur = [sum((Am[i][j] * cur[j] for j in range(r)), zero) for i in range(r)]
        new = []
        for i in range(r + 2):
            s = zero
            for j in range(min(i, r) + 1):
                s = s + q[i - j] * vect[j]
            new.append(s)
        vect = new
    return list(reversed(vect))


def _coords(F: LocalField, x: LFElement) -> list[LFElement]:
    """Coordinates of ``x`` over ``F.parent`` in the power basis of the step."""
    N = F.parent
    s = N.degree
    prec_parent = x.prec
    if F.kind == EISENSTEIN and prec_parent != INFINITY:
        prec_parent = -(-x.prec // F.step_degree)
    return [N.element(x.data[i * s:(i + 1) * s], min(prec_parent, N.cap))
            for i in range(F.step_degree)]


def multiplication_matrix(x: LFElement) -> list[list[LFElement]]:
    F = x.field
    g = F.generator()
    d = F.step_degree
    cols = []
    cur = x
    for _ in range(d):
        cols.append(_coords(F, cur))
        cur = cur * g
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def relative_charpoly(x: LFElement) -> list[LFElement]:
    F = x.field
    if F.kind == BASE:
        raise NotInTower("the base field has no parent")
    return charpoly(multiplication_matrix(x), F.parent.one())


def norm_to_base(x: LFElement, base: LocalField) -> LFElement:
    """Norm of ``x`` down the tower to the ancestor ``base``."""
    if not x.field.is_ancestor(base):
        raise NotInTower("base is not an ancestor of the element's field")
    while x.field is not base:
        F = x.field
        chi = relative_charpoly(x)
        d = F.step_degree
        n = chi[0] if d % 2 == 0 else -chi[0]
        x = n
    return x


# ---------------------------------------------------------------------------
# field construction
# ---------------------------------------------------------------------------

def base_field(p: int, precision: int) -> LocalField:
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise NotEisenstein(f"{p} is not prime")
    F = LocalField(p, precision, label=f"Q_{p}")
    return F


def _check_eisenstein(N: LocalField, poly: Sequence[LFElement]) -> None:
    a0 = poly[0]
    if a0.is_zero():
        if a0.prec < N.cap:
            raise PrecisionTooLow("constant term is indeterminate at this precision")
        raise NotEisenstein("constant term vanishes")
    if a0.val_lower() != 1:
        raise NotEisenstein("constant term must have valuation exactly 1")
    for c in poly[1:]:
        if not c.is_zero() and c.val_lower() < 1:
            raise NotEisenstein("non-leading coefficients must lie in the maximal ideal")
        if c.is_zero() and c.prec < 1:
            raise PrecisionTooLow("coefficient is indeterminate at this precision")


def eisenstein_step(N: LocalField, poly: Sequence, precision: int | None = None,
                    label: str | None = None) -> LocalField:
    """Adjoin a root of a monic Eisenstein polynomial (coefficients low to high)."""
    coeffs = [N.coerce(c) for c in poly]
    if coeffs[-1] != 1:
        raise NotEisenstein("polynomial must be monic")
    lower = coeffs[:-1]
    if not lower:
        raise NotEisenstein("polynomial must have positive degree")
    _check_eisenstein(N, lower)
    M = N.precision if precision is None else min(precision, N.precision)
    return LocalField(N.p, M, N, EISENSTEIN, lower, label=label)


def _residue_poly_has_root(N: LocalField, poly: Sequence[LFElement]) -> bool:
    for r in N.residue_reps():
        if poly_eval(list(poly), r).val_lower() >= 1:
            return True
    return False


def _smallest_irreducible_mod_p(p: int, m: int) -> list[int]:
    from sympy import Poly, symbols

    t = symbols("t")
    for tail in itertools.product(range(p), repeat=m):
        coeffs = [1] + list(tail)  # high to low
        if coeffs[-1] == 0:
            continue
        if Poly(coeffs, t, modulus=p).is_irreducible:
            return list(reversed(coeffs))
    raise UnsupportedPresentation("no irreducible polynomial found")


def unramified_step(N: LocalField, poly: Sequence, precision: int | None = None,
                    label: str | None = None) -> LocalField:
    """Adjoin a unit root of a monic polynomial with irreducible reduction."""
    coeffs = [N.coerce(c) for c in poly]
    if coeffs[-1] != 1:
        raise UnsupportedPresentation("polynomial must be monic")
    d = len(coeffs) - 1
    if d > 3 and N.m > 1:
        raise UnsupportedPresentation("residue irreducibility certified only for degree <= 3 over non-prime residue fields")
    if d <= 3:
        if _residue_poly_has_root(N, coeffs):
            raise Reducible("residue polynomial has a root")
    else:
        from sympy import Poly, symbols

        t = symbols("t")
        res = [N.residue(c)[0] for c in reversed(coeffs)]
        if not Poly(res, t, modulus=N.p).is_irreducible:
            raise Reducible("residue polynomial is reducible")
    M = N.precision if precision is None else min(precision, N.precision)
    return LocalField(N.p, M, N, UNRAMIFIED, coeffs[:-1], label=label)


def make_field(p: int, m: int, eis_coeffs: Sequence[int], precision: int) -> LocalField:
    """Build ``K = W(F_q)[pi] / E(pi)`` as a tower over ``Q_p``.

    Args:
        p: the prime.
        m: unramified degree, so the residue field is ``F_{p^m}``.
        eis_coeffs: integer coefficients of ``E(u)``, lowest degree first.
        precision: number of p-adic digits kept.
    """
    coeffs = [int(c) for c in eis_coeffs]
    if len(coeffs) < 2 or coeffs[-1] != 1:
        raise NotEisenstein("Eisenstein polynomial must be monic of positive degree")
    if precision < 2:
        raise PrecisionTooLow("precision must be at least 2 digits")
    if coeffs[0] % (p ** precision) == 0:
        raise PrecisionTooLow("constant term vanishes at this precision")
    if _int_val(coeffs[0], p) != 1:
        raise NotEisenstein("constant term must have p-adic valuation exactly 1")
    for c in coeffs[1:-1]:
        if c % p != 0:
            raise NotEisenstein("non-leading coefficients must be divisible by p")
    Q = base_field(p, precision)
    N = Q
    if m > 1:
        N = unramified_step(Q, _smallest_irreducible_mod_p(p, m), label=f"Q_{p}^({m})")
    K = eisenstein_step(N, coeffs, label="K")
    K.eis_coeffs = tuple(coeffs)
    K.set_name("pi", K.uniformizer())
    K.set_name("pi_0", K.uniformizer())
    return K


# ---------------------------------------------------------------------------
# roots and simple extensions
# ---------------------------------------------------------------------------

def _newton_lift(f: list[LFElement], x: LFElement, max_iter: int = 200) -> LFElement:
    """Hensel lift of a simple residue root.

    The inverse of ``f'(x)`` is refined alongside ``x`` by one Newton step per
    iteration instead of being recomputed.
    """
    df = poly_derivative(f)
    F = x.field
    dfx = poly_eval(df, x)
    if dfx.val_lower() != 0:
        raise PrecisionLoss("derivative is not a unit at the starting point")
    q = F.p ** F.m
    w = dfx ** (q - 2) if q > 2 else F.one()
    two = F.from_int(2)
    last = -1
    for _ in range(max_iter):
        fx = poly_eval(f, x)
        if fx.is_zero():
            return x
        v = fx.val_lower()
        if v <= last:
            raise PrecisionLoss("Newton iteration stalled")
        last = v
        x = x - fx * w
        w = w * (two - poly_eval(df, x) * w)
    raise PrecisionLoss("Newton iteration did not converge")


def _integral_roots(f: list[LFElement], depth: int, max_depth: int) -> list[LFElement]:
    if depth > max_depth:
        raise PrecisionLoss("root separation exceeds working precision")
    f, _ = poly_normalize(f)
    F = f[0].field
    for c in f:
        if c.prec < 1:
            raise PrecisionLoss("coefficient indeterminate during root search")
    df = poly_derivative(f)
    pi = F.uniformizer()
    roots: list[LFElement] = []
    for r in F.residue_reps():
        if poly_eval(f, r).val_lower() < 1:
            continue
        if poly_eval(df, r).val_lower() == 0:
            roots.append(_newton_lift(f, r))
            continue
        g = poly_taylor_shift(f, r)
        g = poly_scale(g, 1)
        for s in _integral_roots(g, depth + 1, max_depth):
            roots.append(r + pi * s)
    return roots


def roots_in_field(f: Sequence, F: LocalField, max_depth: int | None = None) -> list[LFElement]:
    """Roots in ``O_F`` of a separable polynomial with integral coefficients."""
    coeffs = poly_coerce(F, f)
    while len(coeffs) > 1 and coeffs[-1].is_zero() and coeffs[-1].prec >= F.cap:
        coeffs.pop()
    if len(coeffs) <= 1:
        return []
    depth = F.cap if max_depth is None else max_depth
    return _integral_roots(coeffs, 0, depth)


@dataclass
class _Shift:
    lam: int
    c: LFElement


def adjoin_root(F: LocalField, f: Sequence, precision: int | None = None,
                name: str | None = None, label: str | None = None) -> LocalField:
    """Adjoin a root of a monic irreducible polynomial.

    The polynomial is transformed by substitutions ``T -> pi^k (c + T)``
    until its Newton polygon has a single slope ``a/d`` with ``gcd(a, d) = 1``
    (totally ramified step, re-presented by an Eisenstein polynomial) or the
    reduction is irreducible of degree ``d`` (unramified step).  The root of
    the original polynomial is stored as ``L.adjoined_root`` and, when
    ``name`` is given, under that name.
    """
    cur = poly_coerce(F, f)
    d = len(cur) - 1
    if d < 2:
        raise UnsupportedPresentation("degree-1 polynomials do not define a new step")
    if cur[-1] != 1:
        raise UnsupportedPresentation("polynomial must be monic")
    shifts: list[_Shift] = []
    L: LocalField | None = None
    y: LFElement | None = None
    for _ in range(4 * F.cap + 8):
        poly = newton_polygon(cur)
        if len(poly.slopes) != 1 or poly.zero_roots:
            raise Reducible("Newton polygon has more than one slope")
        lam = poly.slopes[0][0]
        if lam.denominator == d:
            L, y = _ramified_step(F, cur, lam, precision, label)
            break
        if lam.denominator != 1:
            raise UnsupportedPresentation(f"slope {lam} cannot be presented at desk scale")
        k = int(lam)
        g = [c.shift_down(k * (d - i)) if not (c.is_zero() and c.prec < k * (d - i)) else
             LFElement(F, _zeros(F.degree), max(0, c.prec - k * (d - i))) for i, c in enumerate(cur)]
        g[-1] = F.one()
        roots = [r for r in F.residue_reps() if poly_eval(g, r).val_lower() >= 1]
        if not roots:
            if d in (2, 3):
                L = unramified_step(F, g, precision, label)
                y = L.generator()
                shifts.append(_Shift(k, F.zero()))
                break
            raise UnsupportedPresentation("residue polynomial has no root; degree too large to certify")
        if len(roots) > 1:
            raise Reducible("residue polynomial has several distinct roots")
        c = roots[0]
        shifted = poly_taylor_shift(g, c)
        # reduction must be T^d: every lower coefficient in the maximal ideal
        if any(shifted[i].val_lower() < 1 for i in range(d)):
            raise Reducible("residue polynomial is not a pure power")
        shifts.append(_Shift(k, c))
        cur = shifted
    else:
        raise PrecisionLoss("could not separate the roots at this precision")
    assert L is not None and y is not None
    z = y
    for sh in reversed(shifts):
        z = L.embed(L.parent.uniformizer()) ** sh.lam * (L.coerce(sh.c) + z) if sh.lam else L.coerce(sh.c) + z
    orig = poly_coerce(L, f)
    if not poly_eval(orig, z).is_zero():
        raise PrecisionLoss("reconstructed root does not satisfy the polynomial")
    L.adjoined_root = z
    if name:
        L.set_name(name, z)
    return L


def _ramified_step(F: LocalField, cur: list[LFElement], lam: Fraction,
                   precision: int | None, label: str | None):
    d = len(cur) - 1
    a = lam.numerator
    if a == 1:
        L = eisenstein_step(F, cur, precision, label)
        return L, L.generator()
    s = pow(a, -1, d)
    t = (1 - s * a) // d
    companion = [[F.zero() for _ in range(d)] for _ in range(d)]
    for i in range(1, d):
        companion[i][i - 1] = F.one()
    for i in range(d):
        companion[i][d - 1] = -cur[i]
    power = companion
    for _ in range(s - 1):
        power = [[sum((power[i][k] * companion[k][j] for k in range(d)), F.zero())
                  for j in range(d)] for i in range(d)]
    chi = charpoly(power, F.one())
    h = []
    for k in range(d):
        h.append(chi[k].shift_down(-t * (d - k)) if t else chi[k])
    h.append(F.one())
    try:
        L = eisenstein_step(F, h, precision, label)
    except NotEisenstein as exc:  # pragma: no cover - guarded by the polygon
        raise UnsupportedPresentation(str(exc)) from exc
    roots = roots_in_field(cur, L)
    if not roots:
        raise PrecisionLoss("root of the shifted polynomial not found")
    return L, roots[0]


# ---------------------------------------------------------------------------
# JSON presentations
# ---------------------------------------------------------------------------

def field_from_json(doc: dict) -> LocalField:
    """Build a field from ``{"p", "unramified_degree", "eisenstein", "precision", "base"?}``."""
    p = int(doc["p"])
    m = int(doc.get("unramified_degree", 1))
    M = int(doc["precision"])
    coeffs = [int(c) for c in doc["eisenstein"]]
    if "base" in doc and doc["base"] is not None:
        N = field_from_json(doc["base"])
        if m > 1:
            if N.m != 1:
                raise UnsupportedPresentation("nested unramified steps need a prime residue field")
            N = unramified_step(N, _smallest_irreducible_mod_p(p, m))
        L = eisenstein_step(N, coeffs, M)
        L.eis_coeffs = tuple(coeffs)
        return L
    return make_field(p, m, coeffs, M)


def field_to_json(K: LocalField) -> dict:
    coeffs = getattr(K, "eis_coeffs", None)
    if coeffs is None:
        raise UnsupportedPresentation("only fields built from integer Eisenstein data serialise")
    doc = {"p": K.p, "unramified_degree": K.m // (K.parent.m if K.parent is not None and K.parent.kind != BASE and hasattr(K.parent, "eis_coeffs") else 1),
           "eisenstein": [str(c) for c in coeffs], "precision": K.precision}
    par = K.parent
    while par is not None and par.kind == UNRAMIFIED:
        par = par.parent
    if par is not None and par.kind != BASE and hasattr(par, "eis_coeffs"):
        doc["base"] = field_to_json(par)
    return doc


def element_to_json(x: LFElement) -> dict:
    return {"coeffs": [str(c) for c in x.data],
            "precision": None if x.prec == INFINITY else int(x.prec)}


def element_from_json(F: LocalField, doc: dict) -> LFElement:
    prec = doc.get("precision")
    return F.element([int(c) for c in doc["coeffs"]], None if prec is None else int(prec))


def valuation(x: LFElement, units: LocalField | None = None):
    """Module-level alias of :meth:`LFElement.valuation`."""
    return x.valuation(units)


def ramification_index(L: LocalField, K: LocalField) -> int:
    if not L.is_ancestor(K):
        raise NotInTower("K is not an ancestor of L")
    return L.e // K.e


def is_prime(n: int) -> bool:
    return n >= 2 and all(n % q for q in range(2, int(n ** 0.5) + 1))


# ---------------------------------------------------------------------------
# Kummer and cyclotomic towers
# ---------------------------------------------------------------------------

def adjoin_zeta(F: LocalField, k: int) -> LocalField:
    """Adjoin ``zeta_{p^j}`` for ``j <= k`` (names ``zeta_{p^j}``), reusing existing ones."""
    p = F.p
    L = F
    for j in range(1, k + 1):
        name = f"zeta_{p ** j}"
        if L.has_name(name):
            continue
        if j == 1:
            f = [1] * p
        else:
            prev = L.named(f"zeta_{p ** (j - 1)}")
            f = [-prev] + [0] * (p - 1) + [1]
        L = adjoin_root(L, f, name=name, label=name)
    return L


def adjoin_kummer(F: LocalField, n: int) -> LocalField:
    """Adjoin ``pi_j = pi_{j-1}^{1/p}`` for ``j <= n`` (names ``pi_j``)."""
    p = F.p
    L = F
    for j in range(1, n + 1):
        name = f"pi_{j}"
        if L.has_name(name):
            continue
        prev = L.named(f"pi_{j - 1}")
        f = [-prev] + [0] * (p - 1) + [1]
        L = adjoin_root(L, f, name=name, label=name)
    return L


def tower_F_n(K: LocalField, n: int, precision: int | None = None) -> LocalField:
    """``F_n = K(pi_n, zeta_{p^{n+1}})`` as an explicit tower."""
    L = adjoin_zeta(K, n + 1)
    L = adjoin_kummer(L, n)
    return L


def tower_tate(K: LocalField, n: int) -> LocalField:
    """``K_n(zeta_{p^n})``, the splitting field of the Tate-curve torsion."""
    L = adjoin_zeta(K, n)
    return adjoin_kummer(L, n)


# ---------------------------------------------------------------------------
# automorphisms
# ---------------------------------------------------------------------------

class Automorphism:
    """An automorphism of ``F`` fixing the ancestor ``base``.

    It is determined by the images of the generators of the steps above
    ``base``; each image must be a root of the step polynomial transported
    by the automorphism already defined below it.
    """

    def __init__(self, F: LocalField, base: LocalField, images: dict | None = None):
        from .errors import NotAnAutomorphism

        if not F.is_ancestor(base):
            raise NotInTower("base is not an ancestor of the field")
        self.F = F
        self.base = base
        self._images: dict[int, LFElement] = {}
        images = dict(images or {})
        by_step: dict[int, tuple[str, LFElement]] = {}
        for key in list(images):
            if isinstance(key, str):
                owner = next((G for G in F.ancestors() if key in G._own_names), None)
                if owner is None:
                    raise NotAnAutomorphism(f"unknown element name {key!r}")
                by_step[owner.level] = (key, F.coerce(images.pop(key)))
        for G in reversed(F.ancestors()):
            if G.level <= base.level:
                continue
            poly = [self._apply_in(c, F) for c in G.step_polynomial()]
            if G.level in by_step:
                name, target = by_step[G.level]
                img = self._generator_image_for(G, name, target, poly)
            else:
                img = images.get(G.level)
                img = F.coerce(G.generator()) if img is None else F.coerce(img)
            self._images[G.level] = img
            if not poly_eval(poly, img).is_zero():
                raise NotAnAutomorphism(f"image of the generator of step {G.label or G.level} is not a root")

    def _generator_image_for(self, G: LocalField, name: str, target: LFElement,
                             poly: list[LFElement]) -> LFElement:
        from .errors import NotAnAutomorphism

        coords = _coords(G, G._own_names[name])
        mapped = [self._apply_in(c, self.F) for c in coords]
        for root in roots_in_field(poly, self.F):
            if poly_eval(mapped, root) == target:
                return root
        raise NotAnAutomorphism(f"no automorphism sends {name} to the requested image")

    def _apply_in(self, x: LFElement, target: LocalField) -> LFElement:
        """Apply to an element of an intermediate field, landing in ``target``."""
        G = x.field
        if G.level <= self.base.level:
            return target.coerce(x)
        gen_img = self._images[G.level]
        if G.kind == EISENSTEIN and G.step_degree == 1:
            return self._apply_in(_coords(G, x)[0], target)
        coords = _coords(G, x)
        acc = target.zero()
        power = target.one()
        for i, c in enumerate(coords):
            acc = acc + self._apply_in(c, target) * power
            if i + 1 < len(coords):
                power = power * gen_img
        return acc.with_prec(x.prec * (target.e // G.e))

    def __call__(self, x: LFElement) -> LFElement:
        x = self.F.coerce(x)
        return self._apply_in(x, self.F)

    def compose(self, other: "Automorphism") -> "Automorphism":
        images = {lvl: self(img) for lvl, img in other._images.items()}
        return Automorphism(self.F, self.base, images)

    def is_identity(self) -> bool:
        return all((img - self.F.coerce(G.generator())).is_zero()
                   for G in self.F.ancestors() if G.level in self._images
                   for img in [self._images[G.level]])

    def __repr__(self) -> str:
        return f"<Automorphism of {self.F} over {self.base}>"


def identity_automorphism(F: LocalField, base: LocalField) -> Automorphism:
    return Automorphism(F, base)


__all__ = [
    "INFINITY", "LocalField", "LFElement", "NewtonPolygon",
    "make_field", "base_field", "eisenstein_step", "unramified_step",
    "adjoin_root", "roots_in_field", "newton_polygon", "newton_polygon_from_points",
    "norm_to_base", "relative_charpoly", "charpoly", "valuation",
    "poly_eval", "poly_derivative", "poly_mul", "poly_taylor_shift", "poly_scale",
    "field_from_json", "field_to_json", "element_to_json", "element_from_json",
    "ramification_index", "adjoin_zeta", "adjoin_kummer", "tower_F_n", "tower_tate", "Automorphism", "identity_automorphism",
]
