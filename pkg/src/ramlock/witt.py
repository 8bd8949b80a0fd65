"""Truncated p-typical Witt vectors over a pluggable coefficient ring.

The universal sum, product and difference polynomials are generated once
per ``(p, n)`` from the ghost-component recursion and cached.  Polynomials
live in dictionaries keyed by packed exponent vectors: the exponent of
variable ``i`` occupies a fixed bit field, so multiplying monomials is
integer addition of keys.

Coefficient rings only need ``+``, ``-``, ``*`` and multiplication by
Python integers.  In practice entries are ``int``, ``Fraction`` or
:class:`~ramlock.localfield.LFElement`.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .errors import ContextMismatch, MissingRoots, NotDivisible, PrecisionLoss, TooLarge
from .localfield import LFElement, LocalField


# ---------------------------------------------------------------------------
# packed polynomials
# ---------------------------------------------------------------------------

def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    get = out.get
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            out[k] = get(k, 0) + ca * cb
    return {k: v for k, v in out.items() if v}


def _padd(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + sign * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _ppow(a: dict, k: int) -> dict:
    result = {0: 1}
    base = a
    while k:
        if k & 1:
            result = _pmul(result, base)
        k >>= 1
        if k:
            base = _pmul(base, base)
    return result


def _pscale(a: dict, c: int) -> dict:
    if c == 0:
        return {}
    return {k: v * c for k, v in a.items()}


def _pdiv_exact(a: dict, c: int) -> dict:
    out = {}
    for k, v in a.items():
        q, r = divmod(v, c)
        if r:
            raise ArithmeticError("ghost recursion produced a non-integral coefficient")
        out[k] = q
    return out


class Polynomial:
    """Integer polynomial in a fixed set of variables with packed keys.

    Used to expose the universal polynomials and as a coefficient ring
    for polynomial identities (carry polynomials).
    """

    __slots__ = ("terms", "nvars", "shift")

    def __init__(self, terms: dict, nvars: int, shift: int):
        self.terms = terms
        self.nvars = nvars
        self.shift = shift

    @classmethod
    def var(cls, i: int, nvars: int, shift: int) -> "Polynomial":
        return cls({1 << (shift * i): 1}, nvars, shift)

    @classmethod
    def const(cls, c: int, nvars: int, shift: int) -> "Polynomial":
        return cls({0: c} if c else {}, nvars, shift)

    def _wrap(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial.const(int(other), self.nvars, self.shift)

    def __add__(self, other):
        return Polynomial(_padd(self.terms, self._wrap(other).terms), self.nvars, self.shift)

    __radd__ = __add__

    def __sub__(self, other):
        return Polynomial(_padd(self.terms, self._wrap(other).terms, -1), self.nvars, self.shift)

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __neg__(self):
        return Polynomial(_pscale(self.terms, -1), self.nvars, self.shift)

    def __mul__(self, other):
        if isinstance(other, int):
            return Polynomial(_pscale(self.terms, other), self.nvars, self.shift)
        return Polynomial(_pmul(self.terms, self._wrap(other).terms), self.nvars, self.shift)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return Polynomial(_ppow(self.terms, k), self.nvars, self.shift)

    def exact_div(self, c: int) -> "Polynomial":
        return Polynomial(_pdiv_exact(self.terms, c), self.nvars, self.shift)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (Polynomial, int)):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def exponents(self, key: int) -> list[int]:
        mask = (1 << self.shift) - 1
        return [(key >> (self.shift * i)) & mask for i in range(self.nvars)]

    def evaluate(self, values: Sequence):
        """Value at ``values`` (integers, fractions or ring elements)."""
        total = 0
        for key, c in self.terms.items():
            term = c
            for v, e in zip(values, self.exponents(key)):
                if e:
                    term = term * v ** e
            total = total + term
        return total

    def reduce_mod(self, m: int) -> "Polynomial":
        return Polynomial({k: v % m for k, v in self.terms.items() if v % m}, self.nvars, self.shift)

    def __len__(self) -> int:
        return len(self.terms)

    def to_text(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key in sorted(self.terms, key=lambda k: self.exponents(k)):
            c = self.terms[key]
            mon = "*".join(f"{names[i]}^{e}" if e > 1 else names[i]
                           for i, e in enumerate(self.exponents(key)) if e)
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append(f"-{mon}")
            else:
                parts.append(f"{c}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Polynomial({len(self.terms)} terms)"


# ---------------------------------------------------------------------------
# universal polynomials
# ---------------------------------------------------------------------------

_CACHE: dict[tuple[int, int, str], list[dict]] = {}
_LOCK = threading.Lock()


def _shift_for(p: int, n: int) -> int:
    return max(4, (p ** max(n - 1, 0)).bit_length() + 1)


def _generate(p: int, n: int, op: str, shift: int) -> list[dict]:
    def ghost(k: int, offset: int) -> dict:
        return {(p ** (k - i)) << (shift * (offset + i)): p ** i for i in range(k + 1)}

    out: list[dict] = []
    pows: list[dict] = []
    for k in range(n):
        gx = ghost(k, 0)
        gy = ghost(k, n)
        if op == "add":
            target = _padd(gx, gy)
        elif op == "sub":
            target = _padd(gx, gy, -1)
        else:
            target = _pmul(gx, gy)
        for i in range(k):
            target = _padd(target, _pscale(pows[i], p ** i), -1)
        Rk = _pdiv_exact(target, p ** k)
        out.append(Rk)
        pows.append(Rk)
        if k + 1 < n:
            pows = [_ppow(q, p) for q in pows]
    return out


def universal_polynomials(p: int, n: int, op: str) -> list[dict]:
    """Packed universal polynomials for ``op`` in ``{"add", "mul", "sub"}``.

    Variables are ``X_0..X_{n-1}, Y_0..Y_{n-1}``; the packing width is
    ``_shift_for(p, n)``.
    """
    key = (p, n, op)
    with _LOCK:
        hit = _CACHE.get(key)
        if hit is None:
            hit = _generate(p, n, op, _shift_for(p, n))
            _CACHE[key] = hit
    return hit


def _compile(poly: dict, nvars: int, shift: int) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
    mask = (1 << shift) - 1
    out = []
    for key, c in poly.items():
        mon = []
        for i in range(nvars):
            e = (key >> (shift * i)) & mask
            if e:
                mon.append((i, e))
        out.append((c, tuple(mon)))
    return out


# ---------------------------------------------------------------------------
# ring helpers
# ---------------------------------------------------------------------------

def _is_zero(x) -> bool:
    """Exact zero; an element that is only zero to some precision still carries it."""
    if isinstance(x, LFElement):
        return x.is_zero() and x.prec >= x.field.cap
    if isinstance(x, Polynomial):
        return x.is_zero()
    return x == 0


def _is_zero_at_prec(x) -> bool:
    if isinstance(x, LFElement):
        return x.is_zero()
    return _is_zero(x)


def _from_int(template, k: int):
    if isinstance(template, LFElement):
        F = template.field
        out = F.from_int(k)
        return out.with_prec(template.prec) if template.prec < F.cap else out
    if isinstance(template, Polynomial):
        return Polynomial.const(k, template.nvars, template.shift)
    if isinstance(template, Fraction):
        return Fraction(k)
    return k


def _evaluate(compiled, values: Sequence, template):
    """Evaluate compiled polynomial terms at ``values``."""
    zero_vars = {i for i, v in enumerate(values) if _is_zero(v)}
    cache: dict[tuple[int, int], object] = {}

    def power(i: int, e: int):
        hit = cache.get((i, e))
        if hit is None:
            if e == 1:
                hit = values[i]
            else:
                h = e // 2
                hit = power(i, h) * power(i, e - h)
            cache[(i, e)] = hit
        return hit

    total = _from_int(template, 0)
    for c, mon in compiled:
        if zero_vars and any(i in zero_vars for i, _ in mon):
            continue
        term = None
        for i, e in mon:
            f = power(i, e)
            term = f if term is None else term * f
        if term is None:
            term = _from_int(template, c)
        elif c != 1:
            term = term * c
        total = total + term
    return total


# ---------------------------------------------------------------------------
# contexts and vectors
# ---------------------------------------------------------------------------

class WittContext:
    """Universal data for length-``n`` p-typical Witt vectors.

    Attributes:
        p: the prime.
        n: the length.
    """

    _instances: dict[tuple[int, int], "WittContext"] = {}

    def __new__(cls, p: int, n: int):
        key = (p, n)
        with _LOCK:
            inst = cls._instances.get(key)
            if inst is None:
                inst = super().__new__(cls)
                inst._init(p, n)
                cls._instances[key] = inst
        return inst

    def _init(self, p: int, n: int) -> None:
        if n < 1:
            raise ValueError("Witt vectors need positive length")
        self.p = p
        self.n = n
        self.shift = _shift_for(p, n)
        self._compiled: dict[str, list] = {}
        self._carry: tuple | None = None

    # -- universal polynomials ------------------------------------------------
    def _polys(self, op: str) -> list:
        hit = self._compiled.get(op)
        if hit is None:
            raw = universal_polynomials(self.p, self.n, op)
            hit = [_compile(q, 2 * self.n, self.shift) for q in raw]
            self._compiled[op] = hit
        return hit

    def polynomial(self, op: str, k: int) -> Polynomial:
        """Universal polynomial ``S_k`` (``"add"``), ``P_k`` (``"mul"``) or ``D_k`` (``"sub"``)."""
        raw = universal_polynomials(self.p, self.n, op)
        return Polynomial(raw[k], 2 * self.n, self.shift)

    @property
    def sum_polys(self) -> list[Polynomial]:
        return [self.polynomial("add", k) for k in range(self.n)]

    @property
    def prod_polys(self) -> list[Polynomial]:
        return [self.polynomial("mul", k) for k in range(self.n)]

    @property
    def phi_polys(self) -> list[Polynomial]:
        return [Polynomial.var(i, 2 * self.n, self.shift) ** self.p for i in range(self.n)]

    def variables(self) -> list[Polynomial]:
        """``X_0..X_{n-1}, Y_0..Y_{n-1}`` as polynomials."""
        return [Polynomial.var(i, 2 * self.n, self.shift) for i in range(2 * self.n)]

    def variable_names(self) -> list[str]:
        return [f"X{i}" for i in range(self.n)] + [f"Y{i}" for i in range(self.n)]

    def dump_polynomials(self) -> str:
        """Plain-text listing of the universal sum and product polynomials."""
        names = self.variable_names()
        lines = [f"# p={self.p} n={self.n}"]
        for k in range(self.n):
            lines.append(f"S{k} = {self.polynomial('add', k).to_text(names)}")
        for k in range(self.n):
            lines.append(f"P{k} = {self.polynomial('mul', k).to_text(names)}")
        return "\n".join(lines) + "\n"

    # -- vectors ----------------------------------------------------------------
    def vector(self, entries: Iterable) -> "WittVector":
        entries = list(entries)
        if len(entries) != self.n:
            raise ValueError(f"expected {self.n} entries")
        return WittVector(self, entries)

    def zero(self, template) -> "WittVector":
        z = _from_int(template, 0)
        return WittVector(self, [z] * self.n)

    def one(self, template) -> "WittVector":
        return self.teichmuller(_from_int(template, 1))

    def teichmuller(self, a) -> "WittVector":
        z = _from_int(a, 0)
        return WittVector(self, [a] + [z] * (self.n - 1))

    def integer_components(self, k: int) -> list[int]:
        """Witt components of the integer ``k`` (all ghost components equal ``k``)."""
        p = self.p
        comps: list[int] = []
        for i in range(self.n):
            s = k - sum(p ** l * comps[l] ** (p ** (i - l)) for l in range(i))
            q, r = divmod(s, p ** i)
            if r:
                raise ArithmeticError("non-integral Witt component")
            comps.append(q)
        return comps

    def integer(self, k: int, template) -> "WittVector":
        return WittVector(self, [_from_int(template, c) for c in self.integer_components(k)])

    # -- carry polynomials -------------------------------------------------------
    def carry_polynomials(self, max_terms: int = 200_000) -> tuple[list[Polynomial], list[Polynomial]]:
        """Polynomials ``U`` and ``U'`` with ``Phi(X+Y) = Phi(X)+Phi(Y)+pU`` and likewise for products."""
        if self._carry is not None:
            return self._carry
        n, sh, p = self.n, self.shift, self.p
        if p ** n > 64:
            raise TooLarge("carry polynomials are only generated for p**n <= 64")
        nv = 2 * n
        shift = max(sh, (p ** n * 2).bit_length() + 1)
        X = [Polynomial.var(i, nv, shift) for i in range(n)]
        Y = [Polynomial.var(n + i, nv, shift) for i in range(n)]
        big = WittContext(p, n)
        xs = WittVector(big, X)
        ys = WittVector(big, Y)
        phi = frobenius_lift
        lhs_add = phi(xs + ys)
        rhs_add = phi(xs) + phi(ys)
        lhs_mul = phi(xs * ys)
        rhs_mul = phi(xs) * phi(ys)
        U = [c.exact_div(p) for c in witt_sub(lhs_add, rhs_add).entries]
        Up = [c.exact_div(p) for c in witt_sub(lhs_mul, rhs_mul).entries]
        if sum(len(u) for u in U + Up) > max_terms:
            raise TooLarge("carry polynomials exceed the term budget")
        self._carry = (U, Up)
        return self._carry

    def __repr__(self) -> str:
        return f"WittContext(p={self.p}, n={self.n})"


class WittVector:
    """A length-``n`` Witt vector; entries share one coefficient ring."""

    __slots__ = ("ctx", "entries")

    def __init__(self, ctx: WittContext, entries: list):
        self.ctx = ctx
        self.entries = entries

    def _check(self, other: "WittVector") -> None:
        if not isinstance(other, WittVector):
            raise TypeError("expected a Witt vector")
        if other.ctx is not self.ctx:
            raise ContextMismatch("Witt vectors come from different contexts")
        a, b = self.entries[0], other.entries[0]
        if isinstance(a, LFElement) and isinstance(b, LFElement) and a.field is not b.field:
            raise ContextMismatch("Witt vectors have different coefficient rings")

    def _apply(self, op: str, other: "WittVector") -> "WittVector":
        self._check(other)
        polys = self.ctx._polys(op)
        values = list(self.entries) + list(other.entries)
        template = self.entries[0]
        return WittVector(self.ctx, [_evaluate(q, values, template) for q in polys])

    def __add__(self, other):
        return self._apply("add", other)

    def __mul__(self, other):
        if isinstance(other, int):
            return self._apply("mul", self.ctx.integer(other, self.entries[0]))
        return self._apply("mul", other)

    __rmul__ = __mul__

    def __sub__(self, other):
        return witt_sub(self, other)

    def __neg__(self):
        return witt_sub(self.ctx.zero(self.entries[0]), self)

    def __pow__(self, k: int):
        result = self.ctx.one(self.entries[0])
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def ghost(self) -> list:
        return ghost_components(self)

    def map(self, fn) -> "WittVector":
        return WittVector(self.ctx, [fn(x) for x in self.entries])

    def is_zero(self) -> bool:
        return all(_is_zero_at_prec(x) for x in self.entries)

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        self._check(other)
        return all(_is_zero_at_prec(a - b) for a, b in zip(self.entries, other.entries))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"WittVector(p={self.ctx.p}, {self.entries!r})"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def witt_add(x: WittVector, y: WittVector) -> WittVector:
    return x + y


def witt_mul(x: WittVector, y: WittVector) -> WittVector:
    return x * y


def witt_sub(x: WittVector, y: WittVector) -> WittVector:
    x._check(y)
    if x.ctx.p != 2:
        neg = WittVector(y.ctx, [-c for c in y.entries])
        return x + neg
    return x._apply("sub", y)


def teichmuller(a, ctx: WittContext) -> WittVector:
    return ctx.teichmuller(a)


def frobenius_lift(x: WittVector) -> WittVector:
    """The lift ``Phi_i = X_i^p`` of the Frobenius."""
    p = x.ctx.p
    return WittVector(x.ctx, [c ** p for c in x.entries])


def verschiebung(x: WittVector, k: int = 1) -> WittVector:
    z = _from_int(x.entries[0], 0)
    n = x.ctx.n
    return WittVector(x.ctx, ([z] * k + list(x.entries))[:n])


def ghost_components(x: WittVector) -> list:
    p = x.ctx.p
    out = []
    for k in range(x.ctx.n):
        acc = _from_int(x.entries[0], 0)
        for i in range(k + 1):
            acc = acc + (x.entries[i] ** (p ** (k - i))) * (p ** i)
        out.append(acc)
    return out


def from_ghost(ctx: WittContext, ghosts: Sequence[Fraction | int]) -> list[Fraction]:
    """Invert the ghost map over the rationals."""
    p = ctx.p
    comps: list[Fraction] = []
    for k, g in enumerate(ghosts):
        s = Fraction(g) - sum(Fraction(p) ** i * comps[i] ** (p ** (k - i)) for i in range(k))
        comps.append(s / p ** k)
    return comps


def witt_divide(w: WittVector, x: WittVector) -> WittVector:
    """Exact quotient ``z`` with ``x * z = w`` in ``W_n(O_F)``.

    Solves ``z_k = (w_k - P_k(x, (z_0..z_{k-1}, 0..))) / ghost_k(x)``.
    """
    w._check(x)
    ctx = x.ctx
    n = ctx.n
    zero = _from_int(w.entries[0], 0)
    gx = ghost_components(x)
    z = [zero] * n
    prods = ctx._polys("mul")
    for k in range(n):
        partial = _evaluate(prods[k], list(x.entries) + z, zero)
        num = w.entries[k] - partial
        g = gx[k]
        if isinstance(g, LFElement):
            try:
                z[k] = num.divide(g)
            except ValueError as exc:
                raise NotDivisible(f"entry {k} is not divisible") from exc
        else:
            q = Fraction(num) / Fraction(g)
            if q.denominator != 1 and not isinstance(num, Fraction):
                raise NotDivisible(f"entry {k} is not divisible")
            z[k] = q if isinstance(num, Fraction) else int(q)
    return WittVector(ctx, z)


def witt_inverse(x: WittVector) -> WittVector:
    return witt_divide(x.ctx.one(x.entries[0]), x)


def _truncate(w: WittVector, digits: int) -> WittVector:
    return WittVector(w.ctx, [c.with_prec(digits) for c in w.entries])


def ideal_divide(w: WittVector, x: WittVector, r: int | None = None,
                 digits: int | None = None, require_maximal: bool = True) -> WittVector:
    """Divide ``w`` by ``x`` with quotient in ``W_n(m_F)``, modulo ``W_n(pi^digits)``.

    Entry ``i`` of the quotient is found assuming entries below ``i``: the
    ``i``-th entry of ``x * V^i(y_i)`` equals ``ghost_i(x) * y_i``, so
    ``y_i = w_i / ghost_i(x)``, after which ``x * V^i(y_i)`` is removed.

    Args:
        w: dividend with ``LFElement`` entries.
        x: divisor, typically ``([zeta_{p^n}] - 1)^r``.
        r: when given (and ``digits`` is not), the quotient ring is
            ``O_F / b_F`` with ``b_F = {v > e_F r / (p - 1)}``.
        digits: explicit modulus ``pi_F^digits`` for the coefficient ring.
        require_maximal: demand every quotient entry lie in ``m_F``.

    Raises:
        NotDivisible: an entry valuation is too small.
        PrecisionLoss: divisibility is indeterminate at the working precision.
    """
    w._check(x)
    F = w.entries[0].field
    if digits is None:
        if r is not None:
            digits = b_digits(F, r)
        else:
            digits = min(c.prec for c in w.entries)
    res = _truncate(w, digits)
    gx = ghost_components(x)
    ctx = w.ctx
    ys = []
    for i in range(ctx.n):
        wi = res.entries[i]
        g = gx[i]
        if wi.is_zero():
            yi = F.zero()
        else:
            vw = wi.val_lower()
            vg = g.valuation()
            need = vg + (1 if require_maximal else 0)
            if vw < need:
                raise NotDivisible(f"entry {i} has valuation {vw} < {need}")
            yi = wi.divide(g)
            yi = yi.canonical()
        ys.append(yi)
        if yi.is_zero():
            continue
        res = _truncate(res - x * verschiebung(ctx.teichmuller(yi), i), digits)
        if not res.entries[i].is_zero():  # pragma: no cover - arithmetic invariant
            raise PrecisionLoss("residual entry did not vanish")
    return WittVector(ctx, ys)


def ideal_membership(w: WittVector, x: WittVector, digits: int) -> bool | None:
    """Three-valued test of ``w`` in ``x W_n(m_F) + W_n(pi^digits)``.

    Returns ``None`` when entries of ``w`` are not known precisely enough
    to decide.  ``False`` is only returned on a certified obstruction.
    """
    try:
        ideal_divide(w, x, digits=digits)
    except NotDivisible:
        return False
    except (PrecisionLoss, ValueError):
        return None
    if min(c.prec for c in w.entries) >= digits:
        return True
    return None


def b_digits(F: LocalField, r: int) -> int:
    """Number of uniformiser digits kept in ``O_F / b_F``."""
    return (F.e * r) // (F.p - 1) + 1


# ---------------------------------------------------------------------------
# the quotient rings
# ---------------------------------------------------------------------------

def _find_base(F: LocalField) -> LocalField:
    for G in F.ancestors():
        if hasattr(G, "eis_coeffs"):
            return G
    raise MissingRoots("the tower has no base field with an Eisenstein presentation")


class QuotientRingA:
    """The ring ``W_n(O_F/b_F) / ([zeta_{p^n}] - 1)^r W_n(m_F/b_F)``.

    Elements are Witt vectors with ``LFElement`` entries truncated to
    ``b_digits(F, r)`` uniformiser digits.  The structure maps
    ``u -> [pi_n]``, ``Y -> -a v^{-1} E([pi_n])^{p-1}`` and ``c`` are
    computed in ``W_n(O_F)`` at the field's working precision.
    """

    def __init__(self, n: int, F: LocalField, r: int):
        p = F.p
        if not 0 <= r <= p - 2:
            raise ValueError("r must lie in 0..p-2")
        pi_name = f"pi_{n}"
        zeta_name = f"zeta_{p ** (n + 1)}"
        missing = [nm for nm in (pi_name, zeta_name) if not F.has_name(nm)]
        if missing:
            raise MissingRoots(f"field lacks {', '.join(missing)}")
        self.n = n
        self.F = F
        self.r = r
        self.p = p
        self.K = _find_base(F)
        self.E = list(self.K.eis_coeffs)
        self.ctx = WittContext(p, n)
        self.digits = b_digits(F, r)
        self.pi_n = F.named(pi_name)
        self.zeta = F.named(zeta_name)
        self.zeta_pn = self.zeta ** p
        one = F.one()
        self.x = (self.ctx.teichmuller(self.zeta_pn) - self.ctx.one(one)) ** r
        self._structure: dict | None = None

    # -- elements -----------------------------------------------------------------
    def reduce(self, w: WittVector) -> WittVector:
        return _truncate(w, self.digits)

    def element(self, entries) -> WittVector:
        return self.reduce(self.ctx.vector([self.F.coerce(c) for c in entries]))

    def teichmuller(self, a) -> WittVector:
        return self.reduce(self.ctx.teichmuller(self.F.coerce(a)))

    def zero(self) -> WittVector:
        return self.reduce(self.ctx.zero(self.F.one()))

    def one(self) -> WittVector:
        return self.reduce(self.ctx.one(self.F.one()))

    def integer(self, k: int) -> WittVector:
        return self.reduce(self.ctx.integer(k, self.F.one()))

    def is_zero(self, w: WittVector) -> bool:
        try:
            ideal_divide(w, self.x, digits=self.digits)
        except NotDivisible:
            return False
        return True

    def equal(self, a: WittVector, b: WittVector) -> bool:
        return self.is_zero(a - b)

    def normal_form(self, w: WittVector) -> WittVector:
        """Unique representative: entry ``i`` truncated to ``v(ghost_i(x)) + 1`` digits."""
        F = self.F
        gx = ghost_components(self.x)
        res = self.reduce(w)
        for i in range(self.n):
            keep = int(gx[i].valuation()) + 1
            wi = res.entries[i]
            low = wi.canonical(keep)
            high = wi - low
            if not high.is_zero():
                yi = high.divide(gx[i])
                res = self.reduce(res - self.x * verschiebung(self.ctx.teichmuller(yi), i))
            res.entries[i] = F.element(res.entries[i].canonical(keep).data, self.digits)
        return res

    def key(self, w: WittVector) -> tuple:
        """Hashable form of :meth:`normal_form`."""
        gx = ghost_components(self.x)
        nf = self.normal_form(w)
        return tuple(tuple(c.digits(int(gx[i].valuation()) + 1))
                     for i, c in enumerate(nf.entries))

    def frobenius(self, w: WittVector) -> WittVector:
        return self.reduce(frobenius_lift(w))

    # -- structure ---------------------------------------------------------------
    def structure(self) -> dict:
        """Lifts in ``W_n(O_F)`` of the images of ``u``, ``E(u)``, ``Y`` and ``c``."""
        if self._structure is not None:
            return self._structure
        ctx, F, p = self.ctx, self.F, self.p
        one = F.one()
        u = ctx.teichmuller(self.pi_n)
        E = self.E
        gamma = ctx.zero(one)
        upow = ctx.one(one)
        for a in E:
            if a:
                gamma = gamma + ctx.integer(a, one) * upow
            upow = upow * u
        tz = ctx.teichmuller(self.zeta)
        t = ctx.zero(one)
        tk = ctx.one(one)
        for _ in range(p):
            t = t + tk
            tk = tk * tz
        v = witt_divide(t, gamma)
        if p == 2:
            a_hat = ctx.integer(-1, one)
        else:
            a_hat = ctx.zero(one)
            for k in range(1, p - 1):
                coeff = ((-1) ** (p - 1 - k) * comb(p - 1, k) - 1) // p
                if coeff:
                    a_hat = a_hat + ctx.integer(coeff, one) * ctx.teichmuller(self.zeta ** k)
        v_inv = witt_inverse(v)
        Y = -(a_hat * v_inv * gamma ** (p - 1))
        delta = delta_coefficients(E, p)
        d_img = ctx.zero(one)
        upow = ctx.one(one)
        for dk in delta:
            if dk:
                d_img = d_img + ctx.integer(dk, one) * upow
            upow = upow * u
        c = Y + d_img
        self._structure = {"u": u, "gamma": gamma, "t": t, "v": v, "a": a_hat, "Y": Y, "c": c}
        return self._structure

    def fil_contains(self, w: WittVector) -> bool:
        """Membership in ``Fil^r = E([pi_n])^r`` of the quotient."""
        if self.r == 0:
            return True
        gamma_r = self.structure()["gamma"] ** self.r
        try:
            self.fil_divide(w, gamma_r)
        except NotDivisible:
            return False
        return True

    def fil_divide(self, w: WittVector, divisor: WittVector) -> WittVector:
        return witt_divide(w, divisor)

    def __repr__(self) -> str:
        return f"<QuotientRingA n={self.n} r={self.r} digits={self.digits} over {self.F}>"


def delta_coefficients(E: Sequence[int], p: int) -> list[int]:
    """Integer coefficients of ``(E(u^p) - E(u)^p) / p``."""
    deg = len(E) - 1
    Ep = [0] * (deg * p + 1)
    for i, a in enumerate(E):
        Ep[i * p] += a
    power = [1]
    for _ in range(p):
        nxt = [0] * (len(power) + deg)
        for i, a in enumerate(power):
            for j, b in enumerate(E):
                nxt[i + j] += a * b
        power = nxt
    out = []
    for a, b in zip(Ep, power):
        q, r = divmod(a - b, p)
        if r:
            raise ArithmeticError("delta is not integral")
        out.append(q)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def quotient_ring_A(n: int, F: LocalField, r: int) -> QuotientRingA:
    return QuotientRingA(n, F, r)


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def vector_to_json(w: WittVector) -> dict:
    from .localfield import element_to_json

    def enc(c):
        if isinstance(c, LFElement):
            return element_to_json(c)
        return str(c)

    return {"p": w.ctx.p, "n": w.ctx.n, "entries": [enc(c) for c in w.entries]}


def vector_from_json(doc: dict, F: LocalField | None = None) -> WittVector:
    from .localfield import element_from_json

    ctx = WittContext(int(doc["p"]), int(doc["n"]))
    if F is None:
        return ctx.vector([int(c) for c in doc["entries"]])
    return ctx.vector([element_from_json(F, c) for c in doc["entries"]])


__all__ = [
    "Polynomial", "WittContext", "WittVector", "QuotientRingA",
    "universal_polynomials", "witt_add", "witt_mul", "witt_sub", "witt_divide", "witt_inverse",
    "teichmuller", "frobenius_lift", "verschiebung", "ghost_components", "from_ghost",
    "ideal_divide", "ideal_membership", "b_digits", "quotient_ring_A", "delta_coefficients",
    "vector_to_json", "vector_from_json",
]
