"""Torsion phi-modules and their points in the quotient rings.

A module of rank ``d`` is described by an adapted basis ``f_1..f_d``, the
filtration generators ``alpha_i = sum_j A_{ji} f_j`` (``A = diag(u^{r_i})``
in the adapted form) and the Frobenius matrix ``G`` with
``phi_r(alpha_i) = sum_j G_{ji} f_j``.  With ``e_i = phi_r(alpha_i)`` the
filtration generators read ``alpha = e C`` for ``C = G^{-1} A``.

Points over ``F`` correspond to tuples ``z`` in ``W_n(O_F)^d`` solving
``gamma^r z_i = c^r sum_j C_{ji} Phi(z_j)``, with ``x_i = c^r Phi(z_i)``.
The solver searches ``z`` digit by digit, pruning a branch as soon as the
residual provably leaves the kernel ideal of the quotient ring, then
deduplicates the surviving points in the quotient and lifts each one by
the contraction ``x <- c^r Phi(C x / gamma^r)``.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Sequence

from .errors import (
    BadExponent,
    BadShape,
    BudgetExceeded,
    NotFound,
    PrecisionInsufficient,
    SchemaError,
    UnsupportedPresentation,
)
from .localfield import (
    EISENSTEIN,
    UNRAMIFIED,
    Automorphism,
    LFElement,
    LocalField,
    adjoin_root,
    field_from_json,
    make_field,
    tower_F_n,
)
from .ramification import BreakDatum, bound_value, break_F_n, fraction_text
from .witt import (
    QuotientRingA,
    WittVector,
    frobenius_lift,
    ideal_membership,
    quotient_ring_A,
    witt_divide,
    witt_inverse,
)

DEFAULT_SOLVER_BUDGET = 100_000


def solver_budget(default: int = DEFAULT_SOLVER_BUDGET) -> int:
    raw = os.environ.get("RAMLOCK_BUDGET")
    return int(raw) if raw else default


# ---------------------------------------------------------------------------
# coefficient ring
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SigmaEntry:
    """Polynomial in ``u`` and ``Y`` with integer coefficients, keyed by ``(i, j)``."""

    terms: tuple[tuple[tuple[int, int], int], ...]

    @classmethod
    def parse(cls, value) -> "SigmaEntry":
        if isinstance(value, SigmaEntry):
            return value
        if isinstance(value, int):
            return cls((((0, 0), value),) if value else ())
        text = str(value).strip()
        try:
            return cls((((0, 0), int(text)),) if int(text) else ())
        except ValueError:
            pass
        import sympy

        u, Y = sympy.symbols("u Y")
        try:
            expr = sympy.sympify(text, locals={"u": u, "Y": Y})
            poly = sympy.Poly(sympy.expand(expr), u, Y)
        except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
            raise SchemaError(f"cannot parse coefficient {text!r}") from exc
        terms = []
        for (i, j), c in poly.terms():
            if not c.is_integer:
                raise SchemaError(f"coefficient {text!r} has non-integral terms")
            terms.append(((int(i), int(j)), int(c)))
        return cls(tuple(sorted(terms)))

    def constant_term(self) -> int:
        return dict(self.terms).get((0, 0), 0)

    def is_zero(self) -> bool:
        return not self.terms

    def text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in self.terms:
            mon = "*".join(x for x in (
                ("u" if i == 1 else f"u**{i}") if i else "",
                ("Y" if j == 1 else f"Y**{j}") if j else "") if x)
            parts.append(str(c) if not mon else (mon if c == 1 else f"{c}*{mon}"))
        return " + ".join(parts)


class SigmaTrunc:
    """Evaluation of coefficient-ring entries in ``W_n(O_F)``.

    ``u`` maps to ``[pi_n]`` and ``Y`` to ``-a v^{-1} E([pi_n])^{p-1}``;
    integers map to Witt integers.
    """

    def __init__(self, A: QuotientRingA):
        self.A = A
        self.structure = A.structure()
        self._upow: dict[int, WittVector] = {}
        self._ypow: dict[int, WittVector] = {}

    def _power(self, cache: dict, base: WittVector, k: int) -> WittVector:
        hit = cache.get(k)
        if hit is None:
            ctx = self.A.ctx
            hit = ctx.one(self.A.F.one()) if k == 0 else self._power(cache, base, k - 1) * base
            cache[k] = hit
        return hit

    def evaluate(self, entry: SigmaEntry) -> WittVector:
        ctx = self.A.ctx
        one = self.A.F.one()
        acc = ctx.zero(one)
        for (i, j), c in entry.terms:
            term = self._power(self._upow, self.structure["u"], i) * self._power(self._ypow, self.structure["Y"], j)
            acc = acc + ctx.integer(c, one) * term
        return acc

    @property
    def c(self) -> WittVector:
        return self.structure["c"]

    @property
    def gamma(self) -> WittVector:
        return self.structure["gamma"]


# ---------------------------------------------------------------------------
# modules
# ---------------------------------------------------------------------------

@dataclass
class TorsionPhiModule:
    """Rank-``d`` module killed by ``p^n`` with weights in ``[0, r]``.

    Attributes:
        G: Frobenius matrix, ``phi_r(alpha_i) = sum_j G[j][i] f_j``.
        fil: filtration matrix ``A``, ``alpha_i = sum_j A[j][i] f_j``.
        fil_exponents: the ``r_i`` of the adapted form, when given.
    """

    d: int
    n: int
    r: int
    p: int
    e: int
    G: list[list[SigmaEntry]]
    fil: list[list[SigmaEntry]]
    fil_exponents: list[int] | None = None
    relations: list[list[SigmaEntry]] = field(default_factory=list)
    K: LocalField | None = None
    name: str = "module"
    towers: list[dict] = field(default_factory=list)

    def base_field(self, precision: int = 8) -> LocalField:
        if self.K is None:
            self.K = make_field(self.p, 1, [-self.p] + [0] * (self.e - 1) + [1], precision)
        return self.K

    @property
    def target_count(self) -> int:
        return self.p ** (self.n * self.d)


def _matrix(raw, d: int, what: str) -> list[list[SigmaEntry]]:
    if not isinstance(raw, (list, tuple)) or len(raw) != d or any(
            not isinstance(row, (list, tuple)) or len(row) != d for row in raw):
        raise BadShape(f"{what} must be a {d}x{d} matrix")
    return [[SigmaEntry.parse(c) for c in row] for row in raw]


def _det_mod_p(M: list[list[int]], p: int) -> int:
    M = [[x % p for x in row] for row in M]
    n = len(M)
    det = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det = det * M[col][col] % p
        inv = pow(M[col][col], -1, p)
        for r in range(col + 1, n):
            f = M[r][col] * inv % p
            if f:
                M[r] = [(a - f * b) % p for a, b in zip(M[r], M[col])]
    return det % p


def make_module(d: int, n: int, C, r: int, fil_exponents: Sequence[int] | None = None,
                fil_matrix=None, p: int = 3, e: int = 1, relations=None,
                K: LocalField | None = None, name: str = "module",
                towers: list | None = None) -> TorsionPhiModule:
    """Validate and build a module description.

    Raises:
        BadShape: wrong matrix shapes or ``G`` not invertible modulo ``(u, p)``.
        BadExponent: an exponent outside ``[0, e r]`` or ``r`` outside ``[0, p-2]``.
    """
    if d < 1 or n < 1:
        raise BadShape("rank and level must be positive")
    if n > 2:
        raise UnsupportedPresentation("the solver handles levels n = 1 and n = 2")
    if not 0 <= r <= p - 2:
        raise BadExponent(f"r must lie in 0..{p - 2}")
    G = _matrix(C, d, "C")
    if (fil_exponents is None) == (fil_matrix is None):
        raise BadShape("give exactly one of fil_exponents and fil_matrix")
    if fil_exponents is not None:
        exps = [int(x) for x in fil_exponents]
        if len(exps) != d:
            raise BadShape("fil_exponents must have length d")
        for x in exps:
            if not 0 <= x <= e * r:
                raise BadExponent(f"exponent {x} outside [0, {e * r}]")
        A = [[SigmaEntry((((exps[i], 0), 1),)) if i == j else SigmaEntry(()) for i in range(d)]
             for j in range(d)]
    else:
        exps = None
        A = _matrix(fil_matrix, d, "fil_matrix")
    if _det_mod_p([[G[i][j].constant_term() for j in range(d)] for i in range(d)], p) == 0:
        raise BadShape("the image of phi_r does not generate: C is singular modulo (u, p)")
    rel = []
    for row in relations or []:
        if len(row) != d:
            raise BadShape("relations must have d entries")
        rel.append([SigmaEntry.parse(c) for c in row])
    if K is not None and (K.p != p or K.e != e):
        raise BadShape("module parameters disagree with the base field")
    return TorsionPhiModule(d, n, r, p, e, G, A, exps, rel, K, name, list(towers or []))


def module_from_json(doc: dict, precision: int | None = None) -> TorsionPhiModule:
    validate_module_json(doc)
    K = None
    if "field" in doc:
        fdoc = dict(doc["field"])
        if precision is not None:
            fdoc["precision"] = precision
        K = field_from_json(fdoc)
    p = int(doc.get("p", K.p if K else 3))
    e = int(doc.get("e", K.e if K else 1))
    if K is None and precision is not None:
        K = make_field(p, 1, [-p] + [0] * (e - 1) + [1], precision)
    return make_module(int(doc["d"]), int(doc["n"]), doc["C"], int(doc["r"]),
                       fil_exponents=doc.get("fil_exponents"), fil_matrix=doc.get("fil_matrix"),
                       p=p, e=e, relations=doc.get("relations"), K=K,
                       name=str(doc.get("name", "module")), towers=doc.get("towers"))


def module_to_json(M: TorsionPhiModule) -> dict:
    doc: dict = {"name": M.name, "d": M.d, "n": M.n, "r": M.r, "p": M.p, "e": M.e,
                 "C": [[c.text() for c in row] for row in M.G]}
    if M.fil_exponents is not None:
        doc["fil_exponents"] = list(M.fil_exponents)
    else:
        doc["fil_matrix"] = [[c.text() for c in row] for row in M.fil]
    if M.relations:
        doc["relations"] = [[c.text() for c in row] for row in M.relations]
    if M.towers:
        doc["towers"] = M.towers
    return doc


def _schema(name: str) -> dict:
    return json.loads(resources.files("ramlock").joinpath("schemas").joinpath(name).read_text())


def validate_module_json(doc) -> None:
    import jsonschema

    try:
        jsonschema.validate(doc, _schema("module.schema.json"))
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"module description: {exc.message}") from exc


def bundled_modules() -> list[str]:
    folder = resources.files("ramlock").joinpath("data")
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))


def load_bundled(name: str, precision: int | None = None) -> TorsionPhiModule:
    path = resources.files("ramlock").joinpath("data").joinpath(f"{name}.json")
    if not path.is_file():
        raise SchemaError(f"no bundled module named {name!r}")
    return module_from_json(json.loads(path.read_text()), precision)


# ---------------------------------------------------------------------------
# candidate towers
# ---------------------------------------------------------------------------

def build_tower(K: LocalField, n: int, desc: dict | str) -> LocalField:
    """Build ``F_n`` followed by the listed adjunctions.

    ``desc`` is ``"F_n"`` or ``{"adjoin": [[coefficients...], ...], "names": [...]}``.
    """
    F = tower_F_n(K, n)
    if isinstance(desc, str):
        if desc != "F_n":
            raise SchemaError(f"unknown tower {desc!r}")
        return F
    names = list(desc.get("names", []))
    for k, coeffs in enumerate(desc.get("adjoin", [])):
        nm = names[k] if k < len(names) else f"w_{k}"
        F = adjoin_root(F, [int(c) for c in coeffs], name=nm, label=nm)
    return F


def curated_towers(p: int) -> list:
    """Default candidates: ``F_n`` and its unramified quadratic extension."""
    from .localfield import _smallest_irreducible_mod_p

    quad = _smallest_irreducible_mod_p(p, 2)
    name = "i" if list(quad) == [1, 0, 1] else "w"
    return ["F_n", {"adjoin": [list(quad)], "names": [name]}]


def tower_label(desc: dict | str) -> str:
    if isinstance(desc, str):
        return desc
    names = desc.get("names", [])
    return "F_n(" + ", ".join(names) + ")" if names else "F_n"


# ---------------------------------------------------------------------------
# solving
# ---------------------------------------------------------------------------

@dataclass
class SolutionSet:
    """Points of a module over ``F``.

    Attributes:
        tuples: reduced tuples in the quotient ring (normal forms).
        keys: hashable encodings of ``tuples``, sorted.
        lifts: the unique lifts in ``W_n(O_F)``.
        schedules: valuations of successive lift corrections, per tuple.
        galois_orbits: orbits under the automorphisms given to :func:`orbits`.
    """

    module: TorsionPhiModule
    field: LocalField
    ring: QuotientRingA
    tuples: list[list[WittVector]]
    keys: list[tuple]
    lifts: list[list[WittVector]]
    schedules: list[list[int]]
    nodes: int = 0
    galois_orbits: list[list[int]] | None = None

    def __len__(self) -> int:
        return len(self.tuples)

    def index_of(self, xbar: Sequence[WittVector]) -> int:
        key = tuple(self.ring.key(x) for x in xbar)
        return self.keys.index(key)

    def to_json(self) -> dict:
        def enc(key):
            return [[["".join(str(d) for d in digit) for digit in entry] for entry in comp] for comp in key]

        return {"count": len(self.tuples), "target": self.module.target_count,
                "field": {"e": self.field.e, "residue_degree": self.field.m,
                          "degree": self.field.degree, "label": self.field.label},
                "tuples": [enc(k) for k in self.keys],
                "orbits": self.galois_orbits}


class _Equations:
    """Residual ``R_i(z) = gamma^r z_i - c^r sum_j C_{ji} Phi(z_j)`` and the point map."""

    def __init__(self, M: TorsionPhiModule, A: QuotientRingA):
        self.M = M
        self.A = A
        sig = SigmaTrunc(A)
        self.sigma = sig
        d = M.d
        Ghat = [[sig.evaluate(M.G[i][j]) for j in range(d)] for i in range(d)]
        Ahat = [[sig.evaluate(M.fil[i][j]) for j in range(d)] for i in range(d)]
        Ginv = _witt_matrix_inverse(Ghat)
        self.C = [[_dot([Ginv[j][k] for k in range(d)], [Ahat[k][i] for k in range(d)], A)
                   for i in range(d)] for j in range(d)]
        self.gamma_r = sig.gamma ** M.r
        self.c_r = sig.c ** M.r
        self.rel = [[sig.evaluate(s) for s in row] for row in M.relations]

    def combos(self, xs: Sequence[WittVector]) -> list[WittVector]:
        d = self.M.d
        return [_dot([self.C[j][i] for j in range(d)], xs, self.A) for i in range(d)]

    def points(self, zs: Sequence[WittVector]) -> list[WittVector]:
        return [self.c_r * frobenius_lift(z) for z in zs]

    def residuals(self, zs: Sequence[WittVector]) -> list[WittVector]:
        xs = self.points(zs)
        comb = self.combos(xs)
        return [self.gamma_r * z - cz for z, cz in zip(zs, comb)]

    def step(self, xs: Sequence[WittVector]) -> list[WittVector]:
        ws = [witt_divide(cx, self.gamma_r) for cx in self.combos(xs)]
        return self.points(ws)


def _dot(a: Sequence[WittVector], b: Sequence[WittVector], A: QuotientRingA) -> WittVector:
    acc = A.ctx.zero(A.F.one())
    for x, y in zip(a, b):
        acc = acc + x * y
    return acc


def _witt_matrix_inverse(Mx: list[list[WittVector]]) -> list[list[WittVector]]:
    d = len(Mx)
    ctx = Mx[0][0].ctx
    one = Mx[0][0].entries[0].field.one()
    aug = [list(row) + [ctx.one(one) if i == j else ctx.zero(one) for j in range(d)]
           for i, row in enumerate(Mx)]
    for col in range(d):
        piv = next((r for r in range(col, d) if aug[r][col].entries[0].val_lower() == 0
                    and not aug[r][col].entries[0].is_zero()), None)
        if piv is None:
            raise BadShape("Frobenius matrix is not invertible over the quotient")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = witt_inverse(aug[col][col])
        aug[col] = [x * inv for x in aug[col]]
        for r in range(d):
            if r != col:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[d:] for row in aug]


def _status(eq: _Equations, zs: list[WittVector]) -> bool | None:
    A = eq.A
    verdict: bool | None = True
    for R in eq.residuals(zs):
        m = ideal_membership(R, A.x, A.digits)
        if m is False:
            return False
        if m is None:
            verdict = None
    return verdict


def _determined(xs: Sequence[WittVector], digits: int) -> bool:
    return all(c.prec >= digits for x in xs for c in x.entries)


def solve_points(M: TorsionPhiModule, F: LocalField, precision: int | None = None,
                 budget: int | None = None, lift: bool = True) -> SolutionSet:
    """Enumerate the points of ``M`` with values in the quotient ring over ``F``.

    Raises:
        BudgetExceeded: the search tree exceeds ``budget`` nodes.
        PrecisionInsufficient: a branch cannot be decided at the working
            precision, or a lift fails to contract.
    """
    budget = solver_budget() if budget is None else budget
    A = quotient_ring_A(M.n, F, M.r)
    eq = _Equations(M, A)
    ctx = A.ctx
    d, n = M.d, M.n
    reps = F.residue_reps()
    pi = F.uniformizer()
    max_depth = max(A.digits + 2, F.cap // 2)
    found: dict[tuple, list[WittVector]] = {}
    nodes = 0
    # each node: flat digit values for d*n entries, depth k, pi^k
    stack: list[tuple[list[LFElement], int, LFElement]] = [([F.zero()] * (d * n), 0, F.one())]
    while stack:
        vals, k, power = stack.pop()
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"solver exceeded the budget of {budget} nodes", len(found))
        zs = [ctx.vector([vals[i * n + t].with_prec(k) for t in range(n)]) for i in range(d)]
        status = _status(eq, zs)
        if status is False:
            continue
        if status is True and _determined(eq.points(zs), A.digits):
            exact = [ctx.vector([vals[i * n + t] for t in range(n)]) for i in range(d)]
            if _status(eq, exact) is not True:  # pragma: no cover - implied by the branch status
                raise PrecisionInsufficient("exact seed failed verification")
            xbar = [A.reduce(x) for x in eq.points(exact)]
            if eq.rel and not _relations_hold(eq, xbar):
                continue
            key = tuple(A.key(x) for x in xbar)
            found.setdefault(key, [A.normal_form(x) for x in xbar])
            continue
        if k >= max_depth:
            raise PrecisionInsufficient("search depth exhausted before the branch was decided")
        nxt = power * pi
        for combo in _digit_combos(reps, d * n):
            stack.append(([v + r * power for v, r in zip(vals, combo)], k + 1, nxt))
    keys = sorted(found)
    tuples = [found[k] for k in keys]
    lifts: list[list[WittVector]] = []
    schedules: list[list[int]] = []
    if lift:
        for xbar in tuples:
            xs, sched = lift_point(eq, xbar)
            lifts.append(xs)
            schedules.append(sched)
    return SolutionSet(M, F, A, tuples, keys, lifts, schedules, nodes)


def _digit_combos(reps: list[LFElement], k: int):
    if k == 0:
        yield ()
        return
    for head in reps:
        for tail in _digit_combos(reps, k - 1):
            yield (head,) + tail


def _relations_hold(eq: _Equations, xbar: Sequence[WittVector]) -> bool:
    A = eq.A
    for row in eq.rel:
        if not A.is_zero(_dot(row, xbar, A)):
            return False
    return True


def _exact_copy(w: WittVector) -> WittVector:
    F = w.entries[0].field
    return w.map(lambda c: F.element(c.data))


def lift_point(eq: _Equations, xbar: Sequence[WittVector], initial: Sequence[WittVector] | None = None,
               max_iter: int | None = None) -> tuple[list[WittVector], list[int]]:
    """Unique lift of a point to ``W_n(O_F)`` by the contraction iteration.

    Each step must strictly raise the valuation of the correction;
    otherwise ``PrecisionInsufficient`` is raised.
    """
    A = eq.A
    F = A.F
    xs = [_exact_copy(x) for x in (initial if initial is not None else xbar)]
    schedule: list[int] = []
    limit = max_iter if max_iter is not None else 4 * F.cap
    for _ in range(limit):
        new = eq.step(xs)
        diffs = [a - b for a, b in zip(new, xs)]
        entries = [c for w in diffs for c in w.entries]
        prec = min(c.prec for w in new for c in w.entries)
        if all(c.is_zero() for c in entries):
            xs = new
            break
        v = min(c.val_lower() for c in entries if not c.is_zero())
        if schedule and v <= schedule[-1]:
            raise PrecisionInsufficient(
                f"correction valuation did not increase ({schedule[-1]} -> {v})")
        if not schedule and v < A.digits and initial is None:
            raise PrecisionInsufficient("initial lift is not a point of the quotient")
        schedule.append(v)
        xs = new
        if v >= prec:
            break
    else:
        raise PrecisionInsufficient("lift did not converge within the iteration limit")
    for x, xb in zip(xs, xbar):
        if not A.equal(A.reduce(x), xb):
            raise PrecisionInsufficient("lift does not reduce to the given point")
    return xs, schedule


def count_points(M: TorsionPhiModule, F: LocalField, budget: int | None = None) -> int:
    return len(solve_points(M, F, budget=budget, lift=False))


def perturbed_lift(S: SolutionSet, index: int, rng: random.Random) -> list[WittVector]:
    """Lift of a point shifted by ``([zeta_{p^n}] - 1)^r`` times a random element of ``W_n(m_F)``."""
    A = S.ring
    F = S.field
    out = []
    for x in S.tuples[index]:
        noise = A.ctx.vector([_random_maximal(F, rng) for _ in range(A.n)])
        out.append(_exact_copy(x) + A.x * noise)
    return out


def _random_maximal(F: LocalField, rng: random.Random) -> LFElement:
    pi = F.uniformizer()
    reps = F.residue_reps()
    acc = F.zero()
    power = pi
    for _ in range(F.cap // 4):
        acc = acc + rng.choice(reps) * power
        power = power * pi
    return F.element(acc.data)


# ---------------------------------------------------------------------------
# Galois action and cut-out extensions
# ---------------------------------------------------------------------------

def galois_action(S: SolutionSet, sigma: Automorphism) -> list[int]:
    """Permutation of the points induced by an automorphism of ``F`` over ``F_n``."""
    if sigma.F is not S.field:
        from .errors import NotAnAutomorphism

        raise NotAnAutomorphism("automorphism acts on a different field")
    A = S.ring
    perm = []
    source = S.lifts if S.lifts else S.tuples
    for tup in source:
        image = [A.reduce(x.map(sigma)) for x in tup]
        key = tuple(A.key(x) for x in image)
        if key not in S.keys:
            raise PrecisionInsufficient("image of a point is not among the points")
        perm.append(S.keys.index(key))
    return perm


def orbits(S: SolutionSet, automorphisms: Sequence[Automorphism]) -> list[list[int]]:
    parent = list(range(len(S)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for sigma in automorphisms:
        for i, j in enumerate(galois_action(S, sigma)):
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for i in range(len(S)):
        groups.setdefault(find(i), []).append(i)
    S.galois_orbits = sorted(groups.values())
    return S.galois_orbits


def _find_F_n(F: LocalField, p: int, n: int) -> LocalField:
    for G in reversed(F.ancestors()):
        if G.has_name(f"pi_{n}") and G.has_name(f"zeta_{p ** (n + 1)}"):
            return G
    raise UnsupportedPresentation("tower does not contain F_n")


@dataclass
class CutOut:
    """Located extension cut out by a module and its comparison with the bound."""

    field: LocalField
    label: str
    count: int
    target: int
    break_datum: BreakDatum
    relative_unramified: bool
    bound: Fraction
    respected: bool
    sharp: bool
    counts: list[tuple[str, int]]

    @property
    def verdict(self) -> str:
        if self.bound == 0:
            if self.relative_unramified:
                return "unramified, bound respected"
            return "ramified over F_n, bound violated"
        if not self.respected:
            return "bound violated"
        return "bound respected, sharp" if self.sharp else "bound respected"

    def to_json(self) -> dict:
        return {"tower": self.label, "count": self.count, "target": self.target,
                "u": fraction_text(self.break_datum.u), "bound": fraction_text(self.bound),
                "relative_unramified": self.relative_unramified,
                "respected": self.respected, "sharp": self.sharp, "verdict": self.verdict,
                "counts": [{"tower": t, "count": c} for t, c in self.counts]}


def tower_break(F: LocalField, K: LocalField, n: int) -> tuple[BreakDatum, bool]:
    """Break of ``F/K`` for ``F`` an unramified or tame extension of ``F_n``."""
    Fn = _find_F_n(F, K.p, n)
    unram = True
    for G in F.ancestors():
        if G is Fn:
            break
        if G.kind == UNRAMIFIED:
            continue
        if G.kind == EISENSTEIN and G.step_degree % K.p != 0:
            if G.step_degree > 1:
                unram = False
            continue
        raise UnsupportedPresentation("wild steps above F_n are outside the supported towers")
    base = break_F_n(K, n)
    # tame and unramified steps add no upper break beyond the one of F_n
    return BreakDatum(f"L/K over F_{n}", base.u, None, exact=True,
                      profile=base.profile, notes=base.notes), unram


def cut_out_extension(M: TorsionPhiModule, towers: Sequence | None = None, budget: int | None = None) -> CutOut:
    """Find the first candidate tower over which the point count is full.

    ``towers`` holds fields or tower descriptions understood by
    :func:`build_tower`; fields are tried in order of increasing degree.

    Raises:
        NotFound: no candidate reaches ``p^(n d)`` points.
    """
    K = M.base_field()
    if not towers:
        towers = M.towers or curated_towers(M.p)
    built = []
    for desc in towers:
        F = desc if isinstance(desc, LocalField) else build_tower(K, M.n, desc)
        label = F.label if isinstance(desc, LocalField) else tower_label(desc)
        built.append((F.degree, len(built), F, label))
    built.sort(key=lambda t: (t[0], t[1]))
    counts: list[tuple[str, int]] = []
    best = 0
    for _, _, F, label in built:
        c = count_points(M, F, budget)
        counts.append((label, c))
        best = max(best, c)
        if c == M.target_count:
            datum, unram = tower_break(F, K, M.n)
            bound = bound_value(K.p, K.e, M.r, M.n)
            respected = unram if M.r == 0 else datum.u <= bound
            return CutOut(F, label, c, M.target_count, datum, unram, bound, respected,
                          M.r > 0 and datum.u == bound, counts)
    raise NotFound(f"no candidate tower reaches {M.target_count} points (best {best})", best)


__all__ = [
    "SigmaEntry", "SigmaTrunc", "TorsionPhiModule", "SolutionSet", "CutOut",
    "make_module", "module_from_json", "module_to_json", "validate_module_json",
    "bundled_modules", "load_bundled", "build_tower", "tower_label",
    "solve_points", "count_points", "lift_point", "perturbed_lift",
    "galois_action", "orbits", "cut_out_extension", "tower_break", "curated_towers",
]
