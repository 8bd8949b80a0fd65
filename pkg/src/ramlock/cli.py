"""Command-line front end: bounds, break tables, (P_j) brackets and solver runs."""

from __future__ import annotations

import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import click

from .errors import BudgetExceeded, ComputationError, InputError, NotFound, RamlockError
from .localfield import LocalField, adjoin_root, field_from_json, make_field, tower_F_n
from .ramification import (
    bound_value,
    bracket_break,
    break_cyclotomic,
    break_F_n,
    break_tate,
    closed_form_F_n,
    cyclotomic_profile,
    different_valuation,
    fraction_text,
    kummer_break,
)

EXIT_COMPUTATION = 1
EXIT_INPUT = 2


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _decimal(text: str) -> str:
    try:
        return f"{float(Fraction(text)):.6f}"
    except (ValueError, ZeroDivisionError):
        return text


def _prettify(rows: list[dict]) -> list[dict]:
    out = []
    for row in rows:
        new = {}
        for k, v in row.items():
            new[k] = v
            if isinstance(v, str) and "/" in v and k not in ("tower", "extension", "verdict"):
                new[f"{k}~"] = _decimal(v)
        out.append(new)
    return out


def _render(rows: list[dict], fmt: str, pretty: bool) -> str:
    if pretty:
        rows = _prettify(rows)
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=False) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        keys: list[str] = []
        for row in rows:
            keys.extend(k for k in row if k not in keys)
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})
        return buf.getvalue()
    if len(rows) == 1 and len(rows[0]) == 1:
        return f"{next(iter(rows[0].values()))}\n"
    lines = []
    for row in rows:
        lines.append("  ".join(f"{k}={_cell(v)}" for k, v in row.items()))
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, dict)):
        return json.dumps(v, separators=(",", ":"))
    return str(v)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


def _int_list(text: str | None, default: list[int]) -> list[int]:
    if text is None:
        return default
    out: list[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def _base(p: int, e: int, precision: int, field_path: str | None) -> LocalField:
    if field_path:
        doc = json.loads(Path(field_path).read_text())
        doc.setdefault("precision", precision)
        return field_from_json(doc)
    return make_field(p, 1, [-p] + [0] * (e - 1) + [1], precision)


def _run(fn):
    """Map library errors to exit codes."""
    try:
        fn()
    except BudgetExceeded as exc:
        click.echo(f"error: {exc} (partial count {exc.partial_count})", err=True)
        sys.exit(EXIT_COMPUTATION)
    except NotFound as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_COMPUTATION)
    except InputError as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    except (ComputationError, RamlockError) as exc:
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(EXIT_COMPUTATION)
    except (json.JSONDecodeError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)


_common = [
    click.option("--p", "p", type=int, default=3, show_default=True, help="Residue characteristic."),
    click.option("--e", "e", type=int, default=1, show_default=True,
                 help="Absolute ramification index of K = Q_p(p^(1/e))."),
    click.option("--field", "field_path", type=click.Path(exists=True, dir_okay=False),
                 help="Field presentation JSON (overrides --p/--e)."),
    click.option("--precision", type=click.IntRange(min=1), default=8, show_default=True),
    click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text",
                 show_default=True),
    click.option("--pretty", is_flag=True, help="Add decimal approximations."),
    click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write to a file."),
]


def common_options(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Ramification bounds for torsion crystalline representations."""


# ---------------------------------------------------------------------------
# bound
# ---------------------------------------------------------------------------

@main.command()
@common_options
@click.option("--r", "rs", default=None, help="Weights, e.g. 1 or 0,1 or 0-3 (default: all r < p-1).")
@click.option("--n", "ns", default=None, help="Levels, e.g. 1 or 1-3 (default: 1).")
def bound(p, e, field_path, precision, fmt, pretty, output, rs, ns):
    """Table of u(K, r, n)."""

    def go():
        K = _base(p, e, precision, field_path) if field_path else None
        pp, ee = (K.p, K.e) if K else (p, e)
        r_list = _int_list(rs, list(range(max(pp - 1, 1))))
        n_list = _int_list(ns, [1])
        rows = [{"p": pp, "e": ee, "r": r, "n": n, "u": fraction_text(bound_value(pp, ee, r, n))}
                for r in r_list for n in n_list]
        if len(rows) == 1 and fmt == "text":
            rows = [{"u": rows[0]["u"]}]
        _emit(_render(rows, fmt, pretty), output)

    _run(go)


# ---------------------------------------------------------------------------
# breaks
# ---------------------------------------------------------------------------

@main.command()
@common_options
@click.option("--n", "ns", default="1", show_default=True, help="Levels, e.g. 1 or 1-2.")
@click.option("--tower", type=click.Choice(["Fn", "kummer", "cyclotomic", "tate"]), default="Fn",
              show_default=True)
@click.option("--different/--no-different", default=None,
              help="Build the tower and report its different (default: on for n = 1).")
def breaks(p, e, field_path, precision, fmt, pretty, output, ns, tower, different):
    """Greatest upper breaks of the standard towers over K."""

    def go():
        K = _base(p, e, precision, field_path)
        rows = []
        for n in _int_list(ns, [1]):
            want_diff = different if different is not None else n == 1
            rows.append(_break_row(K, n, tower, want_diff))
        _emit(_render(rows, fmt, pretty), output)

    _run(go)


def _break_row(K: LocalField, n: int, tower: str, want_diff: bool) -> dict:
    row: dict = {"tower": tower, "p": K.p, "e": K.e, "n": n}
    if tower == "kummer":
        d = kummer_break(K, n)
        row.update(s_f=fraction_text(d.profile.s_f), alpha_f=fraction_text(d.profile.alpha_f),
                   u=fraction_text(d.u))
        closed = 1 - Fraction(1, K.p ** n) + n * K.e + Fraction(1, K.p ** n) + Fraction(K.e, K.p - 1)
        row["closed_form"] = fraction_text(closed)
        row["matches"] = d.u == closed
        if want_diff:
            row["different"] = fraction_text(d.different) if d.different is not None else None
    elif tower == "cyclotomic":
        prof = cyclotomic_profile(K, n)
        row["s_f"] = fraction_text(prof.s_f)
        row["alpha_f"] = fraction_text(prof.alpha_f)
        row["bound"] = fraction_text(break_cyclotomic(K, n))
    elif tower == "Fn":
        d = break_F_n(K, n)
        closed = closed_form_F_n(K.p, K.e, n)
        row.update(s_f=fraction_text(d.profile.s_f), alpha_f=fraction_text(d.profile.alpha_f),
                   u=fraction_text(d.u), closed_form=fraction_text(closed), matches=d.u == closed,
                   bound_r1=fraction_text(bound_value(K.p, K.e, 1, n)))
        if want_diff:
            row["different"] = fraction_text(different_valuation(tower_F_n(K, n), K))
    else:
        d = break_tate(K, n)
        b = bound_value(K.p, K.e, 1, n)
        row.update(u=fraction_text(d.u), bound_r1=fraction_text(b), attains_bound=d.u == b)
    return row


# ---------------------------------------------------------------------------
# (P_j)
# ---------------------------------------------------------------------------

@main.command()
@common_options
@click.option("--n", type=int, default=1, show_default=True)
@click.option("--step", default="1/6", show_default=True, help="Grid resolution.")
@click.option("--max-j", default="4", show_default=True)
@click.option("--budget", type=click.IntRange(min=1), default=None,
              help="Node budget per test (RAMLOCK_BUDGET overrides the default).")
def pj(p, e, field_path, precision, fmt, pretty, output, n, step, max_j, budget):
    """Bracket the break of K_n/K with Fontaine's property (P_j)."""

    def go():
        K = _base(p, e, precision, field_path)
        step_f, top = Fraction(step), Fraction(max_j)
        if step_f <= 0:
            raise click.BadParameter("step must be positive")
        grid = [k * step_f for k in range(int(top / step_f) + 1)]
        f = [-K.uniformizer()] + [0] * (K.p ** n - 1) + [1]
        family = pj_family(K, n)
        lo, hi = bracket_break(f, K, family, grid, budget)
        d = kummer_break(K, n)
        target = d.profile.s_f + d.profile.alpha_f
        row = {"p": K.p, "e": K.e, "n": n, "fails_at": fraction_text(lo) if lo is not None else None,
               "holds_at": fraction_text(hi) if hi is not None else None,
               "s_f+alpha_f": fraction_text(target),
               "bracketed": lo is not None and hi is not None and lo < target <= hi}
        _emit(_render([row], fmt, pretty), output)

    _run(go)


def pj_family(K: LocalField, n: int) -> list[LocalField]:
    """Test fields for (P_j): K, K(zeta_p), K_n and two degree-p Eisenstein extensions."""
    from .localfield import adjoin_zeta, eisenstein_step

    p = K.p
    fam = [K, adjoin_zeta(K, 1), adjoin_root(K, [-K.uniformizer()] + [0] * (p ** n - 1) + [1])]
    if K.e == 1 and K.m == 1:
        fam.append(eisenstein_step(K, [-p, -p * p] + [0] * (p - 2) + [1]))
        fam.append(eisenstein_step(K, [-p] + [0] * (p - 2) + [-p * p, 1]))
    return fam


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

@main.command()
@click.argument("module")
@click.option("--precision", type=click.IntRange(min=1), default=None)
@click.option("--budget", type=click.IntRange(min=1), default=None,
              help="Node budget (RAMLOCK_BUDGET overrides the default).")
@click.option("--tower", "towers", multiple=True,
              help="Candidate tower: 'F_n' or JSON like '{\"adjoin\": [[1,0,1]], \"names\": [\"i\"]}'.")
@click.option("--format", "fmt", type=click.Choice(["text", "json", "csv"]), default="text",
              show_default=True)
@click.option("--pretty", is_flag=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False))
def solve(module, precision, budget, towers, fmt, pretty, output):
    """Count points of MODULE (bundled name or JSON path) and locate its extension."""
    from .phimodule import bundled_modules, cut_out_extension, load_bundled, module_from_json

    def go():
        if module in bundled_modules():
            M = load_bundled(module, precision)
        else:
            path = Path(module)
            if not path.is_file():
                from .errors import SchemaError

                raise SchemaError(f"{module!r} is neither a bundled module nor a file")
            M = module_from_json(json.loads(path.read_text()), precision)
        cand = [t if t == "F_n" else json.loads(t) for t in towers] or None
        res = cut_out_extension(M, cand, budget)
        info = res.to_json()
        rows = [{"tower": c["tower"], "count": c["count"], "target": res.target} for c in info["counts"]]
        summary = {"module": M.name, "tower": info["tower"], "count": res.count,
                   "u": info["u"], "bound": info["bound"], "verdict": res.verdict}
        if fmt == "json":
            text = json.dumps({"module": M.name, "p": M.p, "e": M.e, "r": M.r, "n": M.n, "d": M.d,
                               **info}, indent=2) + "\n"
        elif fmt == "csv":
            text = _render(rows + [summary], "csv", pretty)
        else:
            body = _render(rows, "text", pretty)
            text = body + f"{summary['module']}: located {summary['tower']} with {res.count} points; " \
                          f"u = {summary['u']}, bound = {summary['bound']}: {res.verdict}\n"
        _emit(text, output)

    _run(go)


@main.command("modules")
def list_modules():
    """List the bundled module descriptions."""
    from .phimodule import bundled_modules

    for name in bundled_modules():
        click.echo(name)


if __name__ == "__main__":  # pragma: no cover
    main()
