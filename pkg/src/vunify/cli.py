"""Command line front end: ``vu get-variants``, ``vu unify`` and ``vu bench``."""

from __future__ import annotations

import signal
import sys
from pathlib import Path

import click

from .axunify import DiophantineExplosion
from .normalize import RewriteTrace, normalize
from .sigterm import apply, render
from .theoryparse import LoadError, ParseError, load_module, parse_problem, parse_term
from .varnarrow import VariantBoundExceeded, get_variants
from .varunify import ALGORITHMS, UnifQuery, present

DATA = Path(__file__).parent / "data"

EXIT_PARSE, EXIT_BOUND, EXIT_DIOPHANTINE, EXIT_TIMEOUT = 1, 2, 3, 4


class _Timeout(Exception):
    pass


def resolve_module(name: str) -> Path:
    """A path, or the name of a shipped module (file stem or module name)."""
    p = Path(name)
    if p.exists():
        return p
    for cand in (DATA / name, DATA / f"{name}.maude",
                 DATA / f"{name.lower().replace('-', '_')}.maude"):
        if cand.exists():
            return cand
    raise LoadError(f"no module file '{name}'")


def _load(module):
    return load_module(resolve_module(module))


def format_variants(variants, base_vars, sig) -> str:
    lines = []
    for k, v in enumerate(variants, 1):
        kind = sig.kind_of(sig.least_sort(v.term))
        lines.append(f"Variant #{k}")
        lines.append(f"{kind}: {render(v.term)}")
        for x in base_vars:
            lines.append(f"{x.name} --> {render(v.subst.get(x, x))}")
        lines.append("")
    return "\n".join(lines).rstrip("\n")


def format_unifiers(unifiers, order) -> str:
    if not unifiers:
        return "No unifiers."
    lines = []
    for k, s in enumerate(unifiers, 1):
        s = present({x: s.get(x, x) for x in order}, order)
        lines.append(f"Unifier #{k}")
        for x in order:
            lines.append(f"{x.name} --> {render(s.get(x, x))}")
        lines.append("")
    return "\n".join(lines).rstrip("\n")


def _run(fn, timeout=None):
    """Call fn, mapping library errors to the documented exit codes."""
    old = None
    if timeout:
        def on_alarm(signum, frame):
            raise _Timeout()
        old = signal.signal(signal.SIGALRM, on_alarm)
        signal.setitimer(signal.ITIMER_REAL, timeout)
    try:
        return fn()
    except (ParseError, LoadError, OSError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_PARSE)
    except VariantBoundExceeded as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_BOUND)
    except DiophantineExplosion as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_DIOPHANTINE)
    except _Timeout:
        click.echo(f"error: timed out after {timeout} s", err=True)
        sys.exit(EXIT_TIMEOUT)
    finally:
        if timeout:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old)


@click.group()
def main():
    """Variant-based equational unification."""


@main.command("get-variants")
@click.option("--module", "module", required=True, help="Module file or shipped module name.")
@click.option("--bound", type=int, default=None, help="Print at most N variants.")
@click.argument("term")
def get_variants_cmd(module, bound, term):
    def go():
        theory = _load(module)
        t = parse_term(term, theory.sig, theory.vars)
        vs = get_variants(t, theory, bound)
        return format_variants(vs, sorted(t.variables, key=lambda v: v.key), theory.sig)
    click.echo(_run(go))


@main.command("unify")
@click.option("--module", "module", required=True, help="Module file or shipped module name.")
@click.option("--algo", type=click.Choice(sorted(ALGORITHMS)), default="maude", show_default=True)
@click.option("--bound", type=int, default=None, help="Print at most N unifiers.")
@click.option("--timeout", type=float, default=None, help="Give up after S seconds (exit 4).")
@click.option("--trace", is_flag=True, help="Dump the rewrite steps that check each unifier.")
@click.argument("problem")
def unify_cmd(module, algo, bound, timeout, trace, problem):
    def go():
        theory = _load(module)
        p = parse_problem(problem, theory)
        t1, t2 = p.as_pair()
        q = UnifQuery(t1, t2, theory)
        res = ALGORITHMS[algo](q, bound if bound is not None else p.bound)
        if trace:
            for k, s in enumerate(res, 1):
                for side, t in (("lhs", t1), ("rhs", t2)):
                    tr = RewriteTrace()
                    normalize(apply(s, t), theory, trace=tr)
                    click.echo(f"*** unifier #{k} {side}", err=True)
                    for line in tr.lines():
                        click.echo(line, err=True)
        return format_unifiers(res.unifiers, q.order)
    click.echo(_run(go, timeout))


@main.command("bench")
@click.option("--suite", required=True, help="Suite file (or a shipped suite name).")
@click.option("--out", "out", default=None, help="CSV report path.")
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--timeout", type=float, default=300.0, show_default=True,
              help="Per (problem, algorithm) time limit in seconds.")
@click.option("--algos", default="maude,fast,cr,cr-fast", show_default=True)
@click.option("--only", default=None, help="Comma-separated problem ids.")
def bench_cmd(suite, out, jobs, timeout, algos, only):
    from .bench import ALGO_KEYS, run_bench
    path = Path(suite)
    if not path.exists() and (DATA / suite).exists():
        path = DATA / suite

    def go():
        names = [ALGO_KEYS[a.strip()] for a in algos.split(",") if a.strip()]
        ids = set(only.split(",")) if only else None
        return run_bench(path, out, timeout, names, jobs, ids)
    report = _run(go)
    click.echo(report.summary())


if __name__ == "__main__":
    main()
