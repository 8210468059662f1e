"""Benchmark harness: run suites of unification problems under each algorithm."""

from __future__ import annotations

import csv
import os
import signal
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .axunify import DiophantineExplosion
from .theoryparse import LoadError, ParseError, load_module, parse_problem
from .varnarrow import VariantBoundExceeded
from .varunify import ALGORITHMS, UnifQuery

__all__ = ["BenchProblem", "BenchRow", "BenchReport", "parse_suite", "run_problem",
           "run_bench", "ALGO_KEYS"]

# suite files spell the combined algorithm without a dash
ALGO_KEYS = {"maude": "maude", "fast": "fast", "cr": "cr", "crfast": "cr-fast", "cr-fast": "cr-fast"}


class RowTimeout(Exception):
    pass


@dataclass
class BenchProblem:
    id: str
    module: str
    problem: str
    expected: dict = field(default_factory=dict)  # algo -> (count, hard?)
    line: int = 0


@dataclass
class BenchRow:
    problem: str
    algo: str
    count: int | None
    time_ms: float
    status: str  # ok | timeout | bound-exceeded | error
    expected: int | None = None
    hard: bool = False

    @property
    def verdict(self) -> str:
        if self.expected is None:
            return "-"
        if self.status != "ok":
            return "fail" if self.hard and self.status != "timeout" else self.status
        if self.count == self.expected:
            return "pass"
        return "fail" if self.hard else "soft-diff"


@dataclass
class BenchReport:
    rows: list

    def row(self, problem, algo):
        for r in self.rows:
            if r.problem == problem and r.algo == algo:
                return r
        raise KeyError((problem, algo))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["problem", "algo", "count", "time_ms", "status", "expected", "check"])
            for r in self.rows:
                exp = "" if r.expected is None else (str(r.expected) if r.hard else f"~{r.expected}")
                w.writerow([r.problem, r.algo, "" if r.count is None else r.count,
                            f"{r.time_ms:.1f}", r.status, exp, r.verdict])

    def summary(self) -> str:
        lines = [f"{'problem':8} {'algo':8} {'count':>6} {'expected':>9} {'time_ms':>10}  check"]
        for r in self.rows:
            exp = "" if r.expected is None else (str(r.expected) if r.hard else f"~{r.expected}")
            cnt = "" if r.count is None else str(r.count)
            lines.append(f"{r.problem:8} {r.algo:8} {cnt:>6} {exp:>9} {r.time_ms:>10.1f}  {r.verdict}")
        return "\n".join(lines)


def parse_suite(path) -> list:
    """Read ``ID | MODULE-FILE | PROBLEM | algo=N,... | hard|soft`` lines."""
    path = Path(path)
    out = []
    for n, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cols = [c.strip() for c in line.split("|")]
        if len(cols) not in (3, 4, 5):
            raise ParseError(f"suite line needs 3 to 5 '|'-separated columns", n, 1)
        pid, module, problem = cols[:3]
        default_hard = (cols[4] if len(cols) > 4 else "hard") == "hard"
        expected = {}
        if len(cols) > 3 and cols[3]:
            for item in cols[3].split(","):
                key, _, val = item.partition("=")
                algo = ALGO_KEYS.get(key.strip())
                if algo is None:
                    raise ParseError(f"unknown algorithm '{key.strip()}'", n, 1)
                val = val.strip()
                soft = val.startswith("~")
                expected[algo] = (int(val.lstrip("~")), default_hard and not soft)
        mod = Path(module)
        if not mod.is_absolute():
            mod = path.parent / mod
        out.append(BenchProblem(pid, str(mod), problem, expected, n))
    return out


def _alarm(signum, frame):
    raise RowTimeout()


def run_problem(prob: BenchProblem, algo: str, timeout: float | None = None) -> BenchRow:
    exp = prob.expected.get(algo)
    expected, hard = (exp if exp else (None, False))
    if not os.path.exists(prob.module):
        return BenchRow(prob.id, algo, None, 0.0, "skip", expected, hard)
    old = None
    if timeout:
        old = signal.signal(signal.SIGALRM, _alarm)
        signal.setitimer(signal.ITIMER_REAL, timeout)
    t0 = time.perf_counter()
    try:
        theory = load_module(prob.module)
        p = parse_problem(prob.problem, theory)
        t1, t2 = p.as_pair()
        res = ALGORITHMS[algo](UnifQuery(t1, t2, theory))
        status, count = "ok", len(res)
    except RowTimeout:
        status, count = "timeout", None
    except (VariantBoundExceeded, DiophantineExplosion):
        status, count = "bound-exceeded", None
    except (ParseError, LoadError):
        status, count = "error", None
    finally:
        if timeout:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, old)
    ms = (time.perf_counter() - t0) * 1000
    return BenchRow(prob.id, algo, count, ms, status, expected, hard)


def _run_star(args):
    return run_problem(*args)


def run_bench(suite, out_csv=None, timeout: float | None = 300.0, algos=None,
              jobs: int = 1, only=None) -> BenchReport:
    probs = parse_suite(suite) if not isinstance(suite, list) else suite
    if only:
        probs = [p for p in probs if p.id in only]
    algos = list(algos or ["maude", "fast", "cr", "cr-fast"])
    tasks = [(p, a, timeout) for p in probs for a in algos]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            rows = list(ex.map(_run_star, tasks))
    else:
        rows = [_run_star(t) for t in tasks]
    report = BenchReport(rows)
    if out_csv:
        report.write_csv(out_csv)
    return report
