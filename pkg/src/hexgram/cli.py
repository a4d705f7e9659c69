"""Benchmark and verification command line.

``hexgram bench`` times the Gram backends (or the DPG element assemblies)
over a range of orders and writes one CSV record per (order, backend):

    hexgram bench --task gram --space h1 --backend conventional,tensor,simplified \\
        --p 2..7 --dp 2 --map identity --runs 50 --out results.csv

``hexgram verify`` runs the invariant suite and exits 0 iff every check
passes:

    hexgram verify --level full

Timing protocol: monotonic clock around the assembly call only; one warm-up
run is discarded (this also absorbs JIT compilation); the mean and standard
deviation over the remaining runs are reported.  Rule and F-table
construction are shared across runs and excluded.  Counter columns are exact
and hardware independent; the seconds columns are the only nondeterministic
fields.
"""

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .dpg import (
    UltraweakAcousticsProblem,
    acoustics_ultraweak_element,
    maxwell_gram,
    poisson_primal_element,
)
from .geometry import ElementMap, PRESET_MAP_NAMES, classify, preset_map, read_map_config
from .gram import (
    BACKENDS,
    gram_conventional,
    gram_simplified,
    gram_tensorized,
)
from .poly1d import ftable
from .quadrature import default_rule_order, gauss_rule, tensor_rule
from .spaces import SpaceSignature
from .verify import run_verification

__all__ = ["BenchConfig", "BenchRecord", "run_bench", "verify", "main"]

CSV_HEADER = [
    "p0", "dp", "pr", "space", "backend", "map", "runs",
    "mean_s", "std_s", "accum", "geom_calls", "maxdiff",
]

MAX_SUPPORTED_ORDER = 12

_SPACE_FLAGS = {"l2": "L2", "h1": "H1", "hdiv": "Hdiv", "hcurl": "Hcurl"}
_BACKEND_ALIASES = {"tensor": "tensorized", "simpl": "simplified"}
_DPG_PROBLEMS = ("poisson", "maxwell", "acoustics")


@dataclass(frozen=True)
class BenchConfig:
    task: str = "gram"  # "gram" or "dpg-all"
    space: str = "H1"  # gram task only
    backends: tuple[str, ...] = BACKENDS
    p_values: tuple[int, ...] = (2, 3, 4, 5)
    dp: int = 2
    emap: ElementMap = field(default_factory=lambda: preset_map("identity"))
    map_name: str = "identity"
    runs: int | None = None  # None: 50 for scalar Grams, 20 for Hcurl and DPG
    rule_override: int | None = None
    loop_order: str = "alternative"
    out_path: str = "results.csv"
    omega: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.runs is not None and self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not self.p_values:
            raise ValueError("empty order range")
        top = max(self.p_values) + (self.dp if self.task == "dpg-all" else 0)
        if min(self.p_values) < 1 or top > MAX_SUPPORTED_ORDER:
            raise ValueError(
                f"orders must stay within 1..{MAX_SUPPORTED_ORDER}"
            )


@dataclass(frozen=True)
class BenchRecord:
    p0: int
    dp: int
    pr: int
    space: str
    backend: str
    map_name: str
    runs: int
    mean_s: float
    std_s: float
    accum: int
    geom_calls: int
    maxdiff: float | None

    def row(self) -> list[str]:
        return [
            str(self.p0), str(self.dp), str(self.pr), self.space, self.backend,
            self.map_name, str(self.runs),
            f"{self.mean_s:.6e}", f"{self.std_s:.6e}",
            str(self.accum), str(self.geom_calls),
            "" if self.maxdiff is None else f"{self.maxdiff:.17g}",
        ]


def _default_runs(config: BenchConfig, label: str) -> int:
    if config.runs is not None:
        return config.runs
    if config.task == "dpg-all" or label in ("Hcurl", "acoustics", "maxwell"):
        return 20
    return 50


def _timed(fn, runs: int):
    """One discarded warm-up call, then ``runs`` timed calls."""
    result = fn()
    samples = np.empty(runs)
    for k in range(runs):
        t0 = time.perf_counter()
        fn()
        samples[k] = time.perf_counter() - t0
    mean = float(samples.mean())
    std = float(samples.std(ddof=1)) if runs > 1 else 0.0
    return result, mean, std


def _p0_dp(pr: int, dp: int) -> tuple[int, int]:
    p0 = max(1, pr - dp)
    return p0, pr - p0


def _gram_runner(config: BenchConfig, backend: str, pr: int):
    sig = SpaceSignature(config.space, (pr, pr, pr))
    L = config.rule_override or default_rule_order(config.space, sig.orders)
    if backend == "conventional":
        rule3 = tensor_rule(L)
        return lambda: gram_conventional(sig, config.emap, rule3)
    if backend == "tensorized":
        rule1 = gauss_rule(L)
        order = config.loop_order
        return lambda: gram_tensorized(sig, config.emap, rule1, order)
    ft = ftable(max(pr + 1, 2))
    rule1 = gauss_rule(L)
    return lambda: gram_simplified(sig, config.emap, ft, rule1)


def _bench_gram(config: BenchConfig):
    records: list[BenchRecord] = []
    skipped: list[tuple[int, str, str]] = []
    runs = _default_runs(config, config.space)
    for pr in sorted(config.p_values):
        p0, dp = _p0_dp(pr, config.dp)
        reference = None
        for backend in BACKENDS:
            if backend not in config.backends:
                continue
            if backend == "simplified" and classify(config.emap) == "general":
                skipped.append(
                    (pr, backend, "map class 'general' admits no simplification")
                )
                continue
            fn = _gram_runner(config, backend, pr)
            res, mean, std = _timed(fn, runs)
            if reference is None:
                reference = res.matrix
                maxdiff = None if len(config.backends) < 2 else 0.0
            else:
                maxdiff = float(np.max(np.abs(res.matrix - reference)))
            records.append(
                BenchRecord(
                    p0, dp, pr, config.space, backend, config.map_name, runs,
                    mean, std, res.counters.accumulations,
                    res.counters.geometry_calls, maxdiff,
                )
            )
    return records, skipped


def _dpg_runner(problem: str, backend: str, p0: int, dp: int, emap: ElementMap,
                omega: float = 1.0, alpha: float = 1.0):
    if problem == "poisson":
        return lambda: poisson_primal_element(p0, dp, 1.0, None, emap, backend)
    if problem == "maxwell":
        pr = p0 + dp
        return lambda: maxwell_gram(pr, emap, backend)
    prob = UltraweakAcousticsProblem(omega=omega, alpha=alpha)
    return lambda: acoustics_ultraweak_element(prob, p0, dp, emap, backend)


def _dpg_arrays(result):
    """Comparable arrays and gram counters from a DPG bench result."""
    if hasattr(result, "matrix"):  # maxwell: plain GramResult
        return [result.matrix], result.counters
    return [result.G, result.B, result.l], result.gram_counters


def _bench_dpg(config: BenchConfig):
    records: list[BenchRecord] = []
    skipped: list[tuple[int, str, str]] = []
    for problem in _DPG_PROBLEMS:
        runs = _default_runs(config, problem)
        for p0 in sorted(config.p_values):
            dp = config.dp
            pr = p0 + dp
            reference = None
            for backend in BACKENDS:
                if backend not in config.backends:
                    continue
                if backend == "simplified" and classify(config.emap) == "general":
                    skipped.append(
                        (p0, backend, f"{problem}: map class 'general'")
                    )
                    continue
                fn = _dpg_runner(problem, backend, p0, dp, config.emap,
                                 config.omega, config.alpha)
                res, mean, std = _timed(fn, runs)
                arrays, counters = _dpg_arrays(res)
                if reference is None:
                    reference = arrays
                    maxdiff = None if len(config.backends) < 2 else 0.0
                else:
                    maxdiff = max(
                        float(np.max(np.abs(a - b)))
                        for a, b in zip(arrays, reference)
                    )
                records.append(
                    BenchRecord(
                        p0, dp, pr, problem, backend, config.map_name, runs,
                        mean, std,
                        counters.accumulations if counters else 0,
                        counters.geometry_calls if counters else 0,
                        maxdiff,
                    )
                )
    return records, skipped


def run_bench(config: BenchConfig):
    """Run the benchmark and write the CSV; returns (records, skipped)."""
    if config.task == "gram":
        records, skipped = _bench_gram(config)
    elif config.task == "dpg-all":
        records, skipped = _bench_dpg(config)
    else:
        raise ValueError(f"unknown task {config.task!r}")
    with open(config.out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(rec.row())
    return records, skipped


def verify(level: str = "fast", rule_override=None, inject_fault=None) -> bool:
    """Run the verification suite, print one line per check; True iff all pass."""
    results = run_verification(level, rule_override, inject_fault)
    ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: {r.detail}")
        ok = ok and r.passed
    print(f"verify: {'all checks passed' if ok else 'FAILURES detected'}")
    return ok


def _parse_p_range(text: str) -> tuple[int, ...]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(t) for t in text.split(","))


def _parse_backends(text: str) -> tuple[str, ...]:
    out = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        tok = _BACKEND_ALIASES.get(tok, tok)
        if tok not in BACKENDS:
            raise ValueError(f"unknown backend {tok!r}")
        out.append(tok)
    return tuple(out)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hexgram",
        description="Gram-matrix integration benchmarks and verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bench", help="time the backends and write a CSV")
    b.add_argument("--task", choices=["gram", "dpg-all"], default="gram")
    b.add_argument("--space", choices=sorted(_SPACE_FLAGS), default="h1",
                   help="energy space (gram task)")
    b.add_argument("--backend", default="conventional,tensor,simplified",
                   help="comma-separated backend list")
    b.add_argument("--p", default="2..5", help="order range, e.g. 2..7 or 2,4,6")
    b.add_argument("--dp", type=int, default=2, help="test-space enrichment")
    b.add_argument("--map", dest="map_name", default="identity",
                   choices=PRESET_MAP_NAMES, help="element map preset")
    b.add_argument("--map-file", default=None,
                   help="map config file (first map overrides --map)")
    b.add_argument("--runs", type=int, default=None,
                   help="timed runs per case (default 50, or 20 for H(curl)/DPG)")
    b.add_argument("--rule", type=int, default=None, help="1D rule order override")
    b.add_argument("--loop-order", choices=["standard", "alternative"],
                   default="alternative")
    b.add_argument("--omega", type=float, default=1.0,
                   help="acoustics frequency (dpg-all task)")
    b.add_argument("--alpha", type=float, default=1.0,
                   help="acoustics broken-norm correction (dpg-all task)")
    b.add_argument("--out", default="results.csv")

    v = sub.add_parser("verify", help="run the invariant suite")
    v.add_argument("--level", choices=["fast", "full"], default="fast")
    v.add_argument("--rule", type=int, default=None)
    v.add_argument("--inject-fault", choices=["ftable"], default=None,
                   help="test hook: corrupt one F-table entry")

    args = parser.parse_args(argv)

    if args.command == "verify":
        ok = verify(args.level, args.rule, args.inject_fault)
        return 0 if ok else 1

    if args.map_file:
        emap = read_map_config(args.map_file)[0]
        map_name = f"file:{args.map_file}"
    else:
        emap = preset_map(args.map_name)
        map_name = args.map_name
    config = BenchConfig(
        task=args.task,
        space=_SPACE_FLAGS[args.space],
        backends=_parse_backends(args.backend),
        p_values=_parse_p_range(args.p),
        dp=args.dp,
        emap=emap,
        map_name=map_name,
        runs=args.runs,
        rule_override=args.rule,
        loop_order=args.loop_order,
        omega=args.omega,
        alpha=args.alpha,
        out_path=args.out,
    )
    records, skipped = run_bench(config)
    for p, backend, reason in skipped:
        print(f"skipped p={p} backend={backend}: {reason}", file=sys.stderr)
    print(f"wrote {len(records)} records to {config.out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
