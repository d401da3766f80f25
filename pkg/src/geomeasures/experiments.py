"""
Parameter sweeps and random-ensemble benchmarks.

Both produce a :class:`SweepReport`: one record per state with the numerical
value, an analytic reference or bounds where one exists, and timing.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import measures
from .errors import BadParameter, ParseError
from .fileio import fmt_float, write_csv
from .sdp import SolverConfig
from .states import StateFamilySpec, random_ginibre_density

CSV_COLUMNS = ("param", "value", "analytic", "lower", "upper", "deviation", "iterations", "wall_time_s")
BENCH_KINDS = ("qubit-coherence", "qutrit-bounds", "two-qubit-gme")
BOUND_SLACK = 1e-6


@dataclass
class Record:
    param: float
    value: float
    analytic: float | None = None
    lower: float | None = None
    upper: float | None = None
    gap: float = 0.0
    iterations: int = 0
    wall_time: float = 0.0

    @property
    def deviation(self) -> float | None:
        """Distance to the analytic value, or the bound violation when only bounds exist."""
        if self.analytic is not None:
            return abs(self.value - self.analytic)
        if self.lower is not None and self.upper is not None:
            return max(self.lower - self.value, self.value - self.upper, 0.0)
        return None

    def row(self) -> list[str]:
        return [
            fmt_float(self.param),
            fmt_float(self.value),
            fmt_float(self.analytic),
            fmt_float(self.lower),
            fmt_float(self.upper),
            fmt_float(self.deviation),
            str(self.iterations),
            f"{self.wall_time:.3f}",
        ]


@dataclass
class SweepReport:
    family: str
    grid: list[float]
    records: list[Record] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        devs = [r.deviation for r in self.records if r.deviation is not None]
        times = [r.wall_time for r in self.records]
        out = {
            "count": len(self.records),
            "max_deviation": max(devs) if devs else None,
            "mean_deviation": float(np.mean(devs)) if devs else None,
            "mean_time": float(np.mean(times)) if times else None,
        }
        if any(r.analytic is None and r.lower is not None for r in self.records):
            out["violations"] = sum(
                1
                for r in self.records
                if r.analytic is None and r.deviation is not None and r.deviation > BOUND_SLACK
            )
        return out

    def write_csv(self, path_or_file) -> None:
        write_csv(path_or_file, CSV_COLUMNS, [r.row() for r in self.records])


def parse_range(text: str) -> list[float]:
    """``a:b:n`` to ``n`` evenly spaced points from ``a`` to ``b`` inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ParseError(f"parameter range must look like a:b:n, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ParseError(f"bad parameter range {text!r}") from None
    if n < 1:
        raise ParseError(f"range needs at least one point, got n={n}")
    return [float(x) for x in np.linspace(a, b, n)]


def _timed(fn, *args):
    t0 = time.perf_counter()
    res = fn(*args)
    return res, time.perf_counter() - t0


def _coherence_record(param, rho, analytic, config) -> Record:
    res, dt = _timed(measures.geometric_coherence, rho, config)
    lo, hi = res.bounds
    return Record(param, res.value, analytic, lo, hi, res.solver_stats["relative_gap"],
                  res.solver_stats["iterations"], dt)


def _gme_record(param, rho, dims, analytic, config) -> Record:
    res, dt = _timed(measures.gme_ppt, rho, dims, config)
    return Record(param, res.value, analytic, None, None, res.solver_stats["relative_gap"],
                  res.solver_stats["iterations"], dt)


def _isotropic_reference(spec: StateFamilySpec, rho) -> float | None:
    d = spec.params["d"]
    if d == 2:
        return measures.gme_two_qubit_analytic(measures.concurrence(rho))
    # separable exactly when F <= 1/d; no closed form above the threshold
    return 0.0 if spec.params["F"] <= 1 / d else None


def evaluate_point(spec: StateFamilySpec, param: float, measure: str = "auto", dims=None,
                   config: SolverConfig | None = None) -> Record:
    """Build ``spec`` and run the measure that fits its family."""
    rho = spec.build()
    kind = spec.kind
    if measure == "auto":
        measure = "gme" if kind in ("isotropic", "werner", "bell") or dims else "coherence"
    if measure == "coherence":
        analytic = None
        if kind == "mcms":
            analytic = measures.coherence_mcms_analytic(spec.params["d"], spec.params["p"])
        elif rho.dim == 2:
            analytic = measures.coherence_qubit_analytic(rho)
        return _coherence_record(param, rho, analytic, config)
    if measure != "gme":
        raise BadParameter(f"unknown measure {measure!r}")
    dims = tuple(dims) if dims else spec.dims
    if dims is None:
        raise BadParameter(f"family {kind!r} needs --dims for the entanglement measure")
    analytic = None
    if kind == "werner":
        analytic = measures.werner_gme_analytic(spec.params["f"])
    elif kind == "isotropic":
        analytic = _isotropic_reference(spec, rho)
    elif rho.dim == 4 and tuple(dims) == (2, 2):
        analytic = measures.gme_two_qubit_analytic(measures.concurrence(rho))
    return _gme_record(param, rho, dims, analytic, config)


def _run_all(tasks, jobs: int) -> list[Record]:
    if jobs <= 1:
        return [t() for t in tasks]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda t: t(), tasks))


def run_sweep(pattern: str, grid, measure: str = "auto", dims=None,
              config: SolverConfig | None = None, jobs: int = 1) -> SweepReport:
    """Evaluate a family pattern with exactly one ``*`` parameter across ``grid``."""
    spec = StateFamilySpec.parse(pattern)
    free = spec.free_params
    if len(free) != 1:
        raise ParseError(f"pattern must have exactly one free parameter, found {len(free)}")
    key = free[0]
    points = [spec.with_param(key, x) for x in grid]
    params = [float(p.params[key]) for p in points]
    tasks = [
        (lambda p=p, x=x: evaluate_point(p, x, measure, dims, config))
        for p, x in zip(points, params)
    ]
    return SweepReport(str(spec), params, _run_all(tasks, jobs))


def _bench_one(kind: str, seed, index: int, config) -> Record:
    if kind == "qubit-coherence":
        rho = random_ginibre_density(2, 2, seed=[seed, index])
        return _coherence_record(index, rho, measures.coherence_qubit_analytic(rho), config)
    if kind == "qutrit-bounds":
        rho = random_ginibre_density(3, 3, seed=[seed, index])
        return _coherence_record(index, rho, None, config)
    rho = random_ginibre_density(4, 4, seed=[seed, index])
    analytic = measures.gme_two_qubit_analytic(measures.concurrence(rho))
    return _gme_record(index, rho, (2, 2), analytic, config)


def run_bench(kind: str, count: int, seed: int = 0, config: SolverConfig | None = None,
              jobs: int = 1) -> SweepReport:
    """Random-ensemble benchmark; state ``i`` is drawn with seed ``[seed, i]``."""
    if kind not in BENCH_KINDS:
        raise ParseError(f"unknown bench kind {kind!r}; known: {', '.join(BENCH_KINDS)}")
    if count < 1:
        raise BadParameter(f"count must be at least 1, got {count}")
    tasks = [(lambda i=i: _bench_one(kind, seed, i, config)) for i in range(count)]
    return SweepReport(kind, [float(i) for i in range(count)], _run_all(tasks, jobs))


def format_summary(summary: dict) -> str:
    lines = []
    for k, v in summary.items():
        if v is None:
            v = "n/a"
        elif isinstance(v, float) and not math.isnan(v):
            v = f"{v:.3e}" if k != "mean_time" else f"{v:.3f} s"
        lines.append(f"{k}: {v}")
    return "\n".join(lines)
