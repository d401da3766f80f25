"""
Command-line front end.

Inputs are either a state file (JSON, see :mod:`geomeasures.fileio`) or a
family spec such as ``mcms:d=3,p=0.5``.  Exit codes: 0 success, 2 input or
validation error, 3 solver error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import experiments, measures
from .errors import GeoMeasuresError, NoConvergence, SolverError
from .fileio import load_state, state_to_json, write_state_file
from .sdp import SolverConfig
from .states import StateFamilySpec

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3

_FORMAT_HELP = """\
state files are UTF-8 JSON objects:
  {"dim": n, "dims": [dA, dB], "re": [...], "im": [...], "metadata": {...}}
re/im hold the n*n real and imaginary parts in row-major order; im, dims and
metadata are optional.  Anywhere a state is expected, a family spec such as
mcms:d=3,p=0.5  isotropic:d=3,F=0.7  werner:d=2,f=-1  ginibre:d=3,rank=3,seed=1
pure:d=4,seed=7  bell:d=2  maxcoherent:d=3  may be given instead.
exit codes: 0 success, 2 input/validation error, 3 solver error"""


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgError(f"{self.prog}: error: {message}")


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--gap-tol", type=float, default=d(1e-10), help="relative duality gap target")
    p.add_argument("--feas-tol", type=float, default=d(1e-9), help="primal/dual residual target")
    p.add_argument("--max-iters", type=int, default=d(200), help="interior-point iteration cap")
    p.add_argument("--jobs", type=int, default=d(1), help="worker threads for sweeps and benches")
    p.add_argument("--seed", type=int, default=d(0), help="base seed for random ensembles")
    p.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="geomeasures",
        description="Geometric coherence and entanglement via semidefinite programming.",
        epilog=_FORMAT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        p = sub.add_parser(name, help=help_, epilog=_FORMAT_HELP,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        _global_flags(p, suppress=True)
        return p

    p = add("fidelity", "fidelity between two states")
    p.add_argument("rho")
    p.add_argument("chi")
    p.add_argument("--method", choices=("direct", "sdp"), default="direct")

    p = add("coherence", "geometric coherence of a state")
    p.add_argument("state")

    p = add("gme", "geometric entanglement (PPT relaxation) of a bipartite state")
    p.add_argument("state")
    p.add_argument("--dims", type=int, nargs=2, metavar=("DA", "DB"))

    p = add("gen", "write a family state to a state file")
    p.add_argument("spec")
    p.add_argument("--out", required=True)

    p = add("sweep", "evaluate a family pattern with one '*' parameter over a grid")
    p.add_argument("pattern")
    p.add_argument("--param-range", required=True, metavar="A:B:N")
    p.add_argument("--measure", choices=("auto", "coherence", "gme"), default="auto")
    p.add_argument("--dims", type=int, nargs=2, metavar=("DA", "DB"))
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = add("bench", "random-ensemble deviation benchmark")
    p.add_argument("kind", choices=experiments.BENCH_KINDS)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--out", help="CSV path (default: stdout)")
    return parser


def _config(args) -> SolverConfig:
    try:
        return SolverConfig(gap_tol=args.gap_tol, feas_tol=args.feas_tol, max_iterations=args.max_iters)
    except ValueError as exc:
        raise _ArgError(str(exc)) from None


def _load(text: str):
    """State file path or family spec; returns ``(rho, dims)``."""
    if os.path.exists(text) or text.lower().endswith(".json"):
        rho, dims, _ = load_state(text)
        return rho, dims
    spec = StateFamilySpec.parse(text)
    return spec.build(), spec.dims


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, sort_keys=False) + "\n")


def _cmd_fidelity(args, out):
    rho, _ = _load(args.rho)
    chi, _ = _load(args.chi)
    if args.method == "direct":
        f, stats = measures.fidelity_direct(rho, chi), None
    else:
        f, stats = measures.fidelity_sdp(rho, chi, _config(args))
    if args.json:
        _emit({"fidelity": f, "method": args.method, "solver_stats": stats}, out)
        return
    out.write(f"{f:.12f}\n")
    if stats is not None:
        _emit(stats, out)


def _cmd_coherence(args, out):
    rho, _ = _load(args.state)
    res = measures.geometric_coherence(rho, _config(args))
    lo, hi = res.bounds
    if args.json:
        _emit({"value": res.value, "fidelity": res.fidelity, "lower_bound": lo, "upper_bound": hi,
               "closest_state": state_to_json(res.closest_state), "solver_stats": res.solver_stats}, out)
        return
    out.write(f"value: {res.value:.12g}\nfidelity: {res.fidelity:.12g}\n"
              f"lower_bound: {lo:.12g}\nupper_bound: {hi:.12g}\n")


def _cmd_gme(args, out):
    rho, dims = _load(args.state)
    if args.dims:
        dims = tuple(args.dims)
    if dims is None:
        raise _ArgError("gme needs --dims DA DB for this input")
    res = measures.gme_ppt(rho, dims, _config(args))
    label = "exact" if measures.is_exact_gme_dims(dims) else "lower bound"
    if args.json:
        _emit({"value": res.value, "fidelity": res.fidelity, "label": label, "dims": list(dims),
               "closest_state": state_to_json(res.closest_state), "solver_stats": res.solver_stats}, out)
        return
    out.write(f"value: {res.value:.12g} ({label})\nfidelity: {res.fidelity:.12g}\n")


def _cmd_gen(args, out):
    spec = StateFamilySpec.parse(args.spec)
    rho = spec.build()
    write_state_file(args.out, rho, spec.dims, {"family": str(spec)})
    if args.json:
        _emit({"written": args.out, "family": str(spec), "dim": rho.dim}, out)
    else:
        out.write(f"wrote {spec} to {args.out}\n")


def _report(report, args, out):
    # CSV goes to --out or stdout; the summary goes wherever the CSV is not
    report.write_csv(args.out or out)
    dest = out if args.out else sys.stderr
    if args.json:
        _emit({"family": report.family, "summary": report.summary}, dest)
    else:
        dest.write(f"# {report.family}\n{experiments.format_summary(report.summary)}\n")


def _cmd_sweep(args, out):
    grid = experiments.parse_range(args.param_range)
    report = experiments.run_sweep(args.pattern, grid, args.measure, args.dims, _config(args),
                                   max(args.jobs, 1))
    _report(report, args, out)


def _cmd_bench(args, out):
    report = experiments.run_bench(args.kind, args.count, args.seed, _config(args), max(args.jobs, 1))
    _report(report, args, out)


_COMMANDS = {
    "fidelity": _cmd_fidelity,
    "coherence": _cmd_coherence,
    "gme": _cmd_gme,
    "gen": _cmd_gen,
    "sweep": _cmd_sweep,
    "bench": _cmd_bench,
}


def _join_negative_range(argv: list[str]) -> list[str]:
    """Let ``--param-range -1:1:9`` through; argparse would read it as a flag."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok == "--param-range":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = _join_negative_range(list(sys.argv[1:] if argv is None else argv))
    try:
        args = build_parser().parse_args(argv)
        _COMMANDS[args.command](args, out)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (SolverError, NoConvergence) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (_ArgError, GeoMeasuresError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
