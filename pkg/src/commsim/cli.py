"""Command-line entry point: ``commsim <command> ...``.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 estimation failure.

RunRecord CSV columns (fixed order):
``scenario, command, epsilon, beta, seed, estimate, oracle, abs_error, bits, wall_time``.
Floats are written with 12 significant digits. Every column except
``wall_time`` is reproducible from the input file, the flags and the seed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import secrets
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import estimator, formats, games
from .bipartite import ip_operator
from .errors import CapExceeded, EstimationFailure, ValidationError
from .harness.smp import simulate_scenario
from .harness.twoway import equality_protocol, run_twoway, smp_charged_bits, twoway_to_smp
from .harness.yao import simulate_twoway_quantum, twoway_scenario, yao_compile
from .matcore import SchmidtState, spectral_norm
from .norms import (balance, diamond_lower, diamond_upper_from, diamond_upper_optimize,
                    flat_witness, standard_witnesses, witness_ratio)
from .oracle import exact_probability

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_ESTIMATION = 0, 1, 2, 3


def fmt(x: float) -> str:
    return f"{x:.12g}"


@dataclass
class RunRecord:
    scenario: str
    command: str
    epsilon: float
    beta: float
    seed: int
    estimate: float
    oracle: float
    abs_error: float
    bits: int
    wall_time: float

    COLUMNS = ("scenario", "command", "epsilon", "beta", "seed", "estimate", "oracle",
               "abs_error", "bits", "wall_time")

    def row(self) -> list[str]:
        d = asdict(self)
        return [fmt(v) if isinstance(v, float) else str(v) for v in (d[c] for c in self.COLUMNS)]

    @classmethod
    def from_row(cls, row: dict) -> "RunRecord":
        est, orc = float(row["estimate"]), float(row["oracle"])
        return cls(row["scenario"], row["command"], float(row["epsilon"]), float(row["beta"]),
                   int(row["seed"]), est, orc, abs(est - orc), int(row["bits"]),
                   float(row["wall_time"]))


def read_records(text: str) -> list[RunRecord]:
    return [RunRecord.from_row(r) for r in csv.DictReader(io.StringIO(text))]


def _write_csv(header, rows, out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def parse_seed(text: str) -> int:
    if text == "random":
        return secrets.randbits(63)
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer or 'random', got {text!r}")


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def _ints(text: str) -> list[int]:
    return [parse_seed(t) for t in text.split(",") if t]


# --- commands ---------------------------------------------------------------

def cmd_oracle(args, out) -> int:
    s = formats.scenario_from_json(formats.read_document(args.scenario))
    print(f"{exact_probability(s):.12f}", file=out)
    return EXIT_OK


def _simulate_record(path: str, s, eps: float, beta: float, seed: int, budget, alpha) -> RunRecord:
    t0 = time.perf_counter()
    res = simulate_scenario(s, eps, beta, seed, budget=budget, alpha=alpha)
    wall = time.perf_counter() - t0
    oracle = exact_probability(s)
    return RunRecord(Path(path).stem, "simulate", eps, beta, seed, res.estimate, oracle,
                     abs(res.estimate - oracle), res.ledger.total, wall)


def cmd_simulate(args, out) -> int:
    s = formats.scenario_from_json(formats.read_document(args.scenario))
    rec = _simulate_record(args.scenario, s, args.eps, args.beta, args.seed, args.budget, args.alpha)
    _write_csv(RunRecord.COLUMNS, [rec.row()], out)
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    records = []
    for path in args.scenarios:
        s = formats.scenario_from_json(formats.read_document(path))
        for eps in args.eps:
            for beta in args.beta:
                for seed in args.seeds:
                    records.append(_simulate_record(path, s, eps, beta, seed, args.budget, 0.0))
    records.sort(key=lambda r: (r.scenario, r.epsilon, r.seed, r.beta))
    _write_csv(RunRecord.COLUMNS, [r.row() for r in records], out)
    return EXIT_OK


def _norm_report(q, method: str, budget: int, seed: int) -> dict:
    report = {"upper": None, "lower": None, "terms": None}
    if method in ("upper", "both"):
        up = diamond_upper_optimize(q, budget, seed)
        report["upper"] = up.upper
        report["terms"] = len(up.witness_decomposition)
    if method in ("lower", "both"):
        report["lower"] = diamond_lower(q, standard_witnesses(q, budget, seed))
    return report


def cmd_norms(args, out) -> int:
    q = formats.operator_from_json(formats.read_document(args.op))
    print(json.dumps(_norm_report(q, args.method, args.budget, args.seed)), file=out)
    return EXIT_OK


def cmd_bench(args, out) -> int:
    q = ip_operator(args.n)
    report = _norm_report(q, args.method, args.budget, args.seed)
    report["n"] = args.n
    if args.method in ("lower", "both"):
        report["flat_lower"] = witness_ratio(q, flat_witness(q))
    print(json.dumps(report), file=out)
    return EXIT_OK


def cmd_game(args, out) -> int:
    game = formats.game_from_json(formats.read_document(args.game))
    truth = games.oracle_distribution(game, args.choiceA, args.choiceB)
    keys = list(truth)
    header = ["run", "outcome"] + [f"est_{a}_{b}" for a, b in keys] + ["L1_to_oracle", "bits"]
    rows = []
    for run in range(args.runs):
        res = games.simulate_game(game, args.choiceA, args.choiceB, args.eps, args.beta,
                                  args.seed + run)
        dist = res.distribution
        rows.append([str(run), f"{res.outcome[0]}:{res.outcome[1]}"]
                    + [fmt(dist[k]) for k in keys]
                    + [fmt(games.statistical_distance(dist, truth)), str(res.ledger.total)])
    _write_csv(header, rows, out)
    return EXIT_OK


def cmd_twoway(args, out) -> int:
    proto = equality_protocol(args.n)
    coins = tuple(int(c) for c in args.coins) if args.coins else ()
    inputs = range(1 << args.n)
    xs = [args.x] if args.x is not None else inputs
    ys = [args.y] if args.y is not None else inputs
    rows = []
    for x in xs:
        for y in ys:
            direct = run_twoway(proto, x, y, coins)
            smp = twoway_to_smp(proto, x, y, coins)
            rows.append([x, y, direct.output, smp.output, direct.ledger.total, smp.ledger.total])
    _write_csv(["x", "y", "direct", "smp", "direct_bits", "smp_bits"], rows, out)
    if any(r[5] != smp_charged_bits(proto.bits_a, proto.bits_b) for r in rows):
        raise AssertionError("SMP ledger disagrees with the analytic cost")
    return EXIT_OK


def cmd_compile(args, out) -> int:
    spec = formats.protocol_from_json(formats.read_document(args.protocol))
    compiled = yao_compile(spec)
    decomp = balance(compiled.measurement_decomposition())
    report = {
        "q": spec.q,
        "terms": len(compiled.terms),
        "max_term_norm": max(max(spectral_norm(a), spectral_norm(b))
                             for a, b in compiled.terms.values()),
        "expanded_terms": len(decomp),
        "expanded_upper": diamond_upper_from(decomp),
        "cap_bound": float(4 ** (spec.q - 1)),
    }
    if args.x is not None and args.y is not None:
        ma, mb = spec.entanglement_dims
        ent = _entanglement(ma, mb, args.schmidt)
        s = twoway_scenario(compiled, args.x, args.y, ent)
        report["acceptance"] = exact_probability(s)
        if args.eps is not None:
            res = simulate_twoway_quantum(spec, args.x, args.y, ent, args.eps, args.beta, args.seed)
            report["estimate"] = res.estimate
            report["bits"] = res.ledger.total
    print(json.dumps(report), file=out)
    return EXIT_OK


def _entanglement(ma: int, mb: int, coefficients) -> SchmidtState:
    """Diagonal shared state ``sum_i sqrt(p_i) |i>|i>``; default is ``|0>|0>``."""
    p = np.asarray(coefficients if coefficients else [1.0], dtype=float)
    r = p.size
    return SchmidtState(p, np.eye(ma, r), np.eye(mb, r))


# --- parser -------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="commsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def sim_flags(sp):
        sp.add_argument("--eps", type=float, default=0.05)
        sp.add_argument("--beta", type=float, default=0.01)
        sp.add_argument("--seed", type=parse_seed, default=estimator.DEFAULT_SEED)

    sp = sub.add_parser("oracle", help="exact acceptance probability of a scenario")
    sp.add_argument("scenario")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("simulate", help="SMP simulation of a scenario, one RunRecord row")
    sp.add_argument("scenario")
    sim_flags(sp)
    sp.add_argument("--budget", type=int, default=None,
                    help="mixing-search restarts (default: operator-Schmidt only)")
    sp.add_argument("--alpha", type=float, default=0.0)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="RunRecord CSV over a grid of eps, beta, seeds")
    sp.add_argument("scenarios", nargs="+")
    sp.add_argument("--eps", type=_floats, default=[0.1, 0.05])
    sp.add_argument("--beta", type=_floats, default=[0.01])
    sp.add_argument("--seeds", type=_ints, default=[estimator.DEFAULT_SEED])
    sp.add_argument("--budget", type=int, default=None)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("norms", help="diamond-norm bounds of an operator")
    sp.add_argument("--op", required=True)
    sp.add_argument("--method", choices=("upper", "lower", "both"), default="both")
    sp.add_argument("--budget", type=int, default=2)
    sp.add_argument("--seed", type=parse_seed, default=0)
    sp.set_defaults(func=cmd_norms)

    sp = sub.add_parser("bench", help="built-in benchmark operators")
    bench = sp.add_subparsers(dest="bench", required=True, parser_class=_Parser)
    ip = bench.add_parser("ip", help="inner-product-mod-2 operator on n-bit strings")
    ip.add_argument("--n", type=int, required=True)
    ip.add_argument("--method", choices=("upper", "lower", "both"), default="both")
    ip.add_argument("--budget", type=int, default=2)
    ip.add_argument("--seed", type=parse_seed, default=0)
    ip.set_defaults(func=cmd_bench)

    sp = sub.add_parser("game", help="simulate a measurement game, one CSV row per run")
    sp.add_argument("game")
    sp.add_argument("--choiceA", type=int, default=0)
    sp.add_argument("--choiceB", type=int, default=0)
    sim_flags(sp)
    sp.add_argument("--runs", type=int, default=1)
    sp.set_defaults(func=cmd_game)

    sp = sub.add_parser("twoway", help="equality protocol: direct run vs SMP conversion")
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--x", type=int, default=None)
    sp.add_argument("--y", type=int, default=None)
    sp.add_argument("--coins", default="", help="shared coin bits, e.g. 0110")
    sp.set_defaults(func=cmd_twoway)

    sp = sub.add_parser("compile", help="compile a two-way quantum protocol")
    sp.add_argument("protocol")
    sp.add_argument("--x", type=int, default=None)
    sp.add_argument("--y", type=int, default=None)
    sp.add_argument("--schmidt", type=_floats, default=None,
                    help="shared-state Schmidt coefficients, e.g. 0.5,0.5")
    sp.add_argument("--eps", type=float, default=None)
    sp.add_argument("--beta", type=float, default=0.1)
    sp.add_argument("--seed", type=parse_seed, default=estimator.DEFAULT_SEED)
    sp.set_defaults(func=cmd_compile)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except (ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (EstimationFailure, CapExceeded) as exc:
        print(f"estimation failed: {exc}", file=sys.stderr)
        return EXIT_ESTIMATION


if __name__ == "__main__":
    raise SystemExit(main())
