#!/usr/bin/env python3
"""
mixbound.py - Orchestrator for simulation, bound checks and constant estimation

Subcommands:
    simulate <config.json>            run a scenario, stream records, check bounds
    estimate-constants <config.json>  ensemble estimates of the functional-inequality constants
    plot <records.ndjson> <out.svg>   chart a record series against its fitted bounds

Exit status: 0 success (also for under-resolved runs, with a warning),
1 configuration or input error, 2 solver failure, 3 a requested check does
not hold.
"""

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Dict, List, Sequence

from bounds import (
    BoundReport,
    conservation_drifts,
    estimate_jacobian_bmo_constant,
    estimate_riesz_bmo_constant,
    exponent_gap,
    no_perfect_mixing,
    run_checks,
)
from config import RunConfig, load_estimate_config, load_run_config, prepare_directory
from console import (
    SYMBOLS,
    Colors,
    print_banner,
    print_step_error,
    print_step_header,
    print_step_info,
    print_step_success,
    print_step_warning,
    print_sub_step,
    print_table,
)
from diagnostics import UNDER_RESOLVED_FRACTION, DiagnosticRecord
from dynamics import FlowState, ListSink, run
from errors import MixboundError, RecordError, StepSizeError
from norms import BmoConfig
from plotting import plot_records
from records import CsvSink, NdjsonSink, TeeSink, read_records, write_json
from scenarios import build, describe
from spectral import Grid

logger = logging.getLogger("mixbound")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2
EXIT_CHECK_FAILED = 3

ESTIMATORS = {
    "jacobian_bmo": estimate_jacobian_bmo_constant,
    "riesz_bmo": estimate_riesz_bmo_constant,
}


def _fmt(value) -> str:
    return "-" if value is None else f"{value:.6g}"


def build_report(config: RunConfig, state0: FlowState, bmo: BmoConfig,
                 records: Sequence[DiagnosticRecord], reports: Sequence[BoundReport]) -> Dict:
    """Run summary written next to the record stream."""
    max_fraction = max(r.resolved_fraction for r in records)
    report = {
        "scenario": describe(config.scenario, state0),
        "bmo": bmo.to_dict(),
        "samples": len(records),
        "t_end": records[-1].t,
        "under_resolved": max_fraction >= UNDER_RESOLVED_FRACTION,
        "max_resolved_fraction": max_fraction,
        "no_perfect_mixing": no_perfect_mixing(records),
        "min_hm1_theta": min(r.hm1_theta for r in records),
        "conservation_drift": conservation_drifts(records),
        "checks": [r.to_dict() for r in reports],
    }
    if len(records) >= 2:
        report["min_sup_minus_bmo_exponent"] = float(exponent_gap(records).min())
    return report


# ═══════════════════════════════════════════════════════════════════════════════
# simulate
# ═══════════════════════════════════════════════════════════════════════════════

def cmd_simulate(config_path: Path) -> int:
    total_steps = 5
    print_banner(f"simulate {config_path}")

    print_step_header(1, total_steps, f"{SYMBOLS['file']} Loading configuration")
    try:
        config = load_run_config(config_path)
        out = prepare_directory(config.outputs.directory)
    except MixboundError as e:
        print_step_error(str(e))
        return EXIT_INPUT
    spec = config.scenario
    print_step_success(f"Scenario: {Colors.BRIGHT_CYAN}{spec.name}{Colors.RESET}")
    print_sub_step("Resolution", f"{spec.n} x {spec.n}")
    print_sub_step("Horizon", f"t_end = {spec.t_end}, sample_every = {spec.sample_every}")
    print_sub_step("Checks", ", ".join(config.checks) or "none")
    print_sub_step("Output", f"{Colors.DIM}{out}{Colors.RESET}")

    print_step_header(2, total_steps, f"{SYMBOLS['gear']} Building initial state")
    try:
        state0 = build(spec)
        bmo = config.bmo.resolve(spec.grid)
    except MixboundError as e:
        print_step_error(str(e))
        return EXIT_INPUT
    print_step_success(f"vorticity: {spec.omega0.family}, scalar: {spec.theta0.family}")
    print_sub_step("BMO radii", f"{len(bmo.radii)} (center stride {bmo.center_stride})")

    print_step_header(3, total_steps, f"{SYMBOLS['wave']} Integrating")
    memory = ListSink()
    records_path = config.outputs.path(config.outputs.records)
    csv_path = config.outputs.path(config.outputs.csv)
    started = time.monotonic()
    try:
        with NdjsonSink(records_path) as ndjson, CsvSink(csv_path) as mirror:
            run(state0, spec.step_control(), spec.t_end, spec.sample_every,
                TeeSink(memory, ndjson, mirror), bmo)
    except StepSizeError as e:
        print_step_error(f"solver failure at t = {e.t:.6g}: {e}")
        return EXIT_SOLVER
    except OSError as e:
        print_step_error(f"cannot write records: {e}")
        return EXIT_INPUT
    records = memory.records
    print_step_success(f"{len(records)} records in {time.monotonic() - started:.1f}s")
    print_sub_step("Records", f"{Colors.DIM}{records_path}{Colors.RESET}")
    print_sub_step("CSV mirror", f"{Colors.DIM}{csv_path}{Colors.RESET}")

    max_fraction = max(r.resolved_fraction for r in records)
    if max_fraction >= UNDER_RESOLVED_FRACTION:
        print_step_warning(f"under-resolved: up to {100 * max_fraction:.2f}% of enstrophy in the top third of modes")

    print_step_header(4, total_steps, f"{SYMBOLS['chart']} Checking bounds")
    reports: List[BoundReport] = []
    if len(records) < 2:
        print_step_warning("a single sample; bound checks need at least two")
    else:
        try:
            reports = run_checks(records, config.checks)
        except MixboundError as e:
            print_step_error(str(e))
            return EXIT_INPUT
    rows = [["check", "lambda_fit", "min margin", "holds"]]
    for r in reports:
        rows.append([r.kind, _fmt(r.lambda_fit), _fmt(min(r.margin_series)), "yes" if r.holds else "NO"])
    if reports:
        print_table("Fitted constants", rows)
    if not no_perfect_mixing(records):
        print_step_warning("hm1_theta reached zero")

    print_step_header(5, total_steps, f"{SYMBOLS['sparkle']} Writing report")
    try:
        report_path = write_json(config.outputs.path(config.outputs.report),
                                 build_report(config, state0, bmo, records, reports))
        print_step_success(f"Saved: {Colors.DIM}{report_path}{Colors.RESET}")
        if config.outputs.plot:
            svg = plot_records(records, config.outputs.path(config.outputs.plot))
            print_step_success(f"Saved: {Colors.DIM}{svg}{Colors.RESET}")
    except (OSError, ValueError) as e:
        print_step_error(f"cannot write report: {e}")
        return EXIT_INPUT

    failed = [r.kind for r in reports if not r.holds]
    if failed:
        print_step_error(f"bound(s) do not hold: {', '.join(failed)}")
        return EXIT_CHECK_FAILED
    return EXIT_OK


# ═══════════════════════════════════════════════════════════════════════════════
# estimate-constants
# ═══════════════════════════════════════════════════════════════════════════════

def cmd_estimate_constants(config_path: Path) -> int:
    print_banner(f"estimate-constants {config_path}")
    total_steps = 3

    print_step_header(1, total_steps, f"{SYMBOLS['file']} Loading configuration")
    try:
        config = load_estimate_config(config_path)
        prepare_directory(config.output.parent, "output")
    except MixboundError as e:
        print_step_error(str(e))
        return EXIT_INPUT
    ens = config.ensemble
    print_step_success(f"ensemble of {ens.size}, seed {ens.seed}, shell [{ens.k_lo}, {ens.k_hi}]")
    print_sub_step("Resolutions", ", ".join(str(n) for n in config.resolutions))
    print_sub_step("Estimators", ", ".join(config.estimators))

    print_step_header(2, total_steps, f"{SYMBOLS['gear']} Evaluating ensembles")
    estimates: Dict[str, Dict[str, dict]] = {}
    rows = [["n", "estimator", "max", "q0.5", "q0.99", "skipped"]]
    for n in config.resolutions:
        grid = Grid(n)
        bmo = config.bmo.resolve(grid)
        estimates[str(n)] = {}
        for name in config.estimators:
            started = time.monotonic()
            est = ESTIMATORS[name](ens, grid, bmo)
            estimates[str(n)][name] = est.to_dict()
            logger.info("%s at n=%d took %.1fs", name, n, time.monotonic() - started)
            rows.append([str(n), name, _fmt(est.max_ratio), _fmt(est.quantiles.get("0.5")),
                         _fmt(est.quantiles.get("0.99")), str(est.skipped)])
            if est.path_error is not None:
                print_sub_step(f"grad v path agreement at n={n}", f"{est.path_error:.2e}")
    print_table("Constant estimates", rows)

    print_step_header(3, total_steps, f"{SYMBOLS['sparkle']} Writing report")
    report = {
        "ensemble": ens.to_dict(),
        "bmo": {str(n): config.bmo.resolve(Grid(n)).to_dict() for n in config.resolutions},
        "estimates": estimates,
    }
    try:
        write_json(config.output, report)
    except (OSError, ValueError) as e:
        print_step_error(f"cannot write report: {e}")
        return EXIT_INPUT
    print_step_success(f"Saved: {Colors.DIM}{config.output}{Colors.RESET}")
    return EXIT_OK


# ═══════════════════════════════════════════════════════════════════════════════
# plot
# ═══════════════════════════════════════════════════════════════════════════════

def cmd_plot(records_path: Path, out_svg: Path) -> int:
    print_step_header(1, 1, f"{SYMBOLS['chart']} Plotting {records_path}")
    try:
        records = read_records(records_path)
        if not records:
            raise RecordError(f"{records_path} contains no records")
        plot_records(records, out_svg)
    except MixboundError as e:
        print_step_error(str(e))
        return EXIT_INPUT
    except OSError as e:
        print_step_error(f"cannot write {out_svg}: {e}")
        return EXIT_INPUT
    print_step_success(f"Saved: {Colors.DIM}{out_svg}{Colors.RESET}")
    if len(records) == 1:
        print_step_info("single record: no bound lines drawn")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="mixbound - 2d Euler passive-scalar mixing-rate bounds",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python mixbound.py simulate configs/shear.json
  python mixbound.py -v estimate-constants configs/constants.json
  python mixbound.py plot runs/shear/records.ndjson runs/shear/mixing.svg

Environment:
  MIXBOUND_WORKERS     cap on worker threads (default: cpu count)
  MIXBOUND_OUTPUT_DIR  output directory when a config omits one
  NO_COLOR             disable coloured output
        """
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="Run a scenario and check the bounds")
    p_sim.add_argument("config", type=Path, help="Run configuration (JSON)")

    p_est = sub.add_parser("estimate-constants", help="Estimate inequality constants over random ensembles")
    p_est.add_argument("config", type=Path, help="Estimate configuration (JSON)")

    p_plot = sub.add_parser("plot", help="Plot a record series against its fitted bounds")
    p_plot.add_argument("records", type=Path, help="NDJSON record file")
    p_plot.add_argument("out_svg", type=Path, help="Output SVG path")

    args = parser.parse_args(argv)

    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    if args.command == "simulate":
        return cmd_simulate(args.config)
    if args.command == "estimate-constants":
        return cmd_estimate_constants(args.config)
    return cmd_plot(args.records, args.out_svg)


if __name__ == "__main__":
    sys.exit(main())
