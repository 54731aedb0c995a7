"""Operator entry point: topology inspection, batch runs, invariant suites.

Exit codes: 0 ok, 2 config/usage error, 3 I/O error, 4 scientific failure
(an oracle mismatch among claimed successes, or a failed invariant suite).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import build, verify
from .build import Emit, Gate, Measure, Optical
from .decoder import wire_line
from .netsim import ChainConfig, run_batch, survival_from_length

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_SCIENCE = 4

CONFIG_KEYS = {
    "hops",
    "arms",
    "branching",
    "p_survive",
    "length_km",
    "loss_db_per_km",
    "measure_error",
    "bsm_success",
    "round_trip_ratio",
    "indirect_majority",
    "trials",
    "seed",
    "workers",
    "out",
    "format",
}


class ConfigError(ValueError):
    pass


def parse_branching(text: str):
    try:
        return build.branching_vector(int(x) for x in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad branching vector {text!r}: {exc}") from exc


def load_config(path: str) -> dict:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(obj) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return obj


def chain_config_from(obj: dict) -> ChainConfig:
    if "p_survive" in obj and "length_km" in obj:
        raise ConfigError("give either p_survive or length_km, not both")
    p_survive = obj.get("p_survive", 1.0)
    if "length_km" in obj:
        p_survive = survival_from_length(
            obj["length_km"], obj.get("loss_db_per_km", 0.2)
        )
    try:
        return ChainConfig(
            hops=int(obj.get("hops", 0)),
            arms=int(obj.get("arms", 1)),
            branching=build.branching_vector(obj.get("branching", (1,))),
            p_survive=float(p_survive),
            measure_error=float(obj.get("measure_error", 0.0)),
            bsm_success=float(obj.get("bsm_success", 0.5)),
            round_trip_ratio=int(obj.get("round_trip_ratio", 0)),
            indirect_majority=obj.get("indirect_majority"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _format_event(ev) -> str:
    if isinstance(ev, Emit):
        return f"emit   e{ev.line} q{ev.emitter} -> photon q{ev.photon}"
    if isinstance(ev, Gate):
        qs = " ".join(f"q{t}" for t in ev.targets)
        return f"gate   {ev.name} {qs}"
    if isinstance(ev, Measure):
        return f"meas   {ev.basis} e{ev.line} q{ev.qubit}"
    if isinstance(ev, Optical):
        return f"optic  H photon q{ev.photon}"
    return repr(ev)


def cmd_topology(args) -> int:
    try:
        b = parse_branching(args.branching)
        report = build.resource_report(args.arms, b, args.ratio)
        layout, schedule = build.compile_half_rgs(args.arms, b)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = args._print
    out(f"half layout: {args.arms} arm(s), branching {list(b)}")
    out(f"emitter line length: {layout.line_length}")
    for arm in layout.arms:
        sizes = "/".join(str(len(lvl)) for lvl in arm.levels)
        out(f"  arm {arm.index}: outer q{arm.outer}, tree levels {sizes}")
    order = " ".join(f"q{p}" for p in layout.transmission_order)
    out(f"transmission order: {order}")
    if args.schedule:
        out("schedule:")
        for ev in schedule.events:
            out(f"  {_format_event(ev)}")
    out("resource report:")
    for key, value in report.items():
        out(f"  {key}={value}")
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        obj = load_config(args.config)
        cfg = chain_config_from(obj)
        trials = args.trials if args.trials is not None else int(obj.get("trials", 100))
        seed = args.seed if args.seed is not None else int(obj.get("seed", 0))
        workers = args.workers if args.workers is not None else int(obj.get("workers", 1))
        fmt = args.format or obj.get("format", "line-records")
        out_dir = args.out or obj.get("out")
        if fmt not in ("line-records", "table"):
            raise ConfigError(f"unknown format {fmt!r}")
        if trials < 1 or workers < 1:
            raise ConfigError("trials and workers must be >= 1")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO

    batch = run_batch(cfg, trials, seed=seed, workers=workers)
    summary = batch.summary_json()

    if out_dir is not None:
        try:
            target = Path(out_dir)
            target.mkdir(parents=True, exist_ok=True)
            if fmt == "line-records":
                (target / "records.jsonl").write_text(batch.records_jsonl())
            else:
                (target / "records.txt").write_text(_records_table(batch))
            (target / "summary.json").write_text(summary + "\n")
            report_lines = [
                wire_line(rec.trial_id, j, rep)
                for rec in batch.records
                for j, rep in enumerate(rec.reports)
            ]
            (target / "reports.csv").write_text(
                "trial_id,absa_id,success,parity_left,parity_right\n"
                + "\n".join(report_lines)
                + "\n"
            )
        except OSError as exc:
            print(f"io error: {exc}", file=sys.stderr)
            return EXIT_IO

    args._print(summary)
    if batch.oracle_failures:
        print(
            f"scientific failure: {batch.oracle_failures} claimed successes failed oracle verification",
            file=sys.stderr,
        )
        return EXIT_SCIENCE
    return EXIT_OK


def _records_table(batch) -> str:
    header = f"{'trial':>6} {'success':>7} {'oracle':>6} {'lost':>5}  chosen_arms"
    lines = [header]
    for rec in batch.records:
        oracle = "-" if rec.oracle_pass is None else ("pass" if rec.oracle_pass else "FAIL")
        chosen = ",".join("-" if c is None else str(c) for c in rec.chosen_arms)
        lines.append(
            f"{rec.trial_id:>6} {str(rec.success):>7} {oracle:>6} {rec.photons_lost:>5}  {chosen}"
        )
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    results = verify.run_all(quick=args.quick, workers=args.workers or 1)
    for res in results:
        args._print(res.line())
    if all(r.passed for r in results):
        args._print(f"all {len(results)} suites passed")
        return EXIT_OK
    return EXIT_SCIENCE


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rgsim",
        description="Simulate repeater chains built from emitter-anchored photonic graph-state halves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    topo = sub.add_parser("topology", help="print layout, schedule and resource counts")
    topo.add_argument("-m", "--arms", type=int, required=True)
    topo.add_argument("-b", "--branching", required=True, help="comma-separated, e.g. 2,3")
    topo.add_argument("-r", "--ratio", type=int, default=0,
                      help="correction round-trip time over generation time")
    topo.add_argument("--schedule", action="store_true", help="also list every event")
    topo.set_defaults(func=cmd_topology)

    run = sub.add_parser("run", help="run a batch from a JSON config file")
    run.add_argument("--config", required=True)
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--out", help="directory for records/summary/report files")
    run.add_argument("--format", choices=["line-records", "table"])
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="run the invariant suites")
    ver.add_argument("--quick", action="store_true", help="reduced sizes for a smoke check")
    ver.add_argument("--workers", type=int, default=1)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    args._print = print
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
