"""Command-line entry point.

Exit codes: 0 success, 1 domain error (zone violations, bad scripts,
failed physics), 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .config import RunConfig, default_config_text, load_config, parse_config
from .errors import ConfigError, QLSpinError, SequenceSyntaxError
from .protocol import BE_MODE, BE_SPIN, P_MODE, P_SPIN, execute, make_world
from .readout import seeded_stream
from .scan import larmor_scan, default_world_factory, run_g_measurement
from .selftest import run_selftest
from .sequence import format_step, parse_sequence, validate
from .state import mean_phonon_number, population

SCAN_CSV = "larmor_scan.csv"
REPORT_JSON = "g_report.json"


class UsageError(Exception):
    pass


def _config(args) -> RunConfig:
    if args.config is None:
        cfg = parse_config(default_config_text())
    else:
        try:
            cfg = load_config(args.config)
        except OSError as e:
            raise UsageError(f"cannot read config: {e}") from None
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _read_sequence(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read sequence: {e}") from None
    return parse_sequence(text, os.path.basename(path))


def _write(path, text):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _report_json(report) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def cmd_validate(args, out):
    cfg = _config(args)
    seq = _read_sequence(args.sequence)
    violations = validate(seq, cfg.protocol.trap)
    for v in violations:
        print(f"{args.sequence}: {v}", file=sys.stderr)
    if violations:
        return 1
    print(f"{args.sequence}: ok ({len(seq)} steps)", file=out)
    return 0


def cmd_run(args, out):
    cfg = _config(args)
    seq = _read_sequence(args.sequence)
    violations = validate(seq, cfg.protocol.trap)
    if violations:
        for v in violations:
            print(f"{args.sequence}: {v}", file=sys.stderr)
        return 1
    world = make_world(cfg.protocol, cfg.proton_spin, cfg.residual_nbar)
    world, events = execute(seq, world, cfg.protocol, seeded_stream(cfg.seed, 0))
    print(f"# seed {cfg.seed}", file=out)
    for ev in events:
        line = f"{ev.index:3d}  {format_step(ev.step)}"
        if ev.p_bright is not None:
            line += f"  p_bright={ev.p_bright:.12g}"
        if ev.photons is not None:
            line += f"  photons={ev.photons}"
        if ev.outcome is not None:
            line += f"  outcome={ev.outcome.value}"
        print(line, file=out)
    q = world.quantum
    print("# final state", file=out)
    print(f"p.spin   P(up) = {population(q, {P_SPIN: 1}):.12g}", file=out)
    print(f"be.spin  P(up) = {population(q, {BE_SPIN: 1}):.12g}", file=out)
    print(f"p.mode   <n>   = {mean_phonon_number(q, P_MODE):.12g}", file=out)
    print(f"be.mode  <n>   = {mean_phonon_number(q, BE_MODE):.12g}", file=out)
    print(f"locations p={world.locations['p']} be={world.locations['be']}", file=out)
    return 0


def cmd_scan(args, out):
    cfg = _config(args)
    if args.kind != "larmor":
        raise UsageError(f"unknown scan kind {args.kind!r}")
    factory = default_world_factory(cfg.protocol, cfg.residual_nbar)
    sr = larmor_scan(cfg.scan, factory, cfg.protocol, threads=args.threads)
    text = sr.to_csv()
    if args.out:
        _write(os.path.join(args.out, SCAN_CSV), text)
    else:
        out.write(text)
    return 0


def cmd_measure_g(args, out):
    cfg = _config(args)
    m = run_g_measurement(cfg.scan, cfg.protocol, cfg.trap_noise, cfg.residual_nbar,
                          threads=args.threads, config_digest=cfg.config_digest)
    outdir = args.out or cfg.output_dir
    _write(os.path.join(outdir, SCAN_CSV), m.scan.to_csv())
    text = _report_json(m.report)
    _write(os.path.join(outdir, REPORT_JSON), text)
    out.write(text)
    return 0


def cmd_selftest(args, out):
    ok = True
    for name, passed, detail in run_selftest():
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}", file=out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration (default: packaged default.cfg)")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--threads", type=int, default=1, help="worker threads (never changes output)")

    p = argparse.ArgumentParser(prog="qlspin", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("run", parents=[common], help="execute a sequence script")
    s.add_argument("sequence")
    s.set_defaults(func=cmd_run)
    s = sub.add_parser("validate", parents=[common], help="check zone rules of a script")
    s.add_argument("sequence")
    s.set_defaults(func=cmd_validate)
    s = sub.add_parser("scan", parents=[common], help="frequency scan, CSV output")
    s.add_argument("kind", choices=["larmor"])
    s.set_defaults(func=cmd_scan)
    s = sub.add_parser("measure-g", parents=[common], help="full g-factor measurement")
    s.set_defaults(func=cmd_measure_g)
    s = sub.add_parser("selftest", help="run the built-in invariant checks")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if getattr(args, "threads", 1) < 1:
        print("qlspin: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args, out)
    except (UsageError, ConfigError) as e:
        print(f"qlspin: {e}", file=sys.stderr)
        return 2
    except SequenceSyntaxError as e:
        for line, col, msg in e.errors:
            print(f"{args.sequence}:{line}:{col}: {msg}", file=sys.stderr)
        return 1
    except QLSpinError as e:
        print(f"qlspin: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
