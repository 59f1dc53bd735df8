"""Command line front end.

Exit codes: 0 on success, 2 for configuration problems (bad file,
unknown unit, malformed line), 3 for scenario-level problems (bad
roster or parameter combination).
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigDocument, ConfigError, parse_config_file
from .scenarios import ScenarioError
from .scenarios.bench import run_bench
from .scenarios.mesh import MODES, run_mesh
from .scenarios.pattern_sweep import run_pattern_sweep

CONFIG_EXIT = 2
SCENARIO_EXIT = 3


def _load(path: str | None) -> ConfigDocument:
    if path is None:
        return ConfigDocument()
    return parse_config_file(path)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirsim",
        description="Discrete-event simulator for directional radio networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser(
        "pattern-sweep", help="sample a directional beacon with orbiting probes"
    )
    sweep.add_argument("--config", metavar="FILE")
    sweep.add_argument("--out", metavar="DIR", required=True)

    mesh = sub.add_parser("mesh", help="relay chain between two clients")
    mesh.add_argument("--config", metavar="FILE")
    mesh.add_argument("--mode", choices=MODES, required=True)
    mesh.add_argument("--seed", type=int, default=0, metavar="N")
    mesh.add_argument("--out", metavar="DIR", required=True)

    bench = sub.add_parser("bench", help="time neighbor maintenance procedures")
    bench.add_argument("--config", metavar="FILE")
    bench.add_argument("--procedure", type=int, choices=(1, 2, 3), required=True)
    bench.add_argument("--hosts", type=int, metavar="N")
    bench.add_argument("--repeats", type=int, metavar="K")
    bench.add_argument("--seed", type=int, default=0, metavar="N")
    bench.add_argument(
        "--parallel", action="store_true",
        help="run repetitions in worker processes; wall times then overlap "
             "and are not comparable across procedures",
    )
    bench.add_argument("--out", metavar="DIR", required=True)

    check = sub.add_parser("validate-config", help="parse a config and report")
    check.add_argument("file", metavar="FILE")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate-config":
            doc = parse_config_file(args.file)
            print(f"{args.file}: {len(doc)} entries ok")
            return 0
        if args.command == "pattern-sweep":
            out = run_pattern_sweep(_load(args.config), out_dir=args.out)
            print(f"wrote {out['csv_path']} ({len(out['rows'])} rows)")
            return 0
        if args.command == "mesh":
            out = run_mesh(_load(args.config), args.mode, args.seed, out_dir=args.out)
            print(
                f"wrote {out['csv_path']} "
                f"(throughput {out['throughput_bps']:.0f} bps, "
                f"{out['total_losses']} losses)"
            )
            return 0
        out = run_bench(
            _load(args.config), args.procedure,
            hosts=args.hosts, repeats=args.repeats, seed=args.seed,
            out_dir=args.out, parallel=args.parallel,
        )
        print(f"wrote {out['csv_path']} ({len(out['rows'])} repetitions)")
        return 0
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_EXIT
    except (ScenarioError, ValueError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return SCENARIO_EXIT


if __name__ == "__main__":
    sys.exit(main())
