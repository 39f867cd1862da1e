"""Command-line entry point: ``sparsecancel simulate`` and ``sparsecancel counts``."""

from __future__ import annotations

import argparse
import logging
import sys
import time

from . import __version__
from .config import load_config
from .dictionary import hd_term_count, imd_term_count
from .errors import SparseCancelError
from .harness import run_sweep


def _parse_params(items: list[str]) -> dict[str, int]:
    params = {}
    for item in items:
        for part in item.split(","):
            if not part:
                continue
            key, sep, value = part.partition("=")
            if not sep:
                raise SystemExit(f"counts: expected KEY=VALUE, got {part!r}")
            try:
                params[key.strip()] = int(value)
            except ValueError:
                raise SystemExit(f"counts: {key} must be an integer, got {value!r}") from None
    return params


def _counts(args) -> int:
    params = _parse_params(args.params)
    needed = ("Q", "L") if args.scenario == "hd" else ("p", "q", "L1", "L2")
    missing = [k for k in needed if k not in params]
    extra = sorted(set(params) - set(needed))
    if missing or extra:
        raise SystemExit(f"counts --scenario {args.scenario} needs exactly {', '.join(needed)}")
    if args.scenario == "hd":
        print(hd_term_count(params["Q"], params["L"]))
    else:
        print(imd_term_count(params["p"], params["q"], params["L1"], params["L2"]))
    return 0


def _simulate(args) -> int:
    config = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if overrides:
        config = config.replace(**overrides)
    start = time.perf_counter()
    result = run_sweep(config, args.out, threads=args.threads)
    logging.getLogger(__name__).info(
        "wrote %d rows to %s (%.1f s)", len(result.rows), args.out, time.perf_counter() - start
    )
    failed = result.failures()
    if failed:
        print(f"{len(failed)} solver run(s) failed; see {args.out}.errors.csv", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsecancel",
        description="Receiver HD/IMD self-interference cancellation simulator.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte-Carlo sweep and write CSV results")
    sim.add_argument("--config", required=True, help="scenario TOML file")
    sim.add_argument("--out", required=True, help="output CSV path (aggregates go to <out>.agg.csv)")
    sim.add_argument("--seed", type=int, help="override the master seed")
    sim.add_argument("--trials", type=int, help="override the trial count")
    sim.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    sim.set_defaults(func=_simulate)

    cnt = sub.add_parser("counts", help="print the exact dictionary dimension")
    cnt.add_argument("--scenario", choices=("hd", "imd"), required=True)
    cnt.add_argument(
        "--params", nargs="+", required=True, metavar="KEY=VALUE",
        help="Q=3 L=4 for hd; p=2 q=-1 L1=3 L2=3 for imd",
    )
    cnt.set_defaults(func=_counts)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (SparseCancelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
