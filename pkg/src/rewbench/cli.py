"""Command-line interface: run, compare, bound, inspect-partition."""

from __future__ import annotations

import argparse
import json
import sys

from . import kernels
from .errors import ConfigurationError, NumericalError, RewbenchError
from .geometry import BoundingCube, build_domain
from .harness import ALGORITHMS, RunConfig, bound_report, compare, run_experiment
from .partition import build_tree

_VARIANTS = ("paper-formula", "figure-consistent")


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--T", type=int, default=3600, dest="horizon", help="number of rounds")
    p.add_argument("--m", type=int, default=None, help="grid granularity (default: ceil(log2(sqrt(T))))")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variant", choices=_VARIANTS, default="figure-consistent")
    p.add_argument("--out", default=None, help="trace CSV path (manifest and stream sidecars share the stem)")
    p.add_argument("--n", type=int, default=1, help="decision-set dimension")
    p.add_argument("--D", type=float, default=2.0, dest="edge", help="bounding-cube edge length")
    p.add_argument("--L", type=float, default=3.0, dest="lipschitz", help="cost Lipschitz constant")
    p.add_argument("--B", type=float, default=1.0, dest="ceiling", help="cost ceiling")
    p.add_argument("--origin", type=_parse_floats, default=None, help="comma-separated cube lower corner (default: centered at 0)")
    p.add_argument("--backend", choices=("auto",) + kernels.available(), default="auto")
    p.add_argument("--refresh-every", type=int, default=1, help="rounds between offline-optimum refreshes")
    p.add_argument("--ogd-init", type=_parse_floats, default=None, help="comma-separated OGD start point (default: cube upper corner)")


def _config_from(args: argparse.Namespace, algorithm: str) -> RunConfig:
    origin = args.origin if args.origin is not None else tuple(-args.edge / 2.0 for _ in range(args.n))
    return RunConfig(
        algorithm=algorithm,
        horizon=args.horizon,
        seed=args.seed,
        dim=args.n,
        origin=origin,
        edge=args.edge,
        lipschitz=args.lipschitz,
        ceiling=args.ceiling,
        m=args.m,
        variant=args.variant,
        out=args.out,
        refresh_every=args.refresh_every,
        backend=None if args.backend == "auto" else args.backend,
        ogd_start=args.ogd_init,
    )


def _cmd_run(args: argparse.Namespace) -> int:
    trace = run_experiment(_config_from(args, args.alg))
    s = trace.summary
    print(
        f"{s['algorithm']}: T={s['horizon']} m={s['m']} seed={s['seed']} "
        f"total_regret={s['total_regret']:.6g} time_avg_regret={s['final_time_avg_regret']:.6g}"
    )
    if args.out:
        print(f"trace written to {args.out}")
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    algs = [a.strip() for a in args.alg.split(",") if a.strip()]
    result = compare(_config_from(args, a) for a in algs)
    for label, trace in zip(result.labels, result.traces):
        print(f"{label}: time_avg_regret={trace.summary['final_time_avg_regret']:.6g}")
    if args.out:
        result.write_csv(args.out)
        print(f"comparison written to {args.out}")
    return 0


def _cmd_bound(args: argparse.Namespace) -> int:
    report = bound_report(args.n, args.edge, args.lipschitz, args.horizon, args.m)
    print(json.dumps(report.as_dict(), indent=2))
    return 0


def _cmd_inspect(args: argparse.Namespace) -> int:
    if args.n < 1 or args.m < 0:
        raise ConfigurationError("inspect-partition needs n >= 1 and m >= 0")
    cube = BoundingCube((0.0,) * args.n, 1.0)
    domain = build_domain(cube, args.m, lambda x: True, 1.0, seed=0)
    tree = build_tree(domain)
    for layer in range(tree.m + 1):
        for subset in tree.nonempty_subsets(layer):
            coords = ",".join(str(c) for c in subset.coords)
            print(f"{subset.layer}\t{coords}\t{len(tree.member_rows(subset))}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rewbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one algorithm against the benchmark stream")
    p.add_argument("--alg", choices=ALGORITHMS, required=True)
    _add_run_flags(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("compare", help="run several algorithms against one shared stream")
    p.add_argument("--alg", required=True, help="comma-separated algorithms, e.g. rew,hedge,ogd")
    _add_run_flags(p)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("bound", help="evaluate the theoretical regret bounds")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--D", type=float, required=True, dest="edge")
    p.add_argument("--L", type=float, required=True, dest="lipschitz")
    p.add_argument("--T", type=int, required=True, dest="horizon")
    p.add_argument("--m", type=int, default=None)
    p.set_defaults(func=_cmd_bound)

    p = sub.add_parser("inspect-partition", help="dump the non-empty blocks of a full grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=_cmd_inspect)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except RewbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
