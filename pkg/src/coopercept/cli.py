"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 infeasible bandwidth query,
4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import sys

from .allocation import PolicyKind, link_seed
from .channel import channel_gain, subchannel_capacity
from .geometry import score_profile
from .judger import filter_fleet
from .pipeline import (
    ALL_POLICIES,
    InfeasibleQuery,
    MinBandwidthQuery,
    SweepSpec,
    bandwidth_reduction,
    compare_policies,
    min_required_bandwidth,
    run_pipeline,
    sweep,
)
from .scenario import ScenarioError, fmt_float, load_scenario, write_report

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4

_AXIS_ALIASES = {"power": "transmit_power", "transmit_power": "transmit_power", "bandwidth": "bandwidth"}


def _floats(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _policies(text: str):
    try:
        return [PolicyKind.parse(p.strip()) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _policy(text: str):
    return _policies(text)[0]


def _load(args):
    with open(args.scenario, "rb") as fh:
        config = load_scenario(fh.read())
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    return config


def _table(out, header, rows):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt_float(v) if isinstance(v, float) else v for v in row])


def cmd_run(args, out):
    config = _load(args)
    if args.policy is not None:
        config = config.replace(policy=args.policy)
    data = write_report(run_pipeline(config), args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        out.write(data.decode())
    return EXIT_OK


def cmd_score(args, out):
    config = _load(args)
    result = filter_fleet(config.vehicles, config.ego_id, config.d_max_m, config.judger)
    rows = [(d.cav_id, d.distance_m, result.raw_scores[d.cav_id], d.normalized_score, int(d.kept), d.reason.value)
            for d in result.decisions if d.cav_id != config.ego_id]
    _table(out, ("cav_id", "distance_m", "score_raw_m2", "score_normalized", "kept", "reason"), rows)
    if args.profile_out:
        others = config.collaborators
        r_cav = args.radius or (others[0].sensing_radius_m if others else config.ego.sensing_radius_m)
        profile = score_profile(r_cav, config.ego.sensing_radius_m, config.d_max_m, args.samples)
        with open(args.profile_out, "w", newline="") as fh:
            _table(fh, ("distance_m", "score_m2"), [tuple(map(float, p)) for p in profile])
    return EXIT_OK


def cmd_capacity(args, out):
    config = _load(args)
    ch, ego = config.channel, config.ego
    rows = []
    for v in config.collaborators:
        gain = channel_gain(v.position, ego.position, ch, link_seed(config.seed, v.id))
        rows.append((v.id, float(((v.x_m - ego.x_m) ** 2 + (v.y_m - ego.y_m) ** 2) ** 0.5), gain,
                     subchannel_capacity(gain, ch)))
    _table(out, ("cav_id", "distance_m", "gain", "subchannel_capacity_bps"), rows)
    return EXIT_OK


def cmd_sweep(args, out):
    config = _load(args)
    spec = SweepSpec(_AXIS_ALIASES[args.axis], args.values, args.policies or ALL_POLICIES)
    rows = [(r.axis_value, r.policy, r.proxy_ap, r.bandwidth_consumed_hz) for r in sweep(config, spec)]
    _table(out, (spec.axis, "policy", "proxy_ap", "bandwidth_consumed_hz"), rows)
    return EXIT_OK


def cmd_minbw(args, out):
    config = _load(args)
    query = MinBandwidthQuery(args.target, args.lo, args.hi, args.tol)
    policies = args.policies or [PolicyKind.SMART_COOPER, PolicyKind.C_AOL]
    results = {}
    for p in policies:
        try:
            results[p] = min_required_bandwidth(config, query, p)
        except InfeasibleQuery:
            results[p] = None
    _table(out, ("policy", "target_ap", "min_bandwidth_hz"),
           [(p.value, query.target_ap, "infeasible" if w is None else w) for p, w in results.items()])
    feasible = [w for w in results.values() if w is not None]
    if len(policies) >= 2 and len(feasible) == len(policies):
        w0, w1 = results[policies[0]], results[policies[1]]
        out.write(f"# reduction_{policies[0].value}_vs_{policies[1].value}_percent,"
                  f"{fmt_float(bandwidth_reduction(w0, w1))}\n")
    return EXIT_OK if len(feasible) == len(policies) else EXIT_INFEASIBLE


def cmd_compare(args, out):
    config = _load(args)
    rows = compare_policies(config, args.policies or ALL_POLICIES)
    _table(out, ("rank", "policy", "proxy_ap", "bandwidth_consumed_hz", "kept_count"),
           [(r.rank, r.policy, r.proxy_ap, r.bandwidth_consumed_hz, r.kept_count) for r in rows])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coopercept", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("scenario", help="scenario JSON file")
        p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
        p.set_defaults(func=func)
        return p

    p = command("run", cmd_run, "run one policy and write its report")
    p.add_argument("--policy", type=_policy, default=None)
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("structured", "tabular"), default="structured")

    p = command("score", cmd_score, "per-CAV collaborative-gain scores")
    p.add_argument("--profile-out", default=None, help="write a distance/score profile CSV")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--radius", type=float, default=None, help="collaborator radius for the profile")

    command("capacity", cmd_capacity, "per-link gains and sub-channel capacities")

    p = command("sweep", cmd_sweep, "sweep transmit power or bandwidth")
    p.add_argument("--axis", choices=sorted(_AXIS_ALIASES), required=True)
    p.add_argument("--values", type=_floats, required=True, help="SI units (W or Hz), ascending")
    p.add_argument("--policies", type=_policies, default=None)

    p = command("minbw", cmd_minbw, "minimum bandwidth reaching a target proxy AP")
    p.add_argument("--target", type=float, required=True)
    p.add_argument("--lo", type=float, required=True, help="lower bandwidth bound (Hz)")
    p.add_argument("--hi", type=float, required=True, help="upper bandwidth bound (Hz)")
    p.add_argument("--tol", type=float, default=1e5, help="bisection tolerance (Hz)")
    p.add_argument("--policies", type=_policies, default=None,
                   help="policies to search (default SmartCooper,C-AOL)")

    p = command("compare", cmd_compare, "rank policies on one scenario")
    p.add_argument("--policies", type=_policies, default=None)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return args.func(args, out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
