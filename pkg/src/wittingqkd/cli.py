"""Command-line interface: every capability behind one seedable entry point.

Subcommands: states, bases, group, joint, simulate, classical-scan, verify.
All output is JSON on stdout (CSV only for per-round transcript files) and
byte-stable for a given command line; randomness is controlled by --seed,
which defaults to a fixed constant, never the clock.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .configuration import WittingConfiguration, bases_payload, states_payload
from .marking import exhaustive_scan, Marking
from .measurement import intercept_resend_distribution, joint_distribution
from .protocol import DEFAULT_SEED, PartyPolicy, run_session, transcript_csv_rows
from .symmetry import generate_group, group_payload
from .verify import run_checks


def _emit(payload) -> None:
    print(json.dumps(payload, indent=2))


def _cmd_states(args: argparse.Namespace) -> int:
    _emit(states_payload(WittingConfiguration()))
    return 0


def _cmd_bases(args: argparse.Namespace) -> int:
    _emit(bases_payload(WittingConfiguration()))
    return 0


def _cmd_group(args: argparse.Namespace) -> int:
    config = WittingConfiguration()
    table = generate_group(config, max_elements=args.max_elements)
    _emit(group_payload(config, table))
    return 0


def _cmd_joint(args: argparse.Namespace) -> int:
    config = WittingConfiguration()
    for name in ("alice", "bob", "eve"):
        value = getattr(args, name)
        if value is not None and not 0 <= value < 40:
            raise SystemExit(f"{name} basis id must be in 0..39")
    if args.eve is None:
        dist = joint_distribution(config, args.alice, args.bob)
    else:
        dist = intercept_resend_distribution(config, args.alice, args.bob, args.eve)
    _emit(
        {
            "alice": args.alice,
            "bob": args.bob,
            "eve": args.eve,
            "matrix": dist.as_strings(),
        }
    )
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = WittingConfiguration()
    if args.eve is not None and not 0 <= args.eve < 40:
        raise SystemExit("eve basis id must be in 0..39")
    policy_a = PartyPolicy.parse(args.policy, args.seed)
    policy_b = PartyPolicy.parse(args.policy, args.seed)
    transcript = run_session(
        config,
        args.protocol,
        args.rounds,
        policy_a,
        policy_b,
        eve_basis=args.eve,
        seed=args.seed,
        keep_rounds=args.transcript is not None,
    )
    if args.transcript is not None:
        with open(args.transcript, "w", newline="") as fh:
            csv.writer(fh).writerows(transcript_csv_rows(transcript))
    _emit(transcript.to_json_dict())
    return 0


def _cmd_classical_scan(args: argparse.Namespace) -> int:
    config = WittingConfiguration()
    result = exhaustive_scan(config, threads=args.threads)
    if args.dump_max is not None:
        with open(args.dump_max, "w") as fh:
            json.dump(
                [list(Marking.from_index(i).choice) for i in result.maximizer_indices],
                fh,
            )
    _emit(result.to_json_dict())
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    results = run_checks(quick=args.quick)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failed += not r.passed
        print(f"{status} {r.name}: {r.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wittingqkd",
        description="Exact simulator for QKD on the 40-state Witting configuration",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("states", help="dump the 40 states with both numberings")
    sub.add_parser("bases", help="dump the 40 measurement tetrads")

    p_group = sub.add_parser("group", help="generate the symmetry group")
    p_group.add_argument("--max-elements", type=int, default=200_000)

    p_joint = sub.add_parser("joint", help="exact joint outcome distribution")
    p_joint.add_argument("--alice", type=int, required=True, metavar="BASIS")
    p_joint.add_argument("--bob", type=int, required=True, metavar="BASIS")
    p_joint.add_argument("--eve", type=int, default=None, metavar="BASIS")

    p_sim = sub.add_parser("simulate", help="run a two-party session")
    p_sim.add_argument(
        "--protocol",
        choices=("naive", "two-step", "key-agreement"),
        required=True,
    )
    p_sim.add_argument("--rounds", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_sim.add_argument("--eve", type=int, default=None, metavar="BASIS")
    p_sim.add_argument("--policy", default="uniform", metavar="uniform|agreed|correlated:W")
    p_sim.add_argument("--transcript", default=None, metavar="FILE")

    p_scan = sub.add_parser("classical-scan", help="scan all 4^10 markings")
    p_scan.add_argument("--dump-max", default=None, metavar="FILE")
    p_scan.add_argument("--threads", type=int, default=1)

    p_verify = sub.add_parser("verify", help="run the invariant suite")
    p_verify.add_argument(
        "--quick", action="store_true", help="skip group closure and the scan"
    )
    return parser


_HANDLERS = {
    "states": _cmd_states,
    "bases": _cmd_bases,
    "group": _cmd_group,
    "joint": _cmd_joint,
    "simulate": _cmd_simulate,
    "classical-scan": _cmd_classical_scan,
    "verify": _cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
