"""Command-line driver for seeding, scripted scenarios, fuzzing, and the
text-message gateway.

Runs against an embedded engine (``--journal DIR`` keeps it durable across
invocations) or against a running service (``--base-url``).
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime
from pathlib import Path

from ..channels import format_gateway_line, split_for_transport, split_gateway_line
from ..duration import add_duration
from ..errors import QuotaflowError
from ..journal import Journal
from ..platform import Platform
from .client import HttpClient, LocalClient
from .fixtures import seed
from .fuzz import fuzz
from .scripts import parse_script, play


def _client(args):
    if args.base_url:
        return HttpClient(args.base_url, admin_actor=args.actor)
    journal = Journal(Path(args.journal) / "journal.log") if args.journal else Journal()
    return LocalClient(Platform(journal=journal))


def _print_actions(actions: list[dict]) -> None:
    for action in actions:
        if action["channel"] == "text":
            print(format_gateway_line(action["mobile"], action["body"]))
        else:
            print(f"{action['target']} {json.dumps(action['frame'], sort_keys=True)}")


def cmd_seed(args) -> int:
    client = _client(args)
    manifest = seed(client, args.profile, args.seed)
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return 0


def cmd_play(args) -> int:
    client = _client(args)
    steps = parse_script(Path(args.script).read_text())
    result = play(client, steps)
    for line in result.transcript:
        print(line)
    if result.failed:
        print(f"{len(result.failed)} assertion(s) failed", file=sys.stderr)
        return 1
    return 0


def cmd_fuzz(args) -> int:
    if args.base_url:
        print("fuzz runs against the embedded engine only", file=sys.stderr)
        return 2
    summary = fuzz(seed=args.seed, steps=args.steps)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if not summary["open_sessions"] else 1


def cmd_clock(args) -> int:
    client = _client(args)
    now = client.clock_now()
    if args.advance:
        actions = client.advance_clock(add_duration(now, args.advance))
        _print_actions(actions)
    elif args.to:
        actions = client.advance_clock(datetime.fromisoformat(args.to))
        _print_actions(actions)
    print(client.clock_now().isoformat())
    return 0


def cmd_gateway(args) -> int:
    client = _client(args)
    for raw in sys.stdin:
        line = raw.rstrip("\n")
        if not line:
            continue
        try:
            mobile, body = split_gateway_line(line)
            actions = client.send_text(mobile, body)
        except QuotaflowError as exc:
            print(f"! {exc.code} {exc.detail}", flush=True)
            continue
        for action in actions:
            if action["channel"] != "text":
                continue
            for part in split_for_transport(action["body"]):
                print(format_gateway_line(action["mobile"], part), flush=True)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quotaflow-sim")
    parser.add_argument("--journal", help="directory for a durable event journal")
    parser.add_argument("--base-url", help="talk to a running service instead")
    parser.add_argument("--actor", help="org user id for admin calls over HTTP")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seed", help="load a fixture population")
    p.add_argument("--profile", default="demo", choices=["demo", "minimal", "randomized"])
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_seed)

    p = sub.add_parser("play", help="run a scenario script")
    p.add_argument("script")
    p.set_defaults(fn=cmd_play)

    p = sub.add_parser("fuzz", help="random-actor stress run with invariant checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--steps", type=int, default=1000)
    p.set_defaults(fn=cmd_fuzz)

    p = sub.add_parser("clock", help="advance the logical clock")
    p.add_argument("--advance", help="ISO-8601 duration, e.g. P1M or PT45M")
    p.add_argument("--to", help="absolute ISO datetime")
    p.set_defaults(fn=cmd_clock)

    p = sub.add_parser("gateway", help="stdin/stdout text gateway: <mobile>|<body>")
    p.set_defaults(fn=cmd_gateway)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except QuotaflowError as exc:
        print(f"error: {exc.code}: {exc.detail}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
