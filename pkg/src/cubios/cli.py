"""Command-line entry points: sim, verify, render, serve.

Exit codes follow the headless-tooling contract: 0 success, 2 when a
session script contains an illegal event, 1 for I/O, parse, or
verification failures (message on stderr).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .games import GAME_NAMES
from .session import (
    CheatPolicy,
    CorruptLog,
    IllegalEvent,
    SessionConfig,
    SessionEvent,
    event_from_json,
    parse_log,
    run_engine,
)
from .surface import render_net
from .verify import SUITES, VerifyFailure, run_suite


def parse_policy(text: str) -> CheatPolicy:
    """accept | forfeit | penalize:POINTS[:TICKS]"""
    if text == "accept":
        return CheatPolicy.accept()
    if text == "forfeit":
        return CheatPolicy.forfeit()
    if text.startswith("penalize:"):
        parts = text.split(":")[1:]
        if len(parts) in (1, 2):
            try:
                points = int(parts[0])
                ticks = int(parts[1]) if len(parts) == 2 else 0
                return CheatPolicy.penalize(points, ticks)
            except ValueError:
                pass
    raise argparse.ArgumentTypeError(
        f"bad policy {text!r}: expected accept, forfeit, or penalize:POINTS[:TICKS]"
    )


def _dictionary_path(flag_value: str | None) -> str | None:
    # the environment override wins over the flag
    return os.environ.get("CUBIOS_DICT") or flag_value


def read_script(path: str) -> list[SessionEvent]:
    """One event JSON object per line; blank lines ignored."""
    events = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            events.append(event_from_json(json.loads(line)))
        except (json.JSONDecodeError, CorruptLog) as e:
            raise CorruptLog(f"{path}:{lineno}: {e}") from e
    return events


def _session_config(args: argparse.Namespace) -> SessionConfig:
    return SessionConfig(
        game=args.game,
        seed=args.seed,
        policy=args.policy,
        loss_rate=args.loss_rate,
        dictionary_path=_dictionary_path(args.dictionary),
    )


def cmd_sim(args: argparse.Namespace) -> int:
    try:
        events = read_script(args.script) if args.script else []
    except (OSError, CorruptLog) as e:
        print(f"sim: {e}", file=sys.stderr)
        return 1
    try:
        engine = run_engine(_session_config(args), events, ticks=args.ticks)
    except IllegalEvent as e:
        print(f"sim: illegal event: {e}", file=sys.stderr)
        return 2
    out = {"digest": engine.digest().to_json(), "log": engine.log_lines()}
    print(json.dumps(out, sort_keys=True, indent=2))
    if args.out:
        try:
            Path(args.out).write_text(engine.log_text(), encoding="utf-8")
        except OSError as e:
            print(f"sim: cannot write {args.out}: {e}", file=sys.stderr)
            return 1
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        run_suite(args.suite, args.budget)
    except VerifyFailure as e:
        print(f"verify: FAIL: {e}", file=sys.stderr)
        return 1
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    try:
        config, events, ticks = parse_log(Path(args.log).read_text(encoding="utf-8"))
    except (OSError, CorruptLog) as e:
        print(f"render: {e}", file=sys.stderr)
        return 1
    if not 0 <= args.at <= ticks:
        print(
            f"render: tick {args.at} out of range (log has {ticks} ticks)",
            file=sys.stderr,
        )
        return 1
    engine = run_engine(config, events, ticks=args.at)
    try:
        Path(args.out).write_bytes(render_net(engine.game.field()))
    except OSError as e:
        print(f"render: cannot write {args.out}: {e}", file=sys.stderr)
        return 1
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(_session_config(args), static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _add_session_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--game", required=True, choices=GAME_NAMES)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--policy", type=parse_policy, default=CheatPolicy.accept())
    p.add_argument("--loss-rate", type=float, default=0.0)
    p.add_argument("--dictionary", help="word list file (wordmatch); CUBIOS_DICT overrides")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubios", description="2x2x2 display-cube twin: sessions, checks, serving"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sim", help="run a session headless from an event script")
    _add_session_flags(p)
    p.add_argument("--script", help="event JSONL file (default: no events)")
    p.add_argument("--ticks", type=int, help="tick count (default: last event tick + 1)")
    p.add_argument("--out", help="also write the session log here")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("verify", help="run an invariant suite")
    p.add_argument("--suite", required=True, choices=sorted(SUITES))
    p.add_argument("--budget", type=int, help="randomized-check count override")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("render", help="replay a log and write the cube net as PPM")
    p.add_argument("--log", required=True)
    p.add_argument("--at", required=True, type=int, help="tick to render")
    p.add_argument("--out", required=True, help="output .ppm path")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("serve", help="serve a live session over WebSocket")
    _add_session_flags(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", help="directory of web UI assets to serve")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
