"""Command-line harness: serve, replay, synth, eval, cosmos decode.

Exit codes: 0 ok, 1 usage error, 2 data error, 3 bind error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .cosmos import PayloadError, decode_payload
from .evaluate import format_eval, run_eval
from .osc import OscSender
from .recording import RecordingParseError
from .replay import load_script, replay
from .session import summary_dict
from .synth import DEFAULT_ARCHETYPES, synth

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BIND = 3


def parse_osc_dest(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    if not host or not port.isdigit():
        raise argparse.ArgumentTypeError(f"expected host:port, got {value!r}")
    return host, int(port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kinaffect",
        description="Embodied-emotion inference engine: movement in, emotion estimates, "
        "OSC control, and a session cosmos out.",
    )
    parser.add_argument("--config", help="JSON config file (default: $AFFECT_CONFIG)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the WebSocket + OSC engine")
    p_serve.add_argument("--ws-port", type=int, default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--osc-dest", type=parse_osc_dest, default=None)
    p_serve.add_argument("--replay", help="recording file to feed in real time")
    p_serve.add_argument("--cosmos-base-url", default=None)

    p_replay = sub.add_parser("replay", help="drive the pipeline from a recording")
    p_replay.add_argument("recording")
    p_replay.add_argument("--script", help="JSON command script")
    pacing = p_replay.add_mutually_exclusive_group()
    pacing.add_argument("--fast", action="store_true", help="process as fast as possible (default)")
    pacing.add_argument("--realtime", action="store_true", help="pace by timestamps")
    p_replay.add_argument("--out", help="write the session report here")
    p_replay.add_argument("--osc", action="store_true", help="emit OSC during replay")
    p_replay.add_argument("--osc-dest", type=parse_osc_dest, default=None)
    p_replay.add_argument("--cosmos-base-url", default=None)

    p_synth = sub.add_parser("synth", help="generate a synthetic gesture recording")
    p_synth.add_argument("--archetype", choices=sorted(DEFAULT_ARCHETYPES), required=True)
    p_synth.add_argument("--persons", type=int, default=1)
    p_synth.add_argument("--duration", type=float, default=30.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True)

    p_eval = sub.add_parser("eval", help="teach-then-recognize evaluation suite")
    p_eval.add_argument("--suite", default="basic")
    p_eval.add_argument("--seed", type=int, default=1)
    p_eval.add_argument("--out", help="write the metrics JSON here")

    p_cosmos = sub.add_parser("cosmos", help="cosmos payload tools")
    cosmos_sub = p_cosmos.add_subparsers(dest="cosmos_command", required=True)
    p_decode = cosmos_sub.add_parser("decode", help="decode a payload or cosmos URL")
    p_decode.add_argument("payload")

    return parser


def _config_overrides(args) -> dict:
    overrides = {}
    if getattr(args, "ws_port", None) is not None:
        overrides["ws_port"] = args.ws_port
    dest = getattr(args, "osc_dest", None)
    if dest is not None:
        overrides["osc_host"], overrides["osc_port"] = dest
    if getattr(args, "cosmos_base_url", None) is not None:
        overrides["cosmos_base_url"] = args.cosmos_base_url
    return overrides


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        config = load_config(args.config, _config_overrides(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "serve":
        from .server import BindError, serve

        try:
            serve(config, host=args.host, replay_path=args.replay)
        except BindError as exc:
            print(f"bind error: {exc}", file=sys.stderr)
            return EXIT_BIND
        return EXIT_OK

    if args.command == "replay":
        script = None
        if args.script:
            try:
                script = load_script(args.script)
            except (OSError, ValueError) as exc:
                print(f"script error: {exc}", file=sys.stderr)
                return EXIT_DATA
        sender = None
        if args.osc:
            sender = OscSender(config.osc_host, config.osc_port)
        try:
            report = replay(
                args.recording, config, script=script,
                realtime=args.realtime, osc_sender=sender,
            )
        except FileNotFoundError as exc:
            print(f"replay error: {exc}", file=sys.stderr)
            return EXIT_DATA
        except RecordingParseError as exc:
            print(f"replay error: {exc}", file=sys.stderr)
            return EXIT_DATA
        except ValueError as exc:
            # scripted command rejected by the session state machine
            print(f"replay error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_DATA
        text = json.dumps(report, separators=(",", ":"), allow_nan=False)
        if args.out:
            Path(args.out).write_text(text)
            print(f"report written to {args.out}")
        else:
            print(text)
        return EXIT_OK

    if args.command == "synth":
        frames = synth(
            DEFAULT_ARCHETYPES[args.archetype],
            persons=args.persons,
            duration=args.duration,
            seed=args.seed,
            out_path=args.out,
        )
        print(f"{frames} frames -> {args.out}")
        return EXIT_OK

    if args.command == "eval":
        try:
            metrics = run_eval(config, seed=args.seed, suite=args.suite)
        except ValueError as exc:
            print(f"eval error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(format_eval(metrics))
        if args.out:
            Path(args.out).write_text(json.dumps(metrics, indent=2))
            print(f"metrics written to {args.out}")
        return EXIT_OK

    if args.command == "cosmos" and args.cosmos_command == "decode":
        payload = args.payload
        if "#" in payload:
            payload = payload.rsplit("#", 1)[1]
        try:
            summary = decode_payload(payload)
        except PayloadError as exc:
            print(f"decode error: {exc}", file=sys.stderr)
            return EXIT_DATA
        print(json.dumps(summary_dict(summary), indent=2))
        return EXIT_OK

    parser.error(f"unknown command {args.command!r}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
