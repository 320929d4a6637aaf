"""Command-line entry point: evaluate, synthesize, serve."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .backends import EndpointConfig
from .evalrun import RunSpec, run_evaluate
from .replay import synthesize
from .types import PolicyConfig


def _load_json_arg(value: str) -> dict:
    """Accept either a JSON file path or an inline JSON object."""
    if os.path.exists(value):
        with open(value, "r", encoding="utf-8") as f:
            return json.load(f)
    try:
        return json.loads(value)
    except ValueError as e:
        raise SystemExit(f"--policy/--config: not a file and not valid JSON: {e}")


def _cmd_evaluate(args) -> int:
    policy = PolicyConfig.from_dict(_load_json_arg(args.policy)) if args.policy else PolicyConfig()
    lexicon = None
    if args.lexicon:
        with open(args.lexicon, "r", encoding="utf-8") as f:
            lexicon = json.load(f)
    endpoint = None
    if args.backend == "external":
        cfg = _load_json_arg(args.endpoint) if args.endpoint else {}
        endpoint = EndpointConfig(**cfg)
    spec = RunSpec(
        replay_path=args.replay,
        refs_path=args.refs,
        policy=policy,
        backend=args.backend,
        lexicon=lexicon,
        endpoint=endpoint,
        out_dir=args.out,
        mode=args.mode,
        seed=args.seed,
        source_lang=args.source_lang,
    )
    try:
        result = run_evaluate(spec)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(result.report.to_table())
    return 0


def _cmd_synthesize(args) -> int:
    script = synthesize(
        n_utterances=args.n_utterances,
        lang=args.lang,
        revision_rate=args.revision_rate,
        seed=args.seed,
    )
    script.save(args.out, args.refs)
    print(f"wrote {len(script.events)} events to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import build_app

    config = _load_json_arg(args.config) if args.config else {}
    try:
        app = build_app(config=config, backend_name=args.backend)
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meetcap")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="replay a script and emit a metrics report")
    p.add_argument("--replay", required=True)
    p.add_argument("--refs", required=True)
    p.add_argument("--policy", help="policy JSON (file path or inline)")
    p.add_argument(
        "--backend", default="identity", choices=["identity", "dictionary", "external"]
    )
    p.add_argument("--lexicon", help="dictionary backend lexicon JSON file")
    p.add_argument("--endpoint", help="external backend endpoint JSON")
    p.add_argument("--out", help="output directory for artifacts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", default="virtual", choices=["virtual", "realtime"])
    p.add_argument("--source-lang", default="en")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("synthesize", help="generate a synthetic replay script")
    p.add_argument("--out", required=True, help="events JSONL path")
    p.add_argument("--refs", required=True, help="references JSONL path")
    p.add_argument("--n-utterances", type=int, default=10)
    p.add_argument("--lang", default="en")
    p.add_argument("--revision-rate", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_synthesize)

    p = sub.add_parser("serve", help="run the live captioning server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--config", help="server config JSON (file path or inline)")
    p.add_argument(
        "--backend", default="identity", choices=["identity", "dictionary", "external"]
    )
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
