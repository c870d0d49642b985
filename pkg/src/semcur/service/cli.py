"""Command line entry points: replay, serve, export, genfix."""

from __future__ import annotations

import argparse
import sys

from .config import load_config


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="semcur",
        description="Conversation-to-curation engine: replay sessions, serve "
                    "the live protocol, export analytics, generate fixtures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_replay = sub.add_parser("replay", help="headless end-to-end session run")
    p_replay.add_argument("--transcript", required=True)
    p_replay.add_argument("--script", default=None,
                          help="interaction script (NDJSON)")
    p_replay.add_argument("--config", default=None)
    p_replay.add_argument("--out", required=True)
    p_replay.add_argument("--speed", type=float, default=0.0,
                          help="unused in headless mode; kept for symmetry")
    p_replay.add_argument("--rounds", default=None, help="e.g. 3x480")

    p_serve = sub.add_parser("serve", help="run the live protocol endpoint")
    p_serve.add_argument("--config", default=None)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--out", default=None, help="session log path")

    p_export = sub.add_parser("export", help="regenerate exports from a log")
    p_export.add_argument("--log", required=True)
    p_export.add_argument("--kind", required=True,
                          choices=["metrics", "network", "snapshots"])
    p_export.add_argument("--out", required=True)
    p_export.add_argument("--rounds", default=None)

    p_genfix = sub.add_parser("genfix", help="synthetic depth fixtures + truth")
    p_genfix.add_argument("--seed", type=int, default=0)
    p_genfix.add_argument("--out", required=True)
    p_genfix.add_argument("--commits", type=int, default=25)
    p_genfix.add_argument("--noise", type=float, default=0.0,
                          help="uniform per-pixel noise amplitude in mm")

    args = parser.parse_args(argv)

    if args.command == "replay":
        import dataclasses

        from .runner import run_replay
        config = load_config(args.config)
        if args.rounds:
            config = dataclasses.replace(config, rounds=args.rounds)
        result = run_replay(args.transcript, args.script, config, args.out)
        total = result["metrics"].total
        print(f"session written to {args.out}: "
              f"{total.content_presented} post-its presented, "
              f"{total.content_curated} curated "
              f"(ratio {total.curated_ratio:.3f})")
        return 0

    if args.command == "serve":
        from .server import serve
        config = load_config(args.config)
        out = args.out if args.out is not None else config.session_out
        print(f"serving on ws://{args.host}:{args.port or config.port}")
        serve(config, out_path=out, host=args.host, port=args.port)
        return 0

    if args.command == "export":
        from .runner import export
        written = export(args.log, args.kind, args.out, rounds=args.rounds)
        for path in written:
            print(path)
        return 0

    if args.command == "genfix":
        from ..sense.synth import SynthConfig, write_fixture_set
        cfg = SynthConfig(noise_mm=args.noise)
        out = write_fixture_set(args.out, args.commits, seed=args.seed, cfg=cfg)
        print(f"wrote {args.commits} commits to {out}")
        return 0

    return 1


if __name__ == "__main__":
    sys.exit(main())
