"""Run the service: python3 -m chartshim --mode stub --fixtures DIR"""

from __future__ import annotations

import argparse

import uvicorn

from .service import ShimConfig, create_app


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="chartshim", description="Inference service for the backend wire protocol"
    )
    parser.add_argument("--mode", choices=("stub", "model"), default="stub")
    parser.add_argument("--fixtures", help="fixture directory (stub mode)")
    parser.add_argument(
        "--adapter", help="model adapter as module:attribute (model mode)"
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8040)
    parser.add_argument("--log-level", default="info")
    args = parser.parse_args(argv)

    try:
        config = ShimConfig(
            mode=args.mode, fixture_dir=args.fixtures, adapter=args.adapter
        )
        app = create_app(config)
    except ValueError as exc:
        parser.error(str(exc))
    uvicorn.run(app, host=args.host, port=args.port, log_level=args.log_level)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
