"""Entry point: run the HTTP service over a journal directory."""

from __future__ import annotations

import argparse
from pathlib import Path

import uvicorn

from ..journal import Journal
from ..platform import Platform
from .app import create_app


def build(journal_dir: str | None) -> Platform:
    if journal_dir is None:
        return Platform()
    root = Path(journal_dir)
    root.mkdir(parents=True, exist_ok=True)
    return Platform(journal=Journal(root / "journal.log"), snapshot_dir=root / "snapshots")


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(prog="quotaflow-serve")
    parser.add_argument("--journal", help="directory for journal.log and snapshots (default: in-memory)")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args(argv)
    app = create_app(build(args.journal))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
