"""Command line entry points: run, trace, serve.

Exit codes: 0 success, 1 stage error, 2 bad arguments (including missing
input files). Diagnostics go to stderr as a single line.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import errors
from .pipeline import (PipelineConfig, SessionState, load_metadata_sidecar,
                       run_pipeline, trace_segment)
from .raster import load_image


def _parse_point(text: str):
    try:
        x, y = text.split(",")
        return int(x), int(y)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="angiotrace")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the pipeline and write stage artifacts")
    run_p.add_argument("image")
    run_p.add_argument("--config", default=None)
    run_p.add_argument("--out", default=None)

    trace_p = sub.add_parser("trace", help="run the pipeline and trace one segment")
    trace_p.add_argument("image")
    trace_p.add_argument("--start", type=_parse_point, required=True)
    trace_p.add_argument("--end", type=_parse_point, required=True)
    trace_p.add_argument("--config", default=None)

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--frontend", default=None,
                         help="directory of viewer static files to serve at /")
    return parser


def _load_inputs(args):
    path = Path(args.image)
    if not path.is_file():
        print(f"file not found: {path}", file=sys.stderr)
        raise SystemExit(2)
    try:
        image = load_image(path)
    except errors.AngiotraceError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)
    config = PipelineConfig()
    if args.config:
        cfg_path = Path(args.config)
        if not cfg_path.is_file():
            print(f"config not found: {cfg_path}", file=sys.stderr)
            raise SystemExit(2)
        try:
            config = PipelineConfig.from_json(cfg_path)
        except (ValueError, TypeError, errors.AngiotraceError) as exc:
            print(f"bad config: {exc}", file=sys.stderr)
            raise SystemExit(2)
    return image, config, path


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn
        from .service import create_app
        uvicorn.run(create_app(frontend_dir=args.frontend),
                    host=args.host, port=args.port)
        return 0

    image, config, path = _load_inputs(args)

    if args.command == "run":
        if args.out:
            config = PipelineConfig(**{**config.__dict__, "output_dir": args.out})
        try:
            result = run_pipeline(image, config)
        except errors.StageError as exc:
            print(str(exc), file=sys.stderr)
            return 1
        summary = {"stages": list(result.stages.keys()),
                   "timings_ms": {k: round(v, 2) for k, v in result.timings_ms.items()},
                   "threshold": result.threshold,
                   "node_count": len(result.graph.nodes)}
        print(json.dumps(summary, indent=2))
        return 0

    if args.command == "trace":
        meta = load_metadata_sidecar(path)
        try:
            result = run_pipeline(image, config)
            session = SessionState("cli", image, result,
                                   pixel_spacing_mm=meta.get("pixel_spacing_mm"))
            record = trace_segment(session, args.start, args.end)
        except (errors.StageError, errors.NoPath, errors.EmptyGraph) as exc:
            print(str(exc), file=sys.stderr)
            return 1
        print(json.dumps(record, indent=2))
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
