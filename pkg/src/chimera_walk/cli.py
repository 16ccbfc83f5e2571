"""Command line entry point: `chimera-walk <experiment> --config cfg.json`.

Flags override config fields (flag > config > default).  On failure a
machine-readable error is written to stderr as JSON and the exit code is
nonzero: 2 for configuration problems, 1 for runtime errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import ChimeraWalkError, ConfigError
from .experiments import EXPERIMENTS, load_config, run


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="chimera-walk",
        description="quantum-walk experiments on chimera graphs")
    ap.add_argument("experiment", choices=EXPERIMENTS,
                    help="which experiment to run")
    ap.add_argument("--config", required=True, help="path to a JSON config file")
    ap.add_argument("--out", default=None, help="output directory override")
    ap.add_argument("--seed", type=int, default=None,
                    help="broken-vertex sampling seed override")
    return ap


def _emit_error(kind: str, exc: Exception) -> None:
    payload = {"error": {"type": kind, "message": str(exc)}}
    if isinstance(exc, ConfigError):
        payload["error"]["field"] = exc.field
    sys.stderr.write(json.dumps(payload) + "\n")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = load_config(args.config)
        config["experiment"] = args.experiment
        manifest = run(config, out_dir=args.out, seed=args.seed)
    except ConfigError as exc:
        _emit_error("config", exc)
        return 2
    except ChimeraWalkError as exc:
        _emit_error("unsupported", exc)
        return 1
    except OSError as exc:
        _emit_error("io", exc)
        return 1
    summary = {"experiment": manifest["experiment"],
               "config_sha256": manifest["config_sha256"],
               "results": manifest["results"]}
    sys.stdout.write(json.dumps(summary) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
