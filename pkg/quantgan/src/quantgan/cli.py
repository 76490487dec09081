"""quantgan CLI: train on a returns CSV, generate ensemble files.

Configuration comes from a single TOML file (``--config``) plus ``--seed``;
seed given on the command line overrides the config.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .generate import generate, write_ensemble
from .train import GanConfig, load_checkpoint, load_returns_csv, save_checkpoint, train


def _config_from_file(path, seed=None) -> GanConfig:
    raw = {}
    if path:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    known = {f.name for f in fields(GanConfig)}
    unknown = set(raw) - known - {"frequency"}
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    kwargs = {k: v for k, v in raw.items() if k in known}
    if seed is not None:
        kwargs["seed"] = seed
    return GanConfig(**kwargs), raw.get("frequency", "daily")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="quantgan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train")
    p.add_argument("--returns", type=Path, required=True,
                   help="ReturnSeries CSV (value per line)")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--checkpoint", type=Path, default=Path("quantgan.pt"))

    p = sub.add_parser("generate")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--n-paths", type=int, default=10000)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True,
                   help="ensemble file (.csv or binary)")

    args = parser.parse_args(argv)
    try:
        if args.command == "train":
            cfg, frequency = _config_from_file(args.config, args.seed)
            returns = load_returns_csv(args.returns)
            ckpt = train(returns, cfg, frequency=frequency)
            save_checkpoint(ckpt, args.checkpoint)
            print(f"wrote {args.checkpoint} ({ckpt['steps_done']} steps)")
        else:
            ckpt = load_checkpoint(args.checkpoint)
            paths = generate(ckpt, args.n_paths, args.length, seed=args.seed)
            out = write_ensemble(paths, args.out,
                                 frequency=ckpt.get("frequency", "daily"))
            print(f"wrote {out} ({args.n_paths} x {args.length})")
        return 0
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
