"""Command-line entry point.

Subcommands: train, eval, transfer, gen-track, validate-config. Errors
leave a machine-readable JSON object on stderr and a nonzero exit status.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys

import numpy as np

from ..envs.track import Track, TrackSpec, generate_track
from .config import ConfigError, RunConfig, validate_config
from .profiles import profile
from .run import resolve_out_dir, run_one
from .transfer import evaluate_checkpoint, transfer_protocol


def _fail(kind: str, message: str, code: int = 1) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def _apply_sets(d: dict, sets) -> dict:
    """Apply --set dotted.path=json-value overrides onto a config dict."""
    for item in sets or []:
        path, _, raw = item.partition("=")
        if not _:
            raise ConfigError(f"--set needs key=value, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = d
        keys = path.split(".")
        for k in keys[:-1]:
            node = node.setdefault(k, {})
        node[keys[-1]] = value
    return d


def _load_config(args) -> RunConfig:
    if args.config:
        with open(args.config) as f:
            d = json.load(f)
    elif args.profile:
        d = profile(args.profile).to_dict()
    else:
        raise ConfigError("pass --config FILE or --profile NAME")
    if args.seed is not None:
        d["seed"] = args.seed
    if args.steps is not None:
        d["total_steps"] = args.steps
    if args.variant is not None:
        d["variant"] = args.variant
        d["adaptor"] = {}
    if args.out is not None:
        d["out_dir"] = args.out
    _apply_sets(d, args.set)
    validate_config(d)
    return RunConfig.from_dict(d)


def cmd_train(args) -> int:
    try:
        cfg = _load_config(args)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as e:
        return _fail("config", str(e), 2)
    try:
        summary = run_one(cfg, quiet=False)
    except FloatingPointError as e:
        return _fail("non-finite", str(e))
    print(json.dumps(summary))
    return 0


def cmd_validate(args) -> int:
    try:
        with open(args.config) as f:
            validate_config(json.load(f))
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as e:
        return _fail("config", str(e), 2)
    print("ok")
    return 0


def _tracks_from_args(args) -> dict:
    tracks = {}
    for path in args.tracks or []:
        t = Track.load(path)
        tracks[os.path.splitext(os.path.basename(path))[0]] = t
    for seed in args.track_seeds or []:
        tracks[f"seed{seed}"] = generate_track(seed)
    if not tracks:
        raise ConfigError("no tracks given (use --tracks or --track-seeds)")
    return tracks


def cmd_eval(args) -> int:
    try:
        if not os.path.isdir(args.checkpoint):
            raise FileNotFoundError(f"checkpoint dir {args.checkpoint} not found")
        tracks = _tracks_from_args(args)
    except (ConfigError, FileNotFoundError) as e:
        return _fail("eval", str(e), 2)
    out = resolve_out_dir(args.out)
    os.makedirs(out, exist_ok=True)
    rows = []
    for tname, track in tracks.items():
        res = evaluate_checkpoint(
            args.checkpoint, track, episodes=args.episodes,
            trace_path=os.path.join(out, f"trace_{tname}.csv"))
        for ret, fail, steps in res:
            rows.append({"track": tname, "return": ret, "failure": bool(fail),
                         "steps": steps})
    with open(os.path.join(out, "eval_results.json"), "w") as f:
        json.dump(rows, f, indent=2)
    print(json.dumps(rows))
    return 0


def cmd_transfer(args) -> int:
    try:
        ckpts = sorted(p for pat in args.checkpoints or []
                       for p in glob.glob(pat) if os.path.isdir(p))
        if not ckpts and not args.prior_only:
            raise ConfigError("no checkpoint directories matched")
        tracks = _tracks_from_args(args)
    except (ConfigError, FileNotFoundError) as e:
        return _fail("transfer", str(e), 2)
    out = resolve_out_dir(args.out)
    summary = transfer_protocol(ckpts, tracks, out, prior_only=args.prior_only)
    print(json.dumps(summary))
    return 0


def cmd_gen_track(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    spec = TrackSpec()
    if args.half_width:
        spec.half_width = args.half_width
    if args.base_radius:
        spec.base_radius = args.base_radius
    for seed in args.seeds:
        t = generate_track(seed, spec)
        path = os.path.join(args.out, f"track_{seed}.json")
        t.save(path)
        print(f"{path}: length={t.length:.1f}m min_radius="
              f"{t.min_curve_radius():.1f}m")
    return 0


def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cheq",
                                description="hybrid RL experiment harness")
    sub = p.add_subparsers(dest="cmd", required=True)

    t = sub.add_parser("train", help="run one training config")
    t.add_argument("--config")
    t.add_argument("--profile")
    t.add_argument("--seed", type=int)
    t.add_argument("--steps", type=int)
    t.add_argument("--variant")
    t.add_argument("--out")
    t.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a config entry (dotted path, JSON value)")
    t.set_defaults(fn=cmd_train)

    v = sub.add_parser("validate-config", help="check a config file")
    v.add_argument("--config", required=True)
    v.set_defaults(fn=cmd_validate)

    e = sub.add_parser("eval", help="greedy episodes from a checkpoint")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--tracks", nargs="*")
    e.add_argument("--track-seeds", type=_int_list)
    e.add_argument("--episodes", type=int, default=1)
    e.add_argument("--out", default="eval-out")
    e.set_defaults(fn=cmd_eval)

    tr = sub.add_parser("transfer", help="checkpoint x track evaluation matrix")
    tr.add_argument("--checkpoints", nargs="*", help="checkpoint dir globs")
    tr.add_argument("--tracks", nargs="*")
    tr.add_argument("--track-seeds", type=_int_list)
    tr.add_argument("--prior-only", action="store_true")
    tr.add_argument("--out", default="transfer-out")
    tr.set_defaults(fn=cmd_transfer)

    g = sub.add_parser("gen-track", help="emit procedural track files")
    g.add_argument("--seeds", type=_int_list, required=True)
    g.add_argument("--out", default="tracks")
    g.add_argument("--half-width", type=float)
    g.add_argument("--base-radius", type=float)
    g.set_defaults(fn=cmd_gen_track)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as e:  # keep the CLI contract: nonzero + JSON error
        return _fail(type(e).__name__, str(e))


if __name__ == "__main__":
    sys.exit(main())
