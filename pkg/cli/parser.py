"""
argparse surface. Defaults mirror config.py.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from config import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_DEPTH,
    DEFAULT_EMBED_DIM,
    DEFAULT_GAMMA,
    DEFAULT_HEADS,
    DEFAULT_IMAGE_SIZE,
    DEFAULT_LAMBDA,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MAX_STEPS,
    DEFAULT_MLP_RATIO,
    DEFAULT_NOISE_PARAMS,
    DEFAULT_PATCH_SIZE,
    DEFAULT_SEEDS,
    DEFAULT_T1,
    DEFAULT_T2,
    DEFAULT_WEIGHT_DECAY,
    NOISE_KINDS,
    TOOLKIT_VERSION,
)
from models import Variant

from . import commands


def _add_synth(sub) -> None:
    p = sub.add_parser("synth", help="generate a synthetic multi-domain dataset")
    p.add_argument("--classes", type=int, default=4)
    p.add_argument("--domains", type=int, default=3)
    p.add_argument("--per-domain", type=int, default=300)
    p.add_argument("--image-size", type=int, default=DEFAULT_IMAGE_SIZE)
    p.add_argument("--channels", type=int, choices=(1, 3), default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=commands.cmd_synth)


def _add_corrupt(sub) -> None:
    p = sub.add_parser("corrupt", help="append noise-corrupted copies of every domain")
    p.add_argument("--source", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--kinds", default=",".join(NOISE_KINDS), help=f"comma-separated subset of {', '.join(NOISE_KINDS)}")
    p.add_argument("--sigma", type=float, default=DEFAULT_NOISE_PARAMS["gaussian"], help="gaussian sigma")
    p.add_argument("--speckle-sigma", type=float, default=DEFAULT_NOISE_PARAMS["speckle"])
    p.add_argument("--impulse-p", type=float, default=DEFAULT_NOISE_PARAMS["impulse"])
    p.add_argument("--shot-scale", type=float, default=DEFAULT_NOISE_PARAMS["shot"])
    p.add_argument("--suffix", default=None, help="new domain suffix (default: the kind, or 'noisy')")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=commands.cmd_corrupt)


def _add_train(sub) -> None:
    p = sub.add_parser("train", help="run the leave-one-domain-out protocol for one variant")
    p.add_argument("--data", type=Path)
    p.add_argument("--manifest", type=Path, help="rerun the configuration recorded in a manifest.json")
    p.add_argument("--variant", default=Variant.RRLD.value, help=", ".join(v.value for v in Variant))
    p.add_argument("--seeds", default=",".join(str(s) for s in DEFAULT_SEEDS))
    p.add_argument("--targets", default=None, help="comma-separated target domains (default: all)")
    p.add_argument("--out", type=Path, default=None, help="run directory (default: timestamped under the output root)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-registry", action="store_true")

    opt = p.add_argument_group("optimization")
    opt.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    opt.add_argument("--eval-every", type=int, default=None)
    opt.add_argument("--batch-size", type=int, default=DEFAULT_BATCH_SIZE)
    opt.add_argument("--lr", type=float, default=DEFAULT_LEARNING_RATE)
    opt.add_argument("--weight-decay", type=float, default=DEFAULT_WEIGHT_DECAY)
    opt.add_argument("--grad-clip", type=float, default=None)
    opt.add_argument("--float64", action="store_true")
    opt.add_argument("--no-checkpoints", action="store_true")

    loss = p.add_argument_group("losses")
    loss.add_argument("--lambda", dest="lam", type=float, default=DEFAULT_LAMBDA)
    loss.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    loss.add_argument("--t1", type=float, default=DEFAULT_T1)
    loss.add_argument("--t2", type=float, default=DEFAULT_T2)
    loss.add_argument("--detach-ibsd-teacher", action="store_true")
    loss.add_argument("--debug-contracts", action="store_true")

    aug = p.add_argument_group("augmentation")
    aug.add_argument("--policy", type=Path, default=None, help="policy file (default: bundled ImageNet policy)")
    aug.add_argument("--base-augment", action="store_true")

    model = p.add_argument_group("backbone")
    model.add_argument("--image-size", type=int, default=None, help="default: from dataset.json")
    model.add_argument("--channels", type=int, choices=(1, 3), default=None)
    model.add_argument("--patch-size", type=int, default=DEFAULT_PATCH_SIZE)
    model.add_argument("--embed-dim", type=int, default=DEFAULT_EMBED_DIM)
    model.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    model.add_argument("--heads", type=int, default=DEFAULT_HEADS)
    model.add_argument("--mlp-ratio", type=float, default=DEFAULT_MLP_RATIO)
    model.add_argument("--tap-min", type=int, default=1)
    model.add_argument("--tap-max", type=int, default=None)
    model.add_argument("--init-seed", type=int, default=0)
    p.set_defaults(handler=commands.cmd_train)


def _add_eval(sub) -> None:
    p = sub.add_parser("eval", help="accuracy of a checkpoint on every domain")
    p.add_argument("--checkpoint", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--json", type=Path, default=None)
    p.set_defaults(handler=commands.cmd_eval)


def _add_report(sub) -> None:
    p = sub.add_parser("report", help="mean ± std table over completed runs")
    p.add_argument("runs", nargs="*", type=Path, help="run directories or result.json files")
    p.add_argument("--registry", action="store_true", help="latest registered run of every variant")
    p.add_argument("--json", type=Path, default=None)
    p.add_argument("--docx", type=Path, default=None)
    p.set_defaults(handler=commands.cmd_report)


def _add_selftest(sub) -> None:
    p = sub.add_parser("selftest", help="loss, gradient, stop-gradient and no-leak checks")
    p.add_argument("--float64", action="store_true", default=True)
    p.add_argument("--float32", dest="float64", action="store_false")
    p.add_argument("--break", dest="break_", choices=("stopgrad",), default=None, help=argparse.SUPPRESS)
    p.set_defaults(handler=commands.cmd_selftest)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rrld", description="Robust representation learning with self-distillation")
    parser.add_argument("--version", action="version", version=TOOLKIT_VERSION)
    parser.add_argument("--log-level", default="INFO", choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    sub = parser.add_subparsers(dest="command", required=True)
    _add_synth(sub)
    _add_corrupt(sub)
    _add_train(sub)
    _add_eval(sub)
    _add_report(sub)
    _add_selftest(sub)
    return parser
