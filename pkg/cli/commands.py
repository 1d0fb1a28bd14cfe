"""
Command implementations. Each cmd_* takes the parsed argparse namespace and
returns a process exit code; toolkit errors propagate to main(), which maps
them to their exit codes.
"""

from __future__ import annotations

import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from rich.table import Table

import db
from augment import load_policy, parse_policy, serialize_policy
from backbone import load_checkpoint
from config import DEFAULT_IMAGE_SIZE, DEFAULT_IN_CHANNELS, EXIT_FAILURE, EXIT_OK
from data import (
    SyntheticConfig,
    build_catalog,
    corrupt,
    export_image_folder,
    generate_synthetic,
    load_image_folder,
    read_catalog,
    write_catalog,
)
from generators import build_report, render_rich, render_text, write_docx, write_json
from models import (
    BackboneConfig,
    ConfigurationError,
    DatasetError,
    LossConfig,
    NoiseSpec,
    RunManifest,
    TrainConfig,
    Variant,
)
from trainer import RunDirectory, evaluate, read_manifest, read_result, run_protocol
from utils import (
    attach_run_log,
    detach_run_log,
    enable_determinism,
    get_console,
    get_output_root,
    get_version_string,
)

from .selftest import render_selftest, run_selftest

logger = logging.getLogger(__name__)


def parse_int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"expected a comma-separated list of integers, got {text!r}") from exc


def _load_dataset(data_dir: Path, image_size: Optional[int], channels: Optional[int], min_domains: int = 2):
    catalog = read_catalog(data_dir)
    size = image_size or (catalog.image_size if catalog else DEFAULT_IMAGE_SIZE)
    in_channels = channels or (catalog.in_channels if catalog else DEFAULT_IN_CHANNELS)
    return load_image_folder(data_dir, size, in_channels, min_domains=min_domains), catalog


# -- synth / corrupt -----------------------------------------------------------

def cmd_synth(args) -> int:
    config = SyntheticConfig(
        num_classes=args.classes,
        num_domains=args.domains,
        per_domain=args.per_domain,
        image_size=args.image_size,
        seed=args.seed,
        in_channels=args.channels,
    ).validate()
    dataset = generate_synthetic(config)
    written = export_image_folder(dataset, args.out)
    write_catalog(build_catalog(dataset, args.out, written, generator=config), args.out)
    logger.info("wrote %d images to %s", len(written), args.out)
    return EXIT_OK


def cmd_corrupt(args) -> int:
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    params = {"gaussian": args.sigma, "speckle": args.speckle_sigma, "impulse": args.impulse_p, "shot": args.shot_scale}
    specs = [NoiseSpec(kind=k, param=params.get(k), seed=args.seed).validate() for k in kinds]
    if not args.source.is_dir():
        raise DatasetError("source dataset does not exist", path=str(args.source))

    # a single clean domain is enough; its noisy copy becomes the second one
    dataset, catalog = _load_dataset(args.source, None, None, min_domains=1)
    corrupted = corrupt(dataset, specs, assign_seed=args.seed, domain_suffix=args.suffix)
    written = export_image_folder(corrupted, args.out)
    write_catalog(
        build_catalog(
            corrupted,
            args.out,
            written,
            generator=catalog.generator if catalog else None,
            noise_specs=(list(catalog.noise_specs) if catalog else []) + specs,
            source=str(args.source),
            assign_seed=args.seed,
        ),
        args.out,
    )
    logger.info("wrote %d images (%d new) to %s", len(corrupted), len(corrupted) - len(dataset), args.out)
    return EXIT_OK


# -- train ---------------------------------------------------------------------

def _configs_from_args(args, dataset) -> tuple[BackboneConfig, TrainConfig]:
    backbone = BackboneConfig(
        image_size=dataset.image_size,
        in_channels=dataset.in_channels,
        patch_size=args.patch_size,
        embed_dim=args.embed_dim,
        depth=args.depth,
        heads=args.heads,
        mlp_ratio=args.mlp_ratio,
        num_classes=dataset.num_classes,
        seed=args.init_seed,
        tap_min_block=args.tap_min,
        tap_max_block=args.tap_max,
    ).validate()
    train = TrainConfig(
        loss=LossConfig(
            t1=args.t1,
            t2=args.t2,
            lam=args.lam,
            gamma=args.gamma,
            detach_ibsd_teacher=args.detach_ibsd_teacher,
        ),
        learning_rate=args.lr,
        batch_size=args.batch_size,
        weight_decay=args.weight_decay,
        max_steps=args.max_steps,
        eval_every=args.eval_every,
        seeds=parse_int_list(args.seeds),
        variant=Variant.parse(args.variant),
        grad_clip_norm=args.grad_clip,
        base_augment=args.base_augment,
        float64=args.float64,
        debug_contracts=args.debug_contracts,
        save_checkpoints=not args.no_checkpoints,
    ).validate()
    return backbone, train


def cmd_train(args) -> int:
    enable_determinism(threads=1)
    if args.manifest is not None:
        source = read_manifest(args.manifest)
        data_dir = Path(source.data_dir)
        dataset, catalog = _load_dataset(data_dir, source.backbone.image_size, source.backbone.in_channels)
        backbone, train = source.backbone, source.train
        policy = parse_policy(source.policy_text, name=source.policy_name)
        workers = source.workers
        targets = source.targets or None
        if catalog and source.dataset_fingerprint and catalog.fingerprint != source.dataset_fingerprint:
            logger.warning("dataset under %s changed since the manifest was written", data_dir)
    else:
        if args.data is None:
            raise ConfigurationError("train needs --data or --manifest")
        Variant.parse(args.variant)
        data_dir = args.data
        dataset, catalog = _load_dataset(data_dir, args.image_size, args.channels)
        backbone, train = _configs_from_args(args, dataset)
        policy = load_policy(args.policy)
        workers = args.workers
        targets = [t.strip() for t in args.targets.split(",") if t.strip()] if args.targets else None

    run_dir = RunDirectory.create(args.out, train.variant.value)
    handler = attach_run_log(run_dir.log_path)
    try:
        manifest = RunManifest(
            variant=train.variant,
            backbone=backbone,
            train=train,
            data_dir=str(Path(data_dir).resolve()),
            output_dir=str(run_dir.root.resolve()),
            seeds=list(train.seeds),
            policy_name=policy.name,
            policy_text=serialize_policy(policy),
            noise_specs=list(catalog.noise_specs) if catalog else [],
            dataset_fingerprint=catalog.fingerprint if catalog else "",
            toolkit_version=get_version_string(),
            created_at=datetime.now(timezone.utc).isoformat(),
            workers=workers,
            targets=list(targets) if targets else [],
        )
        run_dir.write_manifest(manifest)
        logger.info("run directory %s", run_dir.root)
        result = run_protocol(
            dataset,
            train,
            backbone,
            policy=policy,
            run_dir=run_dir,
            targets=targets,
            workers=workers,
        )
        run_dir.write_result(result)
        get_console().print(render_rich(build_report([result])))
        if not args.no_registry:
            run_id = db.save_run_result(result, run_dir=str(run_dir.root), manifest=manifest)
            logger.info("registered run %s", run_id)
    finally:
        detach_run_log(handler)
    return EXIT_OK


# -- eval ----------------------------------------------------------------------

def cmd_eval(args) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    config = checkpoint.model.config
    dataset, _ = _load_dataset(args.data, config.image_size, config.in_channels)
    if dataset.num_classes != config.num_classes:
        raise DatasetError(
            f"checkpoint predicts {config.num_classes} classes, dataset has {dataset.num_classes}",
            path=str(args.data),
        )
    accuracies = {d: evaluate(checkpoint.model, dataset.domain_samples(d)) for d in dataset.domains}

    table = Table(title=f"{args.checkpoint.name} (step {checkpoint.step})")
    table.add_column("domain", style="cyan")
    table.add_column("accuracy", justify="right")
    for domain, acc in accuracies.items():
        table.add_row(domain, f"{acc:.4f}")
    get_console().print(table)
    if args.json is not None:
        args.json.parent.mkdir(parents=True, exist_ok=True)
        args.json.write_text(json.dumps({"checkpoint": str(args.checkpoint), "step": checkpoint.step, "accuracy": accuracies}, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


# -- report --------------------------------------------------------------------

def cmd_report(args) -> int:
    if args.registry:
        results = db.latest_results_by_variant()
    else:
        if not args.runs:
            raise ConfigurationError("report needs run directories or --registry")
        results = [read_result(path) for path in args.runs]
    table = build_report(results)

    sys.stdout.write(render_text(table))
    get_console().print(render_rich(table))
    json_path = args.json or get_output_root() / "report.json"
    write_json(table, json_path)
    logger.info("wrote %s", json_path)
    if args.docx is not None:
        write_docx(table, args.docx)
    return EXIT_OK


# -- selftest ------------------------------------------------------------------

def cmd_selftest(args) -> int:
    enable_determinism(threads=1)
    results = run_selftest(float64=args.float64, break_stopgrad=args.break_ == "stopgrad")
    get_console().print(render_selftest(results))
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.error("selftest failed: %s", ", ".join(failed))
        return EXIT_FAILURE
    return EXIT_OK

