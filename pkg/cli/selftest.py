"""
Release-gate checks: loss oracles, finite-difference gradients, the
stop-gradient trajectory comparison and the protocol no-leak tracker.

Each check returns a CheckResult instead of raising, so the command can
print a full summary and exit nonzero when anything failed.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import torch
from rich.table import Table

from augment import default_policy
from backbone import init_model
from data import SyntheticConfig, build_protocol, generate_synthetic, stack_samples, train_count
from losses import agsd_loss, cross_entropy, ibsd_loss, kl_div, softmax_temp, total_loss
from models import BackboneConfig, LossConfig, TrainConfig, Variant
from trainer import (
    FINAL_EVALUATION,
    AdamW,
    AugmentedPath,
    augmented_logits,
    compute_step_losses,
    fit,
    train_step,
)
from utils import make_generator, parameter_checksum

logger = logging.getLogger(__name__)

GRADIENT_VARIANTS = (Variant.ERM, Variant.IBSD_ONLY, Variant.AGSD_ONLY, Variant.RRLD)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


# -- naive oracles ---------------------------------------------------------

def _naive_softmax(row: list[float], t: float) -> list[float]:
    scaled = [v / t for v in row]
    top = max(scaled)
    exps = [math.exp(v - top) for v in scaled]
    total = sum(exps)
    return [e / total for e in exps]


def _naive_kl(p: list[float], q: list[float]) -> float:
    return sum(pj * (math.log(pj) - math.log(max(qj, 1e-12))) for pj, qj in zip(p, q) if pj > 0)


def naive_distillation(a: torch.Tensor, b: torch.Tensor, t: float) -> float:
    rows = [
        _naive_kl(_naive_softmax(ra, t), _naive_softmax(rb, t))
        for ra, rb in zip(a.tolist(), b.tolist())
    ]
    return sum(rows) / len(rows)


def naive_cross_entropy(labels: list[int], logits: torch.Tensor) -> float:
    rows = [-math.log(max(_naive_softmax(r, 1.0)[y], 1e-12)) for y, r in zip(labels, logits.tolist())]
    return sum(rows) / len(rows)


def check_loss_oracles(instances: int = 1000, seed: int = 0) -> CheckResult:
    gen = make_generator(seed)
    worst = 0.0
    for _ in range(instances):
        c = int(torch.randint(2, 17, (1,), generator=gen))
        batch = int(torch.randint(1, 5, (1,), generator=gen))
        a = torch.randn(batch, c, generator=gen, dtype=torch.float64) * 3
        b = torch.randn(batch, c, generator=gen, dtype=torch.float64) * 3
        t = float(0.5 + 5 * torch.rand(1, generator=gen, dtype=torch.float64))
        labels = torch.randint(c, (batch,), generator=gen)
        onehot = torch.nn.functional.one_hot(labels, c).to(torch.float64)
        errors = (
            abs(float(ibsd_loss(a, b, t)) - naive_distillation(a, b, t)),
            abs(float(agsd_loss(a, b, t)) - naive_distillation(a, b, t)),
            abs(float(cross_entropy(onehot, softmax_temp(a, 1.0))) - naive_cross_entropy(labels.tolist(), a)),
        )
        worst = max(worst, *errors)
    return CheckResult("loss oracles", worst < 1e-9, f"{instances} instances, max abs err {worst:.2e}")


def check_hand_values() -> CheckResult:
    one = torch.tensor([1.0, 0.0], dtype=torch.float64)
    other = torch.tensor([0.0, 1.0], dtype=torch.float64)
    kl1 = float(kl_div(softmax_temp(one, 1.0), softmax_temp(other, 1.0)))
    kl5 = float(kl_div(softmax_temp(one, 5.0), softmax_temp(other, 5.0)))
    ce = float(cross_entropy(one.unsqueeze(0), torch.tensor([[0.5, 0.5]], dtype=torch.float64)))
    total = float(
        total_loss(
            torch.tensor(1.0), torch.tensor(0.5), torch.tensor(0.25), LossConfig(lam=0.2, gamma=1.0)
        ).total
    )
    ok = (
        abs(kl1 - 0.46212) < 1e-4
        and abs(kl5 - 0.01993) < 1e-4
        and abs(ce - 0.69315) < 1e-5
        and abs(total - 1.35) < 1e-6
    )
    return CheckResult("hand-check values", ok, f"kl(T=1)={kl1:.5f} kl(T=5)={kl5:.5f} ce={ce:.5f} total={total:.4f}")


# -- gradients ---------------------------------------------------------------

def gradient_check_config() -> BackboneConfig:
    return BackboneConfig(
        image_size=8,
        in_channels=3,
        patch_size=4,
        embed_dim=8,
        depth=2,
        heads=2,
        mlp_ratio=2.0,
        num_classes=3,
        seed=7,
    )


def gradient_relative_error(
    variant: Variant,
    float64: bool = True,
    h: Optional[float] = None,
    seed: int = 0,
) -> float:
    """
    Largest per-tensor relative error between autograd and central
    differences of L_total, with x_a, the tap block and l_an held fixed.
    """
    dtype = torch.float64 if float64 else torch.float32
    h = h if h is not None else (1e-5 if float64 else 1e-2)
    model = init_model(gradient_check_config()).to(dtype)
    loss_config = LossConfig()
    gen = make_generator(seed)
    images = torch.rand(4, 3, 8, 8, generator=gen, dtype=dtype)
    augmented = images.flip(-1)
    onehot = torch.nn.functional.one_hot(torch.randint(3, (4,), generator=gen), 3).to(dtype)
    block_index = 1
    l_an = augmented_logits(model, augmented) if variant.uses_agsd else None

    def loss() -> torch.Tensor:
        breakdown, _ = compute_step_losses(
            model, images, onehot, augmented, block_index, variant, loss_config,
            precomputed_augmented_logits=l_an,
        )
        return breakdown.total

    model.zero_grad()
    loss().backward()
    worst = 0.0
    with torch.no_grad():
        for param in model.parameters():
            analytic = param.grad.detach().clone()
            numeric = torch.zeros_like(param)
            flat, flat_numeric = param.view(-1), numeric.view(-1)
            for i in range(flat.numel()):
                original = flat[i].item()
                flat[i] = original + h
                plus = loss().item()
                flat[i] = original - h
                minus = loss().item()
                flat[i] = original
                flat_numeric[i] = (plus - minus) / (2 * h)
            denom = max(float(analytic.norm() + numeric.norm()), 1e-12)
            worst = max(worst, float((analytic - numeric).norm()) / denom)
    return worst


def check_gradients(float64: bool = True) -> CheckResult:
    tolerance = 1e-4 if float64 else 5e-2
    errors = {v.value: gradient_relative_error(v, float64=float64) for v in GRADIENT_VARIANTS}
    worst = max(errors.values())
    detail = ", ".join(f"{k}={e:.1e}" for k, e in errors.items())
    dtype = "float64" if float64 else "float32"
    return CheckResult(f"finite-difference gradients ({dtype})", worst < tolerance, f"{detail} (tol {tolerance:g})")


# -- stop-gradient -----------------------------------------------------------

def stopgrad_trajectory(path: AugmentedPath, steps: int = 10, seed: int = 0) -> list[str]:
    """Parameter checksums after each of `steps` RRLD updates on a fixed batch stream."""
    dataset = generate_synthetic(SyntheticConfig(num_classes=3, num_domains=2, per_domain=16, image_size=8, seed=seed))
    backbone = gradient_check_config()
    model = init_model(backbone).double()
    config = TrainConfig(variant=Variant.RRLD, batch_size=8, learning_rate=1e-2)
    optimizer = AdamW(model.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay)
    rng = make_generator(seed)
    samples = dataset.samples
    policy = default_policy()
    checksums = []
    for step in range(1, steps + 1):
        start = (step * 8) % len(samples)
        batch = stack_samples([samples[(start + i) % len(samples)] for i in range(8)], dataset.num_classes)
        train_step(model, batch, policy, config, rng, optimizer, step=step, path=path)
        checksums.append(parameter_checksum(model))
    return checksums


def check_stopgrad(broken: bool = False) -> CheckResult:
    reference = stopgrad_trajectory(AugmentedPath.NO_GRAD)
    other_path = AugmentedPath.LIVE if broken else AugmentedPath.DETACHED
    other = stopgrad_trajectory(other_path)
    identical = reference == other
    first_diff = next((i + 1 for i, (a, b) in enumerate(zip(reference, other)) if a != b), None)
    detail = (
        f"{len(reference)} steps bit-identical ({other_path.value} vs no_grad)"
        if identical
        else f"trajectories diverge at step {first_diff} ({other_path.value} vs no_grad)"
    )
    return CheckResult("stop-gradient trajectory", identical, detail)


# -- protocol ----------------------------------------------------------------

def check_no_leak(seed: int = 0) -> CheckResult:
    dataset = generate_synthetic(SyntheticConfig(num_classes=2, num_domains=4, per_domain=13, image_size=8, seed=seed))
    backbone = gradient_check_config()
    config = TrainConfig(variant=Variant.RRLD, batch_size=8, max_steps=2, seeds=[seed], save_checkpoints=False)
    problems = []
    for target in dataset.domains:
        split = build_protocol(dataset, target, split_seed=seed)
        train_ids = {s.sample_id for s in split.train}
        val_ids = {s.sample_id for s in split.unified_val}
        if train_ids & val_ids:
            problems.append(f"{target}: train/val overlap")
        if any(s.domain == target for s in split.train + split.unified_val):
            problems.append(f"{target}: target sample outside test")
        for domain in split.source_domains:
            n = len(dataset.domain_samples(domain))
            n_train = sum(s.domain == domain for s in split.train)
            if n_train != train_count(n) or n_train + sum(s.domain == domain for s in split.unified_val) != n:
                problems.append(f"{target}: {domain} split is not floor-80/20")
        fit(split, backbone, config, seed)
        early = split.test.reads_outside(FINAL_EVALUATION)
        if early:
            problems.append(f"{target}: {len(early)} target reads before final evaluation")
        if not split.test.reads:
            problems.append(f"{target}: target never evaluated")
    detail = "; ".join(problems) if problems else f"{len(dataset.domains)} targets clean"
    return CheckResult("protocol no-leak", not problems, detail)


def run_selftest(*, float64: bool = True, break_stopgrad: bool = False) -> list[CheckResult]:
    checks: list[tuple[str, Callable[[], CheckResult]]] = [
        ("loss oracles", check_loss_oracles),
        ("hand-check values", check_hand_values),
        ("gradients", lambda: check_gradients(float64=float64)),
        ("stop-gradient", lambda: check_stopgrad(broken=break_stopgrad)),
        ("no-leak", check_no_leak),
    ]
    results = []
    for name, check in checks:
        logger.info("running %s check", name)
        started = time.perf_counter()
        try:
            result = check()
        except Exception as exc:  # a crashing check is a failed check
            logger.exception("%s check raised", name)
            result = CheckResult(name, False, f"{type(exc).__name__}: {exc}")
        result.seconds = time.perf_counter() - started
        results.append(result)
    return results


def render_selftest(results: list[CheckResult]) -> Table:
    table = Table(title="selftest")
    table.add_column("check", style="cyan")
    table.add_column("result")
    table.add_column("detail")
    table.add_column("s", justify="right")
    for r in results:
        status = "[green]PASS[/green]" if r.passed else "[red]FAIL[/red]"
        table.add_row(r.name, status, r.detail, f"{r.seconds:.1f}")
    return table
