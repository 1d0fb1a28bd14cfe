"""
Training: AdamW, the per-step loss assembly, model selection and the
leave-one-domain-out protocol.
"""

from .evaluate import evaluate, predict
from .fit import FINAL_EVALUATION, build_model, fit, resolve_eval_every, select_best
from .metrics import MetricsWriter, read_metrics
from .optimizer import AdamState, AdamW, grad_norm, optimizer_update
from .run_dir import RunDirectory, read_manifest, read_result
from .runner import RunJob, run_job, run_protocol
from .step import (
    AugmentedPath,
    StepLogits,
    StepResult,
    augmented_logits,
    compute_step_losses,
    prepare_inputs,
    train_step,
)

__all__ = [
    "evaluate",
    "predict",
    "FINAL_EVALUATION",
    "build_model",
    "fit",
    "resolve_eval_every",
    "select_best",
    "MetricsWriter",
    "read_metrics",
    "AdamState",
    "AdamW",
    "grad_norm",
    "optimizer_update",
    "RunDirectory",
    "read_manifest",
    "read_result",
    "RunJob",
    "run_job",
    "run_protocol",
    "AugmentedPath",
    "StepLogits",
    "StepResult",
    "augmented_logits",
    "compute_step_losses",
    "prepare_inputs",
    "train_step",
]
