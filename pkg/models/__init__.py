"""
Data models for the RRLD toolkit
"""

from .data_models import (
    BackboneConfig,
    LossConfig,
    TrainConfig,
    Variant,
    NoiseSpec,
    MetricsRecord,
    SeedResult,
    TargetResult,
    RunResult,
    RunManifest,
    mean_and_std,
)
from .errors import (
    RRLDError,
    ConfigurationError,
    DimensionError,
    TemperatureError,
    NumericError,
    ContractViolation,
    PolicyParseError,
    DatasetError,
    CheckpointError,
    RegistryError,
    ReportError,
)

__all__ = [
    "BackboneConfig",
    "LossConfig",
    "TrainConfig",
    "Variant",
    "NoiseSpec",
    "MetricsRecord",
    "SeedResult",
    "TargetResult",
    "RunResult",
    "RunManifest",
    "mean_and_std",
    "RRLDError",
    "ConfigurationError",
    "DimensionError",
    "TemperatureError",
    "NumericError",
    "ContractViolation",
    "PolicyParseError",
    "DatasetError",
    "CheckpointError",
    "RegistryError",
    "ReportError",
]
