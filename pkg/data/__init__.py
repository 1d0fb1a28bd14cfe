"""
Data package: datasets, protocol splits, synthetic domains and corruptions.
"""

from .catalog import CATALOG_FILENAME, DatasetCatalog, build_catalog, read_catalog, write_catalog
from .corruption import corrupt, corrupt_images
from .datasets import MultiDomainDataset, Sample, export_image_folder, load_image_folder
from .loader import Batch, batches, sequential_batches, stack_samples
from .protocol import ProtocolSplit, TrackedSamples, build_protocol, train_count
from .synthetic import GLYPHS, SyntheticConfig, generate_synthetic

__all__ = [
    "CATALOG_FILENAME",
    "DatasetCatalog",
    "build_catalog",
    "read_catalog",
    "write_catalog",
    "corrupt",
    "corrupt_images",
    "MultiDomainDataset",
    "Sample",
    "export_image_folder",
    "load_image_folder",
    "Batch",
    "batches",
    "sequential_batches",
    "stack_samples",
    "ProtocolSplit",
    "TrackedSamples",
    "build_protocol",
    "train_count",
    "GLYPHS",
    "SyntheticConfig",
    "generate_synthetic",
]
