"""
Configuration file for the RRLD domain-generalization toolkit
"""

# Backbone defaults (tiny ViT trained from scratch)
DEFAULT_IMAGE_SIZE = 32
DEFAULT_IN_CHANNELS = 3
DEFAULT_PATCH_SIZE = 4
DEFAULT_EMBED_DIM = 64
DEFAULT_DEPTH = 6
DEFAULT_HEADS = 4
DEFAULT_MLP_RATIO = 4.0
INIT_STD = 0.02

# Loss weights and temperatures
DEFAULT_LAMBDA = 0.2
DEFAULT_T1 = 5.0
DEFAULT_GAMMA = 1.0
DEFAULT_T2 = 1.0
LOG_CLAMP_EPS = 1e-12

# Optimizer
DEFAULT_LEARNING_RATE = 5e-5
DEFAULT_WEIGHT_DECAY = 0.01
ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8

# Training protocol
DEFAULT_BATCH_SIZE = 32
DEFAULT_SEEDS = [0, 1, 2]
DEFAULT_MAX_STEPS = 2000
TRAIN_FRACTION = 0.8
MIN_DOMAIN_SAMPLES = 5
EVAL_BATCH_SIZE = 256

# Augmentation
AUGMENT_FILL = 0.5
MAGNITUDE_LEVELS = 10
BASE_AUGMENT_PADDING = 4

# Noise defaults for the corrupted (OOD) domain
DEFAULT_NOISE_PARAMS = {
    "gaussian": 0.1,
    "impulse": 0.05,
    "speckle": 0.2,
    "shot": 60.0,
}
NOISE_KINDS = ["gaussian", "impulse", "speckle", "shot"]

# Synthetic data
SYNTH_MIN_PER_DOMAIN = 10

# Persistence
SCHEMA_VERSION = "1.0"
TOOLKIT_VERSION = "0.3.0"
OUTPUT_ROOT_ENV = "RRLD_OUTPUT_ROOT"
DATABASE_URL_ENV = "RRLD_DATABASE_URL"
DEFAULT_OUTPUT_DIRNAME = "runs"
REGISTRY_FILENAME = "registry.db"

# Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

# Report document
REPORT_FONT_NAME = "Calibri"
REPORT_FONT_SIZE_PT = 10
REPORT_TABLE_WIDTH_INCHES = 6.5
REPORT_METHOD_COLUMN_WIDTH_INCHES = 1.4
REPORT_DECIMALS = 3
