"""Submeasure lab - constants."""

VERSION = "0.1.0"

# Subset enumeration
DEFAULT_MAX_ATOMS = 24
HARD_MAX_ATOMS = 30
SUBSET_SWEEP_LIMIT = 16
EXHAUSTIVE_AUDIT_LIMIT = 12
COVER_TABLE_MAX_GENERATORS = 16
GENERATOR_SWEEP_BUDGET = 1 << 16

# Concentration experiments
ALPHA_EXACT_MAX_POINTS = 16
ALPHA_SAMPLED_MAX_POINTS = 256
DEFAULT_FAMILY_BUDGET = 64
MIN_MC_TRIALS = 100
DEFAULT_TRIAL_CAP = 1_000_000
DEFAULT_DOMINATION_SAMPLES = 10_000
MC_CHUNK_SIZE = 25_000
RNG_NAME = "PCG64"
WILSON_Z = 3.0

# Tree constructions
TREE_MAX_LEAVES = 24
TREE_BRUTE_FORCE_MAX_LEAVES = 16
TREE_EXHAUSTIVE_MAX_LEAVES = 8
TREE_EXHAUSTIVE_MAX_NODES = 13
EXAMPLE_MAX_ATOMS = 4096
BERRY_ESSEEN_MAX_LEVELS = 8
BERRY_ESSEEN_SEARCH_BUDGET = 4096
DEFAULT_BERRY_ESSEEN_K = 1

# Tolerances
INEQUALITY_TOLERANCE = 1e-9
FLOAT_COMPARE_TOLERANCE = 1e-12
NORMALIZATION_TOLERANCE = 1e-12

# Classification grid
DEFAULT_GRID_STEPS = 10

# Exit codes
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_LIMIT = 3

# Environment
THREADS_ENV_VAR = "SUBMEASURE_LAB_THREADS"
OUTPUT_ENV_VAR = "SUBMEASURE_LAB_OUT"
VERBOSE_ENV_VAR = "VERBOSE"
DEFAULT_OUTPUT_DIR = "submeasure_lab_out"
