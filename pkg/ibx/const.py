"""This module contains constants used by other modules."""
MAJOR_VERSION = 1
MINOR_VERSION = 0
PATCH_VERSION = 0
__short_version__ = f"{MAJOR_VERSION}.{MINOR_VERSION}"
__version__ = f"{__short_version__}.{PATCH_VERSION}"
REQUIRED_PYTHON_VER = (3, 8)

# ### Numerical tolerances ###
NORMALIZATION_TOLERANCE = 1e-9
JOINT_TOLERANCE = 1e-12
INFO_TOLERANCE = 1e-9
PARETO_TOLERANCE = 1e-12
REGRET_TOLERANCE = 1e-9

# ### Solver defaults ###
DEFAULT_WEIGHT_MIN = 1e-3
DEFAULT_WEIGHT_MAX = 1e3
DEFAULT_WEIGHT_COUNT = 200
DEFAULT_MAX_ITERS = 500
DEFAULT_RESTARTS = 0
DEFAULT_BANDWIDTH = 0.1
DEFAULT_REFINE_DEPTH = 6
DEFAULT_CHECKPOINTS = (1, 2, 3, 5, 8)

INIT_IDENTITY = "identity"
INIT_RANDOM = "random"

# ### Domains ###
GRID_WIDTH = 5
GRID_HEIGHT = 5
MANHATTAN_PEAK = (1, 3)
MANHATTAN_DECREMENT = 0.33
MANHATTAN_FLOOR = -1.0
COLOR_CHART_SIZE = 122
BLUE_BIN_WIDTH = 0.125
BLUE_BIN_REWARDS = (0.5, -0.5, 0.0, 0.75, 1.0, -1.0, 0.25, -0.75)

KIND_GRID = "grid"
KIND_COLOR = "color"

OBJECTIVE_MANHATTAN = "manhattan"
OBJECTIVE_RANDOM = "random"
OBJECTIVE_X_COORD = "x_coord"
OBJECTIVE_Y_COORD = "y_coord"
OBJECTIVE_BLUE_CONTINUOUS = "blue_continuous"
OBJECTIVE_BLUE_DISCONTINUOUS = "blue_discontinuous"
OBJECTIVE_RED_CONTINUOUS = "red_continuous"

GRID_OBJECTIVES = (
    OBJECTIVE_MANHATTAN,
    OBJECTIVE_RANDOM,
    OBJECTIVE_X_COORD,
    OBJECTIVE_Y_COORD,
)
COLOR_OBJECTIVES = (
    OBJECTIVE_BLUE_CONTINUOUS,
    OBJECTIVE_BLUE_DISCONTINUOUS,
    OBJECTIVE_RED_CONTINUOUS,
)

# ### Respondents ###
TIE_LEXICOGRAPHIC = "lexicographic"
TIE_SEEDED_UNIFORM = "seeded_uniform"

RANK_BY_VALUE = "value"
RANK_BY_MAGNITUDE = "magnitude"

SENSE_BEST = "best"
SENSE_WORST = "worst"

# ### Rendering ###
CELL_SIZE = 40
BOUNDARY_WIDTH = 2
CHART_COLUMNS = 12
EMPTY_PIXEL = (128, 128, 128)
SVG_HASH_SALT = "ibx"

# ### File formats ###
FRONTIER_CSV_HEADER = (
    "weight",
    "n_clusters",
    "complexity_bits",
    "informativeness_bits",
    "distortion_mse",
)
RESULTS_CSV_HEADER = (
    "encoder",
    "objective",
    "target",
    "n_clusters",
    "complexity_bits",
    "distortion_mse",
    "feature_rank",
    "best_demonstration",
)
CHART_CSV_HEADER = ("id", "r", "g", "b")
SIGNIFICANT_DIGITS = 12

# ### Environment ###
ENV_THREADS = "IBX_THREADS"

# ### Exit codes ###
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3


class IBXError(Exception):
    """Base class for all errors raised by ibx."""
