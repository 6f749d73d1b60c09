"""Constants used across the coherent-state verification tool."""

SCHEMA_VERSION = "1.0"

# Quadrature defaults
DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-12
DEFAULT_MAX_SUBDIVISIONS = 200
MAX_PHASE_DIFFERENCE = 50.0

# Support hints cover this many widths past a Gaussian peak
SUPPORT_WIDTHS = 12.0

# Default labels and shape parameters
DEFAULT_ALPHA = 1.0
DEFAULT_BETA = 1.0
DEFAULT_LAMBDA = 0.5
DEFAULT_EPSILON = 0.5
DEFAULT_OMEGA = 1.0
DEFAULT_GAMMA = 0.3
DEFAULT_S_VALUES = [0.5, 1.0, 2.0]
DEFAULT_SHAPE_VALUES = [0.5, 1.0, 2.0]

# Probe grids
TRANSLATION_PROBES = [0.0, 0.5, 1.0, 2.0, 5.0]
DILATION_PROBES = [-1.0, 0.0, 1.0, 2.0]
TRANSLATION_ACTIONS = [0.6, 1.0, 2.0, 5.0]
DILATION_ACTIONS = [0.5, 1.0, 2.0, 5.0]
CONTINUITY_DELTAS = [1e-1, 1e-2, 1e-3, 1e-4]
EVOLUTION_TIMES = [0.0, 0.5, 1.0, 2.0]
PRODUCT_COUNTS = [10, 100, 1000]
DEFORMATION_LIMIT = 1e-6
MONOTONE_GRID = (1e-3, 1e3, 200)

# Default E grid for table export: start, stop, number of points
DEFAULT_GRID = (0.0, 10.0, 101)
MAX_SCAN_POINTS = 100_000

# Verdict thresholds
CONTINUITY_THRESHOLD = 1e-3
TEMPORAL_THRESHOLD = 1e-14
MOMENT_THRESHOLD = 1e-8
ACTION_THRESHOLD = 1e-8
COMMUTATOR_THRESHOLD = 1e-4
EIGEN_THRESHOLD = 1e-12
NORMALIZATION_THRESHOLD = 1e-8
PRODUCT_THRESHOLD = 1e-12
