"""
Configuration module for the MBT extinction solver.
Loads environment variables for the ambient settings and provides the
numerical constants shared by the solvers.
"""
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Logging Configuration
LOG_DIR = os.getenv('QVE_LOG_DIR', './logs')
LOG_LEVEL = os.getenv('QVE_LOG_LEVEL', 'INFO').upper()
LOG_TO_FILE = os.getenv('QVE_LOG_TO_FILE', '1') not in ('0', 'false', 'False', 'no')

# Problem validation
STOCHASTIC_TOL = 1e-8

# Eigensolver (power iteration)
EIG_TOL = 1e-13
MAX_EIG_ITERS = 100000
EIG_SHIFT_FRACTION = 1e-3

# Dense kernels
MACHINE_EPS = 2.2e-16
RANK_TOL_FACTOR = MACHINE_EPS  # times N, relative to sigma_max
SOLVE_TOL = 1e-12
MMATRIX_TOL = 1e-10
OFFDIAG_SIGN_TOL = 1e-14
POSITIVITY_TOL = 1e-10  # relative to the largest eigenvector entry

# Structure analysis
CRIT_TOL = 1e-9
# singular band for F'_e = I - R; a little wider than CRIT_TOL for eigensolver error
CRIT_CERTIFY_TOL = 1.01 * CRIT_TOL

# Solvers
DEFAULT_TOL = 1e-12
LINEAR_MAX_ITERS = 10000
NEWTON_MAX_ITERS = 100
PERRON_MAX_ITERS = 1000
PERRON_START_EPS = 1e-6
LAMBDA_STAR_TOL = 1e-8
DEGENERATE_PROJECTION_TOL = 1e-14

# Monte Carlo oracle
MC_TRUNCATION_ALLOWANCE = 0.005
MC_DEFAULT_TRIALS = 100000
MC_DEFAULT_MAX_POPULATION = 10000

# Block-triangular instance family
BLOCK_COUPLING_WEIGHT = 0.1
BLOCK_HEAD_INFLATION = 1.0

# Names accepted on the command line
SOLVER_NAMES = ['depth', 'order', 'thicknesses', 'newton', 'perron', 'perron-newton', 'auto']
VARIANT_NAMES = ['original', 'transpose', 'symmetrize', 'desym1', 'desym2']
FAMILY_NAMES = ['random_mbt', 'scalar', 'block_triangular']

# CLI exit codes
EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NO_CONVERGENCE = 2
EXIT_VALIDATION_FAILED = 3
