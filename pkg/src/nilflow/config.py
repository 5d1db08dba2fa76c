"""Numeric defaults, collected in one place.

Every tolerance and horizon the library uses is defined here so that the
values can be audited (and overridden per call) without hunting through the
modules.  All are plain module constants; functions take them as keyword
defaults.

========================  ==========  =================================================
constant                  value       used for
========================  ==========  =================================================
DEFAULT_TOL               1e-9        generic residual threshold (Jacobi, closedness)
RANK_TOL_FACTOR           1e-9        SVD rank cutoff, relative to largest singular value
METRIC_SYMMETRY_TOL       1e-12       max allowed asymmetry of a metric matrix
SKEW_TOL                  1e-8        max allowed relative symmetry leak in bracket/form input
DEFAULT_RTOL              1e-9        adaptive integrator, relative error per step
DEFAULT_ATOL              1e-10       adaptive integrator, absolute error per step
STEP_FLOOR                1e-13       smallest accepted step before declaring failure
MAX_STEPS                 1_000_000   hard cap on accepted steps per integration
STRUCTURE_TOL             1e-7        Jacobi / closedness residual allowed along GBF runs
BLOWUP_NORM               1e8         sup-norm of the state that counts as blowup
EIG_FLOOR                 1e-10       smallest metric eigenvalue that counts as alive
BISECT_TOL                1e-5        absolute bracket width when localizing a blowup time
DEFAULT_HORIZON           1000.0      forward time budget for blowup scans
SWEEP_T_LONG              50.0        forward horizon used by the T_min sweep asymptotics
MAX_PROBLEM_DIM           10          largest dimension accepted by the problem loader
==========================================================================================
"""

DEFAULT_TOL = 1e-9
RANK_TOL_FACTOR = 1e-9
METRIC_SYMMETRY_TOL = 1e-12
SKEW_TOL = 1e-8

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-10
STEP_FLOOR = 1e-13
MAX_STEPS = 1_000_000
STRUCTURE_TOL = 1e-7

BLOWUP_NORM = 1e8
EIG_FLOOR = 1e-10
BISECT_TOL = 1e-5
DEFAULT_HORIZON = 1000.0
SWEEP_T_LONG = 50.0

MAX_PROBLEM_DIM = 10

# Environment variable consulted by the test suite for its RNG seed.
SEED_ENV_VAR = "NILFLOW_SEED"
