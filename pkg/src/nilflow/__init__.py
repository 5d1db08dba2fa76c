"""Tensor calculus and geometric flows for left-invariant data on nilpotent Lie groups.

Structure-constant algebra, the algebraic exterior differential, Hodge
duality, (generalized) Ricci curvature, soliton fitting, Dorfman brackets,
and RK4 drivers for bracket flows and the gauge-fixed generalized Ricci
flow, with a small CLI on top.
"""

from .config import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    DEFAULT_TOL,
    MAX_PROBLEM_DIM,
    SEED_ENV_VAR,
    STRUCTURE_TOL,
)
from .curvature import (
    bismut_nabla_theta,
    christoffels,
    generalized_ricci_plus,
    h_circ_h,
    h_squared_neutral,
    rc_metric,
    require_closed,
    ric_orthonormal,
    skew_part,
    symmetric_part,
    two_form_matrix,
)
from .dorfman import (
    DorfmanBracket,
    GeneralizedVector,
    closedness_residual,
    dorfman_eval,
    dorfman_jacobi_residual,
    dorfman_structure_constants,
    dorfman_total_skew_residual,
    neutral_pairing,
)
from .errors import NilflowError, NumericalError, ValidationError
from .flows import (
    BlowupReport,
    BracketState,
    GrfState,
    IntegratorControls,
    PhiSpec,
    SweepRow,
    Trajectory,
    blowup_time,
    gbf_decay_bound_check,
    gbf_rhs,
    grf_rhs,
    integrate_gbf,
    integrate_grf,
    tmin_sweep,
    trajectory_column_labels,
    trajectory_from_columns,
)
from .hodge import (
    Metric,
    as_metric,
    codifferential,
    form_inner,
    hodge_laplacian,
    hodge_star,
    orthonormalize,
    vol_form,
)
from .io import (
    Problem,
    builtin_problem,
    emit_phase_svg,
    emit_trajectory_csv,
    load_problem,
    problem_from_dict,
    read_trajectory_csv,
)
from .lie import (
    KForm,
    LieBracket,
    bracket_coeffs,
    ce_differential,
    complement,
    compound_matrix,
    form_dense,
    gl_action,
    gl_action_form,
    index_tuples,
    jacobi_residual,
    nilpotency_step,
    pi_form,
    pi_mu,
    shuffle_sign,
    sort_sign,
    wedge,
)
from .soliton import (
    SolitonData,
    derivation_space,
    soliton_fit,
    soliton_residual,
    symmetric_derivations,
)

__version__ = "0.1.0"
