"""rstab: exact closed-loop realization/stability algebra for discrete time.

The package computes and verifies the identity (I - R) S = S (I - R) = I
between closed-loop realization matrices and their disturbance-to-signal
stability matrices, converts exactly among the standard stabilizing
controller parameterizations (Youla, input-output, system level, mixed),
builds and certifies the state-feedback system level realizations, and
performs FIR H2 synthesis with an exact-rational constraint solve.
"""

from .errors import (
    ConvergenceError,
    InfeasibleError,
    InternalStabilityError,
    InvariantViolation,
    SchemaError,
    SingularMatrixError,
    SpaceMismatchError,
    ToolkitError,
)
from .ratfun import BIPROPER, DEFAULT_TOL, IMPROPER, STRICTLY_PROPER, Poly, RatFun, poly_gcd
from .tfmatrix import SignalSpace, TFClassification, TFMatrix, embed, shift_identity
from .realization import (
    BlockFinding,
    ConditionReport,
    Realization,
    StabilityMatrix,
    Transformation,
    check_conditions,
    dependency_complete,
    stability_from_realization,
    transform,
    verify_equivalent,
    verify_lemma,
)
from .parameterizations import (
    CoprimeFactors,
    IOPParam,
    MixedParam1,
    MixedParam2,
    PlantSS,
    SLPOutputFeedback,
    SLPStateFeedback,
    YoulaParam,
    controller_to_youla,
    coprime_factorize,
    iop_from_controller,
    iop_to_controller,
    mixed1_from_controller,
    mixed1_to_controller,
    mixed2_from_controller,
    mixed2_to_controller,
    output_feedback_loop,
    plant_feedback_loop,
    slp_of_from_controller,
    slp_of_to_controller,
    slp_of_to_iop,
    slp_sf_from_controller,
    slp_sf_to_controller,
    slp_sf_to_iop,
    state_feedback_loop,
    youla_to_controller,
    youla_to_iop,
)
from .sls import (
    DEPLOYMENT,
    DESIGN_SEPARATION,
    ORIGINAL,
    CertificationReport,
    FIRPhi,
    ImpulseMatchReport,
    RealizationVariant,
    SimTrace,
    build_realization,
    certify_realization,
    closed_form_stability,
    dare_lqr,
    design_separation_constraint,
    fir_from_slp,
    fir_from_tfmatrix,
    fir_to_tfmatrix,
    impulse_match,
    simulate,
    slp_from_fir,
    synthesize_sf_h2,
)
from .cli import JobSpec, run

__version__ = "0.1.0"
