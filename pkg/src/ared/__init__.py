"""Adaptive random experiment design: sequential case selection driven by
surrogate-model error feedback, with an SVR surrogate retrained after every
measurement."""

from .core import (
    ConstraintParams,
    Domain,
    FeedbackPolicy,
    Provenance,
    Sample,
    SessionConfig,
    SvrConfig,
    VariableRange,
    denormalize,
    normalize,
    validate_domain,
)
from .controller import (
    SessionReport,
    SessionState,
    SessionStatus,
    export_model,
    propose_next,
    record_result,
    run_autonomous,
    start_session,
)
from .sampling import (
    ConstrainedDraw,
    FeedbackCenter,
    NormalDrawSpec,
    constraint_threshold,
    draw_constrained,
    draw_point,
    exploratory_spec,
    feedback_spec,
    min_distance,
)
from .svr import SvrHyperparams, SvrModel, grid_search, predict, refit, train

__version__ = "0.1.0"

__all__ = [
    "ConstrainedDraw",
    "ConstraintParams",
    "Domain",
    "FeedbackCenter",
    "FeedbackPolicy",
    "NormalDrawSpec",
    "Provenance",
    "Sample",
    "SessionConfig",
    "SessionReport",
    "SessionState",
    "SessionStatus",
    "SvrConfig",
    "SvrHyperparams",
    "SvrModel",
    "VariableRange",
    "constraint_threshold",
    "denormalize",
    "draw_constrained",
    "draw_point",
    "export_model",
    "exploratory_spec",
    "feedback_spec",
    "grid_search",
    "min_distance",
    "normalize",
    "predict",
    "propose_next",
    "record_result",
    "refit",
    "run_autonomous",
    "start_session",
    "train",
    "validate_domain",
]
