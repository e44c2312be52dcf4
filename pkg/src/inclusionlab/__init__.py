"""Analysis and synthesis tools for discrete linear inclusions x_n = S_sigma(n) x_(n-1)."""

from .errors import (
    CapExceededError,
    DomainError,
    HorizonError,
    InclusionError,
    InputError,
    NumericError,
    PreconditionError,
    SingularMatrixError,
)
from .linalg import (
    SystemSpec,
    co_norm,
    co_spectral_radius,
    operator_norm,
    product,
    product_ledger,
    spectral_radius,
    word_product,
)
from .symbolic import (
    BlockSchedule,
    CylinderPattern,
    EventuallyPeriodic,
    LawProgram,
    ShiftedLaw,
    Synthesized,
    constant_law,
    evaluate,
    geometric_law,
    law_metric_truncated,
    matches_cylinder,
    shift,
)
from .spectral import (
    BoundsTable,
    CoBoundsTable,
    FeasibleWitness,
    InfeasibleCertified,
    Undetermined,
    block_cojsr_check,
    chaos_feasibility,
    cojsr_bounds,
    finiteness_candidate,
    growth_curve,
    jsr_bounds,
    periodic_stability_check,
    reducibility_probe,
)
from .lyapunov import (
    TrajectoryRecord,
    exponent_vs_jsr_bounds,
    partial_exponents,
    random_switching_exponent,
    simulate,
)
from .synth import (
    ChaosCertificate,
    RotationSynthInput,
    hyperbolic_divergent_law,
    replay_fixed_schedule,
    synthesize_rotation,
    synthesize_uniform,
    synthesize_zero_exponent,
    verify_pointwise_chaotic,
    verify_uniform_chaotic,
)
from .classify import bj_run_profile, bj_verdict, stability_under_nonchaotic

__version__ = "0.1.0"

__all__ = [
    "CapExceededError",
    "DomainError",
    "HorizonError",
    "InclusionError",
    "InputError",
    "NumericError",
    "PreconditionError",
    "SingularMatrixError",
    "SystemSpec",
    "co_norm",
    "co_spectral_radius",
    "operator_norm",
    "product",
    "product_ledger",
    "spectral_radius",
    "word_product",
    "BlockSchedule",
    "CylinderPattern",
    "EventuallyPeriodic",
    "LawProgram",
    "ShiftedLaw",
    "Synthesized",
    "constant_law",
    "evaluate",
    "geometric_law",
    "law_metric_truncated",
    "matches_cylinder",
    "shift",
    "BoundsTable",
    "CoBoundsTable",
    "FeasibleWitness",
    "InfeasibleCertified",
    "Undetermined",
    "block_cojsr_check",
    "chaos_feasibility",
    "cojsr_bounds",
    "finiteness_candidate",
    "growth_curve",
    "jsr_bounds",
    "periodic_stability_check",
    "reducibility_probe",
    "TrajectoryRecord",
    "exponent_vs_jsr_bounds",
    "partial_exponents",
    "random_switching_exponent",
    "simulate",
    "ChaosCertificate",
    "RotationSynthInput",
    "hyperbolic_divergent_law",
    "replay_fixed_schedule",
    "synthesize_rotation",
    "synthesize_uniform",
    "synthesize_zero_exponent",
    "verify_pointwise_chaotic",
    "verify_uniform_chaotic",
    "bj_run_profile",
    "bj_verdict",
    "stability_under_nonchaotic",
]
