from .cs import (
    CsInstance,
    MissingGroundTruth,
    SensingSetup,
    generate,
    generate_gaussian,
    generate_partial_dct,
    recovery_success,
    support_rank_probe,
)
from .portfolio import (
    Comoments,
    CurvatureReport,
    InsufficientSamples,
    MvskInstance,
    ReturnPanel,
    ZeroVector,
    check_curvature_conditions,
    estimate_comoments,
    lambdas_from_xi,
    sparsity_hat,
    synthetic_panel,
)
