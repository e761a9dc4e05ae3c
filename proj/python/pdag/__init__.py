"""Personalized Binomial DAG learner (Python bindings over the C++ core)."""

from ._pdag import (
    ConvergenceError,
    Dataset,
    DagEstimate,
    GroundTruth,
    GroupLassoProblem,
    InputError,
    NumericError,
    PipelineConfig,
    PipelineResult,
    RelationshipNetwork,
    SimConfig,
    Simulation,
    SmoothingWeights,
    SolverOptions,
    StageError,
    conditional_score,
    default_bandwidth,
    default_cluster_count,
    evaluate,
    kkt_residual,
    lambda_max,
    learn,
    linear_embedding,
    objective,
    root_score,
    simulate,
    smooth_loss,
    solve,
    tune_lambda,
)

__version__ = "1.0.0"
__all__ = [name for name in dir() if not name.startswith("_")]
