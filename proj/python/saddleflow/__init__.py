"""Saddle recursion, flow simulation and sparse-recovery baselines."""

from ._core import (
    Dataset,
    FlowTrajectory,
    LassoPath,
    SaddleflowError,
    SaddlePath,
    constrained_lsq,
    count_jumps,
    general_position,
    grad_loss,
    hausdorff_distance,
    hybrid_graph,
    lasso_homotopy,
    loss,
    omp,
    potential,
    rip_constant,
    run,
    simulate,
    weights_from_beta,
)
from ._core import __version__

__all__ = [
    "Dataset",
    "FlowTrajectory",
    "LassoPath",
    "SaddleflowError",
    "SaddlePath",
    "constrained_lsq",
    "count_jumps",
    "general_position",
    "grad_loss",
    "hausdorff_distance",
    "hybrid_graph",
    "lasso_homotopy",
    "loss",
    "omp",
    "potential",
    "rip_constant",
    "run",
    "simulate",
    "weights_from_beta",
]
