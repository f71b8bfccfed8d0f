"""Optimisation kernels used by the measures."""

from .admm import AffineL1Problem, InfeasibleL1, L1Result, admm_l1_affine, soft_threshold
from .cutting_plane import CutRecord, CuttingPlaneResult, PSDBlock, cutting_plane_psd
from .simplex import LinearProgram, LPSolution, StandardSimplex, simplex_solve

__all__ = [
    "AffineL1Problem",
    "InfeasibleL1",
    "L1Result",
    "admm_l1_affine",
    "soft_threshold",
    "CutRecord",
    "CuttingPlaneResult",
    "PSDBlock",
    "cutting_plane_psd",
    "LinearProgram",
    "LPSolution",
    "StandardSimplex",
    "simplex_solve",
]
