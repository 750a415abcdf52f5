"""Solution-quality metrics and certified lower bounds.

``f_value`` is the quadratic form divided by the spectral norm (between 0
and 1 for vectors of norm at most one); ``pve`` divides by the trace
instead. Two bound families can be attached to a report:

* ``thm1_floor = Z_ref - 3 * epsilon * trace(A)``, the additive floor of the
  eigenbasis-thresholding solver;
* ``thm2_floor = (1/alpha) * Z_ref - epsilon - solver_gap``, the
  multiplicative floor of the relaxation-rounding solver.

``Z_ref`` is the exact optimum when available; the relaxation objective is a
valid stand-in since it upper-bounds the optimum.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .errors import DimensionMismatch
from .matrix import SvdParams, SymmetricMatrix, matrix_functionals
from .oracle import exact_spca
from .sdp import AdmmConfig, spca_sdp
from .svd_threshold import SparseUnitVector, SvdThresholdConfig, spca_svd


@dataclass(frozen=True)
class EvalContext:
    """Optional bound inputs: accuracy parameter, measured alpha, reference value."""

    epsilon: float | None = None
    alpha: float | None = None
    z_ref: float | None = None
    solver_gap: float = 0.0


@dataclass(frozen=True)
class EvalReport:
    objective: float
    f_value: float
    pve: float
    sparsity: int
    norm: float
    thm1_floor: float | None = None
    thm2_floor: float | None = None
    bound_ratio: dict | None = None
    z_ref: float | None = None

    def to_dict(self):
        return {
            "objective": self.objective,
            "f_value": self.f_value,
            "pve": self.pve,
            "sparsity": self.sparsity,
            "norm": self.norm,
            "thm1_floor": self.thm1_floor,
            "thm2_floor": self.thm2_floor,
            "bound_ratio": self.bound_ratio,
            "z_ref": self.z_ref,
        }


def evaluate(A: SymmetricMatrix, y: SparseUnitVector, context: EvalContext | None = None) -> EvalReport:
    """Metrics of ``y`` on ``A`` plus whatever floors the context supports.

    Floors are omitted when the context lacks the needed reference; ratio
    entries divide each floor by both the achieved objective and the
    reference value (labelled separately, since the two normalizations
    answer different questions).
    """
    context = context or EvalContext()
    if y.n != A.n:
        raise DimensionMismatch(f"vector dim {y.n} vs matrix dim {A.n}")
    functionals = matrix_functionals(A)
    objective = y.quadratic_form(A)
    f_value = objective / functionals.spectral_norm if functionals.spectral_norm > 0 else 0.0
    pve = objective / functionals.trace if functionals.trace != 0 else 0.0

    thm1 = thm2 = None
    if context.z_ref is not None and context.epsilon is not None:
        thm1 = context.z_ref - 3.0 * context.epsilon * functionals.trace
        if context.alpha is not None and context.alpha > 0:
            thm2 = context.z_ref / context.alpha - context.epsilon - context.solver_gap

    ratios = {}
    if objective > 0:
        if thm1 is not None:
            ratios["thm1"] = thm1 / objective
        if thm2 is not None:
            ratios["thm2"] = thm2 / objective
    if context.z_ref is not None and context.z_ref > 0:
        if thm1 is not None:
            ratios["thm1_vs_ref"] = thm1 / context.z_ref
        if thm2 is not None:
            ratios["thm2_vs_ref"] = thm2 / context.z_ref

    return EvalReport(
        objective=objective,
        f_value=f_value,
        pve=pve,
        sparsity=y.sparsity,
        norm=y.norm,
        thm1_floor=thm1,
        thm2_floor=thm2,
        bound_ratio=ratios or None,
        z_ref=context.z_ref,
    )


@dataclass(frozen=True)
class SweepConfig:
    """Shared settings for :func:`sparsity_sweep`."""

    epsilon: float = 1.0
    seed: int = 0
    svd: SvdParams = field(default_factory=SvdParams)
    admm: AdmmConfig = field(default_factory=AdmmConfig)
    oracle_ref: bool = False
    max_enumeration: int = 2_000_000
    workers: int = 1


def _sweep_point(A, algo, s, cfg: SweepConfig):
    oracle_res = None
    if cfg.oracle_ref or algo == "oracle":
        oracle_res = exact_spca(A, s, cfg.max_enumeration)
    z_ref = oracle_res.optimal_value if oracle_res is not None else None
    if algo == "svd":
        vec = spca_svd(
            A,
            SvdThresholdConfig(k=s, epsilon=cfg.epsilon, mode="budget", budget_s=s, svd=cfg.svd),
        )
        ctx = EvalContext(epsilon=cfg.epsilon, z_ref=z_ref)
    elif algo == "sdp":
        vec, sol, diag = spca_sdp(A, k=s, mode="budget", budget_s=s, cfg=cfg.admm)
        ctx = EvalContext(
            epsilon=cfg.epsilon,
            alpha=diag.alpha,
            z_ref=z_ref if z_ref is not None else sol.objective,
            solver_gap=sol.solver_gap,
        )
    elif algo == "oracle":
        vec = oracle_res.optimal_vector
        ctx = EvalContext(epsilon=cfg.epsilon, z_ref=z_ref)
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    return evaluate(A, vec, ctx)


def sparsity_sweep(A: SymmetricMatrix, algo: str, sparsity_grid, cfg: SweepConfig | None = None):
    """One :class:`EvalReport` per grid value, with k = s at every point.

    Grid points are independent and may be evaluated on a thread pool
    (``cfg.workers``); reports are returned in grid order either way.
    """
    cfg = cfg or SweepConfig()
    grid = [int(s) for s in sparsity_grid]
    for s in grid:
        if not 1 <= s <= A.n:
            raise ValueError(f"grid value {s} outside [1, {A.n}]")
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(lambda s: _sweep_point(A, algo, s, cfg), grid))
    return [_sweep_point(A, algo, s, cfg) for s in grid]


def env_workers(default: int = 1) -> int:
    """Worker count from the SPCA_THREADS environment variable."""
    raw = os.environ.get("SPCA_THREADS", "")
    try:
        value = int(raw)
    except ValueError:
        return default
    return max(1, value)
