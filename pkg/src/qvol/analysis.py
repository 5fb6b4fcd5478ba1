"""Accuracy evaluation: error metric, convergence sweeps, point budgets.

Pseudorandom (MC) results are averaged over a deterministic ladder of seeds
(base_seed + k for k < seeds) so means and standard deviations are exactly
reproducible; the Halton estimate is a single deterministic number per
point count.  Theoretical envelopes N^(-1/2) for MC and N^(-1) (log N)^2
for the two-dimensional low-discrepancy stream are normalized to pass
through the first measured grid point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimator import estimate_volume
from .maskio import MaskVolume
from .sequences import DEFAULT_BASES, SequenceSpec


def relative_error(computed_mm3: float, truth_mm3: float) -> float:
    """|computed - truth| / truth."""
    if not truth_mm3 > 0.0:
        raise ValueError(f"truth volume must be positive, got {truth_mm3}")
    return abs(computed_mm3 - truth_mm3) / truth_mm3


@dataclass(frozen=True)
class ConvergenceReport:
    n_grid: tuple[int, ...]
    qmc_errors: tuple[float, ...]
    mc_error_mean: tuple[float, ...]
    mc_error_std: tuple[float, ...]
    seeds: int
    theory_qmc: tuple[float, ...]
    theory_mc: tuple[float, ...]


@dataclass(frozen=True)
class PointsToTarget:
    """First grid sizes reaching a relative-error target; None = not reached."""

    target: float
    n_mc: int | None
    n_qmc: int | None
    ratio: float | None


@dataclass(frozen=True)
class MethodResult:
    method: str
    volume_mm3: float
    relative_error: float


def _check_grid(n_grid, minimum: int) -> list[int]:
    grid = [int(n) for n in n_grid]
    if not grid:
        raise ValueError("point-count grid must be nonempty")
    if grid[0] < minimum:
        raise ValueError(f"grid values must be >= {minimum}, got {grid[0]}")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"grid must be strictly increasing, got {grid}")
    return grid


def _halton_error(volume, truth, n, bases, start_index, workers):
    spec = SequenceSpec.halton(bases, start_index)
    return estimate_volume(volume, spec, n, truth, workers=workers).relative_error


def _mc_errors(volume, truth, n, seeds, base_seed, workers):
    return [
        estimate_volume(volume, SequenceSpec.pseudorandom(base_seed + k), n, truth, workers=workers).relative_error
        for k in range(seeds)
    ]


def convergence_sweep(
    volume: MaskVolume,
    truth_mm3: float,
    n_grid,
    seeds: int,
    bases: tuple[int, int] = DEFAULT_BASES,
    *,
    base_seed: int = 0,
    start_index: int = 1,
    workers: int | None = None,
) -> ConvergenceReport:
    """Relative error of both methods across a grid of points-per-slice.

    The grid must start at N >= 2: the quasi-random envelope weight
    (log N)^2 / N vanishes at N = 1 and cannot be anchored there.
    """
    grid = _check_grid(n_grid, minimum=2)
    if seeds < 1:
        raise ValueError(f"seeds must be >= 1, got {seeds}")

    qmc_errors: list[float] = []
    mc_mean: list[float] = []
    mc_std: list[float] = []
    for n in grid:
        qmc_errors.append(_halton_error(volume, truth_mm3, n, bases, start_index, workers))
        errs = _mc_errors(volume, truth_mm3, n, seeds, base_seed, workers)
        mc_mean.append(float(np.mean(errs)))
        mc_std.append(float(np.std(errs)))

    def qmc_weight(n: int) -> float:
        return math.log(n) ** 2 / n

    n0 = grid[0]
    theory_qmc = [qmc_errors[0] * qmc_weight(n) / qmc_weight(n0) for n in grid]
    theory_mc = [mc_mean[0] * math.sqrt(n0 / n) for n in grid]
    return ConvergenceReport(
        n_grid=tuple(grid),
        qmc_errors=tuple(qmc_errors),
        mc_error_mean=tuple(mc_mean),
        mc_error_std=tuple(mc_std),
        seeds=seeds,
        theory_qmc=tuple(theory_qmc),
        theory_mc=tuple(theory_mc),
    )


def points_to_target(
    volume: MaskVolume,
    truth_mm3: float,
    target: float,
    n_grid,
    seeds: int,
    bases: tuple[int, int] = DEFAULT_BASES,
    *,
    base_seed: int = 0,
    start_index: int = 1,
    workers: int | None = None,
) -> PointsToTarget:
    """Smallest grid N at which each method's error first reaches the target.

    The Halton side uses its deterministic error; the MC side uses the mean
    over the seed ladder, because single-run first crossings are dominated
    by noise.  Evaluation stops at the first crossing.
    """
    if not 0.0 < target < 1.0:
        raise ValueError(f"target must be in (0, 1), got {target}")
    grid = _check_grid(n_grid, minimum=1)
    if seeds < 1:
        raise ValueError(f"seeds must be >= 1, got {seeds}")

    n_qmc = None
    for n in grid:
        if _halton_error(volume, truth_mm3, n, bases, start_index, workers) <= target:
            n_qmc = n
            break
    n_mc = None
    for n in grid:
        if np.mean(_mc_errors(volume, truth_mm3, n, seeds, base_seed, workers)) <= target:
            n_mc = n
            break
    ratio = n_mc / n_qmc if (n_mc is not None and n_qmc is not None) else None
    return PointsToTarget(target=target, n_mc=n_mc, n_qmc=n_qmc, ratio=ratio)


def compare_methods(
    volume: MaskVolume,
    truth_mm3: float,
    n_points: int,
    seed: int,
    bases: tuple[int, int] = DEFAULT_BASES,
    *,
    start_index: int = 1,
    workers: int | None = None,
) -> list[MethodResult]:
    """Halton and pseudorandom estimates of one volume from identical inputs."""
    halton = estimate_volume(volume, SequenceSpec.halton(bases, start_index), n_points, truth_mm3, workers=workers)
    mc = estimate_volume(volume, SequenceSpec.pseudorandom(seed), n_points, truth_mm3, workers=workers)
    return [
        MethodResult("halton", halton.volume_mm3, halton.relative_error),
        MethodResult("mc", mc.volume_mm3, mc.relative_error),
    ]
