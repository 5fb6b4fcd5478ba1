"""Slice-area estimation by point sampling and frustum-model integration.

Each slice's region area is the hit fraction of a 2-D point stream scaled
by the full physical slice area.  Slice i consumes the contiguous stream
window at offset i * n_points, so no two slices see the same points and the
whole estimate is a pure function of (volume, spec, n_points).  Volumes
come from the frustum rule over consecutive slice areas, which is exact for
solids whose cross-sections scale linearly between sample planes (prisms,
cones, pyramids).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .maskio import MaskVolume, count_hits
from .sequences import SequenceSpec, stream


@dataclass(frozen=True)
class AreaEstimate:
    """Hit count and resulting area for one slice."""

    slice_index: int
    hits: int
    total: int
    area_mm2: float


@dataclass(frozen=True)
class VolumeReport:
    volume_mm3: float
    per_slice: tuple[AreaEstimate, ...]
    method: str
    points_per_slice: int
    truth_mm3: float | None = None
    relative_error: float | None = None


def estimate_slice_area(
    volume: MaskVolume,
    slice_index: int,
    spec: SequenceSpec,
    n_points: int,
    *,
    offset: int | None = None,
) -> AreaEstimate:
    """Area of one slice's region from the hit fraction of its stream window.

    The window defaults to offset slice_index * n_points; pass ``offset=0``
    to re-sample the same points on every slice.
    """
    if n_points < 1:
        raise ValueError(f"n_points must be >= 1, got {n_points}")
    if offset is None:
        offset = slice_index * n_points
    points = stream(spec, offset, n_points)
    hits = count_hits(volume, slice_index, points)
    area = hits / n_points * volume.geometry.slice_area_mm2
    return AreaEstimate(slice_index=slice_index, hits=hits, total=n_points, area_mm2=area)


def frustum_sum(areas, thickness_mm: float) -> float:
    """Sum of (S0 + S1 + sqrt(S0*S1)) * h / 3 over consecutive slice pairs.

    A single slice has no pairs and yields 0.  Zero areas are legal (the
    geometric-mean term vanishes smoothly); negative areas are rejected.
    """
    if not thickness_mm > 0.0:
        raise ValueError(f"thickness must be positive, got {thickness_mm}")
    values = [float(a) for a in areas]
    if not values:
        raise ValueError("need at least one slice area")
    for a in values:
        if a < 0.0:
            raise ValueError(f"negative slice area: {a}")
    total = 0.0
    for lower, upper in zip(values, values[1:]):
        total += (lower + upper + math.sqrt(lower * upper)) * thickness_mm / 3.0
    return total


def _resolve_workers(workers: int | None) -> int:
    """Explicit argument wins, then QVOL_THREADS, then auto (0)."""
    if workers is None:
        raw = os.environ.get("QVOL_THREADS", "0")
        try:
            workers = int(raw)
        except ValueError:
            raise ValueError(f"QVOL_THREADS must be an integer, got {raw!r}") from None
    if workers < 0:
        raise ValueError(f"worker count must be >= 0, got {workers}")
    if workers == 0:
        workers = min(os.cpu_count() or 1, 8)
    return workers


def estimate_volume(
    volume: MaskVolume,
    spec: SequenceSpec,
    n_points: int,
    truth_mm3: float | None = None,
    *,
    restart_per_slice: bool = False,
    workers: int | None = None,
) -> VolumeReport:
    """Estimate the region volume of a whole stack.

    Per-slice areas come from ``estimate_slice_area``; the total is their
    frustum sum with h = thickness_mm.  Slices may be evaluated on several
    threads, but each slice's stream window is fixed by its index and the
    final sum runs in slice order, so the report is identical for any
    worker count.
    """
    if n_points < 1:
        raise ValueError(f"n_points must be >= 1, got {n_points}")
    n_workers = _resolve_workers(workers)

    def one_slice(i: int) -> AreaEstimate:
        return estimate_slice_area(
            volume, i, spec, n_points, offset=0 if restart_per_slice else i * n_points
        )

    indices = range(volume.num_slices)
    if n_workers <= 1 or volume.num_slices == 1:
        per_slice = [one_slice(i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            per_slice = list(pool.map(one_slice, indices))

    total = frustum_sum([e.area_mm2 for e in per_slice], volume.geometry.thickness_mm)
    relative_error = None
    if truth_mm3 is not None:
        if not truth_mm3 > 0.0:
            raise ValueError(f"truth volume must be positive, got {truth_mm3}")
        relative_error = abs(total - truth_mm3) / truth_mm3
    return VolumeReport(
        volume_mm3=total,
        per_slice=tuple(per_slice),
        method=spec.describe(),
        points_per_slice=n_points,
        truth_mm3=truth_mm3,
        relative_error=relative_error,
    )


def mask_slice_areas(volume: MaskVolume) -> np.ndarray:
    """Exact region area of every slice of a rasterized mask, mm^2."""
    g = volume.geometry
    counts = volume.data.reshape(volume.num_slices, -1).sum(axis=1)
    return counts.astype(np.float64) * (g.dx_mm * g.dy_mm)


def frustum_limit_volume(volume: MaskVolume) -> float:
    """The volume the sampling estimator converges to as n_points grows.

    This is the frustum sum over the mask's exact per-slice areas; it
    isolates sampling error from rasterization and section-model effects,
    so it is the natural reference for convergence studies.
    """
    return frustum_sum(mask_slice_areas(volume), volume.geometry.thickness_mm)
