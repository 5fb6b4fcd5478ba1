"""Quasi-Monte Carlo volumetry for stacked-slice binary masks.

Estimates the volume of a labeled region in a stack of equally spaced
binary slices: each slice is sampled with a deterministic 2-D point stream
(Halton low-discrepancy points, or a seeded pseudorandom baseline), the hit
fraction scales the slice's physical area, and the per-slice areas are
integrated with a frustum rule.  Includes analytic phantoms, raw-file I/O,
and a convergence-analysis harness.
"""

from .analysis import (
    ConvergenceReport,
    MethodResult,
    PointsToTarget,
    compare_methods,
    convergence_sweep,
    points_to_target,
    relative_error,
)
from .estimator import (
    AreaEstimate,
    VolumeReport,
    estimate_slice_area,
    estimate_volume,
    frustum_limit_volume,
    frustum_sum,
    mask_slice_areas,
)
from .maskio import (
    MaskIOError,
    MaskVolume,
    SliceGeometry,
    contains,
    count_hits,
    load_volume,
    save_volume,
    voxel_count_volume_mm3,
)
from .phantoms import (
    Cone,
    Cube,
    Cuboid,
    Cylinder,
    PhantomSpec,
    analytic_volume,
    benchmark_phantom,
    exact_slice_areas,
    rasterize,
)
from .sequences import DEFAULT_BASES, Point2, SequenceSpec, halton_point, radical_inverse, stream

__version__ = "0.1.0"

__all__ = [
    "AreaEstimate",
    "Cone",
    "ConvergenceReport",
    "Cube",
    "Cuboid",
    "Cylinder",
    "DEFAULT_BASES",
    "MaskIOError",
    "MaskVolume",
    "MethodResult",
    "PhantomSpec",
    "Point2",
    "PointsToTarget",
    "SequenceSpec",
    "SliceGeometry",
    "VolumeReport",
    "analytic_volume",
    "benchmark_phantom",
    "compare_methods",
    "contains",
    "convergence_sweep",
    "count_hits",
    "estimate_slice_area",
    "estimate_volume",
    "exact_slice_areas",
    "frustum_limit_volume",
    "frustum_sum",
    "halton_point",
    "load_volume",
    "mask_slice_areas",
    "points_to_target",
    "radical_inverse",
    "rasterize",
    "relative_error",
    "save_volume",
    "stream",
    "voxel_count_volume_mm3",
]
