"""Analytic solids rasterized onto mask volumes, with known volumes.

Shapes live in physical millimeter coordinates: an in-plane center (cx, cy)
and a vertical extent [z0, z0 + height].  Voxel centers sit at
((x+0.5)dx, (y+0.5)dy, (i+0.5)t); a voxel is inside when its center lies in
the closed solid.  Closed-form cross-section areas at the slice-center
planes let the integrator be tested separately from any sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .maskio import MaskVolume, SliceGeometry


@dataclass(frozen=True)
class Cube:
    edge_mm: float


@dataclass(frozen=True)
class Cuboid:
    """Axis-aligned box: a_mm along x, b_mm along y, c_mm along z."""

    a_mm: float
    b_mm: float
    c_mm: float


@dataclass(frozen=True)
class Cylinder:
    """Circular cylinder with its axis along z (the stacking direction)."""

    radius_mm: float
    height_mm: float


@dataclass(frozen=True)
class Cone:
    """Circular cone, base at low z, apex at high z, axis along z."""

    base_radius_mm: float
    height_mm: float


Shape = Union[Cube, Cuboid, Cylinder, Cone]


def _footprint_mm(shape: Shape) -> tuple[float, float]:
    """In-plane bounding extents (x, y) of the shape."""
    if isinstance(shape, Cube):
        return shape.edge_mm, shape.edge_mm
    if isinstance(shape, Cuboid):
        return shape.a_mm, shape.b_mm
    return 2.0 * _base_radius(shape), 2.0 * _base_radius(shape)


def _base_radius(shape) -> float:
    return shape.radius_mm if isinstance(shape, Cylinder) else shape.base_radius_mm


def _height_mm(shape: Shape) -> float:
    if isinstance(shape, Cube):
        return shape.edge_mm
    if isinstance(shape, Cuboid):
        return shape.c_mm
    return shape.height_mm


def _check_dims(shape: Shape) -> None:
    for name, value in vars(shape).items():
        if not (value > 0.0 and math.isfinite(value)):
            raise ValueError(f"{type(shape).__name__}.{name} must be positive, got {value}")


@dataclass(frozen=True)
class PhantomSpec:
    """A shape embedded in a slice stack.

    ``center_mm`` defaults to the grid center.  ``z0_mm`` (the base plane of
    the shape) defaults to a centered placement snapped down to a slab
    boundary, which keeps slice counts exact when height/thickness is an
    integer.
    """

    shape: Shape
    geometry: SliceGeometry
    num_slices: int
    center_mm: tuple[float, float] | None = None
    z0_mm: float | None = None

    def __post_init__(self) -> None:
        _check_dims(self.shape)
        if self.num_slices < 1:
            raise ValueError(f"num_slices must be >= 1, got {self.num_slices}")
        g = self.geometry
        cx, cy = self.center()
        sx, sy = _footprint_mm(self.shape)
        if (
            cx - sx / 2 < g.dx_mm
            or cx + sx / 2 > (g.width_px - 1) * g.dx_mm
            or cy - sy / 2 < g.dy_mm
            or cy + sy / 2 > (g.height_px - 1) * g.dy_mm
        ):
            raise ValueError(
                f"{type(self.shape).__name__} footprint {sx:g}x{sy:g} mm at ({cx:g}, {cy:g}) "
                f"does not fit the {g.width_px}x{g.height_px} grid with a one-voxel margin"
            )

    def center(self) -> tuple[float, float]:
        if self.center_mm is not None:
            return self.center_mm
        g = self.geometry
        return (g.width_px * g.dx_mm / 2.0, g.height_px * g.dy_mm / 2.0)

    def base_z(self) -> float:
        if self.z0_mm is not None:
            return self.z0_mm
        t = self.geometry.thickness_mm
        return t * math.floor((self.num_slices - _height_mm(self.shape) / t) / 2.0)

    def slice_centers_mm(self) -> np.ndarray:
        return (np.arange(self.num_slices) + 0.5) * self.geometry.thickness_mm


def analytic_volume(spec: PhantomSpec) -> float:
    """Closed-form volume of the ideal solid, mm^3."""
    s = spec.shape
    if isinstance(s, Cube):
        return s.edge_mm**3
    if isinstance(s, Cuboid):
        return s.a_mm * s.b_mm * s.c_mm
    if isinstance(s, Cylinder):
        return math.pi * s.radius_mm**2 * s.height_mm
    return math.pi * s.base_radius_mm**2 * s.height_mm / 3.0


def exact_slice_areas(spec: PhantomSpec) -> np.ndarray:
    """Cross-section area of the ideal solid at each slice-center plane, mm^2."""
    s = spec.shape
    height = _height_mm(s)
    zeta = spec.slice_centers_mm() - spec.base_z()
    inside = (zeta >= 0.0) & (zeta <= height)
    areas = np.zeros(spec.num_slices, dtype=np.float64)
    if isinstance(s, Cube):
        areas[inside] = s.edge_mm**2
    elif isinstance(s, Cuboid):
        areas[inside] = s.a_mm * s.b_mm
    elif isinstance(s, Cylinder):
        areas[inside] = math.pi * s.radius_mm**2
    else:
        # similar sections: radius shrinks linearly from base to apex
        r = s.base_radius_mm * (1.0 - zeta[inside] / height)
        areas[inside] = math.pi * r**2
    return areas


def rasterize(spec: PhantomSpec) -> MaskVolume:
    """Voxel-center membership test against the closed solid."""
    g = spec.geometry
    s = spec.shape
    cx, cy = spec.center()
    xc = (np.arange(g.width_px) + 0.5) * g.dx_mm
    yc = (np.arange(g.height_px) + 0.5) * g.dy_mm
    zeta = spec.slice_centers_mm() - spec.base_z()
    in_z = (zeta >= 0.0) & (zeta <= _height_mm(s))

    mask = np.zeros((spec.num_slices, g.height_px, g.width_px), dtype=bool)
    if isinstance(s, (Cube, Cuboid)):
        sx, sy = _footprint_mm(s)
        footprint = (np.abs(yc - cy) <= sy / 2.0)[:, None] & (np.abs(xc - cx) <= sx / 2.0)[None, :]
        mask[in_z] = footprint
    elif isinstance(s, Cylinder):
        rr2 = (xc - cx)[None, :] ** 2 + (yc - cy)[:, None] ** 2
        mask[in_z] = rr2 <= s.radius_mm**2
    else:
        rr2 = (xc - cx)[None, :] ** 2 + (yc - cy)[:, None] ** 2
        radii = s.base_radius_mm * (1.0 - zeta / s.height_mm)
        for i in np.nonzero(in_z)[0]:
            mask[i] = rr2 <= radii[i] ** 2
    return MaskVolume(spec.geometry, mask)


# Canonical benchmark trio on a 128x128 grid at 1 mm isotropic spacing, two
# empty slices above and below.  Long axes point along z so the frustum
# rule's end-slab deficit (one third of a slab) stays small relative to the
# stack height.  True volumes: 512, 231 and ~424.115 cm^3.
_BENCHMARKS = {
    "cube": (Cube(edge_mm=80.0), 84, (64.0, 64.0)),
    # 110 x 60 x 35 mm box, longest edge stacked; the odd 35 mm extent gets a
    # half-pixel center shift so its faces fall between voxel centers.
    "cuboid": (Cuboid(a_mm=60.0, b_mm=35.0, c_mm=110.0), 114, (64.0, 64.5)),
    "cylinder": (Cylinder(radius_mm=30.0, height_mm=150.0), 154, (64.0, 64.0)),
}


def benchmark_phantom(name: str) -> PhantomSpec:
    """One of the canonical benchmark phantoms: cube, cuboid or cylinder."""
    try:
        shape, num_slices, center = _BENCHMARKS[name]
    except KeyError:
        raise ValueError(f"unknown benchmark phantom {name!r}; choose from {sorted(_BENCHMARKS)}") from None
    geometry = SliceGeometry(width_px=128, height_px=128, dx_mm=1.0, dy_mm=1.0, thickness_mm=1.0)
    return PhantomSpec(shape=shape, geometry=geometry, num_slices=num_slices, center_mm=center, z0_mm=2.0)
