"""Stacked-slice mask volumes: geometry, point membership, raw-file I/O.

A volume is an ordered stack of equally spaced binary slices over one
in-plane grid.  On disk it is a two-file pair: a plain-text manifest naming
the grid and a raw voxel file in slice-major, then row-major order.  Scalar
f32 voxels binarize by sign (> 0.0 is inside); u8 voxels by threshold
(>= 128).  Millimeters are the only internal unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Manifest keys, in the order they are written.  Anything else is an error.
_MANIFEST_KEYS = ("width", "height", "slices", "dx_mm", "dy_mm", "thickness_mm", "encoding", "data")
_ENCODINGS = ("u8", "f32le")

# Inside/background voxel values written by save_volume.
_U8_INSIDE, _U8_BACKGROUND = 255, 0
_F32_INSIDE, _F32_BACKGROUND = 4.0, -4.0


class MaskIOError(Exception):
    """Raised for malformed manifests or inconsistent voxel data."""


@dataclass(frozen=True)
class SliceGeometry:
    """Physical layout of one slice and the inter-slice spacing."""

    width_px: int
    height_px: int
    dx_mm: float
    dy_mm: float
    thickness_mm: float

    def __post_init__(self) -> None:
        if self.width_px < 1 or self.height_px < 1:
            raise ValueError(f"pixel dimensions must be positive, got {self.width_px}x{self.height_px}")
        for name in ("dx_mm", "dy_mm", "thickness_mm"):
            value = getattr(self, name)
            if not (value > 0.0 and np.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value}")

    @property
    def slice_area_mm2(self) -> float:
        """Physical area of one full slice."""
        return self.width_px * self.dx_mm * self.height_px * self.dy_mm


@dataclass(frozen=True, eq=False)
class MaskVolume:
    """Immutable stack of binary slices; ``data`` has shape (slices, height, width)."""

    geometry: SliceGeometry
    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=bool, order="C")
        if arr.ndim != 3:
            raise ValueError(f"data must be 3-D (slices, height, width), got shape {arr.shape}")
        z, h, w = arr.shape
        if z < 1:
            raise ValueError("a volume needs at least one slice")
        if (h, w) != (self.geometry.height_px, self.geometry.width_px):
            raise ValueError(
                f"slice shape {h}x{w} does not match geometry "
                f"{self.geometry.height_px}x{self.geometry.width_px}"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def num_slices(self) -> int:
        return self.data.shape[0]

    def slice_mask(self, slice_index: int) -> np.ndarray:
        """Read-only boolean grid of one slice (height_px x width_px)."""
        _check_slice_index(self, slice_index)
        return self.data[slice_index]


def _check_slice_index(volume: MaskVolume, slice_index: int) -> None:
    if not 0 <= slice_index < volume.num_slices:
        raise IndexError(f"slice index {slice_index} out of range 0..{volume.num_slices - 1}")


def contains(volume: MaskVolume, slice_index: int, p) -> bool:
    """True when the unit-square point maps to an inside voxel of the slice.

    (u, v) maps to pixel (floor(u*width), floor(v*height)); u = v = 0.999...
    still lands on the last pixel because coordinates are < 1.
    """
    _check_slice_index(volume, slice_index)
    u, v = float(p[0]), float(p[1])
    g = volume.geometry
    x = int(u * g.width_px)
    y = int(v * g.height_px)
    return bool(volume.data[slice_index, y, x])


def count_hits(volume: MaskVolume, slice_index: int, points: np.ndarray) -> int:
    """Number of points landing on inside voxels; equals looping ``contains``."""
    _check_slice_index(volume, slice_index)
    pts = np.asarray(points, dtype=np.float64)
    g = volume.geometry
    xs = (pts[:, 0] * g.width_px).astype(np.int64)
    ys = (pts[:, 1] * g.height_px).astype(np.int64)
    return int(volume.data[slice_index, ys, xs].sum())


def voxel_count_volume_mm3(volume: MaskVolume) -> float:
    """Inside-voxel count times the physical voxel volume."""
    g = volume.geometry
    return float(volume.data.sum()) * g.dx_mm * g.dy_mm * g.thickness_mm


def _parse_positive_int(key: str, value: str, path: Path) -> int:
    try:
        n = int(value)
    except ValueError:
        raise MaskIOError(f"{path}: key {key!r}: expected an integer, got {value!r}") from None
    if n < 1:
        raise MaskIOError(f"{path}: key {key!r}: must be positive, got {n}")
    return n


def _parse_positive_float(key: str, value: str, path: Path) -> float:
    try:
        x = float(value)
    except ValueError:
        raise MaskIOError(f"{path}: key {key!r}: expected a decimal, got {value!r}") from None
    if not (x > 0.0 and np.isfinite(x)):
        raise MaskIOError(f"{path}: key {key!r}: spacing must be positive, got {value}")
    return x


def load_volume(manifest_path) -> MaskVolume:
    """Read a manifest + raw pair from disk.

    Fails closed: unknown or duplicate manifest keys, bad values, and any
    size disagreement between header and data file are errors.
    """
    path = Path(manifest_path)
    if not path.is_file():
        raise MaskIOError(f"manifest not found: {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MaskIOError(f"cannot read manifest {path}: {exc}") from exc

    entries: dict[str, str] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise MaskIOError(f"{path}:{lineno}: expected 'key = value', got {raw_line!r}")
        if key not in _MANIFEST_KEYS:
            raise MaskIOError(f"{path}:{lineno}: unknown key {key!r}")
        if key in entries:
            raise MaskIOError(f"{path}:{lineno}: duplicate key {key!r}")
        entries[key] = value
    missing = [k for k in _MANIFEST_KEYS if k not in entries]
    if missing:
        raise MaskIOError(f"{path}: missing keys: {', '.join(missing)}")

    width = _parse_positive_int("width", entries["width"], path)
    height = _parse_positive_int("height", entries["height"], path)
    slices = _parse_positive_int("slices", entries["slices"], path)
    geometry = SliceGeometry(
        width_px=width,
        height_px=height,
        dx_mm=_parse_positive_float("dx_mm", entries["dx_mm"], path),
        dy_mm=_parse_positive_float("dy_mm", entries["dy_mm"], path),
        thickness_mm=_parse_positive_float("thickness_mm", entries["thickness_mm"], path),
    )
    encoding = entries["encoding"]
    if encoding not in _ENCODINGS:
        raise MaskIOError(f"{path}: key 'encoding': unknown encoding token {encoding!r}")

    data_path = path.parent / entries["data"]
    if not data_path.is_file():
        raise MaskIOError(f"{path}: key 'data': data file not found: {data_path}")
    try:
        blob = data_path.read_bytes()
    except OSError as exc:
        raise MaskIOError(f"cannot read data file {data_path}: {exc}") from exc

    bytes_per_voxel = 1 if encoding == "u8" else 4
    expected = width * height * slices * bytes_per_voxel
    if len(blob) != expected:
        raise MaskIOError(
            f"{data_path}: size mismatch for key 'data': expected {expected} bytes "
            f"({width}x{height}x{slices} at {bytes_per_voxel} B/voxel), got {len(blob)}"
        )
    if encoding == "u8":
        bits = np.frombuffer(blob, dtype=np.uint8) >= 128
    else:
        bits = np.frombuffer(blob, dtype="<f4") > 0.0
    return MaskVolume(geometry, bits.reshape(slices, height, width))


def save_volume(volume: MaskVolume, manifest_path, encoding: str) -> None:
    """Write a manifest + raw pair; ``load_volume`` reproduces bits and geometry exactly.

    The raw file is named after the manifest with a ``.raw`` suffix and
    referenced relatively, so the pair can be moved together.
    """
    if encoding not in _ENCODINGS:
        raise MaskIOError(f"unknown encoding token {encoding!r}")
    path = Path(manifest_path)
    data_name = path.stem + ".raw"
    g = volume.geometry
    manifest = "".join(
        f"{key} = {value}\n"
        for key, value in (
            ("width", g.width_px),
            ("height", g.height_px),
            ("slices", volume.num_slices),
            ("dx_mm", repr(g.dx_mm)),
            ("dy_mm", repr(g.dy_mm)),
            ("thickness_mm", repr(g.thickness_mm)),
            ("encoding", encoding),
            ("data", data_name),
        )
    )
    if encoding == "u8":
        blob = np.where(volume.data, _U8_INSIDE, _U8_BACKGROUND).astype(np.uint8).tobytes()
    else:
        blob = np.where(volume.data, _F32_INSIDE, _F32_BACKGROUND).astype("<f4").tobytes()
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        (path.parent / data_name).write_bytes(blob)
        path.write_text(manifest, encoding="utf-8")
    except OSError as exc:
        raise MaskIOError(f"cannot write volume at {path}: {exc}") from exc
