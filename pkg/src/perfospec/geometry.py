"""Obstacle configurations in a box and their rasterization to a grid mask.

The box is the half-open cube ``[-L/2, L/2)^d``.  A disorder model places
copies of a bounded obstacle shape at lattice points (Bernoulli site marking,
or one copy per site for the periodic model) or at the atoms of a homogeneous
Poisson point process.  Placements are drawn from the enlarged box of side
``L + 2*L0`` (``L0`` = enclosing halfwidth of the shape) so that every obstacle
that can intersect the box is present; rasterization then clips to the box.

Sampling is deterministic given ``(model, box, seed)`` and stable under
further enlargement of the sampling region (see :mod:`perfospec.rng`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import rng
from .errors import ResolutionError, ValidationError

__all__ = [
    "BoxSpec",
    "ObstacleShape",
    "Bernoulli",
    "Poisson",
    "Periodic",
    "DisorderModel",
    "Realization",
    "ObstacleMask",
    "sample_bernoulli",
    "sample_poisson",
    "build_periodic",
    "sample_model",
    "model_shape",
    "model_descriptor",
    "rasterize",
    "mask_to_json",
    "mask_from_json",
]


@dataclass(frozen=True)
class BoxSpec:
    """The computational box ``[-L/2, L/2)^d``."""

    d: int
    L: float

    def __post_init__(self):
        if not (isinstance(self.d, (int, np.integer)) and self.d >= 1):
            raise ValidationError(f"dimension must be a positive integer, got {self.d}")
        if not (self.L > 0):
            raise ValidationError(f"box side must be positive, got {self.L}")

    @property
    def halfwidth(self) -> float:
        return self.L / 2.0

    @property
    def volume(self) -> float:
        return float(self.L) ** self.d


class ObstacleShape:
    """A bounded obstacle in its own frame, centered at the origin.

    Two kinds are supported: an axis-aligned cube of given side (half-open,
    ``[-side/2, side/2)^d``), and an explicit boolean cell mask at a stated
    resolution (``cells_per_unit`` grid cells per unit length).
    """

    def __init__(self, kind, d, side=None, cells=None, cells_per_unit=None):
        if kind not in ("box", "cells"):
            raise ValidationError(f"unknown shape kind {kind!r}")
        self.kind = kind
        self.d = int(d)
        self.side = side
        self.cells = cells
        self.cells_per_unit = cells_per_unit
        if kind == "box":
            if side is None or side < 0:
                raise ValidationError("box shape needs a nonnegative side")
        else:
            if cells is None or cells_per_unit is None or cells_per_unit < 1:
                raise ValidationError("cell-mask shape needs cells and cells_per_unit >= 1")
            if cells.ndim != self.d:
                raise ValidationError("cell mask dimension does not match d")

    @classmethod
    def box(cls, side: float, d: int) -> "ObstacleShape":
        return cls("box", d, side=float(side))

    @classmethod
    def from_cells(cls, cells: np.ndarray, cells_per_unit: int) -> "ObstacleShape":
        cells = np.asarray(cells, dtype=bool)
        return cls("cells", cells.ndim, cells=cells, cells_per_unit=int(cells_per_unit))

    @property
    def volume(self) -> float:
        if self.kind == "box":
            return float(self.side) ** self.d
        return float(self.cells.sum()) / float(self.cells_per_unit) ** self.d

    def halfwidths(self) -> np.ndarray:
        """Per-axis halfwidth of the bounding box of the shape."""
        if self.kind == "box":
            return np.full(self.d, self.side / 2.0)
        return np.array(self.cells.shape, dtype=float) / (2.0 * self.cells_per_unit)

    @property
    def enclosing_halfwidth(self) -> float:
        """Smallest ``L0`` with the shape inside ``[-L0, L0)^d``."""
        return float(self.halfwidths().max(initial=0.0))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Membership test for points given in the shape's own frame."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "box":
            half = self.side / 2.0
            return np.all((points >= -half) & (points < half), axis=1)
        m = np.array(self.cells.shape)
        idx = np.floor((points + m / (2.0 * self.cells_per_unit)) * self.cells_per_unit).astype(int)
        inside = np.all((idx >= 0) & (idx < m), axis=1)
        result = np.zeros(points.shape[0], dtype=bool)
        if inside.any():
            result[inside] = self.cells[tuple(idx[inside].T)]
        return result

    def __repr__(self):
        if self.kind == "box":
            return f"ObstacleShape.box(side={self.side}, d={self.d})"
        return f"ObstacleShape.cells(shape={self.cells.shape}, M0={self.cells_per_unit})"


@dataclass(frozen=True)
class Bernoulli:
    """Independent site marking: each lattice site carries an obstacle w.p. ``p``."""

    p: float
    shape: ObstacleShape

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise ValidationError(f"site probability must lie in (0,1), got {self.p}")


@dataclass(frozen=True)
class Poisson:
    """Homogeneous Poisson point process with intensity ``c`` per unit volume."""

    c: float
    shape: ObstacleShape

    def __post_init__(self):
        if not (self.c > 0.0):
            raise ValidationError(f"intensity must be positive, got {self.c}")


@dataclass(frozen=True)
class Periodic:
    """One obstacle cube of side ``beta`` at every lattice point."""

    beta: float

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ValidationError(f"beta must lie in (0,1), got {self.beta}")


DisorderModel = Bernoulli | Poisson | Periodic


def model_shape(model: DisorderModel, d: int) -> ObstacleShape:
    """The obstacle shape a model places (the periodic cube is derived from beta)."""
    if isinstance(model, Periodic):
        return ObstacleShape.box(model.beta, d)
    return model.shape


def model_descriptor(model: DisorderModel) -> str:
    """Short human/machine-readable tag used in exports."""
    if isinstance(model, Bernoulli):
        return f"bernoulli(p={model.p!r},shape={_shape_tag(model.shape)})"
    if isinstance(model, Poisson):
        return f"poisson(c={model.c!r},shape={_shape_tag(model.shape)})"
    return f"periodic(beta={model.beta!r})"


def _shape_tag(shape: ObstacleShape) -> str:
    if shape.kind == "box":
        return f"box(side={shape.side!r})"
    return f"cells(n={'x'.join(map(str, shape.cells.shape))},M0={shape.cells_per_unit})"


@dataclass(frozen=True, eq=False)
class Realization:
    """Obstacle centers drawn from the enlarged box, plus the seed that made them."""

    placements: np.ndarray  # (n, d) float64, one row per obstacle center
    seed: int

    @property
    def count(self) -> int:
        return self.placements.shape[0]


def _lattice_sites(d: int, half: float) -> np.ndarray:
    """Integer lattice points of ``[-half, half)^d`` in lexicographic order."""
    axis = np.arange(math.ceil(-half), math.ceil(half), dtype=np.int64)
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack(grids, axis=-1).reshape(-1, d)


def sample_bernoulli(model: Bernoulli, box: BoxSpec, seed: int,
                     enlargement: float | None = None) -> Realization:
    """Mark every lattice site of the enlarged box independently w.p. ``p``.

    ``enlargement`` is the total addition to the box side (default ``2*L0``);
    passing a larger value yields a superset of placements whose restriction
    to the default region is identical, because each site's draw is keyed on
    ``(seed, site)``.
    """
    if not isinstance(model, Bernoulli):
        raise ValidationError("sample_bernoulli requires a Bernoulli model")
    if enlargement is None:
        enlargement = 2.0 * model.shape.enclosing_halfwidth
    half = (box.L + enlargement) / 2.0
    sites = _lattice_sites(box.d, half)
    u = rng.uniforms(rng.site_keys(seed, sites, salt=rng.SALT_BERNOULLI))
    return Realization(placements=sites[u < model.p].astype(np.float64), seed=int(seed))


def sample_poisson(model: Poisson, box: BoxSpec, seed: int,
                   enlargement: float | None = None) -> Realization:
    """Draw Poisson atoms in the enlarged box, one unit cell at a time.

    The process is realized cell-wise: the unit cell around lattice point
    ``g`` receives a Poisson(c) number of uniform points keyed on
    ``(seed, g)``, and atoms falling outside the enlarged box are dropped.
    Restricting a homogeneous Poisson process is again Poisson, so the kept
    atom count is Poisson with mean ``c * (L + 2*L0)^d``, disjoint regions are
    independent, and enlarging the region only ever adds atoms.
    """
    if not isinstance(model, Poisson):
        raise ValidationError("sample_poisson requires a Poisson model")
    if enlargement is None:
        enlargement = 2.0 * model.shape.enclosing_halfwidth
    half = (box.L + enlargement) / 2.0
    # unit cells (g + [-1/2,1/2)^d) that meet the enlarged box
    axis = np.arange(math.floor(-half - 0.5) + 1, math.ceil(half + 0.5), dtype=np.int64)
    grids = np.meshgrid(*([axis] * box.d), indexing="ij")
    cells = np.stack(grids, axis=-1).reshape(-1, box.d)

    count_keys = rng.site_keys(seed, cells, salt=rng.SALT_POISSON_COUNT)
    counts = stats.poisson.ppf(rng.uniforms(count_keys), model.c).astype(np.int64)
    pos_keys = rng.site_keys(seed, cells, salt=rng.SALT_POISSON_POS)

    atoms = []
    for cell, k, key in zip(cells, counts, pos_keys):
        if k <= 0:
            continue
        u = rng.stream_uniforms(key, int(k) * box.d).reshape(int(k), box.d)
        pts = cell - 0.5 + u
        keep = np.all((pts >= -half) & (pts < half), axis=1)
        if keep.any():
            atoms.append(pts[keep])
    placements = np.concatenate(atoms, axis=0) if atoms else np.empty((0, box.d))
    return Realization(placements=placements, seed=int(seed))


def build_periodic(model: Periodic, box: BoxSpec) -> Realization:
    """One obstacle at every lattice point of the enlarged box; no randomness."""
    if not isinstance(model, Periodic):
        raise ValidationError("build_periodic requires a Periodic model")
    half = (box.L + model.beta) / 2.0
    return Realization(placements=_lattice_sites(box.d, half).astype(np.float64), seed=0)


def sample_model(model: DisorderModel, box: BoxSpec, seed: int) -> Realization:
    if isinstance(model, Bernoulli):
        return sample_bernoulli(model, box, seed)
    if isinstance(model, Poisson):
        return sample_poisson(model, box, seed)
    return build_periodic(model, box)


@dataclass(frozen=True, eq=False)
class ObstacleMask:
    """Rasterized obstacle set on the grid of the box.

    ``occupied[i0, ..., i_{d-1}]`` is True iff the center of that grid cell
    lies inside some placed obstacle; axis ``k`` indexes coordinate ``k``.
    ``measured_volume`` is the Riemann-sum obstacle volume, and ``fraction``
    is ``(2/L)^d * measured_volume``, the quantity whose being below one
    validates the trial-family certificate.
    """

    box: BoxSpec
    cells_per_unit: int
    occupied: np.ndarray
    measured_volume: float
    fraction: float
    seed: int = 0

    @property
    def h(self) -> float:
        return 1.0 / self.cells_per_unit

    @property
    def cells_per_axis(self) -> int:
        return self.occupied.shape[0]

    @property
    def occupied_count(self) -> int:
        return int(self.occupied.sum())

    @property
    def retained_count(self) -> int:
        return self.occupied.size - self.occupied_count

    def axis_centers(self) -> np.ndarray:
        """Cell-center coordinates along one axis (all axes are identical)."""
        n = self.cells_per_axis
        return -self.box.halfwidth + (np.arange(n) + 0.5) * self.h

    def centers(self, flat_indices: np.ndarray) -> np.ndarray:
        """(n, d) centers of the cells with the given C-order flat indices."""
        multi = np.unravel_index(np.asarray(flat_indices, dtype=np.int64), self.occupied.shape)
        centers = self.axis_centers()
        return np.stack([centers[m] for m in multi], axis=-1)


def rasterize(realization: Realization, shape: ObstacleShape, box: BoxSpec,
              cells_per_unit: int) -> ObstacleMask:
    """Mark the grid cells of the box whose centers lie in a placed obstacle."""
    if cells_per_unit < 2:
        raise ResolutionError(f"cells_per_unit must be >= 2, got {cells_per_unit}")
    n_float = box.L * cells_per_unit
    n = round(n_float)
    if abs(n_float - n) > 1e-9 or n < 1:
        raise ResolutionError(
            f"L*cells_per_unit = {n_float} is not a positive integer; "
            "the grid must tile the box exactly")
    if shape.d != box.d:
        raise ValidationError("shape dimension does not match box dimension")

    h = 1.0 / cells_per_unit
    centers = -box.halfwidth + (np.arange(n) + 0.5) * h
    occupied = np.zeros((n,) * box.d, dtype=bool)
    placements = realization.placements.reshape(-1, box.d)

    if placements.shape[0] > 0:
        half = shape.halfwidths()
        lo = np.empty((placements.shape[0], box.d), dtype=np.int64)
        hi = np.empty_like(lo)
        for k in range(box.d):
            lo[:, k] = np.searchsorted(centers, placements[:, k] - half[k], side="left")
            hi[:, k] = np.searchsorted(centers, placements[:, k] + half[k], side="left")
        if shape.kind == "box":
            for p in range(placements.shape[0]):
                block = tuple(slice(lo[p, k], hi[p, k]) for k in range(box.d))
                occupied[block] = True
        else:
            for p in range(placements.shape[0]):
                block = tuple(slice(lo[p, k], hi[p, k]) for k in range(box.d))
                axes = [centers[block[k]] - placements[p, k] for k in range(box.d)]
                if any(a.size == 0 for a in axes):
                    continue
                local = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, box.d)
                inside = shape.contains(local).reshape([a.size for a in axes])
                occupied[block] |= inside

    measured = float(occupied.sum()) * h**box.d
    fraction = measured * (2.0 / box.L) ** box.d
    return ObstacleMask(box=box, cells_per_unit=cells_per_unit, occupied=occupied,
                        measured_volume=measured, fraction=fraction,
                        seed=realization.seed)


def mask_to_json(mask: ObstacleMask) -> str:
    """Serialize a mask; the bit array is row-major with axis 0 (x) fastest."""
    doc = {
        "d": mask.box.d,
        "L": mask.box.L,
        "cells_per_unit": mask.cells_per_unit,
        "occupied": np.ravel(mask.occupied, order="F").astype(int).tolist(),
        "measured_volume": mask.measured_volume,
        "seed": mask.seed,
    }
    return json.dumps(doc)


def mask_from_json(text: str) -> ObstacleMask:
    doc = json.loads(text)
    box = BoxSpec(d=int(doc["d"]), L=float(doc["L"]))
    m = int(doc["cells_per_unit"])
    n = round(box.L * m)
    occupied = np.array(doc["occupied"], dtype=bool).reshape((n,) * box.d, order="F")
    measured = float(occupied.sum()) * (1.0 / m) ** box.d
    stored = float(doc["measured_volume"])
    if abs(stored - measured) > 1e-9 * (1.0 + abs(stored)):
        raise ValidationError("measured_volume does not match the occupied bit array")
    return ObstacleMask(box=box, cells_per_unit=m, occupied=occupied,
                        measured_volume=measured,
                        fraction=measured * (2.0 / box.L) ** box.d,
                        seed=int(doc.get("seed", 0)))
