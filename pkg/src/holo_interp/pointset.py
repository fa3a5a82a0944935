"""Discrete point sets: separation statistics, ball counts, and the
hyperbolic (Seip-type) density used by the negative-curvature certificate."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from . import geometry
from .errors import DomainError, SizeGuardError, SpaceMismatchError

PAIR_GUARD = 10_000_000

#: Literal cutoff in the density sum: nodes at distance >= 1 contribute.
DENSITY_CUTOFF = 1.0


@dataclass
class PointSet:
    """A finite set of points with optional complex target values.

    ``points`` has shape (m, n); ``values`` (when present) shape (m,).
    Points must be pairwise distinct.
    """

    points: np.ndarray
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        if pts.size == 0:
            pts = pts.reshape(0, 1)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise DomainError("points must form an (m, n) array")
        self.points = pts
        if self.values is not None:
            vals = np.asarray(self.values, dtype=complex).reshape(-1)
            if vals.size != pts.shape[0]:
                raise DomainError("values length must equal the number of points")
            self.values = vals
        _check_distinct(self.points)

    def __len__(self):
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def point(self, i: int) -> np.ndarray:
        return self.points[i]

    def with_values(self, values) -> "PointSet":
        return PointSet(self.points.copy(), np.asarray(values, dtype=complex))

    def subset(self, indices) -> "PointSet":
        vals = None if self.values is None else self.values[indices]
        return PointSet(self.points[indices], vals)


def _check_distinct(pts: np.ndarray):
    m = pts.shape[0]
    if m < 2:
        return
    view = pts.view(float).reshape(m, -1)
    order = np.lexsort(view.T[::-1])
    sorted_rows = view[order]
    if np.any(np.all(sorted_rows[1:] == sorted_rows[:-1], axis=1)):
        raise DomainError("points must be pairwise distinct")


def pointset_from_dict(d: dict) -> PointSet:
    """Build a PointSet from the JSON schema.

    Each point is ``[re, im]`` (one coordinate) or a list of ``[re, im]``
    pairs (n coordinates); ``values`` entries are ``[re, im]``.
    """
    raw_pts = d.get("points", [])
    pts = [_parse_point(p) for p in raw_pts]
    if pts:
        n = len(pts[0])
        if any(len(p) != n for p in pts):
            raise DomainError("all points must have the same number of coordinates")
        arr = np.array(pts, dtype=complex)
    else:
        arr = np.zeros((0, 1), dtype=complex)
    values = None
    if d.get("values") is not None:
        values = np.array([complex(v[0], v[1]) for v in d["values"]], dtype=complex)
    return PointSet(arr, values)


def pointset_to_dict(pts: PointSet, space: Optional[geometry.ModelSpace] = None) -> dict:
    out: dict = {}
    if space is not None:
        out["space"] = geometry.space_to_dict(space)
    out["points"] = [[[c.real, c.imag] for c in row] if len(row) > 1 else [row[0].real, row[0].imag]
                     for row in pts.points]
    if pts.values is not None:
        out["values"] = [[v.real, v.imag] for v in pts.values]
    return out


def _parse_point(p) -> list:
    if len(p) == 2 and all(isinstance(c, (int, float)) for c in p):
        return [complex(p[0], p[1])]
    return [complex(c[0], c[1]) for c in p]


# ---------------------------------------------------------------------------
# separation

@dataclass(frozen=True)
class SeparationReport:
    """Minimum pairwise geodesic distance and the derived gluing radius.

    ``delta0 = min(min_pairwise_distance, r0) / 2`` where ``r0`` is the
    frame radius supplied by the weight (infinite when absent).
    """

    min_pairwise_distance: float
    arg_pair: Optional[tuple]
    delta0: float
    r0: float = math.inf


def separation(space: geometry.ModelSpace, pts: PointSet, r0: float = math.inf,
               pair_guard: int = PAIR_GUARD, bucketed: bool = False) -> SeparationReport:
    """Exact minimum pairwise distance (brute force over all pairs).

    Raises ``SizeGuardError`` beyond ``pair_guard`` pairs unless
    ``bucketed=True`` (flat spaces only), which prunes pairs with a uniform
    grid while remaining exact.
    """
    m = len(pts)
    if m <= 1:
        return SeparationReport(math.inf, None, min(math.inf, r0) / 2.0, r0)
    n_pairs = m * (m - 1) // 2
    if n_pairs > pair_guard and not bucketed:
        raise SizeGuardError(
            f"{n_pairs} pairs exceed the guard ({pair_guard}); "
            "pass bucketed=True (flat spaces) or reduce the set"
        )
    if bucketed:
        if not space.is_flat:
            raise SizeGuardError("bucketed separation is implemented for flat spaces only")
        dmin, pair = _bucketed_min_pair(pts.points)
    else:
        dmin, pair = _brute_force_min_pair(space, pts.points)
    return SeparationReport(dmin, pair, min(dmin, r0) / 2.0, r0)


def _brute_force_min_pair(space, points):
    m = points.shape[0]
    best = math.inf
    pair = None
    block = 512
    for i0 in range(0, m, block):
        hi = min(i0 + block, m)
        for i in range(i0, hi):
            d = geometry.distances_from(space, points[i + 1:], points[i])
            if d.size == 0:
                continue
            j = int(np.argmin(d))
            if d[j] < best:
                best = float(d[j])
                pair = (i, i + 1 + j)
    return best, pair


def _bucketed_min_pair(points):
    m = points.shape[0]
    coords = points.view(float).reshape(m, -1)
    # cheap upper bound: nearest neighbor among lexicographically adjacent rows
    order = np.lexsort(coords.T[::-1])
    srt = coords[order]
    gaps = np.linalg.norm(srt[1:] - srt[:-1], axis=1)
    ub = float(np.min(gaps[gaps > 0])) if np.any(gaps > 0) else 1.0
    cell = max(ub, 1e-300)
    buckets: dict = {}
    keys = np.floor(coords / cell).astype(np.int64)
    for i in range(m):
        buckets.setdefault(tuple(keys[i]), []).append(i)
    dim = coords.shape[1]
    offsets = list(itertools.product((-1, 0, 1), repeat=dim))
    best = math.inf
    pair = None
    for key, members in buckets.items():
        cand = []
        for off in offsets:
            cand.extend(buckets.get(tuple(k + o for k, o in zip(key, off)), []))
        for i in members:
            for j in cand:
                if j <= i:
                    continue
                d = float(np.linalg.norm(coords[i] - coords[j]))
                if d < best:
                    best = d
                    pair = (i, j)
    return best, pair


# ---------------------------------------------------------------------------
# counting and density

def count_in_ball(space: geometry.ModelSpace, pts: PointSet, z, rho: float) -> int:
    """Number of set points inside the open geodesic ball B(z, rho)."""
    if rho <= 0:
        raise DomainError("rho must be positive")
    if len(pts) == 0:
        return 0
    d = geometry.distances_from(space, pts.points, z)
    return int(np.count_nonzero(d < rho))


def seip_density(space: geometry.ModelSpace, pts: PointSet, x,
                 cutoff: float = DENSITY_CUTOFF) -> float:
    """Sum of ``-log tanh^2(d(x,p)/(2 kappa))`` over nodes at distance >= cutoff.

    Requires a hyperbolic ball; each contributing term is positive and
    decreases to 0 as the node recedes.
    """
    if space.is_flat:
        raise SpaceMismatchError("the density is defined on the hyperbolic ball only")
    if len(pts) == 0:
        return 0.0
    d = geometry.distances_from(space, pts.points, x)
    d = d[d >= cutoff]
    if d.size == 0:
        return 0.0
    return float(-2.0 * np.sum(np.log(np.tanh(d / (2.0 * space.kappa)))))


class GridSupremum(NamedTuple):
    value: float
    argmax: np.ndarray
    index: int


def sup_density(space: geometry.ModelSpace, pts: PointSet, sample_grid: Sequence,
                cutoff: float = DENSITY_CUTOFF) -> GridSupremum:
    """Maximum of the density over a sample grid, with the maximizing point.

    This is a grid supremum, not the supremum over the whole space; reports
    label it accordingly.
    """
    grid = list(sample_grid)
    if not grid:
        raise DomainError("sample grid must be nonempty")
    best = -math.inf
    best_i = 0
    for i, x in enumerate(grid):
        v = seip_density(space, pts, x, cutoff=cutoff)
        if v > best:
            best = v
            best_i = i
    return GridSupremum(best, geometry.as_point(grid[best_i], space.n), best_i)


# ---------------------------------------------------------------------------
# generators

def square_lattice(spacing: float, radius: Optional[float] = None,
                   half_extent: Optional[float] = None) -> PointSet:
    """Scaled integer lattice ``spacing * (a + i b)`` in the plane (n = 1).

    Keep points with ``|z| <= radius`` or with ``max(|a|,|b|) * spacing <=
    half_extent``; exactly one of the two truncations must be given.
    """
    if (radius is None) == (half_extent is None):
        raise DomainError("specify exactly one of radius or half_extent")
    if spacing <= 0:
        raise DomainError("spacing must be positive")
    pts = []
    if radius is not None:
        m = int(math.floor(radius / spacing))
        for a in range(-m, m + 1):
            for b in range(-m, m + 1):
                z = spacing * complex(a, b)
                if abs(z) <= radius + 1e-12:
                    pts.append(z)
    else:
        m = int(math.floor(half_extent / spacing + 1e-12))
        for a in range(-m, m + 1):
            for b in range(-m, m + 1):
                pts.append(spacing * complex(a, b))
    return PointSet(np.array(pts, dtype=complex).reshape(-1, 1))


def grid_points(x0: float, x1: float, nx: int, y0: float, y1: float, ny: int) -> np.ndarray:
    """Row-major rectangular sample grid of complex points (x fastest)."""
    if nx < 1 or ny < 1:
        raise DomainError("grid must contain at least one point per axis")
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    out = (xs[None, :] + 1j * ys[:, None]).reshape(-1)
    return out
