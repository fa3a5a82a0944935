"""Constructive interpolation pipeline: normal-frame local sections, smooth
cutoff gluing, the singular auxiliary weight with log poles on the node set,
and the dbar-energy quadrature of the glued extension.

The final holomorphic correction is not produced by a PDE solve; the
``rkhs`` module supplies the desk-scale interpolant with the same contract
(exact nodal values, finite weighted norm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import geometry, pointset, weights
from .errors import DomainError, QuadratureError, SpaceMismatchError


# ---------------------------------------------------------------------------
# cutoff

def _bump(u):
    out = np.zeros_like(u, dtype=float)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def cutoff(t):
    """Smooth nonincreasing cutoff: 1 on [0, 1/4], 0 on [1, inf).

    Built from the exponential bump partition ``s(u) = exp(-1/u)``:
    ``chi(t) = s((1-t)/(3/4)) / (s((1-t)/(3/4)) + s((t-1/4)/(3/4)))``.
    """
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    if np.any(t_arr < 0):
        raise DomainError("cutoff argument must be nonnegative")
    a = _bump((1.0 - t_arr) / 0.75)
    b = _bump((t_arr - 0.25) / 0.75)
    out = np.empty_like(t_arr)
    lo = t_arr <= 0.25
    hi = t_arr >= 1.0
    mid = ~(lo | hi)
    out[lo] = 1.0
    out[hi] = 0.0
    out[mid] = a[mid] / (a[mid] + b[mid])
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# local sections and gluing

def local_section(w: weights.HermitianWeight, space: geometry.ModelSpace,
                  p, a_p: complex, z, delta0: float) -> complex:
    """Normal-frame holomorphic section ``a_p exp(exponent_p(z))`` on the
    delta0-ball around ``p``; equals ``a_p`` at ``z = p``."""
    if geometry.distance(space, p, z) >= delta0:
        raise DomainError("local section evaluated outside its delta0-ball")
    return complex(a_p) * complex(np.exp(weights.normal_frame_exponent(w, p, z)))


@dataclass
class GluedExtension:
    """Cutoff-glued field ``F = sum_p f_p chi(d(p,.)^2/delta0^2)``.

    Requires ``2 delta0 <= min(separation, r0)`` so the delta0-balls are
    disjoint and at most one node contributes at any point.  ``cutoff_fn``
    must be 1 on [0, 1/4] and 0 on [1, inf); the default is the standard
    exponential bump partition.
    """

    space: geometry.ModelSpace
    weight: weights.HermitianWeight
    points: pointset.PointSet
    delta0: float
    separation_report: Optional[pointset.SeparationReport] = None
    cutoff_fn: Callable = cutoff

    def __post_init__(self):
        if self.delta0 <= 0:
            raise DomainError("delta0 must be positive")
        if len(self.points) and self.points.values is None:
            raise DomainError("glued extension needs target values on the node set")

    def values(self) -> np.ndarray:
        return self.points.values if self.points.values is not None else np.zeros(0, dtype=complex)

    def evaluate(self, z) -> complex:
        return evaluate_extension(self, z)


def glued_extension(space: geometry.ModelSpace, w: weights.HermitianWeight,
                    pts: pointset.PointSet, delta0: Optional[float] = None,
                    bucketed: bool = False) -> GluedExtension:
    """Build a GluedExtension, refusing node sets that violate the
    disjointness guard ``2 delta0 <= min(separation, r0)``."""
    rep = pointset.separation(space, pts, r0=w.r0, bucketed=bucketed)
    if delta0 is None:
        delta0 = rep.delta0
    if not delta0 > 0:
        raise DomainError("delta0 must be positive (coincident nodes?)")
    bound = min(rep.min_pairwise_distance, w.r0)
    if 2.0 * delta0 > bound * (1.0 + 1e-12):
        raise DomainError(
            f"2*delta0 = {2 * delta0:.6g} exceeds min(separation, r0) = {bound:.6g}"
        )
    return GluedExtension(space, w, pts, float(delta0), rep)


def evaluate_extension(ext: GluedExtension, z) -> complex:
    """F(z): at most one node contributes; F(p) = a(p) exactly on the set."""
    m = len(ext.points)
    if m == 0:
        return 0.0 + 0.0j
    d = geometry.distances_from(ext.space, ext.points.points, z)
    out = 0.0 + 0.0j
    vals = ext.values()
    for i in np.nonzero(d < ext.delta0)[0]:
        chi = ext.cutoff_fn(d[i] ** 2 / ext.delta0 ** 2)
        out += local_section(ext.weight, ext.space, ext.points.point(i), vals[i], z,
                             ext.delta0) * chi
    return out


# ---------------------------------------------------------------------------
# auxiliary weights

@dataclass(frozen=True)
class AuxiliaryWeight:
    """Nonpositive weight ``n sum_q (1 - d^2/rho^2 + log(d^2/rho^2))`` over the
    nodes whose rho-ball contains the point; log poles of order 2n on the set."""

    space: geometry.ModelSpace
    points: pointset.PointSet
    rho: float

    def __post_init__(self):
        if self.rho <= 0:
            raise DomainError("rho must be positive")

    @property
    def n(self) -> int:
        return self.space.n

    def value(self, z) -> float:
        return float(self.value_grid(np.asarray(geometry.as_point(z, self.space.n))[None, :])[0])

    def value_grid(self, zs: np.ndarray) -> np.ndarray:
        """Vectorized values over an (m, n) array of points."""
        zs = np.asarray(zs, dtype=complex)
        if zs.ndim == 1:
            zs = zs[:, None]
        out = np.zeros(zs.shape[0])
        for q in self.points.points:
            d = geometry.distances_from(self.space, zs, q)
            pole = d == 0.0
            u = d ** 2 / self.rho ** 2
            inside = (~pole) & (u < 1.0)
            term = np.zeros_like(out)
            term[inside] = self.n * (1.0 - u[inside] + np.log(u[inside]))
            out += term
            out[pole] = -math.inf
        return out


def auxiliary_weight_value(aux: AuxiliaryWeight, z) -> float:
    """v(z); realises the -inf sentinel at the poles."""
    return aux.value(z)


def seip_weight_value(space: geometry.ModelSpace, pts: pointset.PointSet, z) -> float:
    """Hyperbolic pole weight ``n sum_p log tanh^2(d(p, z)/(2 kappa))``."""
    if space.is_flat:
        raise SpaceMismatchError("the tanh pole weight requires a hyperbolic ball")
    if len(pts) == 0:
        return 0.0
    d = geometry.distances_from(space, pts.points, z)
    if np.any(d == 0.0):
        return -math.inf
    vals = 2.0 * space.n * np.log(np.tanh(d / (2.0 * space.kappa)))
    total = float(np.sum(vals))
    if not math.isfinite(total):
        raise QuadratureError("tanh pole weight sum failed to converge", region=None)
    return total


# ---------------------------------------------------------------------------
# quadrature

def _cutoff_dbar_grid(ext: GluedExtension, p, zs: np.ndarray) -> np.ndarray:
    """FD Wirtinger dzbar of chi(d(p,.)^2/delta0^2) at each z (n = 1).

    Only the cutoff factor is differentiated; the local section is
    holomorphic by construction.
    """
    d0sq = ext.delta0 ** 2

    def comp(pts_1d):
        d = geometry.distances_from(ext.space, pts_1d[:, None], p)
        return ext.cutoff_fn(d ** 2 / d0sq)

    h = 1e-6 * np.maximum(1.0, np.abs(zs))
    fx = (comp(zs + h) - comp(zs - h)) / (2.0 * h)
    fy = (comp(zs + 1j * h) - comp(zs - 1j * h)) / (2.0 * h)
    return 0.5 * (fx + 1j * fy)


def _metric_coefficient_grid(space: geometry.ModelSpace, zs: np.ndarray) -> np.ndarray:
    if space.is_flat:
        return np.ones(zs.shape[0])
    s = np.abs(zs) ** 2 / space.kappa ** 2
    return 4.0 / (1.0 - s) ** 2


def _annulus_nodes(space, p, d_lo, d_hi, nr, ntheta):
    dd = (d_hi - d_lo) / nr
    dth = 2.0 * math.pi / ntheta
    ds = d_lo + (np.arange(nr) + 0.5) * dd
    ths = (np.arange(ntheta) + 0.5) * dth
    zs = np.empty(nr * ntheta, dtype=complex)
    jac = np.empty(nr * ntheta)
    for i, d in enumerate(ds):
        for j, th in enumerate(ths):
            zs[i * ntheta + j] = geometry.geodesic_point(space, p, d, th)
            jac[i * ntheta + j] = geometry.polar_area_jacobian(space, d)
    return zs, jac, dd * dth


def _node_energy(ext: GluedExtension, aux: AuxiliaryWeight, idx: int,
                 nr: int, ntheta: int) -> float:
    p = ext.points.point(idx)
    a_p = ext.values()[idx]
    zs, jac, cell = _annulus_nodes(ext.space, p, ext.delta0 / 2.0, ext.delta0, nr, ntheta)
    dbar = _cutoff_dbar_grid(ext, p, zs)
    zcol = zs[:, None]
    expo = weights.normal_frame_exponent(ext.weight, p, zcol)
    phi = ext.weight.value(zcol)
    v = aux.value_grid(zcol)
    g = _metric_coefficient_grid(ext.space, zs)
    # |dbar F|^2_omega := |dF/dzbar|^2 / g (constant conventions absorbed
    # into the comparison constant C)
    integrand = np.exp(2.0 * expo.real - phi - v) * (np.abs(dbar) ** 2) / g * jac
    total = abs(a_p) ** 2 * float(np.sum(integrand) * cell)
    if not math.isfinite(total):
        raise QuadratureError("dbar energy diverged", region=("annulus", idx))
    return total


def dbar_energy(ext: GluedExtension, aux: AuxiliaryWeight,
                nr: int = 32, ntheta: int = 64) -> float:
    """Midpoint quadrature of ``||dbar F||^2_h exp(-v)`` over the annuli
    ``delta0/2 <= d(p,.) <= delta0`` (dbar F vanishes elsewhere); n = 1."""
    if ext.space.n != 1:
        raise SpaceMismatchError("dbar energy quadrature is implemented for n = 1")
    total = 0.0
    for i in range(len(ext.points)):
        total += _node_energy(ext, aux, i, nr, ntheta)
    return total


@dataclass(frozen=True)
class EnergyReport:
    energy: float
    refined_energy: float
    drift: float
    levels: tuple
    per_node: tuple

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "refined_energy": self.refined_energy,
            "relative_drift": self.drift,
            "levels": [list(self.levels[0]), list(self.levels[1])],
            "per_node": list(self.per_node),
        }


def dbar_energy_report(ext: GluedExtension, aux: AuxiliaryWeight,
                       nr: int = 32, ntheta: int = 64) -> EnergyReport:
    """Energy at two refinement levels with the relative drift between them."""
    per_node = tuple(_node_energy(ext, aux, i, nr, ntheta) for i in range(len(ext.points)))
    e1 = float(sum(per_node))
    e2 = dbar_energy(ext, aux, 2 * nr, 2 * ntheta)
    drift = 0.0 if e2 == 0.0 else abs(e2 - e1) / abs(e2)
    return EnergyReport(e1, e2, drift, ((nr, ntheta), (2 * nr, 2 * ntheta)), per_node)


def extension_norm_sq(ext: GluedExtension, nr: int = 48, ntheta: int = 96) -> float:
    """Quadrature of ``||F||^2_h`` over the union of the delta0-balls (n = 1)."""
    if ext.space.n != 1:
        raise SpaceMismatchError("norm quadrature is implemented for n = 1")
    total = 0.0
    vals = ext.values()
    for i in range(len(ext.points)):
        p = ext.points.point(i)
        zs, jac, cell = _annulus_nodes(ext.space, p, 0.0, ext.delta0, nr, ntheta)
        d = geometry.distances_from(ext.space, zs[:, None], p)
        chi = ext.cutoff_fn(d ** 2 / ext.delta0 ** 2)
        zcol = zs[:, None]
        expo = weights.normal_frame_exponent(ext.weight, p, zcol)
        phi = ext.weight.value(zcol)
        integrand = np.exp(2.0 * expo.real - phi) * chi ** 2 * jac
        total += abs(vals[i]) ** 2 * float(np.sum(integrand) * cell)
    return total


def euclidean_disk_integral(fn, center: complex, radius: float,
                            nr: int = 64, ntheta: int = 128) -> float:
    """Gauss-Legendre (radial) x midpoint (angular) integral of a smooth
    real integrand over a Euclidean disk; ``fn`` is vectorized over complex z."""
    xs, wts = np.polynomial.legendre.leggauss(nr)
    r = 0.5 * radius * (xs + 1.0)
    wr = 0.5 * radius * wts
    th = 2.0 * math.pi * (np.arange(ntheta) + 0.5) / ntheta
    wth = 2.0 * math.pi / ntheta
    R, TH = np.meshgrid(r, th, indexing="ij")
    Z = center + R * np.exp(1j * TH)
    vals = np.asarray(fn(Z))
    return float(np.sum(vals * R * wr[:, None] * wth))


# ---------------------------------------------------------------------------
# curvature audit of the auxiliary weight

@dataclass(frozen=True)
class CurvatureCheckEntry:
    point: np.ndarray
    eigen_min: float
    bound: float

    @property
    def slack(self) -> float:
        return self.eigen_min - self.bound


@dataclass(frozen=True)
class CurvatureCheckReport:
    passed: bool
    tolerance: float
    worst_slack: float
    worst_index: int
    entries: tuple


def auxiliary_curvature_check(aux: AuxiliaryWeight, space: geometry.ModelSpace,
                              grid: Sequence, tol: float = 1e-4,
                              step: Optional[float] = None) -> CurvatureCheckReport:
    """Verify by finite differences that the smallest relative eigenvalue of
    ``i ddbar v`` dominates ``-n * count(z, rho)/rho^2 * (1 + k rho coth k rho)``
    up to ``tol`` at each grid point.

    Grid points must stay away from the poles (distance >= 0.05 rho).  Nodes
    whose ball boundary passes within the FD stencil of a grid point are
    counted conservatively.
    """
    entries = []
    factor = geometry.hessian_comparison_factor(space.k, aux.rho)
    for z in grid:
        z = space.validate_point(z)
        d = geometry.distances_from(space, aux.points.points, z)
        if d.size and float(np.min(d)) < 0.05 * aux.rho:
            raise DomainError("curvature check grid must keep distance >= 0.05*rho from nodes")
        h = geometry.default_fd_step(z) if step is None else float(step)
        stretch = math.sqrt(float(_metric_coefficient_grid(space, np.atleast_1d(z[0] if space.n == 1 else 0.0))[0])) if space.n == 1 else 1.0
        buffer = 2.0 * h * stretch
        count = int(np.count_nonzero(d < aux.rho + buffer)) if d.size else 0
        hess = geometry.complex_hessian_fd(aux.value, z, step=h)
        eig_min = float(geometry.relative_form_eigenvalues(space, z, hess)[0])
        bound = -space.n * count / aux.rho ** 2 * factor
        entries.append(CurvatureCheckEntry(z, eig_min, bound))
    if not entries:
        raise DomainError("curvature check grid must be nonempty")
    worst = min(range(len(entries)), key=lambda i: entries[i].slack)
    return CurvatureCheckReport(
        passed=bool(entries[worst].slack >= -tol),
        tolerance=tol,
        worst_slack=float(entries[worst].slack),
        worst_index=worst,
        entries=tuple(entries),
    )
