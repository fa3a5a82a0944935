"""Interpolation certificates: pointwise curvature-vs-counting checks over
sample grids, with per-sample margins.

Three criteria are implemented:

* ``bos``: on flat C^1, ``Delta Phi >= count(B(z,rho)) / rho^2 + eps`` with
  ``Delta Phi = 4 d^2Phi/dz dzbar``;
* ``theorem1``: smallest relative eigenvalue of ``i ddbar Phi + ricci`` must
  dominate ``n * count / rho^2 * (1 + k rho coth k rho) + eps``;
* ``theorem2``: on the hyperbolic ball, curvature floor ``eps`` plus a
  finite grid supremum of the hyperbolic density (user threshold).

A grid check is a surrogate for the pointwise-everywhere hypotheses; the
report records the worst margin so the surrogate is honest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import geometry, pointset, weights
from .errors import DomainError, SizeGuardError, SpaceMismatchError
from .reporting import report_envelope

BOS = "bos"
THEOREM1 = "theorem1"
THEOREM2 = "theorem2"


@dataclass(frozen=True)
class SampleMargin:
    point: np.ndarray
    required: float
    available: float

    @property
    def margin(self) -> float:
        return self.available - self.required


@dataclass
class CertificateReport:
    """Pass/fail with per-sample margins; ``passed`` iff ``worst_margin >= 0``."""

    criterion: str
    passed: bool
    epsilon: float
    rho: Optional[float]
    per_sample: list
    worst_margin: float
    warnings: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def worst_sample(self) -> SampleMargin:
        return min(self.per_sample, key=lambda s: s.margin)

    def to_dict(self) -> dict:
        body = {
            "criterion": self.criterion,
            "passed": self.passed,
            "epsilon": self.epsilon,
            "rho": self.rho,
            "worst_margin": self.worst_margin,
            "warnings": list(self.warnings),
            "n_samples": len(self.per_sample),
        }
        body.update(self.extras)
        return report_envelope("certificate", body)

    def csv_rows(self):
        header = ["index", "re", "im", "required", "available", "margin"]
        rows = []
        for i, s in enumerate(self.per_sample):
            z = s.point[0] if s.point.size == 1 else s.point[0]
            rows.append([i, z.real, z.imag, s.required, s.available, s.margin])
        return header, rows


def _finalize(criterion, eps, rho, samples, warnings, extras=None) -> CertificateReport:
    if not samples:
        raise DomainError("certificate grid must be nonempty")
    worst = min(s.margin for s in samples)
    extras = dict(extras or {})
    if "extra_margins" in extras:
        worst = min([worst] + list(extras.pop("extra_margins")))
    return CertificateReport(
        criterion=criterion,
        passed=bool(worst >= 0.0),
        epsilon=eps,
        rho=rho,
        per_sample=samples,
        worst_margin=float(worst),
        warnings=warnings,
        extras=extras,
    )


def _separation_warning(space, pts) -> list:
    try:
        rep = pointset.separation(space, pts)
    except SizeGuardError:
        return ["separation not verified: pair guard exceeded"]
    if len(pts) >= 2 and not rep.min_pairwise_distance > 0.0:
        return ["separation not confirmed positive"]
    return []


def laplacian_phi(w: weights.HermitianWeight, z, step: Optional[float] = None) -> float:
    """Euclidean Laplacian of the weight at ``z`` (n = 1): 4 * d^2Phi/dz dzbar."""
    if w.n != 1:
        raise SpaceMismatchError("Delta Phi is defined here for n = 1")
    if w.builtin == "fock":
        return 4.0 * w.alpha
    hess = geometry.complex_hessian_fd(lambda zz: float(w.value(zz)), geometry.as_point(z, 1),
                                       step=step)
    return 4.0 * float(hess[0, 0].real)


def bos_certificate(w: weights.HermitianWeight, pts: pointset.PointSet,
                    rho: float, eps: float, grid: Sequence,
                    space: Optional[geometry.ModelSpace] = None,
                    map_fn=map) -> CertificateReport:
    """Flat one-dimensional Laplacian-versus-counting criterion.

    ``map_fn`` may be a thread-pool map; samples are assembled in grid
    order either way, so output is deterministic.
    """
    if space is None:
        space = geometry.flat_space(1)
    if not space.is_flat or space.n != 1:
        raise SpaceMismatchError("the bos certificate applies to flat C^1 only")
    if rho <= 0 or eps <= 0:
        raise DomainError("rho and eps must be positive")

    def at(z):
        z = space.validate_point(z)
        count = pointset.count_in_ball(space, pts, z, rho)
        return SampleMargin(z, count / rho ** 2 + eps, laplacian_phi(w, z))

    samples = list(map_fn(at, list(grid)))
    return _finalize(BOS, eps, rho, samples, _separation_warning(space, pts))


def theorem1_certificate(w: weights.HermitianWeight, space: geometry.ModelSpace,
                         pts: pointset.PointSet, rho: float, eps: float,
                         grid: Sequence, map_fn=map) -> CertificateReport:
    """Curvature-versus-counting criterion with the comparison factor."""
    if rho <= 0 or eps <= 0:
        raise DomainError("rho and eps must be positive")
    factor = geometry.hessian_comparison_factor(space.k, rho)

    def at(z):
        z = space.validate_point(z)
        count = pointset.count_in_ball(space, pts, z, rho)
        required = space.n * (count / rho ** 2) * factor + eps
        return SampleMargin(z, required, weights.curvature_eigen_min(w, space, z))

    samples = list(map_fn(at, list(grid)))
    return _finalize(THEOREM1, eps, rho, samples, _separation_warning(space, pts),
                     {"comparison_factor": factor, "k": space.k})


def theorem2_certificate(w: weights.HermitianWeight, space: geometry.ModelSpace,
                         pts: pointset.PointSet, eps: float, grid: Sequence,
                         density_threshold: float = math.inf,
                         cutoff: float = pointset.DENSITY_CUTOFF,
                         map_fn=map) -> CertificateReport:
    """Hyperbolic criterion: curvature floor plus bounded density grid-sup.

    The density clause reports a grid supremum (finite by construction);
    the pass threshold is user-set and flagged as such.
    """
    if space.is_flat:
        raise SpaceMismatchError("the theorem2 certificate requires a hyperbolic ball")
    if eps <= 0:
        raise DomainError("eps must be positive")
    grid = list(grid)

    def at(z):
        z = space.validate_point(z)
        return SampleMargin(z, eps, weights.curvature_eigen_min(w, space, z))

    samples = list(map_fn(at, grid))
    sup = pointset.sup_density(space, pts, grid, cutoff=cutoff) if len(pts) else None
    density_sup = 0.0 if sup is None else sup.value
    extras = {
        "density_grid_sup": density_sup,
        "density_threshold_user_set": density_threshold,
        "density_cutoff": cutoff,
        "density_argmax_index": (None if sup is None else sup.index),
        "extra_margins": [density_threshold - density_sup] if math.isfinite(density_threshold) else [],
    }
    warnings = _separation_warning(space, pts)
    warnings.append("density bound is a grid supremum against a user-set threshold")
    return _finalize(THEOREM2, eps, None, samples, warnings, extras)
