"""Constant-curvature model spaces: flat C^n and the Poincare ball.

Provides geodesic distances, the curvature comparison factor
``1 + k*rho*coth(k*rho)``, space-form ball volumes, and finite-difference
complex Hessians used to verify curvature inequalities numerically.

Conventions used throughout the package:

* the Kaehler form is ``omega = (i/2) sum_j dz_j ^ dzbar_j`` times the
  metric coefficient matrix ``G``, so ``i ddbar |z|^2 = 2 omega`` on flat
  space;
* the "relative eigenvalue" of a (1,1)-form with coefficient matrix ``H``
  (entries ``d^2/dz_j dzbar_m``) is an eigenvalue of ``2 H`` against ``G``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.linalg import eigh

from .errors import DomainError, SpaceMismatchError

FLAT = "flat"
HYPERBOLIC_BALL = "hyperbolic_ball"

#: Default finite-difference step scale (one Richardson level is applied).
FD_STEP_SCALE = 1e-4


@dataclass(frozen=True)
class ModelSpace:
    """A flat C^n or a Poincare ball of radius ``kappa`` in C^n.

    ``k`` is the magnitude of the sectional curvature lower bound
    (curvature >= -k^2); ``kappa`` the scale of the upper bound
    (curvature <= -1/kappa^2, hyperbolic only).  The hyperbolic metric is
    ``4 |dz|^2 / (1 - |z|^2/kappa^2)^2`` on ``{|z| < kappa}``.
    """

    kind: str
    n: int = 1
    k: float = 0.0
    kappa: Optional[float] = None

    def __post_init__(self):
        if self.kind not in (FLAT, HYPERBOLIC_BALL):
            raise DomainError(f"unknown space kind {self.kind!r}")
        if self.n < 1 or int(self.n) != self.n:
            raise DomainError("complex dimension n must be a positive integer")
        if self.kind == FLAT:
            if self.k != 0.0:
                raise DomainError("flat space requires k = 0")
            if self.kappa is not None:
                raise DomainError("flat space has no curvature upper bound kappa")
        else:
            if self.kappa is None or self.kappa <= 0:
                raise DomainError("hyperbolic ball requires kappa > 0")
            if self.k < 1.0 / self.kappa:
                raise DomainError(
                    "curvature lower bound must lie below the upper bound: k >= 1/kappa"
                )

    @property
    def is_flat(self):
        return self.kind == FLAT

    def contains(self, z) -> bool:
        z = as_point(z, self.n)
        if self.is_flat:
            return True
        return float(np.linalg.norm(z)) < self.kappa

    def validate_point(self, z) -> np.ndarray:
        z = as_point(z, self.n)
        if not self.is_flat and float(np.linalg.norm(z)) >= self.kappa:
            raise DomainError(
                f"point with |z| = {np.linalg.norm(z):.6g} outside the open ball of radius {self.kappa}"
            )
        return z


def flat_space(n: int = 1) -> ModelSpace:
    return ModelSpace(FLAT, n=n, k=0.0)


def hyperbolic_ball(kappa: float = 1.0, n: int = 1, k: Optional[float] = None) -> ModelSpace:
    """Poincare ball of radius ``kappa``; ``k`` defaults to the tight bound 1/kappa."""
    return ModelSpace(HYPERBOLIC_BALL, n=n, k=(1.0 / kappa if k is None else k), kappa=kappa)


def as_point(z, n: Optional[int] = None) -> np.ndarray:
    """Coerce a scalar or sequence to a length-n complex coordinate vector."""
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if arr.ndim != 1:
        raise DomainError("a point is a one-dimensional coordinate vector")
    if n is not None and arr.size != n:
        raise DomainError(f"expected {n} complex coordinates, got {arr.size}")
    return arr


def space_to_dict(space: ModelSpace) -> dict:
    d = {"kind": space.kind, "n": space.n, "k": space.k}
    if space.kappa is not None:
        d["kappa"] = space.kappa
    return d


def space_from_dict(d: dict) -> ModelSpace:
    kind = d.get("kind")
    if kind == FLAT:
        return ModelSpace(FLAT, n=int(d.get("n", 1)), k=float(d.get("k", 0.0)))
    if kind == HYPERBOLIC_BALL:
        if "kappa" not in d:
            raise DomainError("hyperbolic_ball space spec requires 'kappa'")
        kappa = float(d["kappa"])
        k = float(d["k"]) if "k" in d else 1.0 / kappa
        return ModelSpace(HYPERBOLIC_BALL, n=int(d.get("n", 1)), k=k, kappa=kappa)
    raise DomainError(f"space spec has unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# distances

def distance(space: ModelSpace, x, y) -> float:
    """Geodesic distance between two points of the model space."""
    x = space.validate_point(x)
    y = space.validate_point(y)
    if space.is_flat:
        return float(np.linalg.norm(x - y))
    kap = space.kappa
    q = (kap * kap - _norm_sq(x)) * (kap * kap - _norm_sq(y))
    u = kap * kap * _norm_sq(x - y) / q
    return 2.0 * kap * math.asinh(math.sqrt(u))


def distances_from(space: ModelSpace, points: np.ndarray, z) -> np.ndarray:
    """Vectorized geodesic distances from every row of ``points`` to ``z``.

    ``points`` has shape (m, n); membership of the rows is assumed, only
    ``z`` is validated.
    """
    z = space.validate_point(z)
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts[:, None]
    diff_sq = np.sum(np.abs(pts - z[None, :]) ** 2, axis=1)
    if space.is_flat:
        return np.sqrt(diff_sq)
    kap = space.kappa
    q = (kap * kap - np.sum(np.abs(pts) ** 2, axis=1)) * (kap * kap - _norm_sq(z))
    u = kap * kap * diff_sq / q
    return 2.0 * kap * np.arcsinh(np.sqrt(u))


def _norm_sq(v) -> float:
    return float(np.sum(np.abs(v) ** 2))


# ---------------------------------------------------------------------------
# comparison factor and volumes

def hessian_comparison_factor(k: float, rho: float) -> float:
    """Bound ``1 + k*rho*coth(k*rho)`` on the complex Hessian of a squared
    distance under a sectional curvature lower bound ``-k^2``.

    Depends on the product ``k*rho`` only; the ``k -> 0`` limit is 2.
    """
    if rho <= 0:
        raise DomainError("rho must be positive")
    if k < 0:
        raise DomainError("curvature magnitude k must be nonnegative")
    x = k * rho
    if x < 1e-8:
        # x*coth(x) = 1 + x^2/3 + O(x^4); below 1e-8 the correction is < 1e-16
        return 2.0
    return 1.0 + x / math.tanh(x)


_SURFACE_CACHE: dict = {}


def _sphere_surface(dim: int) -> float:
    # surface area of the unit sphere S^{dim-1}
    if dim not in _SURFACE_CACHE:
        _SURFACE_CACHE[dim] = 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)
    return _SURFACE_CACHE[dim]


def ball_volume_bound(k: float, rho: float, dim: int) -> float:
    """Volume of the radius-``rho`` ball in the space form of curvature
    ``-k^2`` and real dimension ``dim``.

    Euclidean closed form at k = 0; otherwise adaptive quadrature of
    ``(sinh(k t)/k)^(dim-1)`` to relative tolerance 1e-10.
    """
    if rho <= 0:
        raise DomainError("rho must be positive")
    if k < 0:
        raise DomainError("curvature magnitude k must be nonnegative")
    if dim < 1 or int(dim) != dim:
        raise DomainError("dim must be a positive integer")
    surf = _sphere_surface(int(dim))
    if k == 0.0:
        return surf * rho ** dim / dim
    val, _err = integrate.quad(
        lambda t: (math.sinh(k * t) / k) ** (dim - 1), 0.0, rho,
        epsabs=0.0, epsrel=1e-10,
    )
    return surf * val


def euclidean_ball_volume(radius: float, dim: int) -> float:
    """Euclidean ball volume; convenience wrapper used by mean-value bounds."""
    return ball_volume_bound(0.0, radius, dim)


# ---------------------------------------------------------------------------
# finite differences

def default_fd_step(z) -> float:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return FD_STEP_SCALE * max(1.0, float(np.linalg.norm(z)))


def _real_hessian(g: Callable, x: np.ndarray, h: float) -> np.ndarray:
    d = x.size
    out = np.zeros((d, d))
    g0 = g(x)
    steps = np.eye(d) * h
    for i in range(d):
        out[i, i] = (g(x + steps[i]) - 2.0 * g0 + g(x - steps[i])) / (h * h)
        for j in range(i + 1, d):
            v = (
                g(x + steps[i] + steps[j])
                - g(x + steps[i] - steps[j])
                - g(x - steps[i] + steps[j])
                + g(x - steps[i] - steps[j])
            ) / (4.0 * h * h)
            out[i, j] = out[j, i] = v
    return out


def _complex_hessian_once(f: Callable, z: np.ndarray, h: float) -> np.ndarray:
    n = z.size

    def g(xr):
        return float(f(xr[:n] + 1j * xr[n:]))

    x = np.concatenate([z.real, z.imag])
    R = _real_hessian(g, x, h)
    hxx = R[:n, :n]
    hyy = R[n:, n:]
    hxy = R[:n, n:]
    return (hxx + hyy + 1j * (hxy - hxy.T)) / 4.0


def complex_hessian_fd(f: Callable, z, step: Optional[float] = None,
                       richardson: bool = True) -> np.ndarray:
    """Central-difference matrix ``[d^2 f / dz_j dzbar_m](z)``, symmetrized.

    ``f`` maps a length-n complex vector to a real scalar.  The default step
    is ``1e-4 * max(1, |z|)`` and one Richardson extrapolation level is
    applied.  Evaluation failures of ``f`` propagate.
    """
    z = as_point(z)
    h = default_fd_step(z) if step is None else float(step)
    if h <= 0:
        raise DomainError("step must be positive")
    H = _complex_hessian_once(f, z, h)
    if richardson:
        H = (4.0 * _complex_hessian_once(f, z, h / 2.0) - H) / 3.0
    return 0.5 * (H + H.conj().T)


def dbar_fd(f: Callable, z, step: Optional[float] = None) -> np.ndarray:
    """Central-difference vector of Wirtinger derivatives ``df/dzbar_m``.

    ``f`` may be complex-valued; used to differentiate cutoff factors.
    """
    z = as_point(z)
    h = (1e-6 * max(1.0, float(np.linalg.norm(z)))) if step is None else float(step)
    n = z.size
    out = np.zeros(n, dtype=complex)
    for m in range(n):
        e = np.zeros(n, dtype=complex)
        e[m] = 1.0
        fx = (f(z + h * e) - f(z - h * e)) / (2.0 * h)
        fy = (f(z + 1j * h * e) - f(z - 1j * h * e)) / (2.0 * h)
        out[m] = 0.5 * (fx + 1j * fy)
    return out


# ---------------------------------------------------------------------------
# metric data and curvature forms

def metric_matrix(space: ModelSpace, z) -> np.ndarray:
    """Coefficient matrix G of the Kaehler form at ``z`` (identity when flat)."""
    z = space.validate_point(z)
    if space.is_flat:
        return np.eye(space.n)
    s = _norm_sq(z) / space.kappa ** 2
    return (4.0 / (1.0 - s) ** 2) * np.eye(space.n)


def ricci_form_matrix(space: ModelSpace, z) -> np.ndarray:
    """Coefficient matrix of the Ricci form ``-i ddbar log det G`` at ``z``."""
    z = space.validate_point(z)
    n = space.n
    if space.is_flat:
        return np.zeros((n, n))
    kap = space.kappa
    s = _norm_sq(z) / kap ** 2
    # ddbar log(1 - |z|^2/kappa^2) has the closed form below; log det G is
    # -2n times it plus a constant.
    m = -(np.eye(n) * (1.0 - s) + np.outer(z.conj(), z) / kap ** 2) / (kap ** 2 * (1.0 - s) ** 2)
    return 2.0 * n * m


def relative_form_eigenvalues(space: ModelSpace, z, coeff_matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues (ascending) of a (1,1)-form against the metric: eig(2H, G)."""
    G = metric_matrix(space, z)
    H = np.asarray(coeff_matrix)
    if H.shape != G.shape:
        raise DomainError("coefficient matrix has wrong shape for this space")
    return eigh(2.0 * H, G, eigvals_only=True)


def ricci_eigen(space: ModelSpace, z) -> float:
    """Smallest relative eigenvalue of the Ricci form at ``z``.

    Zero on flat space; ``-n/kappa^2`` at every point of the hyperbolic
    ball (the radial direction attains the minimum).
    """
    z = space.validate_point(z)
    if space.is_flat:
        return 0.0
    return float(relative_form_eigenvalues(space, z, ricci_form_matrix(space, z))[0])


# ---------------------------------------------------------------------------
# hyperbolic helpers (n = 1) used by polar quadrature and tests

def mobius_translate(space: ModelSpace, p, u):
    """Isometry of the kappa-disk sending 0 to ``p``, applied to ``u`` (n=1)."""
    _require_disk(space)
    p = complex(space.validate_point(p)[0])
    u = complex(u)
    kap2 = space.kappa ** 2
    return (u + p) / (1.0 + p.conjugate() * u / kap2)


def geodesic_point(space: ModelSpace, p, d: float, theta: float):
    """Point at geodesic distance ``d`` and direction ``theta`` from ``p`` (n=1)."""
    if space.n != 1:
        raise SpaceMismatchError("geodesic_point is implemented for n = 1")
    if space.is_flat:
        p = complex(as_point(p, 1)[0])
        return p + d * complex(math.cos(theta), math.sin(theta))
    kap = space.kappa
    r = kap * math.tanh(d / (2.0 * kap))
    return mobius_translate(space, p, r * complex(math.cos(theta), math.sin(theta)))


def polar_area_jacobian(space: ModelSpace, d: float) -> float:
    """Area element J(d) with dA = J(d) dd dtheta in geodesic polar coords (n=1)."""
    if space.n != 1:
        raise SpaceMismatchError("polar_area_jacobian is implemented for n = 1")
    if space.is_flat:
        return d
    kap = space.kappa
    return kap * math.sinh(d / kap)


def _require_disk(space: ModelSpace):
    if space.is_flat or space.n != 1:
        raise SpaceMismatchError("operation requires the hyperbolic disk (n = 1)")
