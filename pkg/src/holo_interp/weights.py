"""Hermitian metric weights split as ``sum_a |sigma_a|^2 + phi_def``.

The holomorphic parts are polynomials (exact derivatives); the deformation
part is a real polynomial in the underlying real coordinates or a built-in
closed form.  Built-ins: ``fock(alpha)`` with weight ``alpha |z|^2`` and
``bergman(A)`` with weight ``-A log(1 - |z|^2/kappa^2)`` on the kappa-disk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from . import geometry
from .errors import DomainError, SpaceMismatchError


# ---------------------------------------------------------------------------
# polynomials

class Polynomial:
    """Holomorphic polynomial in n complex variables with exact derivatives.

    ``terms`` maps exponent tuples to complex coefficients.
    """

    def __init__(self, terms: dict, n: int):
        self.n = int(n)
        self.terms = {tuple(int(e) for e in k): complex(v) for k, v in terms.items() if v != 0}
        for k in self.terms:
            if len(k) != self.n or any(e < 0 for e in k):
                raise DomainError("bad exponent tuple in polynomial term")

    @classmethod
    def from_coeffs(cls, coeffs: Sequence) -> "Polynomial":
        """One-variable polynomial from ascending coefficients."""
        return cls({(i,): c for i, c in enumerate(coeffs)}, 1)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        scalar = z.ndim == 1
        out = np.zeros(z.shape[:-1], dtype=complex)
        for powers, coeff in self.terms.items():
            mono = np.ones(z.shape[:-1], dtype=complex)
            for k, e in enumerate(powers):
                if e:
                    mono = mono * z[..., k] ** e
            out = out + coeff * mono
        return complex(out) if scalar else out

    def dz(self, k: int) -> "Polynomial":
        terms = {}
        for powers, coeff in self.terms.items():
            e = powers[k]
            if e:
                new = list(powers)
                new[k] = e - 1
                key = tuple(new)
                terms[key] = terms.get(key, 0.0) + coeff * e
        return Polynomial(terms, self.n)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "terms": [
                {"powers": list(p), "coeff": [c.real, c.imag]}
                for p, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_dict(cls, d) -> "Polynomial":
        if isinstance(d, list):
            return cls.from_coeffs([complex(c[0], c[1]) for c in d])
        terms = {tuple(t["powers"]): complex(t["coeff"][0], t["coeff"][1]) for t in d["terms"]}
        return cls(terms, d["n"])


class RealPolynomial:
    """Real polynomial in the 2n real coordinates (x_1..x_n, y_1..y_n).

    Serves as the closed-form deformation weight; Wirtinger gradients are
    exact.
    """

    def __init__(self, terms: dict, n: int):
        self.n = int(n)
        self.terms = {tuple(int(e) for e in k): float(v) for k, v in terms.items() if v != 0.0}
        for k in self.terms:
            if len(k) != 2 * self.n or any(e < 0 for e in k):
                raise DomainError("bad exponent tuple in real polynomial term")

    def _coords(self, z):
        z = np.asarray(z, dtype=complex)
        return np.concatenate([z.real, z.imag], axis=-1)

    def value(self, z):
        x = self._coords(z)
        scalar = x.ndim == 1
        out = np.zeros(x.shape[:-1])
        for powers, coeff in self.terms.items():
            mono = np.ones(x.shape[:-1])
            for k, e in enumerate(powers):
                if e:
                    mono = mono * x[..., k] ** e
            out = out + coeff * mono
        return float(out) if scalar else out

    def _partial(self, k: int) -> "RealPolynomial":
        terms = {}
        for powers, coeff in self.terms.items():
            e = powers[k]
            if e:
                new = list(powers)
                new[k] = e - 1
                key = tuple(new)
                terms[key] = terms.get(key, 0.0) + coeff * e
        return RealPolynomial(terms, self.n)

    def dz_gradient(self, z) -> np.ndarray:
        """Exact vector of d/dz_k = (d/dx_k - i d/dy_k)/2 at ``z``."""
        out = np.zeros(self.n, dtype=complex)
        for k in range(self.n):
            dx = self._partial(k).value(z)
            dy = self._partial(self.n + k).value(z)
            out[k] = 0.5 * (dx - 1j * dy)
        return out

    def to_dict(self) -> dict:
        return {
            "real_poly": {
                "n": self.n,
                "terms": [{"powers": list(p), "coeff": c} for p, c in sorted(self.terms.items())],
            }
        }


class BergmanDeformation:
    """Closed-form deformation ``-A log(1 - |z|^2/kappa^2)`` on the kappa-disk."""

    def __init__(self, a: float, kappa: float):
        if kappa <= 0:
            raise DomainError("kappa must be positive")
        self.a = float(a)
        self.kappa = float(kappa)

    def _s(self, z):
        z = np.asarray(z, dtype=complex)
        s = np.sum(np.abs(z) ** 2, axis=-1) / self.kappa ** 2
        if np.any(s >= 1.0):
            raise DomainError("point outside the open kappa-disk")
        return s

    def value(self, z):
        s = self._s(z)
        out = -self.a * np.log(1.0 - s)
        return float(out) if np.ndim(out) == 0 else out

    def dz_gradient(self, z) -> np.ndarray:
        zz = np.asarray(z, dtype=complex)
        s = self._s(zz)
        return self.a * zz.conj() / (self.kappa ** 2 * (1.0 - s))


# ---------------------------------------------------------------------------
# the weight

@dataclass(frozen=True)
class HermitianWeight:
    """Weight ``Phi = sum_a |sigma_a(z)|^2 + Phi_def(z)`` with frame data.

    ``m2`` bounds the second real derivatives of the deformation on frame
    balls of radius ``r0``; ``mu`` (and optionally ``lam``) bound the chart
    distortion from below (above).
    """

    sigmas: Tuple[Polynomial, ...]
    phi_def: Optional[object]
    m2: float
    r0: float
    mu: float
    lam: Optional[float] = None
    builtin: Optional[str] = None
    params: Tuple[float, ...] = ()
    n: int = 1

    def __post_init__(self):
        if self.r0 <= 0 or self.mu <= 0:
            raise DomainError("frame radius r0 and distortion mu must be positive")
        if self.m2 < 0:
            raise DomainError("second-derivative bound m2 must be nonnegative")
        if self.lam is not None and self.lam < self.mu:
            raise DomainError("upper distortion lam must dominate mu")

    # -- evaluation --------------------------------------------------------
    def sigma_values(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if not self.sigmas:
            shape = z.shape[:-1] + (0,)
            return np.zeros(shape, dtype=complex)
        return np.stack([s(z) for s in self.sigmas], axis=-1)

    def phi_def_value(self, z):
        if self.phi_def is None:
            z = np.asarray(z, dtype=complex)
            out = np.zeros(z.shape[:-1])
            return float(out) if out.ndim == 0 else out
        return self.phi_def.value(z)

    def phi_def_dz(self, z) -> np.ndarray:
        if self.phi_def is None:
            return np.zeros(self.n, dtype=complex)
        return np.asarray(self.phi_def.dz_gradient(z), dtype=complex)

    def value(self, z):
        """The weight Phi(z); accepts a single point or an (..., n) array."""
        z = np.asarray(z, dtype=complex)
        if z.ndim == 0:
            z = z[None]
        sig = self.sigma_values(z)
        out = np.sum(np.abs(sig) ** 2, axis=-1) + self.phi_def_value(z)
        return float(out) if np.ndim(out) == 0 else out

    def frame_bound_constant(self, delta0: float) -> float:
        """Bound C with ||f_p(z)||_h^2 <= C ||a(p)||_h^2 on the delta0-ball."""
        return math.exp(0.5 * self.m2 * (2 * self.n) ** 2 * delta0 ** 2 / self.mu ** 2)

    @property
    def alpha(self) -> float:
        if self.builtin != "fock":
            raise DomainError("alpha is defined for the fock builtin")
        return self.params[0]

    @property
    def bergman_a(self) -> float:
        if self.builtin != "bergman":
            raise DomainError("A is defined for the bergman builtin")
        return self.params[0]

    @property
    def bergman_kappa(self) -> float:
        if self.builtin != "bergman":
            raise DomainError("kappa is defined for the bergman builtin")
        return self.params[1]


def fock_weight(alpha: float = 1.0, n: int = 1, r0: float = 1.0) -> HermitianWeight:
    """Gaussian weight ``alpha |z|^2`` with sigma_k = sqrt(alpha) z_k."""
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    root = math.sqrt(alpha)
    sigmas = []
    for k in range(n):
        powers = tuple(1 if j == k else 0 for j in range(n))
        sigmas.append(Polynomial({powers: root}, n))
    return HermitianWeight(tuple(sigmas), None, m2=0.0, r0=r0, mu=1.0,
                           builtin="fock", params=(float(alpha),), n=n)


def bergman_weight(a: float, kappa: float = 1.0, r0: Optional[float] = None,
                   m2: Optional[float] = None) -> HermitianWeight:
    """Disk weight ``-A log(1 - |z|^2/kappa^2)`` (n = 1).

    The deformation's second derivatives are unbounded near the rim, so the
    stored ``m2`` is a bound on the subdisk ``|z| <= 0.9 kappa`` unless
    overridden.  ``mu = 2`` is the global lower distortion of the disk
    metric against the Euclidean chart.
    """
    if a <= 0:
        raise DomainError("A must be positive")
    deform = BergmanDeformation(a, kappa)
    if m2 is None:
        m2 = _bergman_second_derivative_bound(a, kappa, 0.9 * kappa)
    if r0 is None:
        r0 = 0.5 * kappa
    return HermitianWeight((), deform, m2=m2, r0=r0, mu=2.0,
                           builtin="bergman", params=(float(a), float(kappa)), n=1)


def _bergman_second_derivative_bound(a: float, kappa: float, radius: float) -> float:
    # max |second real partials| of -A log(1 - r^2/kappa^2) on |z| <= radius,
    # sampled radially (the weight is radial; the max sits on the rim).
    worst = 0.0
    deform = BergmanDeformation(a, kappa)
    h = 1e-5 * kappa
    for r in np.linspace(0.0, radius, 64):
        z = np.array([complex(r, 0.0)])
        for e in (np.array([h]), np.array([1j * h])):
            for e2 in (np.array([h]), np.array([1j * h])):
                if np.array_equal(e, e2):
                    v = abs(deform.value(z + e) - 2 * deform.value(z) + deform.value(z - e)) / h ** 2
                else:
                    v = abs(
                        deform.value(z + e + e2) - deform.value(z + e - e2)
                        - deform.value(z - e + e2) + deform.value(z - e - e2)
                    ) / (4 * h ** 2)
                worst = max(worst, float(v))
    return 1.05 * worst


# ---------------------------------------------------------------------------
# operations

def weight_value(w: HermitianWeight, z) -> float:
    """Phi(z) = sum |sigma_a(z)|^2 + Phi_def(z)."""
    return float(w.value(geometry.as_point(z, w.n)))


def h_norm_sq(w: HermitianWeight, z, value: complex) -> float:
    """Pointwise squared h-norm ``|value|^2 exp(-Phi(z))``."""
    return abs(value) ** 2 * math.exp(-weight_value(w, z))


def curvature_eigen_min(w: HermitianWeight, space: geometry.ModelSpace, z,
                        step: Optional[float] = None) -> float:
    """Smallest relative eigenvalue of ``i ddbar Phi + ricci(omega)`` at ``z``.

    Closed forms for the built-ins (fock on flat space: ``2 alpha``;
    bergman on the matching disk: ``(A - 2)/(2 kappa^2)``), finite
    differences otherwise.
    """
    z = space.validate_point(z)
    if w.builtin == "fock" and space.is_flat:
        return 2.0 * w.alpha
    if w.builtin == "bergman" and not space.is_flat and space.n == 1:
        if abs(space.kappa - w.bergman_kappa) > 1e-12 * w.bergman_kappa:
            raise SpaceMismatchError("bergman weight kappa differs from the space kappa")
        return (w.bergman_a - 2.0) / (2.0 * space.kappa ** 2)
    hess = geometry.complex_hessian_fd(lambda zz: float(w.value(zz)), z, step=step)
    total = hess + geometry.ricci_form_matrix(space, z)
    return float(geometry.relative_form_eigenvalues(space, z, total)[0])


def normal_frame_exponent(w: HermitianWeight, p, z):
    """Holomorphic exponent of the normal frame centered at ``p``.

    ``sum_k dPhi_def/dz_k(p) (z_k - p_k) + sum_a conj(sigma_a(p)) (sigma_a(z)
    - sigma_a(p))``; vanishes at ``z = p``.  Vectorized over ``z``.
    """
    p = geometry.as_point(p, w.n)
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim <= 1
    if z.ndim == 0:
        z = z[None]
    sig_p = w.sigma_values(p)
    sig_z = w.sigma_values(z)
    out = np.sum(sig_p.conj() * (sig_z - sig_p), axis=-1)
    grad = w.phi_def_dz(p)
    out = out + np.sum(grad * (z - p), axis=-1)
    return complex(out) if scalar else out


@dataclass(frozen=True)
class FrameBoundReport:
    """Outcome of checking ``||f_p(z)||_h^2 <= C ||a(p)||_h^2`` over samples."""

    passed: bool
    bound: float
    worst_ratio: float
    worst_index: int
    ratios: np.ndarray


def frame_norm_bound_check(w: HermitianWeight, p, samples,
                           delta0: Optional[float] = None) -> FrameBoundReport:
    """Verify the normal-frame norm bound with ``C = exp(m2 (2n)^2 d0^2 / (2 mu^2))``.

    Samples must lie within Euclidean distance ``delta0/mu`` of ``p`` (the
    chart image of the geodesic delta0-ball).  A violation signals a wrong
    ``m2`` or ``mu``.
    """
    p = geometry.as_point(p, w.n)
    pts = [geometry.as_point(s, w.n) for s in samples]
    if not pts:
        raise DomainError("need at least one sample")
    dists = [float(np.linalg.norm(s - p)) for s in pts]
    if delta0 is None:
        delta0 = w.mu * max(dists)
    if max(dists) > delta0 / w.mu * (1 + 1e-12):
        raise DomainError("samples must lie within the delta0-ball around p")
    bound = w.frame_bound_constant(delta0)
    phi_p = weight_value(w, p)
    ratios = np.empty(len(pts))
    for i, s in enumerate(pts):
        log_ratio = 2.0 * normal_frame_exponent(w, p, s).real + phi_p - weight_value(w, s)
        ratios[i] = math.exp(log_ratio)
    worst = int(np.argmax(ratios))
    return FrameBoundReport(
        passed=bool(ratios[worst] <= bound * (1 + 1e-12)),
        bound=bound,
        worst_ratio=float(ratios[worst]),
        worst_index=worst,
        ratios=ratios,
    )


def local_oscillation(w: HermitianWeight, center, radius: float,
                      boundary_samples: int = 2048) -> np.ndarray:
    """Per-sigma oscillation sup_{|z-c|<=radius} |sigma(z) - sigma(c)|.

    Holomorphic maxima sit on the boundary circle (n = 1: sampled densely;
    n > 1: random sphere directions).
    """
    c = geometry.as_point(center, w.n)
    if not w.sigmas:
        return np.zeros(0)
    if w.n == 1:
        theta = 2.0 * np.pi * np.arange(boundary_samples) / boundary_samples
        ring = c[0] + radius * np.exp(1j * theta)
        zs = ring[:, None]
    else:
        rng = np.random.default_rng(0)
        dirs = rng.normal(size=(boundary_samples, 2 * w.n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        zs = c[None, :] + radius * (dirs[:, : w.n] + 1j * dirs[:, w.n:])
    out = np.empty(len(w.sigmas))
    for i, s in enumerate(w.sigmas):
        out[i] = float(np.max(np.abs(s(zs) - s(c))))
    return out


def mean_value_constant(w: HermitianWeight, center, radius: float) -> float:
    """Constant C in ``||f(x)||_h^2 <= C integral_{B(x,radius)} ||f||_h^2 dV``.

    ``exp(sum_a osc_a^2 + m2 (2n)^2 radius^2 / (2 mu^2))`` over the Euclidean
    volume of the radius ball; valid for holomorphic sections on flat space.
    """
    osc = local_oscillation(w, center, radius)
    expo = float(np.sum(osc ** 2)) + 0.5 * w.m2 * (2 * w.n) ** 2 * radius ** 2 / w.mu ** 2
    return math.exp(expo) / geometry.euclidean_ball_volume(radius, 2 * w.n)


def phi_def_second_derivative_max(w: HermitianWeight, center, radius: float,
                                  n_samples: int = 32, seed: int = 0) -> float:
    """FD spot estimate of the largest second real derivative of Phi_def
    on the ball of the given radius; used to audit a supplied m2."""
    if w.phi_def is None:
        return 0.0
    c = geometry.as_point(center, w.n)
    rng = np.random.default_rng(seed)
    h = 1e-5 * max(1.0, float(np.linalg.norm(c)))
    worst = 0.0
    dim = 2 * w.n
    for _ in range(n_samples):
        u = rng.normal(size=dim)
        u *= radius * rng.random() / np.linalg.norm(u)
        z = c + u[: w.n] + 1j * u[w.n:]
        for i in range(dim):
            ei = np.zeros(w.n, dtype=complex)
            ei[i % w.n] = h if i < w.n else 1j * h
            for j in range(i, dim):
                ej = np.zeros(w.n, dtype=complex)
                ej[j % w.n] = h if j < w.n else 1j * h
                if i == j:
                    v = (w.phi_def_value(z + ei) - 2 * w.phi_def_value(z)
                         + w.phi_def_value(z - ei)) / h ** 2
                else:
                    v = (w.phi_def_value(z + ei + ej) - w.phi_def_value(z + ei - ej)
                         - w.phi_def_value(z - ei + ej) + w.phi_def_value(z - ei - ej)) / (4 * h ** 2)
                worst = max(worst, abs(float(v)))
    return worst


# ---------------------------------------------------------------------------
# serialization

def weight_from_dict(d: dict) -> HermitianWeight:
    if "builtin" in d:
        name = d["builtin"]
        if name == "fock":
            return fock_weight(float(d.get("alpha", 1.0)), n=int(d.get("n", 1)),
                               r0=float(d.get("r0", 1.0)))
        if name == "bergman":
            return bergman_weight(float(d.get("A", d.get("a", 1.0))),
                                  kappa=float(d.get("kappa", 1.0)))
        raise DomainError(f"unknown builtin weight {name!r}")
    n = int(d.get("n", 1))
    sigmas = tuple(Polynomial.from_dict(s) for s in d.get("sigmas", []))
    phi_def = None
    if d.get("phi_def"):
        spec = d["phi_def"]["real_poly"]
        terms = {tuple(t["powers"]): t["coeff"] for t in spec["terms"]}
        phi_def = RealPolynomial(terms, spec["n"])
        n = spec["n"]
    if sigmas:
        n = sigmas[0].n
    return HermitianWeight(
        sigmas, phi_def,
        m2=float(d.get("M2", 0.0)),
        r0=float(d.get("r0", 1.0)),
        mu=float(d.get("mu", 1.0)),
        lam=(float(d["lam"]) if d.get("lam") is not None else None),
        n=n,
    )


def weight_to_dict(w: HermitianWeight) -> dict:
    if w.builtin == "fock":
        return {"builtin": "fock", "alpha": w.alpha, "n": w.n, "r0": w.r0}
    if w.builtin == "bergman":
        return {"builtin": "bergman", "A": w.bergman_a, "kappa": w.bergman_kappa}
    out = {
        "sigmas": [s.to_dict() for s in w.sigmas],
        "phi_def": (w.phi_def.to_dict() if isinstance(w.phi_def, RealPolynomial) else None),
        "M2": w.m2,
        "r0": w.r0,
        "mu": w.mu,
        "n": w.n,
    }
    if w.lam is not None:
        out["lam"] = w.lam
    return out
