"""Closed-form Englman ground-state ansatz for the two-mode model.

    Psi(q, phi) = e^{-kappa^2} / sqrt(2) (A(q, phi) |down> - i B(q, phi) |up>)
    A = e^{-q^2/2} (cosh(kappa q) + e^{i phi} sinh(kappa q))
    B = e^{-q^2/2} (cosh(kappa q) - e^{i phi} sinh(kappa q))

with ``kappa = L / (2 omega)`` and polar oscillator coordinates
``q_theta = q cos(phi)``, ``q_eps = q sin(phi)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy import integrate
from scipy.special import erf

from .entanglement import binary_entropy, von_neumann_entropy
from .linalg import DensityMatrix, PureState

__all__ = [
    "AnsatzParams",
    "SuperpositionSpec",
    "amplitude_A",
    "amplitude_B",
    "gaussian_hyperbolic_integrals",
    "normalization",
    "coherence_factor",
    "single_state_density",
    "superposition_density",
    "gamma_factor",
    "single_state_entropy",
    "superposition_entropy",
    "bell_fidelity",
    "large_coupling_bell_check",
    "ansatz_fock_state",
]

SQRT_PI = np.sqrt(np.pi)


@dataclass(frozen=True)
class AnsatzParams:
    coupling: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.coupling < 0:
            raise ValueError(f"coupling must be non-negative, got {self.coupling}")

    @property
    def kappa(self) -> float:
        return self.coupling / (2.0 * self.omega)

    @classmethod
    def from_kappa(cls, kappa: float) -> "AnsatzParams":
        return cls(coupling=2.0 * kappa, omega=1.0)


@dataclass(frozen=True)
class SuperpositionSpec:
    c1: float
    gamma: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.c1 <= 1.0:
            raise ValueError(f"c1 must lie in [0, 1], got {self.c1}")

    @property
    def c2(self) -> float:
        return float(np.sqrt(1.0 - self.c1 * self.c1))


def amplitude_A(q, phi, p: AnsatzParams):
    q = np.asarray(q, dtype=float)
    k = p.kappa
    return np.exp(-0.5 * q * q) * (np.cosh(k * q) + np.exp(1j * np.asarray(phi)) * np.sinh(k * q))


def amplitude_B(q, phi, p: AnsatzParams):
    q = np.asarray(q, dtype=float)
    k = p.kappa
    return np.exp(-0.5 * q * q) * (np.cosh(k * q) - np.exp(1j * np.asarray(phi)) * np.sinh(k * q))


def gaussian_hyperbolic_integrals(alpha: float) -> dict[str, float]:
    """Closed forms of ``int_0^inf e^{-q^2} f(alpha q) q dq`` for ``f`` in cosh^2, sinh^2, cosh sinh."""
    x = np.exp(alpha * alpha) * alpha * SQRT_PI
    return {
        "cosh2": 0.25 * (2.0 + x * erf(alpha)),
        "sinh2": 0.25 * x * erf(alpha),
        "cosh_sinh": 0.25 * x,
    }


def normalization(p: AnsatzParams) -> float:
    """Squared norm ``N^2`` of the unnormalized ansatz state."""
    k = p.kappa
    # pi e^{-2k^2} [1 + e^{k^2} k sqrt(pi) erf(k)], rearranged to stay finite
    return float(np.pi * (np.exp(-2.0 * k * k) + np.exp(-k * k) * k * SQRT_PI * erf(k)))


def coherence_factor(p: AnsatzParams) -> float:
    """``C = [1 + e^{k^2} k sqrt(pi) erf(k)]^{-1}``; 1 at zero coupling, tends to 0."""
    k = p.kappa
    damp = np.exp(-k * k)
    return float(damp / (damp + k * SQRT_PI * erf(k)))


def single_state_density(p: AnsatzParams) -> DensityMatrix:
    c = coherence_factor(p)
    return DensityMatrix(0.5 * np.array([[1.0, 1j * c], [-1j * c, 1.0]]), (2,))


def superposition_density(s: SuperpositionSpec, p: AnsatzParams) -> DensityMatrix:
    """Spin state of ``c1 |Psi> + c2 e^{i gamma} |Psi*>`` in the ``(|down>, |up>)`` basis."""
    c = coherence_factor(p)
    c1, c2, g = s.c1, s.c2, s.gamma
    r00 = 0.5 * (1.0 + c1 * c2 * np.cos(g) * (1.0 + c))
    r01 = 0.5j * (c1 * c1 - c2 * c2) * c - 0.5 * c1 * c2 * np.sin(g) * (1.0 + c)
    rho = np.array([[r00, r01], [np.conj(r01), 1.0 - r00]])
    # DensityMatrix rejects any positivity violation beyond 1e-10
    return DensityMatrix(rho, (2,))


def gamma_factor(s: SuperpositionSpec, p: AnsatzParams) -> float:
    """``Gamma`` such that the spin eigenvalues are ``(1 +- sqrt(1 - Gamma)) / 2``."""
    c = coherence_factor(p)
    c1s, c2s = s.c1**2, s.c2**2
    return float(1.0 - c1s * c2s * (1.0 + c) ** 2 - (c1s - c2s) ** 2 * c * c)


def single_state_entropy(p: AnsatzParams) -> float:
    return binary_entropy(0.5 * (1.0 + coherence_factor(p)))


def superposition_entropy(s: SuperpositionSpec, p: AnsatzParams) -> float:
    return von_neumann_entropy(superposition_density(s, p))


def _spin_angular_radial(p: AnsatzParams, n_phi: int = 16):
    """Radial functions of the normalized ansatz in the (|+>, |->) x (m = 0, 1) channels.

    The spin basis is ``|+-> = (|down> +- i |up>) / sqrt 2``. Returns a
    callable ``q -> {(sign, m): value}``.
    """
    k = p.kappa
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    # e^{-k^2} e^{-q^2/2} cosh(kq) = e^{-k^2/2} (e^{-(q-k)^2/2} + e^{-(q+k)^2/2}) / 2, same for sinh;
    # e^{-k^2/2} / N is then evaluated as 1 / sqrt(N^2 e^{k^2})
    scale = 1.0 / np.sqrt(np.pi * (np.exp(-k * k) + k * SQRT_PI * erf(k)))

    def channels(q):
        q = float(q)
        # amplitude_A/B with the Gaussian prefactor folded in to avoid overflow
        ch = 0.5 * (np.exp(-0.5 * (q - k) ** 2) + np.exp(-0.5 * (q + k) ** 2))
        sh = 0.5 * (np.exp(-0.5 * (q - k) ** 2) - np.exp(-0.5 * (q + k) ** 2))
        a = ch + np.exp(1j * phi) * sh
        b = ch - np.exp(1j * phi) * sh
        down = scale * a / np.sqrt(2.0)
        up = -1j * scale * b / np.sqrt(2.0)
        plus = (down - 1j * up) / np.sqrt(2.0)
        minus = (down + 1j * up) / np.sqrt(2.0)
        out = {}
        for sign, f in (("+", plus), ("-", minus)):
            coeffs = np.fft.fft(f) * (np.sqrt(2.0 * np.pi) / n_phi)
            out[(sign, 0)] = coeffs[0]
            out[(sign, 1)] = coeffs[1]
        return out

    return channels


def bell_fidelity(p: AnsatzParams) -> float:
    """Fidelity of the ansatz with ``(|-> |0>_phi + |+> |1>_phi) / sqrt 2`` times the best radial factor.

    Obtained by radial quadrature of the angular Fourier channels; it is 1/2
    for a product state and 1 once the radial coordinate factors out.
    """
    chan = _spin_angular_radial(p)
    q_max = 10.0 + 6.0 * p.kappa

    def bell_part(q):
        c = chan(q)
        return abs(c[("-", 0)] + c[("+", 1)]) ** 2 / 2.0 * q

    def total(q):
        return sum(abs(v) ** 2 for v in chan(q).values()) * q

    pts = [p.kappa] if 0 < p.kappa < q_max else None
    num = integrate.quad(bell_part, 0.0, q_max, points=pts, epsabs=1e-12, epsrel=1e-12, limit=200)[0]
    den = integrate.quad(total, 0.0, q_max, points=pts, epsabs=1e-12, epsrel=1e-12, limit=200)[0]
    return float(num / den)


def large_coupling_bell_check(p: AnsatzParams, threshold: float = 0.99, min_kappa: float = 3.0) -> dict:
    """Check that the strong-coupling ansatz is a spin/angular Bell state times a radial factor."""
    if p.kappa < min_kappa:
        raise ValueError(f"kappa = {p.kappa:.3g} is below the strong-coupling threshold {min_kappa}")
    fid = bell_fidelity(p)
    return {"kappa": p.kappa, "fidelity": fid, "threshold": threshold, "passed": fid >= threshold}


def ansatz_fock_state(p: AnsatzParams, n_fock: int, n_quad: int = 120) -> PureState:
    """Project the ansatz onto the truncated two-mode Fock basis.

    Overlaps with products of Hermite functions are computed with
    Gauss-Hermite quadrature; the result is renormalized within the cutoff
    and ordered qubit, theta mode, epsilon mode.
    """
    from .ee import _hermite_functions

    x, w = hermgauss(n_quad)
    # Hermite functions carry e^{-x^2/2}; strip it so the Gauss-Hermite weight supplies e^{-x^2}
    h = _hermite_functions(n_fock, x) * np.exp(0.5 * x * x)
    qt, qe = np.meshgrid(x, x, indexing="ij")
    q = np.hypot(qt, qe)
    k = p.kappa
    # e^{i phi} sinh(k q) = (q_t + i q_e) sinh(k q) / q, finite at q = 0
    shq = np.where(q > 0, np.sinh(k * q) / np.where(q > 0, q, 1.0), k)
    rot = (qt + 1j * qe) * shq
    a_red = np.cosh(k * q) + rot
    b_red = np.cosh(k * q) - rot
    ww = np.outer(w, w)
    down = h @ (ww * a_red) @ h.T
    up = -1j * (h @ (ww * b_red) @ h.T)
    vec = np.concatenate([down.ravel(), up.ravel()])
    return PureState(vec, (2, n_fock + 1, n_fock + 1)).normalized()
