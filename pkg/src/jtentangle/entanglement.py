"""Entanglement measures: von Neumann entropy, Wootters concurrence, tangle."""
from __future__ import annotations

import numpy as np

from .linalg import TOL, DensityMatrix, PureState, pauli

__all__ = [
    "von_neumann_entropy",
    "binary_entropy",
    "concurrence",
    "tangle_to_entropy",
    "pure_state_concurrence",
    "entanglement_gap",
]

# eigenvalues of sqrt(rho) below this are numerical noise of a rank-deficient state
_SQRT_FLOOR = 1e-14


def binary_entropy(x) -> float:
    """Shannon entropy in bits of the two-outcome distribution ``(x, 1 - x)``."""
    x = float(x)
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1.0 - x) * np.log2(1.0 - x))


def _entropy_of_spectrum(evals: np.ndarray) -> float:
    if evals.min() < -TOL.positivity:
        raise ValueError(f"invalid state: eigenvalue {evals.min():.3e} below zero")
    lam = evals[evals > 0.0]
    return float(max(0.0, -np.sum(lam * np.log2(lam))))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """``-Tr(rho log2 rho)`` in bits, with ``0 log 0 = 0``.

    Eigenvalues in ``[-1e-10, 0)`` are treated as zero.
    """
    return _entropy_of_spectrum(rho.eigenvalues())


def _sqrtm_psd(r: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (r + r.conj().T))
    w = np.where(w > _SQRT_FLOOR, w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def concurrence(rho: DensityMatrix) -> float:
    r"""Two-qubit concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the square roots of the eigenvalues of
    ``rho (Y rho* Y)`` with ``Y = sigma_y (x) sigma_y``. They are obtained
    here as singular values of ``sqrt(rho) Y sqrt(rho)*``, which avoids
    taking square roots of round-off sized eigenvalues for pure states.
    """
    if rho.factor_dims != (2, 2):
        raise ValueError(f"concurrence needs a two-qubit state, got factor_dims {rho.factor_dims}")
    y = np.kron(pauli("y"), pauli("y"))
    s = _sqrtm_psd(rho.entries)
    lam = np.linalg.svd(s @ y @ s.conj(), compute_uv=False)
    lam = np.sort(lam)[::-1]
    return float(min(1.0, max(0.0, lam[0] - lam[1:].sum())))


def pure_state_concurrence(state: PureState) -> float:
    """``|<psi| Y |psi*>|`` for a two-qubit pure state."""
    if state.factor_dims != (2, 2):
        raise ValueError("pure_state_concurrence needs a two-qubit state")
    v = state.normalized().amplitudes
    y = np.kron(pauli("y"), pauli("y"))
    return float(abs(v @ y @ v))


def tangle_to_entropy(tau: float) -> float:
    """Entropy of entanglement ``H((1 + sqrt(1 - tau)) / 2)`` for tangle ``tau = C^2``."""
    tau = float(tau)
    if not -1e-12 <= tau <= 1.0 + 1e-12:
        raise ValueError(f"tangle must lie in [0, 1], got {tau}")
    tau = min(max(tau, 0.0), 1.0)
    return binary_entropy(0.5 * (1.0 + np.sqrt(1.0 - tau)))


def entanglement_gap(state: PureState, p=None) -> float:
    """``S(spin : both modes) - S(spin : angular qubit)`` for a two-mode ground state.

    The second term goes through the concurrence of the spin/angular-qubit
    reduction and the tangle conversion. A gap below ``-1e-9`` signals an
    inconsistent state and raises.
    """
    from .ee import angular_qubit_reduction
    from .linalg import reduced_qubit

    s_full = von_neumann_entropy(reduced_qubit(state))
    red = angular_qubit_reduction(state, p)
    s_ang = tangle_to_entropy(concurrence(red.density) ** 2)
    gap = s_full - s_ang
    if gap < -1e-9:
        raise ValueError(f"negative entanglement gap {gap:.3e}")
    return float(max(gap, 0.0))
