"""Qubit coupled to a single oscillator mode (E x beta Jahn-Teller model).

    H = delta sigma_x + (L / sqrt(2 omega)) sigma_z (a + a^+) + omega a^+ a

with unit mass and hbar = 1. At ``delta = 0`` every level is doubly
degenerate: the spin-up states sit in the well centred at ``q = -L/omega^2``
(left branch) and the spin-down states in the well at ``q = +L/omega^2``
(right branch).
"""
from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
import scipy.linalg as sla
from scipy.special import eval_genlaguerre, gammaln

from .entanglement import von_neumann_entropy
from .linalg import DensityMatrix, OperatorMatrix, PureState, pauli, reduced_qubit

__all__ = [
    "EbParams",
    "Branch",
    "DisplacedBasisLabel",
    "TruncationWarning",
    "annihilation",
    "build_hamiltonian_fock",
    "displacement_matrix_element",
    "displacement_table",
    "exact_eigenstate",
    "build_hamiltonian_displaced",
    "ground_superposition",
    "reduced_qubit_density_delta0",
    "well_overlap",
    "EbGround",
    "ground_state",
    "converged_ground_state",
    "fock_spectrum",
    "fock_degenerate_pair",
]


class TruncationWarning(RuntimeWarning):
    """A state lost noticeable norm to the Fock-space cutoff."""


@dataclass(frozen=True)
class EbParams:
    coupling: float = 1.0
    omega: float = 1.0
    delta: float = 0.0
    n_fock: int = 40

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.coupling < 0:
            raise ValueError(f"coupling must be non-negative, got {self.coupling}")
        if self.delta < 0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")
        if int(self.n_fock) != self.n_fock or self.n_fock < 1:
            raise ValueError(f"n_fock must be an integer >= 1, got {self.n_fock}")
        object.__setattr__(self, "n_fock", int(self.n_fock))

    @property
    def well_position(self) -> float:
        """Distance ``L / omega^2`` of each displaced well from the origin."""
        return self.coupling / self.omega**2

    @property
    def well_beta(self) -> float:
        """Coherent amplitude of the right-branch well (position shift times sqrt(omega/2))."""
        return self.well_position * np.sqrt(self.omega / 2.0)

    def energy(self, n: int) -> float:
        return self.omega * n - self.coupling**2 / (2.0 * self.omega**2)


class Branch(str, Enum):
    LEFT = "L"
    RIGHT = "R"


@dataclass(frozen=True)
class DisplacedBasisLabel:
    branch: Branch
    n: int

    def __post_init__(self):
        object.__setattr__(self, "branch", Branch(self.branch))
        if self.n < 0:
            raise ValueError(f"Fock index must be non-negative, got {self.n}")


def annihilation(n_fock: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_fock + 1, dtype=float)), 1)


def build_hamiltonian_fock(p: EbParams) -> OperatorMatrix:
    a = annihilation(p.n_fock)
    eye = np.eye(p.n_fock + 1)
    h = (
        p.delta * np.kron(pauli("x"), eye)
        + p.coupling / np.sqrt(2.0 * p.omega) * np.kron(pauli("z"), a + a.T)
        + p.omega * np.kron(pauli("i"), a.T @ a)
    )
    return OperatorMatrix(h, (2, p.n_fock + 1), hermitian_hint=True)


def displacement_matrix_element(m: int, n: int, beta: complex) -> complex:
    """``<m| D(beta) |n>`` from the generalized-Laguerre closed form.

    The Laguerre polynomial always carries the smaller of the two indices;
    the factorial ratio and Gaussian damping are combined in log space so
    that large indices do not overflow.
    """
    if m < 0 or n < 0:
        raise ValueError("Fock indices must be non-negative")
    return complex(displacement_table(max(m, n), beta)[m, n])


def displacement_table(n_fock: int, beta: complex) -> np.ndarray:
    """Matrix ``<m| D(beta) |n>`` for ``0 <= m, n <= n_fock``."""
    beta = complex(beta)
    m = np.arange(n_fock + 1)[:, None]
    n = np.arange(n_fock + 1)[None, :]
    if beta == 0:
        return np.eye(n_fock + 1, dtype=complex)
    lo = np.minimum(m, n)
    hi = np.maximum(m, n)
    x = abs(beta) ** 2
    log_mag = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) - 0.5 * x + (hi - lo) * np.log(abs(beta))
    unit = beta / abs(beta)
    phase = np.where(m >= n, unit ** (hi - lo), (-np.conj(unit)) ** (hi - lo))
    return np.exp(log_mag) * phase * eval_genlaguerre(lo, hi - lo, x)


def _branch_beta(branch: Branch, p: EbParams) -> float:
    return -p.well_beta if branch is Branch.LEFT else p.well_beta


def exact_eigenstate(label: DisplacedBasisLabel, p: EbParams) -> PureState:
    """``|psi_n^{L,R}>`` expanded in the truncated qubit (x) Fock basis.

    Left states carry spin up, right states spin down. The truncated vector
    is renormalized; a :class:`TruncationWarning` is issued when more than
    ``1e-8`` of the norm falls outside the cutoff.
    """
    if label.n > p.n_fock:
        raise ValueError(f"Fock index {label.n} exceeds truncation {p.n_fock}")
    beta = _branch_beta(label.branch, p)
    # generous internal cutoff so that the leakage estimate is meaningful
    big = max(2 * p.n_fock, p.n_fock + 40)
    column = displacement_table(big, beta)[:, label.n]
    osc = column[: p.n_fock + 1]
    leak = 1.0 - float(np.vdot(osc, osc).real)
    if leak > 1e-8:
        warnings.warn(
            f"displaced state {label} loses {leak:.2e} of its norm at n_fock={p.n_fock}",
            TruncationWarning,
            stacklevel=2,
        )
    spin = np.array([0.0, 1.0]) if label.branch is Branch.LEFT else np.array([1.0, 0.0])
    return PureState(np.kron(spin, osc), (2, p.n_fock + 1)).normalized()


def well_overlap(p: EbParams) -> float:
    """``<chi_0^L | chi_0^R>``, the overlap of the two displaced ground wavefunctions."""
    return float(displacement_table(0, 2.0 * p.well_beta)[0, 0].real)


def build_hamiltonian_displaced(p: EbParams) -> OperatorMatrix:
    """Hamiltonian in the displaced-Fock basis of the ``delta = 0`` eigenstates.

    Basis order follows the qubit-first convention: indices ``0..N`` are the
    right-branch (spin down) states, ``N+1..2N+1`` the left-branch (spin up)
    states. The left/right block holds ``delta <m| D(b) |n>`` where ``b`` is
    the coherent amplitude of the separation ``2L/omega^2`` between wells.
    """
    n = p.n_fock
    energies = p.energy(np.arange(n + 1))
    t = displacement_table(n, 2.0 * p.well_beta)
    h = np.zeros((2 * (n + 1), 2 * (n + 1)), dtype=complex)
    h[: n + 1, : n + 1] = np.diag(energies)
    h[n + 1 :, n + 1 :] = np.diag(energies)
    h[n + 1 :, : n + 1] = p.delta * t
    h[: n + 1, n + 1 :] = p.delta * t.conj().T
    return OperatorMatrix(h, (2, n + 1), hermitian_hint=True)


def displaced_to_fock(coeffs: np.ndarray, p: EbParams, n_target: int) -> PureState:
    """Re-expand a displaced-basis vector in the plain Fock basis up to ``n_target``."""
    n = p.n_fock
    big = max(n_target, n)
    right = displacement_table(big, p.well_beta)[: n_target + 1, : n + 1]
    left = displacement_table(big, -p.well_beta)[: n_target + 1, : n + 1]
    down = right @ coeffs[: n + 1]
    up = left @ coeffs[n + 1 :]
    return PureState(np.concatenate([down, up]), (2, n_target + 1))


def _check_c1(c1: float) -> float:
    c1 = float(c1)
    if not 0.0 <= c1 <= 1.0:
        raise ValueError(f"c1 must lie in [0, 1], got {c1}")
    return c1


def ground_superposition(c1: float, gamma: float, p: EbParams) -> PureState:
    """``c1 |psi_0^L> + c2 e^{i gamma} |psi_0^R>`` in the Fock basis."""
    c1 = _check_c1(c1)
    if p.delta != 0:
        raise ValueError("the degenerate ground superposition is only defined at delta = 0")
    c2 = np.sqrt(1.0 - c1 * c1)
    left = exact_eigenstate(DisplacedBasisLabel(Branch.LEFT, 0), p).amplitudes
    right = exact_eigenstate(DisplacedBasisLabel(Branch.RIGHT, 0), p).amplitudes
    return PureState(c1 * left + c2 * np.exp(1j * gamma) * right, (2, p.n_fock + 1)).normalized()


def reduced_qubit_density_delta0(c1: float, gamma: float, p: EbParams) -> DensityMatrix:
    """Closed-form qubit reduction of the ``delta = 0`` ground superposition.

    In the ``(|down>, |up>)`` basis the populations are ``(c2^2, c1^2)`` and
    ``<down| rho |up> = c1 c2 S e^{i gamma}`` with ``S`` the overlap of the
    two displaced Gaussians.
    """
    c1 = _check_c1(c1)
    c2 = np.sqrt(1.0 - c1 * c1)
    s = well_overlap(p)
    coh = c1 * c2 * s * np.exp(1j * gamma)
    rho = np.array([[c2 * c2, coh], [np.conj(coh), c1 * c1]])
    return DensityMatrix(rho, (2,))


@dataclass(frozen=True)
class EbGround:
    energy: float
    state: PureState
    entropy: float
    n_fock: int
    converged: bool
    truncation_error: float
    parity: int
    parity_gap: float


def _parity_blocks(p: EbParams):
    """Parity-adapted combinations of displaced states.

    ``sigma_x (x) (-1)^{a^+ a}`` maps ``psi_n^L`` to ``(-1)^n psi_n^R``; the
    Hamiltonian is block diagonal in ``(psi_n^L +- (-1)^n psi_n^R) / sqrt 2``.
    """
    n = p.n_fock
    sign = (-1.0) ** np.arange(n + 1)
    e = np.diag(p.energy(np.arange(n + 1)))
    t = displacement_table(n, 2.0 * p.well_beta)
    # <u_m^s| H |u_n^s> = E_n delta_mn + s delta/2 [ (-1)^n T_mn + (-1)^m T^+_mn ]
    cross = 0.5 * p.delta * (t * sign[None, :] + sign[:, None] * t.conj().T)
    return {+1: e + cross, -1: e - cross}, sign


def ground_state(p: EbParams) -> EbGround:
    """Ground state at fixed truncation, solved in the parity blocks of the displaced basis.

    Resolving parity first matters at strong coupling, where the tunnel
    splitting drops below double precision and an unsymmetrized solve
    returns an arbitrary mixture of the two wells.
    """
    n = p.n_fock
    blocks, sign = _parity_blocks(p)
    sols = {}
    for par, blk in blocks.items():
        vals, vecs = sla.eigh(blk, subset_by_index=(0, 0))
        sols[par] = (float(vals[0]), vecs[:, 0])
    gap = sols[+1][0] - sols[-1][0]
    scale = max(1.0, abs(sols[-1][0]))
    # the odd sector holds the ground state continuously from L = 0
    par = -1 if gap >= -1e-12 * scale else +1
    energy, u = sols[par]
    c_left = u / np.sqrt(2.0)
    c_right = par * sign * u / np.sqrt(2.0)
    coeffs = np.concatenate([c_right, c_left])
    rho = _reduced_from_displaced(coeffs, p)
    state = PureState(coeffs, (2, n + 1))
    return EbGround(
        energy=energy,
        state=state,
        entropy=von_neumann_entropy(rho),
        n_fock=n,
        converged=True,
        truncation_error=0.0,
        parity=par,
        parity_gap=float(gap),
    )


def _reduced_from_displaced(coeffs: np.ndarray, p: EbParams) -> DensityMatrix:
    n = p.n_fock
    c_right, c_left = coeffs[: n + 1], coeffs[n + 1 :]
    t = displacement_table(n, 2.0 * p.well_beta)
    coh = np.vdot(c_left, t @ c_right)
    rho = np.array(
        [[np.vdot(c_right, c_right), coh], [np.conj(coh), np.vdot(c_left, c_left)]],
        dtype=complex,
    )
    return DensityMatrix(rho / np.trace(rho).real, (2,))


def fock_cap(default: int) -> int:
    raw = os.environ.get("JT_FOCK_MAX")
    return int(raw) if raw else default


def converged_ground_state(p: EbParams, tol: float = 1e-8, n_max: int | None = None) -> EbGround:
    """Double the truncation until energy and entropy move by less than ``tol``.

    The cap defaults to the ``JT_FOCK_MAX`` environment variable, else 640.
    """
    n_max = fock_cap(640) if n_max is None else n_max
    cur = ground_state(p)
    err = float("nan")
    while 2 * cur.n_fock <= n_max:
        nxt = ground_state(replace(p, n_fock=2 * cur.n_fock))
        err = max(abs(nxt.energy - cur.energy), abs(nxt.entropy - cur.entropy))
        cur = nxt
        if err < tol:
            return replace(cur, converged=True, truncation_error=err)
    return replace(cur, converged=False, truncation_error=err)


def qubit_entropy(state: PureState) -> float:
    return von_neumann_entropy(reduced_qubit(state))


def fock_spectrum(p: EbParams, k: int = 1, tol: float = 1e-10, n_max: int | None = None):
    """Lowest ``k`` eigenvalues of the plain Fock-basis Hamiltonian, doubling ``N`` until stable.

    Returns ``(values, n_fock, converged)``.
    """
    n_max = fock_cap(640) if n_max is None else n_max
    cur = p
    vals = sla.eigh(build_hamiltonian_fock(cur).entries, eigvals_only=True, subset_by_index=(0, k - 1))
    while 2 * cur.n_fock <= n_max:
        nxt = replace(cur, n_fock=2 * cur.n_fock)
        new = sla.eigh(build_hamiltonian_fock(nxt).entries, eigvals_only=True, subset_by_index=(0, k - 1))
        done = np.abs(new - vals).max() < tol
        cur, vals = nxt, new
        if done:
            return vals, cur.n_fock, True
    return vals, cur.n_fock, False


def fock_degenerate_pair(p: EbParams) -> tuple[PureState, PureState]:
    """Numerical ``delta = 0`` ground pair in the plain Fock basis, fixed to the (left, right) gauge.

    The solver returns an arbitrary rotation of the degenerate doublet;
    diagonalizing ``sigma_z`` inside it recovers the spin-up (left) and
    spin-down (right) members. Phases are chosen so the largest component is
    real and positive.
    """
    if p.delta != 0:
        raise ValueError("the ground doublet is degenerate only at delta = 0")
    h = build_hamiltonian_fock(p).entries
    _, vecs = sla.eigh(h, subset_by_index=(0, 1))
    sz = np.kron(pauli("z"), np.eye(p.n_fock + 1))
    _, rot = np.linalg.eigh(vecs.conj().T @ sz @ vecs)
    pair = vecs @ rot
    out = []
    for col in (pair[:, 1], pair[:, 0]):
        i = int(np.argmax(np.abs(col)))
        out.append(PureState(col * np.exp(-1j * np.angle(col[i])), (2, p.n_fock + 1)).normalized())
    return out[0], out[1]
