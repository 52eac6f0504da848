"""Qubit coupled to two degenerate oscillator modes (E x epsilon Jahn-Teller model).

    H = omega (a^+ a + b^+ b + 1) + L / (2 sqrt 2) [(a + a^+) s_theta + (b + b^+) s_eps] + delta s_w

Tensor order is qubit, theta mode (``a``), epsilon mode (``b``). The spin
matrices are ``s_theta = diag(-1, 1)``, ``s_eps = sigma_x`` and
``s_w = [[0, i], [-i, 0]]``.

The orbital angular momentum ``L_w = q_theta p_eps - q_eps p_theta`` plus
half the spin ``s_w`` commutes with ``H``. Its eigenvalues are half
integers, which splits every solve into small independent blocks.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from numpy.polynomial.legendre import leggauss
from scipy.sparse.csgraph import connected_components

from .eb import fock_cap
from .entanglement import von_neumann_entropy
from .linalg import DensityMatrix, OperatorMatrix, PureState, pauli, reduced_qubit

__all__ = [
    "EeParams",
    "SymmetryBlock",
    "ConservedJ",
    "build_hamiltonian_two_mode",
    "angular_momentum_w",
    "mode_quadratures",
    "interior_mask",
    "interior_commutator_norm",
    "conserved_j_w",
    "block_decompose",
    "EeGround",
    "EeGroundPair",
    "converged_ground_pair",
    "ground_pair",
    "ground_state",
    "converged_ground_state",
    "AngularReduction",
    "angular_qubit_reduction",
    "angular_components",
    "superposition",
]


@dataclass(frozen=True)
class EeParams:
    coupling: float = 1.0
    omega: float = 1.0
    delta: float = 0.0
    n_fock: int = 30

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.coupling < 0 or self.delta < 0:
            raise ValueError("coupling and delta must be non-negative")
        if int(self.n_fock) != self.n_fock or self.n_fock < 1:
            raise ValueError(f"n_fock must be an integer >= 1, got {self.n_fock}")
        object.__setattr__(self, "n_fock", int(self.n_fock))

    @property
    def dims(self) -> tuple[int, int, int]:
        return (2, self.n_fock + 1, self.n_fock + 1)

    @property
    def mode_dim(self) -> int:
        return (self.n_fock + 1) ** 2


def _mode_ladders(n_fock: int):
    a1 = sp.diags(np.sqrt(np.arange(1, n_fock + 1, dtype=float)), 1, format="csr")
    eye = sp.identity(n_fock + 1, format="csr")
    return sp.kron(a1, eye, format="csr"), sp.kron(eye, a1, format="csr")


def _lw_sparse(n_fock: int):
    a, b = _mode_ladders(n_fock)
    return 1j * (a @ b.T - a.T @ b)


def _hamiltonian_sparse(p: EeParams):
    a, b = _mode_ladders(p.n_fock)
    eye_m = sp.identity(p.mode_dim, format="csr")
    num = a.T @ a + b.T @ b
    h = (
        p.omega * sp.kron(pauli("i"), num + eye_m)
        + p.coupling / (2.0 * np.sqrt(2.0)) * (sp.kron(pauli("z"), a + a.T) + sp.kron(pauli("x"), b + b.T))
        + p.delta * sp.kron(pauli("w"), eye_m)
    )
    return h.tocsr()


def _j_sparse(p: EeParams, spin_factor: float):
    return (
        sp.kron(pauli("i"), _lw_sparse(p.n_fock)) + spin_factor * sp.kron(pauli("w"), sp.identity(p.mode_dim))
    ).tocsr()


def build_hamiltonian_two_mode(p: EeParams) -> OperatorMatrix:
    return OperatorMatrix(_hamiltonian_sparse(p).toarray(), p.dims, hermitian_hint=True)


def angular_momentum_w(p: EeParams) -> OperatorMatrix:
    """``i (a b^+ - a^+ b)`` embedded with the identity on the qubit."""
    lw = sp.kron(pauli("i"), _lw_sparse(p.n_fock)).toarray()
    return OperatorMatrix(lw, p.dims, hermitian_hint=True)


def mode_quadratures(p: EeParams) -> dict[str, OperatorMatrix]:
    """Position and momentum operators of both modes, embedded in the full space."""
    a, b = _mode_ladders(p.n_fock)
    out = {}
    for name, op in (("theta", a), ("eps", b)):
        q = (op + op.T) / np.sqrt(2.0)
        mom = 1j * (op.T - op) / np.sqrt(2.0)
        out[f"q_{name}"] = OperatorMatrix(sp.kron(pauli("i"), q).toarray(), p.dims, True)
        out[f"p_{name}"] = OperatorMatrix(sp.kron(pauli("i"), mom).toarray(), p.dims, True)
    return out


def interior_mask(p: EeParams, margin: int = 2) -> np.ndarray:
    """Basis states whose total phonon number is at most ``n_fock - margin``."""
    na, nb = np.divmod(np.arange(p.mode_dim), p.n_fock + 1)
    inner = (na + nb) <= p.n_fock - margin
    return np.concatenate([inner, inner])


def _as_sparse(x):
    if isinstance(x, OperatorMatrix):
        return sp.csr_matrix(x.entries)
    if sp.issparse(x):
        return x.tocsr()
    return sp.csr_matrix(np.asarray(x))


def interior_commutator_norm(a, b, mask: np.ndarray | None) -> float:
    """Max-entry norm of ``[a, b]`` on the masked subspace, relative to max |b|."""
    sa, sb = _as_sparse(a), _as_sparse(b)
    c = (sa @ sb - sb @ sa).tocsr()
    if mask is not None:
        idx = np.flatnonzero(mask)
        c = c[idx][:, idx]
    scale = abs(sb).max()
    num = abs(c).max() if c.nnz else 0.0
    return float(num / scale) if scale else float(num)


@dataclass(frozen=True)
class ConservedJ:
    operator: OperatorMatrix
    spin_factor: float
    residuals: dict
    tie: bool


def conserved_j_w(
    p: EeParams,
    candidates: tuple[float, ...] = (1.0, 0.5),
    tol: float = 1e-10,
    reference_coupling: float = 1.0,
) -> ConservedJ:
    """Pick the spin weight ``s`` for which ``L_w + s s_w`` commutes with ``H``.

    Residuals are evaluated on the interior block at ``p`` itself. When
    several candidates pass (for instance at zero coupling) the tie is
    reported and broken at ``reference_coupling``.

    Raises
    ------
    ValueError
        If no candidate commutes with ``H`` within ``tol`` relative to ``H``.
    """
    mask = interior_mask(p)
    h = _hamiltonian_sparse(p)
    residuals = {s: interior_commutator_norm(_j_sparse(p, s), h, mask) for s in candidates}
    passing = [s for s, r in residuals.items() if r <= tol]
    if not passing:
        raise ValueError(f"no spin factor conserves J; interior residuals {residuals}")
    tie = len(passing) > 1
    chosen = passing[0]
    if tie:
        ref = replace(p, coupling=reference_coupling if p.coupling == 0 else p.coupling)
        href = _hamiltonian_sparse(ref)
        ref_res = {s: interior_commutator_norm(_j_sparse(ref, s), href, mask) for s in passing}
        chosen = min(ref_res, key=ref_res.get)
    j = _j_sparse(p, chosen).toarray()
    return ConservedJ(OperatorMatrix(j, p.dims, hermitian_hint=True), chosen, residuals, tie)


@dataclass(frozen=True)
class SymmetryBlock:
    """One eigenspace of a conserved operator and the Hamiltonian restricted to it.

    ``basis`` is an isometry whose columns span the eigenspace; ``indices``
    lists the computational basis states it is supported on.
    ``leakage`` is the norm of the Hamiltonian matrix elements leaving the
    block, which is non-zero only where truncation breaks the symmetry.
    """

    j_value: float
    indices: np.ndarray
    basis: np.ndarray
    block: OperatorMatrix
    leakage: float

    def lift(self, vec: np.ndarray) -> np.ndarray:
        return self.basis @ vec


def block_decompose(h, j, interior: np.ndarray | None = None, values=None, tol: float = 1e-8, commute_tol: float = 1e-10):
    """Split ``h`` along the eigenspaces of a commuting operator ``j``.

    ``j`` is first separated into the connected components of its sparsity
    graph; each component is diagonalized on its own and eigenvectors are
    grouped by eigenvalue (to ``tol``). Passing ``values`` keeps only the
    listed eigenvalues.

    Raises
    ------
    ValueError
        If ``[h, j]`` exceeds ``commute_tol`` (relative, on ``interior`` when given).
    """
    hs, js = _as_sparse(h), _as_sparse(j)
    dim = hs.shape[0]
    resid = interior_commutator_norm(js, hs, interior)
    if resid > commute_tol:
        raise ValueError(f"operators do not commute: relative residual {resid:.3e}")
    decimals = max(0, int(round(-np.log10(tol))))
    pattern = (abs(js) > 0).astype(int)
    ncomp, labels = connected_components(pattern, directed=False)
    groups: dict[float, list[tuple[np.ndarray, np.ndarray]]] = {}
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(ncomp + 1))
    for c in range(ncomp):
        idx = order[bounds[c] : bounds[c + 1]]
        sub = js[idx][:, idx].toarray()
        w, v = np.linalg.eigh(sub)
        keys = np.round(w, decimals) + 0.0
        for key in np.unique(keys):
            val = float(key)
            if values is not None and not any(abs(val - x) < tol for x in values):
                continue
            sel = keys == key
            groups.setdefault(val, []).append((idx, v[:, sel]))
    hd = hs
    out = []
    for val in sorted(groups):
        cols, supp = [], []
        for idx, vecs in groups[val]:
            full = np.zeros((dim, vecs.shape[1]), dtype=complex)
            full[idx] = vecs
            cols.append(full)
            supp.append(idx)
        basis = np.hstack(cols)
        hv = hd @ basis
        blk = basis.conj().T @ hv
        blk = 0.5 * (blk + blk.conj().T)
        leak = float(np.linalg.norm(hv - basis @ blk))
        dims = (blk.shape[0],)
        out.append(SymmetryBlock(val, np.unique(np.concatenate(supp)), basis, OperatorMatrix(blk, dims, True), leak))
    return out


def _fix_phase(v: np.ndarray) -> np.ndarray:
    # anchor: the (down, 0, 0) amplitude, else the largest one
    k = 0 if abs(v[0]) > 1e-8 else int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


@dataclass(frozen=True)
class EeGroundPair:
    psi: PureState
    psi_conj: PureState
    energy: float
    gap: float
    j_value: float
    n_fock: int
    converged: bool = True
    truncation_error: float = 0.0


@dataclass(frozen=True)
class EeGround:
    energy: float
    state: PureState
    entropy: float
    j_value: float
    n_fock: int
    converged: bool = True
    truncation_error: float = 0.0


def _block_ground(blk: SymmetryBlock):
    w, v = sla.eigh(blk.block.entries, subset_by_index=(0, 0))
    return float(w[0]), blk.lift(v[:, 0])


@lru_cache(maxsize=1)
def selected_spin_factor() -> float:
    """Spin weight in ``J_w``, selected numerically on a small reference model."""
    return conserved_j_w(EeParams(coupling=1.0, omega=1.0, delta=0.3, n_fock=6)).spin_factor


def _blocks(p: EeParams, values):
    h = _hamiltonian_sparse(p)
    j = _j_sparse(p, selected_spin_factor())
    return block_decompose(h, j, interior=interior_mask(p), values=values)


def ground_pair(p: EeParams, gap_tol: float = 1e-7) -> EeGroundPair:
    """The degenerate ground doublet at ``delta = 0``, gauge fixed by ``J_w``.

    ``psi`` is the ``J_w = +1/2`` member, whose spin coherence has a positive
    imaginary part; ``psi_conj`` is its complex conjugate (``J_w = -1/2``).
    The global phase makes the ``(down, 0, 0)`` amplitude real and positive.
    """
    if p.delta != 0:
        raise ValueError("the ground state is only degenerate at delta = 0")
    blocks = {b.j_value: b for b in _blocks(p, values=(-1.5, -0.5, 0.5, 1.5))}
    e_plus, v_plus = _block_ground(blocks[0.5])
    e_minus, _ = _block_ground(blocks[-0.5])
    higher = min(_block_ground(blocks[k])[0] for k in (-1.5, 1.5) if k in blocks)
    if higher < min(e_plus, e_minus) - gap_tol:
        raise ValueError(f"|J| = 3/2 level {higher} lies below the J = 1/2 doublet")
    gap = abs(e_plus - e_minus)
    if gap > gap_tol:
        raise ValueError(f"ground doublet split by {gap:.3e}; increase n_fock")
    v = _fix_phase(v_plus)
    psi = PureState(v, p.dims).normalized()
    return EeGroundPair(psi, psi.conj(), e_plus, gap, 0.5, p.n_fock)


def ground_state(p: EeParams) -> EeGround:
    """Lowest state over the ``|J_w| <= 5/2`` blocks (unique once ``delta > 0``)."""
    best = None
    for blk in _blocks(p, values=(-2.5, -1.5, -0.5, 0.5, 1.5, 2.5)):
        e, v = _block_ground(blk)
        if best is None or e < best[0] - 1e-12:
            best = (e, v, blk.j_value)
    e, v, jv = best
    state = PureState(_fix_phase(v), p.dims).normalized()
    return EeGround(e, state, von_neumann_entropy(reduced_qubit(state)), jv, p.n_fock)


def _grow(n: int) -> int:
    return n + max(1, n // 2)


def converged_ground_state(p: EeParams, tol: float = 1e-8, n_max: int | None = None) -> EeGround:
    """Grow ``n_fock`` until energy and spin entropy change by less than ``tol``.

    The cutoff grows by half each step; the cap defaults to ``JT_FOCK_MAX``
    or 120 per mode.
    """
    n_max = fock_cap(120) if n_max is None else n_max
    cur = ground_state(p)
    err = float("nan")
    while _grow(cur.n_fock) <= n_max:
        nxt = ground_state(replace(p, n_fock=_grow(cur.n_fock)))
        err = max(abs(nxt.energy - cur.energy), abs(nxt.entropy - cur.entropy))
        cur = nxt
        if err < tol:
            return replace(cur, converged=True, truncation_error=err)
    return replace(cur, converged=False, truncation_error=err)


def converged_ground_pair(p: EeParams, tol: float = 1e-8, n_max: int | None = None) -> EeGroundPair:
    """:func:`ground_pair` with ``n_fock`` grown by half until energy and entropy settle within ``tol``."""
    n_max = fock_cap(120) if n_max is None else n_max

    def solve(q):
        pair = ground_pair(q)
        return pair, von_neumann_entropy(reduced_qubit(pair.psi))

    cur, s_cur = solve(p)
    err = float("nan")
    while _grow(cur.n_fock) <= n_max:
        nxt, s_nxt = solve(replace(p, n_fock=_grow(cur.n_fock)))
        err = max(abs(nxt.energy - cur.energy), abs(s_nxt - s_cur))
        cur, s_cur = nxt, s_nxt
        if err < tol:
            return replace(cur, converged=True, truncation_error=err)
    return replace(cur, converged=False, truncation_error=err)


def superposition(pair: EeGroundPair, c1: float, gamma: float) -> PureState:
    """``c1 |psi> + c2 e^{i gamma} |psi*>``."""
    if not 0.0 <= c1 <= 1.0:
        raise ValueError(f"c1 must lie in [0, 1], got {c1}")
    c2 = np.sqrt(1.0 - c1 * c1)
    v = c1 * pair.psi.amplitudes + c2 * np.exp(1j * gamma) * pair.psi_conj.amplitudes
    return PureState(v, pair.psi.factor_dims).normalized()


def _hermite_functions(n_max: int, x: np.ndarray) -> np.ndarray:
    out = np.empty((n_max + 1, x.size))
    out[0] = np.pi**-0.25 * np.exp(-0.5 * x * x)
    if n_max > 0:
        out[1] = np.sqrt(2.0) * x * out[0]
    for k in range(2, n_max + 1):
        out[k] = np.sqrt(2.0 / k) * x * out[k - 1] - np.sqrt((k - 1) / k) * out[k - 2]
    return out


def angular_components(state: PureState, m_values=(-1, 0, 1), n_radial: int | None = None):
    """Radial functions ``R_{s,m}(q)`` of ``psi_s(q, phi) = sum_m R_{s,m}(q) e^{i m phi} / sqrt(2 pi)``.

    Returns ``(q, weights, R)`` with ``R[s][m]`` sampled on Gauss-Legendre
    nodes ``q`` so that ``sum(|R|^2 q weights)`` is the norm in that channel.
    """
    n = state.factor_dims[1] - 1
    q_max = np.sqrt(2.0 * (2 * n + 1)) + 6.0
    nq = n_radial or max(240, 8 * n)
    x, w = leggauss(nq)
    q = 0.5 * q_max * (x + 1.0)
    wq = 0.5 * q_max * w
    n_phi = 4 * (n + 1)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    hx = _hermite_functions(n, np.outer(q, np.cos(phi)).ravel())
    hy = _hermite_functions(n, np.outer(q, np.sin(phi)).ravel())
    amps = state.normalized().amplitudes.reshape(2, n + 1, n + 1)
    radial = []
    for s in range(2):
        f = np.einsum("ak,ak->k", hx, amps[s] @ hy).reshape(nq, n_phi)
        coeffs = np.fft.fft(f, axis=1) * (np.sqrt(2.0 * np.pi) / n_phi)
        radial.append({m: coeffs[:, m % n_phi] for m in m_values})
    return q, wq, radial


@dataclass(frozen=True)
class AngularReduction:
    """Spin qubit (x) angular qubit state with the radial coordinate traced out."""

    density: DensityMatrix
    weight: float
    m_spectrum: dict


def angular_qubit_reduction(state: PureState, p: EeParams | None = None, min_weight: float = 0.5) -> AngularReduction:
    """Project onto the ``m = 0, 1`` angular-momentum channels and trace out the radius.

    The result is a 4x4 density matrix ordered spin (down, up) then angular
    ``(m=0, m=1)``, renormalized by the projected ``weight``.

    Raises
    ------
    ValueError
        If less than ``min_weight`` of the state lies in ``m in {0, 1}``.
    """
    ms = (-3, -2, -1, 0, 1, 2, 3)
    q, wq, radial = angular_components(state, ms)
    spectrum = {m: float(sum(np.sum(np.abs(radial[s][m]) ** 2 * q * wq) for s in range(2))) for m in ms}
    keys = [(s, m) for s in range(2) for m in (0, 1)]
    rho = np.array(
        [[np.sum(radial[s][m] * np.conj(radial[t][k]) * q * wq) for (t, k) in keys] for (s, m) in keys]
    )
    weight = float(np.trace(rho).real)
    if weight < min_weight:
        raise ValueError(f"only {weight:.3f} of the state lies in m in {{0, 1}}; m-spectrum {spectrum}")
    rho = rho / weight
    rho = 0.5 * (rho + rho.conj().T)
    return AngularReduction(DensityMatrix(rho, (2, 2)), weight, spectrum)
