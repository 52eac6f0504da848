"""Dense complex linear algebra on tensor-product Hilbert spaces.

Factor ordering is fixed across the package: the qubit is always the first
tensor factor, followed by the oscillator modes (theta before epsilon).
The qubit basis is ``(|down>, |up>)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Sequence

import numpy as np
import scipy.sparse.linalg as spla

__all__ = [
    "Tolerances",
    "TOL",
    "OperatorMatrix",
    "PureState",
    "DensityMatrix",
    "kron",
    "hermitian_eig",
    "partial_trace",
    "pauli",
]


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12
    norm: float = 1e-12
    trace: float = 1e-10
    positivity: float = 1e-10
    residual: float = 1e-9
    orthonormal: float = 1e-10


TOL = Tolerances()


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=complex, copy=True)
    out.setflags(write=False)
    return out


def _check_dims(dim: int, factor_dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in factor_dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"factor_dims must be positive integers, got {factor_dims}")
    if int(np.prod(dims)) != dim:
        raise ValueError(f"factor_dims {dims} do not multiply to dimension {dim}")
    return dims


def hermitian_asymmetry(a: np.ndarray) -> float:
    """Largest entry of ``|A - A^dagger|`` relative to the largest entry of ``|A|``."""
    scale = np.abs(a).max() if a.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.abs(a - a.conj().T).max() / scale)


@dataclass(frozen=True)
class OperatorMatrix:
    """Square complex matrix acting on a tensor-product space."""

    entries: np.ndarray
    factor_dims: tuple[int, ...]
    hermitian_hint: bool = False

    def __post_init__(self):
        a = _frozen(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"operator must be square, got shape {a.shape}")
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "factor_dims", _check_dims(a.shape[0], self.factor_dims))
        if self.hermitian_hint:
            asym = hermitian_asymmetry(a)
            if asym > TOL.hermitian:
                raise ValueError(f"operator flagged Hermitian but max |A - A^+| / max |A| = {asym:.3e}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            if other.factor_dims != self.factor_dims:
                raise ValueError("factor_dims mismatch")
            return OperatorMatrix(self.entries @ other.entries, self.factor_dims)
        if isinstance(other, PureState):
            return self.entries @ other.amplitudes
        return self.entries @ other

    def commutator(self, other: "OperatorMatrix") -> np.ndarray:
        return self.entries @ other.entries - other.entries @ self.entries

    def expectation(self, state: "PureState") -> complex:
        v = state.amplitudes
        return complex(np.vdot(v, self.entries @ v))


@dataclass(frozen=True)
class PureState:
    amplitudes: np.ndarray
    factor_dims: tuple[int, ...]

    def __post_init__(self):
        v = _frozen(self.amplitudes).ravel()
        object.__setattr__(self, "amplitudes", v)
        object.__setattr__(self, "factor_dims", _check_dims(v.size, self.factor_dims))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "PureState":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return PureState(self.amplitudes / n, self.factor_dims)

    def density(self) -> "DensityMatrix":
        v = self.normalized().amplitudes
        return DensityMatrix(np.outer(v, v.conj()), self.factor_dims)

    def overlap(self, other: "PureState") -> complex:
        """Inner product ``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def conj(self) -> "PureState":
        return PureState(self.amplitudes.conj(), self.factor_dims)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix.

    Validation happens on construction; pass ``validate=False`` only for
    intermediate results that are re-validated later.
    """

    entries: np.ndarray
    factor_dims: tuple[int, ...]
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        r = _frozen(self.entries)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {r.shape}")
        object.__setattr__(self, "entries", r)
        object.__setattr__(self, "factor_dims", _check_dims(r.shape[0], self.factor_dims))
        if self.validate:
            asym = float(np.abs(r - r.conj().T).max())
            if asym > TOL.hermitian:
                raise ValueError(f"density matrix not Hermitian (max asymmetry {asym:.3e})")
            tr = np.trace(r).real
            if abs(tr - 1.0) > TOL.trace:
                raise ValueError(f"density matrix trace {tr!r} differs from 1")
            lo = self.eigenvalues().min()
            if lo < -TOL.positivity:
                raise ValueError(f"density matrix has negative eigenvalue {lo:.3e}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        h = 0.5 * (self.entries + self.entries.conj().T)
        return np.linalg.eigvalsh(h)

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))


def pauli(name: str) -> np.ndarray:
    """Qubit matrices in the ``(|down>, |up>)`` basis.

    ``z`` is ``diag(-1, 1)`` so that ``|up>`` carries eigenvalue +1; ``w`` is
    the operator perpendicular to both coupling directions, ``[[0, i], [-i, 0]]``.
    """
    mats = {
        "x": [[0, 1], [1, 0]],
        "y": [[0, -1j], [1j, 0]],
        "z": [[-1, 0], [0, 1]],
        "w": [[0, 1j], [-1j, 0]],
        "i": [[1, 0], [0, 1]],
    }
    return np.array(mats[name], dtype=complex)


def kron(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    hint = a.hermitian_hint and b.hermitian_hint
    return OperatorMatrix(np.kron(a.entries, b.entries), a.factor_dims + b.factor_dims, hint)


def kron_all(ops: Sequence[OperatorMatrix]) -> OperatorMatrix:
    return reduce(kron, ops)


def hermitian_eig(a: OperatorMatrix, k: int | None = None, method: str = "dense"):
    """Lowest ``k`` eigenpairs of a Hermitian operator, ascending.

    Parameters
    ----------
    a : OperatorMatrix
        Must carry ``hermitian_hint``; the hint is re-verified here.
    k : int, optional
        Number of pairs. ``None`` returns the full decomposition.
    method : {"dense", "krylov"}
        ``"krylov"`` uses implicitly restarted Lanczos (ARPACK) and is only
        worthwhile for ``k`` much smaller than the dimension.

    Returns
    -------
    list of (float, PureState)
    """
    if not a.hermitian_hint:
        raise ValueError("hermitian_eig requires an operator flagged Hermitian")
    asym = hermitian_asymmetry(a.entries)
    if asym > TOL.hermitian:
        raise ValueError(f"operator is not Hermitian: max |A - A^+| / max |A| = {asym:.3e}")
    n = a.dim
    k = n if k is None else int(k)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if method == "krylov" and k < n - 1:
        vals, vecs = spla.eigsh(a.entries, k=k, which="SA", tol=1e-14)
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        # orthonormalize within (near-)degenerate clusters returned by ARPACK
        vecs, _ = np.linalg.qr(vecs)
        vals = np.real(np.einsum("ij,ij->j", vecs.conj(), a.entries @ vecs))
    elif method in ("dense", "krylov"):
        if k == n:
            vals, vecs = np.linalg.eigh(a.entries)
        else:
            import scipy.linalg as sla

            vals, vecs = sla.eigh(a.entries, subset_by_index=(0, k - 1))
    else:
        raise ValueError(f"unknown method {method!r}")
    return [(float(vals[i]), PureState(vecs[:, i], a.factor_dims)) for i in range(k)]


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Trace out every factor not listed in ``keep``.

    The kept factors retain their original relative order.
    """
    dims = rho.factor_dims
    keep = sorted(set(int(i) for i in keep))
    if not keep:
        raise ValueError("keep must name at least one factor")
    for i in keep:
        if not 0 <= i < len(dims):
            raise IndexError(f"factor index {i} out of range for factor_dims {dims}")
    n = len(dims)
    traced = [i for i in range(n) if i not in keep]
    t = rho.entries.reshape(dims + dims)
    # move kept axes to the front on both sides, traced ones to the back
    perm = keep + traced + [n + i for i in keep] + [n + i for i in traced]
    t = t.transpose(perm)
    dk = int(np.prod([dims[i] for i in keep]))
    dt = int(np.prod([dims[i] for i in traced])) if traced else 1
    t = t.reshape(dk, dt, dk, dt)
    out = np.einsum("ajbj->ab", t)
    return DensityMatrix(out, tuple(dims[i] for i in keep))


def reduced_qubit(state: PureState) -> DensityMatrix:
    """Qubit (factor 0) reduction of a pure state without forming the full density."""
    v = state.normalized().amplitudes.reshape(state.factor_dims[0], -1)
    rho = v @ v.conj().T
    return DensityMatrix(0.5 * (rho + rho.conj().T), (state.factor_dims[0],))
