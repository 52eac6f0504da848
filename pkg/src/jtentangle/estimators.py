"""scikit-learn style wrappers.

``fit`` solves the model at the constructor parameters; ``transform`` maps
rows of superposition coordinates ``(c1, gamma)`` to the qubit entropy in
bits, returned as an ``(n_samples, 1)`` array.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import ansatz, eb, ee
from .entanglement import von_neumann_entropy
from .linalg import reduced_qubit

__all__ = ["EbGroundState", "EeGroundState", "AnsatzEntanglement", "check_superposition_rows"]


def check_superposition_rows(X) -> np.ndarray:
    """Validate an ``(n, 2)`` array of ``(c1, gamma)`` rows with ``c1`` in ``[0, 1]``."""
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != 2:
        raise ValueError(f"expected columns (c1, gamma), got {X.shape[1]} columns")
    if np.any((X[:, 0] < 0) | (X[:, 0] > 1)):
        raise ValueError("c1 must lie in [0, 1]")
    return X


class EbGroundState(TransformerMixin, BaseEstimator):
    def __init__(self, coupling=1.0, omega=1.0, delta=0.0, n_fock=40, tol=1e-8):
        self.coupling = coupling
        self.omega = omega
        self.delta = delta
        self.n_fock = n_fock
        self.tol = tol

    def fit(self, X=None, y=None):
        p = eb.EbParams(self.coupling, self.omega, self.delta, self.n_fock)
        g = eb.converged_ground_state(p, tol=self.tol)
        self.params_ = p
        self.energy_ = g.energy
        self.entropy_ = g.entropy
        self.n_fock_ = g.n_fock
        self.converged_ = g.converged
        return self

    def transform(self, X):
        check_is_fitted(self, "energy_")
        X = check_superposition_rows(X)
        if self.delta != 0:
            # the field fixes a unique ground state, so every row gives the same value
            return np.full((X.shape[0], 1), self.entropy_)
        out = [von_neumann_entropy(eb.reduced_qubit_density_delta0(c1, g, self.params_)) for c1, g in X]
        return np.array(out)[:, None]


class EeGroundState(TransformerMixin, BaseEstimator):
    def __init__(self, coupling=1.0, omega=1.0, n_fock=25, tol=1e-8):
        self.coupling = coupling
        self.omega = omega
        self.n_fock = n_fock
        self.tol = tol

    def fit(self, X=None, y=None):
        pair = ee.converged_ground_pair(ee.EeParams(self.coupling, self.omega, 0.0, self.n_fock), tol=self.tol)
        self.pair_ = pair
        self.energy_ = pair.energy
        self.n_fock_ = pair.n_fock
        self.converged_ = pair.converged
        return self

    def transform(self, X):
        check_is_fitted(self, "pair_")
        X = check_superposition_rows(X)
        out = [von_neumann_entropy(reduced_qubit(ee.superposition(self.pair_, c1, g))) for c1, g in X]
        return np.array(out)[:, None]


class AnsatzEntanglement(TransformerMixin, BaseEstimator):
    def __init__(self, coupling=1.0, omega=1.0):
        self.coupling = coupling
        self.omega = omega

    def fit(self, X=None, y=None):
        self.params_ = ansatz.AnsatzParams(self.coupling, self.omega)
        self.coherence_ = ansatz.coherence_factor(self.params_)
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        X = check_superposition_rows(X)
        out = [ansatz.superposition_entropy(ansatz.SuperpositionSpec(c1, g), self.params_) for c1, g in X]
        return np.array(out)[:, None]
