"""Self-check suites: conservation, degeneracy, basis equivalence, ansatz integrals."""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla
from scipy import integrate

from . import ansatz, eb, ee

__all__ = ["SUITES", "run_suite"]


def _check(name: str, value: float, tol: float, **info) -> dict:
    return {"name": name, "value": float(value), "tolerance": tol, "passed": bool(value <= tol), **info}


def conservation() -> list[dict]:
    p = ee.EeParams(coupling=1.0, omega=1.0, delta=0.3, n_fock=20)
    cj = ee.conserved_j_w(p)
    h = ee.build_hamiltonian_two_mode(p)
    res = ee.interior_commutator_norm(cj.operator, h, ee.interior_mask(p))
    out = [_check("[J_w, H] / H interior, N=20", res, 1e-10, spin_factor=cj.spin_factor)]
    for s, r in sorted(cj.residuals.items()):
        out.append({"name": f"candidate spin factor {s:g}", "value": float(r), "tolerance": None,
                    "passed": True})
    return out


def degeneracy() -> list[dict]:
    out = []
    for c in (0.5, 1.0, 2.0):
        vals, n, _ = eb.fock_spectrum(eb.EbParams(c, 1.0, 0.0, 30), k=2)
        out.append(_check(f"E x beta doublet splitting, L={c:g}", abs(vals[1] - vals[0]), 1e-10, N=n))
    for c in (0.5, 1.0, 2.0):
        pair = ee.ground_pair(ee.EeParams(c, 1.0, 0.0, 25))
        out.append(_check(f"E x epsilon doublet splitting, L={c:g}", pair.gap, 1e-10, N=pair.n_fock))
    return out


def basis_equivalence() -> list[dict]:
    p = eb.EbParams(coupling=1.0, omega=1.0, delta=0.5, n_fock=60)
    fock = sla.eigh(eb.build_hamiltonian_fock(p).entries, eigvals_only=True, subset_by_index=(0, 4))
    disp = sla.eigh(eb.build_hamiltonian_displaced(p).entries, eigvals_only=True, subset_by_index=(0, 4))
    return [_check(f"level {i} displaced vs Fock", abs(a - b), 1e-7) for i, (a, b) in enumerate(zip(disp, fock))]


def ansatz_integrals() -> list[dict]:
    out = []
    funcs = {"cosh2": lambda x: np.cosh(x) ** 2, "sinh2": lambda x: np.sinh(x) ** 2,
             "cosh_sinh": lambda x: np.cosh(x) * np.sinh(x)}
    for a in (0.5, 1.0, 2.0):
        closed = ansatz.gaussian_hyperbolic_integrals(a)
        q_max = 10.0 + 6.0 * a
        for key, f in funcs.items():
            num = integrate.quad(lambda q: np.exp(-q * q) * f(a * q) * q, 0.0, q_max,
                                 epsabs=1e-13, epsrel=1e-13, limit=200)[0]
            out.append(_check(f"{key} at alpha={a:g}", abs(num - closed[key]), 1e-10))
    return out


SUITES = {
    "conservation": conservation,
    "degeneracy": degeneracy,
    "basis-equivalence": basis_equivalence,
    "ansatz-integrals": ansatz_integrals,
}


def run_suite(name: str) -> dict:
    names = list(SUITES) if name == "all" else [name]
    for n in names:
        if n not in SUITES:
            raise ValueError(f"unknown suite {n!r}; choose from {sorted(SUITES)} or 'all'")
    checks = []
    for n in names:
        for c in SUITES[n]():
            checks.append({"suite": n, **c})
    return {"suite": name, "passed": all(c["passed"] for c in checks), "checks": checks}
