"""Parameter sweeps producing flat, deterministic tables for both models."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import ansatz, classical, eb, ee
from .entanglement import entanglement_gap, von_neumann_entropy
from .linalg import reduced_qubit

__all__ = [
    "SweepSpec",
    "SweepRecord",
    "EB_COLUMNS",
    "EE_COLUMNS",
    "FIGURES",
    "figure_spec",
    "run_sweep",
    "bifurcation_rows",
]

EB_COLUMNS = ["L_over_omega", "c1", "gamma", "delta", "entropy", "ground_energy", "N", "converged",
              "truncation_error"]
EE_COLUMNS = ["L_over_omega", "c1", "gamma", "delta", "entropy", "ansatz_entropy", "abs_diff", "delta_S",
              "ground_energy", "N", "converged", "truncation_error"]
VARIABLES = ("coupling", "c1", "gamma", "delta", "alpha")
EQUAL = float(1.0 / np.sqrt(2.0))


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable on a linear grid, optionally nested inside an outer list of values.

    ``alpha`` sweeps ``L^2 / (omega^2 delta)`` at fixed ``delta``.
    """

    model: str
    variable: str
    grid: tuple[float, float, int]
    coupling: float = 1.0
    omega: float = 1.0
    delta: float = 0.0
    c1: float = EQUAL
    gamma: float = 0.0
    fock: int | None = None
    outer: tuple = ()
    label: str = "custom"

    def __post_init__(self):
        if self.model not in ("eb", "ee"):
            raise ValueError(f"model must be 'eb' or 'ee', got {self.model!r}")
        if self.variable not in VARIABLES:
            raise ValueError(f"variable must be one of {VARIABLES}, got {self.variable!r}")
        lo, hi, count = self.grid
        if int(count) != count or count < 2:
            raise ValueError(f"grid count must be an integer >= 2, got {count}")
        if not lo < hi:
            raise ValueError(f"grid min {lo} must be below max {hi}")
        object.__setattr__(self, "grid", (float(lo), float(hi), int(count)))
        if self.outer:
            name, values = self.outer
            if name not in VARIABLES:
                raise ValueError(f"unknown outer variable {name!r}")
            object.__setattr__(self, "outer", (name, tuple(float(v) for v in values)))

    def values(self) -> np.ndarray:
        lo, hi, count = self.grid
        return np.linspace(lo, hi, count)

    def points(self) -> list[dict]:
        base = {"coupling": self.coupling, "omega": self.omega, "delta": self.delta,
                "c1": self.c1, "gamma": self.gamma}
        outer_name, outer_vals = self.outer if self.outer else (None, (None,))
        out = []
        for ov in outer_vals:
            for v in self.values():
                pt = dict(base)
                if outer_name is not None:
                    pt[outer_name] = ov
                pt[self.variable] = float(v)
                if "alpha" in pt:
                    if pt["delta"] <= 0:
                        raise ValueError("an alpha sweep needs delta > 0")
                    pt["coupling"] = pt["omega"] * float(np.sqrt(pt.pop("alpha") * pt["delta"]))
                out.append(pt)
        return out

    def as_dict(self) -> dict:
        d = asdict(self)
        d["grid"] = list(self.grid)
        d["outer"] = [self.outer[0], list(self.outer[1])] if self.outer else []
        return d


@dataclass(frozen=True)
class SweepRecord:
    values: dict
    converged: bool = field(default=True)

    def row(self, columns) -> list:
        return [self.values.get(c) for c in columns]


def _fock(spec_fock, default: int) -> int:
    return int(spec_fock) if spec_fock else default


def eb_row(pt: dict, fock: int | None = None) -> SweepRecord:
    p = eb.EbParams(pt["coupling"], pt["omega"], pt["delta"], _fock(fock, 40))
    g = eb.converged_ground_state(p)
    if p.delta == 0:
        # the degenerate doublet leaves the superposition free
        s = von_neumann_entropy(eb.reduced_qubit_density_delta0(pt["c1"], pt["gamma"], p))
        c1, gamma = pt["c1"], pt["gamma"]
    else:
        s, c1, gamma = g.entropy, None, None
    vals = {
        "L_over_omega": p.coupling / p.omega, "c1": c1, "gamma": gamma, "delta": p.delta,
        "entropy": s, "ground_energy": g.energy, "N": g.n_fock, "converged": g.converged,
        "truncation_error": g.truncation_error,
    }
    return SweepRecord(vals, g.converged)


@lru_cache(maxsize=256)
def _ee_pair(coupling: float, omega: float, fock: int):
    p = ee.EeParams(coupling, omega, 0.0, fock)
    pair = ee.converged_ground_pair(p)
    gap = entanglement_gap(pair.psi, replace(p, n_fock=pair.n_fock))
    return pair, gap


def ee_row(pt: dict, fock: int | None = None) -> SweepRecord:
    coupling, omega, delta = pt["coupling"], pt["omega"], pt["delta"]
    n0 = _fock(fock, 25)
    if delta == 0:
        pair, gap = _ee_pair(coupling, omega, n0)
        s = von_neumann_entropy(reduced_qubit(ee.superposition(pair, pt["c1"], pt["gamma"])))
        sa = ansatz.superposition_entropy(
            ansatz.SuperpositionSpec(pt["c1"], pt["gamma"]), ansatz.AnsatzParams(coupling, omega)
        )
        vals = {
            "c1": pt["c1"], "gamma": pt["gamma"], "entropy": s, "ansatz_entropy": sa,
            "abs_diff": abs(s - sa), "delta_S": gap, "ground_energy": pair.energy,
            "N": pair.n_fock, "converged": pair.converged, "truncation_error": pair.truncation_error,
        }
        ok = pair.converged
    else:
        g = ee.converged_ground_state(ee.EeParams(coupling, omega, delta, n0))
        vals = {
            "c1": None, "gamma": None, "entropy": g.entropy, "ansatz_entropy": None, "abs_diff": None,
            "delta_S": None, "ground_energy": g.energy, "N": g.n_fock, "converged": g.converged,
            "truncation_error": g.truncation_error,
        }
        ok = g.converged
    vals.update({"L_over_omega": coupling / omega, "delta": delta})
    return SweepRecord(vals, ok)


def run_sweep(spec: SweepSpec, threads: int | None = None) -> list[SweepRecord]:
    """Evaluate every grid point; records come back in grid order whatever the completion order."""
    fn = eb_row if spec.model == "eb" else ee_row
    pts = spec.points()
    workers = max(1, int(threads or os.cpu_count() or 1))
    if workers == 1:
        return [fn(pt, spec.fock) for pt in pts]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda pt: fn(pt, spec.fock), pts))


FIGURES = {
    "qbosc": dict(model="eb", variable="coupling", grid=(0.0, 4.0, 41), delta=0.0,
                  outer=("c1", tuple(np.linspace(0.0, 1.0, 11)))),
    "entsosc": dict(model="eb", variable="alpha", grid=(0.05, 3.0, 60),
                    outer=("delta", (0.5, 1.0, 2.0, 4.0, 8.0))),
    "cir": dict(model="ee", variable="coupling", grid=(0.0, 4.0, 17), delta=0.0, gamma=0.0,
                outer=("c1", tuple(np.linspace(0.0, 1.0, 11)))),
    "compeval": dict(model="ee", variable="coupling", grid=(0.25, 4.0, 16), delta=0.0, c1=1.0),
    "compent": dict(model="ee", variable="coupling", grid=(0.25, 4.0, 16), delta=0.0, c1=EQUAL),
    "conc": dict(model="ee", variable="coupling", grid=(0.25, 4.0, 16), delta=0.0, c1=1.0),
    "withd": dict(model="ee", variable="coupling", grid=(0.0, 8.0, 33), outer=("delta", (1.0, 4.0))),
}


def figure_spec(name: str, **overrides) -> SweepSpec:
    if name not in FIGURES:
        raise ValueError(f"unknown figure preset {name!r}; choose from {sorted(FIGURES)}")
    kw = dict(FIGURES[name])
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return SweepSpec(label=name, **kw)


EB_BIF_FIELDS = ("q", "p", "L_x", "L_y", "L_z")
EE_BIF_FIELDS = ("q_theta", "p_theta", "q_eps", "p_eps", "L_eps", "L_theta", "L_w")


def bifurcation_columns(model: str) -> list[str]:
    fields = EB_BIF_FIELDS if model == "eb" else EE_BIF_FIELDS
    extra = ["threshold_4_omega_delta", "threshold_16_omega2_delta2"] if model == "ee" else []
    return ["L", "branch", *fields, "stability", "threshold", *extra, "note"]


def bifurcation_rows(model: str, couplings, delta: float, omega: float) -> tuple[list[str], list[dict], dict]:
    """Branch table plus metadata; a row labelled ``threshold`` marks the pitchfork."""
    points = classical.bifurcation_diagram(model, couplings, delta, omega)
    meta = {"model": model, "delta": delta, "omega": omega}
    extra = {}
    if model == "ee":
        th = classical.threshold_ee(delta, omega)
        extra = {"threshold_4_omega_delta": th["closed_form_4_omega_delta"],
                 "threshold_16_omega2_delta2": th["closed_form_16_omega2_delta2"]}
        meta.update(extra)
        lc = th["threshold"]
    else:
        lc = classical.threshold_eb(delta, omega)
    meta["threshold"] = lc
    rows = []
    marked = False
    for bp in points:
        if not marked and bp.coupling >= lc:
            rows.append({"L": lc, "branch": "threshold", "threshold": lc, "note": "pitchfork", **extra})
            marked = True
        rows.append({"L": bp.coupling, "branch": bp.branch, **bp.coords, "stability": bp.stability,
                     "threshold": lc, **extra, "note": None})
    if not marked:
        rows.append({"L": lc, "branch": "threshold", "threshold": lc, "note": "pitchfork", **extra})
    return bifurcation_columns(model), rows, meta
