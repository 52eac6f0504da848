"""Classical analogues of both models: equations of motion, fixed points, stability.

The spin is a unit vector ``L`` evolving as ``dL/dt = grad_L(H) x L`` in a
right-handed frame.

E x beta, state ``(q, p, L_x, L_y, L_z)``::

    H = delta L_x + L q L_z + (p^2 + omega^2 q^2) / 2

E x epsilon, state ``(q_theta, p_theta, q_eps, p_eps, L_eps, L_theta, L_w)``.
The bracket makes ``(theta, eps, w)`` right-handed, as the qubit operators
``[s_theta, s_eps] = 2i s_w`` are; ``q_theta p_eps - q_eps p_theta + L_w`` is
then conserved::

    H = omega (p_theta^2 + q_theta^2 + p_eps^2 + q_eps^2) / 2
        + (L / 2)(q_theta L_theta + q_eps L_eps) + delta L_w
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .eb import EbParams
from .ee import EeParams

__all__ = [
    "ClassicalStateEb",
    "ClassicalStateEe",
    "FixedPointRecord",
    "eom_eb",
    "eom_ee",
    "energy_eb",
    "energy_ee",
    "jacobian_eb",
    "jacobian_ee",
    "rk4",
    "fixed_points_eb",
    "fixed_points_ee",
    "emergent_sign_seeds_eb",
    "threshold_eb",
    "threshold_ee",
    "BranchPoint",
    "bifurcation_diagram",
]

RESIDUAL_TOL = 1e-10
# real parts below this are treated as zero when classifying stability
_RE_TOL = 1e-7


@dataclass(frozen=True)
class ClassicalStateEb:
    q: float
    p: float
    L_x: float
    L_y: float
    L_z: float

    def array(self) -> np.ndarray:
        return np.array([self.q, self.p, self.L_x, self.L_y, self.L_z], dtype=float)

    @classmethod
    def from_array(cls, a) -> "ClassicalStateEb":
        return cls(*(float(v) for v in a))


@dataclass(frozen=True)
class ClassicalStateEe:
    q_theta: float
    p_theta: float
    q_eps: float
    p_eps: float
    L_eps: float
    L_theta: float
    L_w: float

    def array(self) -> np.ndarray:
        return np.array(
            [self.q_theta, self.p_theta, self.q_eps, self.p_eps, self.L_eps, self.L_theta, self.L_w],
            dtype=float,
        )

    @classmethod
    def from_array(cls, a) -> "ClassicalStateEe":
        return cls(*(float(v) for v in a))


def _as_array(s) -> np.ndarray:
    return s.array() if hasattr(s, "array") else np.asarray(s, dtype=float)


def eom_eb(s, p: EbParams):
    """Time derivative of ``(q, p, L_x, L_y, L_z)``; returns the same type it is given."""
    q, mom, lx, ly, lz = _as_array(s)
    c, w2, d = p.coupling, p.omega**2, p.delta
    out = np.array([
        mom,
        -c * lz - w2 * q,
        -c * q * ly,
        -d * lz + c * q * lx,
        d * ly,
    ])
    return ClassicalStateEb.from_array(out) if isinstance(s, ClassicalStateEb) else out


def jacobian_eb(s, p: EbParams) -> np.ndarray:
    q, _, lx, ly, _ = _as_array(s)
    c, w2, d = p.coupling, p.omega**2, p.delta
    return np.array([
        [0.0, 1.0, 0.0, 0.0, 0.0],
        [-w2, 0.0, 0.0, 0.0, -c],
        [-c * ly, 0.0, 0.0, -c * q, 0.0],
        [c * lx, 0.0, c * q, 0.0, -d],
        [0.0, 0.0, 0.0, d, 0.0],
    ])


def energy_eb(s, p: EbParams) -> float:
    q, mom, lx, _, lz = _as_array(s)
    return float(p.delta * lx + p.coupling * q * lz + 0.5 * (mom**2 + p.omega**2 * q**2))


def eom_ee(s, p: EeParams):
    """Time derivative of ``(q_th, p_th, q_eps, p_eps, L_eps, L_th, L_w)``."""
    qt, pt, qe, pe, le, lt, lw = _as_array(s)
    w, h, d = p.omega, 0.5 * p.coupling, p.delta
    out = np.array([
        w * pt,
        -w * qt - h * lt,
        w * pe,
        -w * qe - h * le,
        d * lt - h * qt * lw,
        h * qe * lw - d * le,
        h * (qt * le - qe * lt),
    ])
    return ClassicalStateEe.from_array(out) if isinstance(s, ClassicalStateEe) else out


def jacobian_ee(s, p: EeParams) -> np.ndarray:
    qt, _, qe, _, le, lt, lw = _as_array(s)
    w, h, d = p.omega, 0.5 * p.coupling, p.delta
    return np.array([
        [0.0, w, 0.0, 0.0, 0.0, 0.0, 0.0],
        [-w, 0.0, 0.0, 0.0, 0.0, -h, 0.0],
        [0.0, 0.0, 0.0, w, 0.0, 0.0, 0.0],
        [0.0, 0.0, -w, 0.0, -h, 0.0, 0.0],
        [-h * lw, 0.0, 0.0, 0.0, 0.0, d, -h * qt],
        [0.0, 0.0, h * lw, 0.0, -d, 0.0, h * qe],
        [h * le, 0.0, -h * lt, 0.0, h * qt, -h * qe, 0.0],
    ])


def energy_ee(s, p: EeParams) -> float:
    qt, pt, qe, pe, le, lt, lw = _as_array(s)
    return float(
        0.5 * p.omega * (pt**2 + qt**2 + pe**2 + qe**2)
        + 0.5 * p.coupling * (qt * lt + qe * le)
        + p.delta * lw
    )


def rk4(rhs, y0, t_end: float, dt: float, record_every: int = 0):
    """Classical fourth-order Runge-Kutta for an autonomous system.

    Returns the final state, or ``(times, states)`` when ``record_every > 0``.
    """
    y = np.array(_as_array(y0), dtype=float)
    n_steps = int(round(t_end / dt))
    if n_steps < 0 or abs(n_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError("t_end must be a non-negative multiple of dt")
    times, states = [0.0], [y.copy()]
    for i in range(1, n_steps + 1):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * dt * k1)
        k3 = rhs(y + 0.5 * dt * k2)
        k4 = rhs(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if record_every and i % record_every == 0:
            times.append(i * dt)
            states.append(y.copy())
    if record_every:
        return np.array(times), np.array(states)
    return y


@dataclass(frozen=True)
class FixedPointRecord:
    state: object
    stability: str
    jacobian_eigs: tuple
    residual: float
    branch: str
    correction: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)


def _tangent_projector(x: np.ndarray, n_osc: int) -> np.ndarray:
    """Orthonormal basis of the tangent space of R^n_osc x S^2 at ``x``."""
    n = x[n_osc:] / np.linalg.norm(x[n_osc:])
    # any vector not parallel to n seeds the tangent frame
    seed = np.eye(3)[int(np.argmin(np.abs(n)))]
    e1 = np.cross(n, seed)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    proj = np.zeros((n_osc + 3, n_osc + 2))
    proj[:n_osc, :n_osc] = np.eye(n_osc)
    proj[n_osc:, n_osc] = e1
    proj[n_osc:, n_osc + 1] = e2
    return proj


def classify(jac: np.ndarray, x: np.ndarray, n_osc: int, symmetry_zero_modes: int = 0):
    """Stability verdict from the Jacobian restricted to the constraint tangent space.

    ``symmetry_zero_modes`` zero eigenvalues are expected from continuous
    symmetries and do not make a point marginal.
    """
    proj = _tangent_projector(x, n_osc)
    eigs = np.linalg.eigvals(proj.T @ jac @ proj)
    if eigs.real.max() > _RE_TOL:
        verdict = "unstable"
    elif int(np.sum(np.abs(eigs) < 1e-6)) > symmetry_zero_modes:
        verdict = "marginal"
    else:
        verdict = "stable"
    return verdict, tuple(complex(e) for e in sorted(eigs, key=lambda z: (z.real, z.imag)))


def _record(x, p, model: str, branch: str, correction: float = 0.0, zero_modes: int = 0, meta=None):
    if model == "eb":
        res = float(np.abs(eom_eb(x, p)).max())
        verdict, eigs = classify(jacobian_eb(x, p), x, 2, zero_modes)
        state = ClassicalStateEb.from_array(x)
    else:
        res = float(np.abs(eom_ee(x, p)).max())
        verdict, eigs = classify(jacobian_ee(x, p), x, 4, zero_modes)
        state = ClassicalStateEe.from_array(x)
    if res > RESIDUAL_TOL:
        raise RuntimeError(f"fixed point {branch} has EOM residual {res:.3e}")
    return FixedPointRecord(state, verdict, eigs, res, branch, correction, dict(meta or {}))


def emergent_sign_seeds_eb(p: EbParams) -> list[np.ndarray]:
    """The four sign combinations ``L_x = +-delta omega^2 / L^2``, ``L_z = +-sqrt(1 - L_x^2)``.

    Only the ``L_x < 0`` pair solves the equations of motion; the other two
    are kept for diagnostics.
    """
    if p.coupling == 0:
        return []
    r = p.delta * p.omega**2 / p.coupling**2
    if r >= 1.0:
        return []
    out = []
    for sx in (+1.0, -1.0):
        for sz in (+1.0, -1.0):
            lz = sz * np.sqrt(1.0 - r * r)
            out.append(np.array([-p.coupling / p.omega**2 * lz, 0.0, sx * r, 0.0, lz]))
    return out


def fixed_points_eb(p: EbParams) -> list[FixedPointRecord]:
    """Fixed points of the one-mode model on the unit sphere.

    The origins ``L_x = +-1`` always exist. For ``L^2 > delta omega^2`` two
    emergent points appear with ``L_x = -delta omega^2 / L^2``, ``L_y = p = 0``
    and ``q = -(L / omega^2) L_z``.
    """
    zero = 1 if p.delta == 0 else 0
    recs = [
        _record(np.array([0, 0, -1.0, 0, 0]), p, "eb", "origin_minus", zero_modes=zero),
        _record(np.array([0, 0, 1.0, 0, 0]), p, "eb", "origin_plus", zero_modes=zero),
    ]
    if p.coupling > 0 and p.coupling**2 > p.delta * p.omega**2:
        r = -p.delta * p.omega**2 / p.coupling**2
        for sz, name in ((+1.0, "emergent_plus"), (-1.0, "emergent_minus")):
            lz = sz * np.sqrt(1.0 - r * r)
            x = np.array([-p.coupling / p.omega**2 * lz, 0.0, r, 0.0, lz])
            recs.append(_record(x, p, "eb", name))
    return recs


def _slice_exists(slope_start: float, slope_end: float) -> bool:
    """A residual ``g(theta)`` vanishing at both ends of ``[0, pi]`` has an interior root
    when its end slopes share a sign."""
    return slope_start * slope_end > 0.0


def _eb_slice_slopes(p: EbParams) -> tuple[float, float]:
    # slice L = (cos t, 0, sin t), q = -(L/omega^2) sin t, p = 0; residual is dL_y/dt
    out = []
    for t in (np.pi, 0.0):
        x = np.array([-p.coupling / p.omega**2 * np.sin(t), 0.0, np.cos(t), 0.0, np.sin(t)])
        dx = np.array([-p.coupling / p.omega**2 * np.cos(t), 0.0, -np.sin(t), 0.0, np.cos(t)])
        out.append(float((jacobian_eb(x, p) @ dx)[3]))
    return out[0], out[1]


def _ee_slice_slopes(p: EeParams) -> tuple[float, float]:
    # slice L = (sin t, 0, cos t), q_eps = -(L / 2 omega) sin t; residual is dL_theta/dt
    k = p.coupling / (2.0 * p.omega)
    out = []
    for t in (0.0, np.pi):
        x = np.array([0.0, 0.0, -k * np.sin(t), 0.0, np.sin(t), 0.0, np.cos(t)])
        dx = np.array([0.0, 0.0, -k * np.cos(t), 0.0, np.cos(t), 0.0, -np.sin(t)])
        out.append(float((jacobian_ee(x, p) @ dx)[5]))
    return out[0], out[1]


def _bisect(exists, lo: float, hi: float, tol: float) -> float:
    if exists(lo):
        return lo
    while not exists(hi):
        lo, hi = hi, 2.0 * hi + 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if exists(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def threshold_eb(delta: float, omega: float, tol: float = 1e-10) -> float:
    """Smallest coupling at which the emergent fixed points exist, by bisection."""
    def exists(c):
        return c > 0 and _slice_exists(*_eb_slice_slopes(EbParams(c, omega, delta, 1)))

    return _bisect(exists, 0.0, 1.0, tol)


def threshold_ee(delta: float, omega: float, tol: float = 1e-10) -> dict:
    """Critical coupling of the tilted ring, with both candidate closed forms for comparison."""
    def exists(c):
        return c > 0 and _slice_exists(*_ee_slice_slopes(EeParams(c, omega, delta, 1)))

    lc = _bisect(exists, 0.0, 1.0, tol)
    return {
        "threshold": lc,
        # L^2 = 4 omega delta follows from |L_w| <= 1; L^2 = 16 omega^2 delta^2 is the other reading
        "closed_form_4_omega_delta": float(np.sqrt(4.0 * omega * delta)),
        "closed_form_16_omega2_delta2": float(4.0 * omega * delta),
    }


def _ring_point(p: EeParams, phi: float, lw: float) -> np.ndarray:
    k = p.coupling / (2.0 * p.omega)
    rho = np.sqrt(max(0.0, 1.0 - lw * lw))
    le, lt = rho * np.sin(phi), rho * np.cos(phi)
    return np.array([-k * lt, 0.0, -k * le, 0.0, le, lt, lw])


def _newton(x0: np.ndarray, p: EeParams) -> np.ndarray:
    def f(x):
        return np.concatenate([eom_ee(x, p), [x[4:] @ x[4:] - 1.0]])

    sol = optimize.least_squares(f, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
    return sol.x


def fixed_points_ee(p: EeParams, n_ring: int = 8) -> list[FixedPointRecord]:
    """Fixed points of the two-mode model.

    Always the two oscillator-origin points ``L_w = +-1``. For ``L > 0`` and
    ``L^2 > 4 omega delta`` a ring of points at ``L_w = -4 omega delta / L^2``
    with radial displacement ``(L / 2 omega) sqrt(1 - L_w^2)``; ``n_ring``
    samples are returned. With ``delta > 0`` the four axis points of the ring
    are built from the closed form and refined by a Newton step only if they
    fail the residual check.
    """
    recs = [
        _record(np.array([0, 0, 0, 0, 0, 0, 1.0]), p, "ee", "origin_up"),
        _record(np.array([0, 0, 0, 0, 0, 0, -1.0]), p, "ee", "origin_down"),
    ]
    # at L^2 = 4 omega delta the ring shrinks onto the origin point
    if p.coupling == 0 or p.coupling**2 <= 4.0 * p.omega * p.delta:
        return recs
    lw = -4.0 * p.omega * p.delta / p.coupling**2
    if p.delta > 0:
        angles = [0.0, 0.5 * np.pi, np.pi, 1.5 * np.pi]
        names = ["axis_theta_plus", "axis_eps_plus", "axis_theta_minus", "axis_eps_minus"]
    else:
        angles = list(2.0 * np.pi * np.arange(n_ring) / n_ring)
        names = [f"ring_{i}" for i in range(n_ring)]
    meta = {"ring_L_w": lw, "ring_radius": p.coupling / (2.0 * p.omega) * np.sqrt(1.0 - lw * lw)}
    for phi, name in zip(angles, names):
        x = _ring_point(p, phi, lw)
        corr = 0.0
        if np.abs(eom_ee(x, p)).max() > RESIDUAL_TOL:
            xn = _newton(x, p)
            corr = float(np.abs(xn - x).max())
            x = xn
        # rotation about the w axis gives a zero mode and its conjugate
        recs.append(_record(x, p, "ee", name, corr, zero_modes=2, meta=meta))
    return recs


@dataclass(frozen=True)
class BranchPoint:
    coupling: float
    branch: str
    coords: dict
    stability: str
    threshold: float


def bifurcation_diagram(model: str, couplings, delta: float, omega: float) -> list[BranchPoint]:
    """Fixed-point branches and their stability along a monotone coupling grid."""
    couplings = np.asarray(couplings, dtype=float)
    if couplings.ndim != 1 or np.any(np.diff(couplings) <= 0):
        raise ValueError("coupling grid must be strictly increasing")
    if model == "eb":
        lc = threshold_eb(delta, omega)
        finder = lambda c: fixed_points_eb(EbParams(c, omega, delta, 1))  # noqa: E731
        fields = ("q", "p", "L_x", "L_y", "L_z")
    elif model == "ee":
        lc = threshold_ee(delta, omega)["threshold"]
        finder = lambda c: fixed_points_ee(EeParams(c, omega, delta, 1), n_ring=4)  # noqa: E731
        fields = ("q_theta", "p_theta", "q_eps", "p_eps", "L_eps", "L_theta", "L_w")
    else:
        raise ValueError(f"unknown model {model!r}")
    out = []
    for c in couplings:
        for rec in finder(float(c)):
            coords = dict(zip(fields, rec.state.array().tolist()))
            out.append(BranchPoint(float(c), rec.branch, coords, rec.stability, lc))
    return out
