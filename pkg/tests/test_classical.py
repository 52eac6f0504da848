import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jtentangle import classical
from jtentangle.eb import EbParams
from jtentangle.ee import EeParams

finite = st.floats(-2, 2, allow_nan=False)


def unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    return v / n if n > 1e-3 else np.array([0.0, 0.0, 1.0])


def central_jacobian(f, x, h=1e-6):
    cols = []
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((f(x + e) - f(x - e)) / (2 * h))
    return np.array(cols).T


def test_origin_is_fixed():
    p = EbParams(1.3, 1.0, 0.7, 1)
    assert np.all(classical.eom_eb(np.array([0, 0, 1.0, 0, 0]), p) == 0)
    s = classical.ClassicalStateEb(0, 0, 1.0, 0, 0)
    assert classical.eom_eb(s, p) == classical.ClassicalStateEb(0, 0, 0, 0, 0)


@given(q=finite, mom=finite, lx=finite, ly=finite, lz=finite, c=st.floats(0, 3), d=st.floats(0, 3))
def test_eb_spin_derivative_tangent(q, mom, lx, ly, lz, c, d):
    x = np.array([q, mom, *unit([lx, ly, lz])])
    dx = classical.eom_eb(x, EbParams(c, 1.0, d, 1))
    assert abs(x[2:] @ dx[2:]) < 1e-12


@given(v=st.lists(finite, min_size=7, max_size=7), c=st.floats(0, 3), d=st.floats(0, 3))
def test_ee_spin_derivative_tangent(v, c, d):
    x = np.array([*v[:4], *unit(v[4:])])
    dx = classical.eom_ee(x, EeParams(c, 1.0, d, 1))
    assert abs(x[4:] @ dx[4:]) < 1e-12


@given(q=finite, mom=finite, lx=finite, ly=finite, lz=finite, c=st.floats(0, 3), d=st.floats(0, 3),
       w=st.floats(0.3, 2))
def test_eb_jacobian_matches_finite_difference(q, mom, lx, ly, lz, c, d, w):
    p = EbParams(c, w, d, 1)
    x = np.array([q, mom, *unit([lx, ly, lz])])
    num = central_jacobian(lambda y: classical.eom_eb(y, p), x)
    assert np.abs(num - classical.jacobian_eb(x, p)).max() < 1e-5


@given(v=st.lists(finite, min_size=7, max_size=7), c=st.floats(0, 3), d=st.floats(0, 3), w=st.floats(0.3, 2))
def test_ee_jacobian_matches_finite_difference(v, c, d, w):
    p = EeParams(c, w, d, 1)
    x = np.array([*v[:4], *unit(v[4:])])
    num = central_jacobian(lambda y: classical.eom_ee(y, p), x)
    assert np.abs(num - classical.jacobian_ee(x, p)).max() < 1e-5


def test_eom_is_hamiltonian_flow():
    # q' = dH/dp, p' = -dH/dq and L' = grad_L H x L, with H from energy_eb
    p = EbParams(1.7, 1.3, 0.6, 1)
    x = np.array([0.3, -0.4, *unit([0.2, 0.5, -0.8])])
    g = central_jacobian(lambda y: np.array([classical.energy_eb(y, p)]), x)[0]
    expect = np.array([g[1], -g[0], *np.cross(g[2:], x[2:])])
    assert np.allclose(classical.eom_eb(x, p), expect, atol=1e-8)


@pytest.fixture(scope="module")
def eb_trajectory():
    p = EbParams(1.5, 1.0, 1.0, 1)
    x0 = np.array([0.4, 0.1, *unit([0.3, 0.6, -0.7])])
    rhs = lambda y: classical.eom_eb(y, p)  # noqa: E731
    return p, x0, classical.rk4(rhs, x0, 100.0, 1e-3, record_every=100)


def test_rk4_energy_and_sphere(eb_trajectory):
    p, x0, (t, ys) = eb_trajectory
    assert t[-1] == pytest.approx(100.0)
    e = np.array([classical.energy_eb(y, p) for y in ys])
    assert np.abs(e - e[0]).max() < 1e-8
    assert np.abs(np.linalg.norm(ys[:, 2:], axis=1) - 1).max() < 1e-10


def test_rk4_converges_at_halved_step(eb_trajectory):
    p, x0, (_, ys) = eb_trajectory
    rhs = lambda y: classical.eom_eb(y, p)  # noqa: E731
    coarse = classical.rk4(rhs, x0, 5.0, 2e-3)
    fine = classical.rk4(rhs, x0, 5.0, 1e-3)
    assert np.abs(fine - ys[50]).max() < 1e-12
    # fourth order: the error ratio between the two steps is about 16
    ref = classical.rk4(rhs, x0, 5.0, 2.5e-4)
    ratio = np.abs(coarse - ref).max() / np.abs(fine - ref).max()
    assert 12 < ratio < 20


def test_rk4_rejects_bad_time():
    with pytest.raises(ValueError):
        classical.rk4(lambda y: y, np.zeros(2), 1.05, 0.1 + 1e-3)


def test_ee_trajectory_conserves_energy_and_angular_momentum():
    p = EeParams(1.2, 1.0, 0.4, 1)
    x0 = np.array([0.3, 0.2, -0.5, 0.1, *unit([0.4, -0.3, 0.6])])
    _, ys = classical.rk4(lambda y: classical.eom_ee(y, p), x0, 50.0, 1e-3, record_every=500)
    e = np.array([classical.energy_ee(y, p) for y in ys])
    j = ys[:, 0] * ys[:, 3] - ys[:, 2] * ys[:, 1] + ys[:, 6]
    assert np.abs(e - e[0]).max() < 1e-8
    assert np.abs(j - j[0]).max() < 1e-8
    assert np.abs(np.linalg.norm(ys[:, 4:], axis=1) - 1).max() < 1e-10


def by_branch(recs):
    return {r.branch: r for r in recs}


def test_fixed_points_below_threshold():
    recs = by_branch(classical.fixed_points_eb(EbParams(0.5, 1.0, 1.0, 1)))
    assert set(recs) == {"origin_minus", "origin_plus"}
    assert recs["origin_minus"].stability == "stable"
    assert recs["origin_plus"].stability == "unstable"
    assert all(r.residual <= 1e-10 for r in recs.values())


def test_fixed_points_above_threshold():
    recs = by_branch(classical.fixed_points_eb(EbParams(2.0, 1.0, 1.0, 1)))
    assert len(recs) == 4
    for name, sign in (("emergent_plus", 1), ("emergent_minus", -1)):
        s = recs[name].state
        assert s.L_x == pytest.approx(-0.25, abs=1e-14)
        assert s.L_z == pytest.approx(sign * np.sqrt(1 - 1 / 16), abs=1e-14)
        assert s.q == pytest.approx(-sign * 1.9364916731037085, abs=1e-12)
        assert recs[name].stability == "stable"
    assert recs["origin_minus"].stability == "unstable"
    assert all(r.residual <= 1e-10 for r in recs.values())


@pytest.mark.xfail(strict=True, reason="L_x = +delta omega^2 / L^2 seeds are not fixed points; only the negative sign solves the EOM")
def test_positive_lx_seeds_are_fixed():
    p = EbParams(2.0, 1.0, 1.0, 1)
    seeds = classical.emergent_sign_seeds_eb(p)
    assert all(np.abs(classical.eom_eb(x, p)).max() <= 1e-10 for x in seeds if x[2] > 0)


@pytest.mark.xfail(strict=True, reason="the L_x = +1 origin is unstable for every L > 0 at delta = omega = 1")
def test_upper_origin_stable_below_threshold():
    recs = by_branch(classical.fixed_points_eb(EbParams(0.5, 1.0, 1.0, 1)))
    assert recs["origin_plus"].stability == "stable"


@pytest.mark.parametrize("delta,omega", [(1, 1), (4, 1), (1, 2), (0.3, 0.7)])
def test_threshold_eb(delta, omega):
    assert classical.threshold_eb(delta, omega) == pytest.approx(np.sqrt(delta) * omega, abs=1e-8)


def test_threshold_without_field():
    # bisection brackets the infimum of the existence set, which is 0
    assert classical.threshold_eb(0.0, 1.0) == pytest.approx(0.0, abs=1e-9)
    assert classical.threshold_ee(0.0, 1.0)["threshold"] == pytest.approx(0.0, abs=1e-9)
    names = {r.branch for r in classical.fixed_points_eb(EbParams(0.01, 1.0, 0.0, 1))}
    assert {"emergent_plus", "emergent_minus"} <= names


def test_ee_decoupled_limit():
    recs = classical.fixed_points_ee(EeParams(0.0, 1.0, 0.0, 1))
    assert len(recs) == 2
    assert all(np.all(r.state.array()[:4] == 0) for r in recs)


def test_ee_ring_without_field():
    p = EeParams(1.0, 1.0, 0.0, 1)
    recs = classical.fixed_points_ee(p, n_ring=6)
    ring = [r for r in recs if r.branch.startswith("ring")]
    assert len(ring) == 6
    e_origin = min(classical.energy_ee(r.state, p) for r in recs if r.branch.startswith("origin"))
    for r in ring:
        x = r.state.array()
        assert x[4] ** 2 + x[5] ** 2 == pytest.approx(1, abs=1e-12)
        assert np.hypot(x[0], x[2]) == pytest.approx(0.5, abs=1e-12)
        assert r.residual <= 1e-10
        assert classical.energy_ee(x, p) < e_origin
        assert r.stability == "stable"


def test_ee_ring_with_field():
    p = EeParams(3.0, 1.0, 1.0, 1)
    recs = [r for r in classical.fixed_points_ee(p) if r.branch.startswith("axis")]
    assert len(recs) == 4
    for r in recs:
        assert r.state.L_w == pytest.approx(-4 / 9, abs=1e-12)
        assert r.residual <= 1e-10 and r.correction == 0.0
        assert r.stability == "stable"


@pytest.mark.parametrize("delta,omega", [(1, 1), (2, 0.5), (0.5, 2)])
def test_threshold_ee_is_four_omega_delta(delta, omega):
    th = classical.threshold_ee(delta, omega)
    assert th["threshold"] == pytest.approx(np.sqrt(4 * omega * delta), abs=1e-8)
    lc = th["threshold"]
    # |L_w| reaches 1 exactly at the located threshold
    assert 4 * omega * delta / lc**2 == pytest.approx(1, abs=1e-8)
    assert not any(r.branch.startswith("axis") for r in classical.fixed_points_ee(EeParams(lc * 0.999, omega, delta, 1)))
    assert any(r.branch.startswith("axis") for r in classical.fixed_points_ee(EeParams(lc * 1.001, omega, delta, 1)))


def test_bifurcation_diagram_eb():
    grid = np.linspace(0.05, 3.0, 60)
    pts = classical.bifurcation_diagram("eb", grid, 1.0, 1.0)
    emergent = [b for b in pts if b.branch.startswith("emergent")]
    assert min(b.coupling for b in emergent) - 1.0 <= grid[1] - grid[0] + 1e-12
    assert all(b.coupling > 1.0 for b in emergent)
    for b in emergent:
        assert b.coords["q"] == pytest.approx(-b.coupling * b.coords["L_z"], abs=1e-8)
        assert b.stability == "stable"
    origin = [b.stability for b in pts if b.branch == "origin_minus"]
    assert origin[0] == "stable" and origin[-1] == "unstable"
    below = [b for b in pts if b.coupling < 1.0 and b.stability == "stable"]
    assert {b.branch for b in below} == {"origin_minus"}


def test_origin_stability_flips_once_off_grid_threshold():
    grid = np.linspace(0.07, 3.0, 41)
    origin = [b.stability for b in classical.bifurcation_diagram("eb", grid, 1.0, 1.0) if b.branch == "origin_minus"]
    assert set(origin) == {"stable", "unstable"}
    assert sum(a != b for a, b in zip(origin, origin[1:])) == 1
    at = by_branch(classical.fixed_points_eb(EbParams(1.0, 1.0, 1.0, 1)))
    assert at["origin_minus"].stability == "marginal"


def test_bifurcation_diagram_rejects_unordered_grid():
    with pytest.raises(ValueError):
        classical.bifurcation_diagram("eb", [1.0, 0.5], 1.0, 1.0)
    with pytest.raises(ValueError):
        classical.bifurcation_diagram("xx", [0.5, 1.0], 1.0, 1.0)
