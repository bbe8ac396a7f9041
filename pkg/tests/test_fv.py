import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import remap_direct
from sphblip.analysis import Profile, blip_metric, exact_solution, problem_fan, transition_width
from sphblip.fv import (CoverageMismatch, EdgeCrossing, EulerianGrid, LagrangianGrid,
                        Reconstruction, euler_step_direct, grid_from_problem, grid_rows,
                        lagrange_step, lagrangian_timestep, remap, remap_cycle,
                        run_euler_experiment, run_remap_experiment)
from sphblip.problems import get_problem

RECONS = [Reconstruction("constant"), Reconstruction("linear", "minmod"),
          Reconstruction("linear", "vanleer")]


def _uniform_grid(n=50, rho=1.3, u=0.4, p=2.0, boundary="outflow"):
    edges = np.linspace(0.0, 1.0, n + 1)
    e = p / (0.4 * rho) + 0.5 * u * u
    return EulerianGrid(edges, np.full(n, rho), np.full(n, rho * u), np.full(n, rho * e), boundary)


def _random_grid(rng, n=40, boundary="reflecting"):
    edges = np.concatenate([[0.0], np.cumsum(rng.uniform(0.5, 1.5, n))])
    edges /= edges[-1]
    rho = rng.uniform(0.5, 2.0, n)
    u = rng.uniform(-0.5, 0.5, n)
    p = rng.uniform(0.5, 2.0, n)
    return EulerianGrid(edges, rho, rho * u, p / 0.4 + 0.5 * rho * u * u, boundary)


@pytest.mark.parametrize("recon", RECONS, ids=lambda r: f"{r.kind}-{r.limiter}")
def test_lagrange_step_uniform_state(recon):
    g = _uniform_grid().to_lagrangian()
    dt = 0.5 * lagrangian_timestep(g)
    out = lagrange_step(g, recon, dt)
    np.testing.assert_allclose(out.edges, g.edges + 0.4 * dt, atol=1e-14)
    np.testing.assert_allclose(out.tau, g.tau, rtol=1e-14)
    np.testing.assert_allclose(out.u, g.u, rtol=1e-14)
    np.testing.assert_allclose(out.ehat, g.ehat, rtol=1e-14)
    np.testing.assert_array_equal(out.dm, g.dm)


@pytest.mark.parametrize("recon", RECONS, ids=lambda r: f"{r.kind}-{r.limiter}")
def test_lagrange_step_conserves_with_walls(recon, rng):
    g = _random_grid(rng).to_lagrangian()
    m0, p0, e0 = g.totals()
    out = lagrange_step(g, recon, 0.3 * lagrangian_timestep(g))
    m1, p1, e1 = out.totals()
    assert m1 == m0
    assert abs(e1 - e0) < 1e-13 * e0
    # reflecting walls exert the edge pressures on the gas
    assert out.edges[0] == 0.0 and out.edges[-1] == pytest.approx(1.0, abs=1e-15)


def test_edge_crossing_raises():
    g = _uniform_grid(u=0.0).to_lagrangian()
    g.u[:25], g.u[25:] = 5.0, -5.0  # head-on collision
    g.ehat += 0.5 * 5.0**2
    with pytest.raises(EdgeCrossing):
        lagrange_step(g, Reconstruction(), 1.0)


def test_lagrangian_sod_star_pressure():
    prob = get_problem("sod")
    g = grid_from_problem(prob, 500).to_lagrangian()
    t, recon = 0.0, Reconstruction()
    while t < prob.t_end - 1e-15:
        dt = min(lagrangian_timestep(g), prob.t_end - t)
        g = lagrange_step(g, recon, dt)
        t += dt
    fan = problem_fan(prob)
    xc = 0.5 * (g.edges[1:] + g.edges[:-1])
    # first-order smearing reaches a few dozen cells past the rarefaction tail
    lo, hi = fan.left_speeds[1] * t + 0.05, fan.right_speeds[0] * t - 0.03
    uc = fan.star.u_star * t
    star = (xc > lo) & (xc < hi) & (np.abs(xc - uc) > 0.03)
    assert star.sum() > 10
    np.testing.assert_allclose(g.p[star], fan.star.p_star, rtol=0.02)


# -- remap ------------------------------------------------------------------------------

@pytest.mark.parametrize("recon", RECONS, ids=lambda r: f"{r.kind}-{r.limiter}")
def test_remap_identity(recon, rng):
    e = _random_grid(rng)
    out = remap(e.to_lagrangian(), e, recon)
    np.testing.assert_allclose(out.rho, e.rho, rtol=1e-13)
    np.testing.assert_allclose(out.mom, e.mom, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(out.etot, e.etot, rtol=1e-13)


@pytest.mark.parametrize("recon", RECONS, ids=lambda r: f"{r.kind}-{r.limiter}")
def test_remap_uniform_field(recon, rng):
    target = _uniform_grid(40)
    lag = target.to_lagrangian()
    inner = lag.edges[1:-1] + rng.uniform(-0.3, 0.3, 39) / 40
    lag.edges = np.concatenate([[0.0], inner, [1.0]])
    lag.dm = 1.3 * np.diff(lag.edges)
    lag.tau = np.full(40, 1 / 1.3)
    out = remap(lag, target, recon)
    np.testing.assert_allclose(out.rho, 1.3, rtol=1e-13)
    np.testing.assert_allclose(out.mom, 1.3 * 0.4, rtol=1e-12)


def _moved(rng, n=40):
    e = _random_grid(rng, n)
    lag = e.to_lagrangian()
    inner = lag.edges[1:-1] + rng.uniform(-0.2, 0.2, n - 1) * np.diff(lag.edges)[:-1]
    new_edges = np.concatenate([[0.0], np.sort(inner), [1.0]])
    rho, u, p = e.primitives()
    m = rho * np.diff(new_edges)
    ehat = e.etot / e.rho
    return e, LagrangianGrid(new_edges, m, np.diff(new_edges) / m, u, ehat, e.boundary)


def test_remap_constant_matches_direct_summation(rng):
    for _ in range(20):
        target, lag = _moved(rng)
        out = remap(lag, target, Reconstruction("constant"))
        rho = lag.dm / np.diff(lag.edges)
        for got, q in ((out.rho, rho), (out.mom, rho * lag.u), (out.etot, rho * lag.ehat)):
            want = remap_direct(lag.edges, q, target.edges)
            np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-14)
            total = np.sum(want * np.diff(target.edges))
            assert np.sum(got * target.dx) == pytest.approx(total, rel=1e-13)


@pytest.mark.parametrize("recon", RECONS, ids=lambda r: f"{r.kind}-{r.limiter}")
def test_remap_conserves_totals(recon, rng):
    for _ in range(20):
        target, lag = _moved(rng)
        m0, p0, e0 = lag.totals()
        out = remap(lag, target, recon)
        m1, p1, e1 = out.totals()
        assert m1 == pytest.approx(m0, rel=1e-13)
        assert p1 == pytest.approx(p0, rel=1e-12, abs=1e-13)
        assert e1 == pytest.approx(e0, rel=1e-13)


def test_constant_remap_creates_no_extrema(rng):
    for _ in range(20):
        target, lag = _moved(rng)
        out = remap(lag, target, Reconstruction("constant"))
        rho = lag.dm / np.diff(lag.edges)
        assert out.rho.min() >= rho.min() - 1e-14 and out.rho.max() <= rho.max() + 1e-14


def test_coverage_mismatch(rng):
    target, lag = _moved(rng)
    lag.edges = lag.edges * 0.9
    with pytest.raises(CoverageMismatch):
        remap(lag, target)
    remap(lag, target, extend=True)


@pytest.mark.parametrize("recon", RECONS, ids=lambda r: f"{r.kind}-{r.limiter}")
def test_remap_cycle_conserves_with_walls(recon, rng):
    g = _random_grid(rng)
    m0, p0, e0 = g.totals()
    for _ in range(20):
        g = remap_cycle(g, recon, 0.4 * lagrangian_timestep(g.to_lagrangian()))
    m1, _, e1 = g.totals()
    assert m1 == pytest.approx(m0, rel=1e-12)
    assert e1 == pytest.approx(e0, rel=1e-12)


# -- direct Eulerian ----------------------------------------------------------------------

@pytest.mark.parametrize("recon", RECONS, ids=lambda r: f"{r.kind}-{r.limiter}")
def test_euler_uniform_state(recon):
    g = _uniform_grid()
    out = euler_step_direct(g, recon, 0.001)
    np.testing.assert_allclose(out.rho, g.rho, rtol=1e-14)
    np.testing.assert_allclose(out.mom, g.mom, rtol=1e-14)
    np.testing.assert_allclose(out.etot, g.etot, rtol=1e-14)


@pytest.mark.parametrize("recon", RECONS, ids=lambda r: f"{r.kind}-{r.limiter}")
def test_moving_contact_keeps_u_and_p(recon):
    n = 100
    edges = np.linspace(0.0, 1.0, n + 1)
    xc = 0.5 * (edges[1:] + edges[:-1])
    rho = np.where(xc < 0.4, 1.0, 0.2)
    u, p = 0.5, 1.0
    g = EulerianGrid(edges, rho, rho * u, p / 0.4 + 0.5 * rho * u * u)
    for _ in range(50):
        g = euler_step_direct(g, recon, 0.002)
    r, uu, pp = g.primitives()
    np.testing.assert_allclose(uu, u, rtol=1e-10)
    np.testing.assert_allclose(pp, p, rtol=1e-10)


def test_euler_reflecting_conserves(rng):
    g = _random_grid(rng)
    m0, _, e0 = g.totals()
    from sphblip.fv import eulerian_timestep
    for _ in range(30):
        g = euler_step_direct(g, Reconstruction("linear"), eulerian_timestep(g))
    m1, _, e1 = g.totals()
    assert m1 == pytest.approx(m0, rel=1e-13) and e1 == pytest.approx(e0, rel=1e-13)


@pytest.mark.parametrize("name", ["sod", "blastwave"])
def test_direct_eulerian_has_no_blip(name):
    prob = get_problem(name)
    g = run_euler_experiment(prob, cells=500)[-1].grid
    rho, u, p = g.primitives()
    snap = Profile(g.centers, rho, u, p, None, prob.t_end)
    assert not blip_metric(snap, prob, prob.t_end, float(g.dx.max())).detected


def test_grid_rows_layout():
    g = grid_from_problem(get_problem("sod"), 20)
    rows = grid_rows(g)
    assert list(rows) == ["j", "x_center", "rho", "u", "p", "e"]
    np.testing.assert_array_equal(rows["j"], np.arange(20))


def test_reconstruction_validation():
    with pytest.raises(ValueError):
        Reconstruction("parabolic")
    with pytest.raises(ValueError):
        Reconstruction("linear", "superbee")


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=30))
def test_limited_slopes_bounded(q):
    q = np.array(q)
    for recon in RECONS[1:]:
        s = recon.slopes(q)
        # edge values stay within the neighbouring cell averages
        for k in range(1, len(q) - 1):
            lo, hi = min(q[k - 1:k + 2]), max(q[k - 1:k + 2])
            assert lo - 1e-9 <= q[k] + 0.5 * s[k] <= hi + 1e-9
            assert lo - 1e-9 <= q[k] - 0.5 * s[k] <= hi + 1e-9


def _remap_blast(kind):
    prob = get_problem("blastwave")
    g = run_remap_experiment(prob, Reconstruction(kind), cells=500)[-1].grid
    rho, u, p = g.primitives()
    snap = Profile(g.centers, rho, u, p, None, prob.t_end)
    fan = problem_fan(prob)
    xc = fan.star.u_star * prob.t_end
    width = transition_width(g.centers, rho, fan.rho_star_left, fan.rho_star_right,
                             xc - 0.05, xc + 0.05)
    return blip_metric(snap, prob, prob.t_end, float(g.dx.max())), width


def test_remap_contact_width_ordering():
    assert _remap_blast("constant")[1] > _remap_blast("linear")[1]


@pytest.mark.xfail(strict=True, reason="MUSCL remap leaves no start-up blip; constant remap "
                   "shows a larger smooth pressure error near the contact")
def test_remap_blip_ordering():
    assert _remap_blast("linear")[0].peak > _remap_blast("constant")[0].peak


@pytest.mark.parametrize("name", ["blastwave", "sod", "wc-two-blast"])
@pytest.mark.parametrize("recon", RECONS[:2], ids=lambda r: r.kind)
def test_totals_balance_with_edge_inflow(name, recon):
    prob = get_problem(name)
    g0 = grid_from_problem(prob, 120)
    for runner in (run_remap_experiment, run_euler_experiment):
        g1 = runner(prob, recon, cells=120, t_end=0.3 * prob.t_end)[-1].grid
        change = np.array(g1.totals()) - np.array(g0.totals())
        scale = np.abs(np.array([g0.totals()[0], g1.inflow[1], g0.totals()[2]])) + 1.0
        np.testing.assert_array_less(np.abs(change - g1.inflow) / scale, 1e-12)
        if prob.boundary == "reflecting":
            assert g1.inflow[0] == 0.0 and g1.inflow[2] == 0.0
