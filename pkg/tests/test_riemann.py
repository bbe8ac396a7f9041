import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from oracles import abs_matrix_flux, rankine_hugoniot_residuals, star_bisection
from sphblip.eos import IdealGas, PrimitiveState
from sphblip.riemann import (RiemannInput, VacuumGenerated, diffusive_flux, eigensystem_arrays,
                             godunov_state, lagrangian_eigensystem, lagrangian_jacobian,
                             material_wave_dissipation, sample_fan, solve_exact,
                             solve_hlle_lagrangian, solve_regular, star_ducowicz, star_exact,
                             star_hlle, star_roe, wave_contributions)

EOS = IdealGas()
SOD = RiemannInput(PrimitiveState(1.0, (0.0,), 1.0), PrimitiveState(0.125, (0.0,), 0.1))
BLAST = RiemannInput(PrimitiveState(1.0, (0.0,), 1000.0), PrimitiveState(1.0, (0.0,), 0.01))

pos = st.floats(0.05, 20.0)
vel = st.floats(-2.0, 2.0)
states = st.tuples(pos, vel, pos)


def _inp(l, r):
    return RiemannInput(PrimitiveState(l[0], (l[1],), l[2]), PrimitiveState(r[0], (r[1],), r[2]))


def _no_vacuum(l, r):
    cl = math.sqrt(1.4 * l[2] / l[0])
    cr = math.sqrt(1.4 * r[2] / r[0])
    return 2.0 * (cl + cr) / 0.4 > (r[1] - l[1]) + 0.5


# -- exact solver ------------------------------------------------------------

def test_sod_star_matches_bisection_oracle():
    p_o, u_o = star_bisection(1.0, 0.0, 1.0, 0.125, 0.0, 0.1, lo=1e-8, hi=10.0)
    star = solve_exact(SOD).star
    assert star.p_star == pytest.approx(p_o, abs=1e-8)
    assert star.u_star == pytest.approx(u_o, abs=1e-8)
    assert star.p_star == pytest.approx(0.30313, abs=5e-6)
    assert star.u_star == pytest.approx(0.92745, abs=5e-6)


def test_blast_star_matches_bisection_oracle():
    p_o, u_o = star_bisection(1.0, 0.0, 1000.0, 1.0, 0.0, 0.01)
    star = solve_exact(BLAST).star
    assert star.p_star == pytest.approx(p_o, rel=1e-10)
    assert star.u_star == pytest.approx(u_o, rel=1e-10)


@given(states, states)
def test_exact_matches_bisection(l, r):
    assume(_no_vacuum(l, r))
    p, u = star_exact(*l, *r)
    p_o, u_o = star_bisection(*l, *r)
    assert p == pytest.approx(p_o, rel=1e-9)
    assert u == pytest.approx(u_o, rel=1e-8, abs=1e-8)


def test_blast_right_shock_mach():
    fan = solve_exact(BLAST)
    assert fan.right_wave == "shock"
    assert fan.shock_mach("right", BLAST) == pytest.approx(198.0, abs=1.0)


@pytest.mark.parametrize("inp", [SOD, BLAST], ids=["sod", "blast"])
def test_rankine_hugoniot_on_shocks(inp):
    fan = solve_exact(inp)
    ps, us = fan.star.p_star, fan.star.u_star
    r = inp.right
    s = fan.right_speeds[1]
    res = rankine_hugoniot_residuals(r.rho, r.u, r.p, fan.rho_star_right, us, ps, s)
    scale = np.array([r.rho * abs(s), ps, ps * abs(s)])
    assert np.all(np.abs(res) / scale < 1e-10)


@given(states, states)
def test_no_expansion_shocks(l, r):
    assume(_no_vacuum(l, r))
    fan = solve_exact(_inp(l, r))
    assert (fan.left_wave == "shock") == (fan.star.p_star > l[2])
    assert (fan.right_wave == "shock") == (fan.star.p_star > r[2])
    # rarefaction heads lead their tails
    if fan.left_wave == "rarefaction":
        assert fan.left_speeds[0] <= fan.left_speeds[1] + 1e-12
    if fan.right_wave == "rarefaction":
        assert fan.right_speeds[0] <= fan.right_speeds[1] + 1e-12


@given(states)
def test_identical_states_are_fixed(s):
    inp = _inp(s, s)
    star = solve_exact(inp).star
    assert star.p_star == s[2] and star.u_star == s[1]


def test_vacuum_raises():
    with pytest.raises(VacuumGenerated):
        star_exact(1.0, -20.0, 0.1, 1.0, 20.0, 0.1)


def test_sampling_sod_contact():
    fan = solve_exact(SOD)
    us, eps = fan.star.u_star, 1e-9
    right = sample_fan(fan, SOD, us + eps)
    left = sample_fan(fan, SOD, us - eps)
    assert right.p == pytest.approx(fan.star.p_star) and left.p == pytest.approx(fan.star.p_star)
    assert right.rho == pytest.approx(fan.rho_star_right)
    assert left.rho == pytest.approx(fan.rho_star_left)
    assert right.rho < left.rho
    far = sample_fan(fan, SOD, -100.0)
    assert (far.rho, far.u, far.p) == (1.0, 0.0, 1.0)
    # a point exactly on the contact goes to the right star state
    assert sample_fan(fan, SOD, us).rho == fan.rho_star_right


@given(pos, st.floats(0.01, 3.0), pos)
def test_colliding_symmetric_flow_stagnates(rho, u, p):
    inp = _inp((rho, u, p), (rho, -u, p))
    assert sample_fan(solve_exact(inp), inp, 0.0).u == pytest.approx(0.0, abs=1e-12)


@given(states, states)
def test_godunov_state_matches_sampler(l, r):
    assume(_no_vacuum(l, r))
    inp = _inp(l, r)
    s = sample_fan(solve_exact(inp), inp, 0.0)
    rho, u, p = godunov_state(*(np.array([v]) for v in (*l, *r)), 1.4)
    assert rho[0] == pytest.approx(s.rho, rel=1e-10)
    assert u[0] == pytest.approx(s.u, rel=1e-9, abs=1e-10)
    assert p[0] == pytest.approx(s.p, rel=1e-10)


# -- approximate solvers -------------------------------------------------------

SOLVERS = {
    "hlle-state": lambda *a: star_hlle(*a, velocity="state"),
    "hlle-energy": lambda *a: star_hlle(*a, velocity="energy-flux"),
    "roe": star_roe,
    "ducowicz": star_ducowicz,
    "exact": star_exact,
}


@pytest.mark.parametrize("name", SOLVERS)
@given(s=states)
def test_consistency(name, s):
    p, u = SOLVERS[name](*(np.array([v]) for v in (*s, *s)))
    assert p[0] == pytest.approx(s[2], rel=1e-14)
    assert u[0] == pytest.approx(s[1], rel=1e-14, abs=1e-14)


@pytest.mark.parametrize("name", SOLVERS)
@given(l=states, r=states)
def test_mirror_symmetry(name, l, r):
    assume(_no_vacuum(l, r))
    f = SOLVERS[name]
    p1, u1 = f(*(np.array([v]) for v in (*l, *r)))
    p2, u2 = f(*(np.array([v]) for v in (r[0], -r[1], r[2], l[0], -l[1], l[2])))
    assert p2[0] == pytest.approx(p1[0], rel=1e-12)
    assert u2[0] == pytest.approx(-u1[0], rel=1e-10, abs=1e-12)


@pytest.mark.xfail(strict=True, reason="symmetric HLLE bounds give p* = 0.55 on Sod (81% off)")
def test_hlle_sod_within_15_percent():
    exact = solve_exact(SOD).star
    hl = solve_hlle_lagrangian(SOD)
    assert abs(hl.p_star - exact.p_star) <= 0.15 * exact.p_star
    assert abs(hl.u_star - exact.u_star) <= 0.15 * exact.u_star


def test_hlle_sod_recorded_deviation():
    # golden values for the symmetric-bound HLLE on Sod
    hl = solve_hlle_lagrangian(SOD)
    assert hl.p_star == pytest.approx(0.55, rel=1e-12)
    assert hl.u_star == pytest.approx(0.3803194146278325, rel=1e-10)
    assert solve_hlle_lagrangian(SOD, "energy-flux").u_star == pytest.approx(0.5378254348278, rel=1e-9)


@pytest.mark.xfail(strict=True, reason="arithmetic-hat Roe gives the same p* = 0.55 as HLLE on Sod")
def test_roe_closer_than_hlle_on_sod():
    ex = solve_exact(SOD).star.p_star
    assert abs(solve_regular(SOD, "roe").p_star - ex) < abs(solve_hlle_lagrangian(SOD).p_star - ex)


@pytest.mark.parametrize("kind", ["exact", "roe", "ducowicz"])
def test_regular_equal_states(kind):
    s = PrimitiveState(0.7, (0.3,), 2.0)
    star = solve_regular(RiemannInput(s, s), kind)
    assert star.p_star == pytest.approx(2.0, rel=1e-14)
    assert star.u_star == pytest.approx(0.3, rel=1e-14)


def test_regular_exact_blast_matches_oracle():
    p_o, u_o = star_bisection(1.0, 0.0, 1000.0, 1.0, 0.0, 0.01)
    star = solve_regular(BLAST, "exact")
    assert star.p_star == pytest.approx(p_o, rel=1e-10)
    assert star.u_star == pytest.approx(u_o, rel=1e-10)


def test_ducowicz_close_to_exact_for_weak_jumps():
    l = PrimitiveState(1.0, (0.0,), 1.0)
    r = PrimitiveState(1.01, (0.0,), 1.02)
    inp = RiemannInput(l, r)
    assert solve_regular(inp, "ducowicz").p_star == pytest.approx(solve_exact(inp).star.p_star,
                                                                   rel=1e-4)


# -- eigensystem and dissipation ----------------------------------------------------

def test_eigenvector_rows():
    es = lagrangian_eigensystem(PrimitiveState(1.0, (0.0,), 1.0), EOS)
    np.testing.assert_allclose(es.R[1], [math.sqrt(1.4), 0.0, -math.sqrt(1.4)], rtol=1e-15)
    np.testing.assert_allclose(es.R[:, 1], [1.0, 0.0, 2.5], rtol=1e-15)


def test_eigensystem_inverse_bulk(rng):
    for _ in range(1000):
        rho, p = 10 ** rng.uniform(-2, 2, 2)
        u = rng.uniform(-5, 5)
        R, Rinv, _ = eigensystem_arrays(rho, u, p, 1.4)
        np.testing.assert_allclose(R @ Rinv, np.eye(3), atol=1e-12)


@given(pos, vel, pos)
def test_jacobian_eigen_relation(rho, u, p):
    s = PrimitiveState(rho, (u,), p)
    es = lagrangian_eigensystem(s, EOS)
    A = lagrangian_jacobian(s, EOS)
    for k in range(3):
        r = es.R[:, k]
        np.testing.assert_allclose(A @ r, es.lambdas[k] * r,
                                   atol=1e-10 * (1.0 + np.abs(A).max() * np.abs(r).max()))


def test_diffusive_flux_equals_eig_oracle(rng):
    for _ in range(100):
        l = (10 ** rng.uniform(-1, 1), rng.uniform(-1, 1), 10 ** rng.uniform(-1, 1))
        r = (10 ** rng.uniform(-1, 1), rng.uniform(-1, 1), 10 ** rng.uniform(-1, 1))
        got = diffusive_flux(_inp(l, r))
        want = abs_matrix_flux(l, r)
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12 * np.abs(want).max())


@given(states)
def test_diffusive_flux_zero_without_jump(s):
    np.testing.assert_array_equal(diffusive_flux(_inp(s, s)), 0.0)


@given(states, states)
def test_material_wave_contribution_vanishes(l, r):
    assert np.all(wave_contributions(_inp(l, r))[1] == 0.0)


@pytest.mark.xfail(strict=True, reason="closed form gives +0.476 for the energy component")
def test_sod_k3_energy_contribution_negative():
    assert wave_contributions(SOD)[2, 2] < 0.0


def test_sod_k3_energy_contribution_recorded():
    np.testing.assert_allclose(wave_contributions(SOD)[2],
                               [-0.86538813, 0.56953125, 0.47596347], rtol=1e-7)


@given(states, states, st.floats(0.0, 10.0))
def test_material_wave_dissipation_properties(l, r, lam):
    inp = _inp(l, r)
    d = material_wave_dissipation(inp, lam)
    assert d[1] == 0.0
    np.testing.assert_allclose(material_wave_dissipation(inp, 2 * lam), 2 * d, rtol=1e-14, atol=1e-300)
    np.testing.assert_array_equal(material_wave_dissipation(inp, 0.0), 0.0)
    with pytest.raises(ValueError):
        material_wave_dissipation(inp, -1.0)
