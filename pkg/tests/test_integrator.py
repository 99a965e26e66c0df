import math

import numpy as np
import pytest

from cstage_rk.errors import FamilyMismatch, NoConvergence
from cstage_rk.integrator import (
    SolverMode,
    StageSolveConfig,
    convergence_order,
    convergence_study,
    cs_poly_step,
    integrate,
    rk_step,
)
from cstage_rk.orthopoly import Kind, make_family
from cstage_rk.problems import IvpProblem, exponential, kepler, make_problem, pendulum
from cstage_rk.quadrature import gauss_rule
from cstage_rk.tableau import BUILTINS, builtin, builtin_method

NAMES = sorted(BUILTINS)
NEWTON = StageSolveConfig(SolverMode.NEWTON)
H_LIST = [0.1, 0.05, 0.025, 0.0125]


def zero_field():
    return IvpProblem("zero", lambda t, z: np.zeros_like(z), 0.0, [1.5, -2.0])


# ---- problems --------------------------------------------------------------

def test_kepler_initial_state_and_energy():
    prob = kepler()
    np.testing.assert_array_equal(prob.z0, [0.0, 1.0, 1.0, 0.0])
    assert prob.energy(prob.z0) == -0.5


def test_kepler_exact_solution_solves_ode():
    prob = kepler()
    d = 1e-6
    for t in np.linspace(0.3, 9.0, 10):
        deriv = (prob.exact(t + d) - prob.exact(t - d)) / (2 * d)
        assert np.max(np.abs(deriv - prob.f(t, prob.exact(t)))) < 1e-6


def test_problem_validation():
    with pytest.raises(ValueError):
        IvpProblem("bad", lambda t, z: np.full_like(z, np.nan), 0.0, [0.0])
    with pytest.raises(ValueError):
        IvpProblem("bad", lambda t, z: z, 0.0, [1.0], exact=lambda t: np.array([2.0]))
    with pytest.raises(ValueError):
        make_problem("nosuch")
    assert pendulum().dimension == 2


# ---- single steps ----------------------------------------------------------

def test_exponential_one_step():
    z1 = rk_step(builtin("legendre3_s2"), exponential(), 0.0, np.array([1.0]), 0.1)
    assert abs(z1[0] - math.exp(0.1)) < 5e-6


@pytest.mark.parametrize("name", NAMES)
def test_zero_field_is_fixed(name):
    prob = zero_field()
    np.testing.assert_array_equal(rk_step(builtin(name, 0.4), prob, 0.0, prob.z0, 0.1), prob.z0)
    method, rule = builtin_method(name, 0.4)
    np.testing.assert_array_equal(cs_poly_step(method, rule, prob, 0.0, prob.z0, 0.1), prob.z0)


def test_kepler_table5_iteration_count():
    stats = []
    prob = kepler()
    rk_step(builtin("hermite4_sym_s3", 0.0), prob, 0.0, prob.z0, 0.1, _stats=stats)
    assert stats[0] <= 20


def test_zero_step_rejected():
    prob = kepler()
    with pytest.raises(ValueError):
        rk_step(builtin("legendre3_s2"), prob, 0.0, prob.z0, 0.0)


def test_no_convergence_reports_step():
    cfg = StageSolveConfig(max_iterations=3)
    with pytest.raises(NoConvergence) as info:
        integrate(builtin("laguerre2_s2", 0.0), kepler(), 2.0, 5, cfg)
    assert info.value.step == 0
    assert info.value.iterations == 3
    assert "step 0" in str(info.value)


def test_config_validation():
    with pytest.raises(ValueError):
        StageSolveConfig(tolerance=0.0)
    with pytest.raises(ValueError):
        StageSolveConfig(max_iterations=0)
    assert StageSolveConfig("newton").mode is SolverMode.NEWTON


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("problem", ["exponential", "kepler", "pendulum"])
def test_newton_matches_fixed_point(name, problem):
    prob = make_problem(problem)
    tab = builtin(name, 0.3)
    a = rk_step(tab, prob, 0.0, prob.z0, 0.1)
    b = rk_step(tab, prob, 0.0, prob.z0, 0.1, NEWTON)
    assert np.max(np.abs(a - b)) < 1e-12


def test_newton_converges_faster_on_stiffer_step():
    prob = kepler()
    tab = builtin("hermite4_sym_s3", 0.0)
    fp, nt = [], []
    rk_step(tab, prob, 0.0, prob.z0, 0.3, _stats=fp)
    rk_step(tab, prob, 0.0, prob.z0, 0.3, NEWTON, _stats=nt)
    assert nt[0] < fp[0]


# ---- polynomial stage form -------------------------------------------------

@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("problem", ["exponential", "kepler", "pendulum"])
@pytest.mark.parametrize("mu", [0.0, 0.7])
def test_poly_stage_equivalence(name, problem, mu):
    prob = make_problem(problem)
    method, rule = builtin_method(name, mu)
    tab = builtin(name, mu)
    z_rk = rk_step(tab, prob, 0.0, prob.z0, 0.1)
    z_cs = cs_poly_step(method, rule, prob, 0.0, prob.z0, 0.1)
    assert np.max(np.abs(z_rk - z_cs)) < 1e-12


def test_poly_stage_family_mismatch():
    method, _ = builtin_method("legendre3_s2")
    prob = exponential()
    with pytest.raises(FamilyMismatch):
        cs_poly_step(method, gauss_rule(make_family(Kind.LAGUERRE), 2), prob, 0.0, prob.z0, 0.1)


# ---- trajectories ----------------------------------------------------------

def test_trajectory_shape_and_columns():
    traj = integrate(builtin("legendre3_s2"), kepler(), 0.1, 100)
    assert len(traj) == 101
    assert traj.states.shape == (101, 4)
    np.testing.assert_allclose(np.diff(traj.times), 0.1, atol=1e-12)
    assert traj.energy_error[0] == 0.0 and traj.solution_error[0] == 0.0
    assert np.max(traj.energy_error) < 1e-3


def test_pendulum_has_no_solution_error():
    traj = integrate(builtin("legendre3_s2"), pendulum(), 0.1, 10)
    assert traj.solution_error is None
    assert traj.energy_error.shape == (11,)


def test_orbit_returns_after_full_period():
    prob = kepler()
    traj = integrate(builtin("hermite4_sym_s3", 0.0), prob, 2 * math.pi / 100, 200)
    for k in (100, 200):
        assert np.linalg.norm(prob.exact(traj.times[k]) - prob.z0) < 1e-12
        gap = np.linalg.norm(traj.states[k] - prob.z0)
        assert gap <= traj.solution_error[k] + 1e-12


def test_step_count_rejected():
    with pytest.raises(ValueError):
        integrate(builtin("legendre3_s2"), kepler(), 0.1, 0)


# ---- convergence -----------------------------------------------------------

@pytest.mark.parametrize(
    "name,mu,lo,hi",
    [
        ("legendre3_s2", 0.0, 2.8, 3.2),
        ("laguerre2_s2", 0.0, 1.8, 2.2),
        ("hermite4_sym_s3", 0.0, 3.8, 4.2),
    ],
)
def test_convergence_slopes(name, mu, lo, hi):
    slope = convergence_order(builtin(name, mu), kepler(), 1.0, H_LIST)
    assert lo <= slope <= hi


def test_convergence_errors_decrease():
    errors, _ = convergence_study(builtin("legendre3_s3", 0.0), kepler(), 1.0, H_LIST)
    assert np.all(np.diff(errors) < 0)


@pytest.mark.parametrize(
    "h_list,t_end",
    [
        ([0.1], 1.0),
        ([0.1, 0.05, 0.025], 1.0),
        ([0.1, 0.04, 0.02, 0.01], 1.0),
        ([0.3, 0.15, 0.075, 0.0375], 1.0),
    ],
)
def test_convergence_preconditions(h_list, t_end):
    with pytest.raises(ValueError):
        convergence_order(builtin("legendre3_s2"), kepler(), t_end, h_list)


def test_convergence_needs_exact_solution():
    with pytest.raises(ValueError):
        convergence_order(builtin("legendre3_s2"), pendulum(), 1.0, H_LIST)


# ---- reversibility ---------------------------------------------------------

def _round_trip(name, mu=0.0):
    prob = kepler()
    tab = builtin(name, mu)
    z1 = rk_step(tab, prob, 0.0, prob.z0, 0.1)
    z0 = rk_step(tab, prob, 0.1, z1, -0.1)
    return np.max(np.abs(z0 - prob.z0))


def test_symmetric_method_is_reversible():
    assert _round_trip("hermite4_sym_s3") < 1e-10
    assert _round_trip("hermite4_sym_s3", 0.6) < 1e-10


def test_nonsymmetric_method_is_not_reversible():
    assert _round_trip("legendre3_s2") > 1e-6
