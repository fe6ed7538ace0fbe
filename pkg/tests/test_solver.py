import numpy as np
import pytest

from nsopt.options import SolverOptions, load_options_file
from nsopt.oracle import ObjectiveOracle
from nsopt.problems import make_problem
from nsopt.solver import run_solver


def _quadratic(n):
    return ObjectiveOracle(dimension=n,
                           evaluate_f=lambda x: 0.5 * float(x @ x),
                           evaluate_g=lambda x: x.copy())


def test_smooth_quadratic_converges_fast():
    opts = SolverOptions(strategy="gradient")
    report = run_solver(_quadratic(2), np.array([1.0, 1.0]), opts)
    assert report.final_f_unscaled <= 1e-10
    assert report.iterations <= 10
    assert report.termination_reason == "stationary"


def test_maxq_small_instance():
    prob = make_problem("MaxQ", 2)
    report = run_solver(prob.oracle, np.array([1.0, -1.0]), SolverOptions())
    assert report.final_f_unscaled <= 1e-6


def test_infinite_starting_value_rejected():
    oracle = ObjectiveOracle(dimension=1,
                             evaluate_f=lambda x: float("inf"),
                             evaluate_g=lambda x: np.ones(1))
    with pytest.raises(ValueError):
        run_solver(oracle, np.zeros(1), SolverOptions())


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        run_solver(_quadratic(3), np.zeros(2), SolverOptions())


def test_report_counters_and_history():
    prob = make_problem("ChainedLQ", 10)
    report = run_solver(prob.oracle, prob.x0, SolverOptions())
    assert report.function_evaluations >= report.iterations
    assert report.gradient_evaluations >= 1
    assert report.cpu_seconds >= 0.0
    assert len(report.f_history) >= 2
    assert report.f_history[0] == pytest.approx(prob.oracle.evaluate_f(prob.x0))
    assert report.f_history[-1] == pytest.approx(report.final_f_unscaled)
    assert np.all(np.isfinite(report.x))


def test_objective_scaling_recorded():
    big = ObjectiveOracle(dimension=2,
                          evaluate_f=lambda x: 1e4 * float(x @ x),
                          evaluate_g=lambda x: 2e4 * x)
    report = run_solver(big, np.array([1.0, 0.0]), SolverOptions(strategy="gradient"))
    assert report.scale == pytest.approx(1e2 / 2e4)
    assert report.final_f_unscaled <= 1e-8


def test_unbounded_objective_detected():
    oracle = ObjectiveOracle(dimension=1,
                             evaluate_f=lambda x: float(x[0]),
                             evaluate_g=lambda x: np.ones(1))
    opts = SolverOptions(strategy="gradient")
    report = run_solver(oracle, np.zeros(1), opts)
    assert report.termination_reason == "objective_unbounded"
    assert report.final_f_unscaled <= -1e18


def test_seeded_runs_are_reproducible():
    prob = make_problem("ChainedCrescent_2", 8)
    opts = SolverOptions(strategy="gradient_combination", seed=42)
    a = run_solver(prob.oracle, prob.x0, opts)
    b = run_solver(prob.oracle, prob.x0, opts)
    assert a.final_f_unscaled == b.final_f_unscaled
    assert np.array_equal(a.x, b.x)
    assert a.iterations == b.iterations


def test_accuracy_mode_not_worse_than_speed_mode():
    prob = make_problem("MaxQ", 20)
    speed = run_solver(prob.oracle, prob.x0, SolverOptions(delta_f=1e-5, n_f=10))
    acc = run_solver(prob.oracle, prob.x0, SolverOptions(delta_f=1e-8, n_f=20))
    assert acc.final_f_unscaled <= speed.final_f_unscaled + 1e-12


# -- options file -----------------------------------------------------------


def test_options_file_roundtrip(tmp_path):
    path = tmp_path / "opts.txt"
    path.write_text(
        "# comment line\n"
        "BFGS_correction_threshold_1 = 1e-6\n"
        "PSP_size_factor = 0.1\n"
        "SMLM_history = 7\n"
        "DCCP_try_gradient_step = false\n"
    )
    opts = load_options_file(str(path))
    assert opts.eta == pytest.approx(1e-6)
    assert opts.size_factor == pytest.approx(0.1)
    assert opts.history_limit == 7
    assert opts.try_gradient_step is False


def test_options_file_unknown_key_rejected(tmp_path):
    path = tmp_path / "opts.txt"
    path.write_text("no_such_option = 1\n")
    with pytest.raises(ValueError):
        load_options_file(str(path))


def test_options_validation():
    with pytest.raises(ValueError):
        SolverOptions(c=1.5)
    with pytest.raises(ValueError):
        SolverOptions(strategy="newton")
    with pytest.raises(ValueError):
        SolverOptions(eta=1.0, psi=0.5)


def test_samples_per_iteration_defaults():
    assert SolverOptions(strategy="cutting_plane").samples_per_iteration(100) == 0
    assert SolverOptions(strategy="gradient_combination").samples_per_iteration(100) == 10
    assert SolverOptions(strategy="gradient_combination").samples_per_iteration(95) == 10
