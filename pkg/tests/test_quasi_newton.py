import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nsopt.quasi_newton import DegenerateStepError, QuasiNewtonState, damp

ETA, PSI = 1e-8, 1e8


def _bounds_hold(s, v, eta=ETA, psi=PSI):
    ss = float(s @ s)
    sv = float(s @ v)
    return sv >= eta * ss and float(v @ v) <= psi * sv


def test_damp_noop_when_bounds_hold():
    s = np.array([1.0, 0.0])
    y = np.array([2.0, 0.0])
    beta, v = damp(s, y, ETA, PSI)
    assert beta == 0.0
    assert np.allclose(v, y)


def test_damp_opposed_curvature():
    s = np.array([1.0, 0.0])
    y = np.array([-1.0, 0.0])
    beta, v = damp(s, y, ETA, PSI)
    # first bound binds at s'v = eta: beta = (1 + eta) / 2
    assert beta == pytest.approx((1.0 + ETA) / 2.0, rel=1e-12)
    assert v[0] == pytest.approx(ETA, rel=1e-6)
    assert _bounds_hold(s, v)


def test_damp_y_equals_s():
    s = np.array([3.0, -1.0])
    beta, v = damp(s, s.copy(), ETA, PSI)
    assert beta == 0.0
    assert np.allclose(v, s)


def test_damp_rejects_zero_step():
    with pytest.raises(DegenerateStepError):
        damp(np.zeros(2), np.ones(2), ETA, PSI)


def test_damp_always_satisfies_bounds():
    rng = np.random.default_rng(0)
    for _ in range(200):
        n = rng.integers(1, 8)
        s = rng.standard_normal(n)
        y = rng.standard_normal(n) * 10.0 ** rng.integers(-4, 5)
        beta, v = damp(s, y, ETA, PSI)
        assert 0.0 <= beta <= 1.0
        assert _bounds_hold(s, v)


_coords = st.floats(-1e4, 1e4, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(_coords, min_size=1, max_size=6),
       st.lists(_coords, min_size=1, max_size=6),
       st.floats(1e-8, 0.9), st.floats(1.2, 1e8))
def test_damp_bounds_property(s_list, y_list, eta, psi):
    n = min(len(s_list), len(y_list))
    s = np.asarray(s_list[:n])
    y = np.asarray(y_list[:n])
    if float(s @ s) < 1e-12:
        return
    beta, v = damp(s, y, eta, psi)
    assert 0.0 <= beta <= 1.0
    # interpolation between y and s, and both curvature bounds
    assert np.allclose(v, (1.0 - beta) * y + beta * s)
    assert _bounds_hold(s, v, eta * (1 - 1e-9), psi * (1 + 1e-9))


def test_bfgs_update_identity_pair():
    qn = QuasiNewtonState(2)
    e1 = np.array([1.0, 0.0])
    qn.update(e1, e1)
    assert np.allclose(qn.H, np.eye(2))
    assert np.allclose(qn.W, np.eye(2))


def test_bfgs_update_hand_case():
    qn = QuasiNewtonState(2)
    qn.update(np.array([1.0, 0.0]), np.array([1.0, 1.0]))
    assert np.allclose(qn.H, [[1.0, 1.0], [1.0, 2.0]])
    assert np.allclose(qn.W, [[2.0, -1.0], [-1.0, 1.0]])
    assert np.allclose(qn.H @ qn.W, np.eye(2), atol=1e-12)


def test_update_rejects_nonpositive_curvature():
    qn = QuasiNewtonState(2)
    with pytest.raises(ValueError):
        qn.update(np.array([1.0, 0.0]), np.array([-1.0, 0.0]))


def test_limited_history_fifo():
    qn = QuasiNewtonState(3, storage="limited", history_limit=2)
    pairs = [(np.eye(3)[i], np.eye(3)[i]) for i in range(3)]
    for s, v in pairs:
        qn.update(s, v)
    kept = list(qn.pairs)
    assert len(kept) == 2
    assert np.allclose(kept[0][0], pairs[1][0])
    assert np.allclose(kept[1][0], pairs[2][0])


def test_empty_limited_history_is_identity():
    qn = QuasiNewtonState(4, storage="limited")
    r = np.array([1.0, -2.0, 0.5, 3.0])
    assert np.allclose(qn.apply_W(r), r)
    assert np.allclose(qn.apply_H(r), r)


def test_full_apply_w_matrix_vector():
    qn = QuasiNewtonState(2)
    qn.W = np.array([[2.0, -1.0], [-1.0, 1.0]])
    assert np.allclose(qn.apply_W(np.array([1.0, 0.0])), [2.0, -1.0])


# Tight damping bounds keep the metric well conditioned, so the inverse-pair
# and limited-vs-full identities can be checked at tight tolerances while
# every update still exercises the damping path.
ETA_TIGHT, PSI_TIGHT = 0.5, 2.0


def _random_state(rng, n, mode, storage, updates):
    qn = QuasiNewtonState(n, mode=mode, storage=storage)
    for _ in range(updates):
        s = rng.standard_normal(n)
        y = rng.standard_normal(n)
        _, v = damp(s, y, ETA_TIGHT, PSI_TIGHT)
        qn.update(s, v)
    return qn


@pytest.mark.parametrize("mode", ["BFGS", "DFP"])
@pytest.mark.parametrize("storage", ["full", "limited"])
def test_apply_h_w_inverse_pair(mode, storage):
    rng = np.random.default_rng(7)
    for trial in range(10):
        qn = _random_state(rng, 6, mode, storage, updates=8)
        r = rng.standard_normal(6)
        back = qn.apply_H(qn.apply_W(r))
        assert np.max(np.abs(back - r)) <= 1e-6 * max(1.0, np.max(np.abs(r)))


@pytest.mark.parametrize("mode", ["BFGS", "DFP"])
def test_limited_matches_full_within_history(mode):
    rng = np.random.default_rng(11)
    n = 8
    full = QuasiNewtonState(n, mode=mode, storage="full")
    lim = QuasiNewtonState(n, mode=mode, storage="limited", history_limit=20)
    for _ in range(15):
        s = rng.standard_normal(n)
        _, v = damp(s, rng.standard_normal(n), ETA_TIGHT, PSI_TIGHT)
        full.update(s, v)
        lim.update(s, v)
        r = rng.standard_normal(n)
        ref_w = full.apply_W(r)
        ref_h = full.apply_H(r)
        tol_w = 1e-9 * max(1.0, np.max(np.abs(ref_w)))
        tol_h = 1e-9 * max(1.0, np.max(np.abs(ref_h)))
        assert np.max(np.abs(lim.apply_W(r) - ref_w)) <= tol_w
        assert np.max(np.abs(lim.apply_H(r) - ref_h)) <= tol_h


@pytest.mark.parametrize("mode", ["BFGS", "DFP"])
def test_apply_w_matrix_matches_columns(mode):
    rng = np.random.default_rng(3)
    qn = _random_state(rng, 9, mode, "limited", updates=12)
    A = rng.standard_normal((9, 5))
    ref = np.column_stack([qn.apply_W(A[:, j]) for j in range(5)])
    got = qn.apply_W_matrix(A)
    assert np.max(np.abs(got - ref)) <= 1e-9 * max(1.0, np.max(np.abs(ref)))


def test_dense_w_consistent():
    rng = np.random.default_rng(5)
    qn = _random_state(rng, 5, "BFGS", "limited", updates=6)
    D = qn.dense_W()
    r = rng.standard_normal(5)
    assert np.allclose(D @ r, qn.apply_W(r), rtol=1e-10, atol=1e-10)


def test_full_storage_positive_definite_after_damped_updates():
    rng = np.random.default_rng(9)
    for mode in ("BFGS", "DFP"):
        qn = _random_state(rng, 7, mode, "full", updates=20)
        np.linalg.cholesky(qn.H)  # raises if not positive definite
        np.linalg.cholesky(qn.W)
        assert np.max(np.abs(qn.H @ qn.W - np.eye(7))) <= 1e-6
