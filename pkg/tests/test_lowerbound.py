import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from alsvre import UsageError, estimate_average_smoothness, make_rng
from alsvre.lowerbound import (HardChainInstance, block_relative_distance, build_hard_chain,
                               build_separable, chain_block_saddle, chain_parameters,
                               hard_chain_saddle, record_trace, separable_saddle, zero_chain_audit)
from alsvre.solvers import extragradient_run, lsvre_default_params, lsvre_run


def dense_H_gradient(alpha, d, x, y):
    """Gradient of H built from a dense B, independent of the bidiagonal kernels."""
    omega = (math.sqrt(alpha ** 2 + 4) - alpha) / 2
    B = np.eye(d) - np.eye(d, k=-1)
    B[-1, -1] = math.sqrt(alpha * omega)
    c = np.zeros(d)
    c[0] = omega
    return alpha * x + B @ y - c, B.T @ x - alpha * y


def test_alpha_one_constants():
    inst = HardChainInstance(1.0, 1.0, 3, 1)
    assert inst.omega == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-15)
    assert inst.q_h == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-15)
    assert inst.alpha_h * inst.omega == pytest.approx(1 - inst.q_h, abs=1e-12)


def test_small_alpha_limit():
    inst = HardChainInstance(1e-9, 1.0, 2, 1)
    assert inst.omega == pytest.approx(1.0, abs=1e-8)
    assert inst.q_h == pytest.approx(1.0, abs=1e-8)


@given(st.floats(1e-6, 5.0))
def test_alpha_identities(alpha):
    inst = HardChainInstance(alpha, 1.0, 2, 1)
    assert abs(alpha * inst.omega - (1 - inst.q_h)) <= 1e-12
    assert abs(inst.q_h - inst.omega ** 2) <= 1e-12
    assert 0 < inst.q_h < 1
    assert np.abs(inst.B_matrix()).sum(axis=0).max() == pytest.approx(2.0)


def test_block_saddle_alpha_one_d_two():
    x, y = chain_block_saddle(1.0, 2)
    np.testing.assert_allclose(x, [0.381966, 0.145898], atol=1e-6)
    # the quoted second entry 0.114702 is off in the sixth digit; the exact value is 0.1146979
    np.testing.assert_allclose(y, [0.236068, 0.114702], atol=1e-5)
    assert y[1] == pytest.approx(0.618034 * 0.145898 / math.sqrt(1 - 0.381966), abs=1e-6)
    gx, gy = dense_H_gradient(1.0, 2, x, y)
    assert np.linalg.norm(np.concatenate([gx, gy])) <= 1e-10


def test_block_saddle_d_one():
    alpha = 0.7
    x, y = chain_block_saddle(alpha, 1)
    inst = HardChainInstance(alpha, 1.0, 1, 1)
    q = inst.q_h
    np.testing.assert_allclose(x, [q])
    np.testing.assert_allclose(y, [inst.omega * q / math.sqrt(1 - q)])
    gx, gy = dense_H_gradient(alpha, 1, x, y)
    assert abs(gx[0]) <= 1e-12 and abs(gy[0]) <= 1e-12


def test_chain_gradients_match_dense_reference():
    inst = HardChainInstance(0.4, 2.0, 5, 3)
    rng = make_rng(0)
    z = rng.standard_normal(inst.dim)
    x, y = z[:inst.dx].reshape(3, 5), z[inst.dx:].reshape(3, 5)
    for i in range(3):
        gx, gy = dense_H_gradient(0.4, 5, x[i], y[i])
        g = inst.component_operator(i, z)
        np.testing.assert_allclose(g[i * 5:(i + 1) * 5], 2.0 * gx, atol=1e-12)
        np.testing.assert_allclose(g[inst.dx + i * 5:inst.dx + (i + 1) * 5], -2.0 * gy, atol=1e-12)


def test_relative_distance_floor_for_short_supports():
    for alpha in (0.3, 1.0, 2.5):
        inst = HardChainInstance(alpha, 1.0, 12, 1)
        xs, ys = chain_block_saddle(alpha, 12)
        assert block_relative_distance(inst, np.zeros(inst.dim)) == pytest.approx(1.0)
        for k in range(0, 7):
            # the best point supported on the first k coordinates copies the saddle there
            z = np.zeros(inst.dim)
            z[:k] = xs[:k]
            z[inst.dx:inst.dx + k] = ys[:k]
            assert block_relative_distance(inst, z) >= 0.5 * inst.q_h ** (2 * k)


def test_build_hard_chain_desk_instance():
    inst = build_hard_chain(40.0, 1.0, 4, 1e-3)
    assert inst.alpha_h == pytest.approx(0.141776, abs=1e-6)
    assert inst.d == 39
    assert inst.constants.L == pytest.approx(40.0, rel=1e-12)
    assert inst.constants.mu_x == pytest.approx(1.0, rel=1e-12)
    assert estimate_average_smoothness(inst, 100, seed=0) <= inst.constants.L + 1e-6
    alpha, lam, d = chain_parameters(40.0, 1.0, 4, 1e-3)
    assert (alpha, lam, d) == (inst.alpha_h, inst.lambda_h, inst.d)


@pytest.mark.parametrize("args", [(4.0, 1.0, 4, 1e-3), (40.0, 1.0, 4, 0.01), (40.0, 0.0, 4, 1e-3)])
def test_build_hard_chain_preconditions(args):
    with pytest.raises(UsageError):
        build_hard_chain(*args)


@given(st.floats(0.05, 5.0), st.floats(0.1, 10.0), st.integers(1, 12), st.integers(1, 6))
def test_chain_saddle_zeroes_gradient(alpha, lam, d, n):
    inst = HardChainInstance(alpha, lam, d, n)
    z = hard_chain_saddle(inst).z
    assert np.linalg.norm(inst.operator(z)) <= 1e-10 * lam


@given(st.floats(1.0, 5.0))
def test_chain_lipschitz_ratio(alpha):
    inst = HardChainInstance(alpha, 1.0, 6, 1)
    rng = make_rng(int(alpha * 1000))
    for _ in range(20):
        z1, z2 = rng.standard_normal((2, inst.dim))
        r = np.linalg.norm(inst.operator(z1) - inst.operator(z2)) / np.linalg.norm(z1 - z2)
        assert r <= math.sqrt(8 + 2 * alpha ** 2) + 1e-6


def test_separable_example():
    inst = build_separable(2 * math.sqrt(2), 1.0, 1)
    assert inst.L_hat == pytest.approx(math.sqrt(3))
    z = separable_saddle(inst).z
    np.testing.assert_allclose(z, math.sqrt(3) / (math.sqrt(3) + 1))
    np.testing.assert_allclose(z, 0.633975, atol=1e-6)
    assert np.linalg.norm(inst.operator(z)) <= 1e-12


def test_separable_mu_to_zero():
    inst = build_separable(2.0, 1e-12, 3)
    np.testing.assert_allclose(separable_saddle(inst).z, 1.0, atol=1e-9)


def test_separable_rejects_small_ratio():
    with pytest.raises(UsageError):
        build_separable(1.0, 0.5, 2)


@given(st.floats(0.01, 1.0), st.floats(2.1, 50.0), st.integers(1, 9))
def test_separable_saddle_zeroes_gradient(mu, ratio, n):
    inst = build_separable(mu * ratio, mu, n)
    g = inst.operator(separable_saddle(inst).z)
    assert np.linalg.norm(g) <= 1e-10 * inst.constants.L


def test_separable_component_smoothness():
    inst = build_separable(3.0, 0.5, 4)
    M = inst.component_smoothness
    assert M == pytest.approx(0.5 + math.sqrt(4 * (9 / 2 - 0.25)))
    rng = make_rng(1)
    h = 1e-6
    for _ in range(50):
        i = int(rng.integers(4))
        z = rng.standard_normal(8)
        dz = rng.standard_normal(8)
        dz *= h / np.linalg.norm(dz)
        r = np.linalg.norm(inst.component_operator(i, z + dz) - inst.component_operator(i, z)) / h
        assert r <= M + 1e-6


def test_audit_empty_trace_passes():
    inst = HardChainInstance(1.0, 1.0, 8, 4)
    rep = zero_chain_audit(inst, np.zeros(inst.dim), [])
    assert rep.passed and rep.steps == 0


def test_audit_lsvre_and_eg():
    inst = HardChainInstance(1.0, 1.0, 8, 4)
    z0, steps = record_trace(inst, lambda p, z, **kw: lsvre_run(p, z, lsvre_default_params(p, T=50), **kw))
    assert zero_chain_audit(inst, z0, steps).passed
    z0, steps = record_trace(inst, lambda p, z, **kw: extragradient_run(p, z, 0.1, 50, **kw))
    rep = zero_chain_audit(inst, z0, steps)
    assert rep.passed and max(rep.max_support) > 0


def test_audit_catches_planted_write():
    inst = HardChainInstance(1.0, 1.0, 8, 4)
    z = np.zeros(inst.dim)
    z[inst.d - 1] = 1.0
    rep = zero_chain_audit(inst, np.zeros(inst.dim), [(z, [0])])
    assert not rep.passed
    assert rep.violation == {"t": 1, "block": 0, "side": "x", "support": 8, "allowed": 1}


def test_audit_rejects_nonzero_start():
    inst = HardChainInstance(1.0, 1.0, 2, 1)
    with pytest.raises(UsageError):
        zero_chain_audit(inst, np.ones(inst.dim), [])
