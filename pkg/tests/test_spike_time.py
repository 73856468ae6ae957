# -*- coding: utf-8 -*-
# Filename: test_spike_time.py

"""
Closed-form spike time solver against hand values and the membrane oracle.
Created on 2026-09-18
"""

import math
import numpy as np
import pytest
from ttfs_snn.errors import ContractError, DomainError
from ttfs_snn.temporal import spike_time
from ttfs_snn.temporal.spike_time import (T_MAX, Z_MAX, SynapseInput, causal_grad, causal_solve,
                                          membrane_oracle, solve_spike_time, spike_time_grad,
                                          time_of_z, z_of_time)

def test_z_of_time():
    assert z_of_time(0.0) == 1.0
    assert z_of_time(math.log(2.0)) == pytest.approx(2.0)
    assert z_of_time(math.inf) == Z_MAX
    np.testing.assert_allclose(z_of_time(np.array([0.0, 1.0, np.inf])), [1.0, math.e, Z_MAX])
    with pytest.raises(DomainError):
        z_of_time(-0.1)

def test_time_of_z():
    assert time_of_z(1.0) == 0.0
    assert time_of_z(2.0) == pytest.approx(0.693147, abs=1e-6)
    assert time_of_z(Z_MAX) == math.inf
    with pytest.raises(DomainError):
        time_of_z(0.5)

def test_single_input():
    s = solve_spike_time([SynapseInput(1.0, 2.0)])
    assert s.z_out == pytest.approx(2.0)
    assert s.causal_mask.tolist() == [True]
    assert s.denom == pytest.approx(1.0)
    assert s.fires

def test_threshold_asymptote():
    s = solve_spike_time([(1.0, 1.0)])
    assert not s.fires
    assert s.z_out == Z_MAX
    assert s.causal_mask.tolist() == [False]
    assert s.denom == 0.0

def test_late_inhibition_is_not_causal():
    s = solve_spike_time([(1.0, 3.0), (2.0, -5.0)])
    assert s.z_out == pytest.approx(1.5)
    assert s.causal_mask.tolist() == [True, False]

def test_two_input_causal_set():
    s = solve_spike_time([(1.0, 0.6), (1.5, 0.9)])
    assert s.z_out == pytest.approx(3.9)
    assert s.causal_mask.tolist() == [True, True]
    assert s.denom == pytest.approx(0.5)

def test_empty_and_silent_inputs():
    s = solve_spike_time([])
    assert not s.fires and s.causal_mask.shape == (0,)
    s = solve_spike_time([(Z_MAX, 5.0)])
    assert not s.fires

def test_input_order_does_not_matter():
    a = solve_spike_time([(1.5, 0.9), (1.0, 0.6)])
    assert a.z_out == pytest.approx(3.9)
    assert a.causal_mask.tolist() == [True, True]

def test_gradient_values():
    inputs = [(1.0, 0.6), (1.5, 0.9)]
    s = solve_spike_time(inputs)
    dz, dw = spike_time_grad(s, inputs, 1.0)
    assert dw[0] == pytest.approx(-5.8)
    assert dz[0] == pytest.approx(1.2)
    assert dz[1] == pytest.approx(1.8)
    assert dw[1] == pytest.approx(-4.8)
    dz2, dw2 = spike_time_grad(s, inputs, 2.0)
    np.testing.assert_allclose(dz2, 2.0 * dz)
    np.testing.assert_allclose(dw2, 2.0 * dw)

def test_gradient_finite_differences():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(20):
        z = np.exp(rng.uniform(0.0, 2.0, 6))
        w = rng.uniform(-0.5, 1.5, 6)
        s = solve_spike_time(list(zip(z, w)))
        if not s.fires:
            continue
        dz, dw = spike_time_grad(s, list(zip(z, w)))
        eps = 1.0e-5
        for j in range(6):
            for arr, analytic in ((z, dz), (w, dw)):
                orig = arr[j]
                arr[j] = orig + eps
                plus = solve_spike_time(list(zip(z, w)))
                arr[j] = orig - eps
                minus = solve_spike_time(list(zip(z, w)))
                arr[j] = orig
                if plus.causal_mask.tolist() != s.causal_mask.tolist() or\
                   minus.causal_mask.tolist() != s.causal_mask.tolist():
                    continue
                numeric = (plus.z_out - minus.z_out) / (2.0 * eps)
                scale = max(abs(numeric), abs(analytic[j]), 1.0e-8)
                assert abs(numeric - analytic[j]) / scale < 1.0e-4
                checked += 1
    assert checked > 0

def test_gradient_outside_causal_set_is_zero():
    inputs = [(1.0, 3.0), (2.0, -5.0)]
    dz, dw = spike_time_grad(solve_spike_time(inputs), inputs)
    assert dz[1] == 0.0 and dw[1] == 0.0
    inputs = [(1.0, 1.0)]
    dz, dw = spike_time_grad(solve_spike_time(inputs), inputs)
    assert dz.tolist() == [0.0] and dw.tolist() == [0.0]

def test_gradient_length_mismatch():
    s = solve_spike_time([(1.0, 2.0)])
    with pytest.raises(ContractError):
        spike_time_grad(s, [(1.0, 2.0), (1.5, 1.0)])

def test_weight_monotonicity():
    inputs = [(1.0, 0.6), (1.5, 0.9), (1.2, 0.4)]
    s = solve_spike_time(inputs)
    _, dw = spike_time_grad(s, inputs)
    assert np.all(dw[s.causal_mask] <= 0.0)

def test_oracle_examples():
    dt = 1.0e-4
    assert membrane_oracle([(0.0, 2.0)], dt) == pytest.approx(math.log(2.0), abs=2 * dt)
    assert membrane_oracle([(0.0, 1.0)], dt) == math.inf
    assert membrane_oracle([(0.0, 3.0), (0.6931, -5.0)], dt) == pytest.approx(0.4055, abs=2 * dt)

def test_oracle_equivalence():
    dt = 1.0e-4
    rng = np.random.default_rng(11)
    n_finite = 0
    for _ in range(1000):
        n = int(rng.integers(1, 17))
        t = rng.uniform(0.0, 3.0, n)
        w = rng.uniform(-2.0, 3.0, n)
        s = solve_spike_time(list(zip(np.exp(t), w)))
        t_solver = time_of_z(s.z_out)
        t_oracle = membrane_oracle(list(zip(t, w)), dt, T_MAX)
        if math.isfinite(t_solver) and t_solver > T_MAX - 10 * dt:
            continue
        assert math.isfinite(t_solver) == math.isfinite(t_oracle)
        if math.isfinite(t_solver):
            assert abs(t_solver - t_oracle) < 1.0e-3
            n_finite += 1
    assert n_finite > 100

def test_time_shift_equivariance():
    base = [(1.0, 0.6), (1.5, 0.9)]
    delta = 0.7
    shifted = [(z * math.exp(delta), w) for z, w in base]
    a = solve_spike_time(base)
    b = solve_spike_time(shifted)
    assert time_of_z(b.z_out) == pytest.approx(time_of_z(a.z_out) + delta)
    assert a.causal_mask.tolist() == b.causal_mask.tolist()

def test_causality_of_rows():
    rng = np.random.default_rng(3)
    z = np.exp(rng.uniform(0.0, 2.0, (8, 5)))
    w = rng.uniform(-0.5, 1.2, (4, 5))
    cache = causal_solve(z, w)
    for i in range(8):
        for c in range(4):
            s = solve_spike_time(list(zip(z[i], w[c])))
            assert cache.z_out[i, c] == pytest.approx(s.z_out)
            if s.fires:
                assert np.all(z[i][s.causal_mask] <= s.z_out)
                assert np.all(z[i][~s.causal_mask] > s.z_out)

def test_row_gradient_matches_scalar_gradient():
    rng = np.random.default_rng(5)
    z = np.exp(rng.uniform(0.0, 2.0, (6, 5)))
    w = rng.uniform(0.0, 0.8, (3, 5))
    g = rng.normal(size=(6, 3))
    cache = causal_solve(z, w)
    g_z, g_w = causal_grad(cache, w, g)
    exp_z = np.zeros(z.shape)
    exp_w = np.zeros(w.shape)
    for i in range(6):
        for c in range(3):
            inputs = list(zip(z[i], w[c]))
            dz, dw = spike_time_grad(solve_spike_time(inputs), inputs, g[i, c])
            exp_z[i] += dz
            exp_w[c] += dw
    np.testing.assert_allclose(g_z, exp_z, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(g_w, exp_w, rtol=1e-12, atol=1e-12)

def test_chunked_workers_match_single_thread(monkeypatch):
    rng = np.random.default_rng(9)
    z = np.exp(rng.uniform(0.0, 2.0, (40, 6)))
    w = rng.uniform(0.0, 0.8, (3, 6))
    ref = causal_solve(z, w)
    monkeypatch.setattr(spike_time, 'CHUNK_ELEMENTS', 18)
    spike_time.set_num_workers(4)
    try:
        assert spike_time.get_num_workers() == 4
        par = causal_solve(z, w)
        g = rng.normal(size=(40, 3))
        np.testing.assert_array_equal(par.z_out, ref.z_out)
        np.testing.assert_allclose(causal_grad(par, w, g)[1], causal_grad(ref, w, g)[1], rtol=1e-12)
    finally:
        spike_time.set_num_workers(1)
