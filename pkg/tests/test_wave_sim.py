# -*- coding: utf-8 -*-
# Filename: test_wave_sim.py

"""
Finite-difference wave solver, zone labels and dataset generation.
Created on 2026-09-20
"""

import json
import math
import os
import numpy as np
import pytest
from ttfs_snn.dataio.datasets import load_dataset
from ttfs_snn.errors import ConfigError, DomainError
from ttfs_snn.wave.wave_sim import (CFL_MAX, WaveConfig, generate_dataset, interior_sources,
                                    simulate_wave, wave_march, zone_label)

def test_zone_label():
    assert zone_label((10, 10), 64, 3) == 0
    assert zone_label((32, 32), 64, 3) == 4
    assert zone_label((63, 0), 64, 3) == 6
    assert all(zone_label((r, c), 64, 1) == 0 for r in range(0, 64, 7) for c in range(0, 64, 9))
    assert zone_label((5, 30), (10, 40), 2) == 3
    with pytest.raises(DomainError):
        zone_label((64, 0), 64, 3)

def test_cfl_limit():
    assert CFL_MAX == pytest.approx(1.0 / math.sqrt(2.0))
    cfg = WaveConfig(courant=0.8)
    with pytest.raises(ConfigError):
        cfg.check()
    with pytest.raises(ConfigError):
        simulate_wave((32, 32), cfg)
    with pytest.raises(ConfigError):
        WaveConfig(n_x=15, n_y=15, border=8).check()

def test_source_outside_interior():
    with pytest.raises(DomainError):
        simulate_wave((3, 32), WaveConfig())

def test_centered_source_symmetry():
    cfg = WaveConfig(n_x=21, n_y=21, border=2, n_steps=30)
    field = simulate_wave((10, 10), cfg)
    u = field.u
    assert field.step == 30 and field.dt == pytest.approx(cfg.dt)
    np.testing.assert_allclose(u, u[::-1, :], atol=1e-12)
    np.testing.assert_allclose(u, u[:, ::-1], atol=1e-12)
    np.testing.assert_allclose(u, u.T, atol=1e-12)

def test_zero_initial_condition():
    assert np.all(wave_march(np.zeros((12, 12)), 0.5, 40) == 0.0)

def test_dirichlet_boundaries():
    u0 = np.random.default_rng(0).uniform(0.0, 1.0, (2, 16, 16))
    for n in (0, 1, 2, 17):
        u = wave_march(u0, 0.5, n)
        assert np.all(u[:, 0, :] == 0.0) and np.all(u[:, -1, :] == 0.0)
        assert np.all(u[:, :, 0] == 0.0) and np.all(u[:, :, -1] == 0.0)

def test_energy_stays_bounded():
    cfg = WaveConfig(n_x=32, n_y=32, border=4, n_steps=1)
    u0 = simulate_wave((16, 16), cfg.model_copy(update={'n_steps': 1})).u
    e0 = float(np.sum(u0 * u0))
    u = wave_march(u0, 0.5, 200)
    assert np.all(np.isfinite(u))
    assert float(np.sum(u * u)) < 10.0 * e0

def _standing_wave_error(n, courant=0.5, t_end=0.5):
    dx = 1.0 / (n - 1)
    dt = courant * dx
    steps = int(round(t_end / dt))
    x = np.linspace(0.0, 1.0, n)
    u0 = np.outer(np.sin(math.pi * x), np.sin(math.pi * x))
    exact = math.cos(math.sqrt(2.0) * math.pi * steps * dt) * u0
    return float(np.max(np.abs(wave_march(u0, courant, steps) - exact)))

def test_second_order_convergence():
    ratio = _standing_wave_error(21) / _standing_wave_error(41)
    assert 3.0 <= ratio <= 5.0

def test_interior_count():
    assert interior_sources(WaveConfig()).shape == (1936, 2)

def test_generate_dataset(tmp_path):
    cfg = WaveConfig(n_x=16, n_y=16, border=3, n_steps=10, zones=2)
    train, test, manifest = generate_dataset(cfg, seed=4, out_dir=str(tmp_path), workers=2)
    assert manifest['n_samples'] == 100
    assert (len(train), len(test)) == (80, 20)
    assert train.sample_shape == (1, 16, 16)
    assert min(train.images.min(), test.images.min()) == 0.0
    assert max(train.images.max(), test.images.max()) == 1.0
    labels = np.concatenate([train.labels, test.labels])
    assert sorted(set(labels.tolist())) == [0, 1, 2, 3]
    assert np.bincount(labels, minlength=4).tolist() == manifest['label_histogram']
    for name in ('train.ttfsds', 'test.ttfsds', 'manifest.json'):
        assert os.path.isfile(os.path.join(str(tmp_path), name))
    with open(os.path.join(str(tmp_path), 'manifest.json')) as f:
        assert json.load(f)['seed'] == 4
    train2, test2 = load_dataset(str(tmp_path))
    np.testing.assert_array_equal(train2.images, train.images)
    np.testing.assert_array_equal(test2.labels, test.labels)

def test_split_is_a_partition():
    cfg = WaveConfig(n_x=14, n_y=14, border=3, n_steps=5, zones=2)
    train, test, _ = generate_dataset(cfg, seed=0)
    full, _, _ = generate_dataset(cfg.model_copy(update={'zones': 1}), seed=0)
    rows = [img.tobytes() for img in np.concatenate([train.images, test.images])]
    assert len(set(rows)) == len(rows) == 64
    assert set(img.tobytes() for img in train.images).isdisjoint(img.tobytes() for img in test.images)
    assert len(full) == len(train)

def test_same_seed_same_split():
    cfg = WaveConfig(n_x=14, n_y=14, border=3, n_steps=5, zones=2)
    a = generate_dataset(cfg, seed=7)[1]
    b = generate_dataset(cfg, seed=7, workers=3)[1]
    c = generate_dataset(cfg, seed=8)[1]
    np.testing.assert_array_equal(a.images, b.images)
    np.testing.assert_array_equal(a.labels, b.labels)
    assert not np.array_equal(a.images, c.images)

def test_full_size_split():
    cfg = WaveConfig(n_steps=1)
    train, test, manifest = generate_dataset(cfg, seed=0)
    assert manifest['n_samples'] == 1936
    assert (len(train), len(test)) == (1549, 387)
    assert all(c > 0 for c in manifest['label_histogram'])
