# -*- coding: utf-8 -*-
# Filename: test_training.py

"""
Loss terms, Adam, the learning rate schedule and the training loop.
Created on 2026-09-19
"""

import math
import os
import numpy as np
import pytest
from ttfs_snn.dataio.config import TrainConfig
from ttfs_snn.dataio.datasets import Dataset
from ttfs_snn.engine.graph import backward, build_graph, forward
from ttfs_snn.errors import ConfigError, DomainError
from ttfs_snn.layers.architecture import DenseSpec, EncoderSpec, ModelConfig, make_architecture
from ttfs_snn.temporal.spike_time import T_MAX
from ttfs_snn.train.loss import loss_ce, loss_overlap, loss_weight, network_loss, total_loss
from ttfs_snn.train.optim import AdamState, adam_step, clip_grad_norm, cosine_lr
from ttfs_snn.train.trainer import HISTORY_LEGEND, Trainer, train
from ttfs_snn.wave.wave_sim import WaveConfig, generate_dataset

def test_loss_ce_values():
    loss, _ = loss_ce(np.array([0.5, 1.0]), 0)
    assert loss == pytest.approx(0.4741, abs=1e-4)
    loss, _ = loss_ce(np.full((5,), 1.3), 2)
    assert loss == pytest.approx(math.log(5.0))
    loss, _ = loss_ce(np.array([0.0, 50.0]), 0)
    assert loss == pytest.approx(math.log(1.0 + math.exp(-T_MAX)))

def test_loss_ce_shift_invariance():
    o = np.array([[0.4, 1.1, 2.0], [1.5, 0.2, 0.9]])
    y = np.array([2, 1])
    a, ga = loss_ce(o, y)
    b, gb = loss_ce(o + 0.7, y)
    assert a == pytest.approx(b)
    np.testing.assert_allclose(ga, gb)

def test_loss_ce_sentinel():
    loss, grad = loss_ce(np.array([0.5, np.inf]), 0)
    assert loss == pytest.approx(math.log(1.0 + math.exp(-(T_MAX - 0.5))))
    assert grad[1] == 0.0

def test_loss_ce_gradient():
    rng = np.random.default_rng(0)
    o = rng.uniform(0.0, 3.0, (4, 5))
    y = rng.integers(0, 5, 4)
    _, grad = loss_ce(o, y)
    eps = 1.0e-6
    for idx in [(0, 0), (1, 3), (3, 4)]:
        op, om = o.copy(), o.copy()
        op[idx] += eps
        om[idx] -= eps
        numeric = (loss_ce(op, y)[0] - loss_ce(om, y)[0]) / (2 * eps)
        assert grad[idx] == pytest.approx(numeric, rel=1e-5, abs=1e-9)

def test_loss_ce_prediction_and_range():
    o = np.array([[0.9, 0.3, 1.2]])
    s = np.exp(-o) / np.sum(np.exp(-o))
    assert np.argmin(o, axis=1)[0] == np.argmax(s, axis=1)[0]
    with pytest.raises(DomainError):
        loss_ce(o, 3)

def test_loss_weight():
    value, grads = loss_weight({'a': np.array([[0.1, 0.3]])})
    assert value == pytest.approx(0.6)
    assert grads['a'].tolist() == [[-1.0, -1.0]]
    value, grads = loss_weight({'a': np.array([[0.2, 0.3], [0.6, 0.6]])})
    assert value == pytest.approx(0.5)
    assert grads['a'].tolist() == [[-1.0, -1.0], [0.0, 0.0]]
    value, _ = loss_weight({'a': np.ones((3, 2, 1, 1))})
    assert value == 0.0

def test_loss_overlap():
    f = np.array([[1.0, 1.0]])
    value, _, empty = loss_overlap([(f, f.copy())])
    assert value == 0.0 and empty == [False]
    value, grads, _ = loss_overlap([(f, np.array([[1.5, 1.5, np.inf]]))])
    assert value == pytest.approx(0.25)
    assert grads[0][1][0, 2] == 0.0
    value, _, _ = loss_overlap([(np.array([0.5]), np.array([1.0])), (np.array([2.0]), np.array([1.8]))])
    assert value == pytest.approx(0.29)
    value, grads, empty = loss_overlap([(np.array([np.inf]), np.array([1.0]))])
    assert value == 0.0 and empty == [True]
    assert np.all(grads[0][1] == 0.0)

def test_total_loss():
    b = total_loss(0.5, 0.6, 0.25)
    assert b.total == pytest.approx(1.10000025, abs=1e-12)
    assert total_loss(0.5, 0.6, 0.25, lambda2=0.0).total == pytest.approx(1.1)
    assert set(b.as_dict()) == set(['loss_total', 'loss_ce', 'loss_weight', 'loss_overlap'])

def test_baseline_has_no_overlap():
    graph = build_graph(make_architecture('baseline', (1, 8, 8), num_classes=3, width=4))
    images = np.random.default_rng(0).uniform(0.0, 1.0, (2, 1, 8, 8))
    acts, _ = forward(graph, images)
    breakdown, _, _ = network_loss(graph, acts, np.array([0, 2]))
    assert breakdown.overlap == 0.0

def test_adam_zero_gradient():
    params = {'w': np.array([0.3, -0.2])}
    adam_step(params, {'w': np.zeros((2,))}, AdamState(params), lr=0.1)
    np.testing.assert_array_equal(params['w'], [0.3, -0.2])

def test_adam_first_step():
    g = np.array([0.5, -2.0])
    params = {'w': np.array([1.0, 1.0])}
    state = AdamState(params)
    adam_step(params, {'w': g}, state, lr=0.01)
    np.testing.assert_allclose(state.m['w'], 0.1 * g)
    np.testing.assert_allclose(state.v['w'], 0.001 * g * g)
    np.testing.assert_allclose(params['w'], 1.0 - 0.01 * np.sign(g), atol=1e-8)
    assert state.step == 1

def test_adam_decay_and_projection():
    params = {'theta': np.array([0.1]), 'w': np.array([2.0]), 'b': np.array([2.0])}
    grads = {'theta': np.array([1.0]), 'w': np.zeros((1,)), 'b': np.zeros((1,))}
    adam_step(params, grads, AdamState(params), lr=0.15, weight_decay=0.1,
              decay=set(['w']), nonneg=set(['theta']))
    assert params['theta'][0] == 0.0
    assert params['w'][0] == pytest.approx(2.0 - 0.15 * 0.1 * 2.0)
    assert params['b'][0] == 2.0

def test_adam_float32_in_place():
    w = np.array([1.0, 2.0], dtype=np.float32)
    params = {'w': w}
    adam_step(params, {'w': np.array([1.0, 1.0])}, AdamState(params), lr=0.5)
    assert params['w'] is w and w.dtype == np.float32
    np.testing.assert_allclose(w, [0.5, 1.5], atol=1e-6)

def test_cosine_lr():
    assert cosine_lr(0, 100, 6e-4) == pytest.approx(6e-4)
    assert cosine_lr(50, 100, 6e-4) == pytest.approx(3e-4)
    last = cosine_lr(99, 100, 6e-4)
    assert 0.0 < last < 1e-6
    with pytest.raises(DomainError):
        cosine_lr(100, 100, 6e-4)
    with pytest.raises(DomainError):
        cosine_lr(-1, 100, 6e-4)

def test_clip_grad_norm():
    grads = {'a': np.array([3.0]), 'b': np.array([4.0])}
    assert clip_grad_norm(grads, 1.0) == pytest.approx(5.0)
    assert grads['a'][0] == pytest.approx(0.6) and grads['b'][0] == pytest.approx(0.8)
    grads = {'a': np.array([0.3])}
    clip_grad_norm(grads, 1.0)
    assert grads['a'][0] == 0.3

def test_dead_network_recovers():
    cfg = ModelConfig(input_shape=(1, 4, 4), num_classes=3,
                      layers=[EncoderSpec(out_channels=2), DenseSpec(out_features=3)])
    graph = build_graph(cfg)
    graph.params['fc.weight'][...] = 0.001
    images = np.ones((4, 1, 4, 4))
    labels = np.array([0, 1, 2, 0])
    acts, _ = forward(graph, images)
    assert np.all(np.isinf(acts[-1]))
    state = AdamState(graph.params)
    for _ in range(50):
        acts, tape = forward(graph, images, training=True)
        _, loss_grads, param_grads = network_loss(graph, acts, labels, lambda1=1.0)
        adam_step(graph.params, backward(graph, tape, loss_grads, param_grads), state, lr=0.01)
    acts, _ = forward(graph, images)
    assert np.mean(np.isfinite(acts[-1])) > 0.0

def _data(n=24, seed=0):
    rng = np.random.default_rng(seed)
    return Dataset(rng.uniform(0.0, 1.0, (n, 1, 8, 8)), rng.integers(0, 3, n), 'random')

def _trainer(seed=0, epochs=1):
    cfg = TrainConfig(epochs=epochs, batch_size=8, seed=seed)
    model = make_architecture('concat_skip_delay', (1, 8, 8), num_classes=3, width=4)
    return Trainer(cfg, model, _data(), _data(8, 1))

def test_trainer_one_epoch(tmp_path):
    trainer = _trainer()
    history = trainer.run()
    assert len(history) == 1
    assert history.legend[:len(HISTORY_LEGEND)] == HISTORY_LEGEND
    assert history.legend[-2:] == ['delay_block1', 'delay_block2']
    row = dict(zip(history.legend, history.rows[0]))
    assert row['epoch'] == 1
    for key in ('loss_total', 'loss_ce', 'loss_weight', 'loss_overlap'):
        assert np.isfinite(row[key])
    assert row['delay_block1'] >= 0.0
    files = trainer.results(str(tmp_path))
    assert [os.path.basename(f) for f in files] == ['checkpoint.npz', 'history.csv']
    assert os.path.isfile(os.path.join(str(tmp_path), 'summary.txt'))

def test_trainer_is_deterministic():
    a = _trainer(seed=3).run()
    b = _trainer(seed=3).run()
    np.testing.assert_array_equal(a.to_array(), b.to_array())

def test_trainer_rejects_mismatched_data():
    cfg = TrainConfig(epochs=1)
    model = make_architecture('baseline', (1, 12, 12), num_classes=3, width=4)
    with pytest.raises(ConfigError):
        Trainer(cfg, model, _data())
    model = make_architecture('baseline', (1, 8, 8), num_classes=2, width=4)
    with pytest.raises(ConfigError):
        Trainer(cfg, model, _data())

def test_train_function():
    graph, history = train(TrainConfig(epochs=2, batch_size=12),
                           make_architecture('add_skip', (1, 8, 8), num_classes=3, width=4), _data())
    assert len(history) == 2
    assert history.column('lr')[1] < history.column('lr')[0]
    assert graph.config.arch == 'add_skip'

def test_fresh_trainer_fires():
    rng = np.random.default_rng(5)
    data = Dataset(rng.uniform(0.0, 1.0, (16, 1, 28, 28)), rng.integers(0, 10, 16), 'random')
    cfg = TrainConfig(epochs=1, calibration_samples=16)
    trainer = Trainer(cfg, make_architecture('concat_skip_delay', (1, 28, 28)), data)
    acts, _ = forward(trainer.graph, data.images, training=True, update_stats=False)
    out = acts[trainer.graph.output_id]
    assert np.all(np.any(out < T_MAX, axis=1))

@pytest.fixture(scope='module')
def wave_data():
    train_set, test_set, _ = generate_dataset(WaveConfig(n_x=16, n_y=16, zones=2, border=3,
                                                         n_steps=8), seed=0)
    return train_set, test_set

@pytest.mark.parametrize('kind', ['baseline', 'add_skip', 'concat_skip', 'concat_skip_delay'])
def test_training_reduces_loss(kind, wave_data):
    train_set, test_set = wave_data
    cfg = TrainConfig(epochs=5, batch_size=16, lr0=5.0e-3, arch=kind)
    model = make_architecture(kind, tuple(train_set.sample_shape), num_classes=4, width=4)
    history = Trainer(cfg, model, train_set, test_set).run()
    loss = history.column('loss_total')
    assert np.all(np.isfinite(loss))
    assert loss[-1] < loss[0]
    assert np.isfinite(history.column('latency')[-1])
