# -*- coding: utf-8 -*-
# Filename: demo_mnist.py

"""
Compare the four reference architectures on MNIST.
The IDX files (optionally gzipped) are expected in mnist.
Created on 2026-09-22
"""

import os
from ttfs_snn.dataio.config import parse_config
from ttfs_snn.dataio.datasets import load_dataset
from ttfs_snn.metrics.evaluate import evaluate
from ttfs_snn.train.trainer import Trainer

# globals
mnist_path = os.path.abspath('.//mnist//')
out_path = os.path.abspath('.//demo_saved_data//mnist//')
archs = ['baseline', 'add_skip', 'concat_skip', 'concat_skip_delay']
epochs = 5
train_subset = 10000    # None for the full training set

def test_architectures():
    '''
    train every architecture with the same seed and compare accuracy, latency and energy.
    '''
    train_set, test_set = load_dataset(mnist_path)
    results = []
    for arch in archs:
        train_cfg, model_cfg = parse_config({'train': {'epochs': epochs, 'arch': arch,
                                                       'train_subset': train_subset}},
                                            train_set.sample_shape, 10)
        trainer = Trainer(train_cfg, model_cfg, train_set, test_set)
        trainer.run()
        trainer.results(os.path.join(out_path, arch))
        report = evaluate(trainer.graph, test_set)
        results.append((arch, report.accuracy, report.latency, report.energy_ratio))
    print('%-20s %10s %10s %10s' % ('arch', 'acc (%)', 'latency', 'E_SNN/E_ANN'))
    for arch, acc, latency, ratio in results:
        print('%-20s %10.2f %10.3f %10.4f' % (arch, acc, latency, ratio))

if __name__ == '__main__':
    test_architectures()
