# -*- coding: utf-8 -*-
# Filename: demo_gradcheck.py

"""
Check the analytic gradients of all four reference architectures against
central differences.
Created on 2026-09-22
"""

import numpy as np
from ttfs_snn.engine.graph import build_graph, calibrate_init
from ttfs_snn.engine.grad_check import finite_diff_check
from ttfs_snn.layers.architecture import make_architecture

# globals
shape = (1, 12, 12)
num_classes = 4
archs = ['baseline', 'add_skip', 'concat_skip', 'concat_skip_delay']

def test_gradcheck():
    '''
    random inputs, 200 sampled parameters per network.
    '''
    rng = np.random.default_rng(0)
    images = rng.uniform(0.0, 1.0, size=(4,) + shape)
    labels = rng.integers(0, num_classes, size=4)
    for arch in archs:
        graph = build_graph(make_architecture(arch, shape, num_classes, width=8), seed=0)
        calibrate_init(graph, images)
        report = finite_diff_check(graph, images, labels, eps=1.0e-4, n_params=200)
        print('%-20s checked %3s, kinks %3s, max rel. err %.3g, zero grads %.1f%%'\
              % (arch, report.n_checked, len(report.kinks), report.max_rel_err,
                 100.0 * report.zero_grad_fraction))

if __name__ == '__main__':
    test_gradcheck()
