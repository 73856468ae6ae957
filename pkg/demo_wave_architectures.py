# -*- coding: utf-8 -*-
# Filename: demo_wave_architectures.py

"""
Train the four reference architectures on the 3x3 wave task with three seeds
and compare their output latency and the timing gap between the conv and skip
branches of the concatenation blocks.
Created on 2026-10-19
"""

import os
import numpy as np
from ttfs_snn.dataio.config import parse_config
from ttfs_snn.metrics.evaluate import branch_mean_gaps, evaluate
from ttfs_snn.report.run_data import RunData
from ttfs_snn.train.trainer import Trainer
from ttfs_snn.wave.wave_sim import WaveConfig, generate_dataset

# globals
out_path = os.path.abspath('.//demo_saved_data//wave3x3_archs//')
zones = 3
seeds = [0, 1, 2]
epochs = 20
archs = ['baseline', 'add_skip', 'concat_skip', 'concat_skip_delay']

def run_arch(arch, seed, train_set, test_set):
    '''
    Train one architecture with one seed.
    Returns:
        (RunReport of the test set, OrderedDict of branch mean gaps)
    '''
    train_cfg, model_cfg = parse_config({'train': {'epochs': epochs, 'batch_size': 64,
                                                   'arch': arch, 'seed': seed},
                                         'model': {'width': 16}},
                                        train_set.sample_shape, zones * zones)
    trainer = Trainer(train_cfg, model_cfg, train_set, test_set)
    trainer.run()
    report = evaluate(trainer.graph, test_set)
    gaps = branch_mean_gaps(trainer.graph, test_set) if trainer.graph.branch_taps else {}
    return report, gaps

def test_wave_architectures():
    '''
    3 seeds x 4 architectures on the same 3x3 wave dataset.
    '''
    #### dataset
    train_set, test_set, _ = generate_dataset(WaveConfig(zones=zones), seed=0, workers=4)

    #### train every architecture with every seed
    results = RunData('architectures', 'Accuracy and latency per seed',
                      ['seed', 'arch', 'accuracy', 'latency', 'energy_ratio'],
                      ['', '', '%', '', ''], plottable=False)
    gaps = RunData('branch_gaps', 'Mean gap between skip and conv branch spike times',
                   ['seed', 'block', 'concat_skip', 'concat_skip_delay'], plottable=False)
    latency = {}
    for seed in seeds:
        block_gaps = {}
        for arch in archs:
            report, block_gaps[arch] = run_arch(arch, seed, train_set, test_set)
            latency[(seed, arch)] = report.latency
            results.add_data([seed, arch, report.accuracy, report.latency, report.energy_ratio])
            print('seed %s %-18s acc %6.2f%% latency %.3f'\
                  % (seed, arch, report.accuracy, report.latency))
        for block in block_gaps['concat_skip']:
            gaps.add_data([seed, block, block_gaps['concat_skip'][block],
                           block_gaps['concat_skip_delay'][block]])
    if not os.path.isdir(out_path):
        os.makedirs(out_path)
    results.save_to_file(out_path)
    gaps.save_to_file(out_path)

    #### latency ordering: concatenation < baseline < addition
    n_ordered = 0
    for seed in seeds:
        lat = dict((a, latency[(seed, a)]) for a in archs)
        ordered = max(lat['concat_skip'], lat['concat_skip_delay']) < lat['baseline'] < lat['add_skip']
        n_ordered += int(ordered)
        print('seed %s: latency ordering %s' % (seed, 'holds' if ordered else 'violated'))
    print('latency ordering holds for %s of %s seeds' % (n_ordered, len(seeds)))

    #### delays pull the branches together: gap without delay > gap with delay
    table = gaps.rows
    for block in sorted(set(r[1] for r in table)):
        wins = sum(1 for r in table if r[1] == block and np.nan_to_num(r[2]) > np.nan_to_num(r[3]))
        print('%s: skip/conv gap larger without delay for %s of %s seeds' % (block, wins, len(seeds)))

if __name__ == '__main__':
    test_wave_architectures()
