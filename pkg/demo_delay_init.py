# -*- coding: utf-8 -*-
# Filename: demo_delay_init.py

"""
Sweep the initial skip delay of the concat_skip_delay network on the wave
dataset and record how accuracy, latency and the skip/conv timing gap depend on it.
Created on 2026-09-22
"""

import os
import numpy as np
from ttfs_snn.dataio.config import parse_config
from ttfs_snn.metrics.evaluate import branch_mean_gaps, evaluate
from ttfs_snn.report import run_data_plot
from ttfs_snn.report.run_data import RunData
from ttfs_snn.train.trainer import Trainer
from ttfs_snn.wave.wave_sim import WaveConfig, generate_dataset

# globals
out_path = os.path.abspath('.//demo_saved_data//delay_init//')
delay_inits = [0.0, 0.25, 0.5, 0.75, 1.0]
epochs = 10

def test_delay_init():
    '''
    one training run per initial delay, same seed.
    '''
    train_set, test_set, _ = generate_dataset(WaveConfig(zones=3), seed=0, workers=4)
    sweep = RunData('delay_init', 'Initial delay sweep',
                    ['delay_init', 'test_acc', 'latency', 'gap_block1', 'gap_block2'],
                    ['', '%', '', '', ''])
    for theta in delay_inits:
        train_cfg, model_cfg = parse_config({'train': {'epochs': epochs, 'batch_size': 64,
                                                       'delay_init': theta},
                                             'model': {'width': 16}},
                                            train_set.sample_shape, 9)
        trainer = Trainer(train_cfg, model_cfg, train_set, test_set)
        trainer.run()
        trainer.results(os.path.join(out_path, 'theta_%s' % theta))
        report = evaluate(trainer.graph, test_set)
        gaps = branch_mean_gaps(trainer.graph, test_set)
        sweep.add_data([theta, report.accuracy, report.latency, gaps['block1'], gaps['block2']])
    sweep.save_to_file(out_path)
    best = delay_inits[int(np.nanargmax(sweep.column('test_acc')))]
    print('best initial delay: %s' % best)
    run_data_plot.plot(sweep, 'delay_init', ['test_acc', 'latency'])
    run_data_plot.show_plot()

if __name__ == '__main__':
    test_delay_init()
