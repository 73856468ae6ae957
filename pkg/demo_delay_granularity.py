# -*- coding: utf-8 -*-
# Filename: demo_delay_granularity.py

"""
Train concat_skip_delay with one delay per layer, per channel and per pixel and
export the spike timing histograms of every run.
Created on 2026-09-22
"""

import os
from ttfs_snn.dataio.config import parse_config
from ttfs_snn.metrics.evaluate import evaluate, export_timing_histograms
from ttfs_snn.report import run_data_plot
from ttfs_snn.train.trainer import Trainer
from ttfs_snn.wave.wave_sim import WaveConfig, generate_dataset

# globals
out_path = os.path.abspath('.//demo_saved_data//delay_granularity//')
granularities = ['layer', 'channel', 'pixel']
epochs = 10

def test_delay_granularity():
    '''
    one training run per delay granularity.
    '''
    train_set, test_set, _ = generate_dataset(WaveConfig(zones=3), seed=0, workers=4)
    for granularity in granularities:
        train_cfg, model_cfg = parse_config({'train': {'epochs': epochs, 'batch_size': 64,
                                                       'delay_granularity': granularity},
                                             'model': {'width': 16}},
                                            train_set.sample_shape, 9)
        trainer = Trainer(train_cfg, model_cfg, train_set, test_set)
        trainer.run()
        run_dir = os.path.join(out_path, granularity)
        trainer.results(run_dir)
        report = evaluate(trainer.graph, test_set)
        print('%-8s %s delays, acc %.2f%%, latency %.3f' % (granularity,
              sum(trainer.graph.params[n].size for _, n in trainer.graph.delay_params()),
              report.accuracy, report.latency))
        hist, _ = export_timing_histograms(trainer.graph, test_set, 50, os.path.join(run_dir, 'hist'))
    # branches of the last run
    run_data_plot.plot_histograms(hist)
    run_data_plot.show_plot()

if __name__ == '__main__':
    test_delay_granularity()
