# -*- coding: utf-8 -*-
# Filename: demo_wave_localization.py

"""
Generate the 3x3 wave source localization dataset, train a network with
delayed concatenation skips on it and plot the training history.
Created on 2026-09-22
"""

import os
from ttfs_snn.dataio.config import parse_config
from ttfs_snn.metrics.evaluate import evaluate
from ttfs_snn.report import run_data_plot
from ttfs_snn.train.trainer import Trainer
from ttfs_snn.wave.wave_sim import WaveConfig, generate_dataset

# globals
data_path = os.path.abspath('.//demo_saved_data//wave3x3//')
out_path = os.path.abspath('.//demo_saved_data//wave3x3_run//')
zones = 3           # zones per axis
epochs = 20

def test_wave_localization():
    '''
    wave dataset, concat_skip_delay network.
    '''
    #### dataset, 64x64 grid, sources at least 10 points from the edges
    cfg = WaveConfig(zones=zones)
    train_set, test_set, manifest = generate_dataset(cfg, seed=0, out_dir=data_path, workers=4)
    print('%s train / %s test samples, labels %s' % (manifest['n_train'], manifest['n_test'],
                                                     manifest['label_histogram']))

    #### train
    train_cfg, model_cfg = parse_config({'train': {'epochs': epochs, 'batch_size': 64,
                                                   'arch': 'concat_skip_delay'},
                                         'model': {'width': 16}},
                                        train_set.sample_shape, zones * zones)
    trainer = Trainer(train_cfg, model_cfg, train_set, test_set)
    history = trainer.run()
    trainer.results(out_path)

    #### evaluate
    report = evaluate(trainer.graph, test_set)
    print(report.to_json())
    run_data_plot.plot_history(history)
    run_data_plot.show_plot()

if __name__ == '__main__':
    test_wave_localization()
