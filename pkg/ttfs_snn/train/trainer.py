# -*- coding: utf-8 -*-
# Filename: trainer.py

"""
Training loop: mini-batch Adam on the total loss, cosine learning rate per epoch,
evaluation on the test set after every epoch, checkpoint and history output.
Created on 2026-09-14
"""

import logging
import os
import numpy as np
from ..dataio.checkpoint import save_checkpoint
from ..engine.graph import backward, build_graph, calibrate_init, forward
from ..errors import ConfigError, NumericError
from ..metrics.evaluate import latency_of, predict
from ..report.run_data import RunData
from .loss import network_loss
from .optim import DECAY_ROLES, NONNEG_ROLES, AdamState, adam_step, clip_grad_norm, cosine_lr

logger = logging.getLogger(__name__)

HISTORY_LEGEND = ['epoch', 'lr', 'loss_total', 'loss_ce', 'loss_weight', 'loss_overlap',
                  'train_acc', 'test_acc', 'latency']
HISTORY_UNITS = ['', '', '', '', '', '', '%', '%', '']

class Trainer(object):
    '''
    Train one network on one dataset.
    '''
    def __init__(self, config, model_config, train_set, test_set=None, graph=None):
        '''
        Args:
            config: TrainConfig.
            model_config: ModelConfig of the network, ignored if graph is given.
            train_set: Dataset.
            test_set: Dataset evaluated after every epoch, optional.
            graph: continue training an existing graph instead of building a new one.
        '''
        self.config = config
        self.train_set = train_set.subset(config.train_subset, seed=config.seed)
        self.graph = graph if graph is not None else build_graph(model_config, seed=config.seed)
        self.test_set = test_set
        self.__check_data(self.train_set)
        if test_set is not None:
            self.__check_data(test_set)
        n_cal = min(config.calibration_samples, len(self.train_set))
        if graph is None and n_cal > 0:
            calibrate_init(self.graph, self.train_set.images[:n_cal], training=True)
        roles = self.graph.param_roles
        self.decay = set(n for n in roles if roles[n] in DECAY_ROLES)
        self.nonneg = set(n for n in roles if roles[n] in NONNEG_ROLES)
        self.delays = self.graph.delay_params()
        self.state = AdamState(self.graph.params)
        legend = HISTORY_LEGEND + ['delay_' + block for block, _ in self.delays]
        units = HISTORY_UNITS + [''] * len(self.delays)
        self.history = RunData('history', 'Training history', legend, units)
        self.epochs_done = 0
        self.train_complete = False
        seeds = np.random.SeedSequence(config.seed).spawn(1)
        self.rng = np.random.default_rng(seeds[0])
        # summary
        self.sum = ''

    def __check_data(self, dataset):
        shape = tuple(self.graph.input_shape)
        if tuple(dataset.sample_shape) != shape:
            raise ConfigError('dataset %s has samples of shape %s, the model expects %s.'\
                              % (dataset.name, tuple(dataset.sample_shape), shape))
        n_classes = self.graph.nodes[-1].shape[0]
        if len(dataset) and (dataset.labels.min() < 0 or dataset.labels.max() >= n_classes):
            raise ConfigError('dataset %s has labels outside [0, %s).' % (dataset.name, n_classes))

    def step(self, images, labels, lr):
        '''
        One optimizer step on a batch.
        Returns:
            LossBreakdown of the batch and the predicted classes.
        '''
        c = self.config
        acts, tape = forward(self.graph, images, training=True, labels=labels)
        breakdown, loss_grads, param_grads = network_loss(self.graph, acts, labels,
                                                          c.lambda1, c.lambda2)
        if not np.isfinite(breakdown.total):
            raise NumericError('non-finite loss %s.' % breakdown.total)
        grads = backward(self.graph, tape, loss_grads, param_grads)
        clip_grad_norm(grads, c.clip_norm)
        adam_step(self.graph.params, grads, self.state, lr, c.weight_decay,
                  decay=self.decay, nonneg=self.nonneg)
        return breakdown, np.argmin(acts[-1], axis=1)

    def train_epoch(self, epoch):
        '''
        Run one epoch and append its history row.
        Args:
            epoch: 0-based epoch index.
        Returns:
            the history row.
        '''
        c = self.config
        lr = cosine_lr(epoch, c.epochs, c.lr0)
        totals = np.zeros((4,))
        correct = 0
        n = 0
        empty = set()
        for images, labels in self.train_set.batches(c.batch_size, self.rng):
            breakdown, pred = self.step(images, labels, lr)
            empty.update(breakdown.empty_branches)
            b = labels.shape[0]
            totals += b * np.array([breakdown.total, breakdown.ce,
                                    breakdown.weight_penalty, breakdown.overlap])
            correct += int(np.sum(pred == labels))
            n += b
        totals /= max(n, 1)
        if empty:
            logger.warning('epoch %s: no spike on a branch of %s, overlap loss skipped for it.',
                           epoch + 1, ', '.join(sorted(empty)))
        train_acc = 100.0 * correct / max(n, 1)
        test_acc, latency = float('nan'), float('nan')
        if self.test_set is not None and len(self.test_set):
            pred, outputs = predict(self.graph, self.test_set, c.eval_batch_size)
            test_acc = 100.0 * float(np.mean(pred == self.test_set.labels))
            latency = latency_of(outputs)[0]
        row = [epoch + 1, lr] + totals.tolist() + [train_acc, test_acc, latency]
        row += [float(np.mean(self.graph.params[name])) for _, name in self.delays]
        self.history.add_data(row)
        logger.info('epoch %s/%s lr %.3g loss %.4f (ce %.4f) train %.2f%% test %.2f%% latency %.3f',
                    epoch + 1, c.epochs, lr, totals[0], totals[1], train_acc, test_acc, latency)
        return row

    def run(self):
        '''
        Train for the remaining epochs of the configuration.
        Returns:
            history RunData.
        '''
        for epoch in range(self.epochs_done, self.config.epochs):
            self.train_epoch(epoch)
            self.epochs_done = epoch + 1
        self.train_complete = True
        return self.history

    def results(self, data_dir=None):
        '''
        Save checkpoint.npz, history.csv and summary.txt to data_dir.
        Returns:
            list of saved files.
        '''
        if not self.train_complete:
            logger.warning('Call Trainer.run() to train the model first.')
            return None
        data_saved = []
        if data_dir is not None:
            data_dir = self.__check_data_dir(data_dir)
            ckpt = os.path.join(data_dir, 'checkpoint.npz')
            save_checkpoint(ckpt, self.graph, self.epochs_done, self.state)
            data_saved.append(ckpt)
            data_saved.append(self.history.save_to_file(data_dir))
        self.__summary(data_dir, data_saved)
        return data_saved

    def __summary(self, data_dir, data_saved):
        '''
        Summary of the training run.
        '''
        c = self.config
        self.sum += '\n------------------------------------------------------------\n'
        self.sum += 'Architecture: ' + self.graph.config.arch + '\n'
        self.sum += 'Trainable layers: ' + ', '.join(self.graph.trainable_layers()) + '\n'
        self.sum += 'Parameters: ' + str(self.graph.num_parameters()) + '\n'
        self.sum += 'Training samples: ' + str(len(self.train_set)) + '\n'
        if self.test_set is not None:
            self.sum += 'Test samples: ' + str(len(self.test_set)) + '\n'
        self.sum += 'Epochs: ' + str(self.epochs_done) + ', batch size: ' + str(c.batch_size) +\
                    ', lr0: ' + str(c.lr0) + ', seed: ' + str(c.seed) + '\n'
        if len(self.history):
            last = dict(zip(self.history.legend, self.history.rows[-1]))
            self.sum += '\n------------------------------------------------------------\n'
            self.sum += 'Final epoch:\n'
            for key in HISTORY_LEGEND[2:]:
                self.sum += '\t--' + key + ': ' + str(last[key]) + '\n'
            for block, _ in self.delays:
                self.sum += '\t--mean delay of ' + block + ': ' + str(last['delay_' + block]) + '\n'
        if data_dir is not None:
            self.sum += '\n------------------------------------------------------------\n'
            self.sum += 'Training results are saved to ' + data_dir + '\n'
            self.sum += 'The following results are saved:\n'
            for i in data_saved:
                self.sum += '\t' + os.path.basename(i) + '\n'
        logger.info(self.sum)
        if data_dir is not None:
            try:
                with open(os.path.join(data_dir, 'summary.txt'), 'w') as file_summary:
                    file_summary.write(self.sum + '\n')
            except OSError:
                raise IOError('Unable to save summary to %s.' % data_dir)

    def __check_data_dir(self, data_dir):
        '''
        Create data_dir if it does not exist.
        '''
        data_dir = os.path.abspath(data_dir)
        if not os.path.exists(data_dir):
            try:
                os.makedirs(data_dir)
            except OSError:
                raise IOError('Cannot create dir: %s.' % data_dir)
        return data_dir

def train(config, model_config, train_set, test_set=None, out_dir=None):
    '''
    Train a network and optionally save its checkpoint, history and summary.
    Returns:
        (graph, history RunData)
    '''
    trainer = Trainer(config, model_config, train_set, test_set)
    history = trainer.run()
    trainer.results(out_dir)
    return trainer.graph, history
