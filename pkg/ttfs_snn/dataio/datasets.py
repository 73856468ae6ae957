# -*- coding: utf-8 -*-
# Filename: datasets.py

"""
In-memory datasets and loaders for the two on-disk layouts:
    wave datasets   DIR/train.ttfsds, DIR/test.ttfsds (+ manifest.json)
    IDX datasets    DIR/train-images-idx3-ubyte[.gz], DIR/train-labels-idx1-ubyte[.gz],
                    DIR/t10k-images-idx3-ubyte[.gz], DIR/t10k-labels-idx1-ubyte[.gz]
Created on 2026-09-11
"""

import os
import numpy as np
from . import container, idx

class Dataset(object):
    '''
    Images (N, C, H, W) float32 and labels (N,) int64.
    '''
    def __init__(self, images, labels, name=''):
        images = np.asarray(images, dtype=np.float32)
        if images.ndim == 3:
            images = images[:, np.newaxis, :, :]
        labels = np.asarray(labels, dtype=np.int64)
        if images.ndim != 4 or labels.shape != (images.shape[0],):
            raise ValueError('images %s and labels %s do not match.' % (images.shape, labels.shape))
        self.images = images
        self.labels = labels
        self.name = name

    def __len__(self):
        return self.images.shape[0]

    @property
    def sample_shape(self):
        return self.images.shape[1:]

    @property
    def num_classes(self):
        return int(self.labels.max()) + 1 if len(self) else 0

    def subset(self, n, seed=0):
        '''
        Random subset of n samples, the whole dataset if n >= len(self).
        '''
        if n is None or n >= len(self):
            return self
        sel = np.sort(np.random.default_rng(seed).permutation(len(self))[:n])
        return Dataset(self.images[sel], self.labels[sel], self.name)

    def batches(self, batch_size, rng=None):
        '''
        Iterate over (images, labels) batches, shuffled if rng is given.
        '''
        order = np.arange(len(self)) if rng is None else rng.permutation(len(self))
        for i in range(0, len(self), batch_size):
            sel = order[i:i + batch_size]
            yield self.images[sel], self.labels[sel]

def _find(data_dir, base):
    for name in (base, base + '.gz'):
        path = os.path.join(data_dir, name)
        if os.path.isfile(path):
            return path
    return None

def load_dataset(data_dir):
    '''
    Load the train and test split stored in data_dir.
    Returns:
        (train Dataset, test Dataset)
    '''
    train_file = os.path.join(data_dir, 'train.ttfsds')
    if os.path.isfile(train_file):
        train = container.read_dataset(train_file)
        test = container.read_dataset(os.path.join(data_dir, 'test.ttfsds'))
        name = os.path.basename(os.path.normpath(data_dir))
        return Dataset(train[0], train[1], name), Dataset(test[0], test[1], name)
    files = [_find(data_dir, b) for b in ('train-images-idx3-ubyte', 'train-labels-idx1-ubyte',
                                          't10k-images-idx3-ubyte', 't10k-labels-idx1-ubyte')]
    if any(f is None for f in files):
        raise IOError('no dataset found in %s: expected train.ttfsds or IDX files.' % data_dir)
    name = os.path.basename(os.path.normpath(data_dir))
    train = idx.read_idx(files[0], files[1])
    test = idx.read_idx(files[2], files[3])
    return Dataset(train[0], train[1], name), Dataset(test[0], test[1], name)
