# -*- coding: utf-8 -*-
# Filename: checkpoint.py

"""
Model checkpoints as uncompressed .npz archives. Keys:
    format_version      int
    model_config        JSON of the ModelConfig
    epoch               int
    param/<name>        float32 parameter arrays
    buffer/<name>       float32 running statistics
    adam/step, adam/m/<name>, adam/v/<name>   optional optimizer state
Created on 2026-09-11
"""

import logging
import numpy as np
from ..engine.graph import build_graph
from ..errors import CheckpointError, VersionError
from ..train.optim import AdamState
from .config import parse_model_config

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

def save_checkpoint(path, graph, epoch=0, optimizer_state=None):
    '''
    Args:
        path: output file, written as given (no .npz suffix is appended).
        graph: Graph to save.
        epoch: number of completed epochs.
        optimizer_state: optional AdamState.
    '''
    arrays = {'format_version': np.array(FORMAT_VERSION),
              'model_config': np.array(graph.config.to_json()),
              'epoch': np.array(epoch)}
    for name, p in graph.params.items():
        arrays['param/' + name] = np.asarray(p, dtype=np.float32)
    for name, b in graph.buffers.items():
        arrays['buffer/' + name] = np.asarray(b, dtype=np.float32)
    if optimizer_state is not None:
        arrays['adam/step'] = np.array(optimizer_state.step)
        for name in optimizer_state.m:
            arrays['adam/m/' + name] = optimizer_state.m[name]
            arrays['adam/v/' + name] = optimizer_state.v[name]
    with open(path, 'wb') as f:
        np.savez(f, **arrays)
    logger.info('checkpoint saved to %s (epoch %s)', path, epoch)

def _fill(store, archive, prefix, path):
    keys = set(k[len(prefix):] for k in archive.files if k.startswith(prefix))
    for name, slot in store.items():
        if name not in keys:
            raise CheckpointError('%s: missing slot %s%s.' % (path, prefix, name))
        value = archive[prefix + name]
        if value.shape != slot.shape:
            raise CheckpointError('%s: slot %s%s has shape %s, expected %s.'\
                                  % (path, prefix, name, value.shape, slot.shape))
        store[name] = value.astype(np.float32)
        keys.discard(name)
    if keys:
        raise CheckpointError('%s: unknown slots %s.' % (path, ', '.join(sorted(prefix + k for k in keys))))

def load_checkpoint(path):
    '''
    Rebuild the graph stored in a checkpoint.
    Returns:
        graph: Graph with the saved parameters and buffers.
        info: dict with epoch and optimizer_state (AdamState or None).
    '''
    try:
        archive = np.load(path, allow_pickle=False)
    except ValueError as e:
        raise CheckpointError('%s is not a checkpoint: %s' % (path, e))
    with archive:
        for key in ('format_version', 'model_config', 'epoch'):
            if key not in archive.files:
                raise CheckpointError('%s: missing slot %s.' % (path, key))
        version = int(archive['format_version'])
        if version != FORMAT_VERSION:
            raise VersionError('%s: format version %s, supported %s.' % (path, version, FORMAT_VERSION))
        config = parse_model_config(str(archive['model_config']))
        graph = build_graph(config)
        _fill(graph.params, archive, 'param/', path)
        _fill(graph.buffers, archive, 'buffer/', path)
        state = None
        if 'adam/step' in archive.files:
            state = AdamState()
            state.step = int(archive['adam/step'])
            for name in graph.params:
                if 'adam/m/' + name in archive.files:
                    state.m[name] = archive['adam/m/' + name]
                    state.v[name] = archive['adam/v/' + name]
        info = {'epoch': int(archive['epoch']), 'optimizer_state': state}
    return graph, info
