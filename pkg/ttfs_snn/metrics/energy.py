# -*- coding: utf-8 -*-
# Filename: energy.py

"""
FLOPs per layer and the ANN/SNN energy estimate
    E_ANN = sum_l FLOPs(l) * E_MAC
    E_SNN = sum_l FLOPs(l) * R_s(l) * E_AC
with R_s the early-exit spike rate of layer l.
Created on 2026-09-13
"""

from collections import OrderedDict
import numpy as np
from ..errors import ContractError, DomainError

E_MAC = 4.6     # pJ per multiply-accumulate
E_AC = 0.9      # pJ per accumulate

def node_flops(graph, node):
    '''
    FLOPs of one node. Pooling, split, concat, shuffle, delay, add and padding are 0.
    '''
    if node.kind in ('encoder', 'conv'):
        kernel = graph.params[node.params['kernel' if node.kind == 'encoder' else 'weight']]
        c_out, c_in, k = kernel.shape[0], kernel.shape[1], kernel.shape[2]
        return 2 * k * k * c_in * c_out * node.shape[1] * node.shape[2]
    if node.kind == 'dense':
        f_out, f_in = graph.params[node.params['weight']].shape
        return 2 * f_in * f_out
    return 0

def count_flops(graph):
    '''
    Returns:
        OrderedDict node name -> FLOPs for every node except the input.
    '''
    return OrderedDict((n.name, node_flops(graph, n)) for n in graph.nodes if n.kind != 'input')

def estimate_energy(flops, spike_rates, mac_flops=0.0):
    '''
    Args:
        flops: FLOPs of the spiking layers.
        spike_rates: spike rate in [0, 1] of each of these layers.
        mac_flops: FLOPs of real-valued layers (the encoder), charged at E_MAC in
            both estimates.
    Returns:
        (E_ANN, E_SNN, E_SNN/E_ANN), energies in pJ.
    '''
    f = np.asarray(list(flops), dtype=np.float64)
    r = np.asarray(list(spike_rates), dtype=np.float64)
    if f.shape != r.shape:
        raise ContractError('%s layer FLOPs but %s spike rates.' % (f.shape[0], r.shape[0]))
    if np.any(r < 0.0) or np.any(r > 1.0):
        raise DomainError('spike rates must be in [0, 1].')
    e_ann = E_MAC * (float(np.sum(f)) + mac_flops)
    e_snn = E_AC * float(np.sum(f * r)) + E_MAC * mac_flops
    ratio = e_snn / e_ann if e_ann > 0.0 else 0.0
    return e_ann, e_snn, ratio
