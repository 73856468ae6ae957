# -*- coding: utf-8 -*-
# Filename: evaluate.py

"""
Evaluation of a trained network: accuracy, latency, early-exit spike rates,
energy, spike timing histograms and the skip/conv branch timing gaps.
All passes run the graph in eval mode.
Created on 2026-09-13
"""

import json
import logging
import os
from collections import OrderedDict
import numpy as np
from ..engine.graph import forward
from ..report.run_data import RunData
from ..temporal.spike_time import T_MAX
from . import energy

logger = logging.getLogger(__name__)

HIST_LEGEND = ['layer', 'branch', 'bin_left', 'bin_right', 'count', 'sentinel_count']

class RunReport(object):
    '''
    Evaluation results of one model on one dataset.
    '''
    def __init__(self):
        self.n_samples = 0
        self.accuracy = 0.0             # percent
        self.latency = float('nan')     # mean first output spike time of firing samples
        self.silent_samples = 0         # samples without any output spike
        self.spike_rates = OrderedDict()    # layer -> percent
        self.flops = OrderedDict()          # layer -> FLOPs
        self.e_ann = 0.0                # pJ
        self.e_snn = 0.0                # pJ
        self.energy_ratio = 0.0

    @property
    def silent_fraction(self):
        return self.silent_samples / self.n_samples if self.n_samples else 0.0

    def to_dict(self):
        return OrderedDict([('n_samples', self.n_samples),
                            ('accuracy', self.accuracy),
                            ('latency', self.latency),
                            ('silent_samples', self.silent_samples),
                            ('silent_fraction', self.silent_fraction),
                            ('spike_rate', self.spike_rates),
                            ('flops', self.flops),
                            ('E_ANN', self.e_ann),
                            ('E_SNN', self.e_snn),
                            ('energy_ratio', self.energy_ratio)])

    def to_json(self):
        d = self.to_dict()
        if not np.isfinite(d['latency']):
            d['latency'] = None
        return json.dumps(d)

def _images(data):
    return data.images if hasattr(data, 'images') else np.asarray(data)

def _scan(graph, images, batch_size, fn):
    '''
    Run the graph over images in batches and call fn(start, activations) per batch.
    '''
    for start in range(0, images.shape[0], batch_size):
        acts, _ = forward(graph, images[start:start + batch_size], training=False)
        fn(start, acts)

def first_spike_times(outputs):
    '''
    Per-sample earliest output spike, +inf for silent samples.
    '''
    return np.min(np.asarray(outputs, dtype=np.float64), axis=1)

def latency_of(outputs):
    '''
    Returns:
        mean first output spike time over firing samples (nan if none fires),
        number of silent samples.
    '''
    t = first_spike_times(outputs)
    fires = np.isfinite(t)
    latency = float(np.mean(t[fires])) if np.any(fires) else float('nan')
    return latency, int(np.sum(~fires))

def predict(graph, data, batch_size=256):
    '''
    Returns:
        predicted classes (argmin of the output spike times) and the outputs.
    '''
    images = _images(data)
    outputs = np.zeros((images.shape[0], graph.nodes[-1].shape[0]))

    def collect(start, acts):
        outputs[start:start + acts[-1].shape[0]] = acts[-1]
    _scan(graph, images, batch_size, collect)
    return np.argmin(outputs, axis=1), outputs

def measure_latency(graph, data, batch_size=256):
    '''
    Mean time of the first output spike over the samples that produce one.
    '''
    latency, silent = latency_of(predict(graph, data, batch_size)[1])
    if silent:
        logger.warning('%s samples without an output spike excluded from latency.', silent)
    return latency

def _rate_counter(graph, sums):
    '''
    Per batch accumulation of early-exit fired fractions for every temporal layer.
    '''
    def count(start, acts):
        t_exit = first_spike_times(acts[-1])
        for nid in graph.temporal_nodes:
            t = acts[nid].reshape((acts[nid].shape[0], -1))
            fired = np.sum(t < t_exit[:, np.newaxis], axis=1) / t.shape[1]
            sums[graph.nodes[nid].name] += float(np.sum(fired))
    return count

def measure_spike_rates(graph, data, batch_size=256):
    '''
    A neuron counts as fired iff its spike time is strictly earlier than the first
    output spike of its sample.
    Returns:
        OrderedDict temporal layer name -> spike rate in percent.
    '''
    images = _images(data)
    sums = OrderedDict((graph.nodes[nid].name, 0.0) for nid in graph.temporal_nodes)
    _scan(graph, images, batch_size, _rate_counter(graph, sums))
    n = max(images.shape[0], 1)
    return OrderedDict((k, 100.0 * v / n) for k, v in sums.items())

def _hist_targets(graph):
    '''
    (layer, branch, node id) of every histogrammed tensor.
    '''
    targets = [(graph.nodes[nid].name, 'main', nid) for nid in graph.temporal_nodes]
    for tap in graph.branch_taps:
        for branch in ('skip', 'conv', 'merged'):
            targets.append((tap['block'], branch, tap[branch]))
    return targets

def timing_histograms(graph, data, bins=50, batch_size=256):
    '''
    Histograms of finite spike times over [0, T_MAX) for every temporal layer and
    every branch of every skip block. Times >= T_MAX, including no-spike, are
    counted as sentinels and reported on the first row of each group.
    Returns:
        RunData with columns layer, branch, bin_left, bin_right, count, sentinel_count.
    '''
    images = _images(data)
    edges = np.linspace(0.0, T_MAX, bins + 1)
    targets = _hist_targets(graph)
    counts = [np.zeros((bins,), dtype=np.int64) for _ in targets]
    sentinels = [0] * len(targets)

    def count(start, acts):
        for i, (_, _, nid) in enumerate(targets):
            t = acts[nid].ravel()
            live = t < T_MAX
            counts[i] += np.histogram(t[live], bins=edges)[0]
            sentinels[i] += int(np.sum(~live))
    _scan(graph, images, batch_size, count)
    hist = RunData('timing_histograms', 'Spike timing histograms', HIST_LEGEND, plottable=False)
    for i, (layer, branch, _) in enumerate(targets):
        for j in range(bins):
            hist.add_data((layer, branch, float(edges[j]), float(edges[j + 1]),
                           int(counts[i][j]), sentinels[i] if j == 0 else 0))
    return hist

def export_timing_histograms(graph, data, bins=50, out_dir=None, batch_size=256):
    '''
    Compute timing histograms and write one CSV per layer/branch,
    named hist-<layer>-<branch>.csv.
    Returns:
        the combined RunData and the list of written files.
    '''
    hist = timing_histograms(graph, data, bins, batch_size)
    files = []
    if out_dir is not None:
        if not os.path.isdir(out_dir):
            os.makedirs(out_dir)
        groups = OrderedDict()
        for row in hist.rows:
            groups.setdefault((row[0], row[1]), []).append(row)
        for (layer, branch), rows in groups.items():
            part = RunData('hist-%s-%s' % (layer, branch), hist.description, HIST_LEGEND,
                           plottable=False)
            part.add_data(rows)
            files.append(part.save_to_file(out_dir))
    return hist, files

def branch_mean_gaps(graph, data, batch_size=256):
    '''
    |mean(skip branch) - mean(conv branch)| of the finite spike times per skip block.
    Returns:
        OrderedDict block name -> gap, nan if a branch never fires.
    '''
    images = _images(data)
    sums = OrderedDict((tap['block'], np.zeros((4,))) for tap in graph.branch_taps)

    def accumulate(start, acts):
        for tap in graph.branch_taps:
            s = acts[tap['skip']]
            c = acts[tap['conv']]
            fs, fc = np.isfinite(s), np.isfinite(c)
            sums[tap['block']] += (np.sum(s[fs]), np.sum(fs), np.sum(c[fc]), np.sum(fc))
    _scan(graph, images, batch_size, accumulate)
    gaps = OrderedDict()
    for block, (ss, ns, sc, nc) in sums.items():
        gaps[block] = abs(ss / ns - sc / nc) if ns > 0 and nc > 0 else float('nan')
    return gaps

def evaluate(graph, dataset, batch_size=256):
    '''
    Accuracy, latency, spike rates, FLOPs and energy in one pass over the dataset.
    Returns:
        RunReport
    '''
    images = _images(dataset)
    n = images.shape[0]
    outputs = np.zeros((n, graph.nodes[-1].shape[0]))
    sums = OrderedDict((graph.nodes[nid].name, 0.0) for nid in graph.temporal_nodes)
    count_rates = _rate_counter(graph, sums)

    def collect(start, acts):
        outputs[start:start + acts[-1].shape[0]] = acts[-1]
        count_rates(start, acts)
    _scan(graph, images, batch_size, collect)

    report = RunReport()
    report.n_samples = n
    if n > 0:
        pred = np.argmin(outputs, axis=1)
        report.accuracy = 100.0 * float(np.mean(pred == dataset.labels))
    report.latency, report.silent_samples = latency_of(outputs) if n else (float('nan'), 0)
    report.spike_rates = OrderedDict((k, 100.0 * v / max(n, 1)) for k, v in sums.items())
    report.flops = energy.count_flops(graph)
    mac = sum(report.flops[node.name] for node in graph.nodes if node.kind == 'encoder')
    spiking = [report.flops[k] for k in report.spike_rates]
    rates = [min(v / 100.0, 1.0) for v in report.spike_rates.values()]
    report.e_ann, report.e_snn, report.energy_ratio = energy.estimate_energy(spiking, rates, mac)
    if report.silent_samples:
        logger.warning('%s of %s samples produced no output spike.', report.silent_samples, n)
    return report
