# -*- coding: utf-8 -*-
# Filename: grad_check.py

"""
Finite-difference check of the analytic gradients of a graph.
Created on 2026-09-15
"""

import logging
from collections import OrderedDict
import numpy as np
from ..errors import DomainError
from ..train.loss import network_loss
from .graph import backward, forward

logger = logging.getLogger(__name__)

KINK_TOL = 1.0e-2       # relative disagreement of one-sided differences marking a kink
ZERO_GRAD = 1.0e-12     # gradients below this magnitude count as zero
REL_FLOOR = 1.0e-6      # floor of the relative error denominator

class GradCheckReport(object):
    '''
    Relative errors between analytic and central-difference gradients.
    '''
    def __init__(self, eps):
        self.eps = eps
        self.entries = []       # (parameter name, flat index, analytic, numeric, rel. error)
        self.kinks = []         # (parameter name, flat index) on a causal-set boundary
        self.n_zero = 0

    @property
    def n_checked(self):
        return len(self.entries)

    @property
    def max_rel_err(self):
        return max([e[4] for e in self.entries]) if self.entries else 0.0

    @property
    def mean_rel_err(self):
        return float(np.mean([e[4] for e in self.entries])) if self.entries else 0.0

    @property
    def n_nonzero(self):
        return self.n_checked - self.n_zero

    @property
    def zero_grad_fraction(self):
        return self.n_zero / self.n_checked if self.n_checked else 0.0

    def passed(self, tol=1.0e-3):
        '''
        True if every checked entry agrees within tol and at least one
        analytic gradient is nonzero. A network whose sampled gradients all
        vanish (no output fires) never passes.
        '''
        return self.n_nonzero > 0 and self.max_rel_err < tol

    def to_dict(self):
        worst = None
        if self.entries:
            e = max(self.entries, key=lambda x: x[4])
            worst = {'param': e[0], 'index': e[1], 'analytic': e[2], 'numeric': e[3]}
        return OrderedDict([('eps', self.eps),
                            ('n_checked', self.n_checked),
                            ('n_kinks', len(self.kinks)),
                            ('max_rel_err', self.max_rel_err),
                            ('mean_rel_err', self.mean_rel_err),
                            ('n_nonzero', self.n_nonzero),
                            ('zero_grad_fraction', self.zero_grad_fraction),
                            ('worst', worst)])

def _sample_slots(graph, n_params, rng):
    names = list(graph.params.keys())
    sizes = np.array([graph.params[n].size for n in names])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    total = int(offsets[-1])
    picks = rng.choice(total, size=min(n_params, total), replace=False)
    slots = []
    for p in np.sort(picks):
        i = int(np.searchsorted(offsets, p, side='right') - 1)
        slots.append((names[i], int(p - offsets[i])))
    return slots

def finite_diff_check(graph, images, labels, eps=1.0e-4, n_params=200, seed=0,
                      lambda1=1.0, lambda2=1.0e-6):
    '''
    Compare backward() with central differences of the total loss on randomly
    sampled parameter entries. The graph runs in eval mode; parameters are
    perturbed in float64 copies and restored afterwards.
    Parameters whose forward and backward one-sided differences disagree sit on a
    causal-set boundary, where the loss is not differentiable; they are counted
    as kinks and excluded from the error statistics.
    Args:
        graph: Graph.
        images: (B, C, H, W) sample batch.
        labels: (B,) labels.
        eps: perturbation, > 0.
        n_params: number of sampled parameter entries.
        seed: seed of the sampling.
        lambda1, lambda2: loss weights.
    Returns:
        GradCheckReport.
    '''
    if not eps > 0.0:
        raise DomainError('eps must be > 0, got %s.' % eps)
    saved = graph.params
    graph.params = OrderedDict((n, p.astype(np.float64)) for n, p in saved.items())
    try:
        def loss():
            acts, _ = forward(graph, images, training=False)
            return network_loss(graph, acts, labels, lambda1, lambda2)[0].total

        acts, tape = forward(graph, images, training=False)
        _, loss_grads, param_grads = network_loss(graph, acts, labels, lambda1, lambda2)
        grads = backward(graph, tape, loss_grads, param_grads)
        base = loss()
        report = GradCheckReport(eps)
        for name, idx in _sample_slots(graph, n_params, np.random.default_rng(seed)):
            p = graph.params[name].reshape(-1)
            orig = p[idx]
            if graph.param_roles[name] == 'delay' and orig < eps:
                # delays cannot be perturbed below 0
                report.kinks.append((name, idx))
                continue
            p[idx] = orig + eps
            plus = loss()
            p[idx] = orig - eps
            minus = loss()
            p[idx] = orig
            fwd = (plus - base) / eps
            bwd = (base - minus) / eps
            scale = max(abs(fwd), abs(bwd))
            if abs(fwd - bwd) > KINK_TOL * scale + 1.0e-6:
                report.kinks.append((name, idx))
                continue
            analytic = float(grads[name].reshape(-1)[idx])
            numeric = (plus - minus) / (2.0 * eps)
            err = abs(analytic - numeric) / max(abs(analytic), abs(numeric), REL_FLOOR)
            if abs(analytic) < ZERO_GRAD:
                report.n_zero += 1
            report.entries.append((name, idx, analytic, numeric, err))
    finally:
        graph.params = saved
    logger.info('gradient check: %s entries, %s kinks, max rel. err %.3g',
                report.n_checked, len(report.kinks), report.max_rel_err)
    if report.n_checked and not report.n_nonzero:
        logger.warning('gradient check: all %s sampled gradients are zero.', report.n_checked)
    return report
