# -*- coding: utf-8 -*-
# Filename: spike_time.py

"""
Closed-form spike time of a non-leaky integrate-and-fire neuron.
With the substitution z = exp(t), a neuron driven by the input spikes of its
causal set C fires at
    z_out = sum_{k in C} w_k * z_k / (sum_{k in C} w_k - 1).
This module holds the scalar reference solver, its analytic gradient, an ODE
oracle for testing, and the vectorized row solver used by the network layers.
Created on 2026-09-02
"""

import math
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
import numpy as np
from ..errors import DomainError, ContractError

# global
VERSION = '1.0'
T_MAX = 10.0                    # spike times at or beyond this mean "no spike"
Z_MAX = math.exp(T_MAX)         # z-domain no-spike sentinel
DENOM_EPS = 1.0e-6              # candidate causal sets need sum(w) - 1 > DENOM_EPS
CHUNK_ELEMENTS = 1 << 20        # max elements of one (rows, C, K) work array

SynapseInput = namedtuple('SynapseInput', ['z', 'w'])

# worker pool shared by the row solver and its backward
_num_workers = 1
_pool = None

def set_num_workers(n):
    '''
    Set the number of threads used to process solver chunks.
    Args:
        n: number of workers, values < 1 are treated as 1.
    '''
    global _num_workers, _pool
    n = max(1, int(n))
    if n == _num_workers:
        return
    if _pool is not None:
        _pool.shutdown(wait=True)
        _pool = None
    _num_workers = n

def get_num_workers():
    '''
    Number of threads used by the row solver.
    '''
    return _num_workers

def _map(fn, items):
    '''
    map fn over items, on the worker pool if more than one worker is configured.
    '''
    global _pool
    if _num_workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    if _pool is None:
        _pool = ThreadPoolExecutor(max_workers=_num_workers)
    return list(_pool.map(fn, items))

class SpikeSolve(object):
    '''
    Result of the causal-set solver for one neuron.
    '''
    def __init__(self, z_out, causal_mask, denom):
        '''
        Args:
            z_out: output z-value, Z_MAX if the neuron does not fire.
            causal_mask: boolean numpy array, True for inputs in the causal set.
            denom: sum of causal weights minus 1, 0.0 if the neuron does not fire.
        '''
        self.z_out = z_out
        self.causal_mask = causal_mask
        self.denom = denom

    @property
    def fires(self):
        '''
        True if the neuron emits a spike.
        '''
        return self.z_out < Z_MAX

    def __repr__(self):
        return 'SpikeSolve(z_out=%r, causal=%s, denom=%r)' %\
               (self.z_out, np.flatnonzero(self.causal_mask).tolist(), self.denom)

def z_of_time(t):
    '''
    Map spike times to the z-domain.
    Args:
        t: scalar or numpy array of spike times, t >= 0 or +inf.
    Returns:
        z = exp(t), Z_MAX for t >= T_MAX (including +inf). Same shape as t.
    '''
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(np.isnan(t_arr)) or np.any(t_arr < 0.0):
        raise DomainError('spike times must be >= 0, got min %s.' % np.nanmin(t_arr))
    with np.errstate(over='ignore'):
        z = np.where(t_arr >= T_MAX, Z_MAX, np.exp(np.minimum(t_arr, T_MAX)))
    if np.ndim(t) == 0:
        return float(z)
    return z

def time_of_z(z):
    '''
    Map z-values back to spike times.
    Args:
        z: scalar or numpy array of z-values, z >= 1.
    Returns:
        t = ln(z), +inf for z >= Z_MAX. Same shape as z.
    '''
    z_arr = np.asarray(z, dtype=np.float64)
    if np.any(np.isnan(z_arr)) or np.any(z_arr < 1.0):
        raise DomainError('z-values must be >= 1, got min %s.' % np.nanmin(z_arr))
    t = np.where(z_arr >= Z_MAX, np.inf, np.log(np.minimum(z_arr, Z_MAX)))
    if np.ndim(z) == 0:
        return float(t)
    return t

def _as_arrays(inputs):
    '''
    Split a list of (z, w) pairs into two float arrays.
    '''
    if len(inputs) == 0:
        return np.zeros((0,)), np.zeros((0,))
    arr = np.asarray([(float(i[0]), float(i[1])) for i in inputs], dtype=np.float64)
    return arr[:, 0], arr[:, 1]

def solve_spike_time(inputs):
    '''
    Solve the output spike of one neuron.
    Args:
        inputs: list of SynapseInput (or (z, w) pairs). May be empty.
    Returns:
        SpikeSolve. A neuron that never reaches threshold is a valid result with
        z_out = Z_MAX, an all-false causal mask and denom = 0.
    '''
    z, w = _as_arrays(inputs)
    n = z.shape[0]
    if n == 0:
        return SpikeSolve(Z_MAX, np.zeros((0,), dtype=bool), 0.0)
    if np.any(z < 1.0):
        raise DomainError('input z-values must be >= 1.')
    cache = causal_solve(z.reshape((1, n)), w.reshape((1, n)))
    n_causal = int(cache.n_causal[0, 0])
    mask = np.zeros((n,), dtype=bool)
    mask[cache.order[0, :n_causal]] = True
    return SpikeSolve(float(cache.z_out[0, 0]), mask, float(cache.denom[0, 0]))

def spike_time_grad(solve, inputs, upstream=1.0):
    '''
    Gradient of z_out w.r.t. the input z-values and weights.
    Inside the causal set dz_out/dz_j = w_j/denom and dz_out/dw_j = (z_j - z_out)/denom;
    outside it, and for a neuron that does not fire, both are zero.
    Args:
        solve: SpikeSolve from solve_spike_time(inputs).
        inputs: the same list of inputs.
        upstream: scale applied to both gradients.
    Returns:
        dz, dw: numpy arrays with one entry per input.
    '''
    z, w = _as_arrays(inputs)
    if z.shape[0] != solve.causal_mask.shape[0]:
        raise ContractError('solve has %s inputs but %s inputs were given.'\
                            % (solve.causal_mask.shape[0], z.shape[0]))
    dz = np.zeros(z.shape)
    dw = np.zeros(z.shape)
    if not solve.fires or solve.denom <= 0.0:
        return dz, dw
    c = solve.causal_mask
    dz[c] = upstream * w[c] / solve.denom
    dw[c] = upstream * (z[c] - solve.z_out) / solve.denom
    return dz, dw

def membrane_oracle(inputs, dt=1.0e-4, t_max=20.0):
    '''
    First threshold crossing found by evaluating the membrane potential
        V(t) = sum_k U(t - t_k) w_k (1 - exp(-(t - t_k)))
    on a time grid. Only meant as a test oracle for solve_spike_time.
    Args:
        inputs: list of (t, w) pairs in the time domain, t may be +inf.
        dt: grid step.
        t_max: horizon of the grid.
    Returns:
        first grid time with V >= 1, +inf if the threshold is not reached before t_max.
    '''
    t_in, w = _as_arrays(inputs)
    keep = np.isfinite(t_in)
    t_in = t_in[keep]
    w = w[keep]
    n_grid = int(math.ceil(t_max / dt))
    block = 65536
    for start in range(0, n_grid, block):
        grid = (np.arange(start, min(start + block, n_grid)) * dt).reshape((-1, 1))
        lag = grid - t_in.reshape((1, -1))
        v = np.sum(np.where(lag >= 0.0, w * (1.0 - np.exp(-np.maximum(lag, 0.0))), 0.0), axis=1)
        idx = np.flatnonzero(v >= 1.0)
        if idx.shape[0] > 0:
            return float(grid[idx[0], 0])
    return math.inf

class CausalCache(object):
    '''
    Forward results of causal_solve that are needed by causal_grad.
    '''
    def __init__(self, z_sorted, order, z_out, denom, n_causal):
        self.z_sorted = z_sorted    # (N, K) input z-values, ascending per row
        self.order = order          # (N, K) argsort of the unsorted inputs
        self.z_out = z_out          # (N, C) output z-values
        self.denom = denom          # (N, C) causal weight sum minus 1
        self.n_causal = n_causal    # (N, C) size of the causal prefix

    @property
    def nbytes(self):
        return self.z_sorted.nbytes + self.order.nbytes + self.z_out.nbytes +\
               self.denom.nbytes + self.n_causal.nbytes

def _row_chunks(n_rows, n_out, n_in):
    '''
    Split n_rows into slices whose (rows, n_out, n_in) work arrays stay below CHUNK_ELEMENTS.
    '''
    step = max(1, CHUNK_ELEMENTS // max(1, n_out * n_in))
    return [slice(i, min(i + step, n_rows)) for i in range(0, n_rows, step)]

def _gather_weights(w, order):
    '''
    Weights of every output neuron in the sorted input order of every row.
    Args:
        w: (C, K) weights.
        order: (n, K) per-row input order.
    Returns:
        (n, C, K) array.
    '''
    return np.transpose(w[:, order], (1, 0, 2))

def causal_solve(z, w):
    '''
    Solve many neurons that share one input row each.
    Every row of z feeds all C output neurons whose weights are the rows of w, which
    is the situation of a dense layer (row = sample) and of a convolution
    (row = one receptive field of one sample).
    Args:
        z: (N, K) input z-values, Z_MAX for absent or silent inputs.
        w: (C, K) weights.
    Returns:
        CausalCache with z_out of shape (N, C).
    '''
    z = np.asarray(z, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    n_rows, n_in = z.shape
    n_out = w.shape[0]
    if w.shape[1] != n_in:
        raise ContractError('weights have %s inputs but rows have %s.' % (w.shape[1], n_in))
    order = np.argsort(z, axis=1, kind='stable')
    z_sorted = np.take_along_axis(z, order, axis=1)
    z_out = np.full((n_rows, n_out), Z_MAX)
    denom = np.zeros((n_rows, n_out))
    n_causal = np.zeros((n_rows, n_out), dtype=np.int32)
    if n_in == 0 or n_rows == 0:
        return CausalCache(z_sorted, order, z_out, denom, n_causal)

    def solve_chunk(sl):
        zs = z_sorted[sl]
        ws = _gather_weights(w, order[sl])
        sum_w = np.cumsum(ws, axis=2)
        sum_wz = np.cumsum(ws * zs[:, np.newaxis, :], axis=2)
        den = sum_w - 1.0
        valid = den > DENOM_EPS
        cand = np.where(valid, sum_wz / np.where(valid, den, 1.0), np.inf)
        z_next = np.concatenate([zs[:, 1:], np.full((zs.shape[0], 1), np.inf)], axis=1)
        accept = valid & (zs[:, np.newaxis, :] < Z_MAX) & (cand < Z_MAX) &\
                 (cand >= zs[:, np.newaxis, :]) & (cand < z_next[:, np.newaxis, :])
        fires = np.any(accept, axis=2)
        first = np.argmax(accept, axis=2)[:, :, np.newaxis]
        z_out[sl] = np.where(fires, np.take_along_axis(cand, first, axis=2)[:, :, 0], Z_MAX)
        denom[sl] = np.where(fires, np.take_along_axis(den, first, axis=2)[:, :, 0], 0.0)
        n_causal[sl] = np.where(fires, first[:, :, 0] + 1, 0)

    _map(solve_chunk, _row_chunks(n_rows, n_out, n_in))
    return CausalCache(z_sorted, order, z_out, denom, n_causal)

def causal_grad(cache, w, g_zout):
    '''
    Backward of causal_solve.
    Args:
        cache: CausalCache returned by causal_solve(z, w).
        w: (C, K) weights used in the forward.
        g_zout: (N, C) gradient of the loss w.r.t. z_out.
    Returns:
        g_z: (N, K) gradient w.r.t. the (unsorted) input z-values.
        g_w: (C, K) gradient w.r.t. the weights, summed over rows.
    '''
    w = np.asarray(w, dtype=np.float64)
    n_rows, n_in = cache.z_sorted.shape
    n_out = w.shape[0]
    if g_zout.shape != (n_rows, n_out):
        raise ContractError('upstream gradient has shape %s, expected %s.'\
                            % (g_zout.shape, (n_rows, n_out)))
    g_z = np.zeros((n_rows, n_in))
    if n_in == 0 or n_rows == 0:
        return g_z, np.zeros(w.shape)
    k_idx = np.arange(n_in)

    def grad_chunk(sl):
        zs = cache.z_sorted[sl]
        order = cache.order[sl]
        nc = cache.n_causal[sl]
        fires = nc > 0
        coef = np.where(fires, g_zout[sl] / np.where(fires, cache.denom[sl], 1.0), 0.0)
        mask = k_idx[np.newaxis, np.newaxis, :] < nc[:, :, np.newaxis]
        ws = _gather_weights(w, order)
        g_zs = np.sum(coef[:, :, np.newaxis] * np.where(mask, ws, 0.0), axis=1)
        g_ws = np.where(mask, coef[:, :, np.newaxis] *\
                        (zs[:, np.newaxis, :] - cache.z_out[sl][:, :, np.newaxis]), 0.0)
        inv = np.argsort(order, axis=1)
        g_z[sl] = np.take_along_axis(g_zs, inv, axis=1)
        return np.sum(np.take_along_axis(g_ws, inv[:, np.newaxis, :], axis=2), axis=0)

    parts = _map(grad_chunk, _row_chunks(n_rows, n_out, n_in))
    g_w = np.zeros(w.shape)
    for p in parts:
        g_w += p
    return g_z, g_w
