# -*- coding: utf-8 -*-
# Filename: wave_sim.py

"""
2-D acoustic wave equation u_tt = c^2 (u_xx + u_yy) on a rectangle with zero
Dirichlet boundaries, zero initial velocity and a Gaussian initial pressure,
solved with second-order central differences. The pressure field after a fixed
number of steps is the input of the source localization task; the label is the
zone of the M x M zone grid that contains the source.
Created on 2026-09-16
"""

# import
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveFloat, PositiveInt
from ..dataio import container
from ..dataio.datasets import Dataset
from ..errors import ConfigError, DomainError

logger = logging.getLogger(__name__)

# global
VERSION = '1.0'
CFL_MAX = 1.0 / math.sqrt(2.0)
TEST_FRACTION = 0.2
SOURCES_PER_CHUNK = 64

class WaveConfig(BaseModel):
    '''
    Grid, physics and labeling of a wave dataset. The domain is
    [0, extent_x] x [0, extent_y]; rows of a field run along y, columns along x.
    '''
    model_config = ConfigDict(extra='forbid')

    n_x: int = Field(default=64, ge=3)
    n_y: int = Field(default=64, ge=3)
    c: PositiveFloat = 1484.0           # m/s, speed of sound in water
    extent_x: PositiveFloat = 1.0
    extent_y: PositiveFloat = 1.0
    courant: PositiveFloat = 0.5        # c*dt/min(dx, dy)
    n_steps: PositiveInt = 100
    gaussian_width: PositiveFloat = 0.05
    border: NonNegativeInt = 10
    zones: PositiveInt = 3

    @property
    def dx(self):
        return self.extent_x / (self.n_x - 1)

    @property
    def dy(self):
        return self.extent_y / (self.n_y - 1)

    @property
    def dt(self):
        return self.courant * min(self.dx, self.dy) / self.c

    def check(self):
        '''
        Raise ConfigError if the scheme is unstable or there is no source location.
        '''
        if self.courant > CFL_MAX:
            raise ConfigError('Courant number %s violates the CFL limit %.6f.' % (self.courant, CFL_MAX))
        if self.n_x - 2 * self.border < 1 or self.n_y - 2 * self.border < 1:
            raise ConfigError('grid %sx%s has no interior with a border of %s.'\
                              % (self.n_y, self.n_x, self.border))

class WaveField(object):
    '''
    Pressure field at one time step.
    '''
    def __init__(self, u, step, dx, dy, dt):
        self.u = u
        self.step = step
        self.dx = dx
        self.dy = dy
        self.dt = dt

def _laplacian(u, cx2, cy2):
    '''
    Scaled 5-point Laplacian of the interior, neighbours are added in mirror pairs.
    '''
    mid = u[..., 1:-1, 1:-1]
    return cy2 * ((u[..., 2:, 1:-1] + u[..., :-2, 1:-1]) - 2.0 * mid) +\
           cx2 * ((u[..., 1:-1, 2:] + u[..., 1:-1, :-2]) - 2.0 * mid)

def wave_march(u0, courant, n_steps, courant_y=None):
    '''
    March the wave equation from rest.
    Args:
        u0: (..., n_y, n_x) initial fields; leading axes are independent fields.
        courant: c*dt/dx.
        n_steps: number of time steps, >= 0.
        courant_y: c*dt/dy, defaults to courant.
    Returns:
        fields at step n_steps, boundaries zero.
    '''
    if n_steps < 0:
        raise DomainError('n_steps must be >= 0, got %s.' % n_steps)
    cx2 = courant * courant
    cy2 = cx2 if courant_y is None else courant_y * courant_y
    u_prev = np.array(u0, dtype=np.float64)
    u_prev[..., 0, :] = 0.0
    u_prev[..., -1, :] = 0.0
    u_prev[..., :, 0] = 0.0
    u_prev[..., :, -1] = 0.0
    if n_steps == 0:
        return u_prev
    # zero initial velocity: u1 = u0 + 0.5*C^2*L(u0)
    u = u_prev.copy()
    u[..., 1:-1, 1:-1] += 0.5 * _laplacian(u_prev, cx2, cy2)
    for _ in range(1, n_steps):
        u_next = np.zeros(u.shape)
        u_next[..., 1:-1, 1:-1] = 2.0 * u[..., 1:-1, 1:-1] - u_prev[..., 1:-1, 1:-1] +\
                                  _laplacian(u, cx2, cy2)
        u_prev, u = u, u_next
    return u

def gaussian_source(sources, cfg):
    '''
    Gaussian initial pressure exp(-((x - x_s)/w)^2 - ((y - y_s)/w)^2) for every source.
    Args:
        sources: (k, 2) integer (row, col) grid positions.
        cfg: WaveConfig.
    Returns:
        (k, n_y, n_x) initial fields.
    '''
    sources = np.asarray(sources, dtype=np.int64).reshape((-1, 2))
    rows = np.arange(cfg.n_y)
    cols = np.arange(cfg.n_x)
    dy = (rows[np.newaxis, :] - sources[:, 0:1]) * cfg.dy / cfg.gaussian_width
    dx = (cols[np.newaxis, :] - sources[:, 1:2]) * cfg.dx / cfg.gaussian_width
    return np.exp(-dy * dy)[:, :, np.newaxis] * np.exp(-dx * dx)[:, np.newaxis, :]

def interior_sources(cfg):
    '''
    All grid points at least cfg.border points away from every edge, row-major.
    '''
    rows = np.arange(cfg.border, cfg.n_y - cfg.border)
    cols = np.arange(cfg.border, cfg.n_x - cfg.border)
    rr, cc = np.meshgrid(rows, cols, indexing='ij')
    return np.stack([rr.ravel(), cc.ravel()], axis=1)

def _march_sources(sources, cfg):
    courant_x = cfg.c * cfg.dt / cfg.dx
    courant_y = cfg.c * cfg.dt / cfg.dy
    return wave_march(gaussian_source(sources, cfg), courant_x, cfg.n_steps, courant_y)

def simulate_wave(source, cfg):
    '''
    Pressure field of one Gaussian source after cfg.n_steps steps.
    Args:
        source: (row, col) inside the border-excluded interior.
        cfg: WaveConfig.
    Returns:
        WaveField
    '''
    cfg.check()
    r, c = int(source[0]), int(source[1])
    if not (cfg.border <= r < cfg.n_y - cfg.border and cfg.border <= c < cfg.n_x - cfg.border):
        raise DomainError('source %s is outside the interior of a %sx%s grid with border %s.'\
                          % ((r, c), cfg.n_y, cfg.n_x, cfg.border))
    u = _march_sources([(r, c)], cfg)[0]
    return WaveField(u, cfg.n_steps, cfg.dx, cfg.dy, cfg.dt)

def zone_label(source, n, m):
    '''
    Row-major index of the zone containing source on an m x m zone grid.
    Args:
        source: (row, col).
        n: grid size, or (n_rows, n_cols).
        m: zones per axis.
    Returns:
        floor(row*m/n_rows)*m + floor(col*m/n_cols)
    '''
    n_rows, n_cols = (n, n) if np.ndim(n) == 0 else (int(n[0]), int(n[1]))
    r, c = int(source[0]), int(source[1])
    if m < 1:
        raise DomainError('number of zones must be >= 1, got %s.' % m)
    if not (0 <= r < n_rows and 0 <= c < n_cols):
        raise DomainError('source %s outside a %sx%s grid.' % ((r, c), n_rows, n_cols))
    return (r * m // n_rows) * m + (c * m // n_cols)

def generate_dataset(cfg, seed=0, out_dir=None, workers=1):
    '''
    Simulate one sample per interior source, normalize all fields by their global
    min and max to [0, 1], label them by zone and split them 80:20 at random.
    Args:
        cfg: WaveConfig.
        seed: seed of the split.
        out_dir: if not None, write train.ttfsds, test.ttfsds and manifest.json there.
        workers: number of threads marching source chunks.
    Returns:
        (train Dataset, test Dataset, manifest dict)
    '''
    cfg.check()
    sources = interior_sources(cfg)
    n = sources.shape[0]
    chunks = [sources[i:i + SOURCES_PER_CHUNK] for i in range(0, n, SOURCES_PER_CHUNK)]
    logger.info('simulating %s sources on a %sx%s grid, %s steps', n, cfg.n_y, cfg.n_x, cfg.n_steps)
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: _march_sources(s, cfg), chunks))
    else:
        parts = [_march_sources(s, cfg) for s in chunks]
    fields = np.concatenate(parts, axis=0)
    lo, hi = float(fields.min()), float(fields.max())
    if hi > lo:
        fields = (fields - lo) / (hi - lo)
    else:
        fields = np.zeros(fields.shape)
    labels = np.array([zone_label(s, (cfg.n_y, cfg.n_x), cfg.zones) for s in sources], dtype=np.int64)
    perm = np.random.default_rng(seed).permutation(n)
    n_test = int(math.floor(TEST_FRACTION * n))
    test_idx = np.sort(perm[:n_test])
    train_idx = np.sort(perm[n_test:])
    images = fields.astype(np.float32)[:, np.newaxis, :, :]
    name = 'wave%sx%s' % (cfg.zones, cfg.zones)
    train = Dataset(images[train_idx], labels[train_idx], name)
    test = Dataset(images[test_idx], labels[test_idx], name)
    manifest = {'format': container.MAGIC.rstrip(b'\x00').decode('ascii'),
                'config': cfg.model_dump(),
                'n_samples': int(n),
                'n_train': int(train_idx.shape[0]),
                'n_test': int(n_test),
                'seed': int(seed),
                'label_histogram': np.bincount(labels, minlength=cfg.zones ** 2).tolist(),
                'field_min': lo,
                'field_max': hi,
                'dt': cfg.dt}
    if out_dir is not None:
        if not os.path.isdir(out_dir):
            os.makedirs(out_dir)
        container.write_dataset(os.path.join(out_dir, 'train.ttfsds'), train.images, train.labels)
        container.write_dataset(os.path.join(out_dir, 'test.ttfsds'), test.images, test.labels)
        with open(os.path.join(out_dir, 'manifest.json'), 'w') as f:
            json.dump(manifest, f, indent=2)
        logger.info('wave dataset saved to %s: %s train, %s test', out_dir, len(train), len(test))
    return train, test, manifest
