# -*- coding: utf-8 -*-
# Filename: cli.py

"""
Command line interface.
    ttfs-snn gen-wave --grid 64 --zones 3 --out DIR
    ttfs-snn train --config FILE --data DIR --out DIR
    ttfs-snn eval --ckpt FILE --data DIR
    ttfs-snn gradcheck --config FILE --eps 1e-4
    ttfs-snn energy-report --ckpt FILE --data DIR
    ttfs-snn histograms --ckpt FILE --data DIR --out DIR
Results are files or one line of JSON on stdout; logs go to stderr.
Exit codes: 0 success, 1 I/O or data error, 2 usage error, 3 gradient check failure.
Created on 2026-09-17
"""

import argparse
import json
import logging
import math
import os
import sys
import numpy as np
from pydantic import ValidationError
from .dataio.checkpoint import load_checkpoint
from .dataio.config import TrainConfig, load_config, parse_config, pointer_messages
from .dataio.datasets import load_dataset
from .engine.grad_check import finite_diff_check
from .engine.graph import build_graph, calibrate_init
from .errors import (CheckpointError, ConfigError, ContractError, DomainError, IntegrityError,
                     NumericError, ParseError)
from .metrics.evaluate import branch_mean_gaps, evaluate, export_timing_histograms
from .temporal import spike_time
from .train.trainer import Trainer
from .wave.wave_sim import WaveConfig, generate_dataset

logger = logging.getLogger(__name__)

DATA_ENV = 'TTFS_DATA_DIR'
GRADCHECK_TOL = 1.0e-3
EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_GRADCHECK = 0, 1, 2, 3

def _clean(obj):
    '''
    Replace non-finite floats by None so the output is strict JSON.
    '''
    if isinstance(obj, dict):
        return dict((k, _clean(v)) for k, v in obj.items())
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj

def _emit(obj):
    sys.stdout.write(json.dumps(_clean(obj)) + '\n')
    sys.stdout.flush()

def _data_dir(args):
    data = args.data if args.data is not None else os.environ.get(DATA_ENV)
    if data is None:
        raise ConfigError('no data directory: pass --data or set %s.' % DATA_ENV)
    return data

def _num_classes(*datasets):
    return max(int(d.labels.max()) + 1 for d in datasets if len(d))

def cmd_gen_wave(args):
    try:
        cfg = WaveConfig(n_x=args.grid, n_y=args.grid, zones=args.zones, n_steps=args.steps,
                         border=args.border, courant=args.courant)
    except ValidationError as e:
        raise ConfigError('invalid wave config:\n%s' % pointer_messages(e))
    out = args.out
    if out is None:
        out = os.path.join(_data_dir(args), 'wave%sx%s' % (args.zones, args.zones))
    _, _, manifest = generate_dataset(cfg, seed=args.seed or 0, out_dir=out, workers=args.workers)
    _emit({'out': out, 'n_samples': manifest['n_samples'], 'n_train': manifest['n_train'],
           'n_test': manifest['n_test'], 'label_histogram': manifest['label_histogram']})
    return EXIT_OK

def cmd_train(args):
    train_set, test_set = load_dataset(_data_dir(args))
    shape = tuple(train_set.sample_shape)
    classes = _num_classes(train_set, test_set)
    if args.config is not None:
        train_cfg, model_cfg = load_config(args.config, shape, classes)
    else:
        train_cfg, model_cfg = parse_config({}, shape, classes)
    updates = {}
    if args.seed is not None:
        updates['seed'] = args.seed
    if args.epochs is not None:
        updates['epochs'] = args.epochs
    if updates:
        try:
            train_cfg = TrainConfig.model_validate(dict(train_cfg.model_dump(), **updates))
        except ValidationError as e:
            raise ConfigError('invalid train config:\n%s' % pointer_messages(e))
    trainer = Trainer(train_cfg, model_cfg, train_set, test_set)
    history = trainer.run()
    if not len(history):
        raise ConfigError('no epoch was trained.')
    files = trainer.results(args.out)
    last = dict(zip(history.legend, history.rows[-1]))
    _emit({'checkpoint': files[0], 'history': files[1], 'epochs': trainer.epochs_done,
           'train_acc': last['train_acc'], 'test_acc': last['test_acc'], 'latency': last['latency']})
    return EXIT_OK

def _load_eval(args):
    graph, _ = load_checkpoint(args.ckpt)
    _, test_set = load_dataset(_data_dir(args))
    return graph, test_set

def cmd_eval(args):
    graph, test_set = _load_eval(args)
    _emit(evaluate(graph, test_set, args.batch_size).to_dict())
    return EXIT_OK

def cmd_energy_report(args):
    graph, test_set = _load_eval(args)
    report = evaluate(graph, test_set, args.batch_size)
    _emit({'E_ANN': report.e_ann, 'E_SNN': report.e_snn, 'energy_ratio': report.energy_ratio,
           'accuracy': report.accuracy, 'spike_rate': report.spike_rates, 'flops': report.flops})
    return EXIT_OK

def cmd_histograms(args):
    graph, test_set = _load_eval(args)
    _, files = export_timing_histograms(graph, test_set, args.bins, args.out, args.batch_size)
    _emit({'files': files, 'branch_mean_gaps': branch_mean_gaps(graph, test_set, args.batch_size)})
    return EXIT_OK

def cmd_gradcheck(args):
    if args.config is not None:
        _, model_cfg = load_config(args.config)
    else:
        _, model_cfg = parse_config({'train': {'arch': 'baseline'},
                                    'model': {'input_shape': [1, 12, 12], 'width': 8}})
    seed = 0 if args.seed is None else args.seed
    if seed < 0:
        raise ConfigError('seed must be non-negative, got %s.' % seed)
    graph = build_graph(model_cfg, seed=seed)
    rng = np.random.default_rng(seed)
    images = rng.uniform(0.0, 1.0, size=(args.batch,) + tuple(model_cfg.input_shape))
    calibrate_init(graph, images)
    labels = rng.integers(0, model_cfg.num_classes, size=args.batch)
    report = finite_diff_check(graph, images, labels, eps=args.eps, n_params=args.n_params, seed=seed)
    result = report.to_dict()
    result['passed'] = report.passed(GRADCHECK_TOL)
    _emit(result)
    return EXIT_OK if result['passed'] else EXIT_GRADCHECK

def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=None, help='random seed')
    common.add_argument('--workers', type=int, default=os.cpu_count() or 1,
                        help='worker threads, default: available cores')
    common.add_argument('--quiet', action='store_true', help='only log warnings and errors')

    parser = argparse.ArgumentParser(prog='ttfs-snn',
                                     description='Time-to-first-spike networks with skip connections.')
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    p = sub.add_parser('gen-wave', parents=[common], help='generate a wave localization dataset')
    p.add_argument('--grid', type=int, default=64, help='grid points per axis, default 64')
    p.add_argument('--zones', type=int, default=3, help='zones per axis, default 3')
    p.add_argument('--steps', type=int, default=100, help='time steps, default 100')
    p.add_argument('--border', type=int, default=10, help='source-free border, default 10')
    p.add_argument('--courant', type=float, default=0.5, help='Courant number, default 0.5')
    p.add_argument('--out', default=None, help='output dir, default $%s/waveMxM' % DATA_ENV)
    p.add_argument('--data', default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_gen_wave)

    p = sub.add_parser('train', parents=[common], help='train a network')
    p.add_argument('--config', default=None, help='JSON run configuration')
    p.add_argument('--data', default=None, help='dataset dir, default $%s' % DATA_ENV)
    p.add_argument('--out', required=True, help='output dir')
    p.add_argument('--epochs', type=int, default=None, help='override train.epochs')
    p.set_defaults(func=cmd_train)

    for name, func, text in (('eval', cmd_eval, 'evaluate a checkpoint'),
                             ('energy-report', cmd_energy_report, 'ANN/SNN energy estimate'),
                             ('histograms', cmd_histograms, 'export spike timing histograms')):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument('--ckpt', required=True, help='checkpoint file')
        p.add_argument('--data', default=None, help='dataset dir, default $%s' % DATA_ENV)
        p.add_argument('--batch-size', type=int, default=256, help='evaluation batch size')
        if name == 'histograms':
            p.add_argument('--out', required=True, help='output dir')
            p.add_argument('--bins', type=int, default=50, help='bins over [0, 10), default 50')
        p.set_defaults(func=func)

    p = sub.add_parser('gradcheck', parents=[common], help='finite-difference gradient check')
    p.add_argument('--config', default=None, help='JSON run configuration, default: small baseline network')
    p.add_argument('--eps', type=float, default=1.0e-4, help='perturbation, default 1e-4')
    p.add_argument('--n-params', type=int, default=200, help='sampled parameters, default 200')
    p.add_argument('--batch', type=int, default=4, help='random sample batch size, default 4')
    p.set_defaults(func=cmd_gradcheck)
    return parser

def dispatch(argv=None):
    '''
    Parse argv and run one subcommand.
    Returns:
        exit code.
    '''
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format='%(asctime)s %(name)s %(levelname)s: %(message)s',
                        stream=sys.stderr)
    spike_time.set_num_workers(args.workers)
    try:
        return args.func(args)
    except (OSError, ParseError, IntegrityError, CheckpointError, ConfigError,
            ContractError, DomainError, NumericError) as e:
        sys.stderr.write('ttfs-snn %s: %s\n' % (args.command, e))
        return EXIT_ERROR

def main():
    sys.exit(dispatch())

if __name__ == '__main__':
    main()
