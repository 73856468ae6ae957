# -*- coding: utf-8 -*-
# Filename: graph.py

"""
Static computation graph of a TTFS network with a tape-based reverse pass.
Each node has a single output tensor. Parameters are stored as float32 arrays in
an ordered store; all computation is done in float64.
Created on 2026-09-06
"""

import logging
from collections import OrderedDict
import numpy as np
from ..errors import ConfigError, ContractError, NumericError
from ..layers import encoder, skip, temporal_layers
from ..layers.architecture import ModelConfig, PoolSpec
from ..layers.temporal_layers import conv_output_size
from ..temporal.spike_time import T_MAX

logger = logging.getLogger(__name__)

# initial temporal weights are U[0, TEMPORAL_INIT_SPAN/fan_in]: the expected input weight
# sum is 4 and a layer adds about ln(4/3) to the spike times of its inputs
TEMPORAL_INIT_SPAN = 8.0
CALIBRATION_FIRE = 0.95        # fraction of a layer that must spike after calibrate_init
CALIBRATION_GROWTH = 1.5
CALIBRATION_MAX_ITER = 40

class Node(object):
    '''
    One operation of the graph.
    '''
    def __init__(self, node_id, kind, name, inputs, shape, attrs=None, params=None):
        '''
        Args:
            node_id: index in Graph.nodes.
            kind: input, encoder, pool, conv, dense, split, delay, concat, shuffle,
                add or pad_channels.
            name: unique node name.
            inputs: ids of the input nodes, all smaller than node_id.
            shape: output shape without the batch axis.
            attrs: kind specific settings.
            params: role -> parameter name in the graph store.
        '''
        self.id = node_id
        self.kind = kind
        self.name = name
        self.inputs = list(inputs)
        self.shape = tuple(shape)
        self.attrs = attrs if attrs is not None else {}
        self.params = params if params is not None else {}

    def __repr__(self):
        return 'Node(%s, %s, %s, inputs=%s, shape=%s)' %\
               (self.id, self.kind, self.name, self.inputs, self.shape)

class Graph(object):
    '''
    Ordered node list plus the parameter and buffer stores.
    '''
    def __init__(self, config):
        self.config = config
        self.nodes = []
        self.params = OrderedDict()         # name -> float32 array
        self.param_roles = OrderedDict()    # name -> temporal, kernel, bias, bn_scale, bn_shift, delay
        self.buffers = OrderedDict()        # name -> float32 array, BN running statistics
        self.temporal_nodes = []            # ids of conv and dense nodes
        self.branch_taps = []               # per skip block: block, skip, conv, merged node ids
        self.overlap_pairs = []             # (conv node id, delay node id) per delayed block
        self._names = {}

    @property
    def input_shape(self):
        return self.nodes[0].shape

    @property
    def output_id(self):
        return self.nodes[-1].id

    def node(self, name):
        '''
        Node by name.
        '''
        if name not in self._names:
            raise ContractError('no node named %s.' % name)
        return self.nodes[self._names[name]]

    def add_node(self, kind, name, inputs, shape, attrs=None, params=None):
        if name in self._names:
            raise ConfigError('duplicate layer name: %s' % name)
        for i in inputs:
            if i >= len(self.nodes):
                raise ConfigError('node %s uses input %s that is not yet defined.' % (name, i))
        node = Node(len(self.nodes), kind, name, inputs, shape, attrs, params)
        self.nodes.append(node)
        self._names[name] = node.id
        return node.id

    def add_param(self, name, value, role):
        self.params[name] = np.asarray(value, dtype=np.float32)
        self.param_roles[name] = role
        return name

    def trainable_layers(self):
        '''
        Names of the nodes that own parameters.
        '''
        return [n.name for n in self.nodes if n.params]

    def delay_params(self):
        '''
        (block name, theta parameter name) for every delay node.
        '''
        return [(n.attrs['block'], n.params['theta']) for n in self.nodes if n.kind == 'delay']

    def num_parameters(self):
        return int(sum(p.size for p in self.params.values()))

class Tape(object):
    '''
    Values saved by forward for backward, one entry per executed node.
    '''
    def __init__(self, training, batch_size, labels=None):
        self.training = training
        self.batch_size = batch_size
        self.labels = labels
        self.entries = {}
        self.activations = None

def _uniform(rng, low, high, shape):
    return rng.uniform(low, high, size=shape)

def _build_encoder(graph, spec, cur, rng):
    shape = graph.nodes[cur].shape
    if len(shape) != 3:
        raise ConfigError('encoder needs a (C, H, W) input, got %s.' % (shape,))
    c_in, k, c_out = shape[0], spec.kernel, spec.out_channels
    bound = 1.0 / np.sqrt(c_in * k * k)
    name = spec.name
    params = {'kernel': graph.add_param(name + '.kernel',
                                        _uniform(rng, -bound, bound, (c_out, c_in, k, k)), 'kernel'),
              'bias': graph.add_param(name + '.bias', _uniform(rng, -bound, bound, (c_out,)), 'bias'),
              'bn_scale': graph.add_param(name + '.bn_scale', np.ones((c_out,)), 'bn_scale'),
              'bn_shift': graph.add_param(name + '.bn_shift', np.zeros((c_out,)), 'bn_shift')}
    graph.buffers[name + '.bn_mean'] = np.zeros((c_out,), dtype=np.float32)
    graph.buffers[name + '.bn_var'] = np.ones((c_out,), dtype=np.float32)
    h = conv_output_size(shape[1], k, 1, k // 2)
    w = conv_output_size(shape[2], k, 1, k // 2)
    return graph.add_node('encoder', name, [cur], (c_out, h, w), params=params)

def _build_pool(graph, spec, cur, rng):
    shape = graph.nodes[cur].shape
    if len(shape) != 3:
        raise ConfigError('pooling needs a (C, H, W) input, got %s.' % (shape,))
    if spec.window > shape[1] or spec.window > shape[2]:
        raise ConfigError('pool window %s larger than input %s.' % (spec.window, shape[1:]))
    if spec.ceil_mode:
        out = [-(-(s - spec.window) // spec.stride) + 1 for s in shape[1:]]
    else:
        out = [(s - spec.window) // spec.stride + 1 for s in shape[1:]]
    attrs = {'window': spec.window, 'stride': spec.stride, 'ceil_mode': spec.ceil_mode}
    return graph.add_node('pool', spec.name, [cur], (shape[0], out[0], out[1]), attrs)

def _build_conv(graph, spec, cur, rng):
    shape = graph.nodes[cur].shape
    if len(shape) != 3:
        raise ConfigError('conv %s needs a (C, H, W) input, got %s.' % (spec.name, shape))
    c_in, k = shape[0], spec.kernel
    h = conv_output_size(shape[1], k, spec.stride, spec.padding)
    w = conv_output_size(shape[2], k, spec.stride, spec.padding)
    if h < 1 or w < 1:
        raise ConfigError('conv %s: kernel %s does not fit input %s.' % (spec.name, k, shape))
    fan_in = c_in * k * k
    weight = _uniform(rng, 0.0, TEMPORAL_INIT_SPAN / fan_in, (spec.out_channels, c_in, k, k))
    params = {'weight': graph.add_param(spec.name + '.weight', weight, 'temporal')}
    attrs = {'stride': spec.stride, 'padding': spec.padding}
    nid = graph.add_node('conv', spec.name, [cur], (spec.out_channels, h, w), attrs, params)
    graph.temporal_nodes.append(nid)
    return nid

def _build_dense(graph, spec, cur, rng):
    shape = graph.nodes[cur].shape
    fan_in = int(np.prod(shape))
    weight = _uniform(rng, 0.0, TEMPORAL_INIT_SPAN / fan_in, (spec.out_features, fan_in))
    params = {'weight': graph.add_param(spec.name + '.weight', weight, 'temporal')}
    nid = graph.add_node('dense', spec.name, [cur], (spec.out_features,), params=params)
    graph.temporal_nodes.append(nid)
    return nid

def _build_residual(graph, spec, cur, rng):
    body = cur
    stride = 1
    for conv in spec.body:
        body = _build_conv(graph, conv, body, rng)
        stride *= conv.stride
    skip_id = cur
    i = 0
    while stride > 1:
        if stride % 2 != 0:
            raise ConfigError('residual %s: total stride must be a power of 2.' % spec.name)
        pool = PoolSpec(name='%s.skip_pool%s' % (spec.name, i), window=2, stride=2, ceil_mode=True)
        skip_id = _build_pool(graph, pool, skip_id, rng)
        stride //= 2
        i += 1
    body_shape = graph.nodes[body].shape
    skip_shape = graph.nodes[skip_id].shape
    if skip_shape[0] < body_shape[0]:
        skip_id = graph.add_node('pad_channels', spec.name + '.skip_pad', [skip_id],
                                 (body_shape[0],) + skip_shape[1:], {'c_in': skip_shape[0]})
        skip_shape = graph.nodes[skip_id].shape
    if skip_shape != body_shape:
        raise ConfigError('residual %s: skip shape %s does not match body shape %s.'\
                          % (spec.name, skip_shape, body_shape))
    nid = graph.add_node('add', spec.name, [body, skip_id], body_shape)
    graph.branch_taps.append({'block': spec.name, 'skip': skip_id, 'conv': body, 'merged': nid})
    return nid

def _build_shuffle_block(graph, spec, cur, rng):
    shape = graph.nodes[cur].shape
    if len(shape) != 3 or shape[0] % 2 != 0:
        raise ConfigError('block %s needs an even number of channels, got %s.' % (spec.name, shape))
    half = (shape[0] // 2,) + shape[1:]
    head = graph.add_node('split', spec.name + '.split_conv', [cur], half, {'half': 0})
    tail = graph.add_node('split', spec.name + '.split_skip', [cur], half, {'half': 1})
    conv = _build_conv(graph, spec.conv, head, rng)
    conv_shape = graph.nodes[conv].shape
    if conv_shape[1:] != half[1:]:
        raise ConfigError('block %s: conv output %s does not keep the resolution %s.'\
                          % (spec.name, conv_shape, half[1:]))
    skip_id = tail
    if spec.delay is not None:
        theta_shape = skip.delay_shape(spec.delay.granularity, half)
        params = {'theta': graph.add_param(spec.name + '.theta',
                                           np.full(theta_shape, spec.delay.init), 'delay')}
        skip_id = graph.add_node('delay', spec.name + '.delay', [tail], half,
                                 {'granularity': spec.delay.granularity, 'block': spec.name},
                                 params)
        graph.overlap_pairs.append((conv, skip_id))
    c_total = conv_shape[0] + half[0]
    skip.shuffle_permutation(c_total, spec.groups)
    cat = graph.add_node('concat', spec.name + '.concat', [conv, skip_id],
                         (c_total,) + half[1:], {'n_first': conv_shape[0]})
    nid = graph.add_node('shuffle', spec.name, [cat], (c_total,) + half[1:], {'groups': spec.groups})
    graph.branch_taps.append({'block': spec.name, 'skip': skip_id, 'conv': conv, 'merged': nid})
    return nid

_BUILDERS = {'encoder': _build_encoder,
             'pool': _build_pool,
             'conv': _build_conv,
             'dense': _build_dense,
             'residual': _build_residual,
             'shuffle_block': _build_shuffle_block}

def build_graph(config, seed=0):
    '''
    Realize a ModelConfig as a graph with freshly initialized parameters.
    Args:
        config: ModelConfig or a dict/JSON string of one.
        seed: seed of the parameter initialization.
    Returns:
        Graph.
    '''
    if not isinstance(config, ModelConfig):
        from ..dataio.config import parse_model_config
        config = parse_model_config(config)
    if len(config.layers) == 0:
        raise ConfigError('model has no layers.')
    graph = Graph(config)
    rng = np.random.default_rng(seed)
    cur = graph.add_node('input', 'input', [], tuple(config.input_shape))
    for idx, spec in enumerate(config.layers):
        if spec.kind not in _BUILDERS:
            raise ConfigError('layer %s: unknown layer kind %s.' % (idx, spec.kind))
        try:
            cur = _BUILDERS[spec.kind](graph, spec, cur, rng)
        except ConfigError as e:
            raise ConfigError('layer %s (%s): %s' % (idx, spec.name, e))
    last = graph.nodes[-1]
    if last.kind != 'dense' or last.shape[0] != config.num_classes:
        raise ConfigError('layer %s: the last layer must be dense with %s outputs.'\
                          % (len(config.layers) - 1, config.num_classes))
    logger.debug('built %s graph: %s nodes, %s parameters',
                 config.arch, len(graph.nodes), graph.num_parameters())
    return graph

def _param(graph, node, role):
    return graph.params[node.params[role]].astype(np.float64)

def _encoder_params(graph, node):
    p = graph.params
    return encoder.EncoderParams(p[node.params['kernel']], p[node.params['bias']],
                                 p[node.params['bn_scale']], p[node.params['bn_shift']],
                                 graph.buffers[node.name + '.bn_mean'],
                                 graph.buffers[node.name + '.bn_var'])

def _forward_node(graph, node, xs, images, tape, update_stats):
    kind = node.kind
    if kind == 'input':
        return images, None
    x = xs[0]
    if kind == 'encoder':
        try:
            return encoder.encode_input(x, _encoder_params(graph, node), tape.training, update_stats)
        except NumericError as e:
            raise NumericError('node %s (%s): %s' % (node.id, node.name, e))
    if kind == 'pool':
        return temporal_layers.min_time_pool(x, node.attrs['window'], node.attrs['stride'],
                                             node.attrs['ceil_mode'])
    if kind == 'conv':
        return temporal_layers.temporal_conv2d(x, _param(graph, node, 'weight'),
                                               node.attrs['stride'], node.attrs['padding'])
    if kind == 'dense':
        t, cache = temporal_layers.temporal_dense(x.reshape((x.shape[0], -1)),
                                                  _param(graph, node, 'weight'))
        return t, (cache, x.shape)
    if kind == 'split':
        return skip.channel_split(x)[node.attrs['half']], x.shape
    if kind == 'delay':
        theta = graph.params[node.params['theta']]
        return skip.delay_apply(x, theta, node.attrs['granularity']), x
    if kind == 'concat':
        return skip.concat_channels(x, xs[1]), None
    if kind == 'shuffle':
        return skip.channel_shuffle(x, node.attrs['groups']), None
    if kind == 'add':
        out = skip.add_skip(x, xs[1])
        return out, out
    if kind == 'pad_channels':
        return skip.pad_channels(x, node.shape[0]), None
    raise ConfigError('node %s: unknown kind %s.' % (node.id, kind))

def forward(graph, images, training=False, update_stats=None, labels=None):
    '''
    Run the graph on a batch.
    Args:
        graph: Graph.
        images: (B, C, H, W) real images matching the graph input shape.
        training: encoder BN uses batch statistics if True.
        update_stats: update BN running statistics, defaults to training.
        labels: optional (B,) labels, kept on the tape.
    Returns:
        activations: list of output tensors indexed by node id; the last one holds
            the per-class output spike times (B, num_classes).
        tape: Tape for backward.
    '''
    images = np.asarray(images, dtype=np.float64)
    if images.ndim != 4 or images.shape[1:] != graph.input_shape:
        raise ContractError('batch shape %s does not match graph input %s.'\
                            % (images.shape, graph.input_shape))
    if update_stats is None:
        update_stats = training
    tape = Tape(training, images.shape[0], labels)
    acts = [None] * len(graph.nodes)
    for node in graph.nodes:
        xs = [acts[i] for i in node.inputs]
        acts[node.id], tape.entries[node.id] = _forward_node(graph, node, xs, images, tape,
                                                             update_stats)
    tape.activations = acts
    return acts, tape

def _median_live(t):
    live = t[t < T_MAX]
    return float(np.median(live)) if live.size else np.inf

def calibrate_init(graph, images, training=False, fire=CALIBRATION_FIRE,
                   growth=CALIBRATION_GROWTH, max_iter=CALIBRATION_MAX_ITER):
    '''
    Scale up the weights of every temporal layer, in graph order, until on the
    calibration images at least a fraction fire of its neurons spike and its
    median spike time lies at most T_MAX/(4*(L+1)) after the median time of its
    input, L being the number of temporal layers. BN running statistics are not
    touched.
    Args:
        graph: freshly built Graph, modified in place.
        images: (B, C, H, W) calibration batch.
        training: encoder BN uses batch statistics if True.
        fire: required fraction of spiking neurons per layer.
        growth: weight scale factor per iteration, > 1.
        max_iter: iterations per layer.
    Returns:
        OrderedDict layer name -> total weight scale.
    '''
    images = np.asarray(images, dtype=np.float64)
    if images.ndim != 4 or images.shape[1:] != graph.input_shape or images.shape[0] == 0:
        raise ContractError('calibration batch shape %s does not match graph input %s.'\
                            % (images.shape, graph.input_shape))
    step = T_MAX / (4.0 * (len(graph.temporal_nodes) + 1))
    temporal = set(graph.temporal_nodes)
    tape = Tape(training, images.shape[0])
    acts = [None] * len(graph.nodes)
    scales = OrderedDict()
    for node in graph.nodes:
        xs = [acts[i] for i in node.inputs]
        out = _forward_node(graph, node, xs, images, tape, False)[0]
        if node.id in temporal:
            t_in = _median_live(xs[0])
            weight = graph.params[node.params['weight']]
            scale = 1.0
            for _ in range(max_iter):
                if not np.isfinite(t_in):
                    logger.warning('calibration: no input spikes at %s.', node.name)
                    break
                if np.mean(out < T_MAX) >= fire and _median_live(out) <= t_in + step:
                    break
                weight *= np.float32(growth)
                scale *= growth
                out = _forward_node(graph, node, xs, images, tape, False)[0]
            else:
                logger.warning('calibration of %s stopped after %s iterations: %.1f%% fire.',
                               node.name, max_iter, 100.0 * np.mean(out < T_MAX))
            scales[node.name] = scale
        acts[node.id] = out
    logger.debug('calibrated weight scales: %s', dict(scales))
    return scales

def _backward_node(graph, node, cache, g):
    '''
    Returns:
        list of gradients for node.inputs (None for no gradient), dict of parameter gradients.
    '''
    kind = node.kind
    if kind == 'encoder':
        grads = encoder.encode_input_backward(cache, _encoder_params(graph, node), g)
        return [None], dict((node.params[r], grads[r]) for r in node.params)
    if kind == 'pool':
        return [temporal_layers.min_time_pool_backward(cache, g)], {}
    if kind == 'conv':
        g_x, g_w = temporal_layers.temporal_conv2d_backward(cache, _param(graph, node, 'weight'), g)
        return [g_x], {node.params['weight']: g_w}
    if kind == 'dense':
        dense_cache, in_shape = cache
        g_x, g_w = temporal_layers.temporal_dense_backward(dense_cache,
                                                           _param(graph, node, 'weight'), g)
        return [g_x.reshape(in_shape)], {node.params['weight']: g_w}
    if kind == 'split':
        g_x = np.zeros(cache)
        half = cache[1] // 2
        if node.attrs['half'] == 0:
            g_x[:, :half] = g
        else:
            g_x[:, half:] = g
        return [g_x], {}
    if kind == 'delay':
        theta = graph.params[node.params['theta']]
        g_x, g_theta = skip.delay_apply_backward(cache, theta, node.attrs['granularity'], g)
        return [g_x], {node.params['theta']: g_theta}
    if kind == 'concat':
        return list(skip.concat_channels_backward(g, node.attrs['n_first'])), {}
    if kind == 'shuffle':
        return [skip.channel_shuffle_backward(g, node.attrs['groups'])], {}
    if kind == 'add':
        return list(skip.add_skip_backward(cache, g)), {}
    if kind == 'pad_channels':
        return [skip.pad_channels_backward(g, node.attrs['c_in'])], {}
    return [None] * len(node.inputs), {}

def backward(graph, tape, loss_grads, param_grads=None):
    '''
    Reverse pass.
    Args:
        graph: Graph used in the forward.
        tape: Tape from the matching forward.
        loss_grads: dict node id -> gradient of the loss w.r.t. that node's output.
            Batch averaging is already part of these gradients.
        param_grads: optional dict name -> gradient added directly to parameters
            (e.g. from the weight penalty).
    Returns:
        OrderedDict parameter name -> float64 gradient, zeros for every parameter the
        loss does not reach.
    '''
    grads = OrderedDict((name, np.zeros(p.shape)) for name, p in graph.params.items())
    if param_grads is not None:
        for name, g in param_grads.items():
            grads[name] += g
    node_grads = [None] * len(graph.nodes)
    for nid, g in loss_grads.items():
        node_grads[nid] = g if node_grads[nid] is None else node_grads[nid] + g
    for node in reversed(graph.nodes):
        g = node_grads[node.id]
        if g is None or node.kind == 'input':
            continue
        if node.id not in tape.entries:
            raise ContractError('tape has no entry for node %s (%s).' % (node.id, node.name))
        in_grads, p_grads = _backward_node(graph, node, tape.entries[node.id], g)
        for i, gi in zip(node.inputs, in_grads):
            if gi is None:
                continue
            node_grads[i] = gi if node_grads[i] is None else node_grads[i] + gi
        for name, gp in p_grads.items():
            grads[name] += gp
        node_grads[node.id] = None
    return grads
