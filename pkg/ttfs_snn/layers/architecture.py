# -*- coding: utf-8 -*-
# Filename: architecture.py

"""
Layer specifications of a network and the four reference architectures:
baseline, addition skip, concatenation skip and concatenation skip with delays.
Created on 2026-09-05
"""

from typing import Annotated, List, Literal, Optional, Tuple, Union
from pydantic import BaseModel, ConfigDict, Field, NonNegativeFloat, PositiveInt
from ..errors import ConfigError

ARCHITECTURES = ('baseline', 'add_skip', 'concat_skip', 'concat_skip_delay')

class _Spec(BaseModel):
    model_config = ConfigDict(extra='forbid')

class EncoderSpec(_Spec):
    '''
    Real-valued conv + BN + ReLU whose output is read as spike times.
    '''
    kind: Literal['encoder'] = 'encoder'
    name: str = 'conv1'
    out_channels: PositiveInt
    kernel: PositiveInt = 3

class PoolSpec(_Spec):
    kind: Literal['pool'] = 'pool'
    name: str = 'pool1'
    window: PositiveInt = 2
    stride: PositiveInt = 2
    ceil_mode: bool = False

class ConvSpec(_Spec):
    kind: Literal['conv'] = 'conv'
    name: str
    out_channels: PositiveInt
    kernel: PositiveInt = 3
    stride: PositiveInt = 1
    padding: int = Field(default=1, ge=0)

class DelaySpec(_Spec):
    granularity: Literal['layer', 'channel', 'pixel'] = 'channel'
    init: NonNegativeFloat = 0.5

class ResidualSpec(_Spec):
    '''
    Addition skip around a chain of convolutions. The skip path is min-time pooled
    once per stride-2 conv and padded with t = 0 channels to match the body.
    '''
    kind: Literal['residual'] = 'residual'
    name: str
    body: List[ConvSpec] = Field(min_length=1)

class ShuffleBlockSpec(_Spec):
    '''
    Concatenation skip: split channels, convolve the first half, optionally delay
    the second half, concatenate and shuffle.
    '''
    kind: Literal['shuffle_block'] = 'shuffle_block'
    name: str
    conv: ConvSpec
    delay: Optional[DelaySpec] = None
    groups: PositiveInt = 2

class DenseSpec(_Spec):
    kind: Literal['dense'] = 'dense'
    name: str = 'fc'
    out_features: PositiveInt

LayerSpec = Annotated[Union[EncoderSpec, PoolSpec, ConvSpec, ResidualSpec,
                            ShuffleBlockSpec, DenseSpec], Field(discriminator='kind')]

class ModelConfig(_Spec):
    '''
    Complete description of a network. Embedded as JSON in checkpoints.
    '''
    arch: str = 'custom'
    input_shape: Tuple[PositiveInt, PositiveInt, PositiveInt] = (1, 28, 28)
    num_classes: PositiveInt = 10
    layers: List[LayerSpec] = []

    def to_json(self):
        return self.model_dump_json()

    @classmethod
    def from_json(cls, text):
        return cls.model_validate_json(text)

def make_architecture(kind, dataset_shape, num_classes=10, delay_granularity='channel',
                      delay_init=0.5, width=32):
    '''
    Build the layer list of one of the reference architectures:
        conv1(3x3, w) - pool(2) - conv2(w, stride 2) - conv3(w) - conv4(2w, stride 2)
        - conv5(2w) - fc(num_classes)
    add_skip wraps (conv2, conv3) and (conv4, conv5) in addition skips. The
    concatenation variants turn the stride-1 conv3 and conv5 into shuffle blocks,
    with a delay on the skip half for concat_skip_delay.
    Args:
        kind: one of ARCHITECTURES.
        dataset_shape: (C, H, W) of the input images.
        num_classes: number of output neurons.
        delay_granularity: 'layer', 'channel' or 'pixel'.
        delay_init: initial delay value.
        width: channels of conv1..conv3, conv4/conv5 use 2*width. Must be even.
    Returns:
        ModelConfig.
    '''
    if kind not in ARCHITECTURES:
        raise ConfigError('unknown architecture: %s. Supported: %s' % (kind, ', '.join(ARCHITECTURES)))
    if width < 2 or width % 2 != 0:
        raise ConfigError('width must be a positive even number, got %s.' % width)
    if delay_granularity not in ('layer', 'channel', 'pixel'):
        raise ConfigError('unknown delay granularity: %s' % delay_granularity)
    if delay_init < 0.0:
        raise ConfigError('initial delay must be >= 0, got %s.' % delay_init)
    w = width
    head = [EncoderSpec(name='conv1', out_channels=w), PoolSpec(name='pool1')]
    conv2 = ConvSpec(name='conv2', out_channels=w, stride=2)
    conv4 = ConvSpec(name='conv4', out_channels=2 * w, stride=2)
    if kind == 'baseline':
        body = [conv2, ConvSpec(name='conv3', out_channels=w),
                conv4, ConvSpec(name='conv5', out_channels=2 * w)]
    elif kind == 'add_skip':
        body = [ResidualSpec(name='res1', body=[conv2, ConvSpec(name='conv3', out_channels=w)]),
                ResidualSpec(name='res2', body=[conv4, ConvSpec(name='conv5', out_channels=2 * w)])]
    else:
        delay = None
        if kind == 'concat_skip_delay':
            delay = DelaySpec(granularity=delay_granularity, init=delay_init)
        body = [conv2,
                ShuffleBlockSpec(name='block1', conv=ConvSpec(name='conv3', out_channels=w // 2),
                                 delay=delay),
                conv4,
                ShuffleBlockSpec(name='block2', conv=ConvSpec(name='conv5', out_channels=w),
                                 delay=delay)]
    layers = head + body + [DenseSpec(name='fc', out_features=num_classes)]
    return ModelConfig(arch=kind, input_shape=tuple(dataset_shape), num_classes=num_classes,
                       layers=layers)
