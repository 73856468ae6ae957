# -*- coding: utf-8 -*-
# Filename: config.py

"""
Run configuration: a JSON document with a "train" and a "model" section.
Every field has a default, unknown keys are rejected.

    {
        "train": {"epochs": 100, "batch_size": 128, "lr0": 6e-4, ...},
        "model": {"input_shape": [1, 28, 28], "num_classes": 10, "width": 32}
    }

If "model" has no "layers", the layer list of train.arch is generated by
make_architecture.
Created on 2026-09-09
"""

import json
from typing import List, Literal, Optional, Tuple
from pydantic import (BaseModel, ConfigDict, Field, NonNegativeFloat, NonNegativeInt,
                      PositiveFloat, PositiveInt, ValidationError)
from ..errors import ConfigError
from ..layers.architecture import LayerSpec, ModelConfig, make_architecture

class TrainConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    epochs: PositiveInt = 100
    batch_size: PositiveInt = 128
    eval_batch_size: PositiveInt = 256
    lr0: PositiveFloat = 6.0e-4
    weight_decay: NonNegativeFloat = 1.0e-3
    lambda1: NonNegativeFloat = 1.0
    lambda2: NonNegativeFloat = 1.0e-6
    clip_norm: PositiveFloat = 5.0
    seed: NonNegativeInt = 0
    arch: Literal['baseline', 'add_skip', 'concat_skip', 'concat_skip_delay'] = 'concat_skip_delay'
    delay_granularity: Literal['layer', 'channel', 'pixel'] = 'channel'
    delay_init: NonNegativeFloat = 0.5
    train_subset: Optional[PositiveInt] = None
    calibration_samples: NonNegativeInt = 64    # 0 keeps the raw initialization

class ModelSection(BaseModel):
    model_config = ConfigDict(extra='forbid')

    input_shape: Tuple[PositiveInt, PositiveInt, PositiveInt] = (1, 28, 28)
    num_classes: PositiveInt = 10
    width: PositiveInt = 32
    layers: Optional[List[LayerSpec]] = None

class RunConfig(BaseModel):
    model_config = ConfigDict(extra='forbid')

    train: TrainConfig = Field(default_factory=TrainConfig)
    model: ModelSection = Field(default_factory=ModelSection)

def pointer_messages(exc):
    '''
    One "JSON-pointer: message" line per violation of a pydantic ValidationError.
    '''
    lines = []
    for err in exc.errors():
        pointer = '/' + '/'.join(str(i) for i in err['loc'])
        lines.append('%s: %s' % (pointer, err['msg']))
    return '\n'.join(lines)

def parse_model_config(data):
    '''
    Validate a ModelConfig given as a dict or a JSON string.
    '''
    try:
        if isinstance(data, (str, bytes)):
            return ModelConfig.model_validate_json(data)
        return ModelConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError('invalid model config:\n%s' % pointer_messages(e))

def parse_config(data, input_shape=None, num_classes=None):
    '''
    Validate a run configuration.
    Args:
        data: dict of the JSON document.
        input_shape: overrides model.input_shape, e.g. with the shape of the dataset.
        num_classes: overrides model.num_classes.
    Returns:
        (TrainConfig, ModelConfig)
    '''
    try:
        run = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError('invalid config:\n%s' % pointer_messages(e))
    model = run.model
    shape = tuple(input_shape) if input_shape is not None else tuple(model.input_shape)
    classes = num_classes if num_classes is not None else model.num_classes
    if model.layers is None:
        cfg = make_architecture(run.train.arch, shape, classes, run.train.delay_granularity,
                                run.train.delay_init, model.width)
    else:
        cfg = ModelConfig(arch='custom', input_shape=shape, num_classes=classes,
                          layers=model.layers)
    return run.train, cfg

def load_config(path, input_shape=None, num_classes=None):
    '''
    Read and validate a JSON run configuration file.
    Returns:
        (TrainConfig, ModelConfig)
    '''
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except ValueError as e:
        raise ConfigError('%s is not valid JSON: %s' % (path, e))
    if not isinstance(data, dict):
        raise ConfigError('%s: top level must be an object.' % path)
    return parse_config(data, input_shape, num_classes)

def dump_config(train_cfg, model_cfg):
    '''
    JSON document that load_config reads back into the same configs.
    '''
    doc = {'train': train_cfg.model_dump(),
           'model': {'input_shape': list(model_cfg.input_shape),
                     'num_classes': model_cfg.num_classes,
                     'layers': [l.model_dump() for l in model_cfg.layers]}}
    return json.dumps(doc, indent=2)
