# -*- coding: utf-8 -*-
# Filename: idx.py

"""
Reader of the big-endian IDX files MNIST and Fashion-MNIST are distributed in.
Plain and gzip-compressed files are supported.
Created on 2026-09-10
"""

import gzip
import struct
import numpy as np
from ..errors import ParseError

IDX_IMAGES = 0x00000803
IDX_LABELS = 0x00000801

def _open(path):
    if str(path).endswith('.gz'):
        return gzip.open(path, 'rb')
    return open(path, 'rb')

def parse_idx(buf, magic):
    '''
    Parse an IDX byte buffer of unsigned bytes.
    Args:
        buf: file contents.
        magic: expected magic number, IDX_IMAGES or IDX_LABELS.
    Returns:
        uint8 array with the dims of the header.
    '''
    if len(buf) < 4:
        raise ParseError('truncated magic at offset 0.')
    found = struct.unpack_from('>I', buf, 0)[0]
    if found != magic:
        raise ParseError('bad magic 0x%08x at offset 0, expected 0x%08x.' % (found, magic))
    ndims = magic & 0xFF
    if len(buf) < 4 + 4 * ndims:
        raise ParseError('truncated dims at offset 4.')
    dims = struct.unpack_from('>%dI' % ndims, buf, 4)
    offset = 4 + 4 * ndims
    count = int(np.prod(dims, dtype=np.int64))
    if len(buf) - offset < count:
        raise ParseError('truncated data at offset %s: %s bytes declared, %s present.'\
                         % (offset, count, len(buf) - offset))
    return np.frombuffer(buf, dtype=np.uint8, count=count, offset=offset).reshape(dims)

def read_idx(image_path, label_path):
    '''
    Read an image file and its label file.
    Returns:
        images: (N, H, W) float32 in [0, 1].
        labels: (N,) int64.
    '''
    with _open(image_path) as f:
        images = parse_idx(f.read(), IDX_IMAGES)
    with _open(label_path) as f:
        labels = parse_idx(f.read(), IDX_LABELS)
    if images.shape[0] != labels.shape[0]:
        raise ParseError('dim mismatch at offset 4: %s images but %s labels.'\
                         % (images.shape[0], labels.shape[0]))
    return images.astype(np.float32) / 255.0, labels.astype(np.int64)
