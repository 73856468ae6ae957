# -*- coding: utf-8 -*-
# Filename: container.py

"""
Dataset container, all fields little-endian:
    8 bytes     magic b'TTFSDS1\\0'
    u32         sample count N
    u32         number of sample dims D
    D x u32     sample dims
    f32         N * prod(dims) sample values
    u16         N labels
    u32         CRC32 of every preceding byte
Created on 2026-09-10
"""

import struct
import zlib
import numpy as np
from ..errors import IntegrityError, ParseError

MAGIC = b'TTFSDS1\x00'

def encode_dataset(samples, labels):
    '''
    Serialize samples (N, *dims) and labels (N,) to bytes.
    '''
    samples = np.asarray(samples, dtype='<f4')
    labels = np.asarray(labels)
    if samples.ndim < 1 or labels.shape != (samples.shape[0],):
        raise ValueError('samples %s and labels %s do not match.' % (samples.shape, labels.shape))
    if labels.size and (labels.min() < 0 or labels.max() > 0xFFFF):
        raise ValueError('labels must fit in u16.')
    dims = samples.shape[1:]
    header = MAGIC + struct.pack('<II', samples.shape[0], len(dims)) +\
             struct.pack('<%dI' % len(dims), *dims)
    body = header + samples.tobytes() + labels.astype('<u2').tobytes()
    return body + struct.pack('<I', zlib.crc32(body) & 0xFFFFFFFF)

def decode_dataset(buf):
    '''
    Parse bytes written by encode_dataset.
    Returns:
        samples: (N, *dims) float32 array.
        labels: (N,) int64 array.
    '''
    if len(buf) < 16:
        raise ParseError('truncated header: %s bytes at offset 0.' % len(buf))
    if buf[:8] != MAGIC:
        raise ParseError('bad magic %r at offset 0.' % buf[:8])
    n, ndims = struct.unpack_from('<II', buf, 8)
    offset = 16
    if len(buf) < offset + 4 * ndims:
        raise ParseError('truncated dims at offset %s.' % offset)
    dims = struct.unpack_from('<%dI' % ndims, buf, offset)
    offset += 4 * ndims
    n_values = n * int(np.prod(dims, dtype=np.int64))
    expected = offset + 4 * n_values + 2 * n + 4
    if len(buf) != expected:
        raise ParseError('size mismatch at offset %s: header declares %s bytes, file has %s.'\
                         % (offset, expected, len(buf)))
    crc = struct.unpack_from('<I', buf, len(buf) - 4)[0]
    if zlib.crc32(buf[:-4]) & 0xFFFFFFFF != crc:
        raise IntegrityError('CRC32 mismatch: stored %08x.' % crc)
    samples = np.frombuffer(buf, dtype='<f4', count=n_values, offset=offset)
    labels = np.frombuffer(buf, dtype='<u2', count=n, offset=offset + 4 * n_values)
    return samples.astype(np.float32).reshape((n,) + tuple(dims)), labels.astype(np.int64)

def write_dataset(path, samples, labels):
    with open(path, 'wb') as f:
        f.write(encode_dataset(samples, labels))

def read_dataset(path):
    with open(path, 'rb') as f:
        return decode_dataset(f.read())
