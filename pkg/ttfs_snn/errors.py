# -*- coding: utf-8 -*-
# Filename: errors.py

"""
Typed errors raised by ttfs_snn.
Each one subclasses the built-in exception that would otherwise be raised, so
callers catching ValueError or IOError keep working.
Created on 2026-09-02
"""

class DomainError(ValueError):
    '''
    An argument is outside the domain of the operation (negative time, z < 1, eps = 0).
    '''
    pass

class ContractError(ValueError):
    '''
    A caller broke a call contract (mismatched lengths, missing tape entries).
    '''
    pass

class ConfigError(ValueError):
    '''
    Invalid architecture, schema violation or physically invalid simulation setup.
    '''
    pass

class NumericError(ArithmeticError):
    '''
    Non-finite values produced where only finite values are allowed.
    '''
    pass

class ParseError(ValueError):
    '''
    Malformed binary input.
    '''
    pass

class IntegrityError(IOError):
    '''
    Checksum mismatch on a binary container.
    '''
    pass

class CheckpointError(ValueError):
    '''
    A checkpoint cannot be matched to the model it should restore.
    '''
    pass

class VersionError(CheckpointError):
    '''
    Checkpoint written by an incompatible format version.
    '''
    pass
