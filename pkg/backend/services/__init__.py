"""
Services package initialization.
"""
from . import construct, ffield, lincode, matrix, mpc, quantum
from .errors import EnumerationCapError, PreconditionError, ToolkitError, VerificationError

__all__ = ['ffield', 'matrix', 'lincode', 'mpc', 'construct', 'quantum',
           'ToolkitError', 'PreconditionError', 'VerificationError', 'EnumerationCapError']
