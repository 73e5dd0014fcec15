"""
Parsers package initialization.
"""
from .field_parser import FieldParser, ParseError, read_text
from .matrix_parser import MatrixParser
from .code_parser import CodeParser
from .certificate_parser import CertificateParser
from .description_parser import DescriptionParser

__all__ = ['FieldParser', 'ParseError', 'read_text', 'MatrixParser', 'CodeParser',
           'CertificateParser', 'DescriptionParser']
