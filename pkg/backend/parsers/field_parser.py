"""
Field Parser - textual field specs and elements.

    GF(p)               prime field
    GF(p^m)             smallest irreducible modulus
    GF(p^m;c0,...,1)    explicit modulus, low-to-high

Elements are integers (prime subfield), poly:[c0,...,c_(m-1)] or g^k.
"""
import re
from pathlib import Path
from typing import Optional, Union

from services.errors import PreconditionError
from services.ffield import FieldElement, FieldSpec, format_element, make_field, primitive_element


class ParseError(PreconditionError):
    """Malformed input text."""


def read_text(file_path: Union[str, Path]) -> str:
    """Read a UTF-8 file, tolerating a byte-order mark."""
    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            content = f.read()
    except UnicodeDecodeError:
        with open(file_path, 'r', encoding='utf-8-sig') as f:
            content = f.read()
    except FileNotFoundError:
        raise ParseError(f"no such file: {file_path}")
    return content.lstrip('\ufeff')


class FieldParser:
    """Parser for field specs and element tokens."""

    FIELD_PATTERN = re.compile(r'^GF\((\d+)(?:\^(\d+)(?:;([0-9,\s]+))?)?\)$')
    POLY_PATTERN = re.compile(r'^poly:\[([0-9,\s]*)\]$')
    POWER_PATTERN = re.compile(r'^g\^(\d+)$')
    INT_PATTERN = re.compile(r'^-?\d+$')

    def parse_field(self, text: str, quadratic: Optional[bool] = None) -> FieldSpec:
        """
        Parse a field spec string.

        Args:
            text: e.g. "GF(7)" or "GF(3^2;1,0,1)"
            quadratic: declare GF(p^m) quadratic over GF(p^(m/2)); None means "when m is even"

        Returns:
            The FieldSpec
        """
        match = self.FIELD_PATTERN.match(text.strip().replace(' ', ''))
        if not match:
            raise ParseError(f"not a field spec: '{text}'")
        p = int(match.group(1))
        m = int(match.group(2) or 1)
        modulus = None
        if match.group(3):
            modulus = [int(c) for c in match.group(3).split(',') if c.strip()]
        if quadratic is None:
            quadratic = m % 2 == 0
        return make_field(p, m, modulus=modulus, quadratic=quadratic)

    def parse_element(self, spec: FieldSpec, token: str) -> FieldElement:
        token = token.strip()
        if self.INT_PATTERN.match(token):
            value = int(token)
            if spec.m == 1:
                return spec.from_int(value)
            if not 0 <= value < spec.p:
                raise ParseError(f"integer token '{token}' outside the prime subfield of {spec}")
            return spec.from_int(value)
        match = self.POLY_PATTERN.match(token)
        if match:
            coeffs = [int(c) for c in match.group(1).split(',') if c.strip()]
            return spec.from_coeffs(coeffs)
        match = self.POWER_PATTERN.match(token)
        if match:
            return primitive_element(spec) ** int(match.group(1))
        raise ParseError(f"not an element of {spec}: '{token}'")

    @staticmethod
    def format_field(spec: FieldSpec) -> str:
        return str(spec)

    @staticmethod
    def format_element(a: FieldElement, display: str = "poly") -> str:
        return format_element(a, display)
