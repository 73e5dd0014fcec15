"""
Matrix Parser - the line-oriented matrix text format.

    <field spec>
    <row 1 entries, space separated>
    ...

Integer matrices (Hadamard artifacts) use the header "ZZ" and signed integers.
"""
from pathlib import Path
from typing import List, Union

import numpy as np

from parsers.field_parser import FieldParser, ParseError, read_text
from services.ffield import FieldSpec
from services.matrix import FMatrix

INTEGER_HEADER = "ZZ"


class MatrixParser:
    """Reader/writer for matrices over a field and for integer matrices."""

    def __init__(self, display: str = "poly"):
        self.display = display
        self.fields = FieldParser()

    def parse_file(self, file_path: Union[str, Path]) -> FMatrix:
        return self.parse_content(read_text(file_path))

    def parse_content(self, content: str) -> FMatrix:
        lines = self._lines(content)
        if not lines:
            raise ParseError("empty matrix file")
        spec = self.fields.parse_field(lines[0])
        return self.parse_rows(spec, lines[1:])

    def parse_rows(self, spec: FieldSpec, lines: List[str]) -> FMatrix:
        rows = [[self.fields.parse_element(spec, tok) for tok in line.split()] for line in lines]
        if len({len(r) for r in rows}) > 1:
            raise ParseError("matrix rows have different lengths")
        return FMatrix.from_rows(spec, rows)

    def parse_integer_file(self, file_path: Union[str, Path]) -> np.ndarray:
        return self.parse_integer_content(read_text(file_path))

    def parse_integer_content(self, content: str) -> np.ndarray:
        lines = self._lines(content)
        if not lines or lines[0] != INTEGER_HEADER:
            raise ParseError(f"integer matrix files start with '{INTEGER_HEADER}'")
        try:
            rows = [[int(tok) for tok in line.split()] for line in lines[1:]]
        except ValueError as e:
            raise ParseError(f"bad integer entry: {e}")
        if len({len(r) for r in rows}) > 1:
            raise ParseError("matrix rows have different lengths")
        return np.array(rows, dtype=np.int64)

    def dump_rows(self, m: FMatrix) -> List[str]:
        return [" ".join(self.fields.format_element(e, self.display) for e in row)
                for row in m.entries()]

    def dump(self, m: FMatrix) -> str:
        return "\n".join([self.fields.format_field(m.spec)] + self.dump_rows(m)) + "\n"

    @staticmethod
    def dump_integer(h: np.ndarray) -> str:
        rows = [" ".join(str(int(v)) for v in row) for row in np.asarray(h)]
        return "\n".join([INTEGER_HEADER] + rows) + "\n"

    @staticmethod
    def _lines(content: str) -> List[str]:
        return [line.strip() for line in content.splitlines() if line.strip()]
