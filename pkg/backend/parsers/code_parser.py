"""
Code Parser - "code n=<n> k=<t>" followed by a generator in the matrix format.
"""
import re
from pathlib import Path
from typing import Union

from parsers.field_parser import ParseError, read_text
from parsers.matrix_parser import MatrixParser
from services.lincode import LinearCode
from services.matrix import FMatrix


class CodeParser:
    """Reader/writer for linear code files; the reader checks rank and header."""

    HEADER_PATTERN = re.compile(r'^code\s+n=(\d+)\s+k=(\d+)$')

    def __init__(self, display: str = "poly"):
        self.matrices = MatrixParser(display)

    def parse_file(self, file_path: Union[str, Path]) -> LinearCode:
        return self.parse_content(read_text(file_path))

    def parse_content(self, content: str) -> LinearCode:
        lines = [line.strip() for line in content.splitlines() if line.strip()]
        if len(lines) < 2:
            raise ParseError("code file needs a header and a field spec")
        match = self.HEADER_PATTERN.match(lines[0])
        if not match:
            raise ParseError(f"bad code header: '{lines[0]}'")
        n, t = int(match.group(1)), int(match.group(2))
        spec = self.matrices.fields.parse_field(lines[1])
        gen = self.matrices.parse_rows(spec, lines[2:]) if t else FMatrix.zeros(spec, 0, n)
        if gen.shape != (t, n):
            raise ParseError(f"header says n={n} k={t}, generator has shape {gen.shape}")
        return LinearCode(gen)

    def dump(self, code: LinearCode) -> str:
        header = f"code n={code.n} k={code.dimension}"
        return header + "\n" + self.matrices.dump(code.gen)
