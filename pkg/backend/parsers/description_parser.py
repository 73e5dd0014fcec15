"""
Description Parser - a matrix-product code instance as file references.

    code <path>      (one line per constituent, in order)
    matrix <path>

Relative paths resolve against the description file's directory.
"""
from pathlib import Path
from typing import List, Tuple, Union

from parsers.code_parser import CodeParser
from parsers.field_parser import ParseError, read_text
from parsers.matrix_parser import MatrixParser
from services.lincode import LinearCode
from services.matrix import FMatrix


class DescriptionParser:
    """Loads constituents and a defining matrix and checks they fit together."""

    def __init__(self):
        self.codes = CodeParser()
        self.matrices = MatrixParser()

    def parse_file(self, file_path: Union[str, Path]) -> Tuple[List[LinearCode], FMatrix]:
        path = Path(file_path)
        return self.parse_content(read_text(path), base_dir=path.parent)

    def parse_content(self, content: str, base_dir: Union[str, Path] = ".") -> Tuple[List[LinearCode], FMatrix]:
        base = Path(base_dir)
        code_paths, matrix_path = [], None
        for line in content.splitlines():
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            kind, _, ref = line.partition(' ')
            ref = ref.strip()
            if kind == "code" and ref and matrix_path is None:
                code_paths.append(base / ref)
            elif kind == "matrix" and ref and matrix_path is None:
                matrix_path = base / ref
            else:
                raise ParseError(f"unexpected description line: '{line}'")
        if not code_paths or matrix_path is None:
            raise ParseError("description needs at least one 'code' line followed by a 'matrix' line")

        codes = [self.codes.parse_file(p) for p in code_paths]
        a = self.matrices.parse_file(matrix_path)
        if len(codes) != a.rows:
            raise ParseError(f"{len(codes)} codes for a matrix with {a.rows} rows")
        for p, c in zip(code_paths, codes):
            if c.spec != a.spec:
                raise ParseError(f"{p} is over {c.spec}, the matrix over {a.spec}")
            if c.n != codes[0].n:
                raise ParseError(f"{p} has length {c.n}, expected {codes[0].n}")
        return codes, a

    @staticmethod
    def dump(code_paths: List[str], matrix_path: str) -> str:
        lines = [f"code {p}" for p in code_paths] + [f"matrix {matrix_path}"]
        return "\n".join(lines) + "\n"
