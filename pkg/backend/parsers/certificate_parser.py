"""
Certificate Parser - congruence certificates as text.

    <field spec>
    flavor <lower-unitriangular|upper-unitriangular|general|congruence>
    form <euclidean|hermitian>
    source_nsc <true|false>
    degenerate <true|false>
    source
    <k rows>
    transform
    <k rows>
    result
    <k rows>
    gram
    <k entries on one line>

Loading never verifies; call verify() on the result.
"""
from pathlib import Path
from typing import Dict, List, Union

from parsers.field_parser import ParseError, read_text
from parsers.matrix_parser import MatrixParser
from services.construct import CongruenceCertificate, Flavor
from services.matrix import Form

SECTIONS = ("source", "transform", "result", "gram")
FLAGS = ("flavor", "form", "source_nsc", "degenerate")


class CertificateParser:
    """Reader/writer for CongruenceCertificate files."""

    def __init__(self, display: str = "poly"):
        self.matrices = MatrixParser(display)

    def parse_file(self, file_path: Union[str, Path]) -> CongruenceCertificate:
        return self.parse_content(read_text(file_path))

    def parse_content(self, content: str) -> CongruenceCertificate:
        lines = [line.strip() for line in content.splitlines() if line.strip()]
        if not lines:
            raise ParseError("empty certificate file")
        spec = self.matrices.fields.parse_field(lines[0])
        flags: Dict[str, str] = {}
        sections: Dict[str, List[str]] = {}
        current = None
        for line in lines[1:]:
            word, _, rest = line.partition(' ')
            if word in FLAGS and rest and current is None:
                flags[word] = rest.strip()
            elif line in SECTIONS:
                if line in sections:
                    raise ParseError(f"duplicate section '{line}'")
                current = line
                sections[current] = []
            elif current is not None:
                sections[current].append(line)
            else:
                raise ParseError(f"unexpected line before the first section: '{line}'")

        missing = [name for name in FLAGS[:2] if name not in flags]
        missing += [name for name in SECTIONS if name not in sections]
        if missing:
            raise ParseError(f"certificate is missing {missing}")
        if len(sections["gram"]) != 1:
            raise ParseError("gram section must be a single line")
        try:
            flavor, form = Flavor(flags["flavor"]), Form(flags["form"])
        except ValueError as e:
            raise ParseError(str(e))

        gram = sections["gram"][0].split()
        return CongruenceCertificate(
            source=self.matrices.parse_rows(spec, sections["source"]),
            transform=self.matrices.parse_rows(spec, sections["transform"]),
            result=self.matrices.parse_rows(spec, sections["result"]),
            gram_diagonal=tuple(self.matrices.fields.parse_element(spec, tok) for tok in gram),
            flavor=flavor,
            form=form,
            source_nsc=self._flag(flags, "source_nsc"),
            degenerate=self._flag(flags, "degenerate"),
        )

    def dump(self, cert: CongruenceCertificate) -> str:
        fmt = self.matrices.fields.format_element
        display = self.matrices.display
        lines = [
            self.matrices.fields.format_field(cert.spec),
            f"flavor {cert.flavor.value}",
            f"form {cert.form.value}",
            f"source_nsc {str(cert.source_nsc).lower()}",
            f"degenerate {str(cert.degenerate).lower()}",
        ]
        for name, m in (("source", cert.source), ("transform", cert.transform), ("result", cert.result)):
            lines.append(name)
            lines.extend(self.matrices.dump_rows(m))
        lines.append("gram")
        lines.append(" ".join(fmt(d, display) for d in cert.gram_diagonal))
        return "\n".join(lines) + "\n"

    @staticmethod
    def _flag(flags: Dict[str, str], name: str) -> bool:
        value = flags.get(name, "false").lower()
        if value not in ("true", "false"):
            raise ParseError(f"{name} must be true or false, got '{value}'")
        return value == "true"
