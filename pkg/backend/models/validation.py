"""
Pydantic models for command inputs and machine-readable records.

Records are serialized with orjson using sorted keys, so identical inputs give
byte-identical output lines.
"""
from pathlib import Path
from typing import Dict, List, Literal, Optional

import orjson
from pydantic import BaseModel, Field, field_validator


# ============= Command Models =============

class CommandConfig(BaseModel):
    """Validated options shared by every CLI command."""
    subcommand: str = Field(..., min_length=1)
    field: Optional[str] = Field(
        default=None,
        pattern=r'^GF\(\d+(\^\d+(;[0-9,]+)?)?\)$',
        description="Field spec string, e.g. GF(7) or GF(3^2;1,0,1)"
    )
    inputs: List[Path] = Field(default_factory=list)
    output: Optional[Path] = None
    seed: int = Field(default=0, ge=0)
    cap: int = Field(default=10**7, ge=1, description="Enumeration cap")
    form: Literal["euclidean", "hermitian"] = "euclidean"
    output_format: Literal["table", "record"] = "table"
    display: Literal["poly", "power"] = "poly"

    @field_validator('field', mode='before')
    @classmethod
    def strip_spaces(cls, v):
        return v.replace(' ', '') if isinstance(v, str) else v

    @field_validator('inputs')
    @classmethod
    def inputs_exist(cls, v: List[Path]) -> List[Path]:
        missing = [str(p) for p in v if not p.exists()]
        if missing:
            raise ValueError(f"input files not found: {', '.join(missing)}")
        return v


# ============= Record Models =============

class CheckRecord(BaseModel):
    """One named check and its outcome."""
    name: str
    passed: bool
    detail: str = ""


class CertificateRecord(BaseModel):
    """Summary of a congruence certificate."""
    field: str
    flavor: str
    form: str
    k: int = Field(ge=0)
    gram_diagonal: List[str]
    source_nsc: bool
    degenerate: bool = False
    checks: List[CheckRecord]


class ConstructRecord(BaseModel):
    """Output of one construct command."""
    kind: str
    field: Optional[str] = None
    matrix: List[List[str]]
    certificate: Optional[CertificateRecord] = None
    notes: Dict[str, str] = Field(default_factory=dict)


class QuantumParamsRecord(BaseModel):
    n: int = Field(ge=0)
    k: int
    d_lower: int = Field(ge=1)
    base_q: int = Field(ge=2)
    provenance: str
    singleton_ok: bool


class PipelineRecord(BaseModel):
    """Machine-readable pipeline report; field names are stable."""
    field: str
    form: str
    k: int = Field(ge=1)
    n: int = Field(ge=1)
    length: int = Field(ge=1)
    tau: List[int]
    dimensions: List[int]
    constituent_distances: List[Optional[int]]
    profile: List[int]
    profile_source: Literal["nsc", "enumerated", "trivial"]
    d_lower: int = Field(ge=1)
    exact_distance: Optional[int] = None
    checks: List[CheckRecord]
    quantum: QuantumParamsRecord


def dump_record(record: BaseModel) -> bytes:
    """One JSON line with sorted keys."""
    return orjson.dumps(record.model_dump(mode="json"), option=orjson.OPT_SORT_KEYS)
