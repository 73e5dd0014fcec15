"""
ffcodes - command-line front end for the finite-field code toolkit.

Exit status: 0 when every check passed, 2 when an input was rejected,
3 when a computed object failed verification.
"""
import functools
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional, Union

import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from config import Config, validate_config
from models.validation import (
    CertificateRecord,
    CheckRecord,
    CommandConfig,
    ConstructRecord,
    PipelineRecord,
    QuantumParamsRecord,
    dump_record,
)
from parsers import (
    CertificateParser,
    CodeParser,
    DescriptionParser,
    FieldParser,
    MatrixParser,
    read_text,
)
from services import construct, quantum
from services.construct import Check, CongruenceCertificate
from services.errors import PreconditionError, VerificationError
from services.ffield import FieldSpec, format_element, primitive_element
from services.lincode import min_distance
from services.logger import command_context, get_logger
from services.matrix import FMatrix, Form, is_nsc
from services.mpc import build

logger = get_logger(__name__)

EXIT_PRECONDITION = 2
EXIT_VERIFICATION = 3

app = typer.Typer(
    name="ffcodes",
    help="Exact finite-field constructions for matrix-product and quantum codes.",
    add_completion=False,
    no_args_is_help=True,
)
console = Console()
err_console = Console(stderr=True)

CERTIFIED_KINDS = {
    "lower-qo": construct.lower_quasi_orthogonalize,
    "upper-qo": construct.upper_quasi_orthogonalize,
    "lower-qu": construct.lower_quasi_unitarize,
    "upper-qu": construct.upper_quasi_unitarize,
    "qo": construct.quasi_orthogonalize,
    "qu": construct.quasi_unitarize,
    "unitarize": construct.unitarize,
    "symmetric-diag": construct.symmetric_diagonalize,
    "hermitian-diag": construct.hermitian_diagonalize,
}
OTHER_KINDS = (
    "sum", "hsum", "paley", "sylvester", "reduce-hadamard", "agamma", "uqk",
    "unitary-vandermonde", "nsc-qu", "nsc-qo", "family2", "family3", "family4",
)


def exit_on_error(func):
    """Map toolkit errors to the exit-status contract."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            with command_context(func.__name__.removeprefix("cmd_").replace("_", "-")):
                return func(*args, **kwargs)
        except ValidationError as e:
            err_console.print(f"[red]invalid options:[/red] {escape(str(e))}")
            raise typer.Exit(EXIT_PRECONDITION)
        except PreconditionError as e:
            logger.warning("precondition_failed", command=func.__name__, error=str(e))
            err_console.print(f"[red]precondition failed:[/red] {escape(str(e))}")
            raise typer.Exit(EXIT_PRECONDITION)
        except VerificationError as e:
            logger.error("verification_failed", command=func.__name__, error=str(e))
            err_console.print(f"[red]verification failed:[/red] {escape(str(e))}")
            raise typer.Exit(EXIT_VERIFICATION)
    return wrapper


@app.callback()
def startup():
    for warning in validate_config():
        logger.warning("config_warning", warning=warning)


# ============= Helpers =============

class Built(NamedTuple):
    matrix: Union[FMatrix, np.ndarray]
    certificate: Optional[CongruenceCertificate] = None
    notes: Dict[str, str] = {}


def _require(value, flag: str):
    if value is None:
        raise PreconditionError(f"{flag} is required for this construction")
    return value


def _field(text: Optional[str]) -> FieldSpec:
    return FieldParser().parse_field(_require(text, "--field"))


def _load_matrix(path: Optional[Path], field: Optional[str]) -> FMatrix:
    m = MatrixParser().parse_file(_require(path, "--in"))
    if field is not None and _field(field) != m.spec:
        raise PreconditionError(f"--field {field} differs from the matrix field {m.spec}")
    return m


def _element(spec: FieldSpec, token: Optional[str]):
    return None if token is None else FieldParser().parse_element(spec, token)


def _check_records(checks: List[Check]) -> List[CheckRecord]:
    return [CheckRecord(name=c.name, passed=c.passed, detail=c.detail) for c in checks]


def _certificate_record(cert: CongruenceCertificate, display: str) -> CertificateRecord:
    return CertificateRecord(
        field=str(cert.spec),
        flavor=cert.flavor.value,
        form=cert.form.value,
        k=cert.k,
        gram_diagonal=[format_element(d, display) for d in cert.gram_diagonal],
        source_nsc=cert.source_nsc,
        degenerate=cert.degenerate,
        checks=_check_records(cert.checks()),
    )


def _matrix_rows(m: Union[FMatrix, np.ndarray], display: str) -> List[List[str]]:
    if isinstance(m, FMatrix):
        return [[format_element(e, display) for e in row] for row in m.entries()]
    return [[str(int(v)) for v in row] for row in np.asarray(m)]


def _print_checks(title: str, checks: List[Check]):
    table = Table(title=title)
    table.add_column("check")
    table.add_column("passed")
    table.add_column("detail")
    for c in checks:
        status = "[green]yes[/green]" if c.passed else "[red]no[/red]"
        table.add_row(c.name, status, escape(c.detail))
    console.print(table)


def _print_matrix(title: str, rows: List[List[str]]):
    table = Table(title=escape(title), show_header=False)
    for row in rows:
        table.add_row(*[escape(e) for e in row])
    console.print(table)


def _emit(record, output_format: str):
    if output_format == "record":
        typer.echo(dump_record(record).decode())


# ============= construct =============

def _build(kind: str, field: Optional[str], input_path: Optional[Path], k: Optional[int],
           q: Optional[int], w: int, gamma: Optional[str], a: Optional[str],
           values: Optional[str], seed: int) -> Built:
    if kind in CERTIFIED_KINDS:
        cert = CERTIFIED_KINDS[kind](_load_matrix(input_path, field))
        return Built(cert.result, cert)
    if kind in ("sum", "hsum"):
        spec = _field(field)
        cs = [FieldParser().parse_element(spec, tok) for tok in _require(values, "--values").split()]
        builder = construct.hermitian_sum_matrix if kind == "hsum" else construct.quadratic_sum_matrix
        s = builder(cs)
        return Built(s.matrix, notes={"scale": format_element(s.scale),
                                      "quasi": str(s.is_quasi).lower(),
                                      "degenerate": str(s.degenerate).lower()})
    if kind == "paley":
        return Built(construct.paley_hadamard(_require(q, "--q")))
    if kind == "sylvester":
        if input_path is not None:
            base = MatrixParser().parse_integer_file(input_path)
        else:
            base = construct.paley_hadamard(_require(q, "--q"))
        return Built(construct.sylvester_double(base, w))
    if kind == "reduce-hadamard":
        h = MatrixParser().parse_integer_file(_require(input_path, "--in"))
        return Built(construct.reduce_hadamard(h, _field(field)), notes={"gram_scale": str(len(h))})
    if kind == "agamma":
        spec = _field(field)
        return Built(construct.a_gamma(spec, _require(k, "--k"), _element(spec, gamma)))
    if kind == "uqk":
        u, perm = construct.u_qk(_field(field), _require(k, "--k"))
        return Built(u, notes={"permutation": " ".join(str(i) for i in perm)})
    if kind == "unitary-vandermonde":
        return Built(construct.unitary_vandermonde(_field(field), _require(k, "--k")))
    if kind in ("nsc-qu", "nsc-qo"):
        builder = construct.nsc_quasi_unitary if kind == "nsc-qu" else construct.nsc_quasi_orthogonal
        cert = builder(_field(field), _require(k, "--k"), seed=seed)
        return Built(cert.result, cert, notes={"seed": str(seed)})
    if kind in ("family2", "family3", "family4"):
        spec = _field(field)
        cert = construct.explicit_family(spec, int(kind[-1]), _element(spec, a))
        return Built(cert.result, cert)
    raise PreconditionError(
        f"unknown kind '{kind}'; choose from {', '.join(list(CERTIFIED_KINDS) + list(OTHER_KINDS))}")


@app.command("construct")
@exit_on_error
def cmd_construct(
    kind: str = typer.Argument(..., help="Construction kind, e.g. lower-qo, paley, nsc-qu"),
    field: Optional[str] = typer.Option(None, "--field", help="Field spec, e.g. GF(7)"),
    input_path: Optional[Path] = typer.Option(None, "--in", help="Input matrix file"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output stem for .mat and .cert files"),
    k: Optional[int] = typer.Option(None, "--k", help="Matrix order"),
    q: Optional[int] = typer.Option(None, "--q", help="Prime power for Hadamard kinds"),
    w: int = typer.Option(1, "--w", help="Sylvester doublings"),
    gamma: Optional[str] = typer.Option(None, "--gamma", help="Nonzero element for agamma"),
    a: Optional[str] = typer.Option(None, "--a", help="Family parameter"),
    values: Optional[str] = typer.Option(None, "--values", help="Space-separated elements for sum kinds"),
    seed: int = typer.Option(Config.DEFAULT_SEED, "--seed"),
    output_format: str = typer.Option("table", "--format", help="table or record"),
    display: str = typer.Option("poly", "--display", help="poly or power"),
):
    """Build a matrix; certified kinds also write a certificate."""
    CommandConfig(subcommand=f"construct {kind}", field=field,
                  inputs=[input_path] if input_path else [], output=out, seed=seed,
                  output_format=output_format, display=display)
    built = _build(kind, field, input_path, k, q, w, gamma, a, values, seed)
    logger.info("constructed", kind=kind, certified=built.certificate is not None)

    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        matrices = MatrixParser(display)
        if isinstance(built.matrix, FMatrix):
            out.with_suffix(".mat").write_text(matrices.dump(built.matrix), encoding="utf-8")
        else:
            out.with_suffix(".mat").write_text(matrices.dump_integer(built.matrix), encoding="utf-8")
        if built.certificate is not None:
            out.with_suffix(".cert").write_text(CertificateParser(display).dump(built.certificate),
                                                encoding="utf-8")

    rows = _matrix_rows(built.matrix, display)
    spec_text = str(built.matrix.spec) if isinstance(built.matrix, FMatrix) else None
    if output_format == "record":
        cert_record = (_certificate_record(built.certificate, display)
                       if built.certificate is not None else None)
        _emit(ConstructRecord(kind=kind, field=spec_text, matrix=rows,
                              certificate=cert_record, notes=built.notes), output_format)
        return
    _print_matrix(f"{kind} over {spec_text or 'ZZ'}", rows)
    for key, value in built.notes.items():
        console.print(f"{key}: {escape(value)}")
    if built.certificate is not None:
        cert = built.certificate
        console.print("gram diagonal: " + escape(" ".join(format_element(d, display)
                                                           for d in cert.gram_diagonal)))
        _print_checks("certificate", cert.checks())


# ============= verify =============

def _matrix_checks(path: Path, nsc: bool) -> List[Check]:
    content = read_text(path)
    first = next((line.strip() for line in content.splitlines() if line.strip()), "")
    if first == "ZZ":
        h = MatrixParser().parse_integer_content(content)
        ok = construct.is_hadamard(h)
        return [Check("hadamard", ok, "" if ok else "H·H^T is not n·I")]
    m = MatrixParser().parse_content(content)
    checks = [Check("square", m.is_square, "" if m.is_square else f"shape {m.shape}")]
    if nsc and m.is_square:
        result = is_nsc(m)
        checks.append(Check("nsc", bool(result), "" if result else f"witness {result.witness}"))
    return checks


def _is_certificate(path: Path) -> bool:
    return any(line.strip().startswith("flavor ") for line in read_text(path).splitlines())


def _report(title: str, checks: List[Check], output_format: str):
    if output_format == "record":
        for c in _check_records(checks):
            _emit(c, output_format)
    else:
        _print_checks(title, checks)
    failed = [c for c in checks if not c.passed]
    if failed:
        err_console.print("[red]failed:[/red] " + escape("; ".join(f"{c.name}: {c.detail}" for c in failed)))
        raise typer.Exit(EXIT_VERIFICATION)


@app.command("verify")
@exit_on_error
def cmd_verify(
    path: Path = typer.Argument(..., help="Certificate or matrix file"),
    nsc: bool = typer.Option(False, "--nsc", help="Also test a matrix for NSC"),
    output_format: str = typer.Option("table", "--format"),
):
    """Re-run every check on a certificate or matrix file."""
    CommandConfig(subcommand="verify", inputs=[path], output_format=output_format)
    if _is_certificate(path):
        checks = CertificateParser().parse_file(path).checks()
    else:
        checks = _matrix_checks(path, nsc)
    _report(str(path), checks, output_format)


@app.command("verify-cert")
@exit_on_error
def cmd_verify_cert(
    path: Path = typer.Argument(..., help="Certificate file"),
    output_format: str = typer.Option("table", "--format"),
):
    """Re-check a congruence certificate bit-exactly."""
    CommandConfig(subcommand="verify-cert", inputs=[path], output_format=output_format)
    _report(str(path), CertificateParser().parse_file(path).checks(), output_format)


# ============= codes =============

@app.command("build")
@exit_on_error
def cmd_build(
    description: Path = typer.Argument(..., help="Description file: 'code <path>' lines then 'matrix <path>'"),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the derived code here"),
):
    """Build the matrix-product code C(A)."""
    CommandConfig(subcommand="build", inputs=[description], output=out)
    codes, a = DescriptionParser().parse_file(description)
    mpc = build(codes, a)
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(CodeParser().dump(mpc.derived_code), encoding="utf-8")
    console.print(f"C(A): [{mpc.length}, {mpc.dimension}] over {escape(str(a.spec))}")


@app.command("pipeline")
@exit_on_error
def cmd_pipeline(
    description: Path = typer.Argument(..., help="Description file"),
    form: str = typer.Option("euclidean", "--form", help="euclidean or hermitian"),
    cap: int = typer.Option(Config.ENUMERATION_CAP, "--cap"),
    output_format: str = typer.Option("table", "--format"),
):
    """Certify a dual-containing matrix-product code and report quantum parameters."""
    CommandConfig(subcommand="pipeline", inputs=[description], form=form, cap=cap,
                  output_format=output_format)
    codes, a = DescriptionParser().parse_file(description)
    result = quantum.pipeline(codes, a, Form(form), cap=cap)
    params = result.params
    record = PipelineRecord(
        field=str(a.spec),
        form=result.form.value,
        k=a.rows,
        n=result.mpc.n,
        length=result.mpc.length,
        tau=list(result.gram_parts.perm),
        dimensions=[c.dimension for c in codes],
        constituent_distances=list(result.constituent_distances),
        profile=list(result.profile),
        profile_source=result.profile_source,
        d_lower=params.d_lower,
        exact_distance=result.exact_distance,
        checks=_check_records(list(result.certificate.checks)),
        quantum=QuantumParamsRecord(n=params.n, k=params.k_dim, d_lower=params.d_lower,
                                    base_q=params.base_q, provenance=params.provenance,
                                    singleton_ok=params.singleton_ok),
    )
    if output_format == "record":
        _emit(record, output_format)
        return
    table = Table(title="pipeline")
    table.add_column("quantity")
    table.add_column("value")
    for key in ("field", "form", "k", "n", "length", "tau", "dimensions", "constituent_distances",
                "profile", "profile_source", "d_lower", "exact_distance"):
        table.add_row(key, escape(str(getattr(record, key))))
    table.add_row("quantum code", escape(str(params)))
    table.add_row("singleton_ok", str(params.singleton_ok))
    console.print(table)
    _print_checks("checks", list(result.certificate.checks))


@app.command("minimum-distance")
@exit_on_error
def cmd_minimum_distance(
    path: Path = typer.Argument(..., help="Code file"),
    cap: int = typer.Option(Config.ENUMERATION_CAP, "--cap"),
):
    """Exact minimum distance by enumeration."""
    CommandConfig(subcommand="minimum-distance", inputs=[path], cap=cap)
    code = CodeParser().parse_file(path)
    d = min_distance(code, cap=cap)
    console.print(f"[{code.n}, {code.dimension}, {d}] over {escape(str(code.spec))}")


@app.command("field")
@exit_on_error
def cmd_field(
    spec_text: str = typer.Argument(..., help="Field spec, e.g. GF(3^2)"),
    display: str = typer.Option("poly", "--display"),
    elements: bool = typer.Option(False, "--elements", help="List every element"),
):
    """Show a field spec, its primitive element and its enumeration."""
    CommandConfig(subcommand="field", field=spec_text, display=display)
    spec = FieldParser().parse_field(spec_text)
    console.print(f"field: {escape(str(spec))}")
    console.print(f"order: {spec.q}")
    if spec.is_quadratic:
        console.print(f"quadratic over GF({spec.base_q})")
    console.print(f"primitive element: {escape(format_element(primitive_element(spec), display))}")
    if elements:
        console.print(escape(" ".join(format_element(e, display) for e in spec.elements())))


def main():
    app()


if __name__ == "__main__":
    main()
