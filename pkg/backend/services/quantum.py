"""
Quantum Service - dual-containing matrix-product codes and their quantum parameters.

The pipeline re-proves every containment on the concrete instance by rank
tests; the monomial-Gram argument only decides which constituent pattern to
check. Distances are lower bounds unless enumeration was feasible.
"""
import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from config import Config
from services.construct import Check
from services.errors import EnumerationCapError, PreconditionError, VerificationError
from services.ffield import FieldError, FieldSpec
from services.lincode import (
    CodeError,
    LinearCode,
    any_dual,
    contains,
    is_dual_containing,
    min_distance,
    random_code,
    sum_of_codes,
)
from services.logger import get_logger
from services.matrix import (
    FMatrix,
    Form,
    MonomialParts,
    ShapeError,
    SingularMatrixError,
    di_profile_bruteforce,
    gram,
    is_nsc,
    monomial_decompose,
)
from services.mpc import MatrixProductCode, build

logger = get_logger(__name__)


class PatternError(PreconditionError):
    """Constituent codes do not satisfy the containment pattern of the Gram permutation."""


class ContainmentError(VerificationError):
    """A code that must be dual-containing is not."""


# ============= Quantum parameters =============

@dataclass(frozen=True)
class QuantumParams:
    """[[n, k_dim, >= d_lower]]_base_q."""
    n: int
    k_dim: int
    d_lower: int
    base_q: int
    provenance: str

    @property
    def singleton_ok(self) -> bool:
        """2d <= n + 2 - k for the recorded lower bound."""
        return 2 * self.d_lower <= self.n + 2 - self.k_dim

    def __str__(self) -> str:
        return f"[[{self.n}, {self.k_dim}, >={self.d_lower}]]_{self.base_q}"


def _params(c: LinearCode, form: Form, d_lower: Optional[int], cap: Optional[int],
            base_q: int, construction: str) -> QuantumParams:
    if not is_dual_containing(c, form):
        raise ContainmentError(f"code is not {form.value} dual-containing")
    if d_lower is None:
        d_lower = min_distance(c, cap=cap)
        source = "min_distance"
    else:
        if d_lower < 1:
            raise PreconditionError(f"distance bound must be positive, got {d_lower}")
        source = "supplied bound"
    params = QuantumParams(
        n=c.n,
        k_dim=2 * c.dimension - c.n,
        d_lower=d_lower,
        base_q=base_q,
        provenance=f"{construction}; d from {source}",
    )
    logger.debug("quantum_params", params=str(params), singleton_ok=params.singleton_ok)
    return params


def css_params(c: LinearCode, d_lower: Optional[int] = None,
               cap: Optional[int] = None) -> QuantumParams:
    """[[n, 2t - n, >= d]]_q from a Euclidean dual-containing [n, t, d]_q code."""
    return _params(c, Form.EUCLIDEAN, d_lower, cap, c.spec.q, "css")


def hermitian_params(c: LinearCode, d_lower: Optional[int] = None,
                     cap: Optional[int] = None) -> QuantumParams:
    """[[n, 2t - n, >= d]]_q from a Hermitian dual-containing [n, t, d]_(q^2) code."""
    if not c.spec.is_quadratic:
        raise FieldError(f"{c.spec} is not declared as a quadratic extension")
    return _params(c, Form.HERMITIAN, d_lower, cap, c.spec.base_q, "hermitian")


# ============= Gram and pattern checks =============

def verify_monomial_gram(a: FMatrix, form: Form = Form.EUCLIDEAN) -> MonomialParts:
    """D and tau with gram(A) = D·P_tau; raises NotMonomialError otherwise."""
    if not a.is_square:
        raise ShapeError(f"defining matrix must be square, got {a.shape}")
    if a.rank() != a.rows:
        raise SingularMatrixError("defining matrix is singular")
    return monomial_decompose(gram(a, form))


@dataclass(frozen=True)
class PatternReport:
    """Per-index outcome of dual(C_(i_j)) ⊆ C_j; pairs are 1-based (j, i_j)."""
    results: Tuple[Tuple[int, int, bool], ...]

    @property
    def ok(self) -> bool:
        return all(passed for _, _, passed in self.results)

    @property
    def failures(self) -> List[Tuple[int, int]]:
        return [(j, i) for j, i, passed in self.results if not passed]

    def __bool__(self) -> bool:
        return self.ok


def check_constituent_pattern(codes: Sequence[LinearCode], perm: Sequence[int],
                              form: Form = Form.EUCLIDEAN) -> PatternReport:
    if len(codes) != len(perm):
        raise PatternError(f"{len(codes)} codes for a permutation of length {len(perm)}")
    results = []
    for j, i in enumerate(perm, start=1):
        passed = contains(codes[j - 1], any_dual(codes[i - 1], form))
        results.append((j, i, passed))
    report = PatternReport(tuple(results))
    if not report.ok:
        logger.debug("pattern_failed", failures=report.failures, form=str(form))
    return report


# ============= Constituent helpers =============

def sum_with_dual(d: LinearCode, form: Form = Form.EUCLIDEAN) -> LinearCode:
    """span(D ∪ dual(D)); always dual-containing."""
    return sum_of_codes([d, any_dual(d, form)])


def _random_dimension(rng: random.Random, n: int) -> int:
    return rng.randint(1, max(1, n - 1))


def pattern_constituents(spec: FieldSpec, perm: Sequence[int], n: int, rng: random.Random,
                         form: Form = Form.EUCLIDEAN) -> List[LinearCode]:
    """
    Random codes C_1..C_k with dual(C_(perm[j])) ⊆ C_j for every j.

    Fixed points get span(D ∪ dual(D)); for a swapped pair (j, i), C_i is random
    and C_j = dual(C_i) + a random code, so dual(C_j) ⊆ C_i as well.
    """
    k = len(perm)
    if any(perm[perm[j] - 1] != j + 1 for j in range(k)):
        raise PatternError(f"{tuple(perm)} is not an involution")
    codes: List[Optional[LinearCode]] = [None] * k
    for j in range(k):
        i = perm[j] - 1
        if codes[j] is not None:
            continue
        if i == j:
            codes[j] = sum_with_dual(random_code(spec, n, _random_dimension(rng, n), rng), form)
            continue
        partner = random_code(spec, n, _random_dimension(rng, n), rng)
        extra = random_code(spec, n, rng.randint(0, 1), rng)
        codes[i] = partner
        codes[j] = sum_of_codes([any_dual(partner, form), extra])
    return codes


# ============= Pipeline =============

@dataclass(frozen=True)
class PipelineCertificate:
    checks: Tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]


@dataclass(frozen=True)
class PipelineResult:
    mpc: MatrixProductCode
    params: QuantumParams
    certificate: PipelineCertificate
    form: Form
    gram_parts: MonomialParts
    profile: Tuple[int, ...]
    profile_source: str
    constituent_distances: Tuple[Optional[int], ...]
    exact_distance: Optional[int] = None
    pattern: Optional[PatternReport] = field(default=None, compare=False)


def _distance_profile(a: FMatrix, cap: int) -> Tuple[Tuple[int, ...], str]:
    k = a.rows
    if k <= Config.NSC_MAX_K and is_nsc(a):
        return tuple(k + 1 - i for i in range(1, k + 1)), "nsc"
    try:
        return tuple(di_profile_bruteforce(a, cap=cap)), "enumerated"
    except EnumerationCapError:
        return (1,) * k, "trivial"


def _constituent_distance(c: LinearCode, cap: int) -> Optional[int]:
    if c.dimension == 0:
        return None
    try:
        return min_distance(c, cap=cap)
    except EnumerationCapError:
        return 1


def pipeline(codes: Sequence[LinearCode], a: FMatrix, form: Form = Form.EUCLIDEAN,
             cap: Optional[int] = None) -> PipelineResult:
    """
    C(A) from constituents and a monomial-Gram defining matrix, certified dual-containing.

    d_lower = min_i D_i(A)·d_i over nonzero constituents; quantum parameters
    [[k·n, 2·sum t_i - k·n, >= d_lower]].
    """
    form = Form(form)
    cap = Config.ENUMERATION_CAP if cap is None else cap
    if form == Form.HERMITIAN and not a.spec.is_quadratic:
        raise FieldError(f"{a.spec} is not declared as a quadratic extension")
    if len(codes) != a.rows:
        raise PatternError(f"{len(codes)} constituents for a {a.rows}-row defining matrix")

    parts = verify_monomial_gram(a, form)
    checks = [Check("monomial-gram", True, f"tau = {parts.perm}")]

    report = check_constituent_pattern(codes, parts.perm, form)
    if not report.ok:
        pairs = ", ".join(f"dual(C_{i}) not in C_{j}" for j, i in report.failures)
        raise PatternError(f"containment pattern fails: {pairs}")
    checks.append(Check("pattern", True))

    mpc = build(codes, a)
    derived = mpc.derived_code
    if not is_dual_containing(derived, form):
        raise ContainmentError(
            f"C(A) is not {form.value} dual-containing although its preconditions hold")
    checks.append(Check("dual-containing", True, "rank test"))

    profile, profile_source = _distance_profile(a, cap)
    distances = tuple(_constituent_distance(c, cap) for c in codes)
    terms = [di * d for di, d in zip(profile, distances) if d is not None]
    if not terms:
        raise CodeError("every constituent is the zero code")
    d_lower = min(terms)

    exact = None
    if derived.dimension and derived.spec.q ** derived.dimension <= cap:
        exact = min_distance(derived, cap=cap)
        if exact < d_lower:
            raise VerificationError(f"exact distance {exact} is below the bound {d_lower}")
        checks.append(Check("distance-bound", True, f"d = {exact} >= {d_lower}"))
    else:
        checks.append(Check("distance-bound", True, "enumeration skipped"))

    base_q = a.spec.base_q if form == Form.HERMITIAN else a.spec.q
    params = QuantumParams(
        n=mpc.length,
        k_dim=2 * derived.dimension - mpc.length,
        d_lower=d_lower,
        base_q=base_q,
        provenance=f"matrix-product {'hermitian' if form == Form.HERMITIAN else 'css'}; "
                   f"D_i from {profile_source}",
    )
    logger.info("pipeline_done", field=str(a.spec), form=form.value, k=a.rows, n=mpc.n,
                params=str(params), profile_source=profile_source, exact_distance=exact)
    return PipelineResult(
        mpc=mpc,
        params=params,
        certificate=PipelineCertificate(tuple(checks)),
        form=form,
        gram_parts=parts,
        profile=profile,
        profile_source=profile_source,
        constituent_distances=distances,
        exact_distance=exact,
        pattern=report,
    )
