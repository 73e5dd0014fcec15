"""
Construct Service - quasi-orthogonal, quasi-unitary and Hadamard-type matrices.

Congruence routines return a CongruenceCertificate that re-checks itself from
its own fields, so a certificate loaded from disk can be trusted only after
verify() passes. Hadamard builders work on integer numpy arrays; the reducer
maps them into an odd-characteristic field.
"""
import itertools
import random
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import galois
import numpy as np

from config import Config
from services.errors import EnumerationCapError, PreconditionError, VerificationError
from services.ffield import (
    FieldElement,
    FieldError,
    FieldSpec,
    in_base_subfield,
    make_field,
    norm,
    norm_preimage,
    primitive_element,
    quadratic_character,
)
from services.logger import get_logger
from services.matrix import (
    FMatrix,
    Form,
    ShapeError,
    SingularMatrixError,
    gram,
    hstack,
    is_nsc,
    leading_principal_minors,
    monomial_decompose,
    permutation_matrix,
    star,
    trailing_principal_minors,
    vandermonde,
    vstack,
)

logger = get_logger(__name__)


# ============= Errors =============

class LeadingMinorError(PreconditionError):
    """A principal minor of the Gram matrix vanishes; index is 1-based."""

    def __init__(self, index: int, kind: str = "leading"):
        self.index = index
        self.kind = kind
        super().__init__(f"{kind} principal minor {index} of the Gram matrix is zero")


class MembershipError(PreconditionError):
    """The parameter of an explicit family violates one of its defining inequations."""

    def __init__(self, order: int, inequation: str):
        self.order = order
        self.inequation = inequation
        super().__init__(f"parameter fails '{inequation}' for the {order}x{order} family")


class SearchExhaustedError(VerificationError):
    """A randomized search used up its attempt budget."""


class CertificateError(VerificationError):
    """A certificate failed one or more of its checks."""

    def __init__(self, failed: Sequence["Check"]):
        self.failed = list(failed)
        super().__init__("; ".join(f"{c.name}: {c.detail}" for c in self.failed))


# ============= Certificates =============

class Flavor(str, Enum):
    LOWER = "lower-unitriangular"
    UPPER = "upper-unitriangular"
    GENERAL = "general"
    # transform·source·transform^* is itself the diagonal result
    CONGRUENCE = "congruence"


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class CongruenceCertificate:
    """
    Evidence that transform turns source into a matrix with diagonal Gram.

    For every flavor except CONGRUENCE, result = transform·source and
    gram(result, form) = diag(gram_diagonal). For CONGRUENCE the source is a
    symmetric/Hermitian matrix X and result = transform·X·transform^*.
    """
    source: FMatrix
    transform: FMatrix
    result: FMatrix
    gram_diagonal: Tuple[FieldElement, ...]
    flavor: Flavor
    form: Form
    source_nsc: bool = False
    degenerate: bool = False

    @property
    def spec(self) -> FieldSpec:
        return self.source.spec

    @property
    def k(self) -> int:
        return self.source.rows

    def checks(self) -> List[Check]:
        return verify_certificate(self)

    def verify(self) -> "CongruenceCertificate":
        failed = [c for c in self.checks() if not c.passed]
        if failed:
            raise CertificateError(failed)
        return self


def _flavor_check(cert: CongruenceCertificate) -> Check:
    t = cert.transform
    if cert.flavor is Flavor.LOWER:
        ok = t.is_lower_unitriangular()
    elif cert.flavor is Flavor.UPPER:
        ok = t.is_upper_unitriangular()
    else:
        ok = t.rank() == t.rows
        return Check("flavor", ok, "" if ok else "transform is singular")
    return Check("flavor", ok, "" if ok else f"transform is not {cert.flavor.value}")


def verify_certificate(cert: CongruenceCertificate) -> List[Check]:
    """Run every certificate check; stops after a shape failure."""
    src, t, res = cert.source, cert.transform, cert.result
    k = src.rows
    shape_ok = (src.is_square and t.shape == (k, k) and res.shape == (k, k)
                and len(cert.gram_diagonal) == k
                and all(d.spec == src.spec for d in cert.gram_diagonal)
                and t.spec == src.spec and res.spec == src.spec)
    checks = [Check("shape", shape_ok,
                    "" if shape_ok else
                    f"source {src.shape}, transform {t.shape}, result {res.shape}, "
                    f"gram length {len(cert.gram_diagonal)}")]
    if not shape_ok:
        return checks

    checks.append(_flavor_check(cert))

    congruence = cert.flavor is Flavor.CONGRUENCE
    expected = t @ src @ star(t, cert.form) if congruence else t @ src
    product_ok = res == expected
    checks.append(Check("product", product_ok,
                        "" if product_ok else "result differs from the transform applied to the source"))

    actual = res if congruence else gram(res, cert.form)
    mismatches = [(i + 1, j + 1) for i in range(k) for j in range(k)
                  if actual[i, j] != (cert.gram_diagonal[i] if i == j else src.spec.zero())]
    checks.append(Check("gram", not mismatches,
                        "" if not mismatches else f"gram mismatch at {mismatches[:4]}"))

    if not congruence:
        zeros = [i + 1 for i, d in enumerate(cert.gram_diagonal) if d.is_zero()]
        checks.append(Check("nonzero", not zeros, "" if not zeros else f"zero gram entries at {zeros}"))

    if cert.form == Form.HERMITIAN:
        outside = [i + 1 for i, d in enumerate(cert.gram_diagonal) if not in_base_subfield(d)]
        checks.append(Check("base-subfield", not outside,
                            "" if not outside else f"entries {outside} are not fixed by conjugation"))

    if cert.source_nsc:
        nsc = is_nsc(res)
        checks.append(Check("nsc", bool(nsc), "" if nsc else f"singular block at {nsc.witness}"))
    return checks


# ============= Unitriangular congruence =============

def _require_nonsingular(a: FMatrix):
    if not a.is_square:
        raise ShapeError(f"expected a square matrix, got {a.shape}")
    if a.rank() != a.rows:
        raise SingularMatrixError("matrix is singular")


def _require_form(spec: FieldSpec, form: Form):
    if form == Form.HERMITIAN and not spec.is_quadratic:
        raise FieldError(f"{spec} is not declared as a quadratic extension")


def _peel_transform(g: FMatrix, upper: bool) -> FMatrix:
    """
    Unitriangular T with T·G·T^* diagonal.

    Lower: row s solves T[s, :s]·G[:s, :s] = -G[s, :s], so T·G is upper triangular.
    Upper: row s solves T[s, s+1:]·G[s+1:, s+1:] = -G[s, s+1:].
    """
    k = g.rows
    t = g.spec.gf.Identity(k)
    for s in range(k):
        idx = list(range(s + 1, k)) if upper else list(range(s))
        if not idx:
            continue
        coeffs = -(g.submatrix([s], idx) @ g.submatrix(idx, idx).inverse())
        t[s, idx] = coeffs.array[0]
    return FMatrix(g.spec, t)


def _unitriangular(a: FMatrix, form: Form, upper: bool) -> CongruenceCertificate:
    _require_form(a.spec, form)
    _require_nonsingular(a)
    g = gram(a, form)
    minors = trailing_principal_minors(g) if upper else leading_principal_minors(g)
    for i, m in enumerate(minors, start=1):
        if m.is_zero():
            raise LeadingMinorError(i, "trailing" if upper else "leading")

    t = _peel_transform(g, upper)
    result = t @ a
    source_nsc = (not upper) and a.rows <= Config.NSC_MAX_K and bool(is_nsc(a))
    cert = CongruenceCertificate(
        source=a,
        transform=t,
        result=result,
        gram_diagonal=tuple(gram(result, form).diagonal()),
        flavor=Flavor.UPPER if upper else Flavor.LOWER,
        form=Form(form),
        source_nsc=source_nsc,
    )
    logger.debug("unitriangular_congruence", field=str(a.spec), k=a.rows, form=str(form),
                 upper=upper, source_nsc=source_nsc)
    return cert.verify()


def lower_quasi_orthogonalize(a: FMatrix) -> CongruenceCertificate:
    """L lower unitriangular with L·A quasi-orthogonal; NSC is preserved."""
    return _unitriangular(a, Form.EUCLIDEAN, upper=False)


def upper_quasi_orthogonalize(a: FMatrix) -> CongruenceCertificate:
    """U upper unitriangular with U·A quasi-orthogonal; NSC may be lost."""
    return _unitriangular(a, Form.EUCLIDEAN, upper=True)


def lower_quasi_unitarize(a: FMatrix) -> CongruenceCertificate:
    return _unitriangular(a, Form.HERMITIAN, upper=False)


def upper_quasi_unitarize(a: FMatrix) -> CongruenceCertificate:
    return _unitriangular(a, Form.HERMITIAN, upper=True)


# ============= Form diagonalization =============

def _repair_candidates(spec: FieldSpec, h_ji, form: Form) -> List:
    gf = spec.gf
    nonzero = [gf(e.value) for e in spec.nonzero_elements()]
    if form == Form.HERMITIAN:
        return [np.reciprocal(h_ji)] + nonzero
    return [gf(1), gf(2 % spec.p)] + nonzero


def _congruence_diagonalize(x: FMatrix, form: Form) -> CongruenceCertificate:
    spec = x.spec
    k = x.rows
    h = x.array
    t = spec.gf.Identity(k)
    if form == Form.HERMITIAN:
        def cj(v):
            return v ** spec.base_q
    else:
        def cj(v):
            return v

    for i in range(k):
        if h[i, i] == 0:
            j = next((j for j in range(i + 1, k) if h[i, j] != 0), None)
            if j is None:
                continue
            for c in _repair_candidates(spec, h[j, i], form):
                if c == 0:
                    continue
                # new diagonal: c·h_ji + conj(c·h_ji) + c·conj(c)·h_jj
                if c * h[j, i] + cj(c * h[j, i]) + c * cj(c) * h[j, j] != 0:
                    break
            else:
                raise VerificationError(f"no pivot repair coefficient for row {i + 1}")
            h[i, :] = h[i, :] + c * h[j, :]
            h[:, i] = h[:, i] + cj(c) * h[:, j]
            t[i, :] = t[i, :] + c * t[j, :]
        pivot_inv = np.reciprocal(h[i, i])
        for r in range(i + 1, k):
            if h[r, i] == 0:
                continue
            f = h[r, i] * pivot_inv
            h[r, :] = h[r, :] - f * h[i, :]
            h[:, r] = h[:, r] - cj(f) * h[:, i]
            t[r, :] = t[r, :] - f * t[i, :]

    result = FMatrix(spec, h)
    cert = CongruenceCertificate(
        source=x,
        transform=FMatrix(spec, t),
        result=result,
        gram_diagonal=tuple(result.diagonal()),
        flavor=Flavor.CONGRUENCE,
        form=Form(form),
    )
    return cert.verify()


def symmetric_diagonalize(x: FMatrix) -> CongruenceCertificate:
    """
    Non-singular T with T·X·T^T diagonal (M = T^T in the M^T·X·M convention).

    Zero diagonal entries remain only for zero rows, so singular X is accepted.
    """
    if x.spec.p == 2:
        raise FieldError("symmetric diagonalization needs odd characteristic")
    if not x.is_symmetric():
        raise PreconditionError("matrix is not symmetric")
    return _congruence_diagonalize(x, Form.EUCLIDEAN)


def hermitian_diagonalize(x: FMatrix) -> CongruenceCertificate:
    """Non-singular N with N·H·N^† diagonal over the base subfield."""
    _require_form(x.spec, Form.HERMITIAN)
    if not x.is_hermitian():
        raise PreconditionError("matrix is not Hermitian")
    return _congruence_diagonalize(x, Form.HERMITIAN)


def _general(a: FMatrix, form: Form, diagonalizer) -> CongruenceCertificate:
    _require_nonsingular(a)
    d = diagonalizer(gram(a, form))
    result = d.transform @ a
    return CongruenceCertificate(
        source=a,
        transform=d.transform,
        result=result,
        gram_diagonal=d.gram_diagonal,
        flavor=Flavor.GENERAL,
        form=Form(form),
    ).verify()


def quasi_orthogonalize(a: FMatrix) -> CongruenceCertificate:
    """M^T·A quasi-orthogonal through diagonalizing A·A^T; NSC is not preserved."""
    return _general(a, Form.EUCLIDEAN, symmetric_diagonalize)


def quasi_unitarize(a: FMatrix) -> CongruenceCertificate:
    _require_form(a.spec, Form.HERMITIAN)
    return _general(a, Form.HERMITIAN, hermitian_diagonalize)


def unitarize(a: FMatrix) -> CongruenceCertificate:
    """N'·A unitary with N' = diag(s_i^-1)·N and s_i^(q+1) = r_i."""
    base = quasi_unitarize(a)
    scaling = FMatrix.diag(a.spec, [norm_preimage(r).inv() for r in base.gram_diagonal])
    transform = scaling @ base.transform
    return CongruenceCertificate(
        source=a,
        transform=transform,
        result=transform @ a,
        gram_diagonal=(a.spec.one(),) * a.rows,
        flavor=Flavor.GENERAL,
        form=Form.HERMITIAN,
    ).verify()


# ============= Sum matrices =============

@dataclass(frozen=True)
class SumMatrix:
    """S with first row cs and S·S^* = S^*·S = scale·I."""
    matrix: FMatrix
    scale: FieldElement
    form: Form
    degenerate: bool = False

    @property
    def is_quasi(self) -> bool:
        return not self.scale.is_zero()


def _sum_block(cs: Sequence[FieldElement], form: Form) -> Tuple[FMatrix, FieldElement, bool]:
    spec = cs[0].spec
    if len(cs) == 1:
        c = cs[0]
        return FMatrix.from_rows(spec, [[c]]), (norm(c) if form == Form.HERMITIAN else c * c), False
    half = len(cs) // 2
    a_mat, a, deg_a = _sum_block(cs[:half], form)
    b_mat, b, deg_b = _sum_block(cs[half:], form)
    a_star, b_star = star(a_mat, form), star(b_mat, form)
    degenerate = False
    if not a.is_zero():
        lower = hstack([(a_star @ b_star @ a_mat).scale(-a.inv()), a_star])
    elif not b.is_zero():
        lower = hstack([b_star, (b_star @ a_star @ b_mat).scale(-b.inv())])
    else:
        # both halves have zero Gram scale
        lower = hstack([a_mat, -b_mat])
        degenerate = any(not c.is_zero() for c in cs)
    return vstack([hstack([a_mat, b_mat]), lower]), a + b, deg_a or deg_b or degenerate


def _sum_matrix(cs: Sequence[FieldElement], form: Form) -> SumMatrix:
    size = len(cs)
    if size == 0 or size & (size - 1):
        raise PreconditionError(f"length {size} is not a power of two")
    spec = cs[0].spec
    _require_form(spec, form)
    s, c, degenerate = _sum_block(list(cs), form)
    target = FMatrix.identity(spec, size).scale(c)
    if s @ star(s, form) != target or star(s, form) @ s != target or s.row(0) != list(cs):
        raise VerificationError("sum matrix failed its Gram identity")
    if degenerate:
        logger.info("sum_matrix_degenerate", field=str(spec), size=size, form=str(form))
    return SumMatrix(matrix=s, scale=c, form=Form(form), degenerate=degenerate)


def quadratic_sum_matrix(cs: Sequence[FieldElement]) -> SumMatrix:
    return _sum_matrix(cs, Form.EUCLIDEAN)


def hermitian_sum_matrix(cs: Sequence[FieldElement]) -> SumMatrix:
    return _sum_matrix(cs, Form.HERMITIAN)


# ============= Hadamard matrices =============

def is_hadamard(h) -> bool:
    h = np.asarray(h, dtype=np.int64)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] == 0:
        return False
    if not np.all(np.abs(h) == 1):
        return False
    return bool(np.array_equal(h @ h.T, h.shape[0] * np.eye(h.shape[0], dtype=np.int64)))


def _prime_power(q: int) -> Tuple[int, int]:
    if q < 2 or not galois.is_prime_power(q):
        raise PreconditionError(f"{q} is not a prime power")
    primes, exponents = galois.factors(q)
    return int(primes[0]), int(exponents[0])


def paley_hadamard(q: int) -> np.ndarray:
    """
    (q+1)x(q+1) Hadamard matrix for q = 3 mod 4.

    Border of ones; inner entry (i, j) is -1 on the diagonal and eta(a_j - a_i)
    elsewhere, a_1..a_q in enumeration order.
    """
    p, m = _prime_power(q)
    if q % 4 != 3:
        raise PreconditionError(f"Paley construction needs q = 3 mod 4, got q = {q}")
    spec = make_field(p, m)
    elements = spec.elements()
    h = np.ones((q + 1, q + 1), dtype=np.int64)
    for i, ai in enumerate(elements):
        for j, aj in enumerate(elements):
            h[i + 1, j + 1] = -1 if i == j else quadratic_character(aj - ai)
    if not is_hadamard(h):
        raise VerificationError(f"Paley matrix for q = {q} is not Hadamard")
    return h


def sylvester_double(h, w: int) -> np.ndarray:
    """Apply H -> [[H, H], [H, -H]] w times."""
    h = np.asarray(h, dtype=np.int64)
    if not is_hadamard(h):
        raise PreconditionError("input is not a Hadamard matrix")
    if w < 0:
        raise PreconditionError(f"doubling count must be nonnegative, got {w}")
    for _ in range(w):
        h = np.block([[h, h], [h, -h]])
    return h


def reduce_hadamard(h, spec: FieldSpec) -> FMatrix:
    """Image of an integer Hadamard matrix over spec; its Gram is (n mod p)·I."""
    if spec.p == 2:
        raise FieldError("Hadamard reduction needs odd characteristic")
    h = np.asarray(h, dtype=np.int64)
    if not is_hadamard(h):
        raise PreconditionError("input is not a Hadamard matrix")
    if len(h) % spec.p == 0:
        raise PreconditionError(f"order {len(h)} vanishes mod {spec.p}; the image would be self-orthogonal")
    return FMatrix.from_rows(spec, (h % spec.p).tolist())


# ============= Monomial-Gram families =============

def _roots_of_unity(spec: FieldSpec, k: int) -> List[FieldElement]:
    """beta_i = alpha^(i(q-1)/k), i = 0..k-1."""
    alpha = primitive_element(spec)
    step = (spec.q - 1) // k
    return [alpha ** (i * step) for i in range(k)]


def a_gamma(spec: FieldSpec, k: int, gamma: Optional[FieldElement] = None) -> FMatrix:
    """k x k matrix with entry (r, j) = (gamma·beta_(j-1))^(r-1); Gram is D·P_tau."""
    q = spec.q
    gamma = spec.one() if gamma is None else spec.element(gamma)
    if not 1 <= k < q - 1 or (q - 1) % k:
        raise PreconditionError(f"need 1 <= k < q - 1 with k | q - 1, got k = {k}, q = {q}")
    if k % spec.p == 0:
        raise PreconditionError(f"k = {k} vanishes in characteristic {spec.p}")
    if gamma.is_zero():
        raise PreconditionError("gamma must be nonzero")

    a = FMatrix.from_rows(spec, [[(gamma * b) ** r for b in _roots_of_unity(spec, k)]
                                 for r in range(k)])
    parts = monomial_decompose(gram(a))
    kk = spec.from_int(k)
    expected_perm = (1,) + tuple(k + 2 - j for j in range(2, k + 1))
    expected_diag = (kk,) + (gamma**k * kk,) * (k - 1)
    if parts.perm != expected_perm or parts.diag != expected_diag:
        raise VerificationError(f"A_gamma Gram decomposed as {parts}, not the expected monomial form")
    return a


def u_qk(spec: FieldSpec, k: int) -> Tuple[FMatrix, Tuple[int, ...]]:
    """
    Vandermonde matrix in k-th roots of unity over GF(q^2) and its Gram permutation.

    The permutation sends s+1 to x+1, x the solution of s + q·x = 0 mod k,
    and U·U^† = k·P.
    """
    _require_form(spec, Form.HERMITIAN)
    q, big_q = spec.base_q, spec.q
    if k < 1 or (big_q - 1) % k:
        raise PreconditionError(f"k = {k} does not divide q^2 - 1 = {big_q - 1}")
    if (q + 1) % k == 0:
        raise PreconditionError(f"k = {k} divides q + 1 = {q + 1}; use unitary_vandermonde")
    if k % spec.p == 0:
        raise PreconditionError(f"k = {k} vanishes in characteristic {spec.p}")

    betas = _roots_of_unity(spec, k)
    u = FMatrix.from_rows(spec, [[b**r for b in betas] for r in range(k)])
    q_inv = pow(q, -1, k) if k > 1 else 0
    perm = tuple((-s * q_inv) % k + 1 for s in range(k))
    if gram(u, Form.HERMITIAN) != permutation_matrix(spec, perm).scale(spec.from_int(k)):
        raise VerificationError(f"U_(q,k) Gram is not k·P for q = {q}, k = {k}")
    return u, perm


def unitary_vandermonde(spec: FieldSpec, k: int) -> FMatrix:
    """M = (beta_(j-1)^(i-1)) with k | q + 1, so M·M^† = k·I and M is NSC."""
    _require_form(spec, Form.HERMITIAN)
    q = spec.base_q
    if k < 1 or (q + 1) % k:
        raise PreconditionError(f"k = {k} does not divide q + 1 = {q + 1}")
    if k % spec.p == 0:
        raise PreconditionError(f"k = {k} vanishes in characteristic {spec.p}")
    betas = _roots_of_unity(spec, k)
    m = FMatrix.from_rows(spec, [[b**r for b in betas] for r in range(k)])
    if gram(m, Form.HERMITIAN) != FMatrix.identity(spec, k).scale(spec.from_int(k)):
        raise VerificationError(f"unitary Vandermonde failed M·M^† = kI for k = {k}")
    nsc = is_nsc(m)
    if not nsc:
        raise VerificationError(f"unitary Vandermonde is not NSC: {nsc.witness}")
    return m


# ============= NSC existence search =============

def _first_zero_minor(nodes: Sequence[FieldElement], lambdas: Sequence[FieldElement],
                      form: Form, upto: int) -> Optional[int]:
    g = gram(vandermonde(nodes, lambdas), form)
    for i in range(1, upto + 1):
        if g.submatrix(range(i), range(i)).det().is_zero():
            return i
    return None


def _lambda_search(spec: FieldSpec, k: int, form: Form, seed: int, attempts: int) -> FMatrix:
    """
    B = V·diag(lambda) with all leading principal minors of B·B^* nonzero.

    Deterministic greedy sweep first (lambda_1 = 1, nodes = first k elements);
    then seeded random nodes and scalings.
    """
    elements = spec.elements()
    nonzero = spec.nonzero_elements()
    one = spec.one()

    nodes = elements[:k]
    lambdas = [one] * k
    for i in range(1, k):
        for cand in nonzero:
            trial = lambdas[:i] + [cand] + lambdas[i + 1:]
            if _first_zero_minor(nodes, trial, form, i + 1) is None:
                lambdas = trial
                break
    if _first_zero_minor(nodes, lambdas, form, k) is None:
        logger.info("lambda_search_done", field=str(spec), k=k, form=str(form), phase="sweep")
        return vandermonde(nodes, lambdas)

    rng = random.Random(seed)
    for attempt in range(1, attempts + 1):
        nodes = rng.sample(elements, k)
        lambdas = [one] + [rng.choice(nonzero) for _ in range(k - 1)]
        if _first_zero_minor(nodes, lambdas, form, k) is None:
            logger.info("lambda_search_done", field=str(spec), k=k, form=str(form),
                        phase="random", seed=seed, attempts=attempt)
            return vandermonde(nodes, lambdas)
    raise SearchExhaustedError(
        f"no scaling found for k = {k} over {spec} after {attempts} attempts (seed {seed})")


def nsc_quasi_unitary(spec: FieldSpec, k: int, seed: Optional[int] = None,
                      attempts: Optional[int] = None) -> CongruenceCertificate:
    """Certified k x k NSC quasi-unitary matrix over GF(q^2) for 1 <= k < q."""
    _require_form(spec, Form.HERMITIAN)
    if not 1 <= k < spec.base_q:
        raise PreconditionError(f"need 1 <= k < q = {spec.base_q}, got k = {k}")
    seed = Config.DEFAULT_SEED if seed is None else seed
    attempts = Config.SEARCH_ATTEMPTS if attempts is None else attempts
    b = _lambda_search(spec, k, Form.HERMITIAN, seed, attempts)
    return lower_quasi_unitarize(b)


def nsc_quasi_orthogonal(spec: FieldSpec, k: int, seed: Optional[int] = None,
                         attempts: Optional[int] = None) -> CongruenceCertificate:
    """Certified k x k NSC quasi-orthogonal matrix over GF(q) for 1 <= k <= q."""
    if not 1 <= k <= spec.q:
        raise PreconditionError(f"need 1 <= k <= q = {spec.q}, got k = {k}")
    seed = Config.DEFAULT_SEED if seed is None else seed
    attempts = Config.SEARCH_ATTEMPTS if attempts is None else attempts
    b = _lambda_search(spec, k, Form.EUCLIDEAN, seed, attempts)
    return lower_quasi_orthogonalize(b)


def exhaustive_nsc_quasi_unitary_search(spec: FieldSpec, k: int = 2,
                                        cap: Optional[int] = None) -> Optional[FMatrix]:
    """First k x k NSC quasi-unitary matrix in enumeration order, or None."""
    _require_form(spec, Form.HERMITIAN)
    cap = Config.ENUMERATION_CAP if cap is None else cap
    total = spec.q ** (k * k)
    if total > cap:
        raise EnumerationCapError(total, cap, f"{k}x{k} matrix scan")
    for values in itertools.product(range(1, spec.q), repeat=k):
        for rest in itertools.product(range(spec.q), repeat=k * (k - 1)):
            m = FMatrix(spec, spec.array(list(values + rest)).reshape(k, k))
            g = gram(m, Form.HERMITIAN)
            if not g.is_diagonal() or any(d.is_zero() for d in g.diagonal()):
                continue
            if m.rank() == k and is_nsc(m):
                return m
    logger.info("exhaustive_scan_empty", field=str(spec), k=k, scanned=total)
    return None


# ============= Explicit 2/3/4 families =============

_FAMILY_CONDITIONS = {
    2: [
        ("x != 0", lambda x, q: x),
        ("x^2 != 1", lambda x, q: x**2 - 1),
        ("x^(q+1) != -1", lambda x, q: x ** (q + 1) + 1),
    ],
    3: [
        ("x != 0", lambda x, q: x),
        ("x != 1", lambda x, q: x - 1),
        ("x^(q+1) + 2 != 0", lambda x, q: x ** (q + 1) + 2),
        ("x^(q+1) - x^q - x + 3 != 0", lambda x, q: x ** (q + 1) - x**q - x + 3),
    ],
    4: [
        ("x != 0", lambda x, q: x),
        ("x != 1", lambda x, q: x - 1),
        ("x != -1", lambda x, q: x + 1),
        ("x != 3", lambda x, q: x - 3),
        ("x^(q+1) + 3 != 0", lambda x, q: x ** (q + 1) + 3),
        ("2x^(q+1) + 9 != 0", lambda x, q: 2 * x ** (q + 1) + 9),
        ("x^(q+1) - 3x^q - 3x + 15 != 0", lambda x, q: x ** (q + 1) - 3 * x**q - 3 * x + 15),
    ],
}


def _check_family_order(spec: FieldSpec, order: int):
    _require_form(spec, Form.HERMITIAN)
    if order not in _FAMILY_CONDITIONS:
        raise PreconditionError(f"explicit families exist for orders 2, 3, 4; got {order}")
    if order == 4 and spec.base_q < 5:
        raise PreconditionError(f"the 4x4 family needs q >= 5, got q = {spec.base_q}")


def family_membership(spec: FieldSpec, order: int, a: FieldElement) -> Optional[str]:
    """The first defining inequation a violates, or None when a is a member."""
    _check_family_order(spec, order)
    a = spec.element(a)
    for label, expr in _FAMILY_CONDITIONS[order]:
        if expr(a, spec.base_q).is_zero():
            return label
    return None


def family_member(spec: FieldSpec, order: int) -> FieldElement:
    """Enumeration-smallest member of the defining set."""
    for a in spec.elements():
        if family_membership(spec, order, a) is None:
            return a
    raise SearchExhaustedError(f"no member of the order-{order} family in {spec}")


def family_source(spec: FieldSpec, order: int, a: FieldElement) -> FMatrix:
    rows = {
        2: [[1, a], [a, 1]],
        3: [[1, 1, a], [1, 0, 1], [0, 0, 1]],
        4: [[1, 1, 1, a], [1, 0, -1, 1], [0, 0, 1, 1], [0, 0, 0, 1]],
    }[order]
    return FMatrix.from_rows(spec, rows)


def _family_closed_form(spec: FieldSpec, order: int, a: FieldElement):
    q = spec.base_q
    aq, n = a**q, a ** (q + 1)
    if order == 2:
        r = (1 + n).inv()
        transform = [[1, 0], [-(aq + a) * r, 1]]
        diag = [1 + n, (1 - a**2) * (1 - a ** (2 * q)) * r]
    elif order == 3:
        p1 = (n - aq - a + 3).inv()
        transform = [[1, 0, 0],
                     [-(aq + 1) * (n + 2).inv(), 1, 0],
                     [(1 - aq) * p1, (aq - 2) * p1, 1]]
        diag = [n + 2, ((n + 2) * p1).inv(), p1]
    else:
        p2 = (n - 3 * aq - 3 * a + 15).inv()
        p3 = (2 * n + 9).inv()
        p4 = (n + 3).inv()
        p5 = aq + 1
        transform = [[1, 0, 0, 0],
                     [-aq * p4, 1, 0, 0],
                     [-3 * p3 * p5, a * p3 * p5, 1, 0],
                     [(3 - aq) * p2, (aq - 5) * p2, (2 * aq - 9) * p2, 1]]
        diag = [p4.inv(), p4 * p3.inv(), p3 * p2.inv(), p2]
    return FMatrix.from_rows(spec, transform), tuple(spec.element(d) for d in diag)


def explicit_family(spec: FieldSpec, order: int, a: Optional[FieldElement] = None) -> CongruenceCertificate:
    """Closed-form NSC quasi-unitary matrix of order 2, 3 or 4, certified."""
    _check_family_order(spec, order)
    a = family_member(spec, order) if a is None else spec.element(a)
    failed = family_membership(spec, order, a)
    if failed is not None:
        raise MembershipError(order, failed)
    source = family_source(spec, order, a)
    transform, diag = _family_closed_form(spec, order, a)
    cert = CongruenceCertificate(
        source=source,
        transform=transform,
        result=transform @ source,
        gram_diagonal=diag,
        flavor=Flavor.LOWER,
        form=Form.HERMITIAN,
        source_nsc=True,
    )
    logger.debug("explicit_family", field=str(spec), order=order, parameter=a.value)
    return cert.verify()
