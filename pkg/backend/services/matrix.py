"""
Matrix Service - exact dense linear algebra over a FieldSpec.

FMatrix wraps a 2-D galois array and never exposes it for mutation. Index
sets that appear in results (NSC witnesses, permutations, Cauchy-Binet row and
column sets) are 1-based; everything else uses Python indexing.
"""
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config import Config
from services.errors import EnumerationCapError, PreconditionError, VerificationError
from services.ffield import FieldElement, FieldError, FieldSpec
from services.logger import get_logger

logger = get_logger(__name__)

Entry = Union[int, FieldElement]


class Form(str, Enum):
    """Bilinear (euclidean) or sesquilinear (hermitian) inner product."""
    EUCLIDEAN = "euclidean"
    HERMITIAN = "hermitian"


class ShapeError(PreconditionError):
    """Matrix dimensions are incompatible with the operation."""


class SingularMatrixError(PreconditionError):
    """A non-singular matrix was required."""


class NotMonomialError(PreconditionError):
    """Matrix is not a diagonal matrix times a permutation matrix."""


# ============= FMatrix =============

class FMatrix:
    """Immutable rows x cols matrix over one FieldSpec."""

    __slots__ = ("spec", "_a")

    def __init__(self, spec: FieldSpec, array):
        a = array if isinstance(array, spec.gf) else spec.array(array)
        if a.ndim != 2:
            raise ShapeError(f"expected a 2-D array, got shape {a.shape}")
        self.spec = spec
        self._a = a

    # -- constructors --

    @classmethod
    def from_rows(cls, spec: FieldSpec, rows: Sequence[Sequence[Entry]],
                  cols: Optional[int] = None) -> "FMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls.zeros(spec, 0, cols or 0)
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ShapeError("rows have different lengths")
        if cols is not None and cols != width:
            raise ShapeError(f"expected {cols} columns, got {width}")
        values = [[_entry_value(spec, e) for e in r] for r in rows]
        return cls(spec, spec.gf(np.array(values, dtype=np.int64).reshape(len(rows), width)))

    @classmethod
    def zeros(cls, spec: FieldSpec, rows: int, cols: int) -> "FMatrix":
        return cls(spec, spec.gf.Zeros((rows, cols)))

    @classmethod
    def identity(cls, spec: FieldSpec, k: int) -> "FMatrix":
        return cls(spec, spec.gf.Identity(k))

    @classmethod
    def diag(cls, spec: FieldSpec, entries: Sequence[Entry]) -> "FMatrix":
        k = len(entries)
        a = spec.gf.Zeros((k, k))
        for i, e in enumerate(entries):
            a[i, i] = _entry_value(spec, e)
        return cls(spec, a)

    # -- shape and access --

    @property
    def shape(self) -> Tuple[int, int]:
        return self._a.shape

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def array(self):
        """A copy of the underlying galois array."""
        return self._a.copy()

    def __getitem__(self, index: Tuple[int, int]) -> FieldElement:
        i, j = index
        return FieldElement(self.spec, int(self._a[i, j]))

    def row(self, i: int) -> List[FieldElement]:
        return [FieldElement(self.spec, int(v)) for v in self._a[i]]

    def entries(self) -> List[List[FieldElement]]:
        return [self.row(i) for i in range(self.rows)]

    def to_ints(self) -> List[List[int]]:
        return self._a.view(np.ndarray).astype(int).tolist()

    def diagonal(self) -> List[FieldElement]:
        return [self[i, i] for i in range(min(self.shape))]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "FMatrix":
        r = np.asarray(list(rows), dtype=np.intp)
        c = np.asarray(list(cols), dtype=np.intp)
        return FMatrix(self.spec, self._a[np.ix_(r, c)])

    def nonzero_mask(self) -> np.ndarray:
        return self._a.view(np.ndarray) != 0

    # -- algebra --

    def _check_same_field(self, other: "FMatrix"):
        if other.spec != self.spec:
            raise FieldError(f"mixed fields: {self.spec} and {other.spec}")

    def __matmul__(self, other: "FMatrix") -> "FMatrix":
        self._check_same_field(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        if self.cols == 0:
            return FMatrix.zeros(self.spec, self.rows, other.cols)
        return FMatrix(self.spec, self._a @ other._a)

    def __add__(self, other: "FMatrix") -> "FMatrix":
        self._check_same_field(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot add {self.shape} and {other.shape}")
        return FMatrix(self.spec, self._a + other._a)

    def __sub__(self, other: "FMatrix") -> "FMatrix":
        self._check_same_field(other)
        if self.shape != other.shape:
            raise ShapeError(f"cannot subtract {other.shape} from {self.shape}")
        return FMatrix(self.spec, self._a - other._a)

    def __neg__(self) -> "FMatrix":
        return FMatrix(self.spec, -self._a)

    def scale(self, c: Entry) -> "FMatrix":
        return FMatrix(self.spec, self._a * self.spec.gf(_entry_value(self.spec, c)))

    def __rmul__(self, c: Entry) -> "FMatrix":
        return self.scale(c)

    @property
    def T(self) -> "FMatrix":
        return FMatrix(self.spec, self._a.T.copy())

    def conj(self) -> "FMatrix":
        """Entrywise conjugation x -> x^q (quadratic specs only)."""
        if not self.spec.is_quadratic:
            raise FieldError(f"{self.spec} is not declared as a quadratic extension")
        return FMatrix(self.spec, self._a ** self.spec.base_q)

    @property
    def H(self) -> "FMatrix":
        return self.conj().T

    def inverse(self) -> "FMatrix":
        if not self.is_square:
            raise ShapeError(f"inverse of a non-square {self.shape} matrix")
        if self.rows == 0:
            return self
        if self.det().is_zero():
            raise SingularMatrixError("matrix is singular")
        if self.rows == 1:
            return FMatrix(self.spec, np.reciprocal(self._a))
        return FMatrix(self.spec, np.linalg.inv(self._a))

    def det(self) -> FieldElement:
        if not self.is_square:
            raise ShapeError(f"determinant of a non-square {self.shape} matrix")
        if self.rows == 0:
            return self.spec.one()
        if self.rows == 1:
            return self[0, 0]
        return FieldElement(self.spec, int(np.linalg.det(self._a)))

    def rank(self) -> int:
        return len(row_reduce(self)[1])

    # -- predicates --

    def is_diagonal(self) -> bool:
        mask = self.nonzero_mask()
        return self.is_square and not np.any(mask & ~np.eye(self.rows, dtype=bool))

    def is_symmetric(self) -> bool:
        return self.is_square and self == self.T

    def is_hermitian(self) -> bool:
        return self.is_square and self == self.H

    def is_lower_unitriangular(self) -> bool:
        if not self.is_square:
            return False
        upper = np.triu(self.nonzero_mask(), k=1)
        return not upper.any() and all(d.value == 1 for d in self.diagonal())

    def is_upper_unitriangular(self) -> bool:
        return self.is_square and self.T.is_lower_unitriangular()

    # -- value semantics --

    def __eq__(self, other) -> bool:
        if not isinstance(other, FMatrix):
            return NotImplemented
        return (self.spec == other.spec and self.shape == other.shape
                and bool(np.array_equal(self._a.view(np.ndarray), other._a.view(np.ndarray))))

    __hash__ = None

    def __repr__(self) -> str:
        return f"FMatrix({self.spec}, {self.to_ints()})"


def _entry_value(spec: FieldSpec, e: Entry) -> int:
    if isinstance(e, FieldElement):
        return spec.element(e).value
    value = int(e)
    if not 0 <= value < spec.q:
        # integers outside the representation range act through Z -> GF(p)
        return value % spec.p
    return value


def hstack(blocks: Sequence[FMatrix]) -> FMatrix:
    spec = blocks[0].spec
    return FMatrix(spec, np.hstack([b._a for b in blocks]).view(spec.gf))


def vstack(blocks: Sequence[FMatrix]) -> FMatrix:
    spec = blocks[0].spec
    cols = {b.cols for b in blocks}
    if len(cols) != 1:
        raise ShapeError(f"cannot stack blocks with column counts {sorted(cols)}")
    return FMatrix(spec, np.vstack([b._a for b in blocks]).view(spec.gf))


# Function forms of the basic operations

def mul(a: FMatrix, b: FMatrix) -> FMatrix:
    return a @ b


def transpose(a: FMatrix) -> FMatrix:
    return a.T


def conj_transpose(a: FMatrix) -> FMatrix:
    return a.H


def inverse(a: FMatrix) -> FMatrix:
    return a.inverse()


def det(a: FMatrix) -> FieldElement:
    return a.det()


def rank(a: FMatrix) -> int:
    return a.rank()


def gram(a: FMatrix, form: str = Form.EUCLIDEAN) -> FMatrix:
    """A·A^T (euclidean) or A·A^† (hermitian)."""
    return a @ star(a, form)


def star(a: FMatrix, form: str = Form.EUCLIDEAN) -> FMatrix:
    return a.H if form == Form.HERMITIAN else a.T


# ============= Row reduction =============

def row_reduce(a: FMatrix) -> Tuple[FMatrix, List[int]]:
    """Reduced row echelon form and pivot columns; pivot = first nonzero entry in column order."""
    spec = a.spec
    r_arr = a._a.copy()
    n_rows, n_cols = r_arr.shape
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        nz = np.flatnonzero(r_arr[r:, c].view(np.ndarray))
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            r_arr[[r, pr]] = r_arr[[pr, r]]
        r_arr[r] = r_arr[r] / r_arr[r, c]
        factors = r_arr[:, c].copy()
        factors[r] = 0
        r_arr = r_arr - factors[:, None] * r_arr[r][None, :]
        pivots.append(c)
        r += 1
    return FMatrix(spec, r_arr), pivots


def row_space_basis(a: FMatrix) -> FMatrix:
    reduced, pivots = row_reduce(a)
    return reduced.submatrix(range(len(pivots)), range(a.cols))


def null_space(a: FMatrix) -> FMatrix:
    """Rows spanning {x : a·x^T = 0}."""
    spec = a.spec
    reduced, pivots = row_reduce(a)
    free = [c for c in range(a.cols) if c not in pivots]
    basis = spec.gf.Zeros((len(free), a.cols))
    for row, f in enumerate(free):
        basis[row, f] = 1
        for pr, pc in enumerate(pivots):
            basis[row, pc] = -reduced._a[pr, f]
    return FMatrix(spec, basis)


# ============= Minors and NSC =============

def leading_principal_minors(a: FMatrix) -> List[FieldElement]:
    """det of the top-left 1x1, 2x2, ..., kxk blocks."""
    if not a.is_square:
        raise ShapeError("leading principal minors need a square matrix")
    return [a.submatrix(range(i), range(i)).det() for i in range(1, a.rows + 1)]


def trailing_principal_minors(a: FMatrix) -> List[FieldElement]:
    """det of the bottom-right 1x1, 2x2, ..., kxk blocks."""
    if not a.is_square:
        raise ShapeError("trailing principal minors need a square matrix")
    k = a.rows
    return [a.submatrix(range(k - i, k), range(k - i, k)).det() for i in range(1, k + 1)]


@dataclass(frozen=True)
class NSCResult:
    """Outcome of an NSC test; witness is (i, 1-based columns) of the first singular block."""
    ok: bool
    witness: Optional[Tuple[int, Tuple[int, ...]]] = None

    def __bool__(self) -> bool:
        return self.ok


def _check_nsc_size(k: int, max_k: Optional[int]):
    max_k = Config.NSC_MAX_K if max_k is None else max_k
    if k > max_k:
        raise EnumerationCapError(2**k - 1, 2**max_k - 1, f"NSC check of a {k}x{k} matrix")


def prefix_minors(a: FMatrix, max_k: Optional[int] = None) -> Dict[Tuple[int, Tuple[int, ...]], FieldElement]:
    """All |A(j_1..j_i)|: first i rows, 1-based columns j_1 < ... < j_i."""
    _check_nsc_size(a.rows, max_k)
    minors = {}
    for i in range(1, a.rows + 1):
        for cols in itertools.combinations(range(a.cols), i):
            minors[(i, tuple(c + 1 for c in cols))] = a.submatrix(range(i), cols).det()
    return minors


def is_nsc(a: FMatrix, max_k: Optional[int] = None) -> NSCResult:
    """Non-singular by columns: every first-i-rows square submatrix is invertible."""
    if not a.is_square:
        raise ShapeError("NSC is defined for square matrices")
    k = a.rows
    _check_nsc_size(k, max_k)
    first_row = a.nonzero_mask()[0] if k else np.array([], dtype=bool)
    for j, nz in enumerate(first_row):
        if not nz:
            return NSCResult(False, (1, (j + 1,)))
    for i in range(2, k + 1):
        for cols in itertools.combinations(range(k), i):
            if a.submatrix(range(i), cols).det().is_zero():
                return NSCResult(False, (i, tuple(c + 1 for c in cols)))
    return NSCResult(True)


# ============= Exhaustive span enumeration =============

def _message_block(spec: FieldSpec, t: int, start: int, stop: int):
    idx = np.arange(start, stop, dtype=np.int64)
    powers = spec.q ** np.arange(t, dtype=np.int64)
    return spec.gf((idx[:, None] // powers[None, :]) % spec.q)


def _block_min_weight(a: FMatrix, start: int, stop: int) -> int:
    msgs = _message_block(a.spec, a.rows, start, stop)
    words = (msgs @ a._a).view(np.ndarray)
    weights = np.count_nonzero(words, axis=1)
    if start == 0:
        weights = weights[1:]
    return int(weights.min()) if weights.size else a.cols + 1


def span_min_weight(a: FMatrix, cap: Optional[int] = None, workers: Optional[int] = None,
                    what: str = "span enumeration") -> int:
    """
    Minimum Hamming weight over all nonzero coefficient vectors applied to the rows of a.

    Plain odometer over q^rows messages in chunks; chunk results are combined with min,
    so the answer does not depend on how the range is partitioned.
    """
    cap = Config.ENUMERATION_CAP if cap is None else cap
    workers = max(1, Config.WORKERS if workers is None else workers)
    if a.rows == 0:
        raise PreconditionError("span of zero rows has no nonzero combination")
    total = a.spec.q ** a.rows
    if total > cap:
        raise EnumerationCapError(total, cap, what)
    chunk = max(1, Config.ENUMERATION_CHUNK)
    ranges = [(s, min(s + chunk, total)) for s in range(0, total, chunk)]
    logger.debug("span_enumeration", field=str(a.spec), rows=a.rows, total=total,
                 chunks=len(ranges), workers=workers)
    if workers == 1 or len(ranges) == 1:
        return min(_block_min_weight(a, s, e) for s, e in ranges)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return min(pool.map(lambda r: _block_min_weight(a, *r), ranges))


def di_profile_bruteforce(a: FMatrix, cap: Optional[int] = None) -> List[int]:
    """D_i(A) for i = 1..k: minimum weight of the code spanned by the first i rows."""
    cap = Config.ENUMERATION_CAP if cap is None else cap
    total = a.spec.q ** a.rows
    if total > cap:
        raise EnumerationCapError(total, cap, "D_i profile enumeration")
    return [span_min_weight(a.submatrix(range(i), range(a.cols)), cap=cap)
            for i in range(1, a.rows + 1)]


# ============= Monomial matrices =============

@dataclass(frozen=True)
class MonomialParts:
    """B = D·P_tau with D = diag(diag) and tau given as images (i_1, ..., i_k), 1-based."""
    diag: Tuple[FieldElement, ...]
    perm: Tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
            raise NotMonomialError(f"{self.perm} is not a permutation of 1..{len(self.perm)}")
        if any(d.is_zero() for d in self.diag):
            raise NotMonomialError("diagonal part has a zero entry")

    @property
    def is_identity_perm(self) -> bool:
        return all(i == j + 1 for j, i in enumerate(self.perm))

    def reassemble(self) -> FMatrix:
        spec = self.diag[0].spec
        return FMatrix.diag(spec, self.diag) @ permutation_matrix(spec, self.perm)


def permutation_matrix(spec: FieldSpec, perm: Sequence[int]) -> FMatrix:
    """P_tau: row i_j of the identity is replaced by row j."""
    k = len(perm)
    if sorted(perm) != list(range(1, k + 1)):
        raise PreconditionError(f"{list(perm)} is not a permutation of 1..{k}")
    a = spec.gf.Zeros((k, k))
    for j, i in enumerate(perm):
        a[i - 1, j] = 1
    return FMatrix(spec, a)


def monomial_decompose(b: FMatrix) -> MonomialParts:
    if not b.is_square or b.rows == 0:
        raise ShapeError("monomial decomposition needs a non-empty square matrix")
    mask = b.nonzero_mask()
    for r, count in enumerate(mask.sum(axis=1)):
        if count != 1:
            raise NotMonomialError(f"row {r + 1} has {count} nonzero entries")
    for c, count in enumerate(mask.sum(axis=0)):
        if count != 1:
            raise NotMonomialError(f"column {c + 1} has {count} nonzero entries")
    perm = tuple(int(np.flatnonzero(mask[:, j])[0]) + 1 for j in range(b.cols))
    diag = tuple(b[r, int(np.flatnonzero(mask[r])[0])] for r in range(b.rows))
    return MonomialParts(diag=diag, perm=perm)


# ============= Structured builders =============

def vandermonde(xs: Sequence[FieldElement], lambdas: Sequence[FieldElement]) -> FMatrix:
    """Entry (r, j) = lambda_j * x_j^(r-1); NSC for distinct nodes and nonzero scalings."""
    if len(xs) != len(lambdas) or not xs:
        raise PreconditionError("nodes and scalings must be non-empty and of equal length")
    spec = xs[0].spec
    k = len(xs)
    if k > spec.q:
        raise PreconditionError(f"k = {k} exceeds q = {spec.q}")
    if len({x.value for x in xs}) != k:
        raise PreconditionError("Vandermonde nodes must be pairwise distinct")
    if any(lam.is_zero() for lam in lambdas):
        raise PreconditionError("Vandermonde scalings must be nonzero")
    rows = [[lam * x**r for x, lam in zip(xs, lambdas)] for r in range(k)]
    v = FMatrix.from_rows(spec, rows)
    if Config.DEBUG:
        result = is_nsc(v)
        if not result:
            raise VerificationError(f"Vandermonde matrix failed NSC at {result.witness}")
    return v


# ============= Cauchy-Binet oracle =============

def cauchy_binet_check(x: FMatrix, y: FMatrix, u: int,
                       rowset: Sequence[int], colset: Sequence[int]) -> bool:
    """Compare a u x u minor of X·Y with the Cauchy-Binet sum (1-based index sets)."""
    s, n = x.shape
    if y.shape != (n, s):
        raise ShapeError(f"expected Y of shape {(n, s)}, got {y.shape}")
    if not 1 <= u <= s or len(rowset) != u or len(colset) != u:
        raise ShapeError(f"index sets must have size u = {u} <= {s}")
    if any(not 1 <= i <= s for i in itertools.chain(rowset, colset)):
        raise ShapeError("index out of range")
    rows = [i - 1 for i in rowset]
    cols = [j - 1 for j in colset]
    lhs = (x @ y).submatrix(rows, cols).det()
    rhs = x.spec.zero()
    if u <= n:
        for v in itertools.combinations(range(n), u):
            rhs = rhs + x.submatrix(rows, v).det() * y.submatrix(v, cols).det()
    return lhs == rhs
