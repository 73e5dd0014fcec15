"""
Linear Code Service - [n, t, d]_q codes given by a row-full-rank generator matrix.

Codes are compared by codeword set through rank tests, never by generator
equality. The minimum distance is computed exhaustively and cached once.
"""
import itertools
import random
import threading
from typing import Iterator, List, Optional, Sequence

import numpy as np

from config import Config
from services.errors import EnumerationCapError, PreconditionError
from services.ffield import FieldElement, FieldError, FieldSpec, random_element
from services.logger import get_logger
from services.matrix import (
    FMatrix,
    Form,
    null_space,
    row_space_basis,
    span_min_weight,
    vstack,
)

logger = get_logger(__name__)

EUCLIDEAN = Form.EUCLIDEAN
HERMITIAN = Form.HERMITIAN


class CodeError(PreconditionError):
    """Invalid code construction or incompatible codes."""


class LinearCode:
    """Linear code of length n spanned by the rows of gen (rank(gen) = t)."""

    __slots__ = ("spec", "n", "gen", "_min_distance", "_lock")

    def __init__(self, gen: FMatrix, min_distance: Optional[int] = None):
        if gen.rank() != gen.rows:
            raise CodeError(f"generator has {gen.rows} rows but rank {gen.rank()}")
        self.spec: FieldSpec = gen.spec
        self.n: int = gen.cols
        self.gen = gen
        self._min_distance = min_distance
        self._lock = threading.Lock()

    @classmethod
    def from_rows(cls, spec: FieldSpec, rows, n: Optional[int] = None) -> "LinearCode":
        return cls(FMatrix.from_rows(spec, rows, cols=n))

    @classmethod
    def spanned_by(cls, vectors: FMatrix) -> "LinearCode":
        """Code spanned by arbitrary (possibly dependent) rows."""
        return cls(row_space_basis(vectors))

    @property
    def dimension(self) -> int:
        return self.gen.rows

    t = dimension

    @property
    def cached_min_distance(self) -> Optional[int]:
        return self._min_distance

    def check_matrix(self) -> FMatrix:
        """Parity-check matrix: a generator of the Euclidean dual."""
        return null_space(self.gen)

    def __repr__(self) -> str:
        d = f", d={self._min_distance}" if self._min_distance is not None else ""
        return f"LinearCode([{self.n}, {self.dimension}{d}] over {self.spec})"


# ============= Constructors =============

def full_space(spec: FieldSpec, n: int) -> LinearCode:
    return LinearCode(FMatrix.identity(spec, n), min_distance=1 if n else None)


def zero_code(spec: FieldSpec, n: int) -> LinearCode:
    return LinearCode(FMatrix.zeros(spec, 0, n))


def random_code(spec: FieldSpec, n: int, t: int, rng: random.Random) -> LinearCode:
    """Uniform-ish random [n, t] code (redraws until the generator has full rank)."""
    if not 0 <= t <= n:
        raise CodeError(f"dimension {t} outside [0, {n}]")
    while True:
        rows = [[random_element(spec, rng) for _ in range(n)] for _ in range(t)]
        gen = FMatrix.from_rows(spec, rows, cols=n)
        if gen.rank() == t:
            return LinearCode(gen)


def _check_grs_inputs(a: Sequence[FieldElement], v: Sequence[FieldElement], k: int):
    if not a or len(a) != len(v):
        raise CodeError("evaluation points and column multipliers must have equal nonzero length")
    spec = a[0].spec
    n = len(a)
    if not 1 <= k <= n or n > spec.q:
        raise CodeError(f"need 1 <= k <= n <= q, got k={k}, n={n}, q={spec.q}")
    if len({x.value for x in a}) != n:
        raise CodeError("evaluation points must be pairwise distinct")
    if any(x.is_zero() for x in v):
        raise CodeError("column multipliers must be nonzero")
    return spec, n


def grs(a: Sequence[FieldElement], v: Sequence[FieldElement], k: int) -> LinearCode:
    """Generalized Reed-Solomon code: row r, column j is v_j * a_j^(r-1)."""
    spec, n = _check_grs_inputs(a, v, k)
    rows = [[vj * aj**r for aj, vj in zip(a, v)] for r in range(k)]
    return LinearCode(FMatrix.from_rows(spec, rows))


def extended_grs(a: Sequence[FieldElement], v: Sequence[FieldElement], k: int) -> LinearCode:
    """GRS with one extra column (0, ..., 0, 1)."""
    spec, n = _check_grs_inputs(a, v, k)
    rows = [[vj * aj**r for aj, vj in zip(a, v)] + [spec.one() if r == k - 1 else spec.zero()]
            for r in range(k)]
    return LinearCode(FMatrix.from_rows(spec, rows))


# ============= Metric =============

def hamming_weight(x: Sequence[FieldElement]) -> int:
    return sum(1 for e in x if not e.is_zero())


def hamming_distance(x: Sequence[FieldElement], y: Sequence[FieldElement]) -> int:
    if len(x) != len(y):
        raise CodeError("Hamming distance needs equal-length vectors")
    return sum(1 for a, b in zip(x, y) if a != b)


def singleton_bound(c: LinearCode) -> int:
    return c.n - c.dimension + 1


def min_distance(c: LinearCode, cap: Optional[int] = None, workers: Optional[int] = None) -> int:
    """Exact minimum weight over all q^t - 1 nonzero codewords (cached)."""
    if c.dimension == 0:
        raise CodeError("the zero code has no nonzero codeword")
    if c._min_distance is not None:
        return c._min_distance
    d = span_min_weight(c.gen, cap=cap, workers=workers, what="minimum-distance enumeration")
    with c._lock:
        if c._min_distance is None:
            c._min_distance = d
    logger.debug("min_distance", n=c.n, t=c.dimension, d=d)
    return c._min_distance


def is_mds(c: LinearCode, cap: Optional[int] = None) -> bool:
    return min_distance(c, cap=cap) == singleton_bound(c)


def codewords(c: LinearCode, cap: Optional[int] = None) -> Iterator[tuple]:
    """Every codeword as a tuple of integer representations (oracle use only)."""
    cap = Config.ENUMERATION_CAP if cap is None else cap
    total = c.spec.q ** c.dimension
    if total > cap:
        raise EnumerationCapError(total, cap, "codeword enumeration")
    gen = c.gen.array
    gf = c.spec.gf
    for msg in itertools.product(range(c.spec.q), repeat=c.dimension):
        if c.dimension == 0:
            yield tuple([0] * c.n)
            continue
        word = gf(np.array([msg], dtype=np.int64)) @ gen
        yield tuple(int(x) for x in word[0])


# ============= Duals and containment =============

def _require_quadratic(c: LinearCode):
    if not c.spec.is_quadratic:
        raise FieldError(f"{c.spec} is not declared as a quadratic extension")


def dual(c: LinearCode) -> LinearCode:
    """Euclidean dual: null space of the generator."""
    return LinearCode(null_space(c.gen))


def frobenius_image(c: LinearCode) -> LinearCode:
    """C^q = {(c_1^q, ..., c_n^q)}."""
    _require_quadratic(c)
    return LinearCode(c.gen.conj())


def hermitian_dual(c: LinearCode) -> LinearCode:
    """Dual under (x, y)_H = sum x_i y_i^q; equals the Euclidean dual of C^q."""
    _require_quadratic(c)
    return LinearCode(null_space(c.gen.conj()))


def any_dual(c: LinearCode, kind: str) -> LinearCode:
    if kind == EUCLIDEAN:
        return dual(c)
    if kind == HERMITIAN:
        return hermitian_dual(c)
    raise CodeError(f"unknown dual kind '{kind}'")


def _check_compatible(c: LinearCode, d: LinearCode):
    if c.spec != d.spec:
        raise CodeError(f"codes over different fields: {c.spec} and {d.spec}")
    if c.n != d.n:
        raise CodeError(f"codes of different lengths: {c.n} and {d.n}")


def contains(c: LinearCode, d: LinearCode) -> bool:
    """rowspace(D) ⊆ rowspace(C), via rank([C; D]) == rank(C)."""
    _check_compatible(c, d)
    if d.dimension == 0:
        return True
    if d.dimension > c.dimension:
        return False
    return vstack([c.gen, d.gen]).rank() == c.dimension


def same_code(c: LinearCode, d: LinearCode) -> bool:
    return c.dimension == d.dimension and contains(c, d)


def is_dual_containing(c: LinearCode, kind: str = EUCLIDEAN) -> bool:
    return contains(c, any_dual(c, kind))


def sum_of_codes(codes: Sequence[LinearCode]) -> LinearCode:
    """Span of the union of the codes."""
    for other in codes[1:]:
        _check_compatible(codes[0], other)
    non_empty = [c.gen for c in codes if c.dimension]
    if not non_empty:
        return zero_code(codes[0].spec, codes[0].n)
    return LinearCode.spanned_by(vstack(non_empty))
