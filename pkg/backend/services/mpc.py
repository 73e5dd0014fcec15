"""
Matrix-Product Code Service - C(A) = [C_1, ..., C_k]·A.

The derived code's generator is the block matrix G(A) whose (i, j) block is
a_ij·G_i. Codeword-set equalities are decided by rank tests; the enumeration
helpers here exist for oracle tests only.
"""
import itertools
from dataclasses import dataclass
from typing import List, Optional, Sequence, Set, Tuple

import numpy as np

from config import Config
from services.errors import EnumerationCapError, PreconditionError
from services.logger import get_logger
from services.lincode import (
    EUCLIDEAN,
    HERMITIAN,
    CodeError,
    LinearCode,
    any_dual,
    codewords,
    min_distance,
    same_code,
    zero_code,
)
from services.matrix import FMatrix, SingularMatrixError, di_profile_bruteforce, hstack, vstack

logger = get_logger(__name__)


@dataclass(frozen=True)
class MatrixProductCode:
    """k constituents of length n mixed by a k x l defining matrix."""
    constituents: Tuple[LinearCode, ...]
    defining: FMatrix
    derived_code: LinearCode

    @property
    def k(self) -> int:
        return self.defining.rows

    @property
    def n(self) -> int:
        return self.constituents[0].n

    @property
    def length(self) -> int:
        return self.defining.cols * self.n

    @property
    def dimension(self) -> int:
        return self.derived_code.dimension


def _validate(constituents: Sequence[LinearCode], a: FMatrix, full_rank: bool = True):
    if not constituents:
        raise CodeError("a matrix-product code needs at least one constituent")
    spec, n = constituents[0].spec, constituents[0].n
    for c in constituents:
        if c.spec != spec or c.n != n:
            raise CodeError("constituents must share field and length")
    if a.spec != spec:
        raise CodeError(f"defining matrix over {a.spec}, constituents over {spec}")
    if a.rows != len(constituents):
        raise CodeError(f"defining matrix has {a.rows} rows for {len(constituents)} constituents")
    if full_rank and (a.rows > a.cols or a.rank() != a.rows):
        raise SingularMatrixError("defining matrix must have full row rank")


def generator_matrix(constituents: Sequence[LinearCode], a: FMatrix) -> FMatrix:
    """G(A): block row i is [a_i1·G_i, ..., a_il·G_i]."""
    spec, n = constituents[0].spec, constituents[0].n
    block_rows = []
    for i, c in enumerate(constituents):
        if c.dimension == 0:
            continue
        block_rows.append(hstack([c.gen.scale(a[i, j]) for j in range(a.cols)]))
    if not block_rows:
        return FMatrix.zeros(spec, 0, a.cols * n)
    return vstack(block_rows)


def build(constituents: Sequence[LinearCode], a: FMatrix) -> MatrixProductCode:
    """Build C(A); dimension is sum t_i because A has full row rank."""
    _validate(constituents, a)
    g = generator_matrix(constituents, a)
    derived = LinearCode(g) if g.rows else zero_code(a.spec, g.cols)
    logger.debug("mpc_built", k=a.rows, l=a.cols, n=constituents[0].n, dim=derived.dimension)
    return MatrixProductCode(tuple(constituents), a, derived)


def apply_defining(code: LinearCode, w: FMatrix, block_length: int) -> LinearCode:
    """Image of a length l·n code under [d_1, ..., d_l] -> [d_1, ..., d_l]·W."""
    l = code.n // block_length
    if l * block_length != code.n or w.rows != l:
        raise CodeError(f"cannot apply a {w.shape} matrix to length {code.n} in blocks of {block_length}")
    spec = code.spec
    images = []
    for r in range(code.dimension):
        blocks = FMatrix(spec, code.gen.array[r].reshape(l, block_length))
        images.append((w.T @ blocks).array.reshape(-1))
    if not images:
        return zero_code(spec, w.cols * block_length)
    return LinearCode.spanned_by(FMatrix(spec, np.vstack(images).view(spec.gf)))


def _span(constituents: Sequence[LinearCode], a: FMatrix) -> LinearCode:
    """Span of the rows of G(A); A may be rank deficient."""
    g = generator_matrix(constituents, a)
    return LinearCode.spanned_by(g) if g.rows else zero_code(a.spec, g.cols)


def associativity_check(constituents: Sequence[LinearCode], v: FMatrix, w: FMatrix) -> bool:
    """[C_1..C_k](V·W) == ([C_1..C_k]V)·W as codeword sets."""
    if v.cols != w.rows:
        raise CodeError(f"cannot multiply {v.shape} by {w.shape}")
    _validate(constituents, v, full_rank=False)
    left = _span(constituents, v @ w)
    right = apply_defining(_span(constituents, v), w, constituents[0].n)
    return same_code(left, right)


def definitional_codewords(mpc: MatrixProductCode, cap: Optional[int] = None) -> Set[tuple]:
    """{[sum_i a_i1 c_i, ..., sum_i a_il c_i]} by enumerating every constituent tuple."""
    cap = Config.ENUMERATION_CAP if cap is None else cap
    spec = mpc.defining.spec
    total = 1
    for c in mpc.constituents:
        total *= spec.q ** c.dimension
    if total > cap:
        raise EnumerationCapError(total, cap, "definitional codeword enumeration")
    a = mpc.defining.array
    words = set()
    per_code = [list(codewords(c, cap=cap)) for c in mpc.constituents]
    for choice in itertools.product(*per_code):
        stacked = spec.array(np.array(choice, dtype=np.int64).reshape(mpc.k, mpc.n))
        words.add(tuple(int(x) for x in (a.T @ stacked).reshape(-1)))
    return words


def distance_bound(mpc: MatrixProductCode, cap: Optional[int] = None) -> int:
    """min_i D_i(A)·d_i over constituents with a nonzero codeword."""
    profile = di_profile_bruteforce(mpc.defining, cap=cap)
    terms = [di * min_distance(c, cap=cap)
             for di, c in zip(profile, mpc.constituents) if c.dimension]
    if not terms:
        raise CodeError("every constituent is the zero code")
    return min(terms)


def dual_formula_check(mpc: MatrixProductCode, kind: str = EUCLIDEAN) -> bool:
    """
    dual(C(A)) == [C_1^perp, ..., C_k^perp]·(A^-1)^T, or the Hermitian form with (A^-1)^†.

    Decided by rank-based mutual containment.
    """
    a = mpc.defining
    if not a.is_square:
        raise PreconditionError("the dual formula needs a square defining matrix")
    a_inv = a.inverse()
    dual_defining = a_inv.H if kind == HERMITIAN else a_inv.T
    predicted = build([any_dual(c, kind) for c in mpc.constituents], dual_defining)
    actual = any_dual(mpc.derived_code, kind)
    return same_code(actual, predicted.derived_code)
