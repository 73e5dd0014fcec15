"""
Matrix Tests - exact linear algebra, NSC checks and monomial decomposition.

Run with: pytest tests/test_matrix.py -v
"""
import pytest
import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config import Config
from services.errors import EnumerationCapError, PreconditionError
from services.ffield import make_field, random_element
from services.matrix import (
    FMatrix,
    Form,
    NotMonomialError,
    ShapeError,
    SingularMatrixError,
    cauchy_binet_check,
    conj_transpose,
    di_profile_bruteforce,
    gram,
    is_nsc,
    leading_principal_minors,
    monomial_decompose,
    mul,
    null_space,
    permutation_matrix,
    prefix_minors,
    row_reduce,
    span_min_weight,
    trailing_principal_minors,
    transpose,
    vandermonde,
)


def _random_matrix(spec, rows, cols, rng):
    return FMatrix.from_rows(spec, [[random_element(spec, rng) for _ in range(cols)]
                                    for _ in range(rows)], cols=cols)


def _random_lower_unitriangular(spec, k, rng):
    rows = [[random_element(spec, rng) if j < i else (1 if j == i else 0) for j in range(k)]
            for i in range(k)]
    return FMatrix.from_rows(spec, rows)


class TestBasics:
    """Test arithmetic, determinant, inverse and rank."""

    def test_det(self, gf5, mat):
        """Determinant of a 3x3 GF(5) matrix."""
        a = mat(gf5, [[1, 1, 2], [2, 0, 3], [1, 4, 0]])
        # 1*(0-12) - 1*(0-3) + 2*(8-0) = 7
        assert a.det().value == 2

    def test_inverse(self, gf7, mat, rng, random_nonsingular):
        """A·A^-1 = I on random invertible matrices."""
        for _ in range(5):
            a = random_nonsingular(gf7, 3, rng)
            assert a @ a.inverse() == FMatrix.identity(gf7, 3)

    def test_singular_inverse(self, gf5, mat):
        """Singular matrices have no inverse."""
        with pytest.raises(SingularMatrixError):
            mat(gf5, [[1, 2], [2, 4]]).inverse()

    def test_one_by_one_inverse(self, gf9):
        """1x1 inverses use the field reciprocal."""
        g = gf9.generator()
        m = FMatrix.from_rows(gf9, [[g]])
        assert m.inverse()[0, 0] == g.inv()

    def test_rank(self, gf5, mat):
        """Row 3 is row 1 + row 2."""
        assert mat(gf5, [[1, 2, 3], [0, 1, 4], [1, 3, 2]]).rank() == 2

    def test_shape_mismatch(self, gf5, mat):
        """A 1x2 by 1x2 product is refused."""
        with pytest.raises(ShapeError):
            mat(gf5, [[1, 2]]) @ mat(gf5, [[1, 2]])

    def test_integers_reduce_mod_p(self, gf5, mat):
        """Out-of-range integers on a prime field reduce mod p."""
        assert mat(gf5, [[-1, 7]]).to_ints() == [[4, 2]]

    def test_functional_forms(self, gf9):
        """mul, transpose and conj_transpose agree with the operators."""
        x = gf9.generator()
        m = FMatrix.from_rows(gf9, [[x, 1], [0, x]])
        assert transpose(m) == m.T
        assert conj_transpose(m) == m.H
        assert mul(m, conj_transpose(m)) == m @ m.H

    def test_hermitian_transpose(self, gf9):
        """A^† conjugates entrywise and transposes."""
        x = gf9.generator()
        m = FMatrix.from_rows(gf9, [[x, 1]])
        assert m.H[0, 0] == -x
        assert m.H.shape == (2, 1)

    @pytest.mark.parametrize("p,m", [(2, 2), (3, 2), (2, 4)])
    def test_dagger_identities(self, p, m, rng):
        """(AB)^† = B^†A^†, (A^†)^† = A and the same for the plain transpose."""
        spec = make_field(p, m, quadratic=True)
        for _ in range(50):
            r, s, t = (rng.randint(1, 4) for _ in range(3))
            a = _random_matrix(spec, r, s, rng)
            b = _random_matrix(spec, s, t, rng)
            assert (a @ b).H == b.H @ a.H
            assert a.H.H == a
            assert (a @ b).T == b.T @ a.T
            assert a.conj().T == a.T.conj()


class TestRowReduction:
    """Test reduced echelon form and null spaces."""

    def test_pivots(self, gf5, mat):
        """Pivots are the first nonzero columns after elimination."""
        reduced, pivots = row_reduce(mat(gf5, [[0, 2, 4], [0, 1, 2], [1, 0, 1]]))
        assert pivots == [0, 1]
        assert reduced.row(0)[0].value == 1

    def test_null_space_is_orthogonal(self, gf7, rng):
        """Null space rows are orthogonal to A and count n - rank."""
        for _ in range(5):
            a = _random_matrix(gf7, 2, 5, rng)
            ns = null_space(a)
            assert ns.rows == 5 - a.rank()
            assert (a @ ns.T) == FMatrix.zeros(gf7, 2, ns.rows)


class TestMinors:
    """Test principal minors and NSC."""

    def test_leading_and_trailing(self, gf7, mat):
        """Leading and trailing principal minors of a 2x2 matrix."""
        a = mat(gf7, [[2, 1], [1, 3]])
        assert [m.value for m in leading_principal_minors(a)] == [2, 5]
        assert [m.value for m in trailing_principal_minors(a)] == [3, 5]

    def test_prefix_minors(self, gf7, mat):
        """Keys are (i, 1-based columns) over the first i rows."""
        minors = prefix_minors(mat(gf7, [[2, 1], [1, 3]]))
        assert {key: m.value for key, m in minors.items()} == {
            (1, (1,)): 2, (1, (2,)): 1, (2, (1, 2)): 5}

    @pytest.mark.parametrize("p,m", [(5, 1), (7, 1), (3, 2)])
    def test_prefix_minors_survive_lower_unitriangular_factor(self, p, m, rng):
        """L·A has the prefix minors of A for every lower unitriangular L."""
        spec = make_field(p, m)
        for _ in range(40):
            k = rng.randint(1, 4)
            a = _random_matrix(spec, k, k, rng)
            l = _random_lower_unitriangular(spec, k, rng)
            assert prefix_minors(l @ a) == prefix_minors(a)
            assert bool(is_nsc(l @ a)) == bool(is_nsc(a))

    def test_nsc_vandermonde(self, gf7):
        """A Vandermonde matrix on distinct nodes is NSC."""
        xs = gf7.elements()[:4]
        v = vandermonde(xs, [gf7.one()] * 4)
        assert is_nsc(v)

    def test_nsc_witness_zero_entry(self, gf5, mat):
        """A zero in the first row is a 1x1 witness."""
        result = is_nsc(mat(gf5, [[1, 0], [1, 1]]))
        assert not result
        assert result.witness == (1, (2,))

    def test_nsc_witness_block(self, gf5, mat):
        """The first singular 2x2 block uses columns 1 and 2."""
        result = is_nsc(mat(gf5, [[3, 3, 3], [1, 1, 3], [1, 4, 0]]))
        assert result.witness == (2, (1, 2))

    def test_nsc_size_cap(self, gf5):
        """max_k bounds the order is_nsc will accept."""
        with pytest.raises(EnumerationCapError):
            is_nsc(FMatrix.identity(gf5, 4), max_k=3)

    def test_vandermonde_rejects_repeated_nodes(self, gf5):
        """Vandermonde nodes must be distinct."""
        one = gf5.one()
        with pytest.raises(PreconditionError):
            vandermonde([one, one], [one, one])


class TestProfile:
    """Test D_i profiles and exhaustive span weights."""

    def test_nsc_profile_is_optimal(self, gf5):
        """A 3x3 Vandermonde matrix has profile (3, 2, 1)."""
        v = vandermonde(gf5.elements()[:3], [gf5.one()] * 3)
        assert di_profile_bruteforce(v) == [3, 2, 1]

    def test_identity_profile(self, gf5):
        """Every row of I has weight 1."""
        assert di_profile_bruteforce(FMatrix.identity(gf5, 3)) == [1, 1, 1]

    @pytest.mark.parametrize("p,m,k", [
        (2, 1, 2), (3, 1, 3), (5, 1, 4), (5, 1, 5), (7, 1, 6),
        (2, 2, 4), (2, 3, 6), (3, 2, 5),
    ])
    def test_nsc_profile_on_random_vandermonde(self, p, m, k, rng):
        """Random nodes and scalings give an NSC matrix with D_i = k + 1 - i."""
        spec = make_field(p, m)
        for _ in range(3):
            nodes = rng.sample(spec.elements(), k)
            scalings = [random_element(spec, rng, nonzero=True) for _ in range(k)]
            v = vandermonde(nodes, scalings)
            assert is_nsc(v)
            assert di_profile_bruteforce(v, cap=10**6) == [k + 1 - i for i in range(1, k + 1)]

    @pytest.mark.parametrize("p,k", [(3, 3), (5, 4), (7, 3)])
    def test_profile_never_beats_singleton(self, p, k, rng, random_nonsingular):
        """D_i <= k + 1 - i for any non-singular A; equality everywhere means NSC."""
        spec = make_field(p)
        for _ in range(20):
            a = random_nonsingular(spec, k, rng)
            profile = di_profile_bruteforce(a)
            assert all(d <= k + 1 - i for i, d in enumerate(profile, start=1))
            optimal = profile == [k + 1 - i for i in range(1, k + 1)]
            assert optimal == bool(is_nsc(a))

    def test_span_min_weight_partition_independent(self, gf5, rng, monkeypatch):
        """Chunk size and worker count do not change the minimum."""
        a = _random_matrix(gf5, 3, 6, rng)
        whole = span_min_weight(a)
        monkeypatch.setattr(Config, "ENUMERATION_CHUNK", 7)
        assert span_min_weight(a, workers=3) == whole
        assert span_min_weight(a, workers=1) == whole

    def test_cap(self, gf5):
        """5^3 combinations exceed a cap of 100."""
        with pytest.raises(EnumerationCapError):
            span_min_weight(FMatrix.identity(gf5, 3), cap=100)


class TestCauchyBinet:
    """Minors of X·Y against the Cauchy-Binet expansion."""

    @pytest.mark.parametrize("p,m", [(5, 1), (7, 1), (2, 2), (3, 2)])
    def test_random_instances(self, p, m, rng):
        """200 seeded shapes per field, including u > n where the minor vanishes."""
        spec = make_field(p, m)
        for _ in range(200):
            s, n = rng.randint(1, 4), rng.randint(1, 4)
            u = rng.randint(1, s)
            x = _random_matrix(spec, s, n, rng)
            y = _random_matrix(spec, n, s, rng)
            rowset = sorted(rng.sample(range(1, s + 1), u))
            colset = sorted(rng.sample(range(1, s + 1), u))
            assert cauchy_binet_check(x, y, u, rowset, colset)
            if u > n:
                assert (x @ y).submatrix([i - 1 for i in rowset], [j - 1 for j in colset]).det().is_zero()

    def test_more_rows_than_inner_dimension(self, gf7, rng):
        """A 3x3 minor of a rank-2 product is 0 and the expansion is empty."""
        x = _random_matrix(gf7, 3, 2, rng)
        y = _random_matrix(gf7, 2, 3, rng)
        assert (x @ y).det().is_zero()
        assert cauchy_binet_check(x, y, 3, [1, 2, 3], [1, 2, 3])

    def test_identity_factors(self, gf5):
        """With X = Y = I only the matching index set contributes."""
        i3 = FMatrix.identity(gf5, 3)
        assert cauchy_binet_check(i3, i3, 2, [1, 3], [1, 3])
        assert cauchy_binet_check(i3, i3, 2, [1, 2], [2, 3])
        assert cauchy_binet_check(i3, i3, 3, [1, 2, 3], [1, 2, 3])

    def test_rejects_bad_shape(self, gf7):
        """Y must be n x s for an s x n X."""
        with pytest.raises(ShapeError):
            cauchy_binet_check(FMatrix.identity(gf7, 2), FMatrix.identity(gf7, 3), 1, [1], [1])


class TestMonomial:
    """Test permutation matrices and D·P decomposition."""

    def test_permutation_orientation(self, gf5):
        """Column j carries its 1 in row perm[j]."""
        p = permutation_matrix(gf5, (2, 3, 1))
        assert p.to_ints() == [[0, 0, 1], [1, 0, 0], [0, 1, 0]]

    def test_decompose(self, gf7):
        """D·P splits back into its diagonal and permutation."""
        d = FMatrix.diag(gf7, [2, 3, 5])
        b = d @ permutation_matrix(gf7, (1, 3, 2))
        parts = monomial_decompose(b)
        assert parts.perm == (1, 3, 2)
        assert [x.value for x in parts.diag] == [2, 3, 5]
        assert parts.reassemble() == b
        assert not parts.is_identity_perm
        assert monomial_decompose(d).is_identity_perm

    def test_not_monomial(self, gf7, mat):
        """A row with two nonzeros is not monomial."""
        with pytest.raises(NotMonomialError):
            monomial_decompose(mat(gf7, [[1, 1], [0, 1]]))

    def test_gram_of_hermitian_form(self, gf9):
        """The Hermitian Gram of diag(x, 1) is I over GF(9)."""
        x = gf9.generator()
        m = FMatrix.from_rows(gf9, [[x, 0], [0, 1]])
        g = gram(m, Form.HERMITIAN)
        # x·x^3 = x^4 = 1 for x^2 = -1
        assert g == FMatrix.identity(gf9, 2)


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
