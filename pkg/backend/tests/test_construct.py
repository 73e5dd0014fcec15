"""
Construct Tests - congruence certificates, diagonalizers, sum and Hadamard matrices,
monomial-Gram families, NSC searches and the explicit small families.

Run with: pytest tests/test_construct.py -v
"""
import pytest
import os
import sys
from dataclasses import replace

import numpy as np

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from services import construct
from services.construct import (
    CertificateError,
    Flavor,
    LeadingMinorError,
    MembershipError,
)
from services.errors import PreconditionError
from services.ffield import FieldError, in_base_subfield, make_field, primitive_element
from services.matrix import (
    FMatrix,
    Form,
    gram,
    is_nsc,
    monomial_decompose,
    permutation_matrix,
    prefix_minors,
)


def _values(elements):
    return [e.value for e in elements]


# ============= Unitriangular congruence =============

class TestLowerQuasiOrthogonal:
    """Lower unitriangular L with L·A quasi-orthogonal."""

    def test_worked_example_gf5(self, gf5, mat):
        """The 3x3 GF(5) example reproduces entry for entry."""
        a = mat(gf5, [[1, 1, 2], [2, 0, 3], [1, 4, 0]])
        cert = construct.lower_quasi_orthogonalize(a)
        assert cert.result.to_ints() == [[1, 1, 2], [4, 2, 2], [4, 3, 4]]
        assert _values(cert.gram_diagonal) == [1, 4, 1]
        assert cert.flavor is Flavor.LOWER
        assert cert.transform.is_lower_unitriangular()

    def test_source_nsc_is_recorded(self, gf7, mat):
        """An NSC source is flagged and its result stays NSC."""
        a = mat(gf7, [[1, 2], [2, 3]])
        cert = construct.lower_quasi_orthogonalize(a)
        assert cert.source_nsc
        assert is_nsc(cert.result)

    @pytest.mark.parametrize("p,rows,result,diag,witness", [
        (5, [[2, 3], [1, 2]], [[2, 3], [4, 4]], [3, 2], None),
        (7, [[1, 2], [2, 3]], [[1, 2], [6, 4]], [5, 3], None),
        (7, [[1, 3, 4], [0, 1, 2], [2, 3, 5]], [[1, 3, 4], [2, 0, 3], [3, 4, 5]], [5, 6, 1], None),
        # rows 1-2 on columns {1, 4}: 1·1 - 4·2 = -7, so the circulant is not NSC
        (7, [[1, 2, 3, 4], [2, 3, 4, 1], [3, 4, 1, 2], [4, 1, 2, 3]],
         [[1, 2, 3, 4], [4, 0, 3, 2], [0, 3, 2, 4], [6, 4, 5, 5]], [2, 1, 1, 4], (2, (1, 4))),
    ])
    def test_golden_matrices(self, p, rows, result, diag, witness):
        """Golden congruences reproduce exactly; NSC survives only where the source has it."""
        spec = make_field(p)
        a = FMatrix.from_rows(spec, rows)
        cert = construct.lower_quasi_orthogonalize(a)
        assert cert.result.to_ints() == result
        assert _values(cert.gram_diagonal) == diag
        nsc = is_nsc(cert.result)
        assert bool(nsc) is (witness is None)
        assert nsc.witness == witness
        assert cert.source_nsc is (witness is None)

    @pytest.mark.parametrize("p,m,form", [(5, 1, "euclidean"), (7, 1, "euclidean"),
                                          (3, 2, "hermitian"), (2, 2, "hermitian")])
    def test_prefix_minors_preserved(self, p, m, form, rng, random_nonsingular):
        """Every first-i-rows minor of the result equals the source's, so NSC carries over."""
        spec = make_field(p, m, quadratic=form == "hermitian")
        run = (construct.lower_quasi_unitarize if form == "hermitian"
               else construct.lower_quasi_orthogonalize)
        checked = 0
        for _ in range(100):
            a = random_nonsingular(spec, rng.randint(1, 4), rng)
            try:
                cert = run(a)
            except LeadingMinorError:
                continue
            assert prefix_minors(cert.result) == prefix_minors(a)
            assert bool(is_nsc(cert.result)) == cert.source_nsc == bool(is_nsc(a))
            checked += 1
        assert checked >= 10

    def test_zero_leading_minor(self, gf5, mat):
        """An isotropic first row stops the peel at minor 1."""
        # first row is isotropic: 1 + 4 = 0
        with pytest.raises(LeadingMinorError) as exc:
            construct.lower_quasi_orthogonalize(mat(gf5, [[1, 2], [0, 1]]))
        assert exc.value.index == 1

    def test_singular_input(self, gf5, mat):
        """Singular sources are refused."""
        with pytest.raises(PreconditionError):
            construct.lower_quasi_orthogonalize(mat(gf5, [[1, 2], [2, 4]]))


class TestUpperQuasiOrthogonal:

    def test_worked_example_loses_nsc(self, gf5, mat):
        """The upper variant diagonalizes but breaks NSC on the same input."""
        a = mat(gf5, [[1, 1, 2], [2, 0, 3], [1, 4, 0]])
        cert = construct.upper_quasi_orthogonalize(a)
        assert cert.result.to_ints() == [[3, 3, 3], [1, 1, 3], [1, 4, 0]]
        assert _values(cert.gram_diagonal) == [2, 1, 2]
        assert cert.transform.is_upper_unitriangular()
        nsc = is_nsc(cert.result)
        assert not nsc
        assert nsc.witness == (2, (1, 2))


class TestGf9QuasiOrthogonal:
    """The 2x2, 3x3 and 4x4 forms over GF(9), for every primitive element."""

    @staticmethod
    def _primitives(spec):
        g = primitive_element(spec)
        return [g ** j for j in (1, 3, 5, 7)]

    def test_two_by_two(self, gf9):
        """Closed-form result and diagonal for every primitive xi."""
        for xi in self._primitives(gf9):
            x2 = xi ** 2
            a = FMatrix.from_rows(gf9, [[x2, x2], [1, x2]])
            cert = construct.lower_quasi_orthogonalize(a)
            assert cert.source_nsc
            assert cert.gram_diagonal == (gf9.one(), -x2)
            assert cert.result == FMatrix.from_rows(gf9, [[x2, x2], [x2 - 1, 1 - x2]])

    def test_three_by_three(self, gf9):
        """Diagonal (1, xi^3 - 1, xi^3 - 1) for every primitive xi."""
        for xi in self._primitives(gf9):
            x2, x3 = xi ** 2, xi ** 3
            a = FMatrix.from_rows(gf9, [[1, x2, 1], [0, 1, xi], [1, xi, x2]])
            cert = construct.lower_quasi_orthogonalize(a)
            assert cert.source_nsc
            assert cert.gram_diagonal == (gf9.one(), x3 - 1, x3 - 1)

    def test_four_by_four(self, gf9):
        """Diagonal (-1, xi^2 + 1, 1 - xi^2, -1) for every primitive xi."""
        for xi in self._primitives(gf9):
            x2 = xi ** 2
            a = FMatrix.from_rows(gf9, [[1, 1, x2, 1], [0, 1, 1, x2], [1, 0, -1, x2], [0, 0, 0, 1]])
            cert = construct.lower_quasi_orthogonalize(a)
            assert cert.source_nsc
            minus_one = -gf9.one()
            assert cert.gram_diagonal == (minus_one, x2 + 1, 1 - x2, minus_one)


class TestLowerQuasiUnitary:

    def test_gf9_hermitian(self, gf9, rng, random_nonsingular):
        """Hermitian diagonals land in GF(3)."""
        done = 0
        while done < 5:
            a = random_nonsingular(gf9, 3, rng)
            try:
                cert = construct.lower_quasi_unitarize(a)
            except LeadingMinorError:
                continue
            assert all(in_base_subfield(d) for d in cert.gram_diagonal)
            assert gram(cert.result, Form.HERMITIAN).is_diagonal()
            done += 1

    def test_upper_variant(self, gf9, mat):
        """The upper Hermitian variant labels its flavor and form."""
        cert = construct.upper_quasi_unitarize(mat(gf9, [[1, 1], [0, 1]]))
        assert cert.flavor is Flavor.UPPER
        assert cert.form is Form.HERMITIAN

    def test_requires_quadratic_spec(self, gf7, mat):
        """The Hermitian form needs a quadratic field."""
        with pytest.raises(FieldError):
            construct.lower_quasi_unitarize(mat(gf7, [[1, 0], [0, 1]]))


# ============= Certificates =============

class TestCertificate:
    """Test self-verification and tamper detection."""

    def test_tampered_gram(self, gf5, mat):
        """A wrong diagonal is reported as a gram mismatch."""
        cert = construct.lower_quasi_orthogonalize(mat(gf5, [[1, 1, 2], [2, 0, 3], [1, 4, 0]]))
        bad = replace(cert, gram_diagonal=(gf5.element(1), gf5.element(4), gf5.element(2)))
        with pytest.raises(CertificateError) as exc:
            bad.verify()
        assert "gram mismatch" in str(exc.value)

    def test_tampered_transform(self, gf5, mat):
        """Swapping in the identity breaks transform·source = result."""
        cert = construct.lower_quasi_orthogonalize(mat(gf5, [[1, 1, 2], [2, 0, 3], [1, 4, 0]]))
        bad = replace(cert, transform=FMatrix.identity(gf5, 3))
        failed = {c.name for c in bad.checks() if not c.passed}
        assert "product" in failed

    def test_wrong_flavor(self, gf5, mat):
        """Only the flavor check fails when the label is wrong."""
        cert = construct.upper_quasi_orthogonalize(mat(gf5, [[1, 1, 2], [2, 0, 3], [1, 4, 0]]))
        bad = replace(cert, flavor=Flavor.LOWER)
        failed = {c.name for c in bad.checks() if not c.passed}
        assert failed == {"flavor"}

    def test_shape_failure_stops_early(self, gf5):
        """A short diagonal fails the shape check and nothing else runs."""
        cert = construct.lower_quasi_orthogonalize(FMatrix.identity(gf5, 2))
        bad = replace(cert, gram_diagonal=(gf5.one(),))
        checks = bad.checks()
        assert [c.name for c in checks] == ["shape"]
        assert not checks[0].passed


# ============= Diagonalization =============

class TestDiagonalization:
    """Congruence diagonalization of symmetric and Hermitian matrices."""

    def test_symmetric_zero_diagonal(self, gf5, mat):
        """A hyperbolic pair still diagonalizes with nonzero entries."""
        x = mat(gf5, [[0, 1], [1, 0]])
        cert = construct.symmetric_diagonalize(x)
        assert cert.flavor is Flavor.CONGRUENCE
        assert cert.result.is_diagonal()
        assert all(not d.is_zero() for d in cert.gram_diagonal)

    def test_symmetric_singular_accepted(self, gf7, mat):
        """Rank one gives exactly one zero on the diagonal."""
        cert = construct.symmetric_diagonalize(mat(gf7, [[1, 2], [2, 4]]))
        assert cert.result.is_diagonal()
        assert sum(1 for d in cert.gram_diagonal if d.is_zero()) == 1

    def test_symmetric_random(self, gf7, rng, random_nonsingular):
        """T·X·T^T equals the reported diagonal form."""
        for _ in range(5):
            b = random_nonsingular(gf7, 4, rng)
            x = b @ b.T
            cert = construct.symmetric_diagonalize(x)
            t = cert.transform
            assert t @ x @ t.T == cert.result

    def test_symmetric_rejects_char_two(self, gf4, mat):
        """Symmetric diagonalization needs odd characteristic."""
        with pytest.raises(FieldError):
            construct.symmetric_diagonalize(mat(gf4, [[1, 0], [0, 1]]))

    def test_symmetric_rejects_asymmetric(self, gf5, mat):
        """Non-symmetric input is refused."""
        with pytest.raises(PreconditionError):
            construct.symmetric_diagonalize(mat(gf5, [[1, 2], [3, 1]]))

    def test_hermitian_zero_diagonal(self, gf9):
        """A zero-diagonal Hermitian matrix is repaired before peeling."""
        x = gf9.generator()
        h = FMatrix.from_rows(gf9, [[0, x], [-x, 0]])
        assert h.is_hermitian()
        cert = construct.hermitian_diagonalize(h)
        assert cert.result.is_diagonal()
        assert all(in_base_subfield(d) and not d.is_zero() for d in cert.gram_diagonal)

    def test_quasi_orthogonalize_any_nonsingular(self, gf7, rng, random_nonsingular):
        """The general route needs no leading-minor condition."""
        for _ in range(5):
            cert = construct.quasi_orthogonalize(random_nonsingular(gf7, 3, rng))
            assert cert.flavor is Flavor.GENERAL
            assert gram(cert.result).is_diagonal()

    def test_unitarize(self, gf9, rng, random_nonsingular):
        """Scaling by norm preimages turns quasi-unitary into unitary."""
        for _ in range(5):
            cert = construct.unitarize(random_nonsingular(gf9, 3, rng))
            assert gram(cert.result, Form.HERMITIAN) == FMatrix.identity(gf9, 3)


# ============= Sum matrices =============

class TestSumMatrices:

    def test_two_by_two_gf5(self, gf5):
        """[[a, b], [-b, a]] with scale a^2 + b^2."""
        s = construct.quadratic_sum_matrix([gf5.one(), gf5.one()])
        assert s.matrix.to_ints() == [[1, 1], [4, 1]]
        assert s.scale.value == 2
        assert s.is_quasi

    def test_four_by_four(self, gf7):
        """The first row is the input and S·S^T = (sum c_i^2)·I."""
        cs = [gf7.element(v) for v in (1, 2, 3, 4)]
        s = construct.quadratic_sum_matrix(cs)
        assert s.matrix.row(0) == cs
        # 1 + 4 + 9 + 16 = 30
        assert s.matrix @ s.matrix.T == FMatrix.identity(gf7, 4).scale(2)

    def test_hermitian_zero_scale(self, gf4):
        """1 + N(x) = 0 in GF(4), so the matrix is not quasi-unitary."""
        s = construct.hermitian_sum_matrix([gf4.one(), gf4.generator()])
        assert s.scale.is_zero()
        assert not s.is_quasi

    def test_hermitian_gf9(self, gf9):
        """S·S^† is the scale times I."""
        x = gf9.generator()
        cs = [gf9.one(), x, x + 1, gf9.from_int(2)]
        s = construct.hermitian_sum_matrix(cs)
        assert s.matrix @ s.matrix.H == FMatrix.identity(gf9, 4).scale(s.scale)

    def test_power_of_two_required(self, gf5):
        """Three entries do not tile into 2x2 blocks."""
        with pytest.raises(PreconditionError):
            construct.quadratic_sum_matrix([gf5.one()] * 3)

    def test_degenerate_branch(self, gf5):
        """Zero half-scales take the degenerate branch."""
        # 1 + 2^2 = 0, so both halves have zero Gram scale
        cs = [gf5.element(v) for v in (1, 2, 1, 2)]
        s = construct.quadratic_sum_matrix(cs)
        assert s.degenerate
        assert s.scale.is_zero()


# ============= Hadamard =============

class TestHadamard:
    """Paley and Sylvester matrices."""

    def test_paley_three(self):
        """The order-4 Paley matrix in its normalized form."""
        h = construct.paley_hadamard(3)
        assert h.tolist() == [[1, 1, 1, 1], [1, -1, 1, -1], [1, -1, -1, 1], [1, 1, -1, -1]]

    @pytest.mark.parametrize("q", [3, 7, 11])
    def test_paley_and_doubling(self, q):
        """H·H^T = nI before and after one Sylvester doubling."""
        h = construct.paley_hadamard(q)
        n = q + 1
        assert np.array_equal(h @ h.T, n * np.eye(n, dtype=np.int64))
        doubled = construct.sylvester_double(h, 1)
        assert doubled.shape == (2 * n, 2 * n)
        assert np.array_equal(doubled @ doubled.T, 2 * n * np.eye(2 * n, dtype=np.int64))

    def test_paley_needs_three_mod_four(self):
        """q = 5 is 1 mod 4."""
        with pytest.raises(PreconditionError):
            construct.paley_hadamard(5)

    def test_paley_needs_prime_power(self):
        """15 is not a prime power."""
        with pytest.raises(PreconditionError):
            construct.paley_hadamard(15)

    def test_is_hadamard(self):
        """Entries must be ±1 and rows orthogonal."""
        assert construct.is_hadamard([[1, 1], [1, -1]])
        assert not construct.is_hadamard([[1, 1], [1, 1]])
        assert not construct.is_hadamard([[1, 2], [1, -1]])

    def test_reduce(self, gf5):
        """Reduced mod 5 the Gram is 4·I."""
        h = construct.paley_hadamard(3)
        m = construct.reduce_hadamard(h, gf5)
        assert gram(m) == FMatrix.identity(gf5, 4).scale(4)

    def test_reduce_rejects_order_divisible_by_p(self, gf3):
        """A 12x12 Paley matrix over GF(3) would have a zero Gram."""
        with pytest.raises(PreconditionError):
            construct.reduce_hadamard(construct.paley_hadamard(11), gf3)

    def test_reduce_rejects_char_two(self, gf4):
        """±1 coincide in characteristic 2."""
        with pytest.raises(FieldError):
            construct.reduce_hadamard([[1, 1], [1, -1]], gf4)


# ============= Monomial-Gram families =============

class TestMonomialGram:

    @pytest.mark.parametrize("q,k,gamma", [(7, 3, 1), (13, 3, 2), (13, 4, 1)])
    def test_a_gamma(self, q, k, gamma):
        """Gram of A_gamma is diag(k, gamma^k·k, ...)·P_tau."""
        spec = make_field(q)
        g = spec.element(gamma)
        a = construct.a_gamma(spec, k, g)
        parts = monomial_decompose(gram(a))
        kk = spec.from_int(k)
        assert parts.diag == (kk,) + (g ** k * kk,) * (k - 1)
        assert parts.perm == (1,) + tuple(range(k, 1, -1))

    def test_a_gamma_gf7_entries(self, gf7):
        """Rows are powers of the cube roots of unity 1, 2, 4."""
        assert construct.a_gamma(gf7, 3).to_ints() == [[1, 1, 1], [1, 2, 4], [1, 4, 2]]

    def test_a_gamma_rejects_non_divisor(self, gf7):
        """4 does not divide q - 1 = 6."""
        with pytest.raises(PreconditionError):
            construct.a_gamma(gf7, 4)

    def test_u_qk(self, gf9):
        """tau solves s + 3x = 0 mod 8 and U·U^† = 8·P."""
        u, perm = construct.u_qk(gf9, 8)
        assert perm == (1, 6, 3, 8, 5, 2, 7, 4)
        for s, x in enumerate(perm):
            assert (s + 3 * (x - 1)) % 8 == 0
        assert gram(u, Form.HERMITIAN) == permutation_matrix(gf9, perm).scale(gf9.from_int(8))

    def test_u_qk_rejects_divisor_of_q_plus_one(self, gf9):
        """k = 4 divides q + 1 and belongs to unitary_vandermonde."""
        with pytest.raises(PreconditionError):
            construct.u_qk(gf9, 4)

    @pytest.mark.parametrize("p,k", [(2, 3), (5, 3)])
    def test_unitary_vandermonde(self, p, k):
        """M·M^† = k·I and M is NSC."""
        spec = make_field(p, 2, quadratic=True)
        m = construct.unitary_vandermonde(spec, k)
        assert gram(m, Form.HERMITIAN) == FMatrix.identity(spec, k).scale(spec.from_int(k))
        assert is_nsc(m)


# ============= NSC searches =============

class TestNscSearch:
    """Existence of NSC quasi-unitary matrices for every k < q."""

    @pytest.mark.parametrize("q,k", [
        (3, 2), (4, 2), (4, 3), (5, 2), (5, 3), (5, 4),
        (7, 2), (7, 3), (7, 4), (7, 5), (7, 6),
    ])
    def test_nsc_quasi_unitary(self, q, k):
        """The randomized search finds a certified NSC matrix."""
        p, m = {3: (3, 1), 4: (2, 2), 5: (5, 1), 7: (7, 1)}[q]
        spec = make_field(p, 2 * m, quadratic=True)
        cert = construct.nsc_quasi_unitary(spec, k, seed=0)
        assert cert.k == k
        assert is_nsc(cert.result)
        assert all(in_base_subfield(d) and not d.is_zero() for d in cert.gram_diagonal)
        cert.verify()

    def test_nsc_quasi_unitary_range(self, gf9):
        """k must stay below q."""
        with pytest.raises(PreconditionError):
            construct.nsc_quasi_unitary(gf9, 3)

    def test_nsc_quasi_orthogonal(self, gf7):
        """The Euclidean search over GF(7) finds a 4x4 NSC matrix."""
        cert = construct.nsc_quasi_orthogonal(gf7, 4, seed=1)
        assert is_nsc(cert.result)
        assert gram(cert.result).is_diagonal()

    def test_search_is_reproducible(self, gf9):
        """One seed, one matrix."""
        a = construct.nsc_quasi_unitary(gf9, 2, seed=5)
        b = construct.nsc_quasi_unitary(gf9, 2, seed=5)
        assert a.result == b.result

    def test_no_two_by_two_over_gf4(self, gf4):
        """Exhaustive search confirms q = 2 has no 2x2 solution."""
        assert construct.exhaustive_nsc_quasi_unitary_search(gf4, 2) is None


# ============= Explicit families =============

class TestExplicitFamilies:

    @pytest.mark.parametrize("order", [2, 3])
    def test_every_member_gf9(self, gf9, order):
        """Closed forms agree with the generic peel for every member."""
        members = [a for a in gf9.elements() if construct.family_membership(gf9, order, a) is None]
        assert members
        for a in members:
            cert = construct.explicit_family(gf9, order, a)
            assert cert.source_nsc
            searched = construct.lower_quasi_unitarize(construct.family_source(gf9, order, a))
            assert searched.gram_diagonal == cert.gram_diagonal
            assert searched.result == cert.result

    def test_order_four_gf25(self):
        """The order-4 closed form certifies over GF(25)."""
        spec = make_field(5, 2, quadratic=True)
        cert = construct.explicit_family(spec, 4)
        assert is_nsc(cert.result)
        assert gram(cert.result, Form.HERMITIAN).is_diagonal()

    def test_order_four_needs_q_five(self, gf9):
        """GF(9) is too small for the order-4 family."""
        with pytest.raises(PreconditionError):
            construct.explicit_family(gf9, 4)

    def test_non_member_rejected(self, gf9):
        """The violated inequation is named."""
        with pytest.raises(MembershipError) as exc:
            construct.explicit_family(gf9, 2, gf9.one())
        assert exc.value.inequation == "x^2 != 1"

    def test_zero_rejected(self, gf9):
        """Zero fails the first inequation."""
        assert construct.family_membership(gf9, 3, gf9.zero()) == "x != 0"


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
