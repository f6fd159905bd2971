"""Unit tests for the Jacobi eigensolver and Givens factorization."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from symplecta.errors import NoConvergenceError, NonFiniteError, NonOrthogonalError, ValidationError
from symplecta.linalg import (
    GivensRotation,
    GivensSequence,
    OrthoMatrix,
    SymMatrix,
    givens_decompose,
    givens_reconstruct,
    inf_norm,
    jacobi_eigen,
    matexp_hermitian_diag,
    orthogonality_residual,
)


def random_orthogonal(rng, n, flip=False):
    """Product of random planar rotations applied to I, optionally reflected."""
    m = np.eye(n)
    for i in range(n - 1):
        for j in range(i + 1, n):
            m = GivensRotation(i + 1, j + 1, rng.uniform(-math.pi, math.pi) or 0.1).matrix(n) @ m
    if flip:
        m[n - 1] = -m[n - 1]
    return m


@pytest.mark.unit
class TestValueTypes:
    """Test the validated matrix wrappers."""

    def test_sym_matrix_symmetrizes_rounding(self):
        """Test that tiny asymmetry is averaged away."""
        sym = SymMatrix([[1.0, 0.5 + 1e-14], [0.5, 2.0]])
        assert sym.entries[0, 1] == sym.entries[1, 0]

    def test_sym_matrix_rejects_asymmetry(self):
        """Test that a clearly asymmetric matrix is rejected."""
        with pytest.raises(ValidationError):
            SymMatrix([[1.0, 0.5], [0.4, 2.0]])

    def test_sym_matrix_rejects_nan(self):
        """Test that NaN entries raise NonFiniteError."""
        with pytest.raises(NonFiniteError):
            SymMatrix([[1.0, float("nan")], [float("nan"), 1.0]])

    def test_entries_are_read_only(self):
        """Test that stored entries cannot be mutated."""
        sym = SymMatrix(np.eye(2))
        with pytest.raises(ValueError):
            sym.entries[0, 0] = 3.0

    def test_ortho_matrix_rejects_non_orthogonal(self):
        """Test that OrthoMatrix checks its invariant."""
        with pytest.raises(NonOrthogonalError):
            OrthoMatrix([[1.0, 0.1], [0.0, 1.0]])

    def test_givens_rotation_layout(self):
        """Test the sign layout of R_{i,j}."""
        r = GivensRotation(1, 3, 0.3).matrix(3)
        assert r[0, 0] == pytest.approx(math.cos(0.3))
        assert r[0, 2] == pytest.approx(math.sin(0.3))
        assert r[2, 0] == pytest.approx(-math.sin(0.3))
        assert r[1, 1] == 1.0

    def test_givens_rotation_index_order(self):
        """Test that i < j is required."""
        with pytest.raises(ValidationError):
            GivensRotation(2, 1, 0.1)

    def test_givens_sequence_limits_count(self):
        """Test that at most n(n-1)/2 rotations are accepted."""
        rotations = [GivensRotation(1, 2, 0.1)] * 2
        with pytest.raises(ValidationError):
            GivensSequence(n=2, rotations=rotations)


@pytest.mark.unit
class TestJacobiEigen:
    """Test jacobi_eigen."""

    def test_diagonal_input(self):
        """Test that a diagonal matrix needs no sweep and is sorted descending."""
        result = jacobi_eigen(SymMatrix.diagonal([3.0, 1.0, 2.0]))
        assert result.lambdas.tolist() == [3.0, 2.0, 1.0]
        assert result.sweeps == 0
        assert orthogonality_residual(result.basis.entries) == 0.0

    def test_two_by_two(self):
        """Test [[2,1],[1,2]]."""
        result = jacobi_eigen([[2.0, 1.0], [1.0, 2.0]])
        assert result.lambdas == pytest.approx([3.0, 1.0], abs=1e-14)
        first = result.basis.entries[0]
        assert abs(first[0]) == pytest.approx(1 / math.sqrt(2), abs=1e-14)
        assert abs(first[1]) == pytest.approx(1 / math.sqrt(2), abs=1e-14)

    def test_dominant_component_positive(self):
        """Test the sign convention of each eigenvector row."""
        result = jacobi_eigen([[1.0, -0.5], [-0.5, 1.0]])
        rows = result.basis.entries
        assert rows[0, 0] > 0.0
        assert rows[0, 1] < 0.0
        assert np.linalg.det(rows) == pytest.approx(1.0)

    def test_determinant_forced_positive(self):
        """Test that a reflection is recorded in det_sign."""
        result = jacobi_eigen(SymMatrix.diagonal([1.0, 2.0]))
        assert result.det_sign == -1
        assert np.linalg.det(result.basis.entries) == pytest.approx(1.0)
        assert result.basis.entries.tolist() == [[0.0, 1.0], [-1.0, 0.0]]

    def test_conjugation_identity(self, rng):
        """Test M_R·A·M_Rᵀ = diag(λ) on a random 6×6 matrix."""
        a = rng.normal(size=(6, 6))
        a = a + a.T
        result = jacobi_eigen(a)
        m = result.basis.entries
        assert inf_norm(m @ a @ m.T - np.diag(result.lambdas)) <= 1e-12 * inf_norm(a)
        assert np.all(np.diff(result.lambdas) <= 0.0)

    def test_matches_numpy(self, rng):
        """Test eigenvalues against numpy.linalg.eigvalsh."""
        a = rng.normal(size=(5, 5))
        a = a + a.T
        expected = np.sort(np.linalg.eigvalsh(a))[::-1]
        assert jacobi_eigen(a).lambdas == pytest.approx(expected, abs=1e-12)

    def test_huge_entries(self):
        """Test that entries near 1e200 are diagonalized instead of returned untouched."""
        result = jacobi_eigen([[1e200, 1e200], [1e200, 1e200]])
        assert result.sweeps >= 1
        assert result.lambdas[0] == pytest.approx(2e200, rel=1e-12)
        assert abs(result.lambdas[1]) <= 1e-12 * 2e200

    def test_tiny_entries(self):
        """Test the same matrix scaled down to 1e-200."""
        result = jacobi_eigen([[1e-200, 1e-200], [1e-200, 1e-200]])
        assert result.lambdas[0] == pytest.approx(2e-200, rel=1e-12)
        assert abs(result.lambdas[1]) <= 1e-12 * 2e-200

    def test_trace_and_frobenius_preserved(self, rng):
        """Test Σλ = tr A and ||λ||₂ = ||A||_F on random matrices, n in 2..8."""
        for k in range(200):
            n = 2 + k % 7
            a = rng.normal(size=(n, n))
            a = a + a.T
            lambdas = jacobi_eigen(a).lambdas
            scale = np.linalg.norm(a)
            assert abs(np.sum(lambdas) - np.trace(a)) <= 1e-12 * scale
            assert abs(np.linalg.norm(lambdas) - scale) <= 1e-12 * scale

    def test_one_by_one(self):
        """Test the trivial dimension."""
        result = jacobi_eigen([[-2.5]])
        assert result.lambdas.tolist() == [-2.5]
        assert result.basis.entries.tolist() == [[1.0]]

    def test_non_finite_rejected(self):
        """Test that infinity raises NonFiniteError."""
        with pytest.raises(NonFiniteError):
            jacobi_eigen([[float("inf"), 0.0], [0.0, 1.0]])

    def test_sweep_budget(self, monkeypatch):
        """Test that NoConvergenceError is raised when sweeps run out."""
        monkeypatch.setattr("symplecta.linalg.JACOBI_MAX_SWEEPS", 0)
        with pytest.raises(NoConvergenceError):
            jacobi_eigen([[2.0, 1.0], [1.0, 2.0]])

    @settings(max_examples=50, deadline=None)
    @given(
        arrays(np.int64, (4, 4), elements=st.integers(min_value=-100, max_value=100))
    )
    def test_property_diagonalizes(self, entries):
        """Test the conjugation identity on generated matrices."""
        a = (entries + entries.T) / 10.0
        result = jacobi_eigen(a)
        m = result.basis.entries
        assert orthogonality_residual(m) <= 1e-12
        assert inf_norm(m @ a @ m.T - np.diag(result.lambdas)) <= 1e-12 * max(inf_norm(a), 1e-300) + 1e-300


@pytest.mark.unit
class TestGivens:
    """Test givens_decompose and givens_reconstruct."""

    def test_identity_has_no_rotations(self):
        """Test that I factors into nothing."""
        sequence = givens_decompose(np.eye(4))
        assert sequence.rotations == ()
        assert sequence.det_sign == 1

    def test_single_rotation(self):
        """Test that a 2×2 rotation by 0.3 yields [(1, 2, 0.3)]."""
        sequence = givens_decompose(GivensRotation(1, 2, 0.3).matrix(2))
        assert len(sequence.angles()) == 1
        i, j, alpha = sequence.angles()[0]
        assert (i, j) == (1, 2)
        assert alpha == pytest.approx(0.3, abs=1e-15)

    def test_reflection_recorded(self):
        """Test that det = -1 is recorded and reproduced."""
        m = np.diag([1.0, 1.0, -1.0])
        sequence = givens_decompose(m)
        assert sequence.det_sign == -1
        assert givens_reconstruct(sequence).entries == pytest.approx(m)

    @pytest.mark.parametrize(
        "m",
        [
            np.diag([-1.0, -1.0, 1.0]),
            np.diag([-1.0, 1.0, 1.0]),
            np.diag([1.0, -1.0, -1.0, 1.0]),
            np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]]),
            np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
            np.array([[-0.6, 0.0, 0.8], [0.0, 1.0, 0.0], [-0.8, 0.0, -0.6]]),
        ],
    )
    def test_exact_zeros_and_negative_diagonal(self, m):
        """Test matrices whose rows start with exact zeros or a -1 on the diagonal."""
        sequence = givens_decompose(m)
        assert sequence.det_sign == (1 if np.linalg.det(m) > 0.0 else -1)
        assert len(sequence.rotations) <= m.shape[0] * (m.shape[0] - 1) // 2
        assert inf_norm(givens_reconstruct(sequence).entries - m) <= 1e-12

    def test_signed_permutations(self, rng):
        """Test random signed permutation matrices, n in 2..6."""
        for k in range(200):
            n = 2 + k % 5
            m = np.eye(n)[rng.permutation(n)] * rng.choice([-1.0, 1.0], size=n)[:, None]
            sequence = givens_decompose(m)
            assert inf_norm(givens_reconstruct(sequence).entries - m) <= 1e-12, m

    def test_non_orthogonal_rejected(self):
        """Test that the input must be orthogonal within 1e-10."""
        with pytest.raises(NonOrthogonalError):
            givens_decompose([[1.0, 1e-6], [0.0, 1.0]])

    def test_random_special_orthogonal(self, rng):
        """Test a random 4×4 rotation reconstructs with at most six rotations."""
        m = random_orthogonal(rng, 4)
        sequence = givens_decompose(m)
        assert len(sequence.rotations) <= 6
        assert inf_norm(givens_reconstruct(sequence).entries - m) <= 1e-12

    @pytest.mark.slow
    def test_round_trip_sweep(self, rng):
        """Test 1000 random orthogonal matrices of both determinant signs, n in 2..10."""
        worst = 0.0
        for k in range(1000):
            n = 2 + k % 9
            m = random_orthogonal(rng, n, flip=bool(k % 2))
            sequence = givens_decompose(m)
            assert len(sequence.rotations) <= n * (n - 1) // 2
            assert sequence.det_sign == (-1 if k % 2 else 1)
            worst = max(worst, inf_norm(givens_reconstruct(sequence).entries - m))
        assert worst <= 1e-12


@pytest.mark.unit
class TestMatexpHermitianDiag:
    """Test matexp_hermitian_diag."""

    def test_phases(self):
        """Test e^{iλt} entries."""
        phases = matexp_hermitian_diag([1.0, -2.0], math.pi / 2)
        assert phases == pytest.approx([1j, -1.0 + 0j], abs=1e-15)

    def test_non_finite_time(self):
        """Test that an infinite time is rejected."""
        with pytest.raises(NonFiniteError):
            matexp_hermitian_diag([1.0], float("inf"))
