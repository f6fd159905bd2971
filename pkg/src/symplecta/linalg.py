"""Dense real matrix kernels: Jacobi eigensolver and Givens factorization.

All matrices are small (desk-scale) numpy arrays wrapped in frozen value
types. Indices inside ``GivensRotation`` are 1-based, matching the
``R_{i,j}`` notation used throughout the package documentation.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from .errors import NoConvergenceError, NonFiniteError, NonOrthogonalError, ValidationError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
ORTHO_TOL = 1e-12
DECOMPOSE_ORTHO_TOL = 1e-10
JACOBI_REL_TOL = 1e-14
JACOBI_MAX_SWEEPS = 30
# Relative slack when picking the dominant component of an eigenvector.
SIGN_TIE_TOL = 1e-12

ArrayLike = Union[np.ndarray, Sequence[Sequence[float]]]


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


def inf_norm(matrix: np.ndarray) -> float:
    """Matrix infinity norm (maximum absolute row sum)."""
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(matrix), axis=1)))


def orthogonality_residual(matrix: np.ndarray) -> float:
    """Return ``||M·Mᵀ - I||∞``."""
    matrix = np.asarray(matrix, dtype=float)
    return inf_norm(matrix @ matrix.T - np.eye(matrix.shape[0]))


def _square(entries: ArrayLike, what: str) -> np.ndarray:
    array = np.array(entries, dtype=float)
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
        raise ValidationError(f"{what} must be a non-empty square matrix, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise NonFiniteError(f"{what} contains NaN or infinite entries")
    return array


@dataclass(frozen=True)
class SymMatrix:
    """Real symmetric matrix.

    Inputs whose asymmetry is within ``1e-12·||A||∞`` are stored as
    ``(A + Aᵀ)/2``; anything more asymmetric is rejected.
    """

    entries: np.ndarray

    def __post_init__(self):
        array = _square(self.entries, "symmetric matrix")
        scale = inf_norm(array)
        asymmetry = float(np.max(np.abs(array - array.T)))
        if asymmetry > SYMMETRY_TOL * scale:
            raise ValidationError(
                f"matrix is not symmetric (asymmetry {asymmetry:.3e}, scale {scale:.3e})"
            )
        object.__setattr__(self, "entries", _frozen(0.5 * (array + array.T)))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @classmethod
    def diagonal(cls, values: Sequence[float]) -> "SymMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))


@dataclass(frozen=True)
class OrthoMatrix:
    """Real orthogonal matrix, checked to ``||M·Mᵀ - I||∞ <= 1e-12``."""

    entries: np.ndarray

    def __post_init__(self):
        array = _square(self.entries, "orthogonal matrix")
        residual = orthogonality_residual(array)
        if residual > ORTHO_TOL:
            raise NonOrthogonalError(f"matrix is not orthogonal (residual {residual:.3e})")
        object.__setattr__(self, "entries", _frozen(array))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def T(self) -> np.ndarray:
        return self.entries.T


@dataclass(frozen=True)
class GivensRotation:
    """Planar rotation ``R_{i,j}`` with ``[R]_{i,i} = [R]_{j,j} = cos α``,
    ``[R]_{i,j} = sin α`` and ``[R]_{j,i} = -sin α`` (1-based ``i < j``)."""

    i: int
    j: int
    alpha: float

    def __post_init__(self):
        if not (1 <= self.i < self.j):
            raise ValidationError(f"rotation indices must satisfy 1 <= i < j, got ({self.i}, {self.j})")
        if not math.isfinite(self.alpha) or not (-math.pi < self.alpha <= math.pi):
            raise ValidationError(f"rotation angle {self.alpha!r} outside (-pi, pi]")

    def matrix(self, n: int) -> np.ndarray:
        if self.j > n:
            raise ValidationError(f"rotation ({self.i}, {self.j}) does not fit dimension {n}")
        r = np.eye(n)
        a, b = self.i - 1, self.j - 1
        c, s = math.cos(self.alpha), math.sin(self.alpha)
        r[a, a] = r[b, b] = c
        r[a, b] = s
        r[b, a] = -s
        return r

    def as_tuple(self) -> Tuple[int, int, float]:
        return (self.i, self.j, self.alpha)


@dataclass(frozen=True)
class GivensSequence:
    """Ordered rotations whose product ``R_{N-1}·…·R_1`` rebuilds an orthogonal matrix.

    ``rotations`` are listed in application order: ``(1,2), (1,3), …, (1,n),
    (2,3), …``; each later rotation multiplies from the left. ``det_sign = -1``
    records that the last row was negated before factoring.
    """

    n: int
    rotations: Tuple[GivensRotation, ...] = field(default_factory=tuple)
    det_sign: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"dimension must be >= 1, got {self.n}")
        if self.det_sign not in (1, -1):
            raise ValidationError(f"det_sign must be +1 or -1, got {self.det_sign}")
        rotations = tuple(self.rotations)
        if len(rotations) > self.n * (self.n - 1) // 2:
            raise ValidationError(f"{len(rotations)} rotations exceed n(n-1)/2 for n={self.n}")
        for rotation in rotations:
            if rotation.j > self.n:
                raise ValidationError(
                    f"rotation ({rotation.i}, {rotation.j}) does not fit dimension {self.n}"
                )
        object.__setattr__(self, "rotations", rotations)

    def angles(self) -> List[Tuple[int, int, float]]:
        return [rotation.as_tuple() for rotation in self.rotations]


@dataclass(frozen=True)
class EigenResult:
    """Eigenpairs of a symmetric matrix.

    Attributes:
        lambdas: Eigenvalues in descending order
        basis: ``M_R`` whose rows are eigenvectors, ``M_R·A·M_Rᵀ = diag(lambdas)``
        det_sign: Determinant sign before the last row was flipped to make
            ``det(M_R) = +1``
        sweeps: Jacobi sweeps performed
    """

    lambdas: np.ndarray
    basis: OrthoMatrix
    det_sign: int = 1
    sweeps: int = 0

    def __post_init__(self):
        object.__setattr__(self, "lambdas", _frozen(self.lambdas))


def _as_sym(a: Union[SymMatrix, ArrayLike]) -> SymMatrix:
    return a if isinstance(a, SymMatrix) else SymMatrix(a)


def _off_diagonal_norm(w: np.ndarray) -> float:
    return float(np.linalg.norm(w - np.diag(np.diag(w))))


def _jacobi_rotate(w: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Annihilate ``w[p, q]`` in place and accumulate the rotation into ``v``."""
    apq = w[p, q]
    theta = (w[q, q] - w[p, p]) / (2.0 * apq)
    t = (1.0 if theta >= 0.0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    col_p, col_q = w[:, p].copy(), w[:, q].copy()
    w[:, p] = c * col_p - s * col_q
    w[:, q] = s * col_p + c * col_q
    row_p, row_q = w[p, :].copy(), w[q, :].copy()
    w[p, :] = c * row_p - s * row_q
    w[q, :] = s * row_p + c * row_q
    w[p, q] = w[q, p] = 0.0

    vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
    v[:, p] = c * vec_p - s * vec_q
    v[:, q] = s * vec_p + c * vec_q


def _canonical_signs(rows: np.ndarray) -> np.ndarray:
    """Make the dominant component of every row positive."""
    rows = rows.copy()
    for k, row in enumerate(rows):
        magnitudes = np.abs(row)
        peak = magnitudes.max()
        lead = int(np.argmax(magnitudes >= peak * (1.0 - SIGN_TIE_TOL)))
        if row[lead] < 0.0:
            rows[k] = -row
    return rows


def jacobi_eigen(a: Union[SymMatrix, ArrayLike]) -> EigenResult:
    """Diagonalize a real symmetric matrix with cyclic Jacobi rotations.

    Sweeps continue until the off-diagonal Frobenius norm is at most
    ``1e-14·||A||_F``. Eigenvalues are sorted descending (ties keep their
    original pivot order), each eigenvector's dominant component is made
    positive and the last row is negated if needed so that ``det(M_R) = +1``.

    Args:
        a: Symmetric matrix (array-likes are validated through ``SymMatrix``)

    Returns:
        EigenResult with ``M_R·a·M_Rᵀ = diag(lambdas)``

    Raises:
        NonFiniteError: If any entry is NaN or infinite
        NoConvergenceError: If 30 sweeps do not reach the threshold
    """
    sym = _as_sym(a)
    n = sym.n
    # Iterate on a power-of-two rescaling so the norms below cannot overflow.
    peak = float(np.max(np.abs(sym.entries)))
    exponent = math.frexp(peak)[1] if peak > 0.0 else 0
    w = np.ldexp(np.array(sym.entries, dtype=float), -exponent)
    v = np.eye(n)
    threshold = JACOBI_REL_TOL * float(np.linalg.norm(w, "fro"))

    sweeps = 0
    while True:
        off = _off_diagonal_norm(w)
        if off <= threshold:
            break
        if sweeps >= JACOBI_MAX_SWEEPS:
            raise NoConvergenceError(
                f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps "
                f"(off-diagonal norm {off:.3e}, threshold {threshold:.3e})"
            )
        for p in range(n - 1):
            for q in range(p + 1, n):
                if w[p, q] != 0.0:
                    _jacobi_rotate(w, v, p, q)
        sweeps += 1

    diagonal = np.ldexp(np.diag(w), exponent)
    order = np.argsort(-diagonal, kind="stable")
    lambdas = diagonal[order]
    rows = _canonical_signs(v[:, order].T)

    det_sign = 1 if np.linalg.det(rows) > 0.0 else -1
    if det_sign < 0:
        rows[-1] = -rows[-1]

    logger.debug("jacobi_eigen: n=%d sweeps=%d det_sign=%+d", n, sweeps, det_sign)
    return EigenResult(lambdas=lambdas, basis=OrthoMatrix(rows), det_sign=det_sign, sweeps=sweeps)


def _wrap_angle(alpha: float) -> float:
    if alpha <= -math.pi:
        alpha += 2.0 * math.pi
    return alpha


def givens_decompose(m: Union[OrthoMatrix, ArrayLike]) -> GivensSequence:
    """Factor an orthogonal matrix into planar rotations.

    Row by row, ``α_{i,j}`` is chosen so that ``[A·R_{i,j}ᵀ]_{i,j} = 0`` for
    ``j = i+1..n``; what remains after each row is an orthogonal block one
    size smaller. A target that is already zero is skipped only while the
    diagonal entry is non-negative; over a negative diagonal the rotation
    uses ``α = π`` so the sign is carried into the remaining block. The
    final 1×1 block is ``±1``; a ``-1`` is recorded as ``det_sign`` (it
    stands for a flip of the last row).

    Raises:
        NonOrthogonalError: If ``||m·mᵀ - I||∞ > 1e-10``
    """
    array = m.entries if isinstance(m, OrthoMatrix) else _square(m, "orthogonal matrix")
    n = array.shape[0]
    residual = orthogonality_residual(array)
    if residual > DECOMPOSE_ORTHO_TOL:
        raise NonOrthogonalError(f"cannot factor a non-orthogonal matrix (residual {residual:.3e})")

    work = np.array(array, dtype=float)
    rotations: List[GivensRotation] = []
    for i in range(n - 1):
        for j in range(i + 1, n):
            if work[i, j] == 0.0 and work[i, i] >= 0.0:
                continue
            rotation = GivensRotation(i + 1, j + 1, _wrap_angle(math.atan2(work[i, j], work[i, i])))
            work = work @ rotation.matrix(n).T
            rotations.append(rotation)

    det_sign = 1 if work[n - 1, n - 1] > 0.0 else -1
    logger.debug("givens_decompose: n=%d rotations=%d det_sign=%+d", n, len(rotations), det_sign)
    return GivensSequence(n=n, rotations=tuple(rotations), det_sign=det_sign)


def givens_reconstruct(seq: GivensSequence) -> OrthoMatrix:
    """Multiply a rotation sequence back into the orthogonal matrix it factors."""
    n = seq.n
    product = np.eye(n)
    for rotation in seq.rotations:
        product = rotation.matrix(n) @ product
    if seq.det_sign < 0:
        product[n - 1] = -product[n - 1]
    return OrthoMatrix(product)


def matexp_hermitian_diag(lambdas: Sequence[float], t: float) -> np.ndarray:
    """Diagonal of ``exp(i·diag(lambdas)·t)`` as a complex vector."""
    values = np.asarray(lambdas, dtype=float)
    if not np.all(np.isfinite(values)) or not math.isfinite(t):
        raise NonFiniteError("phases require finite eigenvalues and time")
    return np.exp(1j * values * t)
