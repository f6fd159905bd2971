"""Squeeze, rotate, squeeze: normal modes of a star-coupled oscillator network.

The Hamiltonian is

    H = ½ Σ ω_{i,i} (p_i² + q_i²) + Σ_{i>1} ω_{1,i} q_1 q_i

written as ``H = xᵀ·H·x`` with ``x = (q_1..q_n, p_1..p_n)`` and the phase-space
matrix ``H = ½·blockdiag(H_Q, H_P)``. A linear change of variables
``x̄ = M·x`` turns it into ``H̄ = M⁻ᵀ·H·M⁻¹``; it is canonical when
``M·J·Mᵀ = J``.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import NonFiniteError, SqueezeOverflowError, UnstableModeError, ValidationError
from .linalg import EigenResult, OrthoMatrix, SymMatrix, inf_norm, jacobi_eigen

logger = logging.getLogger(__name__)

UNSTABLE_REL_TOL = 1e-12
NEAR_UNSTABLE_REL_TOL = 1e-6
_LOG_FLOAT_MAX = math.log(np.finfo(float).max)
_LOG_FLOAT_TINY = math.log(np.finfo(float).tiny)


def _vector(values: Sequence[float], what: str) -> np.ndarray:
    array = np.array(values, dtype=float).reshape(-1)
    if not np.all(np.isfinite(array)):
        raise NonFiniteError(f"{what} must be finite")
    array.setflags(write=False)
    return array


def symplectic_form(n: int) -> np.ndarray:
    """The 2n×2n matrix ``J = [[0, I], [-I, 0]]``."""
    identity = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, identity], [-identity, zero]])


def symplectic_residual(m: np.ndarray) -> float:
    """Return ``||M·J·Mᵀ - J||∞``."""
    m = np.asarray(m, dtype=float)
    j = symplectic_form(m.shape[0] // 2)
    return inf_norm(m @ j @ m.T - j)


def block_diag(upper: np.ndarray, lower: np.ndarray) -> np.ndarray:
    upper = np.asarray(upper, dtype=float)
    lower = np.asarray(lower, dtype=float)
    zero = np.zeros((upper.shape[0], lower.shape[1]))
    return np.block([[upper, zero], [zero.T, lower]])


def squeeze_map(scales: Sequence[float]) -> np.ndarray:
    """Canonical squeeze ``blockdiag(D, D⁻¹)`` for positive diagonal ``D``."""
    scales = np.asarray(scales, dtype=float)
    return block_diag(np.diag(scales), np.diag(1.0 / scales))


def rotation_map(rotation: np.ndarray) -> np.ndarray:
    """Canonical rotation ``blockdiag(R, R)`` for orthogonal ``R``."""
    return block_diag(rotation, rotation)


def conjugate(hamiltonian: np.ndarray, transform: np.ndarray, inverse: Optional[np.ndarray] = None) -> np.ndarray:
    """Return ``M⁻ᵀ·H·M⁻¹``, the Hamiltonian matrix in the variables ``M·x``."""
    if inverse is None:
        inverse = np.linalg.inv(transform)
    return inverse.T @ hamiltonian @ inverse


@dataclass(frozen=True)
class OscillatorNetwork:
    """Oscillator 1 coupled to oscillators 2..n.

    Attributes:
        diag_freq: The n frequencies ω_{i,i} (all positive)
        couplings: The n-1 couplings ω_{1,i}, i = 2..n; the usual convention
            is ω_{1,i} <= 0 but the sign is not enforced
    """

    diag_freq: np.ndarray
    couplings: np.ndarray

    def __post_init__(self):
        diag = _vector(self.diag_freq, "diag_freq")
        couplings = _vector(self.couplings, "couplings")
        if diag.size < 2:
            raise ValidationError(f"a network needs at least 2 oscillators, got {diag.size}")
        if couplings.size != diag.size - 1:
            raise ValidationError(
                f"expected {diag.size - 1} couplings for {diag.size} oscillators, got {couplings.size}"
            )
        if np.any(diag <= 0.0):
            raise ValidationError("all frequencies ω_{i,i} must be positive")
        object.__setattr__(self, "diag_freq", diag)
        object.__setattr__(self, "couplings", couplings)

    @property
    def n(self) -> int:
        return self.diag_freq.size

    @classmethod
    def two(cls, omega1: float, omega2: float, g: float) -> "OscillatorNetwork":
        return cls(diag_freq=[omega1, omega2], couplings=[g])


@dataclass(frozen=True)
class HamiltonianBlocks:
    """Position block ``H_Q`` (arrowhead) and momentum block ``H_P`` (diagonal)."""

    h_q: SymMatrix
    h_p: SymMatrix

    @property
    def n(self) -> int:
        return self.h_q.n

    def phase_space_matrix(self) -> np.ndarray:
        """The 2n×2n matrix ``½·blockdiag(H_Q, H_P)``, so that ``H = xᵀ·H·x``."""
        return 0.5 * block_diag(self.h_q.entries, self.h_p.entries)


def build_hamiltonian(net: OscillatorNetwork) -> HamiltonianBlocks:
    """Arrange the network parameters into ``H_Q`` and ``H_P``."""
    h_q = np.diag(net.diag_freq)
    h_q[0, 1:] = net.couplings
    h_q[1:, 0] = net.couplings
    return HamiltonianBlocks(h_q=SymMatrix(h_q), h_p=SymMatrix.diagonal(net.diag_freq))


@dataclass(frozen=True)
class SqueezeStage:
    m_s: np.ndarray
    big_g: float
    g_mat: SymMatrix


@dataclass(frozen=True)
class RotationStage:
    lambdas: np.ndarray
    m_r: OrthoMatrix
    det_sign: int = 1


@dataclass(frozen=True)
class FinalSqueezeStage:
    m_t: np.ndarray
    omegas: np.ndarray


def squeeze_stage(net: OscillatorNetwork) -> SqueezeStage:
    """Squeeze every (q_i, p_i) so that the momentum block becomes ``G·I``.

    ``M_S`` entry i is ``ω_{i,i}^{-1/2}·∏_k ω_{k,k}^{1/4}``; the position block
    becomes ``g_{i,j} = ω_{i,j}·√(ω_{i,i}ω_{j,j})/G`` with ``G = ∏√ω_{i,i}``.
    Products are assembled in log space.

    Raises:
        SqueezeOverflowError: If G over- or underflows a float
    """
    log_w = np.log(net.diag_freq)
    log_g = 0.5 * float(np.sum(log_w))
    if log_g > _LOG_FLOAT_MAX or log_g < _LOG_FLOAT_TINY:
        raise SqueezeOverflowError(
            f"G = prod(sqrt(omega)) = exp({log_g:.1f}) is not representable; rescale the frequencies"
        )
    big_g = math.exp(log_g)
    m_s = np.exp(0.5 * log_g - 0.5 * log_w)

    h_q = build_hamiltonian(net).h_q.entries
    # g_{i,j} = ω_{i,j}·exp(½(log ω_i + log ω_j) - log G)
    weights = np.exp(0.5 * (log_w[:, None] + log_w[None, :]) - log_g)
    g_mat = SymMatrix(h_q * weights)
    logger.debug("squeeze_stage: n=%d G=%.6g", net.n, big_g)
    return SqueezeStage(m_s=m_s, big_g=big_g, g_mat=g_mat)


def rotate_stage(g_mat: SymMatrix) -> RotationStage:
    """Diagonalize the squeezed position block: ``M_R·g·M_Rᵀ = diag(λ)``."""
    result: EigenResult = jacobi_eigen(g_mat)
    return RotationStage(lambdas=result.lambdas, m_r=result.basis, det_sign=result.det_sign)


def final_squeeze_stage(lambdas: Sequence[float], big_g: float) -> FinalSqueezeStage:
    """Equalize each mode's coordinate and momentum coefficients.

    ``M_T`` entry i is ``λ_i^{1/4}·G^{-1/4}`` and ``Ω_i = √(G·λ_i)``.

    Raises:
        UnstableModeError: If any ``λ_i <= 1e-12·max|λ|``

    Modes with ``λ_i <= 1e-6·max|λ|`` are logged as a warning.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    peak = float(np.max(np.abs(lambdas))) if lambdas.size else 0.0
    unstable = [k + 1 for k, value in enumerate(lambdas) if value <= UNSTABLE_REL_TOL * peak]
    if unstable:
        raise UnstableModeError(
            f"normal modes {unstable} have zero or imaginary frequency "
            f"(lambda = {[float(lambdas[k - 1]) for k in unstable]})",
            indices=unstable,
        )
    near = [k + 1 for k, value in enumerate(lambdas) if value <= NEAR_UNSTABLE_REL_TOL * peak]
    if near:
        logger.warning(
            "normal modes %s are close to instability (lambda / max|lambda| <= %g)", near, NEAR_UNSTABLE_REL_TOL
        )
    m_t = (lambdas / big_g) ** 0.25
    omegas = np.sqrt(big_g * lambdas)
    return FinalSqueezeStage(m_t=m_t, omegas=omegas)


class Stage(str, Enum):
    """Pipeline stages at which the Hamiltonian can be inspected."""

    ORIGINAL = "original"
    AFTER_S = "after_S"
    AFTER_R = "after_R"
    AFTER_T = "after_T"

    @property
    def suffix(self) -> str:
        return {"original": "", "after_S": "_S", "after_R": "_R", "after_T": "_T"}[self.value]


@dataclass(frozen=True)
class NormalModeDecomposition:
    """Everything the three-stage pipeline produces for one network."""

    net: OscillatorNetwork
    m_s: np.ndarray
    big_g: float
    g_mat: SymMatrix
    m_r: OrthoMatrix
    lambdas: np.ndarray
    m_t: np.ndarray
    omegas: np.ndarray
    z: np.ndarray
    det_sign: int = 1

    @property
    def n(self) -> int:
        return self.net.n

    def stage_map(self, stage: Stage) -> np.ndarray:
        """Cumulative canonical map from the original variables to ``stage``."""
        stage = Stage(stage)
        maps = {
            Stage.ORIGINAL: np.eye(2 * self.n),
            Stage.AFTER_S: squeeze_map(self.m_s),
        }
        maps[Stage.AFTER_R] = rotation_map(self.m_r.entries) @ maps[Stage.AFTER_S]
        maps[Stage.AFTER_T] = squeeze_map(self.m_t) @ maps[Stage.AFTER_R]
        return maps[stage]

    def stage_inverse(self, stage: Stage) -> np.ndarray:
        """Exact inverse of :meth:`stage_map` built from the factors."""
        stage = Stage(stage)
        inverses = {
            Stage.ORIGINAL: np.eye(2 * self.n),
            Stage.AFTER_S: squeeze_map(1.0 / self.m_s),
        }
        inverses[Stage.AFTER_R] = inverses[Stage.AFTER_S] @ rotation_map(self.m_r.T)
        inverses[Stage.AFTER_T] = inverses[Stage.AFTER_R] @ squeeze_map(1.0 / self.m_t)
        return inverses[stage]

    def stage_hamiltonian(self, stage: Stage) -> np.ndarray:
        """Phase-space matrix of H in the variables of ``stage``."""
        original = build_hamiltonian(self.net).phase_space_matrix()
        return conjugate(original, self.stage_map(stage), self.stage_inverse(stage))

    @property
    def z_inverse(self) -> np.ndarray:
        return self.stage_inverse(Stage.AFTER_T)

    def to_normal(self, x: np.ndarray) -> np.ndarray:
        return self.z @ np.asarray(x, dtype=float)

    def from_normal(self, x_bar: np.ndarray) -> np.ndarray:
        return self.z_inverse @ np.asarray(x_bar, dtype=float)

    def symplectic_residual(self) -> float:
        return symplectic_residual(self.z)


def assemble_z(m_s: np.ndarray, m_r: np.ndarray, m_t: np.ndarray) -> np.ndarray:
    """``Z = blockdiag(M_T, M_T⁻¹)·blockdiag(M_R, M_R)·blockdiag(M_S, M_S⁻¹)``."""
    return squeeze_map(m_t) @ rotation_map(m_r) @ squeeze_map(m_s)


def decompose(net: OscillatorNetwork) -> NormalModeDecomposition:
    """Run the squeeze, rotation and final squeeze stages.

    Raises:
        SqueezeOverflowError: From the squeeze stage
        NoConvergenceError: From the eigensolver
        UnstableModeError: If the network has a non-oscillating mode
    """
    squeeze = squeeze_stage(net)
    rotation = rotate_stage(squeeze.g_mat)
    final = final_squeeze_stage(rotation.lambdas, squeeze.big_g)
    z = assemble_z(squeeze.m_s, rotation.m_r.entries, final.m_t)
    logger.debug("decompose: n=%d omegas=%s", net.n, np.array2string(final.omegas, precision=6))
    return NormalModeDecomposition(
        net=net,
        m_s=squeeze.m_s,
        big_g=squeeze.big_g,
        g_mat=squeeze.g_mat,
        m_r=rotation.m_r,
        lambdas=rotation.lambdas,
        m_t=final.m_t,
        omegas=final.omegas,
        z=z,
        det_sign=rotation.det_sign,
    )


@dataclass(frozen=True)
class TwoOscDiagnostics:
    """Closed-form quantities of the two-oscillator problem."""

    omega1: float
    omega2: float
    g: float
    alpha: float
    omega_bar: float
    omega1_cap: float
    omega2_cap: float
    cos_phi: float
    sin_phi: float
    omega_plus: float
    omega_minus: float
    alpha_plus: float
    alpha_minus: float
    cap_omega_plus: float
    cap_omega_minus: float

    @property
    def stable(self) -> bool:
        return self.omega1 * self.omega2 >= self.g * self.g

    def cap_omega_direct(self) -> Tuple[float, float]:
        """Ω± evaluated straight from ω₁, ω₂ and g."""
        w1, w2, g = self.omega1, self.omega2, self.g
        root = math.sqrt((w1 * w1 - w2 * w2) ** 2 + 4.0 * g * g * w1 * w2)
        plus = math.sqrt(w1 * w1 + w2 * w2 + root) / math.sqrt(2.0)
        minus = math.sqrt(max(w1 * w1 + w2 * w2 - root, 0.0)) / math.sqrt(2.0)
        return plus, minus

    def squeeze_matrix(self) -> np.ndarray:
        """``M₁``: squeeze in the momentum plane turning its section into a circle."""
        return squeeze_map([self.alpha, 1.0 / self.alpha])

    def rotation_matrix(self) -> np.ndarray:
        """``M₂``: rotation by φ in both the position and momentum planes."""
        c, s = self.cos_phi, self.sin_phi
        return rotation_map(np.array([[c, s], [-s, c]]))

    def mode_squeeze_matrix(self) -> np.ndarray:
        """``M₃``: per-mode squeezes by α±."""
        if self.omega_minus <= 0.0:
            raise UnstableModeError("the slow mode has zero frequency; M3 is singular", indices=[2])
        return squeeze_map([self.alpha_plus, self.alpha_minus])

    def transform(self) -> np.ndarray:
        """``M = M₃·M₂·M₁``, taking H to ½·diag(Ω₊, Ω₋, Ω₊, Ω₋)."""
        return self.mode_squeeze_matrix() @ self.rotation_matrix() @ self.squeeze_matrix()


def two_osc_closed_form(omega1: float, omega2: float, g: float) -> TwoOscDiagnostics:
    """Evaluate every closed-form quantity of the two-oscillator problem.

    For g > 0 the rotation angle's sine takes the opposite sign, which keeps
    the rotated position block diagonal; for g <= 0 this is the usual choice.

    Raises:
        ValidationError: If a frequency is not positive
        UnstableModeError: If ω₁ω₂ < g²
    """
    for value in (omega1, omega2, g):
        if not math.isfinite(value):
            raise NonFiniteError("two-oscillator parameters must be finite")
    if omega1 <= 0.0 or omega2 <= 0.0:
        raise ValidationError("both frequencies must be positive")
    if omega1 * omega2 < g * g:
        raise UnstableModeError(
            f"omega1*omega2 = {omega1 * omega2:.6g} < g^2 = {g * g:.6g}: the slow mode is not oscillatory",
            indices=[2],
        )

    alpha = (omega2 / omega1) ** 0.25
    omega_bar = math.sqrt(omega1 * omega2)
    cap1 = math.sqrt(omega1**3 / omega2)
    cap2 = math.sqrt(omega2**3 / omega1)

    spread = math.sqrt((cap1 - cap2) ** 2 + 4.0 * g * g)
    ratio = (cap1 - cap2) / spread if spread > 0.0 else 0.0
    cos_phi = math.sqrt(0.5 * (1.0 + ratio))
    sin_phi = (1.0 if g > 0.0 else -1.0) * math.sqrt(0.5 * (1.0 - ratio))

    omega_plus = 0.5 * ((cap1 + cap2) + spread)
    omega_minus = max(0.5 * ((cap1 + cap2) - spread), 0.0)
    return TwoOscDiagnostics(
        omega1=omega1,
        omega2=omega2,
        g=g,
        alpha=alpha,
        omega_bar=omega_bar,
        omega1_cap=cap1,
        omega2_cap=cap2,
        cos_phi=cos_phi,
        sin_phi=sin_phi,
        omega_plus=omega_plus,
        omega_minus=omega_minus,
        alpha_plus=(omega_plus / omega_bar) ** 0.25,
        alpha_minus=(omega_minus / omega_bar) ** 0.25,
        cap_omega_plus=math.sqrt(omega_bar * omega_plus),
        cap_omega_minus=math.sqrt(omega_bar * omega_minus),
    )


@dataclass(frozen=True)
class SpringMassPair:
    """Two masses on springs k₁, k₂ joined by a coupling spring k."""

    m1: float
    m2: float
    k1: float
    k2: float
    k: float

    def __post_init__(self):
        for name in ("m1", "m2", "k1", "k2", "k"):
            if not math.isfinite(getattr(self, name)):
                raise NonFiniteError(f"{name} must be finite")
        if self.m1 <= 0.0 or self.m2 <= 0.0:
            raise ValidationError("masses must be positive")
        if self.k1 <= 0.0 or self.k2 <= 0.0:
            raise ValidationError("spring constants k1, k2 must be positive")
        if self.k < 0.0:
            raise ValidationError("coupling spring constant k must be non-negative")

    @property
    def alphas(self) -> Tuple[float, float]:
        """Scale factors ``α_i = (m_i(k_i + k))^{1/4}``."""
        return (
            (self.m1 * (self.k1 + self.k)) ** 0.25,
            (self.m2 * (self.k2 + self.k)) ** 0.25,
        )

    def to_scaled(self, positions: Sequence[float], momenta: Sequence[float]) -> np.ndarray:
        """Map physical displacements and momenta to ``(q₁, q₂, p₁, p₂)``."""
        alphas = np.asarray(self.alphas)
        return np.concatenate([alphas * np.asarray(positions, dtype=float), np.asarray(momenta, dtype=float) / alphas])


def from_spring_mass(p: SpringMassPair) -> Tuple[float, float, float]:
    """Convert a spring-mass pair to ``(ω₁, ω₂, g)``.

    ``ω_i = √((k_i + k)/m_i)`` and ``g = -k/(α₁α₂)``. The result always
    satisfies ω₁ω₂ >= g² because (k₁ + k)(k₂ + k) >= k².
    """
    alpha1, alpha2 = p.alphas
    omega1 = math.sqrt((p.k1 + p.k) / p.m1)
    omega2 = math.sqrt((p.k2 + p.k) / p.m2)
    g = -p.k / (alpha1 * alpha2)
    return omega1, omega2, g
