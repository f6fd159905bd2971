"""Single-excitation dynamics of the rotating-wave quantum network.

With ``H = Σ g_{i,i} a_i†a_i + Σ_{i>1} g_{1,i}(a_1†a_i + a_i†a_1)`` the
number of excitations is conserved, so a state with one quantum stays in the
span of ``|1_i⟩``. Its amplitudes evolve as ``c(t) = M_Rᵀ·e^{iΛt}·M_R·c(0)``
where ``M_R`` diagonalizes the n×n coupling matrix. The ``e^{+iHt}`` sign is
kept throughout; the opposite convention conjugates every amplitude.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NonFiniteError, ValidationError
from .linalg import OrthoMatrix, SymMatrix, jacobi_eigen, matexp_hermitian_diag
from .pipeline import OscillatorNetwork, squeeze_stage

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12


@dataclass(frozen=True)
class QuantumNetwork:
    """Mode frequencies ``g_{i,i}`` and couplings ``g_{1,i}`` (ħ = 1)."""

    g_diag: np.ndarray
    g_couple: np.ndarray

    def __post_init__(self):
        diag = np.array(self.g_diag, dtype=float).reshape(-1)
        couple = np.array(self.g_couple, dtype=float).reshape(-1)
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(couple))):
            raise NonFiniteError("quantum network parameters must be finite")
        if diag.size < 1:
            raise ValidationError("a quantum network needs at least one mode")
        if couple.size != diag.size - 1:
            raise ValidationError(f"expected {diag.size - 1} couplings for {diag.size} modes, got {couple.size}")
        if np.any(diag <= 0.0):
            raise ValidationError("mode frequencies g_{i,i} must be positive")
        diag.setflags(write=False)
        couple.setflags(write=False)
        object.__setattr__(self, "g_diag", diag)
        object.__setattr__(self, "g_couple", couple)

    @property
    def n(self) -> int:
        return self.g_diag.size

    def coupling_matrix(self) -> SymMatrix:
        """Arrowhead matrix with ``g_{i,i}`` on the diagonal and ``g_{1,i}`` on the border."""
        h = np.diag(self.g_diag)
        h[0, 1:] = self.g_couple
        h[1:, 0] = self.g_couple
        return SymMatrix(h)

    @classmethod
    def from_classical(cls, net: OscillatorNetwork) -> "QuantumNetwork":
        """Quantum network whose coupling matrix is the squeezed classical ``H_QS``."""
        g_mat = squeeze_stage(net).g_mat.entries
        return cls(g_diag=np.diag(g_mat).copy(), g_couple=g_mat[0, 1:].copy())


@dataclass(frozen=True)
class SingleExcitationState:
    """Amplitudes ``c_i`` over ``|1_i⟩``, normalized to within 1e-12."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size == 0:
            raise ValidationError("a state needs at least one amplitude")
        if not np.all(np.isfinite(amps)):
            raise NonFiniteError("amplitudes must be finite")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized (sum |c|^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def n(self) -> int:
        return self.amps.size

    @classmethod
    def site(cls, n: int, i: int) -> "SingleExcitationState":
        """``|1_i⟩``: one excitation in oscillator ``i`` (1-based)."""
        if not 1 <= i <= n:
            raise ValidationError(f"site {i} outside 1..{n}")
        amps = np.zeros(n, dtype=complex)
        amps[i - 1] = 1.0
        return cls(amps)

    @classmethod
    def normalized(cls, amps: Sequence[complex]) -> "SingleExcitationState":
        amps = np.asarray(amps, dtype=complex)
        norm = math.sqrt(float(np.sum(np.abs(amps) ** 2)))
        if norm == 0.0:
            raise ValidationError("the zero vector cannot be normalized")
        return cls(amps / norm)


@dataclass(frozen=True)
class QuantumNormalModes:
    """Normal-mode frequencies ``λ`` and the rotation ``M_R`` with ``ā = M_R·a``."""

    lambdas: np.ndarray
    m_r: OrthoMatrix
    det_sign: int = 1

    @property
    def n(self) -> int:
        return self.lambdas.size


def quantum_normal_modes(qnet: QuantumNetwork) -> QuantumNormalModes:
    """Diagonalize ``H = Σ λ_k ā_k†ā_k``; negative λ are allowed."""
    result = jacobi_eigen(qnet.coupling_matrix())
    return QuantumNormalModes(lambdas=result.lambdas, m_r=result.basis, det_sign=result.det_sign)


def _check_state(qnet: QuantumNetwork, c: SingleExcitationState) -> None:
    if c.n != qnet.n:
        raise ValidationError(f"state has {c.n} amplitudes, network has {qnet.n} modes")


def normal_mode_amplitudes(c: SingleExcitationState, modes: QuantumNormalModes) -> np.ndarray:
    """``c̄ = M_R·c``, the amplitudes over ``|1̄_k⟩``."""
    return modes.m_r.entries @ c.amps


def evolve_single_excitation(
    qnet: QuantumNetwork,
    c0: SingleExcitationState,
    t: float,
    modes: Optional[QuantumNormalModes] = None,
) -> SingleExcitationState:
    """``c(t) = M_Rᵀ·diag(e^{iλt})·M_R·c0``."""
    _check_state(qnet, c0)
    if t == 0.0:
        return c0
    modes = modes or quantum_normal_modes(qnet)
    phases = matexp_hermitian_diag(modes.lambdas, t)
    amps = modes.m_r.T @ (phases * normal_mode_amplitudes(c0, modes))
    return SingleExcitationState(amps)


def excitation_trajectory(
    qnet: QuantumNetwork,
    c0: SingleExcitationState,
    times: Sequence[float],
    modes: Optional[QuantumNormalModes] = None,
) -> np.ndarray:
    """Amplitudes at each of ``times`` as a ``(len(times), n)`` complex array.

    Every row is evaluated from ``c0`` directly.
    """
    _check_state(qnet, c0)
    modes = modes or quantum_normal_modes(qnet)
    times = np.asarray(times, dtype=float).reshape(-1)
    if not np.all(np.isfinite(times)):
        raise NonFiniteError("times must be finite")
    phases = np.exp(1j * np.outer(times, modes.lambdas))
    # row form of M_Rᵀ·(phase ⊙ c̄0)
    return (phases * normal_mode_amplitudes(c0, modes)) @ modes.m_r.entries


def excitation_number(c: SingleExcitationState) -> float:
    """``Σ |c_i|²``; equal to the normal-mode count ``Σ |c̄_k|²``."""
    return float(np.sum(np.abs(c.amps) ** 2))


def energy_expectation(c: SingleExcitationState, modes: QuantumNormalModes) -> float:
    """``⟨H⟩ = Σ λ_k |c̄_k|²``."""
    return float(np.sum(modes.lambdas * np.abs(normal_mode_amplitudes(c, modes)) ** 2))


def survival_probability(
    qnet: QuantumNetwork,
    i: int,
    t: float,
    modes: Optional[QuantumNormalModes] = None,
) -> float:
    """``|⟨1_i|e^{iHt}|1_i⟩|²`` for an excitation starting in oscillator ``i``."""
    start = SingleExcitationState.site(qnet.n, i)
    evolved = evolve_single_excitation(qnet, start, t, modes=modes)
    return float(min(1.0, abs(evolved.amps[i - 1]) ** 2))
