"""Exact classical evolution and phase-space sections.

States evolve as ``x(t) = Z⁻¹·Λ(t)·Z·x(0)`` where ``Λ`` rotates every
normal-mode plane ``(q̄_i, p̄_i)`` by ``Ω_i·t``. With ``ẋ = J·∂H/∂x`` this
gives ``q̄(t) = q̄₀ cos Ωt + p̄₀ sin Ωt`` and ``p̄(t) = -q̄₀ sin Ωt + p̄₀ cos Ωt``.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import IndefiniteSectionError, NonFiniteError, SampleBudgetError, ValidationError
from .pipeline import NormalModeDecomposition, OscillatorNetwork, Stage, build_hamiltonian, decompose

logger = logging.getLogger(__name__)

MAX_SAMPLES = 10**7
MIN_SECTION_SAMPLES = 8


@dataclass(frozen=True)
class PhaseState:
    """Point ``(q, p)`` in the 2n-dimensional phase space."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(-1)
        p = np.array(self.p, dtype=float).reshape(-1)
        if q.size != p.size or q.size == 0:
            raise ValidationError(f"q and p must have the same non-zero length, got {q.size} and {p.size}")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise NonFiniteError("phase-space coordinates must be finite")
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.q.size

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    @classmethod
    def from_vector(cls, x: Sequence[float]) -> "PhaseState":
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size % 2:
            raise ValidationError(f"phase vector length must be even, got {x.size}")
        half = x.size // 2
        return cls(q=x[:half], p=x[half:])


@dataclass(frozen=True)
class PropagatorBlocks:
    """Diagonals of ``Λ_C = cos(Ωt)`` and ``Λ_S = sin(Ωt)``."""

    t: float
    cos_diag: np.ndarray
    sin_diag: np.ndarray

    @property
    def n(self) -> int:
        return self.cos_diag.size

    def matrix(self) -> np.ndarray:
        """``Λ = [[Λ_C, Λ_S], [-Λ_S, Λ_C]]``."""
        c = np.diag(self.cos_diag)
        s = np.diag(self.sin_diag)
        return np.block([[c, s], [-s, c]])

    def plane_rotation(self, i: int) -> np.ndarray:
        """Single factor ``Λ_i`` rotating only the plane of mode ``i`` (1-based)."""
        if not 1 <= i <= self.n:
            raise ValidationError(f"mode index {i} outside 1..{self.n}")
        k = i - 1
        factor = np.eye(2 * self.n)
        factor[k, k] = factor[self.n + k, self.n + k] = self.cos_diag[k]
        factor[k, self.n + k] = self.sin_diag[k]
        factor[self.n + k, k] = -self.sin_diag[k]
        return factor

    def apply(self, x_bar: np.ndarray) -> np.ndarray:
        q_bar, p_bar = np.split(np.asarray(x_bar, dtype=float), 2)
        return np.concatenate(
            [
                self.cos_diag * q_bar + self.sin_diag * p_bar,
                -self.sin_diag * q_bar + self.cos_diag * p_bar,
            ]
        )


def propagator(omegas: Sequence[float], t: float) -> PropagatorBlocks:
    """Normal-mode propagator ``Λ(t)`` for frequencies ``omegas``."""
    omegas = np.asarray(omegas, dtype=float)
    if not math.isfinite(t) or not np.all(np.isfinite(omegas)):
        raise NonFiniteError("propagator needs finite frequencies and time")
    phases = omegas * t
    return PropagatorBlocks(t=float(t), cos_diag=np.cos(phases), sin_diag=np.sin(phases))


def _check_state(net: OscillatorNetwork, x: PhaseState) -> None:
    if x.n != net.n:
        raise ValidationError(f"state has {x.n} oscillators, network has {net.n}")


def evolve(
    net: OscillatorNetwork,
    x0: PhaseState,
    t: float,
    decomposition: Optional[NormalModeDecomposition] = None,
) -> PhaseState:
    """Exact state at time ``t``: ``Z⁻¹·Λ(t)·Z·x0``.

    Args:
        net: Oscillator network
        x0: Initial state
        t: Time (may be negative)
        decomposition: Precomputed ``decompose(net)`` to reuse

    Raises:
        UnstableModeError: If the network has no stable decomposition
    """
    _check_state(net, x0)
    if t == 0.0:
        return x0
    decomposition = decomposition or decompose(net)
    lam = propagator(decomposition.omegas, t)
    x_bar = lam.apply(decomposition.to_normal(x0.as_vector()))
    return PhaseState.from_vector(decomposition.from_normal(x_bar))


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    state: PhaseState


def sample_times(t_max: float, dt: float) -> np.ndarray:
    """Times ``k·dt`` for ``0 <= k·dt <= t_max``.

    Raises:
        ValidationError: If ``dt <= 0`` or ``t_max < 0``
        SampleBudgetError: If more than 10⁷ samples would be produced
    """
    if not (math.isfinite(dt) and math.isfinite(t_max)):
        raise NonFiniteError("t_max and dt must be finite")
    if dt <= 0.0:
        raise ValidationError(f"dt must be positive, got {dt}")
    if t_max < 0.0:
        raise ValidationError(f"t_max must be non-negative, got {t_max}")

    count = int(math.floor(t_max / dt + 1e-9)) + 1
    if count > MAX_SAMPLES:
        raise SampleBudgetError(f"{count} samples requested, limit is {MAX_SAMPLES}")
    logger.debug("sample_times: %d samples, dt=%g", count, dt)
    return np.arange(count) * dt


def evolve_trajectory(
    net: OscillatorNetwork,
    x0: PhaseState,
    t_max: float,
    dt: float,
    decomposition: Optional[NormalModeDecomposition] = None,
) -> List[TrajectorySample]:
    """Sample the exact solution at ``t = k·dt`` for ``0 <= t <= t_max``.

    Every sample is evaluated from ``x0`` directly, never by chaining steps.

    Raises:
        ValidationError: If ``dt <= 0`` or ``t_max < 0``
        SampleBudgetError: If more than 10⁷ samples would be produced
    """
    _check_state(net, x0)
    times = sample_times(t_max, dt)
    count = times.size

    decomposition = decomposition or decompose(net)
    n = net.n
    q_bar, p_bar = np.split(decomposition.to_normal(x0.as_vector()), 2)
    phases = np.outer(times, decomposition.omegas)
    cos, sin = np.cos(phases), np.sin(phases)
    normal = np.hstack([cos * q_bar + sin * p_bar, -sin * q_bar + cos * p_bar])
    original = normal @ decomposition.z_inverse.T

    samples = [TrajectorySample(t=0.0, state=x0)]
    for k in range(1, count):
        samples.append(TrajectorySample(t=float(times[k]), state=PhaseState(q=original[k, :n], p=original[k, n:])))
    return samples


def energy(net: OscillatorNetwork, x: PhaseState) -> float:
    """``½ Σ ω_{i,i}(p_i² + q_i²) + Σ ω_{1,i} q_1 q_i``."""
    _check_state(net, x)
    diagonal = 0.5 * float(np.sum(net.diag_freq * (x.p**2 + x.q**2)))
    coupling = float(x.q[0] * np.dot(net.couplings, x.q[1:]))
    return diagonal + coupling


@dataclass(frozen=True)
class SectionPlane:
    """Two phase-space axes, as 0-based indices into ``(q_1..q_n, p_1..p_n)``."""

    first: int
    second: int
    n: int

    def __post_init__(self):
        for axis in (self.first, self.second):
            if not 0 <= axis < 2 * self.n:
                raise ValidationError(f"axis index {axis} outside 0..{2 * self.n - 1}")
        if self.first == self.second:
            raise ValidationError("a section plane needs two distinct axes")

    def axis_label(self, axis: int, stage: Stage = Stage.ORIGINAL) -> str:
        kind = "q" if axis < self.n else "p"
        return f"{kind}{axis % self.n + 1}{Stage(stage).suffix}"

    def labels(self, stage: Stage = Stage.ORIGINAL) -> Tuple[str, str]:
        return (self.axis_label(self.first, stage), self.axis_label(self.second, stage))


@dataclass(frozen=True)
class SectionCurve:
    """Points of ``{u : uᵀ·A·u = E}`` in one coordinate plane of a stage."""

    stage: Stage
    plane: SectionPlane
    energy: float
    restricted: np.ndarray
    points: np.ndarray

    @property
    def labels(self) -> Tuple[str, str]:
        return self.plane.labels(self.stage)

    @property
    def cross_term(self) -> float:
        return float(self.restricted[0, 1])

    def axis_ratio(self) -> float:
        """Major over minor semi-axis of the ellipse (1 for a circle)."""
        a, b, c = self.restricted[0, 0], self.restricted[0, 1], self.restricted[1, 1]
        half_trace = 0.5 * (a + c)
        radius = math.hypot(0.5 * (a - c), b)
        return math.sqrt((half_trace + radius) / (half_trace - radius))

    def residual(self) -> float:
        """Largest ``|uᵀ·A·u - E|`` over the emitted points."""
        values = np.einsum("ki,ij,kj->k", self.points, self.restricted, self.points)
        return float(np.max(np.abs(values - self.energy)))


def section_curve(
    net: OscillatorNetwork,
    stage: Stage,
    plane: SectionPlane,
    energy_level: float = 1.0,
    samples: int = 64,
    decomposition: Optional[NormalModeDecomposition] = None,
) -> SectionCurve:
    """Level set of H in a coordinate plane of ``stage`` (other coordinates zero).

    Points are ``u(θ) = √(E / dᵀAd)·d`` with ``d = (cos θ, sin θ)`` for
    ``samples`` equally spaced angles, so each lies exactly on the ellipse.

    Raises:
        ValidationError: If ``E <= 0`` or ``samples < 8``
        IndefiniteSectionError: If the restricted 2×2 form is not positive definite
    """
    stage = Stage(stage)
    if plane.n != net.n:
        raise ValidationError(f"plane is for {plane.n} oscillators, network has {net.n}")
    if not math.isfinite(energy_level) or energy_level <= 0.0:
        raise ValidationError(f"section energy must be positive, got {energy_level}")
    if samples < MIN_SECTION_SAMPLES:
        raise ValidationError(f"at least {MIN_SECTION_SAMPLES} samples are required, got {samples}")

    if stage is Stage.ORIGINAL:
        hamiltonian = build_hamiltonian(net).phase_space_matrix()
    else:
        decomposition = decomposition or decompose(net)
        hamiltonian = decomposition.stage_hamiltonian(stage)

    axes = [plane.first, plane.second]
    restricted = hamiltonian[np.ix_(axes, axes)]
    restricted = 0.5 * (restricted + restricted.T)
    a, b, c = restricted[0, 0], restricted[0, 1], restricted[1, 1]
    det = a * c - b * b
    if a <= 0.0 or det <= 1e-14 * max(a * a, c * c):
        raise IndefiniteSectionError(
            f"section {plane.labels(stage)} of stage {stage.value} is not an ellipse "
            f"(restricted form [[{a:.6g}, {b:.6g}], [{b:.6g}, {c:.6g}]])"
        )

    theta = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    directions = np.column_stack([np.cos(theta), np.sin(theta)])
    quadratic = np.einsum("ki,ij,kj->k", directions, restricted, directions)
    points = directions * np.sqrt(energy_level / quadratic)[:, None]
    return SectionCurve(stage=stage, plane=plane, energy=float(energy_level), restricted=restricted, points=points)
