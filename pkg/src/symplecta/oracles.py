"""Brute-force reference computations.

None of these reuse the eigensolver or the pipeline: fixed-step RK4 on
Hamilton's equations, a Taylor-series matrix exponential, bisection on
characteristic-polynomial minors and numpy's general eigenvalue routine on
the dynamics map. Agreement with the pipeline is therefore evidence.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from .errors import (
    ComplexLeakageError,
    DimensionTooLargeError,
    NonFiniteError,
    StepBudgetError,
    ValidationError,
)
from .linalg import SymMatrix
from .pipeline import OscillatorNetwork, block_diag, symplectic_form

logger = logging.getLogger(__name__)

RK4_MAX_DT = 1e-2
RK4_MAX_STEPS = 10**8
SERIES_REL_TOL = 1e-18
SERIES_MAX_TERMS = 200
CHARPOLY_MAX_N = 4
BISECTION_WIDTH = 1e-13
LEAKAGE_TOL = 1e-8


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one comparison against an oracle."""

    check_name: str
    max_error: float
    tolerance: float
    passed: bool
    details: str = ""

    def __post_init__(self):
        if self.passed != (self.max_error <= self.tolerance):
            raise ValidationError(
                f"report {self.check_name!r}: passed={self.passed} contradicts "
                f"max_error={self.max_error!r} tolerance={self.tolerance!r}"
            )

    @classmethod
    def compare(cls, check_name: str, max_error: float, tolerance: float, details: str = "") -> "OracleReport":
        max_error = float(max_error)
        if math.isnan(max_error):
            max_error = math.inf
        return cls(check_name, max_error, float(tolerance), max_error <= tolerance, details)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check_name": self.check_name,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": self.details,
        }

    def format_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = f"{status} {self.check_name} max_error={self.max_error:.3e} tolerance={self.tolerance:.1e}"
        return f"{line} {self.details}" if self.details else line


def dynamics_matrix(net: OscillatorNetwork) -> np.ndarray:
    """``2·J·H`` with ``H = ½·blockdiag(H_Q, H_P)``, built from the raw parameters."""
    n = net.n
    h_q = np.diag(net.diag_freq)
    h_q[0, 1:] = net.couplings
    h_q[1:, 0] = net.couplings
    return symplectic_form(n) @ block_diag(h_q, np.diag(net.diag_freq))


def rk4_hamilton(net: OscillatorNetwork, x0: Sequence[float], t_max: float, dt: float) -> np.ndarray:
    """Integrate ``ẋ = 2·J·H·x`` from 0 to ``t_max`` with classical RK4.

    The step is shrunk so that a whole number of steps lands on ``t_max``.
    Unstable networks are fine here.

    Args:
        net: Oscillator network
        x0: Initial phase vector ``(q, p)``
        t_max: Final time (may be negative)
        dt: Requested step, at most 1e-2

    Returns:
        Phase vector at ``t_max``

    Raises:
        ValidationError: If ``dt`` is not in (0, 1e-2]
        StepBudgetError: If more than 10⁸ steps are needed
    """
    if not (math.isfinite(t_max) and math.isfinite(dt)):
        raise NonFiniteError("t_max and dt must be finite")
    if not 0.0 < dt <= RK4_MAX_DT:
        raise ValidationError(f"RK4 step must be in (0, {RK4_MAX_DT}], got {dt}")
    x = np.array(x0, dtype=float).reshape(-1)
    if x.size != 2 * net.n:
        raise ValidationError(f"initial vector has length {x.size}, expected {2 * net.n}")

    steps = int(math.ceil(abs(t_max) / dt - 1e-9))
    if steps > RK4_MAX_STEPS:
        raise StepBudgetError(f"{steps} RK4 steps requested, limit is {RK4_MAX_STEPS}")
    if steps == 0:
        return x
    h = t_max / steps
    a = dynamics_matrix(net)
    for _ in range(steps):
        k1 = a @ x
        k2 = a @ (x + 0.5 * h * k1)
        k3 = a @ (x + 0.5 * h * k2)
        k4 = a @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    logger.debug("rk4_hamilton: %d steps of %g", steps, h)
    return x


def matexp_series(h: Union[SymMatrix, np.ndarray], t: float, c0: Sequence[complex]) -> np.ndarray:
    """``e^{i·h·t}·c0`` by scaling and squaring a truncated Taylor series.

    The argument is halved ``s`` times until ``||i·h·t/2^s||∞ <= 0.5``; the
    series stops once a term is below ``1e-18`` of the partial sum.
    """
    matrix = h.entries if isinstance(h, SymMatrix) else np.asarray(h, dtype=float)
    c0 = np.asarray(c0, dtype=complex).reshape(-1)
    n = matrix.shape[0]
    if c0.size != n:
        raise ValidationError(f"vector has length {c0.size}, matrix is {n}x{n}")
    if not math.isfinite(t):
        raise NonFiniteError("time must be finite")

    argument = 1j * matrix * t
    norm = float(np.max(np.sum(np.abs(argument), axis=1)))
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    scaled = argument / (2.0**squarings)

    total = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, SERIES_MAX_TERMS):
        term = term @ scaled / k
        total = total + term
        if np.max(np.abs(term)) < SERIES_REL_TOL * np.max(np.abs(total)):
            break
    for _ in range(squarings):
        total = total @ total
    return total @ c0


def _negative_count(a: np.ndarray, x: float) -> int:
    """Eigenvalues of ``a`` below ``x``: sign changes of the leading minors of ``a - xI``."""
    shifted = a - x * np.eye(a.shape[0])
    changes = 0
    previous = 1.0
    for k in range(1, a.shape[0] + 1):
        minor = float(np.linalg.det(shifted[:k, :k]))
        if minor == 0.0:
            minor = -1e-300 * previous
        if (minor < 0.0) != (previous < 0.0):
            changes += 1
        previous = minor
    return changes


def charpoly_eigs(a: Union[SymMatrix, np.ndarray]) -> np.ndarray:
    """Eigenvalues of a symmetric matrix (n <= 4) by bisection, descending.

    Each root of ``det(A - λI)`` is bracketed by the Gershgorin interval and
    located by counting sign changes of the leading principal minors.

    Raises:
        DimensionTooLargeError: If n > 4
    """
    sym = a if isinstance(a, SymMatrix) else SymMatrix(a)
    matrix = np.array(sym.entries)
    n = sym.n
    if n > CHARPOLY_MAX_N:
        raise DimensionTooLargeError(f"characteristic-polynomial oracle supports n <= {CHARPOLY_MAX_N}, got {n}")

    radii = np.sum(np.abs(matrix), axis=1) - np.abs(np.diag(matrix))
    lower = float(np.min(np.diag(matrix) - radii)) - 1.0
    upper = float(np.max(np.diag(matrix) + radii)) + 1.0

    eigenvalues: List[float] = []
    for k in range(1, n + 1):
        lo, hi = lower, upper
        # smallest x with at least k eigenvalues below it
        for _ in range(400):
            if hi - lo <= BISECTION_WIDTH:
                break
            mid = 0.5 * (lo + hi)
            if _negative_count(matrix, mid) >= k:
                hi = mid
            else:
                lo = mid
        eigenvalues.append(0.5 * (lo + hi))
    return np.array(sorted(eigenvalues, reverse=True))


def dynamics_spectrum(net: OscillatorNetwork) -> np.ndarray:
    """Normal-mode frequencies read off the eigenvalues ``±iΩ`` of ``2·J·H``.

    Returns:
        The n frequencies, descending

    Raises:
        ComplexLeakageError: If an eigenvalue has a real part above 1e-8
            (relative to the spectral scale) or fewer than n positive
            imaginary parts exist
    """
    eigenvalues = np.linalg.eigvals(dynamics_matrix(net))
    scale = max(1.0, float(np.max(np.abs(eigenvalues))))
    leakage = float(np.max(np.abs(eigenvalues.real)))
    if leakage > LEAKAGE_TOL * scale:
        raise ComplexLeakageError(f"dynamics map has eigenvalues off the imaginary axis (max |Re| = {leakage:.3e})")
    frequencies = np.sort(eigenvalues.imag[eigenvalues.imag > 0.0])[::-1]
    if frequencies.size != net.n:
        raise ComplexLeakageError(f"found {frequencies.size} oscillating modes, expected {net.n}")
    return frequencies
