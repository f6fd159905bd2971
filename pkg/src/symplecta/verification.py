"""Invariant suite run by ``symplecta verify``.

Each check compares a pipeline result with an oracle (or with an identity
the result must satisfy) and yields an :class:`OracleReport`.
"""

import logging
from typing import Callable, List, Optional

import numpy as np

from .dynamics import PhaseState, energy, evolve, evolve_trajectory
from .linalg import givens_decompose, givens_reconstruct, inf_norm, orthogonality_residual
from .oracles import OracleReport, charpoly_eigs, dynamics_spectrum, matexp_series, rk4_hamilton
from .pipeline import (
    NormalModeDecomposition,
    OscillatorNetwork,
    Stage,
    assemble_z,
    decompose,
    symplectic_residual,
    two_osc_closed_form,
)
from .quantum import (
    QuantumNetwork,
    QuantumNormalModes,
    SingleExcitationState,
    energy_expectation,
    evolve_single_excitation,
    excitation_number,
    quantum_normal_modes,
)

logger = logging.getLogger(__name__)

Decomposer = Callable[[OscillatorNetwork], NormalModeDecomposition]

RK4_DT = 1e-3
RK4_T_MAX = 5.0
RANDOM_NETWORKS = 20


def random_stable_network(rng: np.random.Generator, n: int, low: float = 0.5, high: float = 2.0) -> OscillatorNetwork:
    """Random star network whose ``H_Q`` is positive definite.

    Couplings satisfy ``Σ ω_{1,i}²/ω_{i,i} <= 0.81·ω_{1,1}``, which keeps the
    Schur complement of the arrowhead matrix positive.
    """
    diag = rng.uniform(low, high, size=n)
    weights = rng.uniform(0.0, 1.0, size=n - 1)
    couplings = -0.9 * weights * np.sqrt(diag[0] * diag[1:] / (n - 1))
    return OscillatorNetwork(diag_freq=diag, couplings=couplings)


def random_quantum_network(rng: np.random.Generator, n: int) -> QuantumNetwork:
    return QuantumNetwork(g_diag=rng.uniform(0.5, 2.0, size=n), g_couple=-rng.uniform(0.0, 0.3, size=n - 1))


def random_state(rng: np.random.Generator, n: int) -> PhaseState:
    return PhaseState(q=rng.normal(size=n), p=rng.normal(size=n))


def random_excitation(rng: np.random.Generator, n: int) -> SingleExcitationState:
    return SingleExcitationState.normalized(rng.normal(size=n) + 1j * rng.normal(size=n))


def _relative(a: np.ndarray, b: np.ndarray) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def classical_checks(
    net: OscillatorNetwork,
    rng: np.random.Generator,
    decomposer: Decomposer = decompose,
    rotation_perturbation: float = 0.0,
) -> List[OracleReport]:
    """Oracle checks for one classical network.

    ``rotation_perturbation`` adds a multiple of the all-ones matrix to
    ``M_R`` before ``Z`` is assembled; a nonzero value must make the
    symplectic check fail.
    """
    reports: List[OracleReport] = []
    decomposition = decomposer(net)
    n = net.n

    m_r = decomposition.m_r.entries
    reports.append(OracleReport.compare("rotation_orthogonality", orthogonality_residual(m_r), 1e-12))
    g = decomposition.g_mat.entries
    diagonalized = m_r @ g @ m_r.T - np.diag(decomposition.lambdas)
    reports.append(
        OracleReport.compare("rotation_diagonalizes", inf_norm(diagonalized), 1e-12 * max(inf_norm(g), 1e-300))
    )
    if n <= 4:
        reports.append(
            OracleReport.compare(
                "charpoly_eigenvalues",
                np.max(np.abs(charpoly_eigs(decomposition.g_mat) - decomposition.lambdas)),
                1e-10,
            )
        )

    sequence = givens_decompose(decomposition.m_r)
    rebuilt = givens_reconstruct(sequence).entries
    reports.append(
        OracleReport.compare(
            "givens_round_trip",
            inf_norm(rebuilt - m_r),
            1e-12,
            f"rotations={len(sequence.rotations)} det_sign={sequence.det_sign:+d}",
        )
    )

    z = decomposition.z
    if rotation_perturbation:
        z = assemble_z(decomposition.m_s, m_r + rotation_perturbation * np.ones_like(m_r), decomposition.m_t)
    reports.append(OracleReport.compare("symplectic_condition", symplectic_residual(z), 1e-10))

    final = decomposition.stage_hamiltonian(Stage.AFTER_T)
    target = 0.5 * np.diag(np.concatenate([decomposition.omegas, decomposition.omegas]))
    reports.append(
        OracleReport.compare("final_hamiltonian_diagonal", inf_norm(final - target), 1e-10 * max(1.0, inf_norm(final)))
    )

    spectrum = dynamics_spectrum(net)
    reports.append(OracleReport.compare("dynamics_spectrum", _relative(decomposition.omegas, spectrum), 1e-9))

    if n == 2:
        closed = two_osc_closed_form(net.diag_freq[0], net.diag_freq[1], net.couplings[0])
        expected = np.array([closed.cap_omega_plus, closed.cap_omega_minus])
        reports.append(OracleReport.compare("two_oscillator_closed_form", _relative(decomposition.omegas, expected), 1e-10))

    x0 = random_state(rng, n)
    exact = evolve(net, x0, RK4_T_MAX, decomposition=decomposition).as_vector()
    reference = rk4_hamilton(net, x0.as_vector(), RK4_T_MAX, RK4_DT)
    reports.append(
        OracleReport.compare("evolve_vs_rk4", np.max(np.abs(exact - reference)), 1e-6, f"t={RK4_T_MAX} dt={RK4_DT}")
    )

    e0 = energy(net, x0)
    trajectory = evolve_trajectory(net, x0, 100.0, 0.5, decomposition=decomposition)
    drift = max(abs(energy(net, sample.state) - e0) for sample in trajectory) / abs(e0)
    reports.append(OracleReport.compare("energy_conservation", drift, 1e-9, f"samples={len(trajectory)}"))

    forward = evolve(net, x0, 7.5, decomposition=decomposition)
    back = evolve(net, forward, -7.5, decomposition=decomposition)
    reports.append(OracleReport.compare("reversibility", np.max(np.abs(back.as_vector() - x0.as_vector())), 1e-10))
    return reports


def quantum_checks(
    qnet: QuantumNetwork,
    rng: np.random.Generator,
    modes: Optional[QuantumNormalModes] = None,
) -> List[OracleReport]:
    """Oracle checks for one quantum network."""
    reports: List[OracleReport] = []
    modes = modes or quantum_normal_modes(qnet)
    h = qnet.coupling_matrix()
    m_r = modes.m_r.entries

    reports.append(OracleReport.compare("commutator_preservation", orthogonality_residual(m_r), 1e-12))
    reports.append(
        OracleReport.compare(
            "quantum_diagonalizes",
            inf_norm(m_r @ h.entries @ m_r.T - np.diag(modes.lambdas)),
            1e-12 * max(inf_norm(h.entries), 1e-300),
        )
    )
    if qnet.n <= 4:
        reports.append(
            OracleReport.compare("charpoly_eigenvalues", np.max(np.abs(charpoly_eigs(h) - modes.lambdas)), 1e-10)
        )

    c0 = random_excitation(rng, qnet.n)
    amplitude_error = norm_error = energy_drift = 0.0
    e0 = energy_expectation(c0, modes)
    for t in (0.5, 3.0, 17.0, 100.0):
        evolved = evolve_single_excitation(qnet, c0, t, modes=modes)
        reference = matexp_series(h, t, c0.amps)
        amplitude_error = max(amplitude_error, float(np.max(np.abs(evolved.amps - reference))))
        norm_error = max(norm_error, abs(excitation_number(evolved) - 1.0))
        energy_drift = max(energy_drift, abs(energy_expectation(evolved, modes) - e0))
    reports.append(OracleReport.compare("evolve_vs_matexp", amplitude_error, 1e-9))
    reports.append(OracleReport.compare("norm_conservation", norm_error, 1e-12))
    reports.append(
        OracleReport.compare("energy_expectation_constant", energy_drift / max(abs(e0), 1e-300), 1e-10)
    )
    return reports


def randomized_checks(rng: np.random.Generator, count: int = RANDOM_NETWORKS, decomposer: Decomposer = decompose) -> List[OracleReport]:
    """Symplectic and spectral checks over ``count`` random stable networks."""
    worst_symplectic = worst_spectral = 0.0
    for k in range(count):
        net = random_stable_network(rng, 2 + k % 7)
        decomposition = decomposer(net)
        worst_symplectic = max(worst_symplectic, decomposition.symplectic_residual())
        worst_spectral = max(worst_spectral, _relative(decomposition.omegas, dynamics_spectrum(net)))

    worst_round_trip = 0.0
    for k in range(count):
        n = 2 + k % 9
        m = np.linalg.qr(rng.normal(size=(n, n)))[0]
        worst_round_trip = max(worst_round_trip, inf_norm(givens_reconstruct(givens_decompose(m)).entries - m))

    return [
        OracleReport.compare("random_symplectic_condition", worst_symplectic, 1e-10, f"networks={count}"),
        OracleReport.compare("random_dynamics_spectrum", worst_spectral, 1e-9, f"networks={count}"),
        OracleReport.compare("random_givens_round_trip", worst_round_trip, 1e-12, f"matrices={count}"),
    ]


def run_verification(
    net: Optional[OscillatorNetwork] = None,
    qnet: Optional[QuantumNetwork] = None,
    seed: int = 42,
    decomposer: Decomposer = decompose,
    rotation_perturbation: float = 0.0,
) -> List[OracleReport]:
    """Run the suite for a classical and/or quantum network plus randomized checks.

    Pipeline errors (for example an unstable network) propagate so that the
    caller can map them to exit codes.
    """
    rng = np.random.default_rng(seed)
    reports: List[OracleReport] = []
    if net is not None:
        reports.extend(classical_checks(net, rng, decomposer, rotation_perturbation))
    if qnet is not None:
        reports.extend(quantum_checks(qnet, rng))
    reports.extend(randomized_checks(rng, decomposer=decomposer))
    failed = [report.check_name for report in reports if not report.passed]
    if failed:
        logger.warning("verification failed: %s", ", ".join(failed))
    return reports


def all_passed(reports: List[OracleReport]) -> bool:
    return all(report.passed for report in reports)
