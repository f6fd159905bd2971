"""Command-line front end for symplecta."""

import functools
import logging
import sys
from typing import Any, Dict, List, Optional, Tuple

import click
import numpy as np

from .config import (
    CLASSICAL,
    NetworkConfig,
    dump_config,
    load_config,
    load_initial_state,
    parse_plane,
    parse_stage,
)
from .dynamics import PhaseState, energy, evolve_trajectory, sample_times, section_curve
from .errors import SymplectaError, VerificationError
from .linalg import givens_decompose
from .oracles import OracleReport
from .output import dump_json, write_csv, write_json
from .pipeline import (
    OscillatorNetwork,
    SpringMassPair,
    decompose,
    rotation_map,
    symplectic_residual,
    two_osc_closed_form,
)
from .pipeline import from_spring_mass as spring_mass_to_network
from .quantum import (
    QuantumNetwork,
    SingleExcitationState,
    excitation_trajectory,
    quantum_normal_modes,
)
from .verification import all_passed, run_verification

logger = logging.getLogger(__name__)

Rows = List[List[float]]


def _givens_document(m_r: np.ndarray) -> Dict[str, Any]:
    sequence = givens_decompose(m_r)
    return {
        "det_sign": sequence.det_sign,
        "angles": [{"i": i, "j": j, "alpha": alpha} for i, j, alpha in sequence.angles()],
    }


def normal_modes_impl(config: NetworkConfig) -> Dict[str, Any]:
    """Normal-mode document for a classical or quantum config.

    Returns:
        JSON-ready dictionary with frequencies, transforms, Givens angles and
        the symplectic residual

    Raises:
        UnstableModeError: If a classical network has a non-oscillating mode
    """
    if config.kind == CLASSICAL:
        net = config.to_network()
        decomposition = decompose(net)
        document: Dict[str, Any] = {
            "kind": CLASSICAL,
            "n": net.n,
            "omegas": decomposition.omegas.tolist(),
            "lambdas": decomposition.lambdas.tolist(),
            "G": decomposition.big_g,
            "m_s": decomposition.m_s.tolist(),
            "m_t": decomposition.m_t.tolist(),
            "m_r": decomposition.m_r.entries.tolist(),
            "det_sign": decomposition.det_sign,
            "givens": _givens_document(decomposition.m_r.entries),
            "symplectic_residual": decomposition.symplectic_residual(),
        }
        if net.n == 2:
            closed = two_osc_closed_form(net.diag_freq[0], net.diag_freq[1], net.couplings[0])
            document["two_oscillator"] = {
                "alpha": closed.alpha,
                "omega_bar": closed.omega_bar,
                "cos_phi": closed.cos_phi,
                "sin_phi": closed.sin_phi,
                "omega_plus": closed.omega_plus,
                "omega_minus": closed.omega_minus,
                "cap_omega_plus": closed.cap_omega_plus,
                "cap_omega_minus": closed.cap_omega_minus,
            }
        return document

    qnet = config.to_quantum_network()
    modes = quantum_normal_modes(qnet)
    return {
        "kind": "quantum",
        "n": qnet.n,
        "lambdas": modes.lambdas.tolist(),
        "m_r": modes.m_r.entries.tolist(),
        "det_sign": modes.det_sign,
        "givens": _givens_document(modes.m_r.entries),
        "symplectic_residual": symplectic_residual(rotation_map(modes.m_r.entries)),
    }


def evolve_impl(net: OscillatorNetwork, x0: PhaseState, t_max: float, dt: float) -> Tuple[List[str], Rows]:
    """Exact trajectory rows ``t, q_1..q_n, p_1..p_n, energy``."""
    header = ["t"] + [f"q{i}" for i in range(1, net.n + 1)] + [f"p{i}" for i in range(1, net.n + 1)] + ["energy"]
    samples = evolve_trajectory(net, x0, t_max, dt)
    rows = [[sample.t, *sample.state.q, *sample.state.p, energy(net, sample.state)] for sample in samples]
    return header, rows


def sections_impl(
    net: OscillatorNetwork, stage: str, plane: str, energy_level: float, samples: int
) -> Tuple[Dict[str, Any], List[str], Rows]:
    """Section points with ``(metadata, header, rows)``.

    Raises:
        IndefiniteSectionError: If the section is not an ellipse
    """
    stage_value = parse_stage(stage)
    section_plane = parse_plane(plane, net.n)
    curve = section_curve(net, stage_value, section_plane, energy_level=energy_level, samples=samples)
    labels = list(curve.labels)
    metadata = {
        "stage": stage_value.value,
        "plane": ",".join(labels),
        "energy": repr(curve.energy),
        "samples": samples,
        "cross_term": repr(curve.cross_term),
        "axis_ratio": repr(curve.axis_ratio()),
    }
    return metadata, labels, curve.points.tolist()


def quantum_evolve_impl(qnet: QuantumNetwork, site: int, t_max: float, dt: float) -> Tuple[List[str], Rows]:
    """Rows ``t, Re c_1, Im c_1, ..., norm, survival``."""
    c0 = SingleExcitationState.site(qnet.n, site)
    times = sample_times(t_max, dt)
    amps = excitation_trajectory(qnet, c0, times)
    # the t = 0 row is the initial state itself
    amps[0] = c0.amps
    header = ["t"]
    for i in range(1, qnet.n + 1):
        header += [f"re_c{i}", f"im_c{i}"]
    header += ["norm", "survival"]

    interleaved = np.empty((times.size, 2 * qnet.n))
    interleaved[:, 0::2] = amps.real
    interleaved[:, 1::2] = amps.imag
    norms = np.sum(np.abs(amps) ** 2, axis=1)
    survival = np.minimum(np.abs(amps[:, site - 1]) ** 2, 1.0)
    table = np.column_stack([times, interleaved, norms, survival])
    return header, table.tolist()


def verify_impl(config: Optional[NetworkConfig], seed: int, perturb_rotation: float = 0.0) -> List[OracleReport]:
    """Run the oracle suite and return one report per check.

    Raises:
        VerificationError: If any check fails (the reports are attached)
    """
    net = qnet = None
    if config is not None:
        if config.kind == CLASSICAL:
            net = config.to_network()
        else:
            qnet = config.to_quantum_network()
    reports = run_verification(net=net, qnet=qnet, seed=seed, rotation_perturbation=perturb_rotation)
    if not all_passed(reports):
        failed = sum(1 for report in reports if not report.passed)
        error = VerificationError(f"{failed} of {len(reports)} checks failed")
        error.reports = reports
        raise error
    return reports


def from_spring_mass_impl(m1: float, k1: float, m2: float, k2: float, k: float) -> Dict[str, Any]:
    pair = SpringMassPair(m1=m1, m2=m2, k1=k1, k2=k2, k=k)
    omega1, omega2, g = spring_mass_to_network(pair)
    return dump_config(NetworkConfig(kind=CLASSICAL, diag=(omega1, omega2), couplings=(g,), spring_mass=pair))


def handle_errors(func):
    """Turn a :class:`SymplectaError` into a one-line message and its exit code."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except SymplectaError as e:
            for report in getattr(e, "reports", ()):
                click.echo(report.format_line())
            click.echo(f"Error: {e}", err=True)
            sys.exit(e.exit_code)

    return wrapper


config_option = click.option(
    "--config", "config_path", required=True, type=click.Path(dir_okay=False), help="Network config (JSON)"
)
out_option = click.option("--out", default=None, type=click.Path(dir_okay=False), help="Output file (default: stdout)")


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging")
@click.pass_context
def cli(ctx, verbose):
    """symplecta - normal modes of star-coupled harmonic oscillators."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose


@cli.command("normal-modes")
@config_option
@out_option
@handle_errors
def normal_modes(config_path, out):
    """Compute normal-mode frequencies and transforms."""
    write_json(out or sys.stdout, normal_modes_impl(load_config(config_path)))


@cli.command()
@config_option
@click.option("--initial", "initial_path", required=True, type=click.Path(dir_okay=False), help="Initial state (JSON)")
@click.option("--t-max", required=True, type=float, help="Final time")
@click.option("--dt", required=True, type=float, help="Sampling interval")
@out_option
@handle_errors
def evolve(config_path, initial_path, t_max, dt, out):
    """Sample the exact classical trajectory."""
    net = load_config(config_path).to_network()
    x0 = load_initial_state(initial_path, net.n)
    header, rows = evolve_impl(net, x0, t_max, dt)
    write_csv(out or sys.stdout, header, rows, {"t_max": repr(t_max), "dt": repr(dt)})


@cli.command()
@config_option
@click.option("--stage", default="original", type=click.Choice(["original", "after-s", "after-r", "after-t"], case_sensitive=False))
@click.option("--plane", required=True, help="Two axes, e.g. q1,p1")
@click.option("--energy", "energy_level", default=1.0, type=float, help="Energy of the level set")
@click.option("--samples", default=64, type=int, help="Number of points on the curve")
@out_option
@handle_errors
def sections(config_path, stage, plane, energy_level, samples, out):
    """Emit a phase-space section of H at one pipeline stage."""
    net = load_config(config_path).to_network()
    metadata, header, rows = sections_impl(net, stage, plane, energy_level, samples)
    write_csv(out or sys.stdout, header, rows, metadata)


@cli.command("quantum-evolve")
@config_option
@click.option("--initial-site", required=True, type=int, help="Oscillator holding the excitation at t=0 (1-based)")
@click.option("--t-max", required=True, type=float, help="Final time")
@click.option("--dt", required=True, type=float, help="Sampling interval")
@out_option
@handle_errors
def quantum_evolve(config_path, initial_site, t_max, dt, out):
    """Evolve a single excitation in a quantum network."""
    qnet = load_config(config_path).to_quantum_network()
    header, rows = quantum_evolve_impl(qnet, initial_site, t_max, dt)
    write_csv(out or sys.stdout, header, rows, {"initial_site": initial_site, "t_max": repr(t_max), "dt": repr(dt)})


@cli.command()
@click.option("--config", "config_path", default=None, type=click.Path(dir_okay=False), help="Network config (JSON)")
@click.option("--seed", default=42, type=int, envvar="SYMPLECTA_SEED", show_default=True, help="Seed for randomized checks")
@click.option("--json", "as_json", is_flag=True, help="Emit the reports as a JSON document")
@click.option("--perturb-rotation", default=0.0, type=float, hidden=True)
@handle_errors
def verify(config_path, seed, as_json, perturb_rotation):
    """Check the pipeline against brute-force oracles."""
    if not as_json:
        config = load_config(config_path) if config_path else None
        for report in verify_impl(config, seed, perturb_rotation):
            click.echo(report.format_line())
        return

    try:
        config = load_config(config_path) if config_path else None
        reports = verify_impl(config, seed, perturb_rotation)
    except SymplectaError as e:
        document = {
            "success": False,
            "reports": [report.to_dict() for report in getattr(e, "reports", ())],
            "errors": [e.to_dict()],
        }
        click.echo(dump_json(document))
        sys.exit(e.exit_code)
    click.echo(dump_json({"success": True, "reports": [report.to_dict() for report in reports]}))


@cli.command("from-spring-mass")
@click.option("--m1", required=True, type=float)
@click.option("--k1", required=True, type=float)
@click.option("--m2", required=True, type=float)
@click.option("--k2", required=True, type=float)
@click.option("--k", required=True, type=float, help="Coupling spring constant")
@out_option
@handle_errors
def from_spring_mass(m1, k1, m2, k2, k, out):
    """Write the n=2 classical config of a spring-mass pair."""
    write_json(out or sys.stdout, from_spring_mass_impl(m1, k1, m2, k2, k))


def main():
    """Entry point for the CLI.

    Usage errors exit with 1 so that 2 stays reserved for unstable networks.
    """
    try:
        rv = cli.main(standalone_mode=False, obj={})
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        sys.exit(1)
    except click.ClickException as e:
        e.show()
        sys.exit(1)
    sys.exit(rv if isinstance(rv, int) else 0)


if __name__ == "__main__":
    main()
