"""Utility functions for reading network configurations and command arguments."""

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from .dynamics import PhaseState, SectionPlane
from .errors import ConfigError, SymplectaError
from .pipeline import OscillatorNetwork, SpringMassPair, Stage, from_spring_mass
from .quantum import QuantumNetwork

logger = logging.getLogger(__name__)

CLASSICAL = "classical"
QUANTUM = "quantum"

_FIELDS = {
    CLASSICAL: {"kind", "n", "diag_freq", "couplings", "spring_mass"},
    QUANTUM: {"kind", "n", "g_diag", "g_couple"},
}
_SPRING_FIELDS = ("m1", "m2", "k1", "k2", "k")
_AXIS = re.compile(r"^\s*([qp])(\d+)(?:_[srt])?\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class NetworkConfig:
    """Parsed network description.

    Attributes:
        kind: "classical" or "quantum"
        diag: ω_{i,i} (classical) or g_{i,i} (quantum)
        couplings: ω_{1,i} or g_{1,i}, i = 2..n
        spring_mass: The spring-mass pair the classical parameters came from, if any
    """

    kind: str
    diag: Tuple[float, ...]
    couplings: Tuple[float, ...]
    spring_mass: Optional[SpringMassPair] = None

    @property
    def n(self) -> int:
        return len(self.diag)

    def to_network(self) -> OscillatorNetwork:
        if self.kind != CLASSICAL:
            raise ConfigError(f"this command needs a classical config, got kind {self.kind!r}")
        return OscillatorNetwork(diag_freq=self.diag, couplings=self.couplings)

    def to_quantum_network(self) -> QuantumNetwork:
        if self.kind != QUANTUM:
            raise ConfigError(f"this command needs a quantum config, got kind {self.kind!r}")
        return QuantumNetwork(g_diag=self.diag, g_couple=self.couplings)


def _numbers(document: Dict[str, Any], key: str) -> Tuple[float, ...]:
    values = document.get(key)
    if not isinstance(values, list):
        raise ConfigError(f"field {key!r} must be a list of numbers")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise ConfigError(f"field {key!r} must contain only numbers")
    return tuple(float(v) for v in values)


def _reject_unknown(document: Dict[str, Any], allowed, where: str) -> None:
    unknown = sorted(set(document) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown field(s) in {where}: {', '.join(unknown)}")


def parse_config(document: Any) -> NetworkConfig:
    """Validate a config document and return a :class:`NetworkConfig`.

    Args:
        document: Decoded JSON object

    Returns:
        The parsed config; the parameters are also checked by building the
        corresponding network

    Raises:
        ConfigError: On unknown fields, inconsistent lengths or a missing or
            ambiguous parameter source
    """
    if not isinstance(document, dict):
        raise ConfigError("config must be a JSON object")
    kind = document.get("kind")
    if kind not in _FIELDS:
        raise ConfigError(f"field 'kind' must be 'classical' or 'quantum', got {kind!r}")
    _reject_unknown(document, _FIELDS[kind], f"{kind} config")

    spring_mass = None
    if kind == CLASSICAL:
        explicit = "diag_freq" in document or "couplings" in document
        if explicit and "spring_mass" in document:
            raise ConfigError("give either diag_freq/couplings or spring_mass, not both")
        if "spring_mass" in document:
            block = document["spring_mass"]
            if not isinstance(block, dict):
                raise ConfigError("field 'spring_mass' must be an object")
            _reject_unknown(block, _SPRING_FIELDS, "spring_mass")
            missing = [name for name in _SPRING_FIELDS if name not in block]
            if missing:
                raise ConfigError(f"spring_mass is missing {', '.join(missing)}")
            try:
                spring_mass = SpringMassPair(**{name: float(block[name]) for name in _SPRING_FIELDS})
            except (TypeError, ValueError) as e:
                raise ConfigError(f"invalid spring_mass block: {e}") from e
            omega1, omega2, g = from_spring_mass(spring_mass)
            diag, couplings = (omega1, omega2), (g,)
        else:
            diag, couplings = _numbers(document, "diag_freq"), _numbers(document, "couplings")
    else:
        diag, couplings = _numbers(document, "g_diag"), _numbers(document, "g_couple")

    if "n" in document:
        n = document["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n != len(diag):
            raise ConfigError(f"field 'n' = {n!r} does not match {len(diag)} diagonal entries")
    if len(couplings) != len(diag) - 1:
        raise ConfigError(f"expected {len(diag) - 1} couplings for {len(diag)} oscillators, got {len(couplings)}")

    config = NetworkConfig(kind=kind, diag=diag, couplings=couplings, spring_mass=spring_mass)
    try:
        config.to_network() if kind == CLASSICAL else config.to_quantum_network()
    except SymplectaError as e:
        raise ConfigError(str(e)) from e
    logger.debug("parsed %s config with n=%d", kind, config.n)
    return config


def load_json(path: Union[str, Path], what: str = "config") -> Any:
    try:
        with open(path, encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as e:
        raise ConfigError(f"cannot read {what} {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {what} {path}: {e}") from e


def load_config(path: Union[str, Path]) -> NetworkConfig:
    return parse_config(load_json(path))


def dump_config(config: NetworkConfig) -> Dict[str, Any]:
    """Render a config as the JSON document :func:`parse_config` accepts."""
    if config.kind == CLASSICAL:
        return {
            "kind": CLASSICAL,
            "n": config.n,
            "diag_freq": list(config.diag),
            "couplings": list(config.couplings),
        }
    return {"kind": QUANTUM, "n": config.n, "g_diag": list(config.diag), "g_couple": list(config.couplings)}


def load_initial_state(path: Union[str, Path], n: int) -> PhaseState:
    """Read ``{"q": [...], "p": [...]}`` and check it has ``n`` oscillators."""
    document = load_json(path, what="initial state")
    if not isinstance(document, dict):
        raise ConfigError("initial state must be a JSON object")
    _reject_unknown(document, ("q", "p"), "initial state")
    state = PhaseState(q=_numbers(document, "q"), p=_numbers(document, "p"))
    if state.n != n:
        raise ConfigError(f"initial state has {state.n} oscillators, config has {n}")
    return state


def parse_stage(value: str) -> Stage:
    """Parse a stage name such as "original", "after-s" or "after_T".

    Raises:
        ConfigError: For an unknown stage name
    """
    normalized = value.strip().lower().replace("-", "_")
    for stage in Stage:
        if stage.value.lower() == normalized:
            return stage
    raise ConfigError(f"unknown stage {value!r}; expected original, after-s, after-r or after-t")


def parse_plane(value: str, n: int) -> SectionPlane:
    """Parse a plane such as "q1,p2" into 0-based phase-space axes.

    Axes ``q_i`` map to ``i-1`` and ``p_i`` to ``n+i-1``. A stage suffix
    (``q1_T``) is accepted and ignored.

    Raises:
        ConfigError: For malformed axes or indices outside 1..n
    """
    parts = value.split(",")
    if len(parts) != 2:
        raise ConfigError(f"plane must name two axes like 'q1,p1', got {value!r}")
    axes = []
    for part in parts:
        match = _AXIS.match(part)
        if not match:
            raise ConfigError(f"malformed axis {part!r}; expected q<i> or p<i>")
        index = int(match.group(2))
        if not 1 <= index <= n:
            raise ConfigError(f"axis {part.strip()!r} is outside 1..{n}")
        offset = 0 if match.group(1).lower() == "q" else n
        axes.append(offset + index - 1)
    if axes[0] == axes[1]:
        raise ConfigError(f"plane {value!r} repeats an axis")
    return SectionPlane(first=axes[0], second=axes[1], n=n)
