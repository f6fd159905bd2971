"""Unit tests for config parsing and argument helpers."""

import math

import pytest

from symplecta.config import (
    dump_config,
    load_config,
    load_initial_state,
    parse_config,
    parse_plane,
    parse_stage,
)
from symplecta.errors import ConfigError
from symplecta.pipeline import Stage


@pytest.mark.unit
class TestParseConfig:
    """Test parse_config."""

    def test_classical(self):
        """Test a classical config with explicit parameters."""
        config = parse_config({"kind": "classical", "n": 2, "diag_freq": [1, 1], "couplings": [-0.5]})
        assert config.n == 2
        assert config.to_network().couplings.tolist() == [-0.5]

    def test_n_optional(self):
        """Test that n may be omitted."""
        config = parse_config({"kind": "quantum", "g_diag": [1.0, 2.0, 3.0], "g_couple": [0.1, 0.2]})
        assert config.to_quantum_network().n == 3

    def test_spring_mass_block(self):
        """Test that a spring_mass block yields the n = 2 parameters."""
        config = parse_config({"kind": "classical", "spring_mass": {"m1": 1, "m2": 1, "k1": 1, "k2": 1, "k": 1}})
        assert config.diag == pytest.approx((math.sqrt(2.0), math.sqrt(2.0)))
        assert config.couplings[0] == pytest.approx(-1.0 / math.sqrt(2.0))
        assert config.spring_mass is not None

    @pytest.mark.parametrize(
        "document",
        [
            {"kind": "classical", "diag_freq": [1.0, 1.0], "couplings": [0.0], "extra": 1},
            {"kind": "quantum", "g_diag": [1.0], "g_couple": [], "diag_freq": [1.0]},
            {"kind": "classical", "n": 3, "diag_freq": [1.0, 1.0], "couplings": [0.0]},
            {"kind": "classical", "diag_freq": [1.0, 1.0], "couplings": [0.0, 0.0]},
            {"kind": "classical", "diag_freq": [1.0, 1.0]},
            {"kind": "classical", "diag_freq": [1.0, "x"], "couplings": [0.0]},
            {"kind": "classical", "diag_freq": [1.0, -1.0], "couplings": [0.0]},
            {
                "kind": "classical",
                "diag_freq": [1.0, 1.0],
                "couplings": [0.0],
                "spring_mass": {"m1": 1, "m2": 1, "k1": 1, "k2": 1, "k": 0},
            },
            {"kind": "classical", "spring_mass": {"m1": 1, "m2": 1, "k1": 1, "k2": 1}},
            {"kind": "classical", "spring_mass": {"m1": 0, "m2": 1, "k1": 1, "k2": 1, "k": 1}},
            {"kind": "mechanical", "diag_freq": [1.0, 1.0], "couplings": [0.0]},
            [1.0, 2.0],
        ],
    )
    def test_invalid(self, document):
        """Test that malformed documents raise ConfigError."""
        with pytest.raises(ConfigError):
            parse_config(document)

    def test_config_error_exit_code(self):
        """Test that parse errors map to exit code 1."""
        with pytest.raises(ConfigError) as excinfo:
            parse_config({})
        assert excinfo.value.exit_code == 1

    def test_dump_round_trip(self):
        """Test that dump_config output parses back to the same parameters."""
        config = parse_config({"kind": "classical", "diag_freq": [1.5, 0.5, 2.0], "couplings": [-0.1, -0.2]})
        again = parse_config(dump_config(config))
        assert again.diag == config.diag
        assert again.couplings == config.couplings

    def test_load_from_file(self, write_json):
        """Test reading a config file."""
        path = write_json("net.json", {"kind": "quantum", "g_diag": [1.0, 1.0], "g_couple": [-0.1]})
        assert load_config(path).kind == "quantum"

    def test_invalid_json(self, tmp_path):
        """Test that a syntax error is a ConfigError."""
        path = tmp_path / "broken.json"
        path.write_text("{kind: classical")
        with pytest.raises(ConfigError):
            load_config(str(path))

    def test_missing_file(self, tmp_path):
        """Test that an unreadable file is a ConfigError."""
        with pytest.raises(ConfigError):
            load_config(str(tmp_path / "absent.json"))


@pytest.mark.unit
class TestInitialState:
    """Test load_initial_state."""

    def test_valid(self, write_json):
        """Test a matching initial state."""
        state = load_initial_state(write_json("x0.json", {"q": [1.0, 0.0], "p": [0.0, 0.5]}), 2)
        assert state.p.tolist() == [0.0, 0.5]

    def test_dimension_mismatch(self, write_json):
        """Test that the state must match the network size."""
        with pytest.raises(ConfigError):
            load_initial_state(write_json("x0.json", {"q": [1.0], "p": [0.0]}), 2)

    def test_unknown_field(self, write_json):
        """Test that unknown fields are rejected."""
        with pytest.raises(ConfigError):
            load_initial_state(write_json("x0.json", {"q": [1.0, 0.0], "p": [0.0, 0.0], "t": 0}), 2)


@pytest.mark.unit
class TestArgumentParsing:
    """Test parse_stage and parse_plane."""

    @pytest.mark.parametrize(
        "value,expected",
        [
            ("original", Stage.ORIGINAL),
            ("after-s", Stage.AFTER_S),
            ("after_R", Stage.AFTER_R),
            ("AFTER-T", Stage.AFTER_T),
        ],
    )
    def test_parse_stage(self, value, expected):
        """Test the accepted stage spellings."""
        assert parse_stage(value) is expected

    def test_parse_stage_unknown(self):
        """Test an unknown stage."""
        with pytest.raises(ConfigError):
            parse_stage("after-x")

    def test_parse_plane(self):
        """Test q/p axes map to 0-based indices."""
        plane = parse_plane("q1,p2", 3)
        assert (plane.first, plane.second) == (0, 4)
        assert parse_plane(" p3 , q2_T", 3).first == 5

    @pytest.mark.parametrize("value", ["q1", "q1,q1", "q0,p1", "q4,p1", "x1,p1", "q1,p1,p2"])
    def test_parse_plane_invalid(self, value):
        """Test malformed planes."""
        with pytest.raises(ConfigError):
            parse_plane(value, 3)
