import math

import pytest

from enantiostark import (
    ConfigError,
    Handedness,
    MoleculeSpec,
    RunConfig,
    TransitionTriple,
    UnknownPresetError,
    get_preset,
    parse_angle,
    parse_angle_grid,
    parse_grid,
)
from enantiostark._config import DEFAULT_T_GRID, DEFAULT_THETA_GRID

SAMPLE = """
# forbidden angles along a field grid
molecule.preset = propanediol-1,2
triple.alpha = 1
triple.beta = 1   # intermediate doublet
triple.gamma = 4

field.E0_grid_kV_cm = 0:20:41
basis.J_max = 10
drive.theta_grid = -180:180:5 deg
drive.theta_f_L = 90 deg
decay.kappa_MHz = 0.2
run.max_workers = 4
"""

INLINE_MOLECULE = {
    "molecule.A_MHz": "8572.05",
    "molecule.B_MHz": "3640.10",
    "molecule.C_MHz": "2790.96",
    "molecule.d_a_D": "-1.201",
    "molecule.d_b_D": "-1.916",
    "molecule.d_c_D": "-0.365",
}


def test_from_text():
    config = RunConfig.from_text(SAMPLE)
    assert config.molecule == get_preset("propanediol-1,2")
    assert config.molecule.handedness == Handedness.L
    assert config.triple == TransitionTriple(1, 1, 4)
    assert len(config.E0_grid) == 41
    assert config.E0_grid[0] == 0.0
    assert config.E0_grid[-1] == 20.0
    assert config.E0 is None
    assert config.J_max == 10
    assert config.thetas() == pytest.approx([-math.pi, -math.pi / 2, 0.0, math.pi / 2, math.pi])
    assert config.theta_f_L == pytest.approx(math.pi / 2)
    assert config.kappa == 0.2
    assert config.max_workers == 4


def test_defaults():
    config = RunConfig.from_text("")
    assert config == RunConfig()
    assert config.molecule is None
    assert config.triple is None
    assert config.J_max is None
    assert config.M_blocks == (0, 1, -1)
    assert (config.Omega1, config.Omega2, config.Delta1, config.Delta2) == (1.0, 1.0, 0.1, 0.4)
    assert config.kappa == 0.1
    assert config.probe_Omega2 == 0.1
    assert config.times() == DEFAULT_T_GRID
    assert config.times()[-1] == 10.0
    assert config.thetas() == DEFAULT_THETA_GRID
    assert len(config.thetas()) == 73


def test_inline_molecule():
    config = RunConfig.from_dict({**INLINE_MOLECULE, "molecule.name": "custom"})
    assert config.molecule == MoleculeSpec(
        A=8572.05, B=3640.10, C=2790.96, d_a=-1.201, d_b=-1.916, d_c=-0.365, name="custom"
    )


def test_parse_grid():
    assert parse_grid("0:1:3") == (0.0, 0.5, 1.0)
    assert parse_grid("2") == (2.0,)
    assert parse_grid("1.5, -2, 3e-1") == (1.5, -2.0, 0.3)
    for text in ("", "0:1", "0:1:0", "0:1:x", "a, b"):
        with pytest.raises(ValueError):
            parse_grid(text)


def test_parse_angle():
    assert parse_angle("90 deg") == pytest.approx(math.pi / 2)
    assert parse_angle("-1.25rad") == -1.25
    assert parse_angle_grid("0:180:3 deg") == pytest.approx((0.0, math.pi / 2, math.pi))
    assert parse_angle_grid("0.1, 0.2 rad") == (0.1, 0.2)
    for text in ("90", "90 grad", "deg"):
        with pytest.raises(ValueError):
            parse_angle(text)


def test_J_max_auto():
    assert RunConfig.from_text("basis.J_max = auto").J_max is None
    assert RunConfig.from_text("basis.J_max = 12").J_max == 12


def test_spectrum_blocks():
    config = RunConfig.from_text("spectrum.M = 0, 2\nspectrum.levels = 3")
    assert config.M_blocks == (0, 2)
    assert config.levels == 3


@pytest.mark.parametrize(
    ("text", "line", "key", "message"),
    [
        ("drive.theta = 1 rad\nfield.E = 3", 2, "field.E", "Unknown key"),
        ("drive.theta = 1 rad\n\ndrive.theta = 2 rad", 3, "drive.theta", "Duplicate key"),
        ("# comment\nbasis.J_max 4", 2, None, "Expected 'key = value'"),
        ("drive.theta = 1.2", 1, "drive.theta", "unit suffix"),
        ("basis.J_max = many", 1, "basis.J_max", "Invalid value"),
        ("field.E0_grid_kV_cm = 0:20", 1, "field.E0_grid_kV_cm", "start:stop:count"),
        ("triple.alpha = 1\ntriple.beta = 1\ntriple.gamma = 1", 1, "triple", "must differ"),
    ],
)
def test_errors(text, line, key, message):
    with pytest.raises(ConfigError, match=message) as exc_info:
        RunConfig.from_text(text)
    assert exc_info.value.line == line
    assert exc_info.value.key == key
    if line is not None:
        assert str(exc_info.value).startswith(f"line {line}: ")


def test_partial_molecule():
    fields = dict(INLINE_MOLECULE)
    del fields["molecule.d_b_D"]
    with pytest.raises(ConfigError, match="Missing key") as exc_info:
        RunConfig.from_dict(fields)
    assert exc_info.value.key == "molecule.d_b_D"


def test_partial_triple():
    with pytest.raises(ConfigError, match="triple.gamma: Missing key"):
        RunConfig.from_text("triple.alpha = 1\ntriple.beta = 2")


def test_invalid_molecule():
    fields = {**INLINE_MOLECULE, "molecule.A_MHz": "-1"}
    with pytest.raises(ConfigError) as exc_info:
        RunConfig.from_dict(fields)
    assert exc_info.value.key == "molecule"


def test_unknown_preset():
    with pytest.raises(UnknownPresetError) as exc_info:
        RunConfig.from_text("molecule.preset = glycidol")
    assert exc_info.value.name == "glycidol"
    assert "propanediol-1,2" in str(exc_info.value)
    assert exc_info.value.key == "molecule.preset"


def test_preset_with_inline_constants():
    text = "molecule.preset = propanediol-1,2\nmolecule.B_MHz = 3000"
    with pytest.raises(ConfigError, match="mutually exclusive") as exc_info:
        RunConfig.from_text(text)
    assert exc_info.value.line == 2
    assert exc_info.value.key == "molecule.B_MHz"


def test_text_round_trip():
    config = RunConfig.from_text(SAMPLE)
    assert RunConfig.from_text(config.to_text()) == config
    assert config.to_text().startswith("molecule.preset = propanediol-1,2\n")


def test_dict_round_trip_inline_molecule():
    config = RunConfig(
        molecule=MoleculeSpec(A=3000.0, B=2000.0, C=1000.0, d_a=0.5, d_b=1.0, d_c=1.5),
        triple=TransitionTriple(1, 3, 2),
        E0=12.5,
        theta=0.1,
        t_grid=(0.0, 0.5, 2.0),
        J_max=None,
        output="out.csv",
    )
    fields = config.to_dict()
    assert fields["molecule.A_MHz"] == "3000.0"
    assert "molecule.name" not in fields
    assert fields["basis.J_max"] == "auto"
    assert fields["drive.theta"] == "0.1 rad"
    assert RunConfig.from_dict(fields) == config
