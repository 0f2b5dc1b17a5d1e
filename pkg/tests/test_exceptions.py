import pytest

from enantiostark import (
    ArgumentError,
    ConfigError,
    ConvergenceError,
    EigensolverError,
    NumericalError,
    SimulationError,
    SteadyStateError,
    UnknownPresetError,
    VanishingDipoleError,
)


def test_config_error():
    error = ConfigError("Missing key", key="molecule.preset")
    assert error.key == "molecule.preset"
    assert error.line is None
    assert str(error) == "molecule.preset: Missing key"


def test_config_error_with_line():
    error = ConfigError("Unknown key", key="drive.phi", line=7)
    assert error.line == 7
    assert str(error) == "line 7: drive.phi: Unknown key"


def test_unknown_preset_error():
    error = UnknownPresetError("glycidol", ["propanediol-1,2"])
    assert isinstance(error, ConfigError)
    assert error.name == "glycidol"
    assert error.available == ("propanediol-1,2",)
    assert error.key == "molecule.preset"
    assert str(error) == (
        "molecule.preset: Unknown molecule preset 'glycidol', available presets: propanediol-1,2"
    )


def test_eigensolver_error():
    error = EigensolverError(M=1, E0=10.0, J_max=12, reason="did not converge")
    assert isinstance(error, NumericalError)
    assert (error.M, error.E0, error.J_max) == (1, 10.0, 12)
    assert str(error) == (
        "Diagonalization of block M=1 failed (E0=10.0 kV/cm, J_max=12): did not converge"
    )


def test_convergence_error():
    error = ConvergenceError(M=0, E0=20.0, limit=40)
    assert error.limit == 40
    assert str(error) == "Energies of block M=0 at E0=20.0 kV/cm did not converge up to J_max=40"


def test_vanishing_dipole_error():
    error = VanishingDipoleError("a_plus", 1e-15)
    assert error.name == "a_plus"
    assert error.magnitude == 1e-15
    assert str(error) == "Transition dipole vanishes: |a_plus| = 1e-15 Debye"


def test_steady_state_error():
    assert "requires dissipation" in str(SteadyStateError(kernel_dim=4))
    assert "requires dissipation" not in str(SteadyStateError(kernel_dim=0))


def test_steady_state_error_residual():
    error = SteadyStateError(kernel_dim=1, residual=0.25)
    assert error.kernel_dim == 1
    assert error.residual == 0.25
    assert str(error) == "Inaccurate steady state: residual |L vec(rho)| = 0.25"
    assert SteadyStateError(kernel_dim=2).residual is None


@pytest.mark.parametrize(
    "error",
    [
        ArgumentError("message"),
        ConfigError("message"),
        SteadyStateError(2),
        ConvergenceError(0, 0.0, 40),
    ],
)
def test_base_class(error):
    assert isinstance(error, SimulationError)


def test_argument_error_is_value_error():
    with pytest.raises(ValueError, match="message"):
        raise ArgumentError("message")
