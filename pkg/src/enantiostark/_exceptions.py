from __future__ import annotations

from typing import Sequence


class SimulationError(Exception):
    """Base exception for all errors raised by enantiostark."""


class ArgumentError(SimulationError, ValueError):
    """
    Raised when a function is called outside of its contract.

    Examples are negative angular momenta, a basis truncation below |M|, empty grids or a missing
    probe beam. The inputs are wrong, not the numerics.
    """


class ConfigError(SimulationError):
    """
    Raised when a run configuration cannot be parsed or is incomplete.

    The offending key and the line number in the configuration text are attached if known.
    """

    def __init__(self, message: str, *, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line

        prefix = ""
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"{key}: "
        super().__init__(prefix + message)


class UnknownPresetError(ConfigError):
    """Raised when a molecule preset name is not registered."""

    def __init__(self, name: str, available: Sequence[str]):
        self.name = name
        self.available = tuple(available)

        super().__init__(
            f"Unknown molecule preset {name!r}, available presets: {', '.join(self.available)}",
            key="molecule.preset",
        )


class NumericalError(SimulationError):
    """Base exception for failures of the numerical pipeline."""


class EigensolverError(NumericalError):
    """Raised when the diagonalization of a Stark block fails."""

    def __init__(self, M: int, E0: float, J_max: int, reason: str | None = None):
        self.M = M
        self.E0 = E0
        self.J_max = J_max

        super().__init__(
            f"Diagonalization of block M={M} failed (E0={E0} kV/cm, J_max={J_max})"
            + (f": {reason}" if reason else "")
        )


class ConvergenceError(NumericalError):
    """Raised when the basis truncation does not converge within the allowed J_max."""

    def __init__(self, M: int, E0: float, limit: int):
        self.M = M
        self.E0 = E0
        self.limit = limit

        super().__init__(
            f"Energies of block M={M} at E0={E0} kV/cm did not converge up to J_max={limit}"
        )


class DegeneracyError(NumericalError):
    """Raised when the M=+1 and M=-1 members of the intermediate doublet are not degenerate."""


class VanishingDipoleError(NumericalError):
    """
    Raised when a transition dipole of the cascade vanishes.

    The forbidden polarization angle is undefined for such a level triple.
    """

    def __init__(self, name: str, magnitude: float):
        self.name = name
        self.magnitude = magnitude

        super().__init__(f"Transition dipole vanishes: |{name}| = {magnitude:.3g} Debye")


class SteadyStateError(NumericalError):
    """Raised when the Liouvillian does not have a unique or accurate steady state."""

    def __init__(self, kernel_dim: int, residual: float | None = None):
        self.kernel_dim = kernel_dim
        self.residual = residual

        if residual is not None:
            super().__init__(f"Inaccurate steady state: residual |L vec(rho)| = {residual:.3g}")
            return
        super().__init__(
            f"Non-unique steady state: Liouvillian kernel has dimension {kernel_dim}"
            + (", steady state requires dissipation" if kernel_dim > 1 else "")
        )
