"""
Closed four-level dynamics of the cascade in the rotating frame.

Basis order is (alpha, beta+, beta-, gamma). Frequencies are stored as plain frequencies nu in MHz
and times in microseconds, the propagator is exp(-2 pi i H t).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from scipy import linalg

from enantiostark._exceptions import ArgumentError, NumericalError
from enantiostark._rotor import DEBYE_KV_CM_MHZ
from enantiostark._selection import CouplingSet
from enantiostark._utils import map_ordered

logger = logging.getLogger(__name__)

ALPHA, BETA_PLUS, BETA_MINUS, GAMMA = range(4)

#: Eigenvalues closer than this (MHz) are grouped for the infinite-time average
DEGENERACY_TOL_MHZ = 1e-9

#: Allowed deviation of the initial state norm from 1
NORM_TOL = 1e-10


@dataclass(frozen=True)
class BeamDrive:
    """
    Parameters of the two beams in the rotating frame.

    The beam phases are absorbed into the basis, so only the beam-2 angle `theta` and the
    forbidden angle `theta_f` of the simulated enantiomer remain.
    """

    Omega1: float  #: Rabi frequency of beam 1 in MHz
    Omega2: float  #: Rabi frequency of beam 2 in MHz
    Delta1: float  #: One-photon detuning in MHz
    Delta2: float  #: Two-photon detuning increment in MHz
    theta: float  #: Polarization angle of beam 2 in rad
    theta_f: float  #: Forbidden angle of the simulated enantiomer in rad

    def __post_init__(self):
        for name in ("Omega1", "Omega2", "Delta1", "Delta2", "theta", "theta_f"):
            if not math.isfinite(getattr(self, name)):
                raise ArgumentError(f"{name} must be finite, got {getattr(self, name)}")
        if self.Omega1 < 0 or self.Omega2 < 0:
            raise ArgumentError(
                f"Rabi frequencies must be non-negative, got {self.Omega1}, {self.Omega2}"
            )

    def mirrored(self) -> BeamDrive:
        """Same beams acting on the opposite enantiomer."""
        return replace(self, theta_f=-self.theta_f)

    def with_theta(self, theta: float) -> BeamDrive:
        return replace(self, theta=theta)

    @classmethod
    def from_couplings(
        cls,
        couplings: CouplingSet,
        *,
        field1: float,
        field2: float,
        Delta1: float,
        Delta2: float,
        theta: float,
    ) -> BeamDrive:
        """
        Drive of beams with amplitudes `field1`, `field2` (kV/cm) on the cascade of `couplings`.
        """
        Omega1, Omega2 = rabi_frequencies(couplings, field1, field2)
        return cls(
            Omega1=Omega1,
            Omega2=Omega2,
            Delta1=Delta1,
            Delta2=Delta2,
            theta=theta,
            theta_f=couplings.theta_f,
        )


@dataclass(frozen=True)
class FourLevelState:
    """Amplitudes of the four cascade levels."""

    c_alpha: complex
    c_beta_plus: complex
    c_beta_minus: complex
    c_gamma: complex

    @classmethod
    def ground(cls) -> FourLevelState:
        return cls(1.0 + 0j, 0j, 0j, 0j)

    @classmethod
    def from_array(cls, amplitudes: np.ndarray) -> FourLevelState:
        if np.shape(amplitudes) != (4,):
            raise ArgumentError(f"Expected 4 amplitudes, got shape {np.shape(amplitudes)}")
        return cls(*(complex(value) for value in amplitudes))

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.c_alpha, self.c_beta_plus, self.c_beta_minus, self.c_gamma], dtype=complex
        )

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    @property
    def P_gamma(self) -> float:
        return abs(self.c_gamma) ** 2


@dataclass(frozen=True)
class PbarRow:
    """Infinite-time averaged population of |gamma> of both enantiomers at one beam-2 angle."""

    theta: float  #: Polarization angle of beam 2 in rad
    pbar_L: float  #: Left-handed enantiomer
    pbar_R: float  #: Right-handed enantiomer


def rabi_frequencies(couplings: CouplingSet, field1: float, field2: float) -> tuple[float, float]:
    """
    Rabi frequencies sqrt(2) |E1 a_+| and sqrt(2) |E2 b_+| in MHz.

    Args:
        couplings: Coupling coefficients of the cascade
        field1: Amplitude of beam 1 in kV/cm
        field2: Amplitude of beam 2 in kV/cm
    """
    if field1 < 0 or field2 < 0:
        raise ArgumentError(f"Beam amplitudes must be non-negative, got {field1}, {field2}")
    scale = math.sqrt(2) * DEBYE_KV_CM_MHZ
    return scale * field1 * abs(couplings.a_plus), scale * field2 * abs(couplings.b_plus)


def build_rotating_hamiltonian(drive: BeamDrive) -> np.ndarray:
    """Rotating-frame Hamiltonian in MHz, basis (alpha, beta+, beta-, gamma)."""
    H = np.diag([0.0, drive.Delta1, drive.Delta1, drive.Delta1 + drive.Delta2]).astype(complex)
    H[ALPHA, BETA_PLUS] = H[BETA_PLUS, ALPHA] = 0.5 * drive.Omega1
    H[ALPHA, BETA_MINUS] = H[BETA_MINUS, ALPHA] = 0.5 * drive.Omega1
    H[GAMMA, BETA_PLUS] = 0.5 * drive.Omega2 * np.exp(1j * drive.theta)
    H[GAMMA, BETA_MINUS] = -0.5 * drive.Omega2 * np.exp(1j * drive.theta_f)
    H[BETA_PLUS, GAMMA] = np.conj(H[GAMMA, BETA_PLUS])
    H[BETA_MINUS, GAMMA] = np.conj(H[GAMMA, BETA_MINUS])
    return H


def _eigh(H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return linalg.eigh(H)
    except (linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f"Diagonalization of the rotating-frame Hamiltonian: {e}") from e


def _check_initial(initial: FourLevelState) -> np.ndarray:
    c0 = initial.as_array()
    if abs(np.linalg.norm(c0) - 1) > NORM_TOL:
        raise ArgumentError(f"Initial state must be normalized, got norm {np.linalg.norm(c0)}")
    return c0


def _check_times(t_grid: Sequence[float]) -> np.ndarray:
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1:
        raise ArgumentError("Time grid must be one-dimensional")
    if len(t) and (t[0] < 0 or np.any(np.diff(t) < 0)):
        raise ArgumentError("Time grid must be non-negative and ascending")
    return t


def _propagate(drive: BeamDrive, initial: FourLevelState, t_grid: Sequence[float]) -> np.ndarray:
    c0 = _check_initial(initial)
    t = _check_times(t_grid)
    energies, V = _eigh(build_rotating_hamiltonian(drive))
    overlaps = V.conj().T @ c0
    phases = np.exp(-2j * np.pi * np.outer(t, energies))
    amplitudes = (phases * overlaps) @ V.T
    amplitudes[t == 0] = c0
    return amplitudes


def evolve(
    drive: BeamDrive,
    initial: FourLevelState,
    t_grid: Sequence[float],
) -> list[FourLevelState]:
    """
    Propagate the initial state through the time grid (microseconds).

    Raises:
        ArgumentError: If the initial state is not normalized or the grid is not ascending from 0
    """
    return [FourLevelState.from_array(row) for row in _propagate(drive, initial, t_grid)]


def gamma_population(
    drive: BeamDrive,
    initial: FourLevelState,
    t_grid: Sequence[float],
) -> np.ndarray:
    """Population P_gamma(t) of the final level on the time grid (microseconds)."""
    return np.abs(_propagate(drive, initial, t_grid)[:, GAMMA]) ** 2


def time_averaged_P_gamma(drive: BeamDrive, initial: FourLevelState) -> float:
    """
    Infinite-time average of P_gamma(t).

    Cross terms between eigenvalues that differ by more than `DEGENERACY_TOL_MHZ` average out, so
    the average is the sum of |<gamma| P_k |psi_0>|^2 over the eigenprojectors P_k of H.
    """
    c0 = _check_initial(initial)
    energies, V = _eigh(build_rotating_hamiltonian(drive))
    contributions = V[GAMMA] * (V.conj().T @ c0)
    boundaries = np.flatnonzero(np.diff(energies) > DEGENERACY_TOL_MHZ) + 1
    return float(
        sum(abs(group.sum()) ** 2 for group in np.split(contributions, boundaries))
    )


def pbar_sweep(
    drive: BeamDrive,
    initial: FourLevelState,
    theta_grid: Sequence[float],
    *,
    max_workers: int | None = None,
) -> list[PbarRow]:
    """
    Averaged final-level populations of both enantiomers over beam-2 angles.

    `drive` describes the left-handed enantiomer, its `theta` is replaced by the grid values.

    Raises:
        ArgumentError: If the grid is empty
    """
    if len(theta_grid) == 0:
        raise ArgumentError("Angle grid must not be empty")
    logger.info("Sweep %d beam-2 angles for the averaged final-level population", len(theta_grid))

    def evaluate(theta: float) -> PbarRow:
        left = drive.with_theta(theta)
        return PbarRow(
            theta=float(theta),
            pbar_L=time_averaged_P_gamma(left, initial),
            pbar_R=time_averaged_P_gamma(left.mirrored(), initial),
        )

    return map_ordered(evaluate, theta_grid, max_workers=max_workers)
