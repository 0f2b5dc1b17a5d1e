"""
Driven four-level cascade with spontaneous emission.

Density matrices are vectorized column by column, so vec(A X B) = (B^T kron A) vec(X).
The Liouvillian is the generator in 1/us, frequencies in MHz enter multiplied by 2 pi.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from enantiostark._dynamics import (
    ALPHA,
    BETA_MINUS,
    BETA_PLUS,
    GAMMA,
    BeamDrive,
    FourLevelState,
    build_rotating_hamiltonian,
)
from enantiostark._exceptions import ArgumentError, NumericalError, SteadyStateError
from enantiostark._utils import map_ordered

logger = logging.getLogger(__name__)

#: Spontaneous emission channels (lower level, upper level), all with the common rate kappa
DECAY_CHANNELS = (
    (BETA_PLUS, GAMMA),
    (BETA_MINUS, GAMMA),
    (ALPHA, GAMMA),
    (ALPHA, BETA_PLUS),
    (ALPHA, BETA_MINUS),
)

#: Singular values below this fraction of the largest one span the kernel of the Liouvillian
KERNEL_RTOL = 1e-10

#: Accepted |L vec(rho)| of the normalized steady state relative to the largest singular value
RESIDUAL_RTOL = 1e-9

_IDENTITY = np.eye(4)


@dataclass(frozen=True)
class DecayModel:
    kappa: float  #: Common spontaneous emission rate in MHz

    def __post_init__(self):
        if not np.isfinite(self.kappa) or self.kappa < 0:
            raise ArgumentError(f"Decay rate must be non-negative, got {self.kappa}")


@dataclass(frozen=True, eq=False)
class DensityMatrix4:
    """Density matrix over the basis (alpha, beta+, beta-, gamma)."""

    matrix: np.ndarray

    def __post_init__(self):
        if np.shape(self.matrix) != (4, 4):
            raise ArgumentError(f"Expected 4x4 density matrix, got shape {np.shape(self.matrix)}")

    @classmethod
    def from_state(cls, state: FourLevelState) -> DensityMatrix4:
        c = state.as_array()
        return cls(np.outer(c, c.conj()))

    @classmethod
    def from_vector(cls, vector: np.ndarray) -> DensityMatrix4:
        return cls(np.reshape(vector, (4, 4), order="F"))

    def as_vector(self) -> np.ndarray:
        return np.reshape(self.matrix, 16, order="F")

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))

    def hermiticity_error(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def min_eigenvalue(self) -> float:
        return float(linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T)).min())


def _transition(lower: int, upper: int) -> np.ndarray:
    operator = np.zeros((4, 4))
    operator[lower, upper] = 1.0
    return operator


def build_liouvillian(drive: BeamDrive, decay: DecayModel) -> np.ndarray:
    """
    Liouvillian L in 1/us with d vec(rho)/dt = L vec(rho).

    Contains the commutator with the rotating-frame Hamiltonian and one Lindblad dissipator
    kappa (2 c rho c^+ - c^+ c rho - rho c^+ c) / 2 per decay channel.
    """
    H = build_rotating_hamiltonian(drive)
    generator = -1j * (np.kron(_IDENTITY, H) - np.kron(H.T, _IDENTITY))
    for lower, upper in DECAY_CHANNELS:
        c = _transition(lower, upper)
        cdc = c.T @ c
        generator += decay.kappa * (
            np.kron(c.conj(), c) - 0.5 * np.kron(_IDENTITY, cdc) - 0.5 * np.kron(cdc.T, _IDENTITY)
        )
    return 2 * np.pi * generator


def steady_state(liouvillian: np.ndarray) -> DensityMatrix4:
    """
    Stationary density matrix from the kernel of the Liouvillian.

    Raises:
        SteadyStateError: If the kernel is not one-dimensional or the kernel vector does not solve
            L vec(rho) = 0 after normalization
    """
    try:
        _, singular_values, Vh = linalg.svd(liouvillian)
    except (linalg.LinAlgError, ValueError) as e:
        raise NumericalError(f"Singular value decomposition of the Liouvillian failed: {e}") from e
    kernel_dim = int(np.count_nonzero(singular_values <= KERNEL_RTOL * singular_values[0]))
    if kernel_dim != 1:
        raise SteadyStateError(kernel_dim)

    rho = np.reshape(Vh[-1].conj(), (4, 4), order="F")
    # the kernel vector carries an arbitrary global phase, the trace fixes it
    rho = rho / np.trace(rho)
    rho = 0.5 * (rho + rho.conj().T)
    residual = float(np.linalg.norm(liouvillian @ rho.ravel(order="F")))
    if not residual <= RESIDUAL_RTOL * singular_values[0]:
        raise SteadyStateError(kernel_dim, residual=residual)
    logger.debug("Steady state residual %.2e", residual)
    return DensityMatrix4(rho)


def _probe_operator(drive: BeamDrive) -> np.ndarray:
    # d_+ = exp(-i theta_f) |beta-><gamma| - exp(-i theta) |beta+><gamma|
    operator = np.zeros((4, 4), dtype=complex)
    operator[BETA_MINUS, GAMMA] = np.exp(-1j * drive.theta_f)
    operator[BETA_PLUS, GAMMA] = -np.exp(-1j * drive.theta)
    return operator


def absorption(drive: BeamDrive, decay: DecayModel) -> float:
    """
    Steady-state absorption Im[Tr(rho_ss d_+)] / (Omega2 / 2) of beam 2 (arbitrary units).

    Raises:
        ArgumentError: If beam 2 is absent (Omega2 = 0) or there is no decay (kappa = 0)
        SteadyStateError: If the steady state is not unique
    """
    if drive.Omega2 == 0:
        raise ArgumentError("Absorption of beam 2 requires Omega2 > 0")
    if decay.kappa == 0:
        raise ArgumentError("Decay rate kappa = 0: steady state requires dissipation")
    rho = steady_state(build_liouvillian(drive, decay))
    return float(np.trace(rho.matrix @ _probe_operator(drive)).imag / (0.5 * drive.Omega2))


@dataclass(frozen=True)
class AbsorptionRow:
    """Absorption of beam 2 by both enantiomers at one beam-2 angle."""

    theta: float  #: Polarization angle of beam 2 in rad
    A_L: float  #: Left-handed enantiomer
    A_R: float  #: Right-handed enantiomer


def absorption_sweep(
    drive: BeamDrive,
    decay: DecayModel,
    theta_grid: Sequence[float],
    *,
    max_workers: int | None = None,
) -> list[AbsorptionRow]:
    """
    Absorption of beam 2 by both enantiomers over beam-2 angles.

    `drive` describes the left-handed enantiomer, its `theta` is replaced by the grid values.

    Raises:
        ArgumentError: If the grid is empty
    """
    if len(theta_grid) == 0:
        raise ArgumentError("Angle grid must not be empty")
    logger.info("Sweep %d beam-2 angles for the steady-state absorption", len(theta_grid))

    def evaluate(theta: float) -> AbsorptionRow:
        left = drive.with_theta(theta)
        return AbsorptionRow(
            theta=float(theta),
            A_L=absorption(left, decay),
            A_R=absorption(left.mirrored(), decay),
        )

    return map_ordered(evaluate, theta_grid, max_workers=max_workers)
