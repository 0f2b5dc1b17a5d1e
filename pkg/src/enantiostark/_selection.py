"""
Two-photon cascade |alpha,0> -> |beta,+-1> -> |gamma,0> driven by beam 1 (alpha-beta) and beam 2
(beta-gamma), and the polarization angle of beam 2 that forbids it.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Sequence

import numpy as np

from enantiostark._exceptions import ArgumentError, DegeneracyError, VanishingDipoleError
from enantiostark._rotor import Handedness, MoleculeSpec, dipole_pm_matrix
from enantiostark._stark import StarkEigensystem, converge_J_max, diagonalize_block, sweep_block
from enantiostark._utils import map_ordered, wrap_angle

logger = logging.getLogger(__name__)

#: Coupling coefficients below this magnitude (Debye) count as vanishing
VANISHING_TOL_DEBYE = 1e-12

#: Largest allowed splitting (MHz) of the |beta,+1> / |beta,-1> doublet
DOUBLET_TOL_MHZ = 1e-9

#: Additional splitting allowed per MHz of the largest block energy (eigensolver round-off)
DOUBLET_RTOL = 1e-12

#: M-blocks needed for one cascade
CASCADE_BLOCKS = (0, 1, -1)


@dataclass(frozen=True)
class TransitionTriple:
    """
    Level labels of the cascade.

    alpha and gamma index levels of the M=0 block, beta the doublet of the M=+1 and M=-1 blocks.
    """

    alpha: int  #: Level xi of the initial state |alpha,0>
    beta: int  #: Level xi of the intermediate doublet |beta,+-1>
    gamma: int  #: Level xi of the final state |gamma,0>

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ArgumentError(f"Level index {name} must be a positive integer, got {value!r}")
        if self.alpha == self.gamma:
            raise ArgumentError(f"alpha and gamma must differ, got {self.alpha}")

    @classmethod
    def from_dict(cls, fields: dict[str, Any]) -> TransitionTriple:
        return cls(alpha=int(fields["alpha"]), beta=int(fields["beta"]), gamma=int(fields["gamma"]))

    def to_dict(self) -> dict[str, Any]:
        return {"alpha": self.alpha, "beta": self.beta, "gamma": self.gamma}

    def __str__(self):
        return f"(alpha={self.alpha}, beta={self.beta}, gamma={self.gamma})"


@dataclass(frozen=True)
class CouplingSet:
    """Coupling coefficients of one enantiomer and its forbidden angle."""

    a_plus: complex  #: <beta,+1| d.e_+ |alpha,0> in Debye
    a_minus: complex  #: <beta,-1| d.e_- |alpha,0> in Debye
    b_plus: complex  #: <gamma,0| d.e_+ |beta,-1> in Debye
    b_minus: complex  #: <gamma,0| d.e_- |beta,+1> in Debye
    theta_f: float  #: Forbidden polarization angle in (-pi, pi]
    handedness: Handedness  #: Enantiomer


class CascadeOrdering(Enum):
    """Energy ordering of the cascade levels."""

    LADDER = "ladder"  #: e_alpha < e_beta < e_gamma
    V_TYPE = "v-type"  #: e_alpha < e_gamma < e_beta


@dataclass(frozen=True)
class FieldSweepRow:
    """One grid point of a field sweep. Angles are None where a transition dipole vanishes."""

    E0: float  #: Static field strength in kV/cm
    theta_f_L: float | None  #: Forbidden angle of the left-handed enantiomer
    theta_f_R: float | None  #: Forbidden angle of the right-handed enantiomer
    D: float | None  #: Degree of enantiospecificity

    @property
    def defined(self) -> bool:
        return self.D is not None


def _check_magnitude(name: str, value: complex):
    if abs(value) < VANISHING_TOL_DEBYE:
        raise VanishingDipoleError(name, abs(value))


def forbidden_angle(
    a_plus: complex,
    a_minus: complex,
    b_plus: complex,
    b_minus: complex,
) -> float:
    """
    Forbidden polarization angle arg[-conj(a_+) conj(b_-) b_+ a_-] in (-pi, pi].

    Raises:
        VanishingDipoleError: If a coefficient or the product vanishes
    """
    for name, value in (
        ("a_plus", a_plus),
        ("a_minus", a_minus),
        ("b_plus", b_plus),
        ("b_minus", b_minus),
    ):
        _check_magnitude(name, value)
    product = -np.conj(a_plus) * np.conj(b_minus) * b_plus * a_minus
    if abs(product) < VANISHING_TOL_DEBYE**4:
        raise VanishingDipoleError("-conj(a_plus) conj(b_minus) b_plus a_minus", abs(product))
    return wrap_angle(float(np.angle(product)))


def effective_two_photon_coupling(c: CouplingSet, theta: float) -> complex:
    """Effective cascade coupling a_- b_+ + a_+ b_- exp(i theta) for beam-2 angle theta."""
    return complex(c.a_minus * c.b_plus + c.a_plus * c.b_minus * np.exp(1j * theta))


def degree_of_enantiospecificity(theta_f_L: float, theta_f_R: float) -> float:
    """
    Degree of enantiospecificity sin^2((theta_f_L - theta_f_R) / 2) in [0, 1].

    Raises:
        ArgumentError: If an angle is not finite
    """
    if not (math.isfinite(theta_f_L) and math.isfinite(theta_f_R)):
        raise ArgumentError(f"Angles must be finite, got {theta_f_L}, {theta_f_R}")
    return math.sin(0.5 * (theta_f_L - theta_f_R)) ** 2


def polarization_direction(theta: float) -> np.ndarray:
    """Unit vector of the beam-2 polarization in the xy plane for angle theta."""
    return np.array([math.sin(0.5 * theta), -math.cos(0.5 * theta), 0.0])


def forbidden_direction(theta_f: float) -> np.ndarray:
    """Beam-2 polarization that forbids the cascade (squared cross product of L and R gives D)."""
    return polarization_direction(theta_f)


def dressed_state(c: CouplingSet) -> np.ndarray:
    """Normalized amplitudes on (|beta,-1>, |beta,+1>) of the state beam 1 couples to |alpha,0>."""
    amplitudes = np.array([c.a_minus, c.a_plus], dtype=complex)
    norm = np.linalg.norm(amplitudes)
    if norm < VANISHING_TOL_DEBYE:
        raise VanishingDipoleError("a_plus, a_minus", float(norm))
    return amplitudes / norm


def _check_systems(
    mol: MoleculeSpec,
    systems: Mapping[int, StarkEigensystem],
) -> int:
    missing = [M for M in CASCADE_BLOCKS if M not in systems]
    if missing:
        raise ArgumentError(f"Eigensystems of blocks M={missing} missing")
    J_max = {systems[M].J_max for M in CASCADE_BLOCKS}
    E0 = {systems[M].E0 for M in CASCADE_BLOCKS}
    handedness = {systems[M].handedness for M in CASCADE_BLOCKS}
    if len(J_max) != 1 or len(E0) != 1 or handedness != {mol.handedness}:
        raise ArgumentError(
            "Eigensystems must share E0, J_max and the handedness of the molecule, "
            f"got E0={sorted(E0)}, J_max={sorted(J_max)}, "
            f"handedness={sorted(h.value for h in handedness)}"
        )
    return J_max.pop()


def cascade_ordering(
    systems: Mapping[int, StarkEigensystem],
    triple: TransitionTriple,
) -> CascadeOrdering:
    """
    Classify the energy ordering of the cascade levels.

    Raises:
        ArgumentError: If alpha is not the lowest level of the cascade
    """
    e_alpha = systems[0].energy(triple.alpha)
    e_beta = systems[1].energy(triple.beta)
    e_gamma = systems[0].energy(triple.gamma)
    if e_alpha < e_beta < e_gamma:
        return CascadeOrdering.LADDER
    if e_alpha < e_gamma < e_beta:
        return CascadeOrdering.V_TYPE
    raise ArgumentError(
        f"Level alpha must be the lowest of the cascade {triple}, "
        f"got energies {e_alpha:.6g}, {e_beta:.6g}, {e_gamma:.6g} MHz"
    )


def coupling_from_eigensystems(
    mol: MoleculeSpec,
    triple: TransitionTriple,
    systems: Mapping[int, StarkEigensystem],
) -> CouplingSet:
    """
    Coupling coefficients from precomputed eigensystems of the blocks M = 0, +1, -1.

    Raises:
        ArgumentError: If blocks are missing, inconsistent or a level index is out of range
        DegeneracyError: If the beta doublet is split
        VanishingDipoleError: If a coupling coefficient vanishes
    """
    J_max = _check_systems(mol, systems)

    splitting = abs(systems[1].energy(triple.beta) - systems[-1].energy(triple.beta))
    tolerance = max(DOUBLET_TOL_MHZ, DOUBLET_RTOL * float(np.abs(systems[1].energies).max()))
    if splitting > tolerance:
        raise DegeneracyError(
            f"Doublet beta={triple.beta} split by {splitting:.3g} MHz at E0={systems[0].E0} kV/cm"
        )

    alpha = systems[0].state(triple.alpha)
    gamma = systems[0].state(triple.gamma)
    beta = {M: systems[M].state(triple.beta) for M in (1, -1)}

    def element(bra: np.ndarray, M_ket: int, sign: int, ket: np.ndarray) -> complex:
        return complex(bra.conj() @ dipole_pm_matrix(mol, J_max, M_ket, sign) @ ket)

    a_plus = element(beta[1], 0, +1, alpha)
    a_minus = element(beta[-1], 0, -1, alpha)
    b_plus = element(gamma, -1, +1, beta[-1])
    b_minus = element(gamma, +1, -1, beta[1])

    return CouplingSet(
        a_plus=a_plus,
        a_minus=a_minus,
        b_plus=b_plus,
        b_minus=b_minus,
        theta_f=forbidden_angle(a_plus, a_minus, b_plus, b_minus),
        handedness=mol.handedness,
    )


def coupling_coefficients(
    mol: MoleculeSpec,
    E0: float,
    triple: TransitionTriple,
    J_max: int,
) -> CouplingSet:
    """
    Coupling coefficients a_+-, b_+- and forbidden angle of the cascade at field E0.

    Args:
        mol: Molecule (enantiomer)
        E0: Static field strength in kV/cm
        triple: Level labels of the cascade
        J_max: Basis truncation

    Raises:
        DegeneracyError: If the beta doublet is split
        VanishingDipoleError: If a coupling coefficient vanishes
    """
    systems = {M: diagonalize_block(mol, E0, M, J_max) for M in CASCADE_BLOCKS}
    return coupling_from_eigensystems(mol, triple, systems)


def converge_J_max_for_triple(
    mol: MoleculeSpec,
    E0: float,
    triple: TransitionTriple,
    rel_tol: float,
) -> int:
    """Basis truncation converging all levels of the cascade (blocks M=0 and M=1)."""
    return max(
        converge_J_max(mol, E0, 0, max(triple.alpha, triple.gamma), rel_tol),
        converge_J_max(mol, E0, 1, triple.beta, rel_tol),
    )


def _check_grid(E0_grid: Sequence[float]) -> np.ndarray:
    grid = np.asarray(E0_grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise ArgumentError("E0 grid must be a non-empty sequence")
    steps = np.diff(grid)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ArgumentError("E0 grid must be strictly monotone")
    return grid


def sweep_field(
    mol: MoleculeSpec,
    triple: TransitionTriple,
    E0_grid: Sequence[float],
    J_max: int,
    *,
    max_workers: int | None = None,
) -> list[FieldSweepRow]:
    """
    Forbidden angles of both enantiomers and the degree of enantiospecificity along a field grid.

    Eigensystems are labelled sequentially along the grid, couplings are then evaluated per grid
    point (in a thread pool if `max_workers` > 1). Grid points where a transition dipole vanishes
    are returned with undefined angles.

    Raises:
        ArgumentError: If the grid is empty or not monotone
    """
    grid = _check_grid(E0_grid)
    logger.info("Sweep %d field points for cascade %s (J_max=%d)", len(grid), triple, J_max)

    enantiomers = {h: mol.with_handedness(h) for h in Handedness}
    chains = {
        (h, M): sweep_block(enantiomers[h], grid, M, J_max)
        for h in Handedness
        for M in CASCADE_BLOCKS
    }

    def evaluate(index: int) -> FieldSweepRow:
        E0 = float(grid[index])
        angles = {}
        try:
            for h in Handedness:
                systems = {M: chains[(h, M)][index] for M in CASCADE_BLOCKS}
                angles[h] = coupling_from_eigensystems(enantiomers[h], triple, systems).theta_f
        except VanishingDipoleError as e:
            logger.warning("Forbidden angle undefined at E0=%g kV/cm: %s", E0, e)
            return FieldSweepRow(E0=E0, theta_f_L=None, theta_f_R=None, D=None)
        theta_f_L, theta_f_R = angles[Handedness.L], angles[Handedness.R]
        return FieldSweepRow(
            E0=E0,
            theta_f_L=theta_f_L,
            theta_f_R=theta_f_R,
            D=degree_of_enantiospecificity(theta_f_L, theta_f_R),
        )

    return map_ordered(evaluate, range(len(grid)), max_workers=max_workers)
