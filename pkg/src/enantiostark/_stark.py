"""
Stark eigenstates |xi,M> of the rotor in a static field E0 along z.

Each M-block of H_0 = H_F - E0 d.e_z is diagonalized on its own. Levels are labelled xi = 1, 2, ...
in ascending energy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg
from scipy.optimize import linear_sum_assignment

from enantiostark._angular import J_LIMIT
from enantiostark._exceptions import ArgumentError, ConvergenceError, EigensolverError
from enantiostark._rotor import (
    DEBYE_KV_CM_MHZ,
    BasisState,
    Handedness,
    MoleculeSpec,
    build_basis,
    dipole_z_matrix,
    field_free_matrix,
)

logger = logging.getLogger(__name__)

#: Largest basis truncation tried by `converge_J_max`
J_MAX_LIMIT = J_LIMIT

#: Energies closer than this (MHz) are treated as degenerate when labelling levels
DEGENERACY_TOL_MHZ = 1e-9

#: Coefficient magnitudes closer than this compete for the phase pivot
PHASE_TIE_TOL = 1e-12

#: Largest accepted eigenvector residual |H v - E v| relative to the largest |energy|
EIGEN_RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class StarkEigensystem:
    """Eigenvalues and eigenvectors of one M-block."""

    M: int  #: Lab-frame projection
    E0: float  #: Static field strength in kV/cm
    J_max: int  #: Basis truncation
    handedness: Handedness  #: Enantiomer
    basis: tuple[BasisState, ...]  #: Basis order of the coefficient columns
    energies: np.ndarray  #: Ascending energies in MHz, index xi - 1
    coefficients: np.ndarray  #: Coefficients S, rows indexed by xi - 1, columns by basis

    def __len__(self) -> int:
        return len(self.energies)

    def energy(self, xi: int) -> float:
        """Energy of level xi (1-based) in MHz."""
        return float(self.energies[self._row(xi)])

    def state(self, xi: int) -> np.ndarray:
        """Coefficient vector of level xi (1-based)."""
        return self.coefficients[self._row(xi)]

    def rephased(self, phases: Sequence[float]) -> StarkEigensystem:
        """Copy with every eigenvector multiplied by exp(i * phase)."""
        factors = np.exp(1j * np.asarray(phases, dtype=float))
        return StarkEigensystem(
            M=self.M,
            E0=self.E0,
            J_max=self.J_max,
            handedness=self.handedness,
            basis=self.basis,
            energies=self.energies,
            coefficients=self.coefficients * factors[:, np.newaxis],
        )

    def _row(self, xi: int) -> int:
        if not 1 <= xi <= len(self.energies):
            raise ArgumentError(f"Level xi={xi} out of range 1..{len(self.energies)} (M={self.M})")
        return xi - 1


def stark_hamiltonian(mol: MoleculeSpec, E0: float, M: int, J_max: int) -> np.ndarray:
    """Hamiltonian H_F - E0 d.e_z of the M-block in MHz."""
    return field_free_matrix(mol, J_max, M) - E0 * DEBYE_KV_CM_MHZ * dipole_z_matrix(mol, J_max, M)


def _mirror_tables(basis: Sequence[BasisState]) -> tuple[np.ndarray, np.ndarray]:
    # index of |J,-K,M> and parity (-1)^(J+K+M) of the enantiomer map
    index = {(state.J, state.K): i for i, state in enumerate(basis)}
    mirror = np.array([index[(state.J, -state.K)] for state in basis])
    parity = np.array([-1.0 if (state.J + state.K + state.M) % 2 else 1.0 for state in basis])
    return mirror, parity


def _fix_phase(
    vector: np.ndarray,
    handedness: Handedness,
    mirror: np.ndarray,
    parity: np.ndarray,
) -> tuple[np.ndarray, int]:
    """
    Rotate the global phase of an eigenvector.

    Left-handed: the largest coefficient (lowest index on ties) becomes real positive.
    Right-handed: the pivot is the mirror image of the left-handed one and the phase makes
    parity * coefficient real positive, so R vectors are the mirror images of L vectors.
    """
    magnitudes = np.abs(vector)
    candidates = np.flatnonzero(magnitudes >= magnitudes.max() - PHASE_TIE_TOL)
    if handedness is Handedness.L:
        pivot = int(candidates.min())
        weight = 1.0
    else:
        pivot = int(candidates[np.argmin(mirror[candidates])])
        weight = parity[pivot]
    return vector * np.exp(-1j * np.angle(weight * vector[pivot])), pivot


def _degenerate_groups(energies: np.ndarray) -> list[np.ndarray]:
    boundaries = np.flatnonzero(np.diff(energies) > DEGENERACY_TOL_MHZ) + 1
    return [group for group in np.split(np.arange(len(energies)), boundaries) if len(group) > 1]


def _order_degenerate(
    vectors: np.ndarray,
    pivots: np.ndarray,
    energies: np.ndarray,
    previous: StarkEigensystem | None,
) -> np.ndarray:
    order = np.arange(len(energies))
    for group in _degenerate_groups(energies):
        if previous is not None:
            overlaps = np.abs(previous.coefficients[group].conj() @ vectors[group].T)
            rows, cols = linear_sum_assignment(-overlaps)
            order[group[rows]] = group[cols]
        else:
            order[group] = group[np.argsort(pivots[group], kind="stable")]
        logger.debug("Degenerate levels %s reordered to %s", group + 1, order[group] + 1)
    return order


def diagonalize_block(
    mol: MoleculeSpec,
    E0: float,
    M: int,
    J_max: int,
    *,
    previous: StarkEigensystem | None = None,
) -> StarkEigensystem:
    """
    Diagonalize the M-block of the Stark Hamiltonian.

    Args:
        mol: Molecule (enantiomer)
        E0: Static field strength in kV/cm
        M: Lab-frame projection
        J_max: Basis truncation
        previous: Eigensystem of the same block at the previous point of a field sweep.
            Used to keep labels of (near-)degenerate levels continuous.

    Raises:
        ArgumentError: If E0 < 0 or J_max < |M|
        EigensolverError: If the eigensolver fails
    """
    if E0 < 0:
        raise ArgumentError(f"E0 must be non-negative, got {E0}")
    basis = tuple(build_basis(J_max, M))
    if J_max < abs(M) + 2:
        logger.warning("Basis truncation J_max=%d is below |M|+2 for block M=%d", J_max, M)

    hamiltonian = stark_hamiltonian(mol, E0, M, J_max)
    try:
        energies, vectors = linalg.eigh(hamiltonian)
    except (linalg.LinAlgError, ValueError) as e:
        raise EigensolverError(M, E0, J_max, str(e)) from e
    if not np.all(np.isfinite(energies)):
        raise EigensolverError(M, E0, J_max, "non-finite eigenvalues")

    residual = float(np.linalg.norm(hamiltonian @ vectors - vectors * energies, axis=0).max())
    scale = max(float(np.abs(energies).max()), 1.0)
    if not residual <= EIGEN_RESIDUAL_RTOL * scale:
        raise EigensolverError(M, E0, J_max, f"eigenvector residual {residual:.2e} MHz")
    logger.debug(
        "Block M=%d, E0=%g kV/cm, J_max=%d: dimension %d, residual %.2e",
        M,
        E0,
        J_max,
        len(basis),
        residual,
    )

    mirror, parity = _mirror_tables(basis)
    fixed = [_fix_phase(vector, mol.handedness, mirror, parity) for vector in vectors.T]
    rows = np.array([vector for vector, _ in fixed])
    pivots = np.array([pivot for _, pivot in fixed])

    if previous is not None and previous.coefficients.shape != rows.shape:
        logger.warning("Ignore previous eigensystem with different block shape")
        previous = None
    order = _order_degenerate(rows, pivots, energies, previous)
    return StarkEigensystem(
        M=M,
        E0=float(E0),
        J_max=J_max,
        handedness=mol.handedness,
        basis=basis,
        energies=energies[order],
        coefficients=rows[order],
    )


def sweep_block(
    mol: MoleculeSpec,
    E0_grid: Sequence[float],
    M: int,
    J_max: int,
) -> list[StarkEigensystem]:
    """Diagonalize one block along a field grid, chaining label continuity from point to point."""
    systems: list[StarkEigensystem] = []
    previous = None
    for E0 in E0_grid:
        previous = diagonalize_block(mol, E0, M, J_max, previous=previous)
        systems.append(previous)
    return systems


def converge_J_max(
    mol: MoleculeSpec,
    E0: float,
    M: int,
    levels_needed: int,
    rel_tol: float,
    *,
    limit: int = J_MAX_LIMIT,
) -> int:
    """
    Smallest basis truncation for which the lowest levels are converged.

    J_max counts as converged if the lowest `levels_needed` energies change by less than `rel_tol`
    (relative to the largest of them) when going to J_max + 2. The search starts at |M| + 2, doubles
    until convergence and bisects back to the smallest converged value.

    Raises:
        ArgumentError: If rel_tol <= 0 or levels_needed < 1
        ConvergenceError: If not converged up to `limit`
    """
    if rel_tol <= 0:
        raise ArgumentError(f"rel_tol must be positive, got {rel_tol}")
    if levels_needed < 1:
        raise ArgumentError(f"levels_needed must be positive, got {levels_needed}")

    cache: dict[int, np.ndarray | None] = {}

    def lowest(J_max: int) -> np.ndarray | None:
        if J_max not in cache:
            energies = linalg.eigvalsh(stark_hamiltonian(mol, E0, M, J_max))
            cache[J_max] = energies[:levels_needed] if len(energies) >= levels_needed else None
        return cache[J_max]

    def converged(J_max: int) -> bool:
        current, refined = lowest(J_max), lowest(J_max + 2)
        if current is None or refined is None:
            return False
        scale = max(float(np.abs(refined).max()), np.finfo(float).tiny)
        return float(np.abs(current - refined).max()) < rel_tol * scale

    # J_max + 2 must stay within the limit
    top = min(limit, J_MAX_LIMIT) - 2
    start = abs(M) + 2
    if start > top:
        raise ConvergenceError(M, E0, limit)
    failed = start - 1
    candidate = start
    while not converged(candidate):
        if candidate >= top:
            raise ConvergenceError(M, E0, limit)
        failed = candidate
        candidate = min(2 * candidate, top)

    while candidate - failed > 1:
        middle = (candidate + failed) // 2
        if converged(middle):
            candidate = middle
        else:
            failed = middle

    logger.info("Block M=%d at E0=%g kV/cm converged with J_max=%d", M, E0, candidate)
    return candidate
