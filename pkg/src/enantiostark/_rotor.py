"""
Asymmetric-top rotor in the symmetric-top basis |J,K,M>.

All energies are carried as plain frequencies in MHz (E = h * nu). Dipoles are in Debye and
static fields in kV/cm; `DEBYE_KV_CM_MHZ` converts their product into MHz.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Any, Sequence

import numpy as np
from scipy import constants

from enantiostark._angular import wigner3j
from enantiostark._exceptions import ArgumentError, UnknownPresetError

logger = logging.getLogger(__name__)

#: 1 Debye in C m (1e-21 / c)
DEBYE = 1e-21 / constants.c

#: (1 Debye) * (1 kV/cm) / h in MHz, approx. 503.41 MHz
DEBYE_KV_CM_MHZ = DEBYE * 1e5 / constants.h / 1e6


class Handedness(Enum):
    """Handedness of the enantiomer."""

    L = "L"
    R = "R"

    def mirrored(self) -> Handedness:
        return Handedness.R if self is Handedness.L else Handedness.L


class MatrixKind(Enum):
    """Kind of operator matrix, decides the sign under the enantiomer map."""

    FIELD_FREE = "field_free"
    DIPOLE = "dipole"


@dataclass(frozen=True)
class MoleculeSpec:
    """
    Rigid asymmetric-top molecule, one enantiomer.

    The body frame (a, b, c) is right-handed with I_a < I_b, I_c, i.e. A is the largest constant.
    """

    A: float  #: Rotational constant A in MHz
    B: float  #: Rotational constant B in MHz
    C: float  #: Rotational constant C in MHz
    d_a: float  #: Dipole component along a in Debye
    d_b: float  #: Dipole component along b in Debye
    d_c: float  #: Dipole component along c in Debye
    handedness: Handedness = Handedness.L  #: Enantiomer
    name: str | None = None  #: Preset name or free label

    def __post_init__(self):
        if not all(value > 0 for value in (self.A, self.B, self.C)):
            raise ArgumentError(
                f"Rotational constants must be positive, got A={self.A}, B={self.B}, C={self.C}"
            )
        if self.d_a == 0 and self.d_b == 0 and self.d_c == 0:
            raise ArgumentError("At least one dipole component must be nonzero")
        if self.A < self.B or self.A < self.C:
            logger.warning(
                "Rotational constants violate A >= B, C (A=%s, B=%s, C=%s)", self.A, self.B, self.C
            )

    def mirrored(self) -> MoleculeSpec:
        """Return the opposite enantiomer."""
        return replace(self, handedness=self.handedness.mirrored())

    def with_handedness(self, handedness: Handedness) -> MoleculeSpec:
        return self if handedness is self.handedness else self.mirrored()

    def spherical_dipole(self) -> SphericalDipole:
        """Body-frame spherical components of the dipole moment (of the left-handed form)."""
        return SphericalDipole(
            mu_0=complex(-self.d_a),
            mu_plus=complex(self.d_b, self.d_c) / math.sqrt(2),
            mu_minus=-complex(self.d_b, -self.d_c) / math.sqrt(2),
        )

    @classmethod
    def from_dict(cls, fields: dict[str, Any]) -> MoleculeSpec:
        """Create `MoleculeSpec` from dict with unit-tagged keys."""
        return cls(
            A=float(fields["A_MHz"]),
            B=float(fields["B_MHz"]),
            C=float(fields["C_MHz"]),
            d_a=float(fields["d_a_D"]),
            d_b=float(fields["d_b_D"]),
            d_c=float(fields["d_c_D"]),
            handedness=Handedness(fields.get("handedness", "L")),
            name=fields.get("name"),
        )

    def to_dict(self) -> dict[str, Any]:
        """Convert into dict with unit-tagged keys."""
        result: dict[str, Any] = {
            "A_MHz": self.A,
            "B_MHz": self.B,
            "C_MHz": self.C,
            "d_a_D": self.d_a,
            "d_b_D": self.d_b,
            "d_c_D": self.d_c,
            "handedness": self.handedness.value,
        }
        if self.name is not None:
            result["name"] = self.name
        return result


@dataclass(frozen=True)
class SphericalDipole:
    """Body-frame spherical dipole components in Debye."""

    mu_0: complex  #: mu_0 = -d_a
    mu_plus: complex  #: mu_+1 = (d_b + i d_c) / sqrt(2)
    mu_minus: complex  #: mu_-1 = -(d_b - i d_c) / sqrt(2)

    def component(self, sigma: int) -> complex:
        if sigma == 0:
            return self.mu_0
        return self.mu_plus if sigma > 0 else self.mu_minus


@dataclass(frozen=True)
class BasisState:
    """Symmetric-top basis state |J,K,M>."""

    J: int  #: Total angular momentum
    K: int  #: Projection on the body axis a
    M: int  #: Projection on the lab axis z

    def __post_init__(self):
        if self.J < 0 or abs(self.K) > self.J or abs(self.M) > self.J:
            raise ArgumentError(f"Invalid basis state |J={self.J}, K={self.K}, M={self.M}>")


PRESETS: dict[str, MoleculeSpec] = {
    "propanediol-1,2": MoleculeSpec(
        A=8572.05,
        B=3640.10,
        C=2790.96,
        d_a=-1.201,
        d_b=-1.916,
        d_c=-0.365,
        name="propanediol-1,2",
    ),
}


def get_preset(name: str, handedness: Handedness = Handedness.L) -> MoleculeSpec:
    """
    Get molecule preset by name.

    Raises:
        UnknownPresetError: If no preset with this name is registered
    """
    try:
        return PRESETS[name].with_handedness(handedness)
    except KeyError:
        raise UnknownPresetError(name, sorted(PRESETS)) from None


def build_basis(J_max: int, M: int) -> list[BasisState]:
    """
    Basis of the M-block, ordered by ascending J, then ascending K.

    Raises:
        ArgumentError: If J_max < |M|
    """
    if J_max < abs(M):
        raise ArgumentError(f"J_max={J_max} must be >= |M|={abs(M)}")
    return [
        BasisState(J, K, M)
        for J in range(abs(M), J_max + 1)
        for K in range(-J, J + 1)
    ]


def enantiomer_matrix_map(kind: MatrixKind) -> int:
    """
    Sign that maps a left-handed matrix onto the right-handed one.

    The inversion leaves the field-free Hamiltonian unchanged and flips every dipole operator.
    """
    return 1 if kind is MatrixKind.FIELD_FREE else -1


def _handedness_sign(mol: MoleculeSpec, kind: MatrixKind) -> int:
    return 1 if mol.handedness is Handedness.L else enantiomer_matrix_map(kind)


def _f(mol: MoleculeSpec, J: int, K: int) -> float:
    return 0.5 * (mol.B + mol.C) * (J * (J + 1) - K * K) + mol.A * K * K


def _g(mol: MoleculeSpec, J: int, K: int, sign: int) -> float:
    jj = J * (J + 1)
    product = (jj - K * (K + sign)) * (jj - (K + sign) * (K + 2 * sign))
    return 0.25 * (mol.B - mol.C) * math.sqrt(max(product, 0))


def field_free_element(mol: MoleculeSpec, J: int, K: int, Jp: int, Kp: int) -> float:
    """Matrix element <J,K,M| H_F |J',K',M> in MHz (independent of M and handedness)."""
    if abs(K) > J or abs(Kp) > Jp:
        raise ArgumentError(f"Invalid projections K={K} (J={J}), K'={Kp} (J'={Jp})")
    if J != Jp:
        return 0.0
    if Kp == K:
        return _f(mol, J, K)
    if Kp == K + 2:
        return _g(mol, J, K, +1)
    if Kp == K - 2:
        return _g(mol, J, K, -1)
    return 0.0


def _body_sum(mol: MoleculeSpec, J: int, K: int, Jp: int, Kp: int, phase: int) -> complex:
    # only sigma = K - K' survives the m-sum rule of the body 3-j symbol
    sigma = K - Kp
    if abs(sigma) > 1:
        return 0.0
    mu = mol.spherical_dipole().component(sigma)
    sign = -1 if (phase - Kp + sigma) % 2 else 1
    return sign * mu * wigner3j(J, 1, Jp, K, -sigma, -Kp)


def dipole_z_element(mol: MoleculeSpec, bra: BasisState, ket: BasisState) -> complex:
    """Matrix element <bra| d.e_z |ket> in Debye."""
    if bra.M != ket.M or abs(bra.J - ket.J) > 1:
        return 0j
    lab = wigner3j(bra.J, 1, ket.J, bra.M, 0, -ket.M)
    if lab == 0:
        return 0j
    value = (
        math.sqrt((2 * bra.J + 1) * (2 * ket.J + 1))
        * lab
        * _body_sum(mol, bra.J, bra.K, ket.J, ket.K, ket.M + 1)
    )
    return complex(_handedness_sign(mol, MatrixKind.DIPOLE) * value)


def dipole_pm_element(mol: MoleculeSpec, bra: BasisState, ket: BasisState, sign: int) -> complex:
    """Matrix element <bra| d.e_+ |ket> (sign=+1) or <bra| d.e_- |ket> (sign=-1) in Debye."""
    if sign not in (1, -1):
        raise ArgumentError(f"sign must be +1 or -1, got {sign}")
    if bra.M != ket.M + sign or abs(bra.J - ket.J) > 1:
        return 0j
    lab = wigner3j(bra.J, 1, ket.J, bra.M, -sign, -ket.M)
    if lab == 0:
        return 0j
    value = (
        math.sqrt((2 * bra.J + 1) * (2 * ket.J + 1))
        * lab
        * _body_sum(mol, bra.J, bra.K, ket.J, ket.K, ket.M)
    )
    return complex(_handedness_sign(mol, MatrixKind.DIPOLE) * value)


def _neighbours(state: BasisState, M: int, J_max: int):
    for Jp in range(max(abs(M), state.J - 1), min(J_max, state.J + 1) + 1):
        for Kp in range(max(-Jp, state.K - 1), min(Jp, state.K + 1) + 1):
            yield BasisState(Jp, Kp, M)


def _index(basis: Sequence[BasisState]) -> dict[BasisState, int]:
    return {state: i for i, state in enumerate(basis)}


def _readonly(matrix: np.ndarray) -> np.ndarray:
    matrix.setflags(write=False)
    return matrix


@lru_cache(maxsize=256)
def field_free_matrix(mol: MoleculeSpec, J_max: int, M: int) -> np.ndarray:
    """Field-free Hamiltonian of the M-block in MHz (real symmetric, read-only)."""
    basis = build_basis(J_max, M)
    index = _index(basis)
    matrix = np.zeros((len(basis), len(basis)))
    for i, state in enumerate(basis):
        for Kp in (state.K - 2, state.K, state.K + 2):
            if abs(Kp) <= state.J:
                j = index[BasisState(state.J, Kp, M)]
                matrix[i, j] = field_free_element(mol, state.J, state.K, state.J, Kp)
    return _readonly(matrix)


@lru_cache(maxsize=256)
def dipole_z_matrix(mol: MoleculeSpec, J_max: int, M: int) -> np.ndarray:
    """Matrix of d.e_z within the M-block in Debye (Hermitian, read-only)."""
    basis = build_basis(J_max, M)
    index = _index(basis)
    matrix = np.zeros((len(basis), len(basis)), dtype=complex)
    for i, bra in enumerate(basis):
        for ket in _neighbours(bra, M, J_max):
            matrix[i, index[ket]] = dipole_z_element(mol, bra, ket)
    return _readonly(matrix)


@lru_cache(maxsize=256)
def dipole_pm_matrix(mol: MoleculeSpec, J_max: int, M_ket: int, sign: int) -> np.ndarray:
    """
    Matrix of d.e_+ (sign=+1) or d.e_- (sign=-1) from block M_ket to block M_ket + sign.

    Rows follow `build_basis(J_max, M_ket + sign)`, columns `build_basis(J_max, M_ket)`.
    """
    if sign not in (1, -1):
        raise ArgumentError(f"sign must be +1 or -1, got {sign}")
    M_bra = M_ket + sign
    bra_basis = build_basis(J_max, M_bra)
    ket_basis = build_basis(J_max, M_ket)
    index = _index(bra_basis)
    matrix = np.zeros((len(bra_basis), len(ket_basis)), dtype=complex)
    for j, ket in enumerate(ket_basis):
        for bra in _neighbours(ket, M_bra, J_max):
            matrix[index[bra], j] = dipole_pm_element(mol, bra, ket, sign)
    return _readonly(matrix)
