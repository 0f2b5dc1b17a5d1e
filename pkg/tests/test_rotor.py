import logging
import math

import numpy as np
import pytest

from enantiostark import (
    DEBYE_KV_CM_MHZ,
    PRESETS,
    ArgumentError,
    BasisState,
    Handedness,
    MatrixKind,
    MoleculeSpec,
    UnknownPresetError,
    build_basis,
    dipole_pm_element,
    dipole_pm_matrix,
    dipole_z_element,
    dipole_z_matrix,
    enantiomer_matrix_map,
    field_free_element,
    field_free_matrix,
    get_preset,
)

PROPANEDIOL = get_preset("propanediol-1,2")

MOLECULE_DICT = {
    "A_MHz": 8572.05,
    "B_MHz": 3640.1,
    "C_MHz": 2790.96,
    "d_a_D": -1.201,
    "d_b_D": -1.916,
    "d_c_D": -0.365,
    "handedness": "L",
    "name": "propanediol-1,2",
}


def dipole_squared(mol):
    return mol.d_a**2 + mol.d_b**2 + mol.d_c**2


def test_debye_conversion():
    assert pytest.approx(503.41, rel=1e-4) == DEBYE_KV_CM_MHZ


def test_molecule_from_dict():
    mol = MoleculeSpec.from_dict(MOLECULE_DICT)

    assert mol.A == 8572.05
    assert mol.B == 3640.1
    assert mol.C == 2790.96
    assert (mol.d_a, mol.d_b, mol.d_c) == (-1.201, -1.916, -0.365)
    assert mol.handedness == Handedness.L
    assert mol == PROPANEDIOL

    assert mol.to_dict() == MOLECULE_DICT


def test_molecule_minimal_dict():
    mol = MoleculeSpec.from_dict(
        {"A_MHz": 3, "B_MHz": 2, "C_MHz": 1, "d_a_D": 1, "d_b_D": 0, "d_c_D": 0}
    )
    assert mol.name is None
    assert mol.handedness == Handedness.L
    assert "name" not in mol.to_dict()


@pytest.mark.parametrize(
    "kwargs",
    [
        {"A": 0.0, "B": 1.0, "C": 1.0, "d_a": 1.0, "d_b": 0.0, "d_c": 0.0},
        {"A": 3.0, "B": -1.0, "C": 1.0, "d_a": 1.0, "d_b": 0.0, "d_c": 0.0},
        {"A": 3.0, "B": 2.0, "C": 1.0, "d_a": 0.0, "d_b": 0.0, "d_c": 0.0},
    ],
)
def test_molecule_invalid(kwargs):
    with pytest.raises(ArgumentError):
        MoleculeSpec(**kwargs)


def test_molecule_axis_convention_warning(caplog):
    with caplog.at_level(logging.WARNING):
        MoleculeSpec(A=1.0, B=2.0, C=0.5, d_a=1.0, d_b=0.0, d_c=0.0)
    assert "A >= B, C" in caplog.text


def test_mirrored():
    right = PROPANEDIOL.mirrored()
    assert right.handedness == Handedness.R
    assert right.mirrored() == PROPANEDIOL
    assert PROPANEDIOL.with_handedness(Handedness.L) is PROPANEDIOL
    assert PROPANEDIOL.with_handedness(Handedness.R) == right


def test_spherical_dipole():
    dipole = PROPANEDIOL.spherical_dipole()
    assert dipole.mu_0 == -PROPANEDIOL.d_a
    assert dipole.component(1) == pytest.approx(complex(-1.916, -0.365) / math.sqrt(2))
    assert dipole.component(-1) == pytest.approx(-complex(-1.916, 0.365) / math.sqrt(2))
    total = sum(abs(dipole.component(sigma)) ** 2 for sigma in (-1, 0, 1))
    assert total == pytest.approx(dipole_squared(PROPANEDIOL))


def test_presets():
    assert "propanediol-1,2" in PRESETS
    assert get_preset("propanediol-1,2", Handedness.R).handedness == Handedness.R


def test_unknown_preset():
    with pytest.raises(UnknownPresetError, match="propanediol-1,2") as exc_info:
        get_preset("glycidol")
    assert exc_info.value.name == "glycidol"


@pytest.mark.parametrize(("J", "K", "M"), [(-1, 0, 0), (1, 2, 0), (1, 0, -2)])
def test_basis_state_invalid(J, K, M):
    with pytest.raises(ArgumentError):
        BasisState(J, K, M)


@pytest.mark.parametrize(("J_max", "M"), [(0, 0), (1, 0), (3, 1), (4, -2)])
def test_build_basis(J_max, M):
    basis = build_basis(J_max, M)
    assert len(basis) == sum(2 * J + 1 for J in range(abs(M), J_max + 1))
    assert len(set(basis)) == len(basis)
    assert all(state.M == M for state in basis)
    assert basis[0] == BasisState(abs(M), -abs(M), M)


def test_build_basis_too_small():
    with pytest.raises(ArgumentError):
        build_basis(0, 1)


def test_enantiomer_matrix_map():
    assert enantiomer_matrix_map(MatrixKind.FIELD_FREE) == 1
    assert enantiomer_matrix_map(MatrixKind.DIPOLE) == -1


def test_field_free_elements():
    mol = PROPANEDIOL
    assert field_free_element(mol, 0, 0, 0, 0) == 0.0
    assert field_free_element(mol, 1, 0, 1, 0) == pytest.approx(mol.B + mol.C)
    assert field_free_element(mol, 1, -1, 1, 1) == pytest.approx(0.5 * (mol.B - mol.C))
    assert field_free_element(mol, 1, 1, 1, -1) == pytest.approx(0.5 * (mol.B - mol.C))
    assert field_free_element(mol, 2, 0, 1, 0) == 0.0
    assert field_free_element(mol, 2, 0, 2, 1) == 0.0
    with pytest.raises(ArgumentError):
        field_free_element(mol, 1, 2, 1, 0)


def test_field_free_energies_J1():
    energies = np.linalg.eigvalsh(field_free_matrix(PROPANEDIOL, 1, 0))
    np.testing.assert_allclose(energies, [0.0, 6431.06, 11363.01, 12212.15], atol=1e-8)


@pytest.mark.parametrize("M", [0, 1, -1, 2])
def test_field_free_matrix(M):
    matrix = field_free_matrix(PROPANEDIOL, 5, M)
    np.testing.assert_array_equal(matrix, matrix.T)
    np.testing.assert_array_equal(matrix, field_free_matrix(PROPANEDIOL.mirrored(), 5, M))


def test_matrices_read_only():
    matrix = dipole_z_matrix(PROPANEDIOL, 2, 0)
    with pytest.raises(ValueError, match="read-only"):
        matrix[0, 0] = 1.0


def test_dipole_z_element():
    bra, ket = BasisState(1, 0, 0), BasisState(0, 0, 0)
    assert dipole_z_element(PROPANEDIOL, bra, ket) == pytest.approx(PROPANEDIOL.d_a / math.sqrt(3))
    assert dipole_z_element(PROPANEDIOL, BasisState(1, 0, 1), BasisState(1, 0, 0)) == 0
    assert dipole_z_element(PROPANEDIOL, BasisState(3, 0, 0), BasisState(1, 0, 0)) == 0


@pytest.mark.parametrize("M", [0, 1, -1])
def test_dipole_z_matrix(M):
    matrix = dipole_z_matrix(PROPANEDIOL, 6, M)
    scale = np.abs(matrix).max()
    np.testing.assert_allclose(matrix, matrix.conj().T, atol=1e-13 * scale)
    np.testing.assert_array_equal(dipole_z_matrix(PROPANEDIOL.mirrored(), 6, M), -matrix)


def test_dipole_z_matrix_time_reversal():
    # blocks M and -M only differ by signs of the basis states
    plus = dipole_z_matrix(PROPANEDIOL, 5, 1)
    minus = dipole_z_matrix(PROPANEDIOL, 5, -1)
    np.testing.assert_allclose(np.abs(plus), np.abs(minus), atol=1e-14)


@pytest.mark.parametrize("sign", [1, -1])
def test_dipole_sum_rule(sign):
    # |d|^2 / 3 = sum over final states of |<f| d.e |J=0>|^2, complete for J_max = 1
    column_z = dipole_z_matrix(PROPANEDIOL, 1, 0)[:, 0]
    column_pm = dipole_pm_matrix(PROPANEDIOL, 1, 0, sign)[:, 0]
    expected = dipole_squared(PROPANEDIOL) / 3
    assert np.sum(np.abs(column_z) ** 2) == pytest.approx(expected)
    assert np.sum(np.abs(column_pm) ** 2) == pytest.approx(expected)


@pytest.mark.parametrize("M", [-1, 0, 1])
def test_dipole_pm_adjoint(M):
    raising = dipole_pm_matrix(PROPANEDIOL, 5, M, 1)
    lowering = dipole_pm_matrix(PROPANEDIOL, 5, M + 1, -1)
    assert raising.shape == (len(build_basis(5, M + 1)), len(build_basis(5, M)))
    np.testing.assert_allclose(raising, -lowering.conj().T, atol=1e-14)


def test_dipole_pm_matrix_elements():
    matrix = dipole_pm_matrix(PROPANEDIOL, 3, 0, 1)
    bra_basis = build_basis(3, 1)
    ket_basis = build_basis(3, 0)
    for i, bra in enumerate(bra_basis):
        for j, ket in enumerate(ket_basis):
            assert matrix[i, j] == pytest.approx(dipole_pm_element(PROPANEDIOL, bra, ket, 1))


def test_dipole_pm_invalid_sign():
    with pytest.raises(ArgumentError):
        dipole_pm_element(PROPANEDIOL, BasisState(1, 0, 1), BasisState(0, 0, 0), 2)
    with pytest.raises(ArgumentError):
        dipole_pm_matrix(PROPANEDIOL, 2, 0, 0)


@pytest.mark.parametrize("J_max", [1, 3, 5])
@pytest.mark.parametrize("M", [-1, 0, 1])
def test_dipole_along_a_conserves_K(M, J_max):
    mol = MoleculeSpec(A=3000.0, B=2000.0, C=1500.0, d_a=1.5, d_b=0.0, d_c=0.0)
    basis = build_basis(J_max, M)
    z = dipole_z_matrix(mol, J_max, M)
    for i, bra in enumerate(basis):
        for j, ket in enumerate(basis):
            if bra.K != ket.K:
                assert z[i, j] == 0
    for sign in (1, -1):
        if abs(M + sign) > J_max:
            continue
        for bra in build_basis(J_max, M + sign):
            for ket in basis:
                if bra.K != ket.K:
                    assert dipole_pm_element(mol, bra, ket, sign) == 0
