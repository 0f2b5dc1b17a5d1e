# ruff: noqa: F401

from enantiostark._angular import wigner3j
from enantiostark._cli import main
from enantiostark._config import RunConfig, parse_angle, parse_angle_grid, parse_grid
from enantiostark._dynamics import (
    BeamDrive,
    FourLevelState,
    PbarRow,
    build_rotating_hamiltonian,
    evolve,
    gamma_population,
    pbar_sweep,
    rabi_frequencies,
    time_averaged_P_gamma,
)
from enantiostark._exceptions import (
    ArgumentError,
    ConfigError,
    ConvergenceError,
    DegeneracyError,
    EigensolverError,
    NumericalError,
    SimulationError,
    SteadyStateError,
    UnknownPresetError,
    VanishingDipoleError,
)
from enantiostark._lindblad import (
    AbsorptionRow,
    DecayModel,
    DensityMatrix4,
    absorption,
    absorption_sweep,
    build_liouvillian,
    steady_state,
)
from enantiostark._rotor import (
    DEBYE_KV_CM_MHZ,
    PRESETS,
    BasisState,
    Handedness,
    MatrixKind,
    MoleculeSpec,
    SphericalDipole,
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
from enantiostark._selection import (
    CascadeOrdering,
    CouplingSet,
    FieldSweepRow,
    TransitionTriple,
    cascade_ordering,
    converge_J_max_for_triple,
    coupling_coefficients,
    coupling_from_eigensystems,
    degree_of_enantiospecificity,
    dressed_state,
    effective_two_photon_coupling,
    forbidden_angle,
    forbidden_direction,
    polarization_direction,
    sweep_field,
)
from enantiostark._stark import (
    StarkEigensystem,
    converge_J_max,
    diagonalize_block,
    stark_hamiltonian,
    sweep_block,
)
from enantiostark._utils import format_float, map_ordered, wrap_angle
