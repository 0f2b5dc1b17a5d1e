"""
Command-line interface, every subcommand writes one CSV table.

Exit codes: 0 on success, 2 for configuration and argument errors, 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path
from typing import Callable, Sequence, TextIO

from enantiostark._config import DEFAULT_THETA_F_L, RunConfig
from enantiostark._dynamics import BeamDrive, FourLevelState, gamma_population, pbar_sweep
from enantiostark._exceptions import ArgumentError, ConfigError, NumericalError
from enantiostark._lindblad import DecayModel, absorption_sweep
from enantiostark._rotor import MoleculeSpec, get_preset
from enantiostark._selection import (
    TransitionTriple,
    converge_J_max_for_triple,
    coupling_coefficients,
    sweep_field,
)
from enantiostark._stark import converge_J_max, sweep_block
from enantiostark._utils import format_float

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

#: Marker for values that are undefined because a transition dipole vanishes
UNDEFINED = "undefined"

Row = Sequence[str]

#: Columns of every subcommand with their description
SCHEMAS: dict[str, tuple[tuple[str, str], ...]] = {
    "spectrum": (
        ("E0_kV_cm", "static field strength"),
        ("M", "lab-frame projection of the block"),
        ("xi", "level index within the block, ascending energy"),
        ("energy_MHz", "Stark energy"),
    ),
    "theta-f": (
        ("E0_kV_cm", "static field strength"),
        ("theta_f_L_rad", f"forbidden angle of the left-handed enantiomer or {UNDEFINED}"),
        ("theta_f_R_rad", f"forbidden angle of the right-handed enantiomer or {UNDEFINED}"),
        ("D", f"degree of enantiospecificity or {UNDEFINED}"),
    ),
    "dynamics": (
        ("t_us", "time"),
        ("P_gamma_L", "population of the final level, left-handed enantiomer"),
        ("P_gamma_R", "population of the final level, right-handed enantiomer"),
    ),
    "pbar": (
        ("theta_rad", "polarization angle of beam 2"),
        ("Pbar_gamma_L", "time-averaged population of the final level, left-handed enantiomer"),
        ("Pbar_gamma_R", "time-averaged population of the final level, right-handed enantiomer"),
    ),
    "absorption": (
        ("theta_rad", "polarization angle of beam 2"),
        ("A_L", "steady-state absorption of beam 2, left-handed enantiomer"),
        ("A_R", "steady-state absorption of beam 2, right-handed enantiomer"),
    ),
}


def _require(value, key: str):
    if value is None:
        raise ConfigError("Missing key", key=key)
    return value


def _molecule(config: RunConfig) -> MoleculeSpec:
    return _require(config.molecule, "molecule.preset")


def _triple(config: RunConfig) -> TransitionTriple:
    return _require(config.triple, "triple.alpha")


def _field_grid(config: RunConfig) -> tuple[float, ...]:
    if config.E0_grid is not None:
        return config.E0_grid
    return (_require(config.E0, "field.E0_grid_kV_cm"),)


def _J_max_for_triple(config: RunConfig, E0: float) -> int:
    if config.J_max is not None:
        return config.J_max
    return converge_J_max_for_triple(_molecule(config), E0, _triple(config), config.rel_tol)


def _theta_f_L(config: RunConfig) -> float:
    if config.theta_f_L is not None:
        return config.theta_f_L
    if config.molecule is not None and config.triple is not None and config.E0 is not None:
        J_max = _J_max_for_triple(config, config.E0)
        couplings = coupling_coefficients(config.molecule, config.E0, config.triple, J_max)
        logger.info("Forbidden angle from molecule: theta_f_L=%.6f rad", couplings.theta_f)
        return couplings.theta_f
    logger.info("Use default forbidden angle theta_f_L=%.6f rad", DEFAULT_THETA_F_L)
    return DEFAULT_THETA_F_L


def _drive(config: RunConfig, *, theta: float, Omega2: float) -> BeamDrive:
    return BeamDrive(
        Omega1=config.Omega1,
        Omega2=Omega2,
        Delta1=config.Delta1,
        Delta2=config.Delta2,
        theta=theta,
        theta_f=_theta_f_L(config),
    )


def cmd_spectrum(config: RunConfig) -> list[Row]:
    """Stark energies (E0, M, xi, energy) of the lowest levels of each block."""
    mol = _molecule(config)
    grid = _field_grid(config)
    J_max = config.J_max
    if J_max is None:
        J_max = max(
            converge_J_max(mol, max(grid), M, config.levels, config.rel_tol)
            for M in config.M_blocks
        )
    logger.info(
        "Spectrum of %d blocks at %d field points (J_max=%d)",
        len(config.M_blocks),
        len(grid),
        J_max,
    )
    chains = {M: sweep_block(mol, grid, M, J_max) for M in config.M_blocks}
    return [
        [format_float(E0), str(M), str(xi), format_float(system.energy(xi))]
        for index, E0 in enumerate(grid)
        for M in config.M_blocks
        for system in (chains[M][index],)
        for xi in range(1, min(config.levels, len(system)) + 1)
    ]


def cmd_theta_f(config: RunConfig) -> list[Row]:
    """Forbidden angles of both enantiomers and degree of enantiospecificity over E0."""
    grid = _field_grid(config)
    J_max = _J_max_for_triple(config, max(grid))
    rows = sweep_field(
        _molecule(config), _triple(config), grid, J_max, max_workers=config.max_workers
    )

    def cell(value: float | None) -> str:
        return UNDEFINED if value is None else format_float(value)

    return [
        [format_float(row.E0), cell(row.theta_f_L), cell(row.theta_f_R), cell(row.D)]
        for row in rows
    ]


def cmd_dynamics(config: RunConfig) -> list[Row]:
    """Population of the final level of both enantiomers over time."""
    theta = _require(config.theta, "drive.theta")
    drive = _drive(config, theta=theta, Omega2=config.Omega2)
    times = config.times()
    initial = FourLevelState.ground()
    P_L = gamma_population(drive, initial, times)
    P_R = gamma_population(drive.mirrored(), initial, times)
    return [
        [format_float(t), format_float(left), format_float(right)]
        for t, left, right in zip(times, P_L, P_R)
    ]


def cmd_pbar(config: RunConfig) -> list[Row]:
    """Time-averaged population of the final level of both enantiomers over beam-2 angles."""
    drive = _drive(config, theta=0.0, Omega2=config.Omega2)
    rows = pbar_sweep(
        drive, FourLevelState.ground(), config.thetas(), max_workers=config.max_workers
    )
    return [
        [format_float(row.theta), format_float(row.pbar_L), format_float(row.pbar_R)]
        for row in rows
    ]


def cmd_absorption(config: RunConfig) -> list[Row]:
    """Steady-state absorption of beam 2 by both enantiomers over beam-2 angles."""
    drive = _drive(config, theta=0.0, Omega2=config.probe_Omega2)
    rows = absorption_sweep(
        drive, DecayModel(config.kappa), config.thetas(), max_workers=config.max_workers
    )
    return [
        [format_float(row.theta), format_float(row.A_L), format_float(row.A_R)]
        for row in rows
    ]


COMMANDS: dict[str, Callable[[RunConfig], list[Row]]] = {
    "spectrum": cmd_spectrum,
    "theta-f": cmd_theta_f,
    "dynamics": cmd_dynamics,
    "pbar": cmd_pbar,
    "absorption": cmd_absorption,
}


def write_csv(stream: TextIO, header: Row, rows: Sequence[Row]):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def write_csv_file(path: Path, header: Row, rows: Sequence[Row]):
    """Write CSV atomically: the target is replaced only after the complete table is written."""
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as file:
            write_csv(file, header, rows)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def _J_max_argument(value: str) -> int | str:
    if value == "auto":
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integer or 'auto', got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="configuration file (dotted keys)")
    common.add_argument("--out", type=Path, help="output CSV file, default: output.path or stdout")
    common.add_argument("--schema", action="store_true", help="print the CSV columns and exit")
    common.add_argument("--preset", help="molecule preset, overrides molecule.* keys")
    common.add_argument(
        "--jmax", type=_J_max_argument, help="basis truncation N or 'auto', overrides basis.J_max"
    )
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug output"
    )

    parser = argparse.ArgumentParser(
        prog="enantiostark",
        description="Enantiospecific two-photon selection rules of chiral molecules",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, command in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=command.__doc__)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Read the configuration file and apply command-line overrides."""
    config = RunConfig()
    if args.config is not None:
        try:
            text = args.config.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot read configuration file: {e}") from e
        config = RunConfig.from_text(text)
    if args.preset is not None:
        config = replace(config, molecule=get_preset(args.preset))
    if args.jmax is not None:
        config = replace(config, J_max=None if args.jmax == "auto" else args.jmax)
    return config


def _log_level(verbosity: int) -> int:
    if verbosity >= 2:  # noqa: PLR2004
        return logging.DEBUG
    return logging.INFO if verbosity == 1 else logging.WARNING


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=_log_level(args.verbose), format="%(levelname)s %(name)s: %(message)s"
    )
    header = [column for column, _ in SCHEMAS[args.command]]

    if args.schema:
        write_csv(sys.stdout, ["column", "description"], SCHEMAS[args.command])
        return EXIT_OK

    try:
        config = load_config(args)
        rows = COMMANDS[args.command](config)
    except (ConfigError, ArgumentError) as e:
        logger.error("%s", e)  # noqa: TRY400
        return EXIT_CONFIG_ERROR
    except NumericalError as e:
        logger.error("%s", e)  # noqa: TRY400
        return EXIT_NUMERICAL_ERROR

    output = args.out if args.out is not None else config.output
    if output is None:
        write_csv(sys.stdout, header, rows)
    else:
        try:
            write_csv_file(Path(output), header, rows)
        except OSError as e:
            logger.error("Cannot write output file: %s", e)  # noqa: TRY400
            return EXIT_CONFIG_ERROR
        logger.info("Wrote %d rows to %s", len(rows), output)
    return EXIT_OK
