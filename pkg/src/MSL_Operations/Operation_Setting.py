#-----------------------------------------------------------------------
# Purpose: Run configuration: command-line flags, environment and
#          usr/MSL-Lab/Settings/settings.ini resolved into one RunConfig
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-03-05
#-----------------------------------------------------------------------

import os
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

from MSL_Utils.Exceptions import ConfigError
from MSL_Utils.Utils import utils

#-----------------------------------------------------------------------
# QSettings is only needed to read the ini file
try:
    from PySide6.QtCore import QSettings
    QSETTINGS_AVAILABLE = True
except ImportError as e:
    QSETTINGS_AVAILABLE = False
    logging.warning(f"PySide6 not available, settings.ini is ignored: {e}")
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
@dataclass(frozen=True)
class RunConfig:
    grid: int = 4096
    trunc: int = 256
    tol_inner: float = 1e-6
    tol_algebra: float = 1e-8
    rank_tol: float = 1e-8
    exclude_cells: int = 1
    interior_points: int = 500
    interior_radius: float = 0.95
    seed: int = 0
    draws: int = 64
    write_xlsx: bool = False
    out: Optional[str] = None
    results_dir: Optional[str] = None

    def __post_init__(self):
        G = self.grid
        if G < 16 or (G & (G - 1)) != 0:
            raise ConfigError(f"Grid size must be a power of two >= 16, got {G}")
        if self.trunc < 8:
            raise ConfigError(f"Truncation degree must be at least 8, got {self.trunc}")
        if not -2 ** 63 <= self.seed < 2 ** 64:
            raise ConfigError(f"Seed {self.seed} is not a 64-bit integer")
        for name in ("tol_inner", "tol_algebra", "rank_tol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.exclude_cells < 0:
            raise ConfigError("exclude_cells must be nonnegative")
        if self.interior_points < 1 or not 0 < self.interior_radius < 1:
            raise ConfigError("Interior sampling needs at least one point inside the unit disc")
        if self.draws < 1:
            raise ConfigError("At least one random draw is needed")

    def echo(self) -> dict:
        """Config as written into reports; output locations are left out."""
        data = asdict(self)
        for key in ("out", "results_dir", "write_xlsx"):
            data.pop(key)
        return data
#-----------------------------------------------------------------------


#-----------------------------------------------------------------------
# (ini key, RunConfig field, converter)
INI_KEYS = [
    ("Numerics/grid", "grid", int),
    ("Numerics/trunc", "trunc", int),
    ("Numerics/tol_inner", "tol_inner", float),
    ("Numerics/tol_algebra", "tol_algebra", float),
    ("Numerics/rank_tol", "rank_tol", float),
    ("Numerics/exclude_cells", "exclude_cells", int),
    ("Numerics/interior_points", "interior_points", int),
    ("Numerics/interior_radius", "interior_radius", float),
    ("Random/seed", "seed", int),
    ("Random/draws", "draws", int),
    ("Output/write_xlsx", "write_xlsx", lambda v: str(v).strip().lower() in ("1", "true", "yes")),
    ("Output/results_dir", "results_dir", str),
]


def read_settings_file(path: Optional[Path] = None) -> dict:
    """Values present in settings.ini, converted to RunConfig field types."""
    path = Path(path) if path else utils.get_settings_path()
    if not path.exists():
        return {}
    if not QSETTINGS_AVAILABLE:
        logging.warning(f"Cannot read {path} without PySide6; using built-in defaults")
        return {}

    settings = QSettings(str(path), QSettings.Format.IniFormat)
    values = {}
    for key, name, convert in INI_KEYS:
        raw = settings.value(key, None)
        if raw is None or raw == "":
            continue
        try:
            values[name] = convert(raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{path}: bad value {raw!r} for {key}: {e}") from e
    return values


def load_run_config(overrides: Optional[dict] = None, settings_path: Optional[Path] = None) -> RunConfig:
    """
    Flags > MSL_DEFAULT_GRID (grid only) > settings.ini > defaults.
    `overrides` holds the flags that were given; None values are skipped.
    """
    values = read_settings_file(settings_path)

    env_grid = os.getenv("MSL_DEFAULT_GRID")
    if env_grid:
        try:
            values["grid"] = int(env_grid)
        except ValueError as e:
            raise ConfigError(f"MSL_DEFAULT_GRID={env_grid!r} is not an integer") from e

    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return RunConfig(**values)
#-----------------------------------------------------------------------
