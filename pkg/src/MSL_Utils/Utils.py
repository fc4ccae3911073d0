#***********************************************************************
# Very important: you need to use usr_dir when you want to save data
# Reports, logs and settings all live under usr/MSL-Lab
#***********************************************************************

import sys
import os
import re
import json
import time
import logging
from fractions import Fraction
from pathlib import Path

import numpy as np


LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


class utils:

    #--------------------------------------------------------------
    # For global dynamic files (project-wide user data)
    @staticmethod
    def get_global_usr_dir():
        """
        Get the global user data directory for the entire project.
        Base path: .../usr/MSL-Lab/ (at project root level)
        Fallback: ~/.msl-lab/usr if the local dir is not writable
        """
        override = os.getenv("MSL_USR_DIR")
        if override:
            usr_dir = Path(override)
        elif getattr(sys, 'frozen', False):
            usr_dir = Path(sys.executable).parent / "usr" / "MSL-Lab"
        else:
            usr_dir = Path(__file__).resolve().parent.parent.parent / "usr" / "MSL-Lab"

        try:
            usr_dir.mkdir(parents=True, exist_ok=True)
            test_file = usr_dir / ".write_test"
            test_file.touch()
            test_file.unlink()
        except (PermissionError, OSError) as e:
            fallback = Path.home() / ".msl-lab" / "usr"
            fallback.mkdir(parents=True, exist_ok=True)
            print(f"[WARN] Failed to use usr dir {usr_dir} ({e}), using {fallback}")
            usr_dir = fallback

        return usr_dir
    #--------------------------------------------------------------

    #--------------------------------------------------------------
    # For Results directory
    @staticmethod
    def get_results_dir():
        """
        Get the results directory.
        Base path: .../usr/MSL-Lab/Results/
        """
        results_dir = utils.get_global_usr_dir() / "Results"
        results_dir.mkdir(parents=True, exist_ok=True)
        return results_dir
    #--------------------------------------------------------------

    #--------------------------------------------------------------
    @staticmethod
    def get_settings_path():
        return utils.get_global_usr_dir() / "Settings" / "settings.ini"
    #--------------------------------------------------------------

    #--------------------------------------------------------------
    @staticmethod
    def setup_logging(verbose=False):
        """
        Configure the root logger with a file handler in usr/MSL-Lab/msl.log
        and a console handler. Only warnings and errors unless verbose.
        """
        handlers = []
        try:
            log_path = utils.get_global_usr_dir() / "msl.log"
            handlers.append(logging.FileHandler(str(log_path), encoding='utf-8'))
        except OSError as e:
            print(f"[WARN] File logging disabled: {e}")

        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.DEBUG)
        handlers.append(console_handler)

        logging.basicConfig(
            level=logging.INFO if verbose else logging.WARNING,
            format=LOG_FORMAT,
            handlers=handlers,
            force=True,
        )
    #--------------------------------------------------------------

    #--------------------------------------------------------------
    @staticmethod
    def sanitize_filename(name: str) -> str:
        """
        Replace invalid characters for Windows file names with '_'.
        """
        return re.sub(r'[<>:"/\\|?*\s]', "_", name)
    #--------------------------------------------------------------

    #--------------------------------------------------------------
    @staticmethod
    def timestamped_result_path(command: str, suffix=".json") -> Path:
        timestamp = time.strftime("%Y%m%d_%H%M%S")
        filename = f"{utils.sanitize_filename(command)}_{timestamp}{suffix}"
        return utils.get_results_dir() / filename
    #--------------------------------------------------------------


    # ================================================================
    # SECTION: JSON conversion of numerical values
    # ================================================================

    #--------------------------------------------------------------
    @staticmethod
    def complex_to_pair(value):
        value = complex(value)
        return [float(value.real), float(value.imag)]
    #--------------------------------------------------------------

    #--------------------------------------------------------------
    @staticmethod
    def pair_to_complex(pair):
        """
        Accept [re, im], a bare real number, or {"re": .., "im": ..}.
        """
        if isinstance(pair, (int, float)):
            return complex(pair)
        if isinstance(pair, dict):
            return complex(float(pair.get("re", 0.0)), float(pair.get("im", 0.0)))
        if isinstance(pair, (list, tuple)) and len(pair) == 2:
            return complex(float(pair[0]), float(pair[1]))
        raise ValueError(f"Expected a [re, im] pair, got {pair!r}")
    #--------------------------------------------------------------

    #--------------------------------------------------------------
    @staticmethod
    def to_jsonable(obj):
        """
        Recursively convert numpy scalars/arrays, complex numbers and
        Fractions into plain JSON values. Complex -> [re, im],
        Fraction -> [num, den].
        """
        if isinstance(obj, dict):
            return {str(k): utils.to_jsonable(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [utils.to_jsonable(v) for v in obj]
        if isinstance(obj, np.ndarray):
            return [utils.to_jsonable(v) for v in obj.tolist()]
        if isinstance(obj, Fraction):
            return [obj.numerator, obj.denominator]
        if isinstance(obj, (bool, np.bool_)):
            return bool(obj)
        if isinstance(obj, (int, np.integer)):
            return int(obj)
        if isinstance(obj, (float, np.floating)):
            value = float(obj)
            if not np.isfinite(value):
                return str(value)
            return value
        if isinstance(obj, (complex, np.complexfloating)):
            return utils.complex_to_pair(obj)
        if isinstance(obj, Path):
            return str(obj)
        return obj
    #--------------------------------------------------------------

    #--------------------------------------------------------------
    @staticmethod
    def dump_json(data) -> str:
        return json.dumps(utils.to_jsonable(data), sort_keys=True, indent=2, ensure_ascii=False)
    #--------------------------------------------------------------
