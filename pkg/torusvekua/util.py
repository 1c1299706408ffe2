# -*- coding: utf-8 -*-
"""Shared helpers: run configuration, timing, errors and JSON formatting."""
import json
import logging
import math
import numbers
import os
from functools import wraps
from pathlib import Path
from time import perf_counter
from typing import Any, Callable, Dict, List, Optional, Union

import numpy as np

path_configs = Path(__file__).parent / "run_configs"
DEFAULT_RUN_CONFIG_FILE = str(path_configs / "default_run_config.json")
QUICK_RUN_CONFIG_FILE = str(path_configs / "quick_run_config.json")
THOROUGH_RUN_CONFIG_FILE = str(path_configs / "thorough_run_config.json")

RUN_CONFIGS = {
    "default": DEFAULT_RUN_CONFIG_FILE,
    "quick": QUICK_RUN_CONFIG_FILE,
    "thorough": THOROUGH_RUN_CONFIG_FILE,
}

TESTING_MODE = os.getenv("TESTING") is not None
ENV_THREADS = "TORUS_VEKUA_THREADS"

LOG_FORMAT = (
    "%(asctime)s %(levelname)s: (%(filename)s:%(lineno)s): %(message)s"
)
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class DomainError(ValueError):
    """An argument is outside the domain of the operation."""


class ScanLimitError(RuntimeError):
    """A scan or an exact computation exceeded its resource cap."""


class SpecFormatError(ValueError):
    """Malformed JSON input; `field` names the offending entry."""

    def __init__(self, field: str, msg: str = None) -> None:
        self.field = field
        super().__init__(msg or f"missing or invalid field '{field}'")


class IncompatibleDataError(ValueError):
    """Pu = f has no solution with the given Fourier modes."""

    def __init__(self, certificates: List[Dict]) -> None:
        self.certificates = certificates
        freqs = [tuple(c["xi"]) for c in certificates]
        super().__init__(f"incompatible data at frequencies {freqs}")


class SmallDivisorError(ArithmeticError):
    """A periodicity divisor vanished at frequency `xi`."""

    def __init__(self, xi, divisor: float) -> None:
        self.xi = tuple(int(v) for v in np.atleast_1d(xi))
        self.divisor = divisor
        super().__init__(
            f"small divisor {divisor:.3e} at xi={self.xi} "
            f"(condition (III) fails at this mode)"
        )


class ConditionError(ValueError):
    """The operator does not satisfy the hypotheses of the solver."""

    def __init__(self, msg: str, report: Optional[Dict] = None) -> None:
        self.report = report or {}
        super().__init__(msg)


# label -> elapsed seconds of every timed call since the last reset
TIMINGS: Dict[str, List[float]] = {}


def reset_timings() -> None:
    TIMINGS.clear()


def timings_summary() -> Dict[str, Dict[str, float]]:
    """Calls and total seconds per timed stage."""
    return {
        label: {"calls": len(times), "seconds": round(sum(times), 6)}
        for label, times in sorted(TIMINGS.items())
    }


def timeit(msg_log: str) -> Callable:
    """Log and record the wall time of every call of a scan or solver."""

    def _real_deco(func) -> Callable:
        @wraps(func)
        def _wrapper(*args, **kwargs):
            tic = perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                elapsed = perf_counter() - tic
                TIMINGS.setdefault(msg_log, []).append(elapsed)
                logging.info(f"{msg_log} took {elapsed:.3f} s")

        return _wrapper

    return _real_deco


def _merge_run_config(
    base: Optional[Dict], update: Dict, section: str = ""
) -> Dict:
    """Merge `update` over a run config, section by section.

    Unknown top-level sections are dropped with a warning, while sections
    accept new keys. Tolerances must be numbers.
    """
    if base is None:
        return update
    if section.count(".") > 1:
        raise SpecFormatError(section, f"run config nests too deep: {section}")
    for key, value in update.items():
        path = f"{section}.{key}" if section else key
        if key not in base and not section:
            logging.warning(f"Ignoring unknown run config section '{key}'")
            continue
        if isinstance(base.get(key), dict) and isinstance(value, dict):
            base[key] = _merge_run_config(base[key], value, path)
            continue
        if section == "tolerances":
            if isinstance(value, bool) or not isinstance(
                value, numbers.Real
            ):
                raise SpecFormatError(path, f"{path} must be a number")
            value = float(value)
        base[key] = value
    return base


def _read_run_config(name: str) -> Dict:
    """Read a run config given as a JSON path or a preset name."""
    if not name.endswith(".json"):
        if name not in RUN_CONFIGS:
            raise DomainError(
                f"Unknown run config '{name}'. "
                f"Use a JSON path or one of {sorted(RUN_CONFIGS)}"
            )
        name = RUN_CONFIGS[name]
    with open(name, encoding="utf-8") as f:
        return json.load(f)


def _load_config(
    new_config: Union[Dict, str] = None, default_config_file: str = None,
) -> Dict:
    """Load run parameters from a JSON file, a named preset or a dict."""
    config = None
    if default_config_file is not None:
        config = _read_run_config(default_config_file)
    if new_config is None:
        return config
    if isinstance(new_config, str):
        new_config = _read_run_config(new_config)
    elif not isinstance(new_config, dict):
        raise DomainError(f"Bad run config type: {type(new_config)}")
    return _merge_run_config(config, new_config)


def load_config(config: Optional[Union[Dict, str]] = None) -> Dict:
    """Load the run parameters, merged over the default run config."""
    return _load_config(config, default_config_file=DEFAULT_RUN_CONFIG_FILE)


def max_workers() -> int:
    """Worker cap for thread pools, from TORUS_VEKUA_THREADS."""
    value = os.getenv(ENV_THREADS)
    if value is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(value))
    except ValueError:
        logging.warning(f"Ignoring non-integer {ENV_THREADS}={value!r}")
        return 1


def _clean_float(value: float) -> Union[float, str]:
    if math.isfinite(value):
        return float(format(value, ".17g"))
    if math.isnan(value):
        return "nan"
    return "inf" if value > 0 else "-inf"


def to_jsonable(obj: Any) -> Any:
    """Convert numpy scalars/arrays, complex and non-finite floats to JSON."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _clean_float(obj.real), "im": _clean_float(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return _clean_float(float(obj))
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return obj


def dump_json(obj: Any, path: Union[str, Path] = None) -> str:
    """Deterministic JSON dump (sorted keys, fixed float format)."""
    text = json.dumps(to_jsonable(obj), indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    return text


def parse_complex(value: Any, field: str) -> complex:
    """Read a complex from a number or a {"re", "im"} mapping."""
    if isinstance(value, dict):
        if "re" not in value and "im" not in value:
            raise SpecFormatError(field)
        try:
            return complex(
                float(value.get("re", 0.0)), float(value.get("im", 0.0))
            )
        except (TypeError, ValueError):
            raise SpecFormatError(field)
    if isinstance(value, numbers.Number) and not isinstance(value, bool):
        return complex(value)
    raise SpecFormatError(field)
