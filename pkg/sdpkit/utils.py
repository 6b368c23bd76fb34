import logging
import math
import os
import sys
from typing import Any, Optional, Union

import numpy as np

from sdpkit.typedefs import JSON

# significant digits kept on every emitted floating value
JSON_FLOAT_DIGITS = 12


def get_logger(name: str,
               level: Optional[Union[int, str]] = None,
               force_stdout: bool = False,
               message_format: Optional[str] = None,
               datetime_format: Optional[str] = None,
               file: Optional[str] = None,
               ) -> logging.Logger:
    """
    Immediately sets the logger level to avoid duplicate log outputs from the `root logger` and `this logger` when
    `level` is ``logging.NOTSET``.
    """
    logger = logging.getLogger(name)
    if logger.level == logging.NOTSET:
        # use log level if it was specified via ini config with logger sections, or the package level
        parent_module = os.path.split(os.path.dirname(__file__))[-1]
        level = level or logging.getLogger(parent_module).getEffectiveLevel() or logging.INFO
    if force_stdout or message_format or datetime_format or file:
        set_logger_config(logger, level, force_stdout, message_format, datetime_format, file)
    return logger


def set_logger_config(logger: logging.Logger,
                      level: Optional[Union[int, str]] = None,
                      force_stdout: bool = False,
                      message_format: Optional[str] = None,
                      datetime_format: Optional[str] = None,
                      file: Optional[str] = None,
                      ) -> logging.Logger:
    """
    Applies the provided logging configuration settings to the logger.

    Reports are written on ``stdout``, so a stream handler is only attached to it when explicitly requested with
    ``force_stdout``. Otherwise messages go to ``stderr``.
    """
    if not logger:
        return logger
    if not level:
        level = logging.INFO
    logger.setLevel(level)
    formatter = None
    if message_format or datetime_format:
        formatter = logging.Formatter(fmt=message_format, datefmt=datetime_format)
    handlers = [h for h in logger.handlers if not isinstance(h, logging.FileHandler)]
    if force_stdout and not any(getattr(h, "stream", None) is sys.stdout for h in handlers):
        handlers.append(logging.StreamHandler(sys.stdout))
        logger.addHandler(handlers[-1])
    if not handlers:
        handlers.append(logging.StreamHandler(sys.stderr))
        logger.addHandler(handlers[-1])
    if formatter:
        for handler in handlers:
            handler.setFormatter(formatter)
    if file:
        handler = logging.FileHandler(file)
        if formatter:
            handler.setFormatter(formatter)
        logger.addHandler(handler)
    return logger


def round_significant(value: float, digits: int = JSON_FLOAT_DIGITS) -> float:
    """
    Rounds a float to the requested number of significant digits.

    :raises ValueError: when the value is not finite, since it cannot be represented in the JSON reports.
    """
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"Cannot serialize non-finite value: [{value!s}]")
    if value == 0.0:
        return 0.0
    return float(f"{value:.{digits}g}")


def json_ready(value: Any, digits: int = JSON_FLOAT_DIGITS) -> JSON:
    """
    Converts numpy containers and scalars recursively into plain JSON types with rounded floats.
    """
    if isinstance(value, np.ndarray):
        return json_ready(value.tolist(), digits)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return round_significant(value, digits)
    if isinstance(value, dict):
        return {str(key): json_ready(val, digits) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_ready(item, digits) for item in value]
    if hasattr(value, "json") and callable(value.json):
        return json_ready(value.json(), digits)
    if value is None or isinstance(value, str):
        return value
    return str(value)


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    """
    Random generator keyed by ``(seed, trial)``, independent of the order or thread in which trials are drawn.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial, )))
