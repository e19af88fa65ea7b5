"""Logarithm used in every size formula (natural by default).

The base is process-wide state so the CLI ``--log-base`` flag reaches every
formula without threading a parameter through each call.
"""
from __future__ import annotations

import contextlib
import math

_BASES = {"natural": math.e, "binary": 2.0}
_current = "natural"


def set_log_base(name: str) -> None:
    global _current
    if name not in _BASES:
        raise ValueError(f"unknown log base {name!r}; expected one of {sorted(_BASES)}")
    _current = name


def get_log_base() -> str:
    return _current


@contextlib.contextmanager
def log_base(name: str):
    previous = _current
    set_log_base(name)
    try:
        yield
    finally:
        set_log_base(previous)


def plog(x: float) -> float:
    if _current == "natural":
        return math.log(x)
    return math.log(x, _BASES[_current])


def ploglog(x: float) -> float:
    return plog(plog(x))
