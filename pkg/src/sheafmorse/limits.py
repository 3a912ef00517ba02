"""Resource ceilings (overridable by environment variable or CLI flag)."""

import os
from contextlib import contextmanager

from .errors import ResourceLimitError

DEFAULT_MAX_BAR = 500_000
DEFAULT_MAX_TWISTED = 10_000

_overrides: dict[str, int] = {}


def max_bar_generators() -> int:
    if "bar" in _overrides:
        return _overrides["bar"]
    return int(os.environ.get("SHEAFMORSE_MAX_BAR", DEFAULT_MAX_BAR))


def max_twisted_generators() -> int:
    if "twisted" in _overrides:
        return _overrides["twisted"]
    return int(os.environ.get("SHEAFMORSE_MAX_TWISTED", DEFAULT_MAX_TWISTED))


@contextmanager
def ceilings(bar: int | None = None, twisted: int | None = None):
    saved = dict(_overrides)
    if bar is not None:
        _overrides["bar"] = bar
    if twisted is not None:
        _overrides["twisted"] = twisted
    try:
        yield
    finally:
        _overrides.clear()
        _overrides.update(saved)


def check_twisted(n: int, what: str = "twisted complex"):
    cap = max_twisted_generators()
    if n > cap:
        raise ResourceLimitError(f"{what} would have {n} generators (ceiling {cap})")


def check_bar(n: int, what: str = "bar complex"):
    cap = max_bar_generators()
    if n > cap:
        raise ResourceLimitError(f"{what} would have {n} generators (ceiling {cap})")
