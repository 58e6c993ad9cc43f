"""Size caps and worker count, held in a context variable.

Every exhaustive search reads the active :class:`Limits`; callers change
them with :func:`limits` as a context manager.
"""
import contextlib
import contextvars
import dataclasses
import os


@dataclasses.dataclass(frozen=True)
class Limits:
    max_objects: int = 64
    max_morphisms: int = 512
    max_families: int = 1_000_000
    workers: int = 1


_active = contextvars.ContextVar("strata_limits", default=None)


def current():
    lim = _active.get()
    if lim is None:
        lim = Limits()
        env = os.environ.get("STRATA_MAX_FAMILIES")
        if env:
            lim = dataclasses.replace(lim, max_families=int(env))
    return lim


@contextlib.contextmanager
def limits(**overrides):
    """Temporarily override fields of the active limits."""
    token = _active.set(dataclasses.replace(current(), **overrides))
    try:
        yield current()
    finally:
        _active.reset(token)
