"""Numerical tolerances shared by the kinematics, Fock and twin-space modules.

Values live in a context variable so that a single verification run (or a
thread) can override them without touching global state::

    with using(n_max=6, label_tol=1e-8):
        ...
"""

from __future__ import annotations

import contextlib
import contextvars
import dataclasses
from dataclasses import dataclass


@dataclass(frozen=True)
class Settings:
    n_max: int = 4
    label_tol: float = 1e-9
    prune: float = 1e-14
    shell_margin: float = 1e-6
    degenerate_tol: float = 1e-9

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("n_max must be non-negative")
        for name in ("label_tol", "prune", "shell_margin", "degenerate_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


_current: contextvars.ContextVar[Settings] = contextvars.ContextVar(
    "tachyon_twin_settings", default=Settings()
)


def current() -> Settings:
    return _current.get()


@contextlib.contextmanager
def using(**overrides):
    """Temporarily replace fields of the active settings."""
    token = _current.set(dataclasses.replace(_current.get(), **overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)
