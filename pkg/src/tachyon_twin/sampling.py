"""Seeded random boosts, labels, states and operators for verification scans."""

from __future__ import annotations

import numpy as np

from . import settings
from .errors import DegenerateBoost
from .fock import FockOperator, FockState, Ladder
from .kinematics import Flipped, LorentzTransform, ModeLabel, boost, classify_mode_boost
from .twinspace import TwinOperator, TwinState


def random_direction(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_boost(rng: np.random.Generator, max_speed: float = 0.99) -> LorentzTransform:
    return boost(random_direction(rng), float(rng.uniform(-max_speed, max_speed)))


def random_label(rng: np.random.Generator, m: float = 1.0, k_max: float = 10.0) -> ModeLabel:
    """Tachyon label with ``|k|`` uniform in ``(1.05 m, k_max m)``."""
    size = rng.uniform(1.05, k_max) * m
    return ModeLabel(tuple(size * random_direction(rng)), m)


def nondegenerate_boost(rng, labels, max_speed=0.99, attempts=100) -> LorentzTransform:
    """A random boost that classifies every label without DegenerateBoost."""
    for _ in range(attempts):
        L = random_boost(rng, max_speed)
        try:
            for lab in labels:
                classify_mode_boost(L, lab)
        except DegenerateBoost:
            continue
        return L
    raise RuntimeError("could not draw a non-degenerate boost")


def random_fock_state(rng, labels, max_particles: int, terms: int = 3) -> FockState:
    """Superposition of up to ``terms`` random occupation states."""
    out = FockState.zero()
    for _ in range(terms):
        total = int(rng.integers(0, max_particles + 1))
        occ: dict[ModeLabel, int] = {}
        for _ in range(total):
            lab = labels[int(rng.integers(len(labels)))]
            occ[lab] = occ.get(lab, 0) + 1
        amp = complex(rng.normal(), rng.normal())
        out = out + FockState.basis(occ, amp)
    if out.is_zero():
        return FockState.vacuum()
    return out * (1.0 / out.norm())


def random_separable_state(rng, labels, max_particles: int) -> TwinState:
    alpha = complex(rng.normal(), rng.normal())
    return TwinState.product(
        random_fock_state(rng, labels, max_particles),
        random_fock_state(rng, labels, max_particles),
        alpha,
    )


def random_twin_state(rng, labels, max_particles: int, terms: int = 3) -> TwinState:
    out = TwinState.zero()
    for _ in range(terms):
        out = out + random_separable_state(rng, labels, max_particles)
    return out


def random_ladder_string(rng, labels, max_length: int = 3) -> tuple:
    n = int(rng.integers(0, max_length + 1))
    return tuple(
        Ladder(labels[int(rng.integers(len(labels)))], bool(rng.integers(2))) for _ in range(n)
    )


def random_fock_operator(rng, labels, max_length: int = 3, terms: int = 2) -> FockOperator:
    return FockOperator(tuple(
        (complex(rng.normal(), rng.normal()), random_ladder_string(rng, labels, max_length))
        for _ in range(terms)
    ))


def random_twin_operator(rng, labels, max_length: int = 3, terms: int = 2) -> TwinOperator:
    return TwinOperator(tuple(
        (random_fock_operator(rng, labels, max_length, 1), random_fock_operator(rng, labels, max_length, 1))
        for _ in range(terms)
    ))


def headroom(max_length: int = 3) -> int:
    """Particles a state may carry so ``max_length`` creations stay below n_max."""
    return max(settings.current().n_max - max_length, 0)


PRESERVED = "preserved"
FLIPPED = "flipped"
MIXED = "mixed"


def _boost_case(L, k, l) -> str | None:
    try:
        fk = isinstance(classify_mode_boost(L, k), Flipped)
        fl = isinstance(classify_mode_boost(L, l), Flipped)
    except DegenerateBoost:
        return None
    if fk and fl:
        return FLIPPED
    return MIXED if fk != fl else PRESERVED


def boost_case_triple(rng, case: str, m: float = 1.0, same: bool = False, attempts: int = 1000):
    """``(L, k, l)`` where ``L`` flips both, neither, or exactly one of ``k``, ``l``.

    Flips need a fast boost roughly along the mode, so those cases draw the
    boost axis near ``k`` and put ``l`` near ``k`` (flipped) or opposite to
    it (mixed).  ``same`` makes ``l`` the very same label as ``k``.
    """
    if case not in (PRESERVED, FLIPPED, MIXED):
        raise ValueError(f"unknown case {case!r}")
    if same and case == MIXED:
        raise ValueError("a single mode cannot be both flipped and preserved")
    for _ in range(attempts):
        k = random_label(rng, m, 3.0)
        n = k.vector / np.linalg.norm(k.vector)
        if case == PRESERVED:
            l = k if same else random_label(rng, m)
            L = random_boost(rng)
        else:
            sign = 1.0 if case == FLIPPED else -1.0
            if same:
                l = k
            else:
                d = sign * n + 0.2 * rng.normal(size=3)
                l = ModeLabel(tuple(rng.uniform(1.05, 3.0) * m * d / np.linalg.norm(d)), m)
            axis = n + 0.1 * rng.normal(size=3)
            L = boost(axis / np.linalg.norm(axis), float(rng.uniform(0.9, 0.99)))
        if _boost_case(L, k, l) == case:
            return L, k, l
    raise RuntimeError(f"could not draw a {case} boost case")
