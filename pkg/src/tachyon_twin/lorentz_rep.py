"""Boost representation U(L) on twin states.

Every occupation basis pair ``|n> (x) <n'|`` is written as a string of
creation-type generators on the twin vacuum: ``a_k^dagger (x) 1`` for ket
particles and ``1 (x) a*_k`` for bra particles.  A boost maps each generator
on its own:

* sign-preserving mode ``k -> l``: the generator keeps its side;
* sign-flipping mode ``k -> l'`` (``l'`` the spatial part of ``-L k``):
  ``a_k^dagger (x) 1 -> 1 (x) a*_l'`` and ``1 (x) a*_k -> a_l'^dagger (x) 1``.

The image string is re-applied to the (invariant) twin vacuum.  No phases are
attached to the generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import settings
from .fock import CREATE, FockState, OccBasisState, apply_ladder
from .kinematics import Flipped, LorentzTransform, ModeLabel, classify_mode_boost
from .twinspace import (
    TwinOperator,
    TwinState,
    apply_twin_operator,
    c_operator,
    dual_annihilate,
    ket_annihilate,
    ket_create,
    trace_functional,
    twin_distance,
    twin_inner,
)

KET = "ket"
BRA = "bra"


@dataclass(frozen=True)
class GeneratorString:
    """Ordered ``(side, label)`` creation generators acting on the twin vacuum."""

    generators: tuple
    scale: float = 1.0

    def __post_init__(self):
        if len(self.generators) > 2 * settings.current().n_max:
            raise ValueError("generator string longer than 2 * n_max")

    @classmethod
    def from_basis_pair(cls, ket: OccBasisState, bra: OccBasisState) -> "GeneratorString":
        gens = []
        norm = 1.0
        for side, key in ((KET, ket), (BRA, bra)):
            for lab, n in key.occupancy:
                gens.extend([(side, lab)] * n)
                norm *= math.factorial(n)
        return cls(tuple(gens), 1.0 / math.sqrt(norm))

    def apply_to_vacuum(self) -> TwinState:
        ket = FockState.vacuum()
        bra = FockState.vacuum()
        for side, lab in self.generators:
            if side == KET:
                ket = apply_ladder(ket, lab, CREATE)
            else:
                # 1 (x) a*_l creates on the stored bra vector
                bra = apply_ladder(bra, lab, CREATE)
        return TwinState.product(ket, bra, self.scale)

    def transformed(self, L: LorentzTransform, cache: dict | None = None) -> "GeneratorString":
        cache = {} if cache is None else cache
        out = []
        for side, lab in self.generators:
            if lab not in cache:
                cache[lab] = classify_mode_boost(L, lab)
            action = cache[lab]
            if isinstance(action, Flipped):
                side = BRA if side == KET else KET
            out.append((side, action.new_label))
        return GeneratorString(tuple(out), self.scale)


def represent_boost(L: LorentzTransform, s: TwinState) -> TwinState:
    """Apply ``U(L)`` to a twin state (linear, term by term)."""
    if L == LorentzTransform.identity():
        return s
    cache: dict[ModeLabel, object] = {}
    out = []
    for c, ket_key, bra_key in s.expand():
        image = GeneratorString.from_basis_pair(ket_key, bra_key).transformed(L, cache)
        ((a, ket, bra),) = image.apply_to_vacuum().terms
        out.append((c * a, ket, bra))
    return TwinState(tuple(out))


def conjugated(L: LorentzTransform, O: TwinOperator, s: TwinState) -> TwinState:
    """``U(L) O U(L)^-1`` applied to ``s``."""
    back = represent_boost(L.inverse(), s)
    return represent_boost(L, apply_twin_operator(O, back))


def vacuum_invariance_check(L: LorentzTransform) -> float:
    vac = TwinState.vacuum()
    return twin_distance(represent_boost(L, vac), vac)


def c_operator_image(L: LorentzTransform, k: ModeLabel) -> TwinOperator:
    """Expected image of ``c_k``: ``c_l`` if preserved, ``c_l'^dagger`` if flipped."""
    action = classify_mode_boost(L, k)
    l = action.new_label
    if isinstance(action, Flipped):
        return ket_create(l) + dual_annihilate(l)
    return c_operator(l)


def c_operator_transform_check(L: LorentzTransform, k: ModeLabel, test_states) -> float:
    """Max twin-norm residual of ``U c_k U^-1 s`` against the expected image."""
    ck = c_operator(k)
    image = c_operator_image(L, k)
    worst = 0.0
    for s in test_states:
        worst = max(worst, twin_distance(conjugated(L, ck, s), apply_twin_operator(image, s)))
    return worst


def _side_images(L: LorentzTransform, labels) -> list:
    return [classify_mode_boost(L, lab).new_label for lab in labels]


def basis_family(labels, max_total: int) -> list:
    """All basis twin states over ``labels`` on both sides with at most ``max_total`` particles."""
    labels = list(labels)
    slots = [(side, lab) for side in (KET, BRA) for lab in labels]
    family = []

    def rec(i, remaining, counts):
        if i == len(slots):
            ket = {lab: n for (side, lab), n in zip(slots, counts) if side == KET and n}
            bra = {lab: n for (side, lab), n in zip(slots, counts) if side == BRA and n}
            family.append(TwinState.product(FockState.basis(ket), FockState.basis(bra)))
            return
        for n in range(remaining + 1):
            rec(i + 1, remaining - n, counts + [n])

    rec(0, max_total, [])
    return family


def commutation_preservation_check(
    L: LorentzTransform,
    k: ModeLabel,
    l: ModeLabel,
    expected: float | None = None,
    family=None,
) -> float:
    """Max residual of ``[U(a_k (x) 1)U^-1, U(a_l^dagger (x) 1)U^-1] - delta_kl``.

    ``expected`` defaults to the Kronecker delta under the label tolerance;
    callers that know whether ``k`` and ``l`` are genuinely distinct should
    pass it explicitly.  The default family spans both sides over the images
    of ``k`` and ``l`` with room for one migrating particle below ``n_max``.
    """
    if expected is None:
        expected = 1.0 if k.matches(l) else 0.0
    if family is None:
        images = _side_images(L, [k, l])
        distinct = []
        for lab in images:
            if not any(lab.matches(o) for o in distinct):
                distinct.append(lab)
        family = basis_family(distinct, max(settings.current().n_max - 2, 0))
    X = ket_annihilate(k)
    Y = ket_create(l)
    worst = 0.0
    for s in family:
        xy = conjugated(L, X, conjugated(L, Y, s))
        yx = conjugated(L, Y, conjugated(L, X, s))
        worst = max(worst, twin_distance(xy - yx, expected * s))
    return worst


def trace_invariance_residual(L: LorentzTransform, s: TwinState) -> float:
    return abs(trace_functional(represent_boost(L, s)) - trace_functional(s))


def unitarity_residual(L: LorentzTransform, family) -> float:
    """Max entry of ``|<U a, U b> - <a, b>|`` over pairs from ``family``."""
    images = [represent_boost(L, s) for s in family]
    worst = 0.0
    for i, (a, ua) in enumerate(zip(family, images)):
        for b, ub in zip(family[i:], images[i:]):
            worst = max(worst, abs(twin_inner(ua, ub) - twin_inner(a, b)))
    return worst


def superposition_demo(L: LorentzTransform, stay: ModeLabel, migrate: ModeLabel):
    """Boost ``|0> (x) (<1_stay| + <1_migrate|)/sqrt 2``; returns ``(before, after)``.

    ``stay`` must keep its energy sign under ``L`` and ``migrate`` must flip,
    so the image is ``(|0> (x) <1_stay'| + |1_migrate'> (x) <0|)/sqrt 2``.
    """
    if isinstance(classify_mode_boost(L, stay), Flipped):
        raise ValueError("'stay' mode flips under this boost")
    if not isinstance(classify_mode_boost(L, migrate), Flipped):
        raise ValueError("'migrate' mode does not flip under this boost")
    bra = (FockState.single(stay) + FockState.single(migrate)) * (1 / np.sqrt(2))
    before = TwinState.product(FockState.vacuum(), bra)
    return before, represent_boost(L, before)
