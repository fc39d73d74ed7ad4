"""Tachyon plane-wave modes, the Wronskian product and the mode boost law.

Modes are normalized exactly as ``exp(i(k.r - omega t)) / ((2 pi)^3 2 omega)``.
With that prefactor the Wronskian of a mode with itself is proportional to a
delta function rather than equal to one; the constant is exposed by
:func:`wronskian_norm` instead of being silently divided out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import settings
from .errors import IncommensurateMode
from .kinematics import (
    FourVector,
    Flipped,
    LorentzTransform,
    ModeLabel,
    classify_mode_boost,
)

TWO_PI_CUBED = (2.0 * math.pi) ** 3


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    r: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "r", tuple(float(c) for c in self.r))

    def four_vector(self) -> FourVector:
        return FourVector(self.t, *self.r)

    @classmethod
    def from_four_vector(cls, v: FourVector) -> "SpacetimePoint":
        return cls(v.t, (v.x, v.y, v.z))


@dataclass(frozen=True)
class WavePacket:
    """Finite superposition of modes ``u_k`` (or ``u*_k`` when conjugated)."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((complex(c), lab, bool(conj)) for c, lab, conj in self.terms)
        if not terms:
            raise ValueError("a wave packet needs at least one term")
        for _, lab, _ in terms:
            if not isinstance(lab, ModeLabel):
                raise TypeError("wave packet labels must be ModeLabel instances")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, label: ModeLabel, coefficient=1.0, conjugated=False):
        return cls(((coefficient, label, conjugated),))

    def conjugate(self) -> "WavePacket":
        return WavePacket(tuple((c.conjugate(), lab, not conj) for c, lab, conj in self.terms))

    def __call__(self, x: SpacetimePoint) -> complex:
        total = 0j
        for c, lab, conj in self.terms:
            u = mode_value(lab, x)
            total += c * (u.conjugate() if conj else u)
        return total


def mode_prefactor(k: ModeLabel) -> float:
    return 1.0 / (TWO_PI_CUBED * 2.0 * k.omega)


def mode_value(k: ModeLabel, x: SpacetimePoint) -> complex:
    phase = float(np.dot(k.vector, x.r)) - k.omega * x.t
    return mode_prefactor(k) * complex(math.cos(phase), math.sin(phase))


def kg_residual(k: ModeLabel, x: SpacetimePoint, h: float) -> complex:
    """Central-difference estimate of ``(d_t^2 - laplacian - m^2) u_k`` at ``x``."""
    if not h > 0:
        raise ValueError("step must be positive")
    u0 = mode_value(k, x)

    def shifted(dt=0.0, dr=(0.0, 0.0, 0.0)):
        return mode_value(k, SpacetimePoint(x.t + dt, np.add(x.r, dr)))

    d2t = (shifted(dt=h) - 2 * u0 + shifted(dt=-h)) / h**2
    lap = 0j
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = h
        lap += (shifted(dr=e) - 2 * u0 + shifted(dr=-e)) / h**2
    return d2t - lap - k.m**2 * u0


def _box_indices(label: ModeLabel, box_length: float) -> np.ndarray:
    n = label.vector * box_length / (2.0 * math.pi)
    idx = np.rint(n)
    tol = settings.current().label_tol
    if np.abs(n - idx).max() > tol * max(1.0, float(np.abs(n).max())):
        raise IncommensurateMode(
            f"mode {label.k} is not a multiple of 2 pi / {box_length}"
        )
    return idx.astype(int)


def wronskian(f: WavePacket, g: WavePacket, box_length: float, grid_points: int) -> complex:
    """``i * integral d^3r (f* d_t g - d_t f* g)`` at t = 0 over a periodic box.

    The integral is a plain Riemann sum over ``grid_points**3`` nodes, which is
    exact for commensurate plane waves when the grid resolves every index
    difference.  Antilinear in ``f``.
    """
    max_index = 0
    for _, lab, _ in f.terms + g.terms:
        max_index = max(max_index, int(np.abs(_box_indices(lab, box_length)).max()))
    if grid_points < 2 * max_index + 1:
        raise ValueError(
            f"grid_points={grid_points} cannot resolve mode index {max_index}"
        )
    axis = np.arange(grid_points) * (box_length / grid_points)
    X, Y, Z = np.meshgrid(axis, axis, axis, indexing="ij")
    cell = (box_length / grid_points) ** 3

    def field_and_rate(p: WavePacket):
        val = np.zeros(X.shape, dtype=complex)
        rate = np.zeros(X.shape, dtype=complex)
        for c, lab, conj in p.terms:
            kx, ky, kz = lab.k
            sgn = -1.0 if conj else 1.0
            wave = mode_prefactor(lab) * np.exp(sgn * 1j * (kx * X + ky * Y + kz * Z))
            val += c * wave
            rate += c * (-sgn * 1j * lab.omega) * wave
        return val, rate

    fv, fr = field_and_rate(f)
    gv, gr = field_and_rate(g)
    return complex(1j * np.sum(fv.conj() * gr - fr.conj() * gv) * cell)


def wronskian_norm(k: ModeLabel, box_length: float) -> float:
    """Closed form of ``(u_k, u_k)`` in a periodic box of side ``box_length``."""
    return box_length**3 / ((2.0 * math.pi) ** 6 * 2.0 * k.omega)


def _boost_pair(L: LorentzTransform, k: ModeLabel, x: SpacetimePoint):
    action = classify_mode_boost(L, k)
    x_back = SpacetimePoint.from_four_vector(L.inverse() @ x.four_vector())
    lhs = mode_value(k, x_back)
    target = mode_value(action.new_label, x)
    if isinstance(action, Flipped):
        target = target.conjugate()
    return action, lhs, target


def mode_boost_prefactor_ratio(L: LorentzTransform, k: ModeLabel) -> float:
    """Ratio of the ``1/(2 omega)`` prefactors of ``u_k`` and its boosted image."""
    action = classify_mode_boost(L, k)
    return action.new_label.omega / k.omega


def mode_boost_residual(L: LorentzTransform, k: ModeLabel, x: SpacetimePoint) -> float:
    """Relative mismatch between ``u_k(L^-1 x)`` and its boosted image at ``x``.

    The image is ``u_l(x)`` for a sign-preserving boost and ``u*_l'(x)`` for a
    sign-flipping one.  Its prefactor is rescaled by
    :func:`mode_boost_prefactor_ratio` first, so what remains is
    ``|1 - exp(i dphi)|``, i.e. the phase discrepancy.
    """
    action, lhs, target = _boost_pair(L, k, x)
    ratio = action.new_label.omega / k.omega
    return abs(lhs - ratio * target) / abs(lhs)


def mode_boost_phase_residual(L: LorentzTransform, k: ModeLabel, x: SpacetimePoint) -> float:
    """Wrapped difference of complex arguments, in radians."""
    _, lhs, target = _boost_pair(L, k, x)
    return abs(math.remainder(math.atan2(lhs.imag, lhs.real) - math.atan2(target.imag, target.real), 2 * math.pi))
