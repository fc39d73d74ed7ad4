"""Minkowski four-vectors, boosts and on-shell tachyon mode labels.

Metric signature is (+, -, -, -) throughout, so a tachyon of mass ``m`` sits
on the one-sheeted hyperboloid ``k.k = -m**2`` and the d'Alembertian is
``d_t**2 - laplacian``.  Readers used to the mostly-plus convention should
flip every sign of ``minkowski_dot``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import settings
from .errors import DegenerateBoost

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class FourVector:
    t: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "FourVector":
        a = np.asarray(a, dtype=float)
        if a.shape != (4,):
            raise ValueError(f"expected 4 components, got shape {a.shape}")
        return cls(*(float(c) for c in a))

    @property
    def spatial(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z])

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector.from_array(self.as_array() + other.as_array())

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector.from_array(self.as_array() - other.as_array())

    def __neg__(self) -> "FourVector":
        return FourVector(-self.t, -self.x, -self.y, -self.z)

    def __mul__(self, c: float) -> "FourVector":
        return FourVector.from_array(c * self.as_array())

    __rmul__ = __mul__


def minkowski_dot(a: FourVector, b: FourVector) -> float:
    return a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z


@dataclass(frozen=True, eq=False)
class LorentzTransform:
    """Proper orthochronous Lorentz matrix acting on column four-vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.array(self.matrix, dtype=float)
        if M.shape != (4, 4):
            raise ValueError("Lorentz matrix must be 4x4")
        scale = max(1.0, float(np.abs(M).max()) ** 2)
        if np.abs(M.T @ METRIC @ M - METRIC).max() > 1e-12 * scale:
            raise ValueError("matrix does not preserve the Minkowski metric")
        if M[0, 0] < 1.0 - 1e-12 or np.linalg.det(M) < 0:
            raise ValueError("matrix is not proper orthochronous")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @classmethod
    def identity(cls) -> "LorentzTransform":
        return cls(np.eye(4))

    def inverse(self) -> "LorentzTransform":
        return LorentzTransform(METRIC @ self.matrix.T @ METRIC)

    def __matmul__(self, other):
        if isinstance(other, LorentzTransform):
            return LorentzTransform(self.matrix @ other.matrix)
        if isinstance(other, FourVector):
            return FourVector.from_array(self.matrix @ other.as_array())
        return NotImplemented

    def apply(self, v: FourVector) -> FourVector:
        return self @ v

    def __eq__(self, other):
        if not isinstance(other, LorentzTransform):
            return NotImplemented
        return bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash(self.matrix.tobytes())


def boost(direction, speed: float) -> LorentzTransform:
    """Pure boost into the frame moving with velocity ``speed * direction``.

    A four-vector at rest picks up spatial momentum ``-gamma*speed`` along
    ``direction``.
    """
    n = np.asarray(direction, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValueError("boost direction must be a unit 3-vector")
    if not abs(speed) < 1.0:
        raise ValueError(f"unphysical boost speed {speed}; need |speed| < 1")
    gamma = 1.0 / math.sqrt(1.0 - speed * speed)
    M = np.eye(4)
    M[0, 0] = gamma
    M[0, 1:] = -gamma * speed * n
    M[1:, 0] = -gamma * speed * n
    M[1:, 1:] += (gamma - 1.0) * np.outer(n, n)
    return LorentzTransform(M)


def labels_match(a: np.ndarray, b: np.ndarray, tol: float | None = None) -> bool:
    """Relative-tolerance equality for 3-momenta."""
    if tol is None:
        tol = settings.current().label_tol
    scale = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)), 1e-300)
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b))) <= tol * scale


@dataclass(frozen=True)
class ModeLabel:
    """A positive-energy mode with exact real wave vector ``k``.

    Tachyonic labels (the default) need ``|k| >= m (1 + shell_margin)``;
    ``tachyonic=False`` gives an ordinary particle of mass ``m`` with
    ``omega = sqrt(|k|^2 + m^2)``, used for the subluminal species.
    """

    k: tuple
    m: float
    tachyonic: bool = True
    omega: float = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        k = tuple(float(c) for c in self.k)
        if len(k) != 3:
            raise ValueError("mode label needs a 3-vector")
        object.__setattr__(self, "k", k)
        if not self.m > 0:
            raise ValueError("mass must be positive")
        k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
        if self.tachyonic:
            margin = settings.current().shell_margin
            if math.sqrt(k2) < self.m * (1.0 + margin):
                raise ValueError(
                    f"|k| = {math.sqrt(k2):.12g} is inside the tachyon shell "
                    f"m(1+{margin:g}) = {self.m * (1 + margin):.12g}"
                )
            omega = math.sqrt(k2 - self.m * self.m)
        else:
            omega = math.sqrt(k2 + self.m * self.m)
        object.__setattr__(self, "omega", omega)

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.k)

    def four_momentum(self) -> FourVector:
        return FourVector(self.omega, *self.k)

    def matches(self, other: "ModeLabel", tol: float | None = None) -> bool:
        if self.tachyonic != other.tachyonic:
            return False
        if tol is None:
            tol = settings.current().label_tol
        if abs(self.m - other.m) > tol * max(self.m, other.m):
            return False
        return labels_match(self.vector, other.vector, tol)

    def sort_key(self):
        return (not self.tachyonic, self.m, self.k)


@dataclass(frozen=True)
class Preserved:
    new_label: ModeLabel


@dataclass(frozen=True)
class Flipped:
    new_label: ModeLabel


BoostAction = Union[Preserved, Flipped]


def threshold_speed(direction, k: ModeLabel) -> float | None:
    """Boost speed along ``direction`` at which ``k`` reaches zero energy."""
    kn = float(np.dot(np.asarray(direction, dtype=float), k.vector))
    if abs(kn) <= k.omega:
        return None
    return k.omega / kn


def classify_mode_boost(L: LorentzTransform, k: ModeLabel) -> BoostAction:
    """Decide whether ``L`` keeps the energy sign of ``k`` and relabel it.

    A flipped mode is reinterpreted through ``-L k`` so the returned label
    always carries positive energy.  Boosts that leave the image inside the
    zero-energy shell (energy below ``degenerate_tol * m`` or momentum inside
    the label margin) raise :class:`DegenerateBoost`.
    """
    if L == LorentzTransform.identity():
        return Preserved(k)
    cfg = settings.current()
    p = L.matrix @ k.four_momentum().as_array()
    energy = p[0]
    if abs(energy) <= cfg.degenerate_tol * k.m:
        raise DegenerateBoost(
            f"boost sends mode {k.k} to energy {energy:.3e} (|k'| = m)"
        )
    sign = 1.0 if energy > 0 else -1.0
    try:
        new = ModeLabel(tuple(sign * p[1:]), k.m, k.tachyonic)
    except ValueError as exc:
        raise DegenerateBoost(
            f"boost sends mode {k.k} to energy {energy:.3e}, inside the shell margin"
        ) from exc
    return Preserved(new) if sign > 0 else Flipped(new)
