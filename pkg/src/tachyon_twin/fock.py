"""Truncated bosonic Fock space over dynamically created mode labels.

Basis states are occupation maps ``{label: n}``; states are sparse complex
superpositions of them.  Ladder operators use the unit-norm convention
``[a_k, a_l^dagger] = delta_kl`` (Kronecker on labels, compared with the
relative tolerance ``settings.label_tol``).  The covariant operators with
``[a_k, a_k^dagger] = 2 omega_k (2 pi)^3 / dV`` are reached through
:class:`LadderConvention`.

A creation that would exceed ``settings.n_max`` particles raises
:class:`TruncationOverflow` rather than dropping the component.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from . import settings
from .errors import TruncationOverflow
from .kinematics import ModeLabel
from .modes import SpacetimePoint, WavePacket, mode_value

CREATE = "create"
ANNIHILATE = "annihilate"


@dataclass(frozen=True)
class OccBasisState:
    """Occupation-number basis vector, stored as sorted ``(label, n)`` pairs."""

    occupancy: tuple = ()

    def __post_init__(self):
        merged: list[list] = []
        for label, n in self.occupancy:
            n = int(n)
            if n < 0:
                raise ValueError("occupation numbers must be non-negative")
            for entry in merged:
                if entry[0].matches(label):
                    entry[1] += n
                    break
            else:
                merged.append([label, n])
        occ = tuple(sorted(((lab, n) for lab, n in merged if n > 0), key=lambda e: e[0].sort_key()))
        object.__setattr__(self, "occupancy", occ)

    @classmethod
    def from_mapping(cls, occ: Mapping[ModeLabel, int]) -> "OccBasisState":
        return cls(tuple(occ.items()))

    @property
    def total(self) -> int:
        return sum(n for _, n in self.occupancy)

    @property
    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self.occupancy)

    def find(self, label: ModeLabel):
        """Return the stored label matching ``label`` (tolerantly), or None."""
        for lab, _ in self.occupancy:
            if lab.matches(label):
                return lab
        return None

    def count(self, label: ModeLabel) -> int:
        for lab, n in self.occupancy:
            if lab.matches(label):
                return n
        return 0

    def with_count(self, label: ModeLabel, n: int) -> "OccBasisState":
        stored = self.find(label)
        rest = tuple((lab, c) for lab, c in self.occupancy if lab is not stored)
        if n > 0:
            rest = rest + ((stored if stored is not None else label, n),)
        return OccBasisState(rest)

    def matches(self, other: "OccBasisState") -> bool:
        if len(self.occupancy) != len(other.occupancy) or self.total != other.total:
            return False
        return all(other.count(lab) == n for lab, n in self.occupancy)

    def signature(self) -> tuple:
        return tuple(sorted(n for _, n in self.occupancy))

    def energy(self) -> float:
        return sum(n * lab.omega for lab, n in self.occupancy)

    def to_json(self) -> list:
        return [
            {"k": list(lab.k), "m": lab.m, "tachyonic": lab.tachyonic, "n": n}
            for lab, n in self.occupancy
        ]

    @classmethod
    def from_json(cls, data: list) -> "OccBasisState":
        return cls(tuple(
            (ModeLabel(tuple(d["k"]), d["m"], d.get("tachyonic", True)), d["n"]) for d in data
        ))


VACUUM = OccBasisState()


class FockState:
    """Immutable sparse superposition over :class:`OccBasisState` keys."""

    __slots__ = ("_amps",)

    def __init__(self, amplitudes: Mapping[OccBasisState, complex] | Iterable = ()):
        items = amplitudes.items() if isinstance(amplitudes, Mapping) else amplitudes
        prune = settings.current().prune
        buckets: dict[tuple, list] = defaultdict(list)
        merged: dict[OccBasisState, complex] = {}
        for key, amp in items:
            bucket = buckets[key.signature()]
            for existing in bucket:
                if existing == key or existing.matches(key):
                    merged[existing] += complex(amp)
                    break
            else:
                bucket.append(key)
                merged[key] = complex(amp)
        self._amps = MappingProxyType({k: a for k, a in merged.items() if abs(a) >= prune})

    @classmethod
    def vacuum(cls) -> "FockState":
        return cls({VACUUM: 1.0})

    @classmethod
    def zero(cls) -> "FockState":
        return cls({})

    @classmethod
    def basis(cls, occ: Mapping[ModeLabel, int] | OccBasisState, amplitude=1.0) -> "FockState":
        key = occ if isinstance(occ, OccBasisState) else OccBasisState.from_mapping(occ)
        if key.total > settings.current().n_max:
            raise TruncationOverflow(f"basis state has {key.total} > n_max particles")
        return cls({key: amplitude})

    @classmethod
    def single(cls, label: ModeLabel, amplitude=1.0) -> "FockState":
        return cls.basis({label: 1}, amplitude)

    @property
    def amplitudes(self) -> Mapping[OccBasisState, complex]:
        return self._amps

    def items(self):
        return self._amps.items()

    def __len__(self):
        return len(self._amps)

    def is_zero(self) -> bool:
        return not self._amps

    def amplitude(self, key: OccBasisState) -> complex:
        if key in self._amps:
            return self._amps[key]
        for k, a in self._amps.items():
            if k.matches(key):
                return a
        return 0j

    def __add__(self, other: "FockState") -> "FockState":
        return FockState(list(self.items()) + list(other.items()))

    def __sub__(self, other: "FockState") -> "FockState":
        return self + (-1.0) * other

    def __mul__(self, c) -> "FockState":
        c = complex(c)
        return FockState([(k, c * a) for k, a in self.items()])

    __rmul__ = __mul__

    def __neg__(self) -> "FockState":
        return (-1.0) * self

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._amps.values()))

    def max_particles(self) -> int:
        return max((k.total for k in self._amps), default=0)

    def labels(self) -> list:
        out: list[ModeLabel] = []
        for key in self._amps:
            for lab in key.labels:
                if not any(lab.matches(o) for o in out):
                    out.append(lab)
        return out

    def __repr__(self):
        parts = []
        for key, amp in self._amps.items():
            occ = ",".join(f"{n}@{tuple(round(c, 6) for c in lab.k)}" for lab, n in key.occupancy)
            parts.append(f"({amp:.6g})|{occ or '0'}>")
        return " + ".join(parts) or "0"

    def to_json(self) -> list:
        return [
            {"amplitude": [a.real, a.imag], "occupancy": key.to_json()}
            for key, a in self._amps.items()
        ]

    @classmethod
    def from_json(cls, data: list) -> "FockState":
        return cls([
            (OccBasisState.from_json(d["occupancy"]), complex(*d["amplitude"])) for d in data
        ])


def inner_product(a: FockState, b: FockState) -> complex:
    """``<a|b>``, antilinear in ``a``."""
    if len(a) > len(b):
        return inner_product(b, a).conjugate()
    return sum((amp.conjugate() * b.amplitude(key) for key, amp in a.items()), 0j)


def states_close(a: FockState, b: FockState, atol: float = 1e-12) -> bool:
    return (a - b).norm() <= atol


def _ladder_basis(key: OccBasisState, label: ModeLabel, kind: str):
    n = key.count(label)
    if kind == CREATE:
        if key.total + 1 > settings.current().n_max:
            raise TruncationOverflow(
                f"creating mode {label.k} on a {key.total}-particle state exceeds "
                f"n_max={settings.current().n_max}"
            )
        return key.with_count(label, n + 1), math.sqrt(n + 1)
    if kind == ANNIHILATE:
        if n == 0:
            return None, 0.0
        return key.with_count(label, n - 1), math.sqrt(n)
    raise ValueError(f"unknown ladder kind {kind!r}")


def apply_ladder(s: FockState, k: ModeLabel, kind: str) -> FockState:
    """Unit-norm creation (``sqrt(n+1)``) or annihilation (``sqrt(n)``) on mode ``k``."""
    out = []
    for key, amp in s.items():
        new, factor = _ladder_basis(key, k, kind)
        if new is not None:
            out.append((new, factor * amp))
    return FockState(out)


@dataclass(frozen=True)
class LadderConvention:
    """Cell volume ``dV`` converting unit-norm ladders to the covariant ones."""

    cell_volume: float

    def __post_init__(self):
        if not self.cell_volume > 0:
            raise ValueError("cell volume must be positive")

    def factor(self, k: ModeLabel) -> float:
        return math.sqrt(2.0 * k.omega * (2.0 * math.pi) ** 3 / self.cell_volume)

    def commutator_value(self, k: ModeLabel) -> float:
        """Finite-volume stand-in for ``2 omega (2 pi)^3 delta^3(0)``."""
        return self.factor(k) ** 2


def apply_covariant_ladder(s: FockState, k: ModeLabel, kind: str, convention: LadderConvention) -> FockState:
    return convention.factor(k) * apply_ladder(s, k, kind)


# -- operators as linear combinations of ladder strings -----------------------


@dataclass(frozen=True)
class Ladder:
    label: ModeLabel
    dagger: bool

    @property
    def kind(self) -> str:
        return CREATE if self.dagger else ANNIHILATE

    def adjoint(self) -> "Ladder":
        return Ladder(self.label, not self.dagger)


def create(label: ModeLabel) -> Ladder:
    return Ladder(label, True)


def annihilate(label: ModeLabel) -> Ladder:
    return Ladder(label, False)


@dataclass(frozen=True)
class FockOperator:
    """``sum_i c_i * (L_i1 L_i2 ... L_in)``; each product acts right to left."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self, "terms", tuple((complex(c), tuple(string)) for c, string in self.terms)
        )

    @classmethod
    def identity(cls) -> "FockOperator":
        return cls(((1.0, ()),))

    @classmethod
    def string(cls, *ladders: Ladder, coefficient=1.0) -> "FockOperator":
        return cls(((coefficient, ladders),))

    def adjoint(self) -> "FockOperator":
        return FockOperator(tuple(
            (c.conjugate(), tuple(l.adjoint() for l in reversed(s))) for c, s in self.terms
        ))

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(tuple(
            (c1 * c2, s1 + s2) for c1, s1 in self.terms for c2, s2 in other.terms
        ))

    def __add__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.terms + other.terms)

    def __mul__(self, c) -> "FockOperator":
        return FockOperator(tuple((complex(c) * a, s) for a, s in self.terms))

    __rmul__ = __mul__

    def __call__(self, s: FockState) -> FockState:
        return apply_operator(self, s)


def apply_operator(op: FockOperator, s: FockState) -> FockState:
    out = FockState.zero()
    for c, string in op.terms:
        t = s
        for ladder in reversed(string):
            t = apply_ladder(t, ladder.label, ladder.kind)
            if t.is_zero():
                break
        out = out + c * t
    return out


def free_hamiltonian_apply(s: FockState, m: float | None = None) -> FockState:
    """Normal-ordered ``H0 = sum_k omega_k n_k``; diagonal in the occupation basis."""
    out = []
    for key, amp in s.items():
        if m is not None:
            for lab in key.labels:
                if lab.tachyonic and abs(lab.m - m) > 1e-12 * m:
                    raise ValueError(f"label mass {lab.m} differs from m={m}")
        out.append((key, key.energy() * amp))
    return FockState(out)


def evolve_free(s: FockState, t: float) -> FockState:
    """``exp(-i H0 t)`` applied to ``s``."""
    return FockState([(key, amp * np.exp(-1j * key.energy() * t)) for key, amp in s.items()])


def smeared_field_operator(packet: WavePacket, x: SpacetimePoint) -> FockOperator:
    """``sum_terms (c u_k(x) a_k + c* u*_k(x) a_k^dagger)``.

    A conjugated packet term contributes with its coefficient conjugated, so
    the operator is hermitian in every case.
    """
    terms = []
    for c, lab, conj in packet.terms:
        coeff = c.conjugate() if conj else c
        u = mode_value(lab, x)
        terms.append((coeff * u, (annihilate(lab),)))
        terms.append((coeff.conjugate() * u.conjugate(), (create(lab),)))
    return FockOperator(tuple(terms))


def smeared_field_apply(s: FockState, packet: WavePacket, x: SpacetimePoint) -> FockState:
    return apply_operator(smeared_field_operator(packet, x), s)


def commutator_residual(s: FockState, k: ModeLabel, l: ModeLabel, expected: float) -> float:
    """``|| [a_k, a_l^dagger] s - expected * s ||``."""
    ak_al = apply_ladder(apply_ladder(s, l, CREATE), k, ANNIHILATE)
    al_ak = apply_ladder(apply_ladder(s, k, ANNIHILATE), l, CREATE)
    return (ak_al - al_ak - expected * s).norm()
