"""States and operators on the twin space F (x) F*.

A twin state is a finite sum ``sum_j alpha_j |psi_j> (x) <xi_j|``.  The bra
factor is stored as the ordinary ket ``|xi_j>`` whose dual it is, so a dual
operator ``O^{dagger *}`` on the bra side is realised by applying ``O`` to the
stored vector: ``<xi| O^dagger = (O |xi>)^dagger``.  In particular the dual
creation operator ``a*_k`` (``a*_k <0| = <1_k|``) acts on the stored vector as
``a_k^dagger`` and ``a*^dagger_k`` acts as ``a_k``.

The twin-space inner product is ``<psi|psi'> <xi'|xi>`` on product terms.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from . import settings
from .fock import (
    FockOperator,
    FockState,
    OccBasisState,
    annihilate,
    apply_operator,
    create,
    inner_product,
    smeared_field_operator,
)
from .kinematics import ModeLabel
from .modes import SpacetimePoint, WavePacket


@dataclass(frozen=True, eq=False)
class TwinState:
    terms: tuple = ()

    def __post_init__(self):
        prune = settings.current().prune
        kept = []
        for alpha, ket, bra in self.terms:
            alpha = complex(alpha)
            if abs(alpha) * ket.norm() * bra.norm() >= prune:
                kept.append((alpha, ket, bra))
        object.__setattr__(self, "terms", tuple(kept))

    @classmethod
    def product(cls, ket: FockState, bra: FockState, alpha=1.0) -> "TwinState":
        return cls(((alpha, ket, bra),))

    @classmethod
    def vacuum(cls) -> "TwinState":
        return cls.product(FockState.vacuum(), FockState.vacuum())

    @classmethod
    def zero(cls) -> "TwinState":
        return cls(())

    def __add__(self, other: "TwinState") -> "TwinState":
        return TwinState(self.terms + other.terms)

    def __sub__(self, other: "TwinState") -> "TwinState":
        return self + (-1.0) * other

    def __mul__(self, c) -> "TwinState":
        return TwinState(tuple((complex(c) * a, k, b) for a, k, b in self.terms))

    __rmul__ = __mul__

    def expand(self) -> list:
        """Flatten into ``(coefficient, ket_key, bra_key)`` basis pairs."""
        out = []
        for alpha, ket, bra in self.terms:
            for kk, ka in ket.items():
                for bk, ba in bra.items():
                    out.append((alpha * ka * ba.conjugate(), kk, bk))
        return out

    def simplify(self) -> "TwinState":
        """Regroup as one product term per basis pair."""
        idx = _BasisIndex()
        acc: dict[tuple, complex] = defaultdict(complex)
        keys = {}
        for c, kk, bk in self.expand():
            i, j = idx.ket(kk), idx.bra(bk)
            acc[i, j] += c
            keys[i, j] = (idx.kets[i], idx.bras[j])
        return TwinState(tuple(
            (c, FockState({keys[ij][0]: 1.0}), FockState({keys[ij][1]: 1.0}))
            for ij, c in acc.items()
        ))

    def max_side_particles(self) -> int:
        return max((max(k.max_particles(), b.max_particles()) for _, k, b in self.terms), default=0)

    def __repr__(self):
        return " + ".join(f"({a:.6g}) {k!r} (x) <{b!r}|" for a, k, b in self.terms) or "0"

    def to_json(self) -> dict:
        return {"terms": [
            {"alpha": [a.real, a.imag], "ket": k.to_json(), "bra": b.to_json()}
            for a, k, b in self.terms
        ]}

    @classmethod
    def from_json(cls, data: dict) -> "TwinState":
        return cls(tuple(
            (complex(*t["alpha"]), FockState.from_json(t["ket"]), FockState.from_json(t["bra"]))
            for t in data["terms"]
        ))


class _BasisIndex:
    """Tolerant index of occupation basis keys for the two tensor factors."""

    def __init__(self):
        self.kets: list[OccBasisState] = []
        self.bras: list[OccBasisState] = []
        self._ket_buckets = defaultdict(list)
        self._bra_buckets = defaultdict(list)

    @staticmethod
    def _lookup(key, keys, buckets):
        bucket = buckets[key.signature()]
        for i in bucket:
            if keys[i] == key or keys[i].matches(key):
                return i
        keys.append(key)
        bucket.append(len(keys) - 1)
        return len(keys) - 1

    def ket(self, key):
        return self._lookup(key, self.kets, self._ket_buckets)

    def bra(self, key):
        return self._lookup(key, self.bras, self._bra_buckets)


def coefficient_matrices(*states: TwinState) -> list:
    """Coefficient matrices ``C[i, j]`` of ``sum C_ij |i> (x) <j|`` on a shared basis."""
    idx = _BasisIndex()
    entries = []
    for s in states:
        entries.append([(c, idx.ket(kk), idx.bra(bk)) for c, kk, bk in s.expand()])
    shape = (max(len(idx.kets), 1), max(len(idx.bras), 1))
    mats = []
    for rows in entries:
        C = np.zeros(shape, dtype=complex)
        for c, i, j in rows:
            C[i, j] += c
        mats.append(C)
    return mats


def twin_inner(a: TwinState, b: TwinState) -> complex:
    Ca, Cb = coefficient_matrices(a, b)
    return complex(np.vdot(Ca, Cb))


def twin_norm(s: TwinState) -> float:
    (C,) = coefficient_matrices(s)
    return float(np.linalg.norm(C))


def twin_distance(a: TwinState, b: TwinState) -> float:
    Ca, Cb = coefficient_matrices(a, b)
    return float(np.linalg.norm(Ca - Cb))


def trace_functional(s: TwinState) -> complex:
    """``Tr(|psi> (x) <xi|) = <xi|psi>``, extended linearly."""
    return sum((alpha * inner_product(bra, ket) for alpha, ket, bra in s.terms), 0j)


def schmidt_rank(s: TwinState, tol: float = 1e-10) -> int:
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not s.terms:
        return 0
    (C,) = coefficient_matrices(s)
    sv = np.linalg.svd(C, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.count_nonzero(sv > tol * sv[0]))


@dataclass(frozen=True)
class TwinOperator:
    """``sum_i O1_i (x) O2_i^{dagger *}`` stored as pairs ``(O1_i, O2_i)``.

    ``O1`` acts on the ket factor; ``O2`` acts on the stored bra vector.
    """

    terms: tuple = ()

    @classmethod
    def identity(cls) -> "TwinOperator":
        return cls(((FockOperator.identity(), FockOperator.identity()),))

    @classmethod
    def on_ket(cls, op: FockOperator) -> "TwinOperator":
        return cls(((op, FockOperator.identity()),))

    @classmethod
    def on_bra(cls, op: FockOperator) -> "TwinOperator":
        """``1 (x) op^{dagger *}``: maps ``<xi|`` to ``<xi| op^dagger``."""
        return cls(((FockOperator.identity(), op),))

    def __add__(self, other: "TwinOperator") -> "TwinOperator":
        return TwinOperator(self.terms + other.terms)

    def __mul__(self, c) -> "TwinOperator":
        return TwinOperator(tuple((complex(c) * o1, o2) for o1, o2 in self.terms))

    __rmul__ = __mul__

    def __matmul__(self, other: "TwinOperator") -> "TwinOperator":
        return TwinOperator(tuple(
            (a1 @ b1, a2 @ b2) for a1, a2 in self.terms for b1, b2 in other.terms
        ))

    def adjoint(self) -> "TwinOperator":
        # (O1 (x) O2^{dagger*})^dagger = O1^dagger (x) (O2^dagger)^{dagger*}
        return TwinOperator(tuple((o1.adjoint(), o2.adjoint()) for o1, o2 in self.terms))

    def __call__(self, s: TwinState) -> TwinState:
        return apply_twin_operator(self, s)


def ket_annihilate(k: ModeLabel) -> TwinOperator:
    """``a_k (x) 1``."""
    return TwinOperator.on_ket(FockOperator.string(annihilate(k)))


def ket_create(k: ModeLabel) -> TwinOperator:
    """``a_k^dagger (x) 1``."""
    return TwinOperator.on_ket(FockOperator.string(create(k)))


def dual_create(k: ModeLabel) -> TwinOperator:
    """``1 (x) a*_k``, with ``a*_k <0| = <1_k|``."""
    return TwinOperator.on_bra(FockOperator.string(create(k)))


def dual_annihilate(k: ModeLabel) -> TwinOperator:
    """``1 (x) a*^dagger_k``, which annihilates the twin vacuum."""
    return TwinOperator.on_bra(FockOperator.string(annihilate(k)))


def c_operator(k: ModeLabel) -> TwinOperator:
    """``c_k = a_k (x) 1 + 1 (x) a*_k``."""
    return ket_annihilate(k) + dual_create(k)


def apply_twin_operator(O: TwinOperator, s: TwinState) -> TwinState:
    out = []
    for op1, op2 in O.terms:
        for alpha, ket, bra in s.terms:
            new_ket = apply_operator(op1, ket)
            if new_ket.is_zero():
                continue
            new_bra = apply_operator(op2, bra)
            if new_bra.is_zero():
                continue
            out.append((alpha, new_ket, new_bra))
    return TwinState(tuple(out))


def reduce_to_fock(O: TwinOperator) -> FockOperator:
    """Single-space operator ``sum_i O2_i^dagger O1_i`` with the same amplitudes."""
    reduced = FockOperator(())
    for op1, op2 in O.terms:
        reduced = reduced + (op2.adjoint() @ op1)
    return reduced


def reduced_amplitude(O: TwinOperator, s: TwinState) -> complex:
    """``sum_j alpha_j <xi_j| reduce(O) |psi_j>``."""
    R = reduce_to_fock(O)
    return sum((alpha * inner_product(bra, apply_operator(R, ket)) for alpha, ket, bra in s.terms), 0j)


def twin_field_operator(packet: WavePacket, x: SpacetimePoint) -> TwinOperator:
    """``(phi (x) 1 + 1 (x) phi*) / 2`` for the smeared field ``phi`` at ``x``."""
    phi = smeared_field_operator(packet, x)
    return TwinOperator(((0.5 * phi, FockOperator.identity()), (0.5 * FockOperator.identity(), phi)))


def separable_superposition_demo(xi1: FockState, xi2: FockState) -> TwinState:
    """``|0> (x) (<xi1| + <xi2|) / sqrt 2``."""
    return TwinState.product(FockState.vacuum(), (xi1 + xi2) * (1 / math.sqrt(2)))
