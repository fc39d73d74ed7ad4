"""Twin-space time evolution and the first-order Yukawa emission amplitude.

``H_-`` evolves ket and bra in the same time direction, ``H_+`` in opposite
directions; both are built from the normal-ordered free Hamiltonian.  The
interacting S-matrix is only treated at first order, where the amplitude is
``-i g (2 pi)^4 delta^4(balance)``; the delta is carried symbolically as its
four-vector argument.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateBoost, OffShellLeg
from .fock import FockState, evolve_free
from .kinematics import FourVector, LorentzTransform, minkowski_dot
from .twinspace import TwinState, trace_functional

PLUS = "plus"
MINUS = "minus"

SUBLUMINAL = "subluminal"
TACHYON = "tachyon"
INCOMING = "incoming"
OUTGOING = "outgoing"

SHELL_TOL = 1e-9


def evolve(s: TwinState, t: float, sign: str = MINUS, m: float | None = None) -> TwinState:
    """``exp(-i H_pm t)`` on a twin state.

    ``minus``: ``|psi(t)> (x) <xi(t)|``.  ``plus``: ``|psi(t)> (x) <xi(-t)|``.
    ``m`` is accepted for interface symmetry; energies come from the labels.
    """
    if sign == MINUS:
        bra_t = t
    elif sign == PLUS:
        bra_t = -t
    else:
        raise ValueError(f"sign must be {PLUS!r} or {MINUS!r}")
    return TwinState(tuple(
        (alpha, evolve_free(ket, t), evolve_free(bra, bra_t)) for alpha, ket, bra in s.terms
    ))


def s_matrix_free_limit_check(alpha: FockState, beta: FockState, T_values, m: float | None = None) -> list:
    """``Tr(exp(-i H_+ T) exp(i H0_+ T) |alpha> (x) <beta|)`` for each T in the free theory."""
    state = TwinState.product(alpha, beta)
    out = []
    for T in T_values:
        rolled_back = evolve(state, -T, PLUS, m)
        out.append(trace_functional(evolve(rolled_back, T, PLUS, m)))
    return out


# -- first-order Yukawa emission -----------------------------------------------


@dataclass(frozen=True)
class Leg:
    species: str
    mass: float
    momentum: FourVector
    direction: str

    def __post_init__(self):
        if self.species not in (SUBLUMINAL, TACHYON):
            raise ValueError(f"unknown species {self.species!r}")
        if self.direction not in (INCOMING, OUTGOING):
            raise ValueError(f"unknown direction {self.direction!r}")

    def shell_violation(self) -> float:
        p2 = minkowski_dot(self.momentum, self.momentum)
        target = self.mass**2 if self.species == SUBLUMINAL else -self.mass**2
        scale = max(1.0, self.momentum.t**2, float(np.dot(self.momentum.spatial, self.momentum.spatial)))
        return abs(p2 - target) / scale

    def validate(self):
        if self.shell_violation() > SHELL_TOL:
            raise OffShellLeg(
                f"{self.species} leg {self.momentum} violates its mass shell "
                f"(mass {self.mass})"
            )
        if not self.momentum.t > 0:
            raise OffShellLeg(f"{self.species} leg {self.momentum} has non-positive energy")


@dataclass(frozen=True)
class Process:
    legs: tuple
    coupling: float

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple(self.legs))

    def validate(self):
        for leg in self.legs:
            leg.validate()

    @classmethod
    def from_json(cls, data: dict) -> "Process":
        legs = tuple(
            Leg(d["species"], float(d["mass"]), FourVector.from_array(d["four_momentum"]), d["direction"])
            for d in data["legs"]
        )
        return cls(legs, float(data["coupling"]))

    def to_json(self) -> dict:
        return {
            "coupling": self.coupling,
            "legs": [
                {"species": l.species, "mass": l.mass,
                 "four_momentum": l.momentum.as_array().tolist(), "direction": l.direction}
                for l in self.legs
            ],
        }


@dataclass(frozen=True)
class Amplitude:
    """``prefactor * (2 pi)^4 delta^4(momentum_balance)``; the (2 pi)^4 is implicit."""

    prefactor: complex
    momentum_balance: FourVector
    two_pi_four: bool = True

    def allowed(self, energy_scale: float = 1.0, tol: float = 1e-6) -> bool:
        return bool(np.abs(self.momentum_balance.as_array()).max() <= tol * energy_scale)

    def to_json(self, energy_scale: float = 1.0) -> dict:
        return {
            "prefactor_re": self.prefactor.real,
            "prefactor_im": self.prefactor.imag,
            "balance": self.momentum_balance.as_array().tolist(),
            "allowed": self.allowed(energy_scale),
        }


def momentum_balance(p: Process) -> FourVector:
    total = np.zeros(4)
    for leg in p.legs:
        sign = 1.0 if leg.direction == INCOMING else -1.0
        total += sign * leg.momentum.as_array()
    return FourVector.from_array(total)


def energy_scale(p: Process) -> float:
    return max((abs(leg.momentum.t) for leg in p.legs), default=1.0)


def yukawa_first_order(p: Process) -> Amplitude:
    """First-order vertex: two subluminal legs and one tachyon."""
    species = sorted(leg.species for leg in p.legs)
    if species != [SUBLUMINAL, SUBLUMINAL, TACHYON]:
        raise ValueError("the Yukawa vertex needs two subluminal legs and one tachyon")
    p.validate()
    return Amplitude(-1j * p.coupling, momentum_balance(p))


def boost_process(L: LorentzTransform, p: Process, degenerate_tol: float = 1e-9) -> Process:
    """Boost every leg; a tachyon whose energy turns negative is reinterpreted.

    The reinterpreted tachyon carries ``-L p`` and swaps incoming/outgoing.
    """
    legs = []
    for leg in p.legs:
        q = L @ leg.momentum
        if leg.species == TACHYON:
            if abs(q.t) <= degenerate_tol * leg.mass:
                raise DegenerateBoost(f"tachyon leg {leg.momentum} boosted to zero energy")
            if q.t < 0:
                flipped = OUTGOING if leg.direction == INCOMING else INCOMING
                legs.append(replace(leg, momentum=-q, direction=flipped))
                continue
        legs.append(replace(leg, momentum=q))
    return Process(tuple(legs), p.coupling)


def emission_process(M: float, m: float, coupling: float = 1.0) -> Process:
    """Subluminal particle at rest in the final state emitting a tachyon along +x.

    Both mass shells, ``E^2 - kx^2 = M^2`` and ``(E - M)^2 - kx^2 = -m^2``,
    hold for ``E = M + m^2 / (2 M)``.
    """
    E = M + m * m / (2.0 * M)
    kx = float(np.sqrt(E * E - M * M))
    k = FourVector(E, kx, 0.0, 0.0)
    l = FourVector(M, 0.0, 0.0, 0.0)
    return Process(
        (
            Leg(SUBLUMINAL, M, k, INCOMING),
            Leg(SUBLUMINAL, M, l, OUTGOING),
            Leg(TACHYON, m, k - l, OUTGOING),
        ),
        coupling,
    )


def load_process(path) -> Process:
    with open(path, encoding="utf-8") as fh:
        return Process.from_json(json.load(fh))


def covariance_residual(L: LorentzTransform, p: Process) -> float:
    """``|| balance(boosted) - L balance(original) ||_inf``."""
    before = yukawa_first_order(p).momentum_balance
    after = yukawa_first_order(boost_process(L, p)).momentum_balance
    return float(np.abs(after.as_array() - (L @ before).as_array()).max())
