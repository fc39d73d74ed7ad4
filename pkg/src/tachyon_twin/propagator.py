"""Cutoff Feynman propagator and Pauli-Jordan function of the tachyon field.

The propagator is

    Delta_F(x) = int_{|k|>m} d^4k/(2 pi)^4  i exp(-i k.x) / (k.k + m^2 + i eps)

with signature (+,-,-,-).  Two evaluation routes are provided:

``feynman_propagator``
    The energy integral is closed by residues (exactly, eps -> 0+), the
    angular integral is done analytically and the remaining radial integral
    is written in the variable omega = sqrt(k^2 - m^2), where it reads

        1/(4 pi^2 r) int_0^inf d omega  sin(r s) exp(-i omega |t|),  s = |k|.

    It converges only in the Abel sense, so it is damped by exp(-eps s),
    evaluated on panels sized to the half period of the fastest phase, and
    Richardson-extrapolated to eps -> 0 over a halving eps sequence.

``feynman_propagator_oracle``
    Brute-force 2D quadrature over (k0, |k|) at a fixed eps, used as
    both the i eps in the denominator and the radial damping exp(-eps |k|).
    No residues are taken; the far k0 tail beyond the resolved window uses
    exponential integrals.  :func:`regularized_propagator` evaluates the same
    fixed-eps integral via residues, which is the matched comparison.

Only the (t, |r|) dependence is kept: the |k| > m domain is rotation
invariant, so full 3-vectors are reduced to their norm on input.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy.special import exp1

from .errors import NonConvergent, SingularPoint
from .kinematics import FourVector, LorentzTransform, boost

TACHYONIC = "tachyonic"
ORDINARY = "ordinary"


@dataclass(frozen=True)
class Interval:
    """Separation ``x - y`` reduced to ``(t, |r|)``."""

    t: float
    r: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("radial separation must be non-negative")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "r", float(self.r))

    @classmethod
    def from_vectors(cls, t: float, r) -> "Interval":
        return cls(t, float(np.linalg.norm(np.asarray(r, dtype=float))))

    @classmethod
    def from_four_vector(cls, v: FourVector) -> "Interval":
        return cls.from_vectors(v.t, v.spatial)

    def four_vector(self, direction=(1.0, 0.0, 0.0)) -> FourVector:
        n = np.asarray(direction, dtype=float)
        return FourVector(self.t, *(self.r * n))

    def interval_squared(self) -> float:
        return self.t * self.t - self.r * self.r


@dataclass(frozen=True)
class QuadratureParams:
    """Damping sequence and tolerances for the extrapolated radial integrals.

    ``epsilon`` is the largest damping; each further step halves it.  At
    least ``extrapolation_steps`` levels are used and more are added (up to
    ``max_steps``) until the Richardson estimate meets ``rel_tol``.
    ``k_max`` overrides the adaptive radial cutoff.
    """

    epsilon: float = 1e-2
    extrapolation_steps: int = 4
    rel_tol: float = 1e-6
    k_max: float | None = None
    max_steps: int = 8
    nodes: int = 12

    def __post_init__(self):
        if not self.epsilon > 0 or not self.rel_tol > 0:
            raise ValueError("epsilon and rel_tol must be positive")
        if self.extrapolation_steps < 2 or self.max_steps < self.extrapolation_steps:
            raise ValueError("need 2 <= extrapolation_steps <= max_steps")

    @property
    def epsilons(self) -> tuple:
        return tuple(self.epsilon * 0.5**j for j in range(self.max_steps))


class Estimate(NamedTuple):
    value: complex
    error: float


_GL_CACHE: dict[int, tuple] = {}


def _gauss_legendre(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _panel_nodes(edges: np.ndarray, n: int):
    x, w = _gauss_legendre(n)
    a = edges[:-1, None]
    b = edges[1:, None]
    half = 0.5 * (b - a)
    return ((a + b) * 0.5 + half * x).ravel(), (half * w).ravel()


def _sin_over_r(kr_k: np.ndarray, r: float) -> np.ndarray:
    """``sin(k r) / r`` with the r -> 0 limit ``k``."""
    return kr_k * np.sinc(kr_k * r / np.pi)


def _natural_scale(x: Interval) -> float:
    return 1.0 / (4.0 * math.pi**2 * (x.t**2 + x.r**2))


def _cutoff(eps: float, rel_tol: float, k_max: float | None) -> float:
    if k_max is not None:
        return k_max
    # exp(-eps k) / eps stays below 0.1 rel_tol past the cutoff
    return (math.log(10.0 / (rel_tol * eps)) + 2.0) / eps


def _richardson(values: Sequence[complex]):
    """Richardson table for halving steps with an O(eps) leading error."""
    table = [[complex(v)] for v in values]
    for i in range(1, len(values)):
        for j in range(1, i + 1):
            f = 2.0**j
            table[i].append((f * table[i][j - 1] - table[i - 1][j - 1]) / (f - 1.0))
    return table


def _extrapolate(level: Callable[[float], tuple], q: QuadratureParams, scale: float) -> Estimate:
    values = []
    roundoff = 0.0
    best = None
    for n, eps in enumerate(q.epsilons, start=1):
        v, mass = level(eps)
        values.append(v)
        roundoff = max(roundoff, 64 * np.finfo(float).eps * mass)
        if n < q.extrapolation_steps:
            continue
        table = _richardson(values)
        value = table[-1][-1]
        err = abs(value - table[-2][-1]) + roundoff
        best = Estimate(complex(value), float(err))
        if err <= q.rel_tol * max(abs(value), scale):
            return best
    raise NonConvergent(
        f"Richardson extrapolation stalled at error {best.error:.3e} "
        f"(value {best.value:.6e}, tolerance {q.rel_tol:g})"
    )


def _omega_integral(x: Interval, m: float, eps: float, q: QuadratureParams, kernel) -> tuple:
    """``int_0^inf d omega kernel(omega, s) exp(-eps s)`` on phase-aligned panels."""
    fastest = x.r + abs(x.t) + m
    width = math.pi / fastest
    top = _cutoff(eps, q.rel_tol, q.k_max)
    n_panels = max(int(math.ceil(top / width)), 4)
    edges = np.linspace(0.0, n_panels * width, n_panels + 1)
    w_nodes, weights = _panel_nodes(edges, q.nodes)
    s = np.sqrt(w_nodes**2 + m * m)
    f = kernel(w_nodes, s) * np.exp(-eps * s) * weights
    return complex(f.sum()), float(np.abs(f).sum())


def _check_point(x: Interval):
    if x.t == 0.0 and x.r == 0.0:
        raise SingularPoint("propagator is singular at x = 0")


def feynman_propagator(
    x: Interval, m: float, q: QuadratureParams | None = None, return_error: bool = False
):
    """Cutoff Feynman propagator, extrapolated to vanishing damping."""
    _check_point(x)
    q = q or QuadratureParams()
    T, r = abs(x.t), x.r
    pref = 1.0 / (4.0 * math.pi**2)

    def kernel(w, s):
        return _sin_over_r(s, r) * np.exp(-1j * w * T)

    def level(eps):
        v, mass = _omega_integral(x, m, eps, q, kernel)
        return pref * v, pref * mass

    est = _extrapolate(level, q, _natural_scale(x))
    return est if return_error else est.value


def damped_propagator(x: Interval, m: float, damping: float, q: QuadratureParams | None = None) -> complex:
    """One level of :func:`feynman_propagator`: residues taken, ``exp(-damping |k|)`` kept."""
    _check_point(x)
    q = q or QuadratureParams()
    T, r = abs(x.t), x.r
    v, _ = _omega_integral(x, m, damping, q, lambda w, s: _sin_over_r(s, r) * np.exp(-1j * w * T))
    return v / (4.0 * math.pi**2)


def regularized_propagator(x: Interval, m: float, epsilon: float, nodes: int = 12) -> complex:
    """The fixed-eps propagator (i eps pole shift plus exp(-eps|k|)) via residues.

    Closing the k0 contour gives ``exp(-i a |t|) / (2 a)`` with
    ``a = sqrt(k^2 - m^2 - i eps)``; the radial integral runs over
    ``k in (m, inf)`` on a mesh graded towards the threshold.
    """
    _check_point(x)
    T, r = abs(x.t), x.r
    edges = _radial_edges(m, epsilon, math.pi / (r + T + m), _cutoff(epsilon, 1e-8, None))
    k, w = _panel_nodes(edges, nodes)
    a = np.sqrt(k * k - m * m - 1j * epsilon)
    f = k * _sin_over_r(k, r) * np.exp(-epsilon * k) * np.exp(-1j * a * T) / a
    return complex((f * w).sum() / (4.0 * math.pi**2))


def _radial_edges(m: float, eps: float, width: float, top: float) -> np.ndarray:
    """Mesh on ``(m, top)``: geometric towards ``k = m``, then uniform panels."""
    feature = eps / (2.0 * m)
    grade = [m]
    h = feature / 64.0
    while grade[-1] - m + h < width and h < width:
        grade.append(grade[-1] + h)
        h *= 2.0
    start = grade[-1]
    n = max(int(math.ceil((top - start) / width)), 1)
    return np.concatenate([np.array(grade), start + width * np.arange(1, n + 1)])


# -- brute-force oracle --------------------------------------------------------


@dataclass(frozen=True)
class OracleGrid:
    nodes: int = 10
    inner_nodes: int = 10
    radial_panels_per_period: int = 3
    cutoff_tol: float = 1e-9


def _energy_tail(X: float, a: complex, T: float) -> complex:
    """``int_X^inf cos(T k0) / (k0^2 - a^2) dk0`` via partial fractions and E1."""
    if T == 0.0:
        return complex(np.log((X + a) / (X - a)) / (2.0 * a))

    def shifted(b):
        return 0.5 * (
            np.exp(1j * T * b) * exp1(-1j * T * (X - b))
            + np.exp(-1j * T * b) * exp1(1j * T * (X - b))
        )

    return complex((shifted(a) - shifted(-a)) / (2.0 * a))


def _energy_integral(k: float, m: float, eps: float, T: float, n: int) -> complex:
    """``int_0^inf cos(T k0) / (k0^2 - k^2 + m^2 + i eps) dk0`` by quadrature."""
    A = k * k - m * m - 1j * eps
    a = np.sqrt(A)
    c, w = a.real, abs(a.imag)
    edges = [0.0]
    # geometric refinement on both sides of the near-pole at k0 = c
    offsets = w * 2.0 ** np.arange(-3, 60)
    offsets = offsets[offsets < c]
    left = sorted(set((c - offsets).tolist()))
    right = (c + w * 2.0 ** np.arange(-3, 60))
    X = 2.0 * c + 20.0 * w + 10.0
    right = right[right < X].tolist()
    edges = np.array(sorted(set([0.0] + left + [c] + right)))
    span = edges[-1]
    if X > span:
        step = math.pi / (2.0 * T) if T > 0 else 1.0
        step = min(step, max(c, 1.0) / 4.0)
        count = max(int(math.ceil((X - span) / step)), 1)
        edges = np.concatenate([edges, span + (X - span) / count * np.arange(1, count + 1)])
    # uniform refinement of any oversized gap
    fine = [edges[0]]
    limit = min(math.pi / (2.0 * T) if T > 0 else np.inf, max(c, 1.0) / 4.0)
    for e in edges[1:]:
        gap = e - fine[-1]
        if gap > limit:
            pieces = int(math.ceil(gap / limit))
            fine.extend(np.linspace(fine[-1], e, pieces + 1)[1:].tolist())
        else:
            fine.append(e)
    k0, wt = _panel_nodes(np.array(fine), n)
    body = np.sum(np.cos(T * k0) / (k0 * k0 - A) * wt)
    return complex(body + _energy_tail(X, a, T))


def feynman_propagator_oracle(
    x: Interval,
    m: float,
    epsilon: float,
    grid: OracleGrid | None = None,
    pole_epsilon: float | None = None,
) -> complex:
    """Direct 2D quadrature of the fixed-eps propagator over ``(k0, |k|)``.

    ``epsilon`` is the radial damping and, unless ``pole_epsilon`` is given,
    also the shift of the poles off the real k0 axis.
    """
    _check_point(x)
    pole = epsilon if pole_epsilon is None else pole_epsilon
    if not epsilon > 0 or not pole > 0:
        raise ValueError("oracle needs a fixed positive epsilon")
    grid = grid or OracleGrid()
    T, r = abs(x.t), x.r
    width = math.pi / ((r + T + m) * grid.radial_panels_per_period)
    top = (math.log(1.0 / (grid.cutoff_tol * epsilon)) + 2.0) / epsilon
    edges = _radial_edges(m, pole, width, top)
    ks, ws = _panel_nodes(edges, grid.nodes)
    inner = np.array([_energy_integral(k, m, pole, T, grid.inner_nodes) for k in ks])
    integrand = ks * _sin_over_r(ks, r) * np.exp(-epsilon * ks) * (1j / math.pi) * inner
    total = complex(np.sum(integrand * ws) / (2.0 * math.pi**2))
    if not np.isfinite(total):
        raise NonConvergent("oracle quadrature produced a non-finite value")
    return total


# -- Pauli-Jordan function -----------------------------------------------------


def pauli_jordan(
    x: Interval,
    m: float,
    dispersion: str = TACHYONIC,
    q: QuadratureParams | None = None,
    return_error: bool = False,
):
    """``int d^3k / ((2 pi)^3 2 omega) (exp(-i k.x) - exp(i k.x))``.

    ``tachyonic`` uses omega = sqrt(k^2 - m^2) over |k| > m, ``ordinary``
    uses omega = sqrt(k^2 + m^2) over all k.  After the angular integral the
    radial form is ``-i/(2 pi^2 r) int dk k sin(k r) sin(omega t) / omega``.
    """
    _check_point(x)
    q = q or QuadratureParams()
    t, r = x.t, x.r
    pref = -1j / (2.0 * math.pi**2)

    if dispersion == TACHYONIC:
        def level(eps):
            v, mass = _omega_integral(
                x, m, eps, q, lambda w, s: _sin_over_r(s, r) * np.sin(w * t)
            )
            return pref * v, abs(pref) * mass
    elif dispersion == ORDINARY:
        def level(eps):
            fastest = r + abs(t) + m
            width = math.pi / fastest
            top = _cutoff(eps, q.rel_tol, q.k_max)
            n_panels = max(int(math.ceil(top / width)), 4)
            k, w = _panel_nodes(np.linspace(0.0, n_panels * width, n_panels + 1), q.nodes)
            om = np.sqrt(k * k + m * m)
            f = k * _sin_over_r(k, r) * np.sin(om * t) / om * np.exp(-eps * k) * w
            return pref * complex(f.sum()), abs(pref) * float(np.abs(f).sum())
    else:
        raise ValueError(f"unknown dispersion {dispersion!r}")

    est = _extrapolate(level, q, _natural_scale(x))
    return est if return_error else est.value


# -- Lorentz-invariance scans --------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    t: float
    r: float
    boost_speed: float
    re: float
    im: float
    err_estimate: float
    deviation: float = field(default=0.0, compare=False)
    status: str = "ok"


def _relative_deviation(a: complex, b: complex, component: str) -> float:
    if component == "real":
        a, b = a.real, b.real
    elif component == "imag":
        a, b = a.imag, b.imag
    elif component != "complex":
        raise ValueError(f"unknown component {component!r}")
    return abs(a - b) / max(abs(a), 1e-300)


def invariance_scan(
    points: Iterable,
    boosts: Iterable[LorentzTransform],
    m: float,
    q: QuadratureParams | None = None,
    component: str = "complex",
) -> float:
    """Max relative deviation between ``Delta_F(x)`` and ``Delta_F(L x)``."""
    q = q or QuadratureParams()
    boosts = list(boosts)
    worst = 0.0
    for p in points:
        v = p if isinstance(p, FourVector) else p.four_vector()
        base = feynman_propagator(Interval.from_four_vector(v), m, q)
        for L in boosts:
            if L == LorentzTransform.identity():
                continue
            moved = feynman_propagator(Interval.from_four_vector(L @ v), m, q)
            worst = max(worst, _relative_deviation(base, moved, component))
    return worst


def propagator_scan(
    t_values: Sequence[float],
    r_values: Sequence[float],
    speeds: Sequence[float],
    m: float,
    q: QuadratureParams | None = None,
    direction=(1.0, 0.0, 0.0),
    mapper=map,
) -> list:
    """Evaluate ``Delta_F`` at ``L x`` for every grid point and boost speed.

    Rows keep the unboosted ``(t, r)`` and the boost speed; ``deviation``
    is relative to the unboosted value.  Points whose quadrature does not
    converge are flagged with ``status='nonconvergent'`` instead of raising.
    ``mapper`` lets callers plug in an ordered parallel map.
    """
    q = q or QuadratureParams()
    jobs = [(t, r, v) for t in t_values for r in r_values for v in speeds]
    bases = {(t, r): None for t, r, _ in jobs}
    base_vals = dict(zip(bases, mapper(_safe_eval, [(t, r, 0.0, m, q, direction) for t, r in bases])))
    results = list(mapper(_safe_eval, [(t, r, v, m, q, direction) for t, r, v in jobs]))
    rows = []
    for (t, r, v), res in zip(jobs, results):
        base = base_vals[(t, r)]
        if res is None or base is None:
            rows.append(ScanRow(t, r, v, math.nan, math.nan, math.nan, math.nan, "nonconvergent"))
            continue
        dev = _relative_deviation(base.value, res.value, "complex")
        rows.append(ScanRow(t, r, v, res.value.real, res.value.imag, res.error, dev))
    return rows


def _safe_eval(args):
    t, r, v, m, q, direction = args
    x = Interval(t, r).four_vector(direction)
    if v != 0.0:
        x = boost(direction, v) @ x
    try:
        return feynman_propagator(Interval.from_four_vector(x), m, q, return_error=True)
    except NonConvergent:
        return None


def write_scan_csv(rows: Sequence[ScanRow], path) -> float:
    """Write scan rows as CSV plus a trailing summary comment; returns max deviation."""
    finite = [row.deviation for row in rows if row.status == "ok"]
    worst = max(finite, default=0.0)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "r", "boost_speed", "re", "im", "err_estimate"])
        for row in rows:
            w.writerow([repr(float(v)) for v in (row.t, row.r, row.boost_speed, row.re, row.im, row.err_estimate)])
        fh.write(f"# max_relative_deviation={worst!r} rows={len(rows)} "
                 f"nonconvergent={sum(row.status != 'ok' for row in rows)}\n")
    return worst
