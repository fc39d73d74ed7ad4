"""Acceptance criteria, one test per criterion.

Run ``python tests/test_acceptance.py`` for a plain PASS/FAIL listing, or
``pytest tests/test_acceptance.py``; the pytest terminal summary repeats the
same lines.
"""

import math
import time

import numpy as np
import pytest

from tachyon_twin import sampling, settings
from tachyon_twin.dynamics import (
    INCOMING,
    MINUS,
    OUTGOING,
    boost_process,
    covariance_residual,
    emission_process,
    evolve,
    s_matrix_free_limit_check,
)
from tachyon_twin.errors import DegenerateBoost
from tachyon_twin.fock import FockState, free_hamiltonian_apply
from tachyon_twin.kinematics import Flipped, ModeLabel, boost, classify_mode_boost, minkowski_dot
from tachyon_twin.lorentz_rep import (
    commutation_preservation_check,
    represent_boost,
    superposition_demo,
    vacuum_invariance_check,
)
from tachyon_twin.modes import SpacetimePoint, mode_boost_phase_residual
from tachyon_twin.propagator import (
    ORDINARY,
    TACHYONIC,
    Interval,
    damped_propagator,
    feynman_propagator,
    feynman_propagator_oracle,
    pauli_jordan,
    propagator_scan,
)
from tachyon_twin.twinspace import (
    TwinState,
    apply_twin_operator,
    reduced_amplitude,
    schmidt_rank,
    trace_functional,
    twin_distance,
)

SEED = 20240101
RESULTS: list = []

T_GRID = (0.0, 0.4, 0.8, 1.6, 2.4)
R_GRID = (0.2, 0.6, 1.2, 2.0, 3.0)
SCAN_SPEEDS = (0.3, 0.6, 0.9)


def record(number, name, passed, detail, elapsed, limit):
    ok = bool(passed) and elapsed < limit
    line = f"[{'PASS' if ok else 'FAIL'}] {number:>3} {name}: {detail}; {elapsed:.2f}s (limit {limit:g}s)"
    RESULTS.append(line)
    print(line)
    return ok


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def k15():
    return ModeLabel((1.5, 0.0, 0.0), 1.0)


# -- 1 -------------------------------------------------------------------------


def check_vacuum_invariance():
    rng = np.random.default_rng(SEED)

    def run():
        return max(vacuum_invariance_check(sampling.random_boost(rng, 0.99)) for _ in range(50))

    worst, dt = timed(run)
    return record(1, "twin vacuum invariance (50 boosts)", worst == 0.0,
                  f"max residual {worst!r}", dt, 1.0)


# -- 2 -------------------------------------------------------------------------


def check_commutator_covariance():
    rng = np.random.default_rng(SEED + 2)
    cases = (sampling.PRESERVED, sampling.FLIPPED, sampling.MIXED)
    kinds = dict.fromkeys(cases, 0)

    def run():
        worst = 0.0
        for i in range(100):
            case = cases[i % 3]
            same = case != sampling.MIXED and i % 2 == 0
            L, k, l = sampling.boost_case_triple(rng, case, same=same)
            kinds[case] += 1
            worst = max(worst, commutation_preservation_check(L, k, l, 1.0 if same else 0.0))
        return worst

    worst, dt = timed(run)
    return record(2, "commutator covariance (100 triples)", worst < 1e-12 and all(kinds.values()),
                  f"max residual {worst:.2e}, cases {kinds}", dt, 10.0)


# -- 3 -------------------------------------------------------------------------


def check_single_particle_law():
    def run():
        k = k15()
        s = TwinState.product(FockState.single(k), FockState.vacuum())
        L = boost((1, 0, 0), 0.9)
        action = classify_mode_boost(L, k)
        lp = action.new_label
        p = lp.four_momentum()
        shell = abs(minkowski_dot(p, p) + 1.0)
        flipped_ok = (
            isinstance(action, Flipped)
            and twin_distance(represent_boost(L, s), TwinState.product(FockState.vacuum(), FockState.single(lp))) == 0.0
            and shell < 1e-9
        )
        slow = represent_boost(boost((1, 0, 0), 0.5), s)
        l = classify_mode_boost(boost((1, 0, 0), 0.5), k).new_label
        kept_ok = twin_distance(slow, TwinState.product(FockState.single(l), FockState.vacuum())) == 0.0
        return flipped_ok and kept_ok, lp, shell

    (ok, lp, shell), dt = timed(run)
    return record(3, "single-particle boost law", ok,
                  f"v=0.9 gives |0>(x)<1_l'| with l'={tuple(round(c, 4) + 0.0 for c in lp.k)}, "
                  f"shell residual {shell:.1e}; v=0.5 stays on ket side", dt, 1.0)


# -- 4 -------------------------------------------------------------------------


def check_non_separability():
    def run():
        stay = ModeLabel((-1.5, 0.0, 0.0), 1.0)
        before, after = superposition_demo(boost((1, 0, 0), 0.9), stay, k15())
        return schmidt_rank(before), schmidt_rank(after)

    (r0, r1), dt = timed(run)
    return record(4, "non-separability generation", (r0, r1) == (1, 2),
                  f"Schmidt rank {r0} -> {r1}", dt, 1.0)


# -- 5 -------------------------------------------------------------------------


def check_reduction_identity():
    rng = np.random.default_rng(SEED + 5)
    labels = [sampling.random_label(rng) for _ in range(3)]
    n_max = settings.current().n_max

    def run():
        ops = [sampling.random_twin_operator(rng, labels) for _ in range(20)]
        states = [sampling.random_separable_state(rng, labels, n_max) for _ in range(20)]
        worst = 0.0
        # room for the two stacked ladder strings of O2^dagger O1
        with settings.using(n_max=n_max + 6):
            for O in ops:
                for s in states:
                    worst = max(worst, abs(trace_functional(apply_twin_operator(O, s)) - reduced_amplitude(O, s)))
        return worst

    worst, dt = timed(run)
    return record(5, "reduction-map identity (20 x 20)", worst < 1e-12, f"max residual {worst:.2e}", dt, 30.0)


# -- 6 -------------------------------------------------------------------------


def check_spectrum_positivity():
    rng = np.random.default_rng(SEED + 6)

    def run():
        lowest = math.inf
        worst = 0.0
        for _ in range(1000):
            labels = [sampling.random_label(rng, 1.0, 10.0) for _ in range(3)]
            s = sampling.random_fock_state(rng, labels, settings.current().n_max, terms=1)
            ((key, amp),) = s.items()
            h = free_hamiltonian_apply(s, 1.0)
            E = h.amplitude(key) / amp if not h.is_zero() else 0.0
            worst = max(worst, abs(E.imag) if isinstance(E, complex) else 0.0, abs(E - key.energy()))
            lowest = min(lowest, float(np.real(E)))
        return lowest, worst

    (lowest, worst), dt = timed(run)
    return record(6, "free-spectrum positivity (1000 states)", lowest >= 0.0 and worst < 1e-12,
                  f"min eigenvalue {lowest:.4g}, eigen-residual {worst:.1e}", dt, 1.0)


# -- 7 -------------------------------------------------------------------------


def oracle_points():
    return [(t, r) for t in T_GRID for r in R_GRID[:4]]


def check_propagator_invariance():
    def run():
        agreement = 0.0
        for t, r in oracle_points():
            x = Interval(t, r)
            main = damped_propagator(x, 1.0, 0.2)
            oracle = feynman_propagator_oracle(x, 1.0, 0.2, pole_epsilon=1e-10)
            agreement = max(agreement, abs(main - oracle) / abs(oracle))
        rows = propagator_scan(T_GRID, R_GRID, SCAN_SPEEDS, 1.0)
        bad = [row for row in rows if row.status != "ok"]
        deviation = max(row.deviation for row in rows if row.status == "ok")
        return agreement, deviation, len(rows), len(bad), rows

    (agreement, deviation, n_rows, n_bad, rows), dt = timed(run)
    real_dev = _real_part_deviation(rows)
    ok = agreement < 1e-4 and deviation < 5e-4 and n_bad == 0 and n_rows == 75
    return record(7, "propagator Lorentz invariance", ok,
                  f"main-vs-oracle {agreement:.1e} (< 1e-4) at 20 points; "
                  f"max |dDelta|/|Delta| {deviation:.2e} (< 5e-4) over {n_rows} rows, "
                  f"real part alone {real_dev:.1e}", dt, 300.0)


def _real_part_deviation(rows):
    """Same scan measured on the real part only (informational)."""
    base = {(row.t, row.r): feynman_propagator(Interval(row.t, row.r), 1.0) for row in rows}
    return max(abs(row.re - base[row.t, row.r].real) / abs(base[row.t, row.r]) for row in rows)


# -- 8 -------------------------------------------------------------------------


def check_microcausality_contrast():
    def run():
        x = Interval(0.5, 2.0)
        return (pauli_jordan(x, 1.0, ORDINARY, return_error=True),
                pauli_jordan(x, 1.0, TACHYONIC, return_error=True))

    (ordi, tach), dt = timed(run)
    ok = abs(ordi.value) < 10 * ordi.error and abs(tach.value) > 10 * tach.error
    return record(8, "microcausality contrast at (t, r) = (0.5, 2)", ok,
                  f"ordinary |PJ| = {abs(ordi.value):.1e} vs 10 err = {10 * ordi.error:.1e}; "
                  f"tachyonic |PJ| = {abs(tach.value):.3e} vs 10 err = {10 * tach.error:.1e}", dt, 60.0)


# -- 9 -------------------------------------------------------------------------


def check_amplitude_covariance():
    def run():
        p = emission_process(2.0, 1.0)
        worst = 0.0
        migrated = []
        for v in (0.3, 0.6, 0.9, 0.99):
            L = boost((1, 0, 0), v)
            worst = max(worst, covariance_residual(L, p))
            migrated.append(p.legs[2].direction == OUTGOING and boost_process(L, p).legs[2].direction == INCOMING)
        return worst, migrated

    (worst, migrated), dt = timed(run)
    return record(9, "amplitude covariance", worst < 1e-9 and any(migrated),
                  f"max residual {worst:.1e}, tachyon migrated at {sum(migrated)}/4 speeds", dt, 1.0)


# -- 10 ------------------------------------------------------------------------


def check_trace_evolution():
    rng = np.random.default_rng(SEED + 10)

    def run():
        worst = 0.0
        for _ in range(50):
            labels = [sampling.random_label(rng) for _ in range(3)]
            s = sampling.random_twin_state(rng, labels, 3)
            t = float(rng.uniform(-20, 20))
            worst = max(worst, abs(trace_functional(evolve(s, t, MINUS)) - trace_functional(s)))
        k = k15()
        l = ModeLabel((0.0, 2.0, 0.0), 1.0)
        alpha = FockState.single(k, 0.6) + FockState.basis({k: 1, l: 1}, 0.8j)
        beta = FockState.single(k) + FockState.basis({k: 1, l: 1})
        vals = np.array(s_matrix_free_limit_check(alpha, beta, [0.0, 0.5, 3.0, 40.0, 1e3]))
        spread = float(np.abs(vals - vals[0]).max())
        return worst, spread

    (worst, spread), dt = timed(run)
    return record(10, "trace / evolution consistency", worst < 1e-12 and spread < 1e-12,
                  f"trace drift {worst:.1e}, S-matrix T-spread {spread:.1e}", dt, 5.0)


# -- 11 ------------------------------------------------------------------------


def check_mode_phase_law():
    rng = np.random.default_rng(SEED + 11)

    def run():
        worst = 0.0
        kinds = {"preserved": 0, "flipped": 0}
        while sum(kinds.values()) < 100:
            k = sampling.random_label(rng)
            L = sampling.random_boost(rng)
            try:
                flipped = isinstance(classify_mode_boost(L, k), Flipped)
            except DegenerateBoost:
                continue
            # alternate regimes so both are well represented
            want = "flipped" if sum(kinds.values()) % 2 else "preserved"
            if (want == "flipped") != flipped:
                continue
            kinds[want] += 1
            x = SpacetimePoint(float(rng.uniform(-10, 10)), tuple(rng.uniform(-10, 10, 3)))
            worst = max(worst, mode_boost_phase_residual(L, k, x))
        return worst, kinds

    (worst, kinds), dt = timed(run)
    return record(11, "mode boost phase law (100 triples)", worst < 1e-9 and all(kinds.values()),
                  f"max phase residual {worst:.1e}, cases {kinds}", dt, 5.0)


CRITERIA = [
    check_vacuum_invariance,
    check_commutator_covariance,
    check_single_particle_law,
    check_non_separability,
    check_reduction_identity,
    check_spectrum_positivity,
    check_propagator_invariance,
    check_microcausality_contrast,
    check_amplitude_covariance,
    check_trace_evolution,
    check_mode_phase_law,
]


@pytest.mark.acceptance
@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"c{i + 1:02d}" for i in range(len(CRITERIA))])
def test_criterion(criterion):
    assert criterion()


if __name__ == "__main__":
    passed = sum(bool(c()) for c in CRITERIA)
    print(f"{passed}/{len(CRITERIA)} criteria pass")
