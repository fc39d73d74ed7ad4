import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from tachyon_twin import sampling, settings
from tachyon_twin.errors import DegenerateBoost
from tachyon_twin.fock import FockState
from tachyon_twin.kinematics import Flipped, LorentzTransform, ModeLabel, Preserved, boost, classify_mode_boost
from tachyon_twin.lorentz_rep import (
    GeneratorString,
    basis_family,
    c_operator_transform_check,
    commutation_preservation_check,
    represent_boost,
    superposition_demo,
    trace_invariance_residual,
    unitarity_residual,
    vacuum_invariance_check,
)
from tachyon_twin.twinspace import TwinState, schmidt_rank, trace_functional, twin_distance

FLIP = boost((1, 0, 0), 0.9)
KEEP = boost((1, 0, 0), 0.5)


@pytest.fixture
def stay():
    # moves against the boost, so its energy only grows
    return ModeLabel((-1.5, 0.0, 0.0), 1.0)


def test_identity_acts_trivially(rng, k15, stay):
    s = sampling.random_twin_state(rng, [k15, stay], 2)
    assert twin_distance(represent_boost(LorentzTransform.identity(), s), s) < 1e-14


def test_single_particle_flip(k15):
    out = represent_boost(FLIP, TwinState.product(FockState.single(k15), FockState.vacuum()))
    lp = classify_mode_boost(FLIP, k15).new_label
    np.testing.assert_allclose(lp.k, (-1.132785, 0, 0), atol=1e-6)
    expected = TwinState.product(FockState.vacuum(), FockState.single(lp))
    assert twin_distance(out, expected) < 1e-15
    p = lp.four_momentum()
    assert abs(p.t**2 - sum(c * c for c in lp.k) + 1.0) < 1e-9


def test_single_particle_preserved(k15):
    out = represent_boost(KEEP, TwinState.product(FockState.single(k15), FockState.vacuum()))
    l = classify_mode_boost(KEEP, k15).new_label
    assert twin_distance(out, TwinState.product(FockState.single(l), FockState.vacuum())) < 1e-15


def test_bra_particle_migrates_to_ket(k15):
    out = represent_boost(FLIP, TwinState.product(FockState.vacuum(), FockState.single(k15)))
    lp = classify_mode_boost(FLIP, k15).new_label
    assert twin_distance(out, TwinState.product(FockState.single(lp), FockState.vacuum())) < 1e-15


def test_superposition_becomes_entangled(k15, stay):
    before, after = superposition_demo(FLIP, stay, k15)
    assert schmidt_rank(before) == 1
    assert schmidt_rank(after) == 2
    q = classify_mode_boost(FLIP, stay).new_label
    lp = classify_mode_boost(FLIP, k15).new_label
    expected = (TwinState.product(FockState.vacuum(), FockState.single(q))
                + TwinState.product(FockState.single(lp), FockState.vacuum())) * (1 / math.sqrt(2))
    assert twin_distance(after, expected) < 1e-15


def test_superposition_demo_validates_roles(k15, stay):
    with pytest.raises(ValueError):
        superposition_demo(FLIP, k15, stay)


def test_generator_string_normalisation(k15):
    from tachyon_twin.fock import OccBasisState

    key = OccBasisState.from_mapping({k15: 3})
    g = GeneratorString.from_basis_pair(key, OccBasisState())
    np.testing.assert_allclose(g.scale, 1 / math.sqrt(6))
    assert twin_distance(g.apply_to_vacuum(), TwinState.product(FockState.basis({k15: 3}), FockState.vacuum())) < 1e-14


def test_vacuum_invariance(rng):
    for _ in range(10):
        assert vacuum_invariance_check(sampling.random_boost(rng)) == 0.0
    L = sampling.random_boost(rng) @ sampling.random_boost(rng)
    assert vacuum_invariance_check(L) == 0.0
    assert vacuum_invariance_check(boost((0, 0, 1), 0.999)) == 0.0


def test_degenerate_boost_surfaces(k15):
    s = TwinState.product(FockState.single(k15), FockState.vacuum())
    with pytest.raises(DegenerateBoost):
        represent_boost(boost((1, 0, 0), 0.7454), s)


def test_c_operator_identity(rng, k15, stay):
    states = [sampling.random_twin_state(rng, [k15, stay], 2) for _ in range(5)]
    assert c_operator_transform_check(LorentzTransform.identity(), k15, states) == 0.0


@pytest.mark.parametrize("L", [KEEP, FLIP], ids=["preserved", "flipped"])
def test_c_operator_transform(rng, k15, stay, L):
    images = [classify_mode_boost(L, lab).new_label for lab in (k15, stay)]
    states = [sampling.random_twin_state(rng, images, 2) for _ in range(5)]
    assert c_operator_transform_check(L, k15, states) < 1e-10


def test_commutators_identity(k15, stay):
    I = LorentzTransform.identity()
    assert commutation_preservation_check(I, k15, k15, 1.0) < 1e-12
    assert commutation_preservation_check(I, k15, stay, 0.0) < 1e-12


def test_commutators_flipped(k15):
    assert isinstance(classify_mode_boost(FLIP, k15), Flipped)
    assert commutation_preservation_check(FLIP, k15, k15, 1.0) < 1e-12


def test_commutators_mixed(k15, stay):
    assert isinstance(classify_mode_boost(FLIP, stay), Preserved)
    assert commutation_preservation_check(FLIP, stay, k15, 0.0) < 1e-12
    assert commutation_preservation_check(FLIP, k15, stay, 0.0) < 1e-12


@given(st.integers(0, 2**32 - 1))
@hsettings(max_examples=20, deadline=None)
def test_trace_invariance_random(seed):
    rng = np.random.default_rng(seed)
    labels = [sampling.random_label(rng) for _ in range(2)]
    L = sampling.nondegenerate_boost(rng, labels)
    s = sampling.random_twin_state(rng, labels, 2)
    assert trace_invariance_residual(L, s) < 1e-10


def test_trace_of_migrated_pair(k15):
    # |1_k>(x)<1_k| -> |1_l'>(x)<1_l'| keeps trace 1
    s = TwinState.product(FockState.single(k15), FockState.single(k15))
    np.testing.assert_allclose(trace_functional(represent_boost(FLIP, s)), 1.0)


def test_unitarity_on_truncated_family(k15, stay):
    family = basis_family([k15, stay], 3)
    assert len(family) == math.comb(3 + 4, 4)
    assert unitarity_residual(FLIP, family) < 1e-12
    assert unitarity_residual(KEEP, family) < 1e-12


def test_truncation_respected_on_migration(k15):
    with settings.using(n_max=2):
        s = TwinState.product(FockState.basis({k15: 2}), FockState.basis({k15: 2}))
        out = represent_boost(FLIP, s)
        assert out.max_side_particles() == 2
