import numpy as np
import pytest

from tachyon_twin import sampling
from tachyon_twin.kinematics import Flipped, classify_mode_boost


@pytest.mark.parametrize("case", [sampling.PRESERVED, sampling.FLIPPED, sampling.MIXED])
def test_boost_case_triple(case):
    rng = np.random.default_rng(3)
    for _ in range(10):
        L, k, l = sampling.boost_case_triple(rng, case)
        flips = [isinstance(classify_mode_boost(L, lab), Flipped) for lab in (k, l)]
        expected = {sampling.PRESERVED: [False, False], sampling.FLIPPED: [True, True]}
        if case == sampling.MIXED:
            assert flips[0] != flips[1]
        else:
            assert flips == expected[case]


def test_same_label_mixed_rejected():
    with pytest.raises(ValueError):
        sampling.boost_case_triple(np.random.default_rng(0), sampling.MIXED, same=True)


def test_random_fock_state_normalised():
    rng = np.random.default_rng(1)
    labels = [sampling.random_label(rng) for _ in range(3)]
    s = sampling.random_fock_state(rng, labels, 4)
    np.testing.assert_allclose(s.norm(), 1.0, rtol=1e-14)
    assert s.max_particles() <= 4


def test_seeded_reproducibility():
    a = sampling.random_label(np.random.default_rng(9))
    b = sampling.random_label(np.random.default_rng(9))
    assert a == b
