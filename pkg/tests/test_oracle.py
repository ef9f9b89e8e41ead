import numpy as np
import pytest

from instances import ASYMPTOTIC_PAIR, CIRCLES, CROSSING_LINES, DOUBLE_LINE_HYPERBOLA
from qmeet.oracle import descend_to_intersection, quartic, sample_min


def test_double_line_oracle_hits_boundary():
    rep = sample_min(*DOUBLE_LINE_HYPERBOLA, nSamples=200_000, seed=7)
    assert rep.bestValue <= 0.02
    assert rep.onBoundary


def test_circles_oracle_value():
    rep = sample_min(*CIRCLES, nSamples=20_000, seed=0)
    assert rep.bestValue == pytest.approx(4.5, abs=1e-6)
    assert rep.descentConverged


def test_crossing_lines_oracle_and_descent():
    rep = sample_min(*CROSSING_LINES, nSamples=10_000)
    assert rep.bestValue <= 1e-12
    w = descend_to_intersection(*CROSSING_LINES, [3.0, -2.0])
    np.testing.assert_allclose(w, [0.0, 0.0], atol=1e-6)


def test_descent_fails_on_asymptotic_pair():
    rng = np.random.default_rng(0)
    for x in rng.uniform(-3, 3, size=(10, 2)):
        assert descend_to_intersection(*ASYMPTOTIC_PAIR, x) is None


def test_oracle_is_monotone_in_sample_count():
    f1, f2 = ASYMPTOTIC_PAIR
    vals = [sample_min(f1, f2, nSamples=n, seed=3, expand=False).bestValue for n in (1_000, 10_000, 50_000)]
    assert vals[0] >= vals[1] >= vals[2]


def test_oracle_is_reproducible_and_reports():
    a = sample_min(*ASYMPTOTIC_PAIR, nSamples=5_000, seed=11)
    b = sample_min(*ASYMPTOTIC_PAIR, nSamples=5_000, seed=11)
    assert a.bestValue == b.bestValue
    d = a.to_dict()
    assert set(d) >= {"bestValue", "bestPoint", "samples", "box", "onBoundary"}
    assert quartic(*ASYMPTOTIC_PAIR, a.bestPoint)[0] == pytest.approx(a.bestValue)
    with pytest.raises(ValueError):
        sample_min(*ASYMPTOTIC_PAIR, box=(1.0, 1.0))
