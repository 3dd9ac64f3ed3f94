import numpy as np
import pytest

from graceperiod.adversary import (
    AdversaryModel,
    remaining_time,
    sample_length,
    worst_case_for_det,
)
from graceperiod.costmodel import ConflictInstance, expected_cost, pointwise_cost
from graceperiod.rng import stream
from graceperiod.strategy import ConflictMode, StrategySpec, Variant, make_strategy

N = 1_000_000


@pytest.mark.parametrize("kind", ["geometric", "normal_truncated", "uniform",
                                  "exponential", "poisson"])
def test_calibrated_means_and_positivity(kind):
    model = AdversaryModel(kind, 500.0)
    xs = sample_length(model, stream(11, kind), N)
    assert np.all(xs > 0.0)
    # configured mean must be matched well inside the 2% budget
    assert abs(float(xs.mean()) - 500.0) / 500.0 < 0.02


def test_exponential_clt_bound():
    model = AdversaryModel("exponential", 500.0)
    xs = sample_length(model, stream(12, "exp"), N)
    assert abs(float(xs.mean()) - 500.0) < 3.0


def test_uniform_support():
    model = AdversaryModel("uniform", 500.0)
    xs = sample_length(model, stream(13, "uni"), 100_000)
    assert np.all(xs > 0.0) and np.all(xs <= 1000.0)


def test_small_mean_calibration():
    # truncation bias would be large here without recalibration
    model = AdversaryModel("normal_truncated", 2.0, sigma=2.0)
    xs = sample_length(model, stream(14, "nt"), N)
    assert abs(float(xs.mean()) - 2.0) / 2.0 < 0.02
    model = AdversaryModel("poisson", 1.5)
    xs = sample_length(model, stream(15, "pz"), 200_000)
    assert np.all(xs >= 1.0)
    assert abs(float(xs.mean()) - 1.5) / 1.5 < 0.02


def test_discrete_kinds_are_integer_valued():
    for kind in ("geometric", "poisson"):
        xs = sample_length(AdversaryModel(kind, 40.0), stream(16, kind), 10_000)
        assert np.all(xs == np.round(xs))
        ys = remaining_time(AdversaryModel(kind, 40.0), stream(17, kind), 10_000)
        assert np.all(ys == np.round(ys)) and np.all(ys >= 1.0)


def test_point_mass():
    model = AdversaryModel("point_mass", 42.0, value=42.0)
    assert sample_length(model, stream(1)) == 42.0
    ys = remaining_time(model, stream(1), 100)
    assert np.all(ys == 42.0)


def test_remaining_time_halves_the_mean():
    model = AdversaryModel("exponential", 500.0)
    ys = remaining_time(model, stream(18, "rem"), N)
    assert np.all(ys > 0.0)
    assert abs(float(ys.mean()) - 250.0) < 3.0


def test_reproducible_streams():
    model = AdversaryModel("poisson", 30.0)
    a = sample_length(model, stream(19, "rep"), 5000)
    b = sample_length(model, stream(19, "rep"), 5000)
    assert np.array_equal(a, b)


def test_extreme_sigma_rejected():
    with pytest.raises(ValueError):
        sample_length(AdversaryModel("normal_truncated", 1.0, sigma=100.0), stream(1), 10)


def test_validation():
    with pytest.raises(ValueError):
        AdversaryModel("nope", 10.0)
    with pytest.raises(ValueError):
        AdversaryModel("exponential", 0.0)
    with pytest.raises(ValueError):
        AdversaryModel("geometric", 0.5)
    with pytest.raises(ValueError):
        AdversaryModel("poisson", 1.0)
    with pytest.raises(ValueError):
        AdversaryModel("point_mass", 0.0, value=0.0)


class TestWorstCaseForDet:
    def test_point_mass_at_threshold(self):
        model = worst_case_for_det(2, 100.0)
        assert model.kind == "point_mass"
        assert model.value == 100.0
        assert worst_case_for_det(5, 100.0).value == 25.0

    def test_det_cost_under_it(self):
        # tie rule fires the abort: cost 300 against optimum 100
        inst = ConflictInstance(ConflictMode.REQUESTOR_WINS, 2, 100.0,
                                worst_case_for_det(2, 100.0).value)
        bd = pointwise_cost(inst, 100.0)
        assert not bd.committed and bd.total == 300.0

    def test_rw_uniform_cost_under_it(self):
        strat = make_strategy(
            StrategySpec(ConflictMode.REQUESTOR_WINS, 2, 100.0,
                         Variant.RANDOMIZED_UNCONSTRAINED)
        )
        inst = ConflictInstance(ConflictMode.REQUESTOR_WINS, 2, 100.0, 100.0)
        assert expected_cost(strat, inst) == pytest.approx(200.0, rel=1e-9)
