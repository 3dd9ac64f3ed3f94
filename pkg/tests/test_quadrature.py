import math

import pytest

from graceperiod.quadrature import adaptive_simpson


def test_cubics_are_exact():
    assert adaptive_simpson(lambda x: x ** 3 - 2 * x + 1, 0.0, 2.0) == pytest.approx(
        4.0 - 4.0 + 2.0, abs=1e-14
    )


def test_known_smooth_integrals():
    assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-10)
    assert adaptive_simpson(lambda x: math.exp(-x), 0.0, 50.0) == pytest.approx(
        1.0, abs=1e-9
    )
    assert adaptive_simpson(lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0) == pytest.approx(
        math.pi / 4.0, abs=1e-12
    )


def test_orientation_and_degenerate_interval():
    assert adaptive_simpson(lambda x: x, 3.0, 3.0) == 0.0
    forward = adaptive_simpson(lambda x: x * x, 0.0, 1.0)
    assert adaptive_simpson(lambda x: x * x, 1.0, 0.0) == pytest.approx(-forward)


def test_peaked_integrand_subdivides():
    # narrow gaussian bump inside a wide interval
    val = adaptive_simpson(
        lambda x: math.exp(-((x - 0.7) ** 2) / 5e-3), 0.0, 10.0
    )
    exact = math.sqrt(5e-3 * math.pi)
    assert val == pytest.approx(exact, rel=1e-8)
