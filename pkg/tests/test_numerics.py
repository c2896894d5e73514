import math

import pytest

from bgcsim import NoRootError, QuadratureError, adaptive_simpson, bisect_root


def test_simpson_exponential():
    value, err = adaptive_simpson(math.exp, 0.0, 1.0)
    assert value == pytest.approx(math.e - 1.0, abs=1e-12)
    assert err < 1e-10


def test_simpson_integrates_cubics_exactly():
    value, _ = adaptive_simpson(lambda x: x**3, 0.0, 2.0)
    assert value == pytest.approx(4.0, abs=1e-14)


def test_simpson_gaussian_mass():
    value, _ = adaptive_simpson(lambda x: math.exp(-0.5 * x * x), -8.0, 8.0)
    assert value == pytest.approx(math.sqrt(2.0 * math.pi), abs=1e-9)


def test_simpson_orientation():
    forward, _ = adaptive_simpson(math.sin, 0.0, 2.0)
    backward, _ = adaptive_simpson(math.sin, 2.0, 0.0)
    assert backward == -forward


def test_simpson_degenerate_interval():
    assert adaptive_simpson(math.exp, 3.0, 3.0) == (0.0, 0.0)


def test_simpson_depth_exhaustion():
    with pytest.raises(QuadratureError):
        adaptive_simpson(
            lambda x: math.exp(x), 0.0, 10.0, abs_tol=1e-15, rel_tol=0.0, max_depth=2
        )


def test_simpson_handles_oscillation():
    value, _ = adaptive_simpson(lambda x: math.sin(20.0 * x), 0.0, math.pi)
    exact = (1.0 - math.cos(20.0 * math.pi)) / 20.0
    assert value == pytest.approx(exact, abs=1e-10)


def test_bisect_finds_sqrt5():
    root = bisect_root(lambda x: x * x - 5.0, 0.0, 10.0)
    assert root == pytest.approx(math.sqrt(5.0), abs=1e-9)


def test_bisect_decreasing_function():
    root = bisect_root(lambda x: 5.0 - x, 0.0, 10.0)
    assert root == pytest.approx(5.0, abs=1e-9)


def test_bisect_endpoint_roots():
    assert bisect_root(lambda x: x, 0.0, 1.0) == 0.0
    assert bisect_root(lambda x: x - 1.0, 0.0, 1.0) == 1.0


def test_bisect_requires_sign_change():
    with pytest.raises(NoRootError):
        bisect_root(lambda x: x * x + 1.0, -1.0, 1.0)
