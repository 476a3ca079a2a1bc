import numpy as np
import pytest

from truncated_hilbert.errors import QuadratureError
from truncated_hilbert.quadrature import integrate


def test_polynomial_exact():
    val, err = integrate(lambda x: 3 * x ** 2, 0.0, 2.0, 1e-12)
    assert abs(val - 8.0) < 1e-12
    assert err >= 0


def test_sine_known_value():
    val, _ = integrate(np.sin, 0.0, np.pi, 1e-12)
    assert abs(val - 2.0) < 1e-12


def test_empty_interval():
    val, err = integrate(np.sin, 1.0, 1.0, 1e-10)
    assert val == 0.0 and err == 0.0
    val, err = integrate(np.sin, 2.0, 1.0, 1e-10)
    assert val == 0.0


def test_error_bound_is_conservative():
    # bound reported at tol must cover the difference to a tighter run
    loose, bound = integrate(lambda x: np.exp(-x) * np.cos(5 * x), 0.0, 3.0, 1e-6)
    tight, _ = integrate(lambda x: np.exp(-x) * np.cos(5 * x), 0.0, 3.0, 1e-13)
    assert abs(loose - tight) <= max(bound, 1e-13)


def test_budget_exhaustion_raises_with_estimate():
    # genuinely rough integrand: resolution demand grows without bound
    def f(x):
        return np.sin(1.0 / np.maximum(x, 1e-300)) / np.maximum(np.sqrt(x), 1e-300)

    with pytest.raises(QuadratureError) as info:
        integrate(f, 0.0, 1.0, 1e-14, max_level=6)
    assert info.value.estimate is not None
    assert info.value.error_bound is not None
