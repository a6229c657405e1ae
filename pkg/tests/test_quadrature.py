import math

import numpy as np
import pytest

from ddsim.exceptions import NumericalError
from ddsim.quadrature import integrate_panels


def test_polynomial_exact():
    val, err, n = integrate_panels(lambda x: x ** 5, [0, 1, 2])
    assert val == pytest.approx(2 ** 6 / 6, rel=1e-14)
    assert n == 2


def test_oscillatory():
    val, _, _ = integrate_panels(lambda x: np.sin(50 * x) ** 2, np.linspace(0, math.pi, 5),
                                 rtol=1e-12, atol=0)
    assert val == pytest.approx(math.pi / 2, rel=1e-11)


def test_empty():
    assert integrate_panels(np.sin, [1.0]) == (0.0, 0.0, 0)


def test_failure_carries_diagnostics():
    with pytest.raises(NumericalError) as info:
        integrate_panels(lambda x: np.sign(x - 0.3) * 1e6, [0, 1], rtol=0, atol=1e-30, max_rounds=3)
    assert "tolerance" in info.value.diagnostics
