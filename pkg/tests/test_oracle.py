"""Tests for `implicit_shape_matching.oracle` module."""
import numpy as np
import pytest

from implicit_shape_matching.errors import InvertedOrDegenerate
from implicit_shape_matching.errors import OracleEvalFailure
from implicit_shape_matching.errors import ShapeMismatch
from implicit_shape_matching.oracle import FdConfig
from implicit_shape_matching.oracle import compare
from implicit_shape_matching.oracle import fd_gradient
from implicit_shape_matching.oracle import fd_hessian
from implicit_shape_matching.oracle import fd_jacobian
from implicit_shape_matching.oracle.compare import entry_errors

# Globals
MATRIX = np.array([[3.0, 1.0, 0.0], [1.0, 2.0, -0.5], [0.0, -0.5, 1.0]])
POINT = np.array([0.3, -1.2, 0.7])


def quadratic(x):
    return 0.5 * x @ MATRIX @ x


def cubic(x):
    return np.sum(x**3) + x[0] * x[1] * x[2]


def cubic_gradient(x):
    return 3.0 * x**2 + np.array([x[1] * x[2], x[0] * x[2], x[0] * x[1]])


def test_fd_gradient_of_quadratic():
    numeric = fd_gradient(quadratic, POINT)
    assert np.allclose(numeric, MATRIX @ POINT, atol=1e-6)


def test_fd_hessian_of_quadratic():
    result = fd_hessian(quadratic, POINT)
    assert np.allclose(result.matrix, MATRIX, atol=1e-6)
    assert np.array_equal(result.matrix, result.matrix.T)
    assert result.asymmetry >= 0.0


def test_fd_jacobian_layout():
    numeric = fd_jacobian(lambda x: np.outer(x, x[:2]), POINT)
    assert numeric.shape == (6, 3)
    assert np.allclose(numeric[0], [2.0 * POINT[0], 0.0, 0.0], atol=1e-8)
    assert np.allclose(numeric[1], [POINT[1], POINT[0], 0.0], atol=1e-8)


def test_central_error_is_second_order():
    exact = cubic_gradient(POINT)
    coarse = np.max(np.abs(fd_gradient(cubic, POINT, FdConfig(step=1e-2)) - exact))
    fine = np.max(np.abs(fd_gradient(cubic, POINT, FdConfig(step=5e-3)) - exact))
    assert 3.5 <= coarse / fine <= 4.5


def test_forward_error_is_first_order():
    exact = cubic_gradient(POINT)
    coarse_cfg = FdConfig(step=1e-2, scheme="forward")
    fine_cfg = FdConfig(step=5e-3, scheme="forward")
    coarse = np.max(np.abs(fd_gradient(cubic, POINT, coarse_cfg) - exact))
    fine = np.max(np.abs(fd_gradient(cubic, POINT, fine_cfg) - exact))
    assert 1.7 <= coarse / fine <= 2.3


def test_richardson_extrapolation():
    exact = cubic_gradient(POINT)
    plain = fd_gradient(cubic, POINT, FdConfig(step=1e-2, scheme="forward"))
    extrapolated = fd_gradient(
        cubic, POINT, FdConfig(step=1e-2, scheme="forward", richardson=True)
    )
    assert np.max(np.abs(extrapolated - exact)) < 0.1 * np.max(np.abs(plain - exact))
    central = fd_gradient(cubic, POINT, FdConfig(step=1e-2, richardson=True))
    assert np.allclose(central, exact, atol=1e-9)


def test_step_scales_with_point():
    cfg = FdConfig(step=1e-5)
    assert cfg.scaled_step(np.array([0.5, -0.2])) == 1e-5
    assert cfg.scaled_step(np.array([0.5, -20.0])) == pytest.approx(2e-4)
    assert cfg.order == 2
    assert FdConfig(scheme="forward").order == 1


def test_fd_config_validation():
    with pytest.raises(ValueError):
        FdConfig(step=0.0)
    with pytest.raises(ValueError):
        FdConfig(step=float("nan"))
    with pytest.raises(ValueError):
        FdConfig(scheme="backward")


def test_eval_failure_names_coordinate():
    def guarded(x):
        if x[1] > POINT[1]:
            raise InvertedOrDegenerate("inverted")
        return np.sum(x**2)

    with pytest.raises(OracleEvalFailure) as info:
        fd_gradient(guarded, POINT)
    assert info.value.coordinate == 1
    assert isinstance(info.value.cause, InvertedOrDegenerate)


def test_eval_failure_on_non_finite_value():
    with pytest.raises(OracleEvalFailure) as info:
        fd_gradient(lambda x: np.inf if x[2] < POINT[2] else 0.0, POINT)
    assert info.value.coordinate == 2


def test_compare():
    report = compare([1.0, 2.0, 3.0], [1.0, 2.0 + 2e-6, 3.0], 1e-5)
    assert report.passed
    assert report.index == (1,)
    assert report.max_error == pytest.approx((2e-6 - 1e-9) / (2.0 + 2e-6))
    assert not compare([1.0], [1.1], 1e-5).passed


def test_compare_floor():
    assert compare([0.0, 1.0], [1e-10, 1.0], 1e-12).passed
    assert not compare([0.0], [1e-6], 1e-3, abs_floor=1e-9).passed
    assert compare([0.0], [1e-6], 1e-3, abs_floor=1e-5).passed
    with pytest.raises(ValueError):
        compare([0.0], [0.0], 1e-3, abs_floor=0.0)


def test_compare_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        compare(np.zeros(3), np.zeros((3, 1)), 1e-6)


def test_compare_nan_fails():
    report = compare([1.0, np.nan], [1.0, 1.0], 1e-6)
    assert not report.passed
    assert report.max_error == np.inf
    assert report.index == (1,)


def test_compare_empty():
    assert compare(np.zeros(0), np.zeros(0), 1e-6).passed


def test_entry_errors():
    errors = entry_errors(np.array([2.0, 0.0]), np.array([1.0, 0.0]), 1e-9)
    assert errors[0] == pytest.approx((1.0 - 1e-9) / 2.0)
    assert errors[1] == 0.0
