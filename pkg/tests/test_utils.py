"""Tests for `implicit_shape_matching.utils` module."""
import numpy as np
import pytest

from implicit_shape_matching.utils.linalg import factorize
from implicit_shape_matching.utils.linalg import pivot_condition
from implicit_shape_matching.utils.linalg import shifted_factorize
from implicit_shape_matching.utils.store import ArrayStore
from implicit_shape_matching.utils.store import LiFoStack

# Globals
N_PARTICLES = 4
DIM = 3
SIZE = 2
LAYER = "positions"


def test_array_store():
    layers = [np.zeros([N_PARTICLES, DIM]) + k for k in range(1, 5)]

    # Create store and initialize layer
    store = ArrayStore()
    store.create(LAYER, SIZE)
    assert store.depth(LAYER) == 0

    # Adding layers to the stack
    for layer in layers:
        store[LAYER] = layer

    # Tests
    assert store.depth(LAYER) == SIZE
    assert store[LAYER].mean() == 4
    assert store.previous(LAYER).mean() == 3
    with pytest.raises(IndexError):
        store.previous(LAYER, lag=2)


def test_array_store_copies_layers():
    store = ArrayStore()
    store.create(LAYER, SIZE)
    layer = np.ones([N_PARTICLES, DIM])
    store[LAYER] = layer
    layer[0, 0] = 5.0
    assert store[LAYER][0, 0] == 1.0


def test_lifo_stack():
    stack = LiFoStack(3)
    for k in range(5):
        stack.push(np.full(2, float(k)))
    assert len(stack) == 3
    assert stack.pop()[0] == 4.0
    assert stack.peek(2)[0] == 2.0
    assert [stack.peek(lag)[0] for lag in range(3)] == [4.0, 3.0, 2.0]
    assert repr(stack) == "LiFoStack(size=3)"
    with pytest.raises(ValueError):
        LiFoStack(0)


def test_factorize_solves():
    matrix = np.array([[4.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 2.0]])
    rhs = np.array([1.0, -2.0, 0.5])
    factors = factorize(matrix)
    assert np.allclose(matrix @ factors.solve(rhs), rhs)
    assert 1.0 <= factors.condition < 10.0


def test_factorize_singular():
    assert factorize(np.zeros((2, 2))).condition == float("inf")
    assert factorize(np.array([[np.nan, 0.0], [0.0, 1.0]])).condition == float("inf")
    assert pivot_condition(np.zeros((0, 0))) == 1.0


def test_shifted_factorize_only_shifts_on_failure():
    matrix = np.diag([2.0, 1.0])
    assert np.array_equal(shifted_factorize(matrix, 1e12).lu, factorize(matrix).lu)
    singular = np.array([[1.0, 1.0], [1.0, 1.0]])
    factors = shifted_factorize(singular, 1e12)
    assert np.isfinite(factors.condition)
    assert factors.condition <= 1e12
