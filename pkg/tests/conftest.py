"""Shared fixtures: built-in models and deterministic sample points."""

import numpy as np
import pytest

from hgeom import builtin_model, evaluate_point, sample_domain


@pytest.fixture(scope="session")
def flat4():
    return builtin_model("flat4")


@pytest.fixture(scope="session")
def flat8():
    return builtin_model("flat8")


@pytest.fixture(scope="session")
def sphere():
    return builtin_model("sphere")


@pytest.fixture(scope="session")
def sphere_points(sphere):
    return sample_domain(sphere, 200, 1)


@pytest.fixture(scope="session")
def flat4_points(flat4):
    return sample_domain(flat4, 200, 1)


@pytest.fixture(scope="session")
def flat8_points(flat8):
    return sample_domain(flat8, 200, 1)


@pytest.fixture(scope="session")
def sphere_ref(sphere):
    """The worked-example chart point used for frozen component values."""
    return evaluate_point(sphere, np.array([1.0, 0.5, 0.3, 0.7]))
