import numpy as np
import pytest

from specreg.corpus import analytic, example
from specreg.eigenfield import EigenField, align_gauge, decompose


@pytest.fixture(scope="session")
def regular():
    return example("regular")


@pytest.fixture(scope="session")
def regular_field(regular):
    return align_gauge(decompose(regular))


@pytest.fixture(scope="session")
def regular_analytic_field():
    """The closed-form field with entries proportional to e^{-i omega}."""
    ns = analytic("regular")
    omega = -np.pi + 2 * np.pi * np.arange(4096) / 4096
    return EigenField.from_field(ns.field(omega))


@pytest.fixture(scope="session")
def type1():
    return example("type1")


@pytest.fixture(scope="session")
def type1_field(type1):
    return align_gauge(decompose(type1, rank=2))


def random_hermitian(rng, n, psd=False):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a @ a.conj().T if psd else (a + a.conj().T) / 2


def smooth_density(n, d=3, seed=0, degree=3):
    """A random trigonometric-polynomial PSD density: (1/2pi) P(w) P(w)^*."""
    rng = np.random.default_rng(seed)
    coef = rng.standard_normal((degree + 1, d, d)) + 1j * rng.standard_normal((degree + 1, d, d))
    omega = -np.pi + 2 * np.pi * np.arange(n) / n
    P = np.einsum("jab,mj->mab", coef, np.exp(-1j * np.outer(omega, np.arange(degree + 1))))
    return np.einsum("mab,mcb->mac", P, P.conj()) / (2 * np.pi)
