import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specreg.corpus import template_density, template_eigenvalues
from specreg.errors import NotHermitian, NotPositiveSemidefinite, NotSquare
from specreg.hermitian import clamp_psd, eig_hermitian, eig_hermitian_batch, frobenius_norm, spectral_norm

from conftest import random_hermitian


def test_identity():
    w, v = eig_hermitian(np.eye(3))
    assert np.allclose(w, 1)
    assert np.allclose(v.conj().T @ v, np.eye(3), atol=1e-12)


def test_constant_rank_two_matrix():
    f = np.array([[0.5, 0, 0.5], [0, 1, 0], [0.5, 0, 0.5]])
    w, v = eig_hermitian(f)
    assert np.allclose(w, [1, 1, 0], atol=1e-14)
    # tie between the unit eigenvalues resolved by leading coordinate
    assert np.allclose(np.abs(v[:, 0]), [2 ** -0.5, 0, 2 ** -0.5])


def test_template_eigenvalues_closed_form():
    f11, f22 = 1 / (2 * np.pi), 0.5
    w, _ = eig_hermitian(template_density(f11, f22))
    l1, l2 = template_eigenvalues(f11, f22)
    assert np.allclose(w, [l1, l2, 0], atol=1e-12)
    assert w[0] == pytest.approx(1.101594, abs=1e-6)
    assert w[1] == pytest.approx(0.216716, abs=1e-6)
    assert w[0] * w[1] == pytest.approx(3 / (4 * np.pi), rel=1e-12)
    assert w[0] * w[1] == pytest.approx(3 * f11 * f22, rel=1e-12)


def test_matches_lapack_on_random():
    rng = np.random.default_rng(1)
    for n in (2, 3, 5, 8, 16):
        a = random_hermitian(rng, n)
        w, _ = eig_hermitian(a)
        assert np.allclose(w, np.linalg.eigvalsh(a)[::-1], atol=1e-12 * np.abs(a).max())


def test_batch_shapes():
    rng = np.random.default_rng(2)
    a = np.stack([random_hermitian(rng, 4) for _ in range(6)]).reshape(2, 3, 4, 4)
    w, v = eig_hermitian_batch(a)
    assert w.shape == (2, 3, 4) and v.shape == (2, 3, 4, 4)
    assert np.all(np.diff(w, axis=-1) <= 0)


def test_errors():
    with pytest.raises(NotSquare):
        eig_hermitian(np.ones((2, 3)))
    with pytest.raises(NotHermitian):
        eig_hermitian(np.array([[1, 2], [0, 1]]))
    with pytest.raises(NotPositiveSemidefinite):
        clamp_psd(np.array([1.0, -0.5]))
    assert np.array_equal(clamp_psd(np.array([1.0, -1e-15])), [1.0, 0.0])


def test_norms():
    assert spectral_norm(np.zeros((3, 3))) == 0
    assert spectral_norm(np.diag([3.0, -4.0])) == pytest.approx(4, rel=1e-10)
    assert spectral_norm(np.array([[0, 2.0], [0, 0]])) == pytest.approx(2, rel=1e-10)
    for d in (1, 2, 5):
        assert frobenius_norm(np.eye(d)) == pytest.approx(np.sqrt(d))
    assert frobenius_norm(np.array([[1, 1j], [-1j, 1]])) == pytest.approx(2)


def test_frobenius_of_field_coefficient(regular_analytic_field):
    from specreg.eigenfield import fourier_of_field
    psi1 = fourier_of_field(regular_analytic_field).coef(1)
    direct = np.sqrt(sum(abs(z) ** 2 for z in psi1.ravel()))
    assert frobenius_norm(psi1) == pytest.approx(direct, rel=1e-14)
    assert frobenius_norm(psi1) == pytest.approx(np.sqrt(2), rel=1e-12)


hermitian = st.integers(1, 10).flatmap(
    lambda n: st.integers(0, 2 ** 32 - 1).map(lambda s: random_hermitian(np.random.default_rng(s), n)))


@settings(max_examples=60, deadline=None)
@given(hermitian)
def test_reconstruction_and_orthonormality(a):
    w, v = eig_hermitian(a)
    n = len(w)
    assert frobenius_norm(v @ np.diag(w) @ v.conj().T - a) <= 1e-10 * frobenius_norm(a)
    assert frobenius_norm(v.conj().T @ v - np.eye(n)) <= 1e-12
    assert np.all(np.diff(w) <= 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_norm_inequalities(rows, cols, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    s, f = spectral_norm(a), frobenius_norm(a)
    assert s == pytest.approx(np.linalg.norm(a, 2), rel=1e-10)
    assert s <= f * (1 + 1e-12)
    assert f <= np.sqrt(min(rows, cols)) * s * (1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2 ** 32 - 1))
def test_psd_eigenvalues_not_below_clamp(n, seed):
    rng = np.random.default_rng(seed)
    b = rng.standard_normal((n, max(1, n // 2))) + 1j * rng.standard_normal((n, max(1, n // 2)))
    a = b @ b.conj().T
    w, _ = eig_hermitian(a)
    assert w.min() >= -1e-12 * spectral_norm(a)
