"""Small dense Hermitian linear algebra.

The eigensolver is a cyclic complex Jacobi iteration written to run on a
whole stack of matrices at once, which is how it is used on a frequency
grid (thousands of 3x3 matrices). A single matrix is a stack of one.
"""

from typing import NamedTuple

import numpy as np

from .errors import NonFiniteEntries, NotHermitian, NotPositiveSemidefinite, NotSquare

HERMITIAN_TOL = 1e-10
JACOBI_TOL = 1e-14
MAX_SWEEPS = 100
PSD_CLAMP = 1e-12
# eigenvalues closer than this (relative to the matrix scale) count as tied
TIE_TOL = 1e-12


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_complex_matrix(a, *, square=False):
    """Validate ``a`` as a finite complex matrix (or stack of matrices)."""
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2:
        raise NotSquare(f"expected a matrix, got shape {a.shape}")
    if square and a.shape[-1] != a.shape[-2]:
        raise NotSquare(f"matrix is {a.shape[-2]}x{a.shape[-1]}")
    if not np.all(np.isfinite(a)):
        raise NonFiniteEntries("matrix has NaN or infinite entries")
    return a


def frobenius_norm(a):
    a = np.asarray(a)
    return float(np.sqrt(np.sum(np.abs(a) ** 2)))


def _frob(a):
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=(-2, -1)))


def hermitian_defect(a):
    """Relative Frobenius asymmetry ||A - A*|| / ||A|| for each matrix in a stack."""
    a = np.asarray(a)
    num = _frob(a - np.conj(np.swapaxes(a, -1, -2)))
    den = _frob(a)
    return np.where(den > 0, num / np.where(den > 0, den, 1.0), num)


def _jacobi(a, tol=JACOBI_TOL, max_sweeps=MAX_SWEEPS):
    """Cyclic Jacobi on a stack ``a`` of shape (B, n, n); returns (diag, V)."""
    a = a.copy()
    nb, n, _ = a.shape
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy()
    if n == 1:
        return a[:, :, 0].real.copy(), v
    scale = _frob(a)
    offmask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a[:, offmask]) ** 2, axis=1))
        if np.all(off <= tol * scale):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                mag = np.abs(apq)
                # entries this small relative to the matrix are already converged
                active = mag > 1e-3 * tol * scale
                if not active.any():
                    continue
                safe = np.where(active, mag, 1.0)
                e = np.where(active, apq / safe, 1.0)
                app = a[:, p, p].real.copy()
                aqq = a[:, q, q].real.copy()
                tau = np.where(active, (aqq - app) / (2.0 * safe), 0.0)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                ce = (s * e)[:, None]
                cc = c[:, None]

                colp = a[:, :, p].copy()
                colq = a[:, :, q].copy()
                a[:, :, p] = cc * colp - np.conj(ce) * colq
                a[:, :, q] = ce * colp + cc * colq
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :].copy()
                a[:, p, :] = cc * rowp - ce * rowq
                a[:, q, :] = np.conj(ce) * rowp + cc * rowq
                a[:, p, p] = app - t * mag
                a[:, q, q] = aqq + t * mag
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0

                vp = v[:, :, p].copy()
                vq = v[:, :, q].copy()
                v[:, :, p] = cc * vp - np.conj(ce) * vq
                v[:, :, q] = ce * vp + cc * vq
    return np.diagonal(a, axis1=1, axis2=2).real.copy(), v


def _order(w, vecs, scale):
    """Descending order; near-ties are ordered by the position of the
    eigenvector's largest-modulus component (earliest coordinate first)."""
    quant = np.round(w / np.where(scale > 0, scale, 1.0)[:, None] / TIE_TOL)
    lead = np.argmax(np.abs(vecs) - 1e-9 * np.arange(vecs.shape[1])[None, :, None], axis=1)
    return np.lexsort((lead, -quant), axis=-1)


def eig_hermitian_batch(a, *, check=True):
    """Eigendecomposition of a stack of Hermitian matrices.

    Parameters
    ----------
    a : (..., n, n) array_like
        Hermitian matrices.
    check : bool
        Reject inputs whose relative asymmetry exceeds ``HERMITIAN_TOL``.

    Returns
    -------
    w : (..., n) ndarray
        Real eigenvalues, descending.
    v : (..., n, n) ndarray
        Orthonormal eigenvectors as columns, in the order of ``w``.
    """
    a = as_complex_matrix(a, square=True)
    lead_shape = a.shape[:-2]
    n = a.shape[-1]
    a = a.reshape(-1, n, n)
    if check:
        bad = hermitian_defect(a) > HERMITIAN_TOL
        if bad.any():
            raise NotHermitian(f"{int(bad.sum())} matrices fail the Hermitian check")
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    w, v = _jacobi(a)
    scale = np.max(np.abs(w), axis=1) if n else np.zeros(len(w))
    order = _order(w, v, scale)
    w = np.take_along_axis(w, order, axis=1)
    v = np.take_along_axis(v, order[:, None, :], axis=2)
    return w.reshape(*lead_shape, n), v.reshape(*lead_shape, n, n)


def eig_hermitian(a):
    """Eigendecomposition of one Hermitian matrix, eigenvalues descending."""
    a = as_complex_matrix(a, square=True)
    if a.ndim != 2:
        raise NotSquare(f"expected a single matrix, got shape {a.shape}")
    w, v = eig_hermitian_batch(a[None])
    return HermitianEigen(w[0], v[0])


def clamp_psd(w, scale=None):
    """Zero out round-off negatives of PSD spectra.

    Values in ``[-PSD_CLAMP * scale, 0)`` become 0; anything more negative
    raises ``NotPositiveSemidefinite``. ``scale`` defaults to max |w|.
    """
    w = np.asarray(w, dtype=float)
    if scale is None:
        scale = np.max(np.abs(w)) if w.size else 0.0
    floor = -PSD_CLAMP * scale
    if np.any(w < floor):
        raise NotPositiveSemidefinite(f"eigenvalue {w.min():.3e} below {floor:.3e}")
    return np.where(w < 0, 0.0, w)


def spectral_norm(a):
    """Largest singular value, from the eigenvalues of A*A."""
    a = as_complex_matrix(a)
    if a.ndim != 2:
        raise NotSquare(f"expected a single matrix, got shape {a.shape}")
    if not np.any(a):
        return 0.0
    gram = np.conj(a.T) @ a
    w = eig_hermitian(gram).eigenvalues
    return float(np.sqrt(max(w[0], 0.0)))
