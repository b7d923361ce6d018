"""Eigenvalue/eigenvector fields of a spectral density over the frequency grid.

A density of constant rank r factors as f = U diag(lambda) U* with U of
shape (d, r) at each node. The columns of U are only defined up to a unit
complex factor per channel and node (the gauge); `align_gauge` picks one,
and `fourier_of_field` measures how much coefficient energy sits at
negative indices, i.e. how far the chosen field is from being causal.
"""

from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.signal import fftconvolve

from .errors import BadParams, ChannelCollapse, LogDivergence, NotPositiveSemidefinite, RankNotConstant
from .hermitian import PSD_CLAMP, eig_hermitian_batch
from .spectral import FrequencyGrid, fourier_coefficients, synthesize, trapezoid_integral

RANK_TOL = 1e-10
ONE_SIDED_TOL = 1e-6
COLLAPSE_TOL = 1e-8
LOG_FLOOR = 1e-300
DIVERGENCE_THRESHOLD = -50 * 2 * np.pi
# share of nodes whose rank differs before the rank is declared non-constant
RANK_FRACTION = 0.01
# a genuine rank change is a jump: the deficient share barely moves when the
# tolerance is loosened by this factor, unlike eigenvalues decaying to zero
PLATEAU_FACTOR = 1e4
PLATEAU_RATIO = 0.9

GAUGES = ("phase-continuity", "anchor-real", "none")
ORDERS = ("sort", "track")
_GAUGE_ALIASES = {"raw": "none", "continuity": "phase-continuity"}


def canonical_gauge(name):
    name = _GAUGE_ALIASES.get(name, name)
    if name not in GAUGES:
        raise BadParams(f"unknown gauge {name!r}; choose from {GAUGES + tuple(_GAUGE_ALIASES)}")
    return name


@dataclass(frozen=True)
class EigenField:
    """Per-node nonzero eigenvalues and eigenvectors.

    Attributes
    ----------
    lambdas : (N, r) ndarray
        Eigenvalues, clamped at 0, descending per node in ``order="sort"``.
    U : (N, d, r) ndarray
        Orthonormal eigenvector columns.
    gauge : str
        Phase convention applied to ``U``.
    rank_profile : (N,) ndarray
        Number of eigenvalues above tolerance at each node.
    """

    lambdas: np.ndarray
    U: np.ndarray
    gauge: str = "none"
    order: str = "sort"
    rank_profile: Optional[np.ndarray] = None
    density: Optional[np.ndarray] = None
    rank_tol: float = RANK_TOL

    @property
    def rank(self):
        return self.lambdas.shape[1]

    @property
    def dim(self):
        return self.U.shape[1]

    @property
    def grid(self):
        return FrequencyGrid(self.U.shape[0])

    def reconstruct(self):
        return np.einsum("mai,mi,mbi->mab", self.U, self.lambdas, np.conj(self.U))

    def channels(self, k):
        """The leading ``k`` channels as a new field."""
        return replace(self, lambdas=self.lambdas[:, :k], U=self.U[:, :, :k])

    @classmethod
    def from_field(cls, U, lambdas=None, gauge="analytic"):
        """Wrap an explicitly given eigenvector field (e.g. a closed form)."""
        U = np.asarray(U, dtype=complex)
        if U.ndim != 3:
            raise BadParams(f"field must have shape (N, d, r), got {U.shape}")
        FrequencyGrid(U.shape[0])
        if lambdas is None:
            lambdas = np.ones((U.shape[0], U.shape[2]))
        lambdas = np.asarray(lambdas, dtype=float)
        field = cls(lambdas, U, gauge, "given", np.full(U.shape[0], U.shape[2]))
        return replace(field, density=field.reconstruct())


def _track(w, v):
    """Reorder channels node by node to follow maximal eigenvector overlap."""
    w, v = w.copy(), v.copy()
    for m in range(1, len(w)):
        overlap = np.abs(np.conj(v[m - 1]).T @ v[m]) ** 2
        _, perm = linear_sum_assignment(-overlap)
        w[m] = w[m, perm]
        v[m] = v[m][:, perm]
    return w, v


def _median_rank(profile):
    return int(np.sort(profile)[len(profile) // 2])


def decompose(measure, rank_tol=RANK_TOL, rank=None, order="sort"):
    """Eigendecomposition of the density part of ``measure`` at every node.

    Parameters
    ----------
    measure : SpectralMeasure
    rank_tol : float
        Eigenvalues above ``rank_tol`` times the global largest eigenvalue
        count toward the rank.
    rank : int, optional
        Keep exactly this many channels and skip the constant-rank check.
    order : {"sort", "track"}
        Descending at each node, or matched to the previous node by overlap.

    Raises
    ------
    RankNotConstant
        If the per-node rank differs from the median rank on at least 1% of
        nodes and that share is stable under a looser tolerance.
    """
    if order not in ORDERS:
        raise BadParams(f"unknown order {order!r}; choose from {ORDERS}")
    density = getattr(measure, "density", measure)
    w, v = eig_hermitian_batch(density, check=False)
    n, d = w.shape
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if np.any(w < -PSD_CLAMP * scale):
        raise NotPositiveSemidefinite(f"density eigenvalue {w.min():.3e} is negative")
    w = np.where(w < 0, 0.0, w)
    profile = np.sum(w > rank_tol * scale, axis=1) if scale > 0 else np.zeros(n, dtype=int)

    if rank is None:
        r = _median_rank(profile)
        frac = float(np.mean(profile != r))
        if frac >= RANK_FRACTION:
            loose = np.sum(w > rank_tol * PLATEAU_FACTOR * scale, axis=1)
            loose_frac = float(np.mean(loose != _median_rank(loose)))
            if frac >= PLATEAU_RATIO * loose_frac:
                raise RankNotConstant(
                    f"rank differs from {r} on {100 * frac:.1f}% of nodes", profile, frac)
    else:
        r = int(rank)
        if not 0 <= r <= d:
            raise BadParams(f"rank {r} outside 0..{d}")
    if order == "track":
        w, v = _track(w, v)
    return EigenField(w[:, :r], v[:, :, :r], "none", order, profile, np.asarray(density), rank_tol)


def _lead_phase(vecs):
    """Unit factors that make the largest-modulus entry of each column real positive.

    ``vecs`` has shape (..., d, r); returns (..., r).
    """
    idx = np.argmax(np.abs(vecs) - 1e-9 * np.arange(vecs.shape[-2])[:, None], axis=-2)
    lead = np.take_along_axis(vecs, idx[..., None, :], axis=-2)[..., 0, :]
    mag = np.abs(lead)
    return np.where(mag > 0, np.conj(lead) / np.where(mag > 0, mag, 1.0), 1.0)


def align_gauge(field, strategy="phase-continuity"):
    """Choose per-channel phases of the eigenvector field.

    ``phase-continuity`` anchors the first node real-positive, then makes
    each adjacent inner product real positive (parallel transport). The
    residual phase around the circle is spread evenly over the nodes so the
    field closes up without a jump between the last and first node.
    ``anchor-real`` makes the largest entry real positive at every node;
    ``none`` leaves the eigensolver's phases.

    Raises
    ------
    ChannelCollapse
        If an eigenvector changes abruptly (adjacent overlap below 1e-8).
    """
    strategy = canonical_gauge(strategy)
    U = field.U
    if strategy == "none" or field.rank == 0:
        return replace(field, gauge=strategy)
    if strategy == "anchor-real":
        return replace(field, U=U * _lead_phase(U)[:, None, :], gauge=strategy)

    inner = np.einsum("mai,mai->mi", np.conj(U[:-1]), U[1:])
    mag = np.abs(inner)
    bad = np.argwhere(mag < COLLAPSE_TOL)
    if len(bad):
        m, j = bad[0]
        raise ChannelCollapse(f"eigenvector of channel {j} jumps between nodes {m} and {m + 1}",
                              int(m) + 1, int(j))
    steps = -np.angle(inner)
    theta = np.angle(_lead_phase(U[0]))
    phase = np.exp(1j * (theta + np.vstack([np.zeros((1, field.rank)), np.cumsum(steps, axis=0)])))
    out = U * phase[:, None, :]
    n = len(out)
    holonomy = np.angle(np.einsum("ai,ai->i", np.conj(out[-1]), out[0]))
    out = out * np.exp(1j * np.outer(np.arange(n), holonomy) / n)[:, None, :]
    return replace(field, U=out, gauge=strategy)


@dataclass(frozen=True)
class FourierSeries:
    """Coefficients psi(j), j = -N/2..N/2-1, of an eigenvector field (axis 0)."""

    coeffs: np.ndarray
    gauge: str = ""

    @property
    def orders(self):
        n = self.coeffs.shape[0]
        return np.arange(-(n // 2), n // 2)

    def coef(self, j):
        return self.coeffs[int(j) + self.coeffs.shape[0] // 2]

    @property
    def energies(self):
        """||psi(j)||_F^2 per index."""
        return np.sum(np.abs(self.coeffs) ** 2, axis=(1, 2))

    @property
    def energy(self):
        return float(self.energies.sum())

    @property
    def negative_tail(self):
        total = self.energy
        if total == 0:
            return 0.0
        return float(self.energies[self.orders < 0].sum() / total)


def fourier_of_field(field):
    """psi(j) = (1/N) sum_m U(omega_m) e^{ij omega_m}."""
    U = field.U if isinstance(field, EigenField) else np.asarray(field)
    return FourierSeries(fourier_coefficients(U), getattr(field, "gauge", ""))


class Sidedness(NamedTuple):
    verdict: str
    negative_tail: float


def one_sidedness(series, tol=ONE_SIDED_TOL):
    """``one_sided`` iff the negative-index energy share is at most ``tol``."""
    rho = series.negative_tail
    return Sidedness("one_sided" if rho <= tol else "two_sided", rho)


class ScalarOuterFactor(NamedTuple):
    """Outer factor of one eigenvalue channel: |D|^2 = 2 pi lambda on the grid."""
    D: np.ndarray
    delta: np.ndarray
    log_integral: float


def scalar_outer_factor(lam, floor=LOG_FLOOR, threshold=DIVERGENCE_THRESHOLD):
    """Cepstral (minimum-phase) factor of a positive function on the grid.

    With c(n) the Fourier coefficients of log(2 pi lambda),
    D = exp(c(0)/2 + sum_{n>=1} c(n) e^{-in omega}). ``delta`` holds the
    coefficients of D for n = 0..N/2-1.

    Raises
    ------
    LogDivergence
        If lambda falls below ``floor`` anywhere, or the log-integral of
        lambda is below ``threshold``.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1:
        raise BadParams("expected one channel of eigenvalues")
    if np.any(~(lam >= floor)):
        raise LogDivergence(f"eigenvalue {lam.min():.3e} below {floor:g}; log-integral diverges")
    log_lam = np.log(lam)
    log_integral = float(trapezoid_integral(log_lam))
    if log_integral < threshold:
        raise LogDivergence(f"log-integral {log_integral:.4g} below threshold {threshold:.4g}")
    n = len(lam)
    c = fourier_coefficients(np.log(2 * np.pi) + log_lam)
    j = np.arange(-(n // 2), n // 2)
    half = np.where(j > 0, c, 0.0)
    half[j == 0] = c[j == 0] / 2
    # the Nyquist term is its own mirror image on the grid
    half[0] = c[0] / 2
    D = np.exp(synthesize(half))
    delta = fourier_coefficients(D)[n // 2:]
    return ScalarOuterFactor(D, delta, log_integral)


class SpectralFactor(NamedTuple):
    """phi = U diag(D) on the grid and its causal coefficients b(l)."""
    phi: np.ndarray
    b: np.ndarray
    reconstruction_error: float
    factors: tuple


def compose_spectral_factor(field, factors=None, window=None):
    """Combine an aligned eigenvector field with per-channel outer factors.

    b(l) = sum_{j=0}^{l} psi(j) delta(l-j) for l < ``window`` (default N/2).
    ``reconstruction_error`` is the largest per-node relative Frobenius
    error of phi phi* / (2 pi) against the field's density.
    """
    n, d, r = field.U.shape
    if factors is None:
        factors = tuple(scalar_outer_factor(field.lambdas[:, i]) for i in range(r))
    factors = tuple(factors)
    if len(factors) != r:
        raise BadParams(f"need {r} channel factors, got {len(factors)}")
    window = n // 2 if window is None else int(window)
    Dmat = np.stack([f.D for f in factors], axis=1) if r else np.zeros((n, 0))
    phi = field.U * Dmat[:, None, :]
    recon = np.einsum("mai,mbi->mab", phi, np.conj(phi)) / (2 * np.pi)
    target = field.density if field.density is not None else field.reconstruct()
    err = np.sqrt(np.sum(np.abs(recon - target) ** 2, axis=(1, 2)))
    norm = np.sqrt(np.sum(np.abs(target) ** 2, axis=(1, 2)))
    rel = float(np.max(err / np.maximum(norm, 1e-300))) if n else 0.0

    psi = fourier_of_field(field).coeffs[n // 2:][:window]
    b = np.zeros((window, d, r), dtype=complex)
    for i, fac in enumerate(factors):
        kern = fac.delta[:window][:, None]
        b[:, :, i] = fftconvolve(psi[:, :, i], kern, axes=0)[:window]
    return SpectralFactor(phi, b, rel, factors)
