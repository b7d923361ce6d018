"""Second-order description of a process: spectral measure and covariances.

Frequency convention, used everywhere in the package: the grid of size N
has nodes ``omega_m = -pi + 2*pi*m/N`` for ``m = 0..N-1``, and a matrix
function ``F(omega)`` has Fourier coefficients

    F_hat(j) = (1/N) * sum_m F(omega_m) * exp(1j*j*omega_m)

so that ``F(omega_m) = sum_j F_hat(j) * exp(-1j*j*omega_m)``. Index ``j``
runs over ``-N/2 .. N/2-1``. Integrals over [-pi, pi] use the periodic
rectangle rule, which is exact for trigonometric polynomials of degree < N.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BadParams, DegenerateWindow, NotHermitian, NotPositiveSemidefinite
from .hermitian import HERMITIAN_TOL, as_complex_matrix, eig_hermitian_batch, hermitian_defect

DEFAULT_GRID_SIZE = 4096
PSD_TOL = 1e-10


@dataclass(frozen=True)
class FrequencyGrid:
    size: int = DEFAULT_GRID_SIZE

    def __post_init__(self):
        n = int(self.size)
        if n < 2 or n & (n - 1):
            raise BadParams(f"grid size must be a power of two >= 2, got {self.size}")

    @property
    def spacing(self):
        return 2 * np.pi / self.size

    @property
    def nodes(self):
        return -np.pi + self.spacing * np.arange(self.size)

    @property
    def orders(self):
        """Fourier indices -N/2 .. N/2-1 in storage order."""
        return np.arange(-(self.size // 2), self.size // 2)

    def index_of(self, j):
        """Storage position of Fourier index ``j`` in arrays returned by `fourier_coefficients`."""
        return np.asarray(j) + self.size // 2


@dataclass(frozen=True)
class Atom:
    omega: float
    mass: np.ndarray

    def __post_init__(self):
        mass = as_complex_matrix(self.mass, square=True)
        if hermitian_defect(mass) > HERMITIAN_TOL:
            raise NotHermitian("atom mass is not Hermitian")
        object.__setattr__(self, "mass", mass)
        if not -np.pi < self.omega <= np.pi:
            raise BadParams(f"atom frequency {self.omega} outside (-pi, pi]")


@dataclass(frozen=True)
class SpectralMeasure:
    """Absolutely continuous density on a grid plus optional point masses.

    ``density`` has shape (N, d, d) in units of power per radian. ``sampler``,
    when present, evaluates the density at arbitrary frequencies and lets the
    model be re-gridded (used by grid refinement checks).
    """

    density: np.ndarray
    atoms: tuple = ()
    singular_continuous: bool = False
    sampler: Optional[Callable] = field(default=None, compare=False, repr=False)
    label: str = ""
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        dens = as_complex_matrix(self.density, square=True)
        if dens.ndim != 3:
            raise BadParams(f"density must have shape (N, d, d), got {dens.shape}")
        FrequencyGrid(dens.shape[0])
        bad = hermitian_defect(dens) > HERMITIAN_TOL
        if bad.any():
            raise NotHermitian(f"density not Hermitian at {int(bad.sum())} nodes")
        dens = 0.5 * (dens + np.conj(np.swapaxes(dens, -1, -2)))
        dens.flags.writeable = False
        object.__setattr__(self, "density", dens)
        atoms = tuple(a if isinstance(a, Atom) else Atom(*a) for a in self.atoms)
        for a in atoms:
            if a.mass.shape != dens.shape[1:]:
                raise BadParams("atom mass dimension does not match density")
        object.__setattr__(self, "atoms", atoms)

    @property
    def dim(self):
        return self.density.shape[1]

    @property
    def grid(self):
        return FrequencyGrid(self.density.shape[0])

    @property
    def has_singular_part(self):
        return bool(self.atoms) or self.singular_continuous

    def check_psd(self, tol=PSD_TOL):
        """Raise NotPositiveSemidefinite if any node or atom has a clearly negative eigenvalue."""
        mats = [self.density] + [a.mass[None] for a in self.atoms]
        for m in mats:
            w, _ = eig_hermitian_batch(m, check=False)
            scale = np.max(np.abs(w)) if w.size else 0.0
            if np.any(w < -tol * scale):
                raise NotPositiveSemidefinite(f"eigenvalue {w.min():.3e} is negative")
        return True

    def resample(self, size):
        """The same model on a grid of ``size`` nodes (requires a sampler)."""
        if self.sampler is None:
            raise BadParams("model has no analytic sampler; cannot re-grid")
        grid = FrequencyGrid(size)
        return SpectralMeasure(self.sampler(grid.nodes), self.atoms, self.singular_continuous,
                               self.sampler, self.label, dict(self.params))

    def continuous_part(self):
        return SpectralMeasure(self.density, (), False, self.sampler, self.label, dict(self.params))


@dataclass(frozen=True)
class CovarianceSequence:
    """C(h) for h = 0..H; negative lags are served as C(h)* on access."""

    lags: np.ndarray

    def __post_init__(self):
        lags = as_complex_matrix(self.lags, square=True)
        if lags.ndim != 3:
            raise BadParams(f"lags must have shape (H+1, d, d), got {lags.shape}")
        lags = lags.copy()
        lags[0] = 0.5 * (lags[0] + np.conj(lags[0].T))
        lags.flags.writeable = False
        object.__setattr__(self, "lags", lags)

    @property
    def max_lag(self):
        return self.lags.shape[0] - 1

    @property
    def dim(self):
        return self.lags.shape[1]

    def __call__(self, h):
        h = int(h)
        if abs(h) > self.max_lag:
            raise IndexError(f"lag {h} beyond stored window {self.max_lag}")
        return self.lags[h] if h >= 0 else np.conj(self.lags[-h].T)

    def two_sided(self):
        """Array of shape (2H+1, d, d) for h = -H..H."""
        neg = np.conj(np.swapaxes(self.lags[:0:-1], -1, -2))
        return np.concatenate([neg, self.lags])

    def submatrix(self, channels):
        idx = np.asarray(channels)
        return CovarianceSequence(self.lags[:, idx[:, None], idx[None, :]])


def trapezoid_integral(values):
    """(2*pi/N) * sum over the grid axis (axis 0)."""
    values = np.asarray(values)
    return values.sum(axis=0) * (2 * np.pi / values.shape[0])


def fourier_coefficients(values):
    """Coefficients F_hat(j), j = -N/2..N/2-1, of grid samples along axis 0."""
    values = np.asarray(values)
    n = values.shape[0]
    coef = np.fft.ifft(values, axis=0)
    j = np.arange(-(n // 2), n // 2)
    sign = np.where(j % 2 == 0, 1.0, -1.0).reshape((-1,) + (1,) * (values.ndim - 1))
    return sign * coef[j % n]


def synthesize(coefficients):
    """Inverse of `fourier_coefficients`: grid samples of sum_j F_hat(j) e^{-ij omega}."""
    coefficients = np.asarray(coefficients)
    n = coefficients.shape[0]
    j = np.arange(-(n // 2), n // 2)
    sign = np.where(j % 2 == 0, 1.0, -1.0).reshape((-1,) + (1,) * (coefficients.ndim - 1))
    stored = np.empty_like(coefficients, dtype=complex)
    stored[j % n] = sign * coefficients
    return np.fft.fft(stored, axis=0)


def _lag_transform(density, hs):
    """(2*pi/N) * sum_m f(omega_m) e^{i h omega_m} for each lag in ``hs``."""
    n = density.shape[0]
    coef = np.fft.ifft(density, axis=0)
    hs = np.asarray(hs)
    sign = np.where(hs % 2 == 0, 1.0, -1.0)[:, None, None]
    return 2 * np.pi * sign * coef[hs % n]


def covariance_from_measure(measure, max_lag):
    """C(h) = integral of e^{ih omega} dF(omega), h = 0..max_lag, by quadrature plus exact atoms."""
    hs = np.arange(int(max_lag) + 1)
    lags = _lag_transform(measure.density, hs)
    for atom in measure.atoms:
        lags = lags + np.exp(1j * hs * atom.omega)[:, None, None] * atom.mass[None]
    return CovarianceSequence(lags)


TAPERS = ("rectangular", "bartlett")


def _taper_weights(taper, max_lag):
    h = np.arange(-max_lag, max_lag + 1)
    if max_lag == 0 or taper == "rectangular":
        return np.ones(len(h))
    if taper == "bartlett":
        return 1.0 - np.abs(h) / max_lag
    raise BadParams(f"unknown taper {taper!r}; choose from {TAPERS}")


def measure_from_covariance(cov, grid=None, taper="bartlett"):
    """Lag-window spectral density, projected onto the PSD cone node by node.

    f(omega_m) = (1/2pi) sum_{|h|<=H} taper(h/H) C(h) e^{-ih omega_m}
    """
    grid = grid or FrequencyGrid()
    if cov.max_lag < 0:
        raise DegenerateWindow("empty covariance window")
    big_h = cov.max_lag
    weights = _taper_weights(taper, big_h)
    seq = cov.two_sided() * weights[:, None, None]
    omega = grid.nodes
    hs = np.arange(-big_h, big_h + 1)
    phase = np.exp(-1j * np.outer(omega, hs))
    dens = np.einsum("mh,hab->mab", phase, seq) / (2 * np.pi)
    dens = 0.5 * (dens + np.conj(np.swapaxes(dens, -1, -2)))
    w, v = eig_hermitian_batch(dens, check=False)
    w = np.where(w < 0, 0.0, w)
    dens = np.einsum("mai,mi,mbi->mab", v, w, np.conj(v))
    return SpectralMeasure(dens)
