"""Time-domain side: simulation, sliding filters, finite-past prediction.

Time-domain conventions match the spectral ones: X_t = int e^{it omega} dZ,
C(h) = E X_{t+h} X_t^*, and a filter sum_m a(m) X_{t-m} has transfer
function sum_m a(m) e^{-im omega}.
"""

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy.signal import fftconvolve

from .eigenfield import align_gauge, compose_spectral_factor, decompose, fourier_of_field, one_sidedness
from .errors import BadParams, PathTooShort, SingularBlock, SpecRegError, UnsimulableModel
from .hermitian import eig_hermitian_batch
from .spectral import CovarianceSequence, FrequencyGrid, fourier_coefficients

EDGES = ("valid", "zero")
ROUTES = ("auto", "causal", "two_sided")
SINGULAR_TOL = 1e-12
COEF_TRIM = 1e-14


@dataclass(frozen=True)
class SamplePath:
    """Values X_t for t = start .. start+T-1 (``values`` has shape (T, d))."""

    values: np.ndarray
    seed: Optional[int] = None
    generator: dict = field(default_factory=dict)
    start: int = 0

    @property
    def length(self):
        return self.values.shape[0]

    @property
    def dim(self):
        return self.values.shape[1]

    @property
    def times(self):
        return self.start + np.arange(self.length)


def _rng(seed, rep=None):
    ss = np.random.SeedSequence(seed, spawn_key=() if rep is None else (int(rep),))
    return np.random.Generator(np.random.Philox(ss))


def white_noise(rng, length, dim, real=False):
    """Standard white noise: E xi xi^* = I (complex parts each N(0, 1/2))."""
    if real:
        return rng.standard_normal((length, dim))
    z = rng.standard_normal((length, dim, 2)) * np.sqrt(0.5)
    return z[..., 0] + 1j * z[..., 1]


def _trim(coeffs, orders):
    """Drop leading/trailing coefficient matrices that are negligible."""
    mags = np.sqrt(np.sum(np.abs(coeffs) ** 2, axis=(1, 2)))
    keep = np.flatnonzero(mags > COEF_TRIM * max(mags.max(), 1e-300))
    if len(keep) == 0:
        return coeffs[:1] * 0, orders[:1]
    return coeffs[keep[0]:keep[-1] + 1], orders[keep[0]:keep[-1] + 1]


def moving_average(coeffs, orders, noise):
    """X_t = sum_i coeffs[i] xi_{t - orders[i]} over the times where all terms exist."""
    return sliding_sum(coeffs, orders, noise, edge="valid")


def _causal_coefficients(measure, window, gauge, causal_approximation):
    E = align_gauge(decompose(measure), gauge)
    side = one_sidedness(fourier_of_field(E))
    if side.verdict != "one_sided" and not causal_approximation:
        raise UnsimulableModel(f"eigenvector field is two-sided (negative energy {side.negative_tail:.2e}); "
                               "pass causal_approximation=True to drop the anticausal part")
    factor = compose_spectral_factor(E, window=window + 1)
    return factor.b, np.arange(window + 1), E.rank


def _sqrt_coefficients(measure, window):
    """Coefficients of sqrt(2 pi) f^{1/2}: a two-sided (non-causal) square-root factor."""
    w, v = eig_hermitian_batch(measure.density, check=False)
    w = np.where(w < 0, 0.0, w)
    root = np.einsum("mai,mi,mbi->mab", v, np.sqrt(2 * np.pi * w), np.conj(v))
    n = measure.grid.size
    coeffs = fourier_coefficients(root)
    orders = np.arange(-window, window + 1)
    return coeffs[orders + n // 2], orders, measure.dim


def simulate(measure, length, seed=0, route="auto", window=None, gauge="phase-continuity",
             causal_approximation=False, real=False, rep=None):
    """Draw a sample path of the model.

    Parameters
    ----------
    measure : SpectralMeasure
    length : int
        Number of time points T.
    route : {"auto", "causal", "two_sided"}
        ``causal`` filters white noise through the coefficients b(l) of the
        eigen-field spectral factor; ``two_sided`` uses the Hermitian square
        root of the density. ``auto`` tries ``causal`` first.
    window : int, optional
        Coefficient window J (default N/8); J is also the burn-in.
    real : bool
        Real-valued noise; requires real coefficients and no atoms.
    rep : int, optional
        Replicate number; derives an independent stream from ``seed``.

    Atoms are realized as harmonic components A e^{it omega_j} with
    complex Gaussian amplitudes of covariance equal to the atom mass.
    """
    if route not in ROUTES:
        raise BadParams(f"route must be one of {ROUTES}")
    T = int(length)
    if T < 1:
        raise BadParams("length must be positive")
    n = measure.grid.size
    window = n // 8 if window is None else int(window)
    if not 0 <= window < n // 2:
        raise BadParams(f"window must be in 0..{n // 2 - 1}")
    rng = _rng(seed, rep)
    d = measure.dim
    values = np.zeros((T, d), dtype=float if real else complex)
    info = {"route": None, "window": window, "burn_in": 0, "real": bool(real), "label": measure.label}

    if np.any(measure.density):
        coeffs = orders = None
        if route in ("auto", "causal"):
            try:
                coeffs, orders, r = _causal_coefficients(measure, window, gauge, causal_approximation)
                info.update(route="causal", gauge=gauge)
            except SpecRegError:
                if route == "causal":
                    raise
        if coeffs is None:
            coeffs, orders, r = _sqrt_coefficients(measure, window)
            info["route"] = "two_sided"
        coeffs, orders = _trim(coeffs, orders)
        if real:
            if np.max(np.abs(coeffs.imag)) > 1e-10 * max(np.max(np.abs(coeffs)), 1e-300):
                raise BadParams("real mode needs a density with f(-omega) = conj f(omega)")
            coeffs = coeffs.real
        span = int(orders[-1] - orders[0])
        info["burn_in"] = span
        info["taps"] = [int(orders[0]), int(orders[-1])]
        noise = white_noise(rng, T + span, coeffs.shape[2], real)
        values = values + moving_average(coeffs, orders, noise).values
    else:
        info["route"] = "zero"

    if measure.atoms:
        if real:
            raise BadParams("real mode does not support spectral atoms")
        t = np.arange(T)
        info["atoms"] = len(measure.atoms)
        for atom in measure.atoms:
            w, v = eig_hermitian_batch(atom.mass[None], check=False)
            root = v[0] * np.sqrt(np.where(w[0] < 0, 0.0, w[0]))
            amp = root @ white_noise(rng, 1, d)[0]
            values = values + np.exp(1j * t * atom.omega)[:, None] * amp[None, :]
    return SamplePath(values, seed, info)


def sliding_sum(coeffs, orders, path, edge="valid"):
    """Y_t = sum_i coeffs[i] X_{t - orders[i]} for contiguous ``orders``.

    Parameters
    ----------
    coeffs : (L, p, q) array
    orders : (L,) ints, consecutive
    path : SamplePath or (T, q) array
    edge : {"valid", "zero"}
        ``valid`` keeps only times where every term is inside the path;
        ``zero`` treats values outside the path as 0 and keeps all T times.

    Returns
    -------
    SamplePath
        ``start`` is the time index (in the input's clock) of the first value.
    """
    if edge not in EDGES:
        raise BadParams(f"edge must be one of {EDGES}")
    X = path.values if isinstance(path, SamplePath) else np.asarray(path)
    t0 = path.start if isinstance(path, SamplePath) else 0
    coeffs = np.asarray(coeffs)
    orders = np.asarray(orders, dtype=int)
    L, p, q = coeffs.shape
    T = X.shape[0]
    if X.shape[1] != q:
        raise BadParams(f"filter expects {q} channels, path has {X.shape[1]}")
    if np.any(np.diff(orders) != 1) or len(orders) != L:
        raise BadParams("orders must be consecutive integers matching the coefficients")
    if edge == "valid" and T < L:
        raise PathTooShort(f"path of length {T} shorter than filter span {L}")
    full = np.zeros((T + L - 1, p), dtype=np.result_type(coeffs, X))
    for a in range(p):
        for b in range(q):
            c = coeffs[:, a, b]
            if np.any(c):
                full[:, a] += fftconvolve(c, X[:, b])
    lo = int(orders[0])
    if edge == "valid":
        return SamplePath(full[L - 1:T], start=t0 + L - 1 + lo)
    out = np.zeros((T, p), dtype=full.dtype)
    t = np.arange(T)
    idx = t - lo
    ok = (idx >= 0) & (idx < len(full))
    out[ok] = full[idx[ok]]
    return SamplePath(out, start=t0)


def analysis(bank, path, edge="valid"):
    """Principal component series V_t = sum_j psi(j)^* X_{t+j}."""
    coeffs = np.conj(np.swapaxes(bank.taps, 1, 2))[::-1]
    return sliding_sum(coeffs, -bank.tap_orders[::-1], path, edge)


def synthesis(bank, components, edge="valid"):
    """X_t^(k) = sum_j psi(j) V_{t-j}."""
    return sliding_sum(bank.taps, bank.tap_orders, components, edge)


def apply_filter(bank, path, edge="valid"):
    """Rank-k reconstruction through the direct filter sum_m w(m) X_{t-m}."""
    return sliding_sum(bank.direct, bank.direct_orders, path, edge)


def _align(path, filtered):
    """Rows of ``path`` at the times covered by ``filtered``."""
    i = filtered.start - path.start
    return path.values[i:i + filtered.length]


class MonteCarloResult(NamedTuple):
    estimate: float
    stderr: float
    per_rep: np.ndarray


def monte_carlo_mse(measure, bank, length, reps=8, seed=0, **sim):
    """Average ||X_t - X_t^(k)||^2 over the valid region, across ``reps`` independent paths."""
    reps = int(reps)
    if reps < 1:
        raise BadParams("reps must be positive")
    vals = []
    for i in range(reps):
        path = simulate(measure, length, seed=seed, rep=i, **sim)
        rec = apply_filter(bank, path)
        resid = _align(path, rec) - rec.values
        vals.append(float(np.mean(np.sum(np.abs(resid) ** 2, axis=1))))
    vals = np.asarray(vals)
    err = float(np.std(vals, ddof=1) / np.sqrt(reps)) if reps > 1 else float("nan")
    return MonteCarloResult(float(vals.mean()), err, vals)


def sample_covariance(path, max_lag):
    """C_hat(h) = (1/T) sum_t X_{t+h} X_t^*, h = 0..max_lag."""
    X = path.values if isinstance(path, SamplePath) else np.asarray(path)
    T = X.shape[0]
    H = int(max_lag)
    if H >= T:
        raise PathTooShort(f"lag {H} needs a path longer than {T}")
    lags = np.stack([X[h:].T @ np.conj(X[:T - h]) / T for h in range(H + 1)])
    return CovarianceSequence(lags)


def averaged_periodogram(path, segment=256):
    """Density estimate on a grid of ``segment`` nodes, averaging periodograms of
    non-overlapping segments: (1/(2 pi L)) d(omega) d(omega)^*."""
    X = path.values if isinstance(path, SamplePath) else np.asarray(path)
    L = int(segment)
    FrequencyGrid(L)
    nseg = X.shape[0] // L
    if nseg < 1:
        raise PathTooShort(f"path shorter than one segment of {L}")
    segs = X[:nseg * L].reshape(nseg, L, -1)
    sign = np.where(np.arange(L) % 2 == 0, 1.0, -1.0)[None, :, None]
    dft = np.fft.fft(segs * sign, axis=1)
    return np.einsum("sma,smb->mab", dft, np.conj(dft)) / (2 * np.pi * L * nseg)


@dataclass(frozen=True)
class PredictionResult:
    """Finite-past one-step prediction errors.

    ``sigmas[n]`` is the error covariance using the last n values
    (``sigmas[0] = C(0)``); ``complete`` is False when the recursion stopped
    at a singular block before ``n_max``.
    """

    sigmas: np.ndarray
    dets: np.ndarray
    coefficients: np.ndarray
    complete: bool = True

    @property
    def n(self):
        return len(self.sigmas) - 1


def _singular(m):
    w = np.linalg.eigvalsh(0.5 * (m + np.conj(m.T)))
    return w.min() <= SINGULAR_TOL * max(abs(w).max(), 1e-300)


def levinson_prediction(cov, n_max):
    """Whittle's multichannel Levinson recursion.

    Forward predictor X_t ~ sum_{i=1}^n A_i X_{t-i}; the backward predictor
    runs the same recursion on the reversed process. Warns ``SingularBlock``
    and returns the partial result if an error covariance becomes singular.
    """
    n_max = int(n_max)
    if n_max < 0 or n_max > cov.max_lag:
        raise BadParams(f"n_max must be in 0..{cov.max_lag}")
    C = cov
    c0 = C(0)
    d = cov.dim
    sig_f = c0.copy()
    sig_b = c0.copy()
    A = np.zeros((0, d, d), dtype=complex)
    B = np.zeros((0, d, d), dtype=complex)
    sigmas = [sig_f]
    complete = True
    for n in range(n_max):
        if _singular(sig_f) or _singular(sig_b):
            warnings.warn(f"prediction error covariance singular at past length {n}",
                          SingularBlock, stacklevel=2)
            complete = False
            break
        delta = C(n + 1) - sum((A[i] @ C(n - i) for i in range(n)), np.zeros((d, d), dtype=complex))
        a_new = delta @ np.linalg.inv(sig_b)
        b_new = np.conj(delta.T) @ np.linalg.inv(sig_f)
        A_next = np.concatenate([A - a_new[None] @ B[::-1], a_new[None]])
        B_next = np.concatenate([B - b_new[None] @ A[::-1], b_new[None]])
        sig_f = sig_f - a_new @ np.conj(delta.T)
        sig_b = sig_b - b_new @ delta
        sig_f = 0.5 * (sig_f + np.conj(sig_f.T))
        sig_b = 0.5 * (sig_b + np.conj(sig_b.T))
        A, B = A_next, B_next
        sigmas.append(sig_f)
    sigmas = np.stack(sigmas)
    dets = np.linalg.det(sigmas).real
    return PredictionResult(sigmas, dets, A, complete)
