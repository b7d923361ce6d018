"""Built-in models: the three-channel worked examples and scalar references.

The three-channel examples share the template

    f = [[f11, 0,   f11      ],
         [0,   f22, f22      ],
         [f11, f22, f11 + f22]]

i.e. X3 = X1 + X2 with X1 and X2 uncorrelated. Its nonzero eigenvalues are
f11 + f22 +- sqrt(f11^2 + f22^2 - f11 f22), with product 3 f11 f22.

`example` returns a gridded `SpectralMeasure`; `analytic` returns the closed
forms that tests and demos compare against.
"""

from types import SimpleNamespace

import numpy as np

from .errors import BadParams
from .spectral import DEFAULT_GRID_SIZE, Atom, FrequencyGrid, SpectralMeasure

EXAMPLES = ("type0", "type1", "type2", "type3_illustration", "type3_candidate", "regular",
            "scalar_ma1", "scalar_white")

SQRT2 = np.sqrt(2.0)


def template_density(f11, f22):
    f11 = np.asarray(f11, dtype=float)
    f22 = np.asarray(f22, dtype=float)
    out = np.zeros(f11.shape + (3, 3))
    out[..., 0, 0] = f11
    out[..., 0, 2] = f11
    out[..., 2, 0] = f11
    out[..., 1, 1] = f22
    out[..., 1, 2] = f22
    out[..., 2, 1] = f22
    out[..., 2, 2] = f11 + f22
    return out


def template_eigenvalues(f11, f22):
    """Closed-form (lambda1, lambda2) of the template; lambda3 is 0."""
    f11 = np.asarray(f11, dtype=float)
    f22 = np.asarray(f22, dtype=float)
    root = np.sqrt(f11 ** 2 + f22 ** 2 - f11 * f22)
    return f11 + f22 + root, f11 + f22 - root


def _type1_f22(omega):
    return np.where(np.abs(omega) <= 1.0, 0.5, 0.0)


def _type2_f22(omega):
    omega = np.asarray(omega, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        val = np.exp(-1.0 / np.abs(omega))
    return np.where(omega == 0, 0.0, val)


def _flat(omega, value):
    return np.full(np.shape(omega), value, dtype=float)


def g_entry(omega, near=1e-9):
    """(e^{-i w} + e^{2i w}) / (2 sqrt2 |cos(3w/2)|), with right-hand limits at the poles."""
    omega = np.asarray(omega, dtype=float)
    cos = np.cos(1.5 * omega)
    num = np.exp(-1j * omega) + np.exp(2j * omega)
    singular = np.abs(cos) < near
    safe = np.where(singular, 1.0, np.abs(cos))
    val = num / (2 * SQRT2 * safe)
    # numerator = 2 cos(3w/2) e^{iw/2}: the limit is sign(cos) e^{iw/2} / sqrt2
    side = np.sign(np.cos(1.5 * (omega + 1e-6)))
    return np.where(singular, side * np.exp(0.5j * omega) / SQRT2, val)


def _candidate_parts(omega):
    omega = np.asarray(omega, dtype=float)
    r_phase = (np.exp(-1j * omega) + np.exp(2j * omega)) / 3.0
    r2 = (2.0 / 9.0) * (1 + np.cos(3 * omega))
    c2 = (1 - r2) / (1 + 4 * (1 + np.cos(3 * omega)))
    rho_phase = np.sqrt(c2) * (2 + np.exp(3j * omega))
    return r_phase, rho_phase


def _candidate_density(omega):
    a, b = _candidate_parts(omega)
    out = np.zeros(np.shape(omega) + (3, 3), dtype=complex)
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = np.abs(a) ** 2
    out[..., 2, 2] = np.abs(b) ** 2
    out[..., 1, 2] = a * np.conj(b)
    out[..., 2, 1] = np.conj(a) * b
    return out


def _candidate_field(omega):
    a, b = _candidate_parts(omega)
    out = np.zeros(np.shape(omega) + (3, 2), dtype=complex)
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = a
    out[..., 2, 1] = b
    return out


CONSTANT_RANK2 = np.array([[0.5, 0, 0.5], [0, 1.0, 0], [0.5, 0, 0.5]])


def _regular_field(omega):
    omega = np.asarray(omega, dtype=float)
    out = np.zeros(omega.shape + (3, 2), dtype=complex)
    ph = np.exp(-1j * omega)
    out[..., 0, 0] = ph / SQRT2
    out[..., 2, 0] = ph / SQRT2
    out[..., 1, 1] = ph
    return out


def _illustration_field(omega):
    g = g_entry(omega)
    out = np.zeros(np.shape(omega) + (3, 2), dtype=complex)
    out[..., 0, 0] = g
    out[..., 2, 0] = g
    out[..., 1, 1] = SQRT2 * g
    return out


def _type0_mass(v1, v2):
    return np.array([[v1, 0, v1], [0, v2, v2], [v1, v2, v1 + v2]], dtype=float)


def _check_positive(**values):
    for k, v in values.items():
        if np.any(np.asarray(v, dtype=float) <= 0):
            raise BadParams(f"{k} must be positive")


def _defaults(name, params):
    params = dict(params)
    if name == "type0":
        params.setdefault("frequencies", [1.0])
        params.setdefault("v1", [1.0] * len(params["frequencies"]))
        params.setdefault("v2", [1.0] * len(params["frequencies"]))
    elif name == "scalar_ma1":
        params.setdefault("theta", 0.5)
    elif name == "scalar_white":
        params.setdefault("sigma2", 1.0)
    return params


def analytic(name, **params):
    """Closed-form annotations for a built-in model.

    Attributes present depend on the model: ``density(omega)`` always;
    ``lambdas(omega)`` (nonzero eigenvalues, descending), ``det_lambda(omega)``,
    ``field(omega)`` (an eigenvector field of the printed form),
    ``covariance(h)`` and ``rank`` when the source gives them.
    """
    if name not in EXAMPLES:
        raise BadParams(f"unknown example {name!r}; choose from {EXAMPLES}")
    params = _defaults(name, params)
    ns = SimpleNamespace(name=name, params=params)

    if name in ("type1", "type2"):
        f11 = lambda w: _flat(w, 1 / (2 * np.pi))
        f22 = _type1_f22 if name == "type1" else _type2_f22
        ns.f11, ns.f22 = f11, f22
        ns.density = lambda w: template_density(f11(w), f22(w))
        ns.lambdas = lambda w: np.stack(template_eigenvalues(f11(w), f22(w)), axis=-1)
        ns.det_lambda = lambda w: 3 * f11(w) * f22(w)
        if name == "type1":
            ns.rank = lambda w: np.where(np.abs(w) <= 1.0, 2, 1)

            def cov(h):
                c11 = 1.0 if h == 0 else 0.0
                c22 = 1.0 if h == 0 else np.sin(h) / h
                return np.array([[c11, 0, c11], [0, c22, c22], [c11, c22, c11 + c22]])
            ns.covariance = cov
    elif name == "type0":
        freqs = [float(x) for x in params["frequencies"]]
        v1 = [float(x) for x in params["v1"]]
        v2 = [float(x) for x in params["v2"]]
        if len(set(freqs)) != len(freqs) or not (len(freqs) == len(v1) == len(v2)) or not freqs:
            raise BadParams("type0 needs distinct frequencies with matching v1, v2 lists")
        _check_positive(v1=v1, v2=v2)
        ns.density = lambda w: np.zeros(np.shape(w) + (3, 3))
        ns.atoms = [(w, _type0_mass(a, b)) for w, a, b in zip(freqs, v1, v2)]
        ns.covariance = lambda h: sum(np.exp(1j * h * w) * m for w, m in ns.atoms)
    elif name in ("regular", "type3_illustration"):
        ns.density = lambda w: np.broadcast_to(CONSTANT_RANK2, np.shape(w) + (3, 3)).copy()
        ns.lambdas = lambda w: np.ones(np.shape(w) + (2,))
        ns.field = _regular_field if name == "regular" else _illustration_field
        ns.covariance = lambda h: (2 * np.pi * CONSTANT_RANK2) if h == 0 else np.zeros((3, 3))
        ns.rank = lambda w: np.full(np.shape(w), 2)
    elif name == "type3_candidate":
        ns.density = _candidate_density
        ns.lambdas = lambda w: np.ones(np.shape(w) + (2,))
        ns.field = _candidate_field
        ns.r2_plus_rho2 = lambda w: sum(np.abs(p) ** 2 for p in _candidate_parts(w))
        ns.rank = lambda w: np.full(np.shape(w), 2)
    elif name == "scalar_ma1":
        theta = float(params["theta"])
        ns.theta = theta
        ns.density = lambda w: (np.abs(1 + theta * np.exp(-1j * np.asarray(w))) ** 2
                                / (2 * np.pi))[..., None, None]
        ns.lambdas = lambda w: ns.density(w)[..., 0]
        ns.ma_coefficients = np.array([1.0, theta])
        ns.covariance = lambda h: np.array([[{0: 1 + theta ** 2, 1: theta, -1: theta}.get(h, 0.0)]])
        ns.innovation_variance = 1.0 if abs(theta) <= 1 else theta ** 2
    elif name == "scalar_white":
        sigma2 = float(params["sigma2"])
        _check_positive(sigma2=sigma2)
        ns.density = lambda w: np.full(np.shape(w) + (1, 1), sigma2 / (2 * np.pi))
        ns.lambdas = lambda w: ns.density(w)[..., 0]
        ns.covariance = lambda h: np.array([[sigma2 if h == 0 else 0.0]])
        ns.innovation_variance = sigma2
    return ns


def example(name, grid_size=DEFAULT_GRID_SIZE, **params):
    """Gridded spectral measure of a built-in model."""
    ns = analytic(name, **params)
    grid = FrequencyGrid(grid_size)
    atoms = tuple(Atom(w, m) for w, m in getattr(ns, "atoms", ()))
    return SpectralMeasure(ns.density(grid.nodes), atoms, False, ns.density, name, ns.params)
