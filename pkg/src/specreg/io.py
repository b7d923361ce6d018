"""File formats: model JSON, covariance CSV, report/filter JSON, path CSV.

Complex numbers are written as [re, im] pairs. Output files carry the
package version, the full parameter set and a digest of the input, and no
timestamps, so identical runs produce identical bytes.
"""

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import example
from .errors import BadParams
from .spectral import DEFAULT_GRID_SIZE, Atom, CovarianceSequence, FrequencyGrid, SpectralMeasure, \
    measure_from_covariance

BUILTIN = "builtin:"


def encode_matrix(m):
    m = np.asarray(m, dtype=complex)
    if m.ndim == 0:
        return [float(m.real), float(m.imag)]
    return [encode_matrix(x) for x in m]


def decode_matrix(obj):
    """Inverse of `encode_matrix`; bare real numbers are also accepted as entries."""
    arr = np.asarray(obj, dtype=float)
    if arr.ndim >= 1 and arr.shape[-1] == 2 and arr.ndim >= 3:
        return arr[..., 0] + 1j * arr[..., 1]
    return arr.astype(complex)


def digest(obj):
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return "sha256:" + hashlib.sha256(text.encode()).hexdigest()


def _dump(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"
    if path is None:
        return text
    Path(path).write_text(text)
    return text


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _clean_floats(obj):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(obj, dict):
        return {k: _clean_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean_floats(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if np.isnan(f):
            return "nan"
        if np.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    return obj


def parse_model(spec, grid_size=None, params=None):
    """Build a SpectralMeasure from a model dict.

    Keys: ``density`` ("builtin:<id>" or an N x d x d array of [re, im]),
    optional ``grid_size``, ``dim``, ``atoms`` [{"omega", "mass"}],
    ``singular_continuous`` and ``params`` (for builtins).
    """
    if not isinstance(spec, dict) or "density" not in spec:
        raise BadParams("model must be an object with a 'density' entry")
    params = {**spec.get("params", {}), **(params or {})}
    n = int(grid_size or spec.get("grid_size") or DEFAULT_GRID_SIZE)
    dens = spec["density"]
    try:
        if isinstance(dens, str):
            if not dens.startswith(BUILTIN):
                raise BadParams(f"density string must start with {BUILTIN!r}")
            base = example(dens[len(BUILTIN):], n, **params)
            atoms = list(base.atoms)
            sampler, label, density = base.sampler, base.label, base.density
            params = base.params
        else:
            density = decode_matrix(dens)
            if density.ndim != 3:
                raise BadParams("inline density must be an N x d x d array")
            if grid_size and density.shape[0] != n:
                raise BadParams(f"inline density has {density.shape[0]} nodes, grid asks for {n}")
            atoms, sampler, label = [], None, spec.get("label", "inline")
        for a in spec.get("atoms", []):
            atoms.append(Atom(float(a["omega"]), decode_matrix(a["mass"])))
        measure = SpectralMeasure(density, tuple(atoms), bool(spec.get("singular_continuous", False)),
                                  sampler, label, params)
    except (KeyError, TypeError) as exc:
        raise BadParams(f"malformed model: {exc}") from exc
    if "dim" in spec and int(spec["dim"]) != measure.dim:
        raise BadParams(f"declared dim {spec['dim']} but density is {measure.dim}x{measure.dim}")
    measure.check_psd()
    return measure


def load_model(source, grid_size=None, params=None, taper="bartlett"):
    """Model from "builtin:<id>", a model JSON file, or a covariance CSV file.

    Returns ``(measure, description)`` where the description records what
    was loaded (used for digests).
    """
    if source.startswith(BUILTIN):
        spec = {"density": source}
        desc = {"model": source, "params": params or {}, "grid_size": grid_size or DEFAULT_GRID_SIZE}
        return parse_model(spec, grid_size, params), desc
    path = Path(source)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        cov = read_covariance_csv(path)
        grid = FrequencyGrid(int(grid_size or DEFAULT_GRID_SIZE))
        desc = {"covariance_file": path.name, "taper": taper, "grid_size": grid.size,
                "input_digest": "sha256:" + hashlib.sha256(text.encode()).hexdigest()}
        return measure_from_covariance(cov, grid, taper), desc
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadParams(f"model file is not valid JSON: {exc}") from exc
    desc = {"model_file": path.name, "params": params or {}, "grid_size": grid_size,
            "input_digest": "sha256:" + hashlib.sha256(text.encode()).hexdigest()}
    return parse_model(spec, grid_size, params), desc


def model_to_dict(measure):
    return {"dim": measure.dim, "grid_size": measure.grid.size,
            "density": encode_matrix(measure.density),
            "atoms": [{"omega": a.omega, "mass": encode_matrix(a.mass)} for a in measure.atoms],
            "singular_continuous": measure.singular_continuous}


def write_covariance_csv(cov, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["h", "i", "j", "re", "im"])
        for h in range(cov.max_lag + 1):
            for i in range(cov.dim):
                for j in range(cov.dim):
                    z = cov.lags[h, i, j]
                    w.writerow([h, i + 1, j + 1, repr(float(z.real)), repr(float(z.imag))])


def read_covariance_csv(path):
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh, skipinitialspace=True):
            try:
                rows.append((int(rec["h"]), int(rec["i"]), int(rec["j"]), float(rec["re"]), float(rec["im"])))
            except (KeyError, TypeError, ValueError) as exc:
                raise BadParams(f"malformed covariance row {rec}: {exc}") from exc
    if not rows:
        raise BadParams("covariance file has no rows")
    H = max(r[0] for r in rows)
    d = max(max(r[1], r[2]) for r in rows)
    if min(min(r[:3]) for r in rows) < 0 or min(min(r[1:3]) for r in rows) < 1:
        raise BadParams("lags must be >= 0 and indices >= 1")
    lags = np.zeros((H + 1, d, d), dtype=complex)
    seen = np.zeros((H + 1, d, d), dtype=bool)
    for h, i, j, re, im in rows:
        lags[h, i - 1, j - 1] = re + 1j * im
        seen[h, i - 1, j - 1] = True
    if not seen.all():
        raise BadParams("covariance file is missing entries")
    return CovarianceSequence(lags)


def meta(command, parameters, source_desc):
    return {"tool": "specreg", "version": __version__, "command": command,
            "parameters": parameters, "input": source_desc, "input_digest": digest(source_desc)}


def write_report(report, path=None, info=None):
    obj = {"meta": info or {}, "report": report.to_dict()}
    return _dump(_clean_floats(obj), path)


def filter_to_dict(bank):
    return {"rank": bank.k, "sided": bank.sided, "gauge": bank.gauge,
            "taps": [{"j": int(j), "matrix": encode_matrix(m)} for j, m in zip(bank.tap_orders, bank.taps)],
            "direct": [{"m": int(m), "matrix": encode_matrix(w)} for m, w in zip(bank.direct_orders, bank.direct)],
            "tail_energy": bank.tail_energy, "negative_tail": bank.negative_tail,
            "certificate": bank.certificate.to_dict() if bank.certificate else None}


def write_filters(bank, path=None, info=None):
    obj = {"meta": info or {}, **filter_to_dict(bank)}
    return _dump(_clean_floats(obj), path)


def read_filters(path):
    obj = json.loads(Path(path).read_text())
    taps = np.stack([decode_matrix(t["matrix"]) for t in obj["taps"]])
    direct = np.stack([decode_matrix(t["matrix"]) for t in obj["direct"]])
    return obj, taps, np.array([t["j"] for t in obj["taps"]]), direct, np.array([t["m"] for t in obj["direct"]])


def write_path_csv(path_obj, path, info=None):
    """Sample path CSV "t, re_1, im_1, ..." plus a sidecar JSON next to it."""
    d = path_obj.dim
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"{p}_{i + 1}" for i in range(d) for p in ("re", "im")])
        for t, row in zip(path_obj.times, np.asarray(path_obj.values, dtype=complex)):
            vals = []
            for z in row:
                vals += [repr(float(z.real)), repr(float(z.imag))]
            w.writerow([int(t)] + vals)
    side = {"meta": info or {}, "seed": path_obj.seed, "generator": path_obj.generator,
            "length": path_obj.length, "dim": d}
    _dump(_clean_floats(side), Path(str(path) + ".json"))


def read_path_csv(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0].astype(int), data[:, 1::2] + 1j * data[:, 2::2]
