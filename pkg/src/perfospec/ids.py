"""Ensemble estimation of the integrated density of states and exponent fits.

The integral quantity estimated here is the expected number of eigenvalues
per unit volume below each energy, computed for a finite box under both
all-Dirichlet and all-Neumann conditions.  Per realization the Dirichlet
count never exceeds the Neumann count (the two operators differ by a
nonnegative diagonal), so the two curves bracket each other exactly and the
ensemble means carry plain Monte-Carlo standard errors.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import operators
from .errors import DegenerateWindowError, EmptyDomainError, ValidationError
from .geometry import (BoxSpec, DisorderModel, model_descriptor, model_shape,
                       rasterize, sample_model)
from .rng import derive_seed
from .spectra import count_below_many

__all__ = [
    "EnsembleSpec",
    "IdsCurve",
    "FitResult",
    "estimate_ids",
    "analytic_dirichlet_lower",
    "fit_exponent",
    "default_window",
    "curve_to_csv",
    "curve_from_csv",
    "fit_to_json",
]


@dataclass(frozen=True)
class EnsembleSpec:
    """What to sample: disorder model, box, grid resolution, ensemble size."""

    model: DisorderModel
    box: BoxSpec
    resolution: int  # grid cells per unit length
    realizations: int
    master_seed: int

    def __post_init__(self):
        if self.realizations < 1:
            raise ValidationError(f"need at least one realization, got {self.realizations}")
        if self.resolution < 2:
            raise ValidationError(f"resolution must be >= 2, got {self.resolution}")


@dataclass(frozen=True, eq=False)
class IdsCurve:
    """Normalized counting functions on an energy grid, with standard errors.

    ``n_dirichlet``/``n_neumann`` are ensemble means of ``count / L^d``; the
    spectral floor is 0 (the operators are nonnegative).
    """

    energies: np.ndarray
    n_dirichlet: np.ndarray
    stderr_d: np.ndarray
    n_neumann: np.ndarray
    stderr_n: np.ndarray
    spec: EnsembleSpec | None = None
    floor: float = 0.0


@dataclass(frozen=True)
class FitResult:
    exponent: float
    window: tuple[float, float]
    residual: float
    kind: str  # "lifshitz" or "vanhove"
    model_preference: str  # "exponential" or "power"
    excluded_points: int
    n_points: int


def _realization_counts(spec: EnsembleSpec, energies: np.ndarray, index: int
                        ) -> tuple[np.ndarray, np.ndarray]:
    seed = derive_seed(spec.master_seed, index)
    realization = sample_model(spec.model, spec.box, seed)
    shape = model_shape(spec.model, spec.box.d)
    mask = rasterize(realization, shape, spec.box, spec.resolution)
    try:
        a_d = operators.assemble(mask, operators.DD)
        a_n = operators.assemble(mask, operators.NN)
    except EmptyDomainError:
        zero = np.zeros(len(energies), dtype=np.int64)
        return zero, zero
    return count_below_many(a_d, energies), count_below_many(a_n, energies)


def _worker(args) -> tuple[int, np.ndarray, np.ndarray]:
    spec, energies, index = args
    cd, cn = _realization_counts(spec, energies, index)
    return index, cd, cn


def estimate_ids(spec: EnsembleSpec, energies, jobs: int = 1) -> IdsCurve:
    """Ensemble means of the normalized Dirichlet/Neumann counting functions.

    Realizations are independent tasks (seed ``i`` derives from the master
    seed), and results are reduced in realization order regardless of worker
    completion order, so the curve is bit-identical for any ``jobs``.
    A realization whose grid is fully occupied contributes zero counts.
    """
    energies = np.asarray(energies, dtype=float)
    if energies.size == 0 or np.any(energies <= 0):
        raise ValidationError("energies must be positive")
    if np.any(np.diff(energies) < 0):
        raise ValidationError("energies must be ascending")

    r = spec.realizations
    counts_d = np.zeros((r, energies.size), dtype=np.int64)
    counts_n = np.zeros((r, energies.size), dtype=np.int64)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for index, cd, cn in pool.map(_worker, ((spec, energies, i) for i in range(r))):
                counts_d[index] = cd
                counts_n[index] = cn
    else:
        for i in range(r):
            counts_d[i], counts_n[i] = _realization_counts(spec, energies, i)

    vol = spec.box.volume
    mean_d = counts_d.mean(axis=0) / vol
    mean_n = counts_n.mean(axis=0) / vol
    if r > 1:
        se_d = counts_d.std(axis=0, ddof=1) / math.sqrt(r) / vol
        se_n = counts_n.std(axis=0, ddof=1) / math.sqrt(r) / vol
    else:
        se_d = np.zeros_like(mean_d)
        se_n = np.zeros_like(mean_n)
    return IdsCurve(energies=energies, n_dirichlet=mean_d, stderr_d=se_d,
                    n_neumann=mean_n, stderr_n=se_n, spec=spec)


def analytic_dirichlet_lower(E: float, p: float, d: int) -> float:
    """Closed-form lower bound ``(1/L^d) (1-p)^(L^d)`` for the Dirichlet curve.

    ``L`` is the smallest integer making the empty box's ground state
    ``d*pi^2/L^2`` fall below ``E``, i.e. the smallest box that can host an
    eigenvalue at ``E`` provided all its sites happen to be obstacle-free.
    """
    if not (E > 0):
        raise ValidationError(f"energy must be positive, got {E}")
    if not (0.0 < p < 1.0):
        raise ValidationError(f"probability must lie in (0,1), got {p}")
    L = max(1, math.ceil(math.pi * math.sqrt(d / E) - 1e-12))
    cells = L**d
    return (1.0 - p) ** cells / cells


def default_window(curve: IdsCurve, min_points: int = 5,
                   nonzero_fraction: float = 0.8) -> tuple[float, float]:
    """Lowest decade ``[E, 10E]`` holding enough nonzero Dirichlet means."""
    energies = curve.energies
    for e_lo in energies:
        window = (energies >= e_lo) & (energies <= 10.0 * e_lo)
        if window.sum() < min_points:
            continue
        values = curve.n_dirichlet[window]
        if (values > 0).mean() >= nonzero_fraction:
            return (float(e_lo), float(10.0 * e_lo))
    raise DegenerateWindowError(
        "no decade with enough nonzero Dirichlet counts; pass a window explicitly")


def _fit_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


def _power_rms(log_e: np.ndarray, log_n: np.ndarray) -> float:
    return _fit_line(log_e, log_n)[2]


def _exponential_rms(energies: np.ndarray, log_n: np.ndarray) -> float:
    """Best RMS of ``log N ~ a - c E^-kappa`` over decay exponents ``kappa``."""

    def rms_for(kappa: float) -> float:
        x = energies ** (-kappa)
        a = np.column_stack([np.ones_like(x), x])
        coef, *_ = np.linalg.lstsq(a, log_n, rcond=None)
        r = log_n - a @ coef
        return float(np.sqrt(np.mean(r**2)))

    result = minimize_scalar(rms_for, bounds=(0.05, 5.0), method="bounded",
                             options={"xatol": 1e-4})
    return float(result.fun)


def fit_exponent(curve: IdsCurve, kind: str, side: str,
                 window: tuple[float, float] | None = None) -> FitResult:
    """Least-squares exponent in log coordinates over a fit window.

    ``kind="lifshitz"`` fits log|log N| against log E (the windowed values
    must be positive and below one); ``kind="vanhove"`` fits log N against
    log E.  Zero counts are excluded and their number reported.  Both a
    stretched-exponential and a power model are fitted to the same points and
    the lower-residual family is recorded as ``model_preference``.
    """
    if kind not in ("lifshitz", "vanhove"):
        raise ValidationError(f"unknown fit kind {kind!r}")
    if side not in ("dirichlet", "neumann"):
        raise ValidationError(f"unknown side {side!r}")
    if window is None:
        window = default_window(curve)
    lo, hi = window
    if not (lo < hi):
        raise DegenerateWindowError(f"empty window {window}")

    values = curve.n_dirichlet if side == "dirichlet" else curve.n_neumann
    in_window = (curve.energies >= lo) & (curve.energies <= hi)
    energies = curve.energies[in_window]
    values = values[in_window]
    positive = values > 0
    excluded = int((~positive).sum())
    energies, values = energies[positive], values[positive]

    if energies.size < 5:
        raise DegenerateWindowError(
            f"only {energies.size} positive points in window {window}; need >= 5")
    if kind == "lifshitz" and np.any(values >= 1.0):
        raise DegenerateWindowError(
            "lifshitz transform needs all values < 1 inside the window")

    log_e = np.log(energies)
    log_n = np.log(values)
    if kind == "lifshitz":
        slope, _, residual = _fit_line(log_e, np.log(-log_n))
    else:
        slope, _, residual = _fit_line(log_e, log_n)

    rms_power = _power_rms(log_e, log_n)
    rms_exp = _exponential_rms(energies, log_n)
    preference = "exponential" if rms_exp < rms_power else "power"
    return FitResult(exponent=slope, window=(float(lo), float(hi)), residual=residual,
                     kind=kind, model_preference=preference,
                     excluded_points=excluded, n_points=int(energies.size))


# --- exports -----------------------------------------------------------------

_CSV_COLUMNS = ["E", "n_dirichlet", "stderr_d", "n_neumann", "stderr_n",
                "realizations", "L", "d", "M", "model", "master_seed"]


def curve_to_csv(curve: IdsCurve) -> str:
    spec = curve.spec
    if spec is None:
        raise ValidationError("curve has no ensemble metadata; cannot export")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for i, e in enumerate(curve.energies):
        writer.writerow([repr(float(e)),
                         repr(float(curve.n_dirichlet[i])), repr(float(curve.stderr_d[i])),
                         repr(float(curve.n_neumann[i])), repr(float(curve.stderr_n[i])),
                         spec.realizations, repr(float(spec.box.L)), spec.box.d,
                         spec.resolution, model_descriptor(spec.model), spec.master_seed])
    return buf.getvalue()


def curve_from_csv(text: str) -> IdsCurve:
    """Read a curve back from its CSV form (metadata columns are not rebuilt
    into an :class:`EnsembleSpec`; fitting only needs the numeric columns)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header[:5] != _CSV_COLUMNS[:5]:
        raise ValidationError(f"unexpected CSV header {header!r}")
    rows = [row for row in reader if row]
    energies = np.array([float(r[0]) for r in rows])
    return IdsCurve(energies=energies,
                    n_dirichlet=np.array([float(r[1]) for r in rows]),
                    stderr_d=np.array([float(r[2]) for r in rows]),
                    n_neumann=np.array([float(r[3]) for r in rows]),
                    stderr_n=np.array([float(r[4]) for r in rows]),
                    spec=None)


def fit_to_json(fit: FitResult, side: str) -> str:
    return json.dumps({
        "kind": fit.kind,
        "side": side,
        "exponent": fit.exponent,
        "window": list(fit.window),
        "residual": fit.residual,
        "model_preference": fit.model_preference,
        "excluded_points": fit.excluded_points,
        "n_points": fit.n_points,
    }, indent=2)
