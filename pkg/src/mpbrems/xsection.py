"""Partial cross-section weights, normalized spectra and the field-free baseline.

A partial cross section factorizes into a dimensionless weight times the
field-free cross section ``dsigma*``.  The weights of every mode form a
probability distribution over photon-number cells, which
:func:`spectrum` enumerates with a certified bound on the omitted mass.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.constants import fine_structure

from .mpbessel import (DEFAULT_TOL, DoubleSeries, _bessel_row_certified, bessel_int,
                       bessel_tail_bound)
from .mpparams import MUCH_GREATER, MUCH_LESS, MultiphotonParams
from .relkin import KinematicsError

__all__ = [
    "SpectrumEntry",
    "Spectrum",
    "NormalizationError",
    "NoMatchingCellError",
    "RegimeWarning",
    "MODES",
    "weight_noninterference",
    "weight_factorized",
    "weight_interference",
    "index_map",
    "spectrum",
    "tail_bound",
    "ratio_regimes",
    "combined_wave",
    "baseline_dcs",
]

MODES = ("noninterference", "factorized", "interference", "single_wave_even")
UNDERFLOW = 1e-300


class NormalizationError(RuntimeError):
    """Spectrum mass could not be accounted for.

    ``deficit`` is the missing mass ``1 - sum of weights`` at the point of
    failure and ``tail_bound`` the certified bound reached there.
    """

    def __init__(self, message, deficit, radius, tail_bound=float("nan")):
        super().__init__(message)
        self.deficit = deficit
        self.radius = radius
        self.tail_bound = tail_bound


class NoMatchingCellError(ValueError):
    """An odd-combination cell has no interference counterpart."""


class RegimeWarning(UserWarning):
    """Parameters outside the regime a weight formula assumes."""


@dataclass(frozen=True)
class SpectrumEntry:
    idx1: int
    idx2: int
    weight: float
    cumulative: float


@dataclass
class Spectrum:
    mode: str
    entries: list = field(default_factory=list)
    tail_bound: float = 0.0
    params: MultiphotonParams | None = None
    radius: int = 0

    @property
    def total(self):
        return self.entries[-1].cumulative if self.entries else 0.0

    def as_array(self):
        """``(n, 4)`` array of idx1, idx2, weight, cumulative."""
        return np.array([(e.idx1, e.idx2, e.weight, e.cumulative) for e in self.entries],
                        dtype=float).reshape(-1, 4)

    def weight(self, idx1, idx2):
        for e in self.entries:
            if e.idx1 == idx1 and e.idx2 == idx2:
                return e.weight
        return 0.0


# ---------------------------------------------------------------------------
# Single-cell weights
# ---------------------------------------------------------------------------

def weight_noninterference(l, s, params, tol=DEFAULT_TOL):
    """Noninterference weight ``I_{ls}^2`` for ``l`` photons of wave 1 and ``s`` of wave 2.

    Warns with :class:`RegimeWarning` when a classical parameter exceeds the
    moderate-field bound.
    """
    if max(params.xi1, params.xi2) > MUCH_LESS:
        warnings.warn("xi exceeds the moderate-field bound; weights may not apply",
                      RegimeWarning, stacklevel=2)
    v = DoubleSeries.two_wave(params.args, tol)(l, s)
    return v * v


def weight_factorized(l, s, gamma1, gamma2):
    """Weight ``J_l(gamma1)^2 J_s(gamma2)^2`` of independent emission/absorption."""
    a = bessel_int(l, gamma1)
    b = bessel_int(s, gamma2)
    return (a * a) * (b * b)


def weight_interference(l1, l2, params, tol=DEFAULT_TOL):
    """Interference-range weight ``J_{l1 l2}^2`` for combination-photon numbers.

    Warns when the linear parameters are not negligible, since this form
    assumes the interference geometry where they vanish.
    """
    if max(abs(params.gamma1), abs(params.gamma2)) > 1e-6:
        warnings.warn("gamma is not negligible; interference weights assume gamma = 0",
                      RegimeWarning, stacklevel=2)
    v = DoubleSeries.interference(params.beta1, params.beta2, params.alpha_plus,
                                  params.alpha_minus, tol)(l1, l2)
    return v * v


def index_map(l, s):
    """Map wave photon numbers ``(l, s)`` to combination-photon numbers.

    Returns
    -------
    parity : {'even_combination', 'odd_combination'}
    l1, l2 : int
        Half-sum and half-difference; for odd cells they are rounded up.
    """
    l, s = int(l), int(s)
    if (l + s) % 2 == 0:
        return "even_combination", (l + s) // 2, (l - s) // 2
    return "odd_combination", (l + s + 1) // 2, (l - s + 1) // 2


# ---------------------------------------------------------------------------
# Certified tail bounds
# ---------------------------------------------------------------------------

def _l1_norm_bound(x):
    """Upper bound on ``sum_n |J_n(x)|``: Cauchy-Schwarz on a core plus its tail."""
    ax = abs(x)
    if ax == 0.0:
        return 1.0
    best = math.inf
    for k in (math.ceil(ax) + 2, math.ceil(ax + ax ** (1 / 3)) + 5, math.ceil(2 * ax) + 10):
        best = min(best, math.sqrt(2 * k + 1) + bessel_tail_bound(ax, k + 1))
    return best


def _gen_tail_l1(a, b, radius):
    """Bound on ``sum_{|r| > radius} sum_m |J_{r-2m}(a) J_m(b)|``.

    Any term with ``|r| > n + 2m0`` has ``|r - 2m| > n`` or ``|m| > m0``.
    The best split of ``radius = n + 2 m0`` is taken.
    """
    if b == 0.0:
        return bessel_tail_bound(a, radius + 1)
    la, lb = _l1_norm_bound(a), _l1_norm_bound(b)
    best = math.inf
    for m0 in range(0, radius // 2 + 1):
        n = radius - 2 * m0
        t = bessel_tail_bound(a, n + 1) * lb + bessel_tail_bound(b, m0 + 1) * la
        best = min(best, t)
    return best


def _sq(x):
    return x * x if math.isfinite(x) else math.inf


def tail_bound(mode, params, radius):
    """Certified upper bound on the weight outside the square of half-width ``radius``.

    Each weight family is the set of squared Fourier coefficients of a
    unimodular function.  Fixing all but one angle leaves a single-wave
    generalized Bessel function with the moduli of the remaining arguments
    combined, and the squared l1 norm of its tail bounds the omitted l2 mass.
    """
    p = params
    if mode == "factorized":
        t = _sq(bessel_tail_bound(p.gamma1, radius + 1)) + _sq(bessel_tail_bound(p.gamma2, radius + 1))
    elif mode == "single_wave_even":
        t = _sq(bessel_tail_bound(p.beta1, radius + 1))
    elif mode == "interference":
        rest = abs(p.beta1) + abs(p.beta2)
        t = (_sq(bessel_tail_bound(abs(p.alpha_plus) + rest, radius + 1))
             + _sq(bessel_tail_bound(abs(p.alpha_minus) + rest, radius + 1)))
    elif mode == "noninterference":
        mix = abs(p.alpha_plus) + abs(p.alpha_minus)
        t = (_sq(_gen_tail_l1(abs(p.gamma1) + mix, abs(p.beta1), radius))
             + _sq(_gen_tail_l1(abs(p.gamma2) + mix, abs(p.beta2), radius)))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return min(t, 1.0)


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

def _shell(radius, line=False):
    """Cells with max(|a|, |b|) == radius in lexicographic order."""
    if line:
        return [(0, 0)] if radius == 0 else [(-radius, 0), (radius, 0)]
    if radius == 0:
        return [(0, 0)]
    cells = []
    for a in range(-radius, radius + 1):
        if abs(a) == radius:
            cells.extend((a, b) for b in range(-radius, radius + 1))
        else:
            cells.extend(((a, -radius), (a, radius)))
    return cells


def _cell_evaluator(mode, params, tol):
    """Vectorized ``f(idx1, idx2) -> weights`` for one mode."""
    p = params
    if mode == "noninterference":
        series = DoubleSeries.two_wave(p.args, tol)
    elif mode == "interference":
        series = DoubleSeries.interference(p.beta1, p.beta2, p.alpha_plus, p.alpha_minus, tol)
    else:
        if mode == "factorized":
            ra = _bessel_row_certified(p.gamma1, tol.eps, tol)
            rb = _bessel_row_certified(p.gamma2, tol.eps, tol)
        else:
            ra = _bessel_row_certified(p.beta1, tol.eps, tol)
            rb = None

        def rows(i1, i2):
            a = ra.lookup(i1)
            w = a * a
            if rb is not None:
                b = rb.lookup(i2)
                w = w * (b * b)
            return w

        return rows

    def cells(i1, i2):
        v = series.batch(i1, i2)
        return v * v

    return cells


def _evaluate(fn, cells, threads):
    i1 = np.array([c[0] for c in cells], dtype=np.int64)
    i2 = np.array([c[1] for c in cells], dtype=np.int64)
    if threads <= 1 or len(cells) < 64:
        return fn(i1, i2)
    bounds = np.linspace(0, len(cells), threads + 1).astype(int)
    chunks = [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda ab: fn(i1[ab[0]:ab[1]], i2[ab[0]:ab[1]]), chunks))
    return np.concatenate(parts)


def spectrum(mode, params, tail_tol=1e-10, tol=DEFAULT_TOL, threads=1, max_radius=None):
    """Weight spectrum over photon-number cells with certified normalization.

    Cells are enumerated in square shells ``max(|idx1|, |idx2|) = R`` from
    the origin (lexicographic within a shell) until the accumulated weight
    reaches ``1 - tail_tol`` and the certified bound on the mass outside the
    enumerated square is at most ``tail_tol``.

    Parameters
    ----------
    mode : {'noninterference', 'factorized', 'interference', 'single_wave_even'}
        'single_wave_even' enumerates ``(l1, 0)`` with weight ``J_{l1}(beta1)^2``.
    params : MultiphotonParams
    tail_tol : float
        In (0, 0.1).
    tol : Tolerance
        Accuracy of the individual cell values.
    threads : int
        Worker threads for cell evaluation; the output does not depend on it.
    max_radius : int, optional
        Stop enumerating at this shell (debugging aid for the failure path).

    Raises
    ------
    NormalizationError
        When the shell radius exceeds ``4 (max|argument| + 50)`` or
        ``max_radius`` before the mass is accounted for.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if not 0.0 < tail_tol < 0.1:
        raise ValueError(f"tail_tol must lie in (0, 0.1), got {tail_tol!r}")
    if threads < 1:
        raise ValueError("threads must be >= 1")
    fn = _cell_evaluator(mode, params, tol)
    cap = math.floor(4 * (max(abs(v) for v in params.args.as_tuple()) + 50))
    if max_radius is not None:
        cap = min(cap, int(max_radius))
    line = mode == "single_wave_even"

    entries = []
    cumulative = 0.0
    radius = 0
    while True:
        cells = _shell(radius, line)
        weights = _evaluate(fn, cells, threads)
        for (a, b), w in zip(cells, weights):
            w = float(w)
            cumulative += w
            entries.append(SpectrumEntry(a, b, w, cumulative))
        bound = tail_bound(mode, params, radius)
        if cumulative >= 1.0 - tail_tol and bound <= tail_tol:
            break
        if radius >= cap:
            deficit = 1.0 - cumulative
            raise NormalizationError(
                f"{mode} spectrum not normalized at shell radius {radius}: "
                f"sum = {cumulative:.15g}, deficit = {deficit:.3g}, tail bound = {bound:.3g}",
                deficit, radius, bound)
        radius += 1
    return Spectrum(mode, entries, bound, params, radius)


def ratio_regimes(l, s, noninterference_params, interference_params, tol=DEFAULT_TOL):
    """Ratio of the noninterference weight to the matching interference weight.

    Cell ``(l, s)`` must be an even combination; it maps to
    ``((l + s)/2, (l - s)/2)``.  Returns ``inf`` when the interference
    weight underflows below 1e-300 (a deep zero of the special function).
    """
    parity, l1, l2 = index_map(l, s)
    if parity != "even_combination":
        raise NoMatchingCellError(f"cell ({l}, {s}) is an odd combination; no interference cell")
    num = DoubleSeries.two_wave(noninterference_params.args, tol)(l, s)
    p = interference_params
    den = DoubleSeries.interference(p.beta1, p.beta2, p.alpha_plus, p.alpha_minus, tol)(l1, l2)
    num, den = num * num, den * den
    if den < UNDERFLOW:
        return math.inf
    return num / den


# ---------------------------------------------------------------------------
# Field combination and baseline
# ---------------------------------------------------------------------------

def combined_wave(F1, F2, delta):
    """Strength and polarization of two equal-frequency waves seen as one.

    ``e1`` is taken along x and ``e2`` at angle ``delta`` from it.
    """
    if F1 < 0 or F2 < 0:
        raise ValueError("field strengths must be nonnegative")
    e1 = np.array([1.0, 0.0])
    e2 = np.array([math.cos(delta), math.sin(delta)])
    vec = F1 * e1 + F2 * e2
    F = math.sqrt(max(F1 * F1 + F2 * F2 + 2.0 * F1 * F2 * math.cos(delta), 0.0))
    if F <= 1e-12 * max(F1, F2, 1e-300):
        raise ValueError("combined field vanishes; polarization undefined")
    pol = vec / np.linalg.norm(vec)
    return F, (float(pol[0]), float(pol[1]))


def _bethe_heitler(kin, Z):
    """Born bremsstrahlung cross section d sigma / (d omega dOmega_f dOmega_k).

    Homogeneous of degree -3 in energy; with m = 1 the result is in reduced
    Compton wavelengths squared per unit photon energy.  Angles of the
    electron momenta are measured from the photon direction; the
    transverse components enter through their dot products.
    """
    pi, pf, k = kin.p_i, kin.p_f, kin.k_prime
    w = k.t
    n = k.spatial / w
    v0, v = pi.spatial, pf.spatial
    E0, E = pi.t, pf.t
    a0 = v0 - np.dot(v0, n) * n
    a = v - np.dot(v, n) * n
    D0 = E0 - np.dot(v0, n)
    D = E - np.dot(v, n)
    qv = v0 - v - k.spatial
    q2 = float(np.dot(qv, qv))
    s2, s02, cross = float(a @ a), float(a0 @ a0), float(a @ a0)
    bracket = (s2 / D ** 2 * (4 * E0 * E0 - q2)
               + s02 / D0 ** 2 * (4 * E * E - q2)
               - 2 * cross / (D * D0) * (4 * E0 * E - q2 + 2 * w * w)
               + 2 * w * w * (s2 + s02) / (D * D0))
    pref = Z * Z * fine_structure ** 3 / (4 * math.pi ** 2)
    return pref * (pf.p / pi.p) * bracket / (w * q2 * q2)


def baseline_dcs(kind, kin, Z=1):
    """Field-free cross section multiplying the weights.

    ``kind='unit'`` returns 1 so that spectra stay dimensionless;
    ``kind='bethe_heitler'`` returns the Born cross section for the given
    kinematics and nuclear charge, triply differential in photon energy,
    electron solid angle and photon solid angle.
    """
    if kind == "unit":
        return 1.0
    if kind != "bethe_heitler":
        raise ValueError(f"unknown baseline {kind!r}")
    m = kin.m
    if kin.k_prime.t >= kin.p_i.t - m:
        raise KinematicsError("photon energy must be below the initial kinetic energy")
    if kin.k_prime.t <= 0:
        raise KinematicsError("photon energy must be positive")
    if min(kin.v_i, kin.v_f) < MUCH_GREATER * Z * fine_structure:
        warnings.warn("electron too slow for the Born approximation (v >> Z alpha)",
                      RegimeWarning, stacklevel=2)
    return _bethe_heitler(kin, Z)
