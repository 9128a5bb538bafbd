"""Bessel-type special functions for two-wave multiphoton processes.

Three layers are provided:

* integer-order Bessel functions of the first kind ``J_n(x)``;
* generalized (two-argument) Bessel functions
  ``J_r(gamma, beta) = sum_m J_{r-2m}(gamma) J_m(beta)``;
* the six-argument two-wave functions ``I_{rr'}`` and their interference
  counterparts ``J_{r1 r2}``.

Every series is truncated with a certified bound on the omitted terms.  The
bound rests on Kapteyn's inequality

    |J_n(n z)| <= [z exp(sqrt(1 - z^2)) / (1 + sqrt(1 - z^2))]^n,  0 < z <= 1,

whose right-hand side decreases geometrically in ``n`` for fixed argument,
so the one-sided tail sum has a closed-form majorant.

The quadrature oracles at the bottom of the module compute the same
quantities as Fourier coefficients of unimodular generators and are meant
for cross-checking the series, not for production use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerance",
    "TwoWaveArgs",
    "AccuracyError",
    "RepresentationError",
    "DEFAULT_TOL",
    "bessel_int",
    "bessel_row",
    "bessel_tail_bound",
    "gen_bessel",
    "gen_bessel_row",
    "two_wave_I",
    "interference_J",
    "DoubleSeries",
    "coeff_D",
    "coeff_B",
    "coeff_interference",
    "oracle_gen_bessel",
    "oracle_two_wave_I",
]

_EPS_MACHINE = np.finfo(float).eps


class AccuracyError(ArithmeticError):
    """A series could not be truncated within the requested accuracy."""

    def __init__(self, message, bound):
        super().__init__(f"{message} (achieved bound {bound:.3e})")
        self.bound = bound


class RepresentationError(ArithmeticError):
    """A quadrature oracle produced a non-negligible imaginary part."""


@dataclass(frozen=True)
class Tolerance:
    """Requested absolute accuracy and a hard cap on series length.

    ``max_terms`` caps the number of terms of any single one-dimensional
    index sum (both signs counted).
    """

    eps: float = 1e-13
    max_terms: int = 8192

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps!r}")
        if self.max_terms < 16:
            raise ValueError(f"max_terms must be >= 16, got {self.max_terms!r}")


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class TwoWaveArgs:
    """Signed argument tuple of the two-wave functions ``I_{rr'}``."""

    gamma1: float = 0.0
    beta1: float = 0.0
    gamma2: float = 0.0
    beta2: float = 0.0
    alpha_plus: float = 0.0
    alpha_minus: float = 0.0

    def __post_init__(self):
        for name in ("gamma1", "beta1", "gamma2", "beta2", "alpha_plus", "alpha_minus"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def as_tuple(self):
        return (self.gamma1, self.beta1, self.gamma2, self.beta2,
                self.alpha_plus, self.alpha_minus)

    def magnitude(self):
        return sum(abs(v) for v in self.as_tuple())


# ---------------------------------------------------------------------------
# Tail bounds and truncation windows
# ---------------------------------------------------------------------------

def _kapteyn(n, x):
    """Kapteyn majorant of |J_n(x)| for integer n > |x| >= 0."""
    if x == 0.0:
        return 0.0
    z = x / n
    if z == 0.0:
        return 0.0
    w = math.sqrt(1.0 - z * z)
    return math.exp(n * (math.log(z) + w - math.log1p(w)))


def bessel_tail_bound(x, n0):
    """Upper bound on ``sum_{|n| >= n0} |J_n(x)|`` (both signs of ``n``).

    Returns ``inf`` when ``n0 <= |x|``, where no useful bound exists.
    """
    ax = abs(float(x))
    n0 = int(n0)
    if ax == 0.0:
        return 0.0 if n0 >= 1 else math.inf
    if n0 <= ax:
        return math.inf
    # consecutive majorants shrink at least by exp(-arccosh(n0/x))
    ratio = math.exp(-math.acosh(n0 / ax))
    return 2.0 * _kapteyn(n0, ax) / (1.0 - ratio)


def _window(x, eps, max_terms):
    """Half-width ``N`` such that the omitted tail of ``J_n(x)``, |n| > N, is < eps.

    Starts from the Airy-width heuristic |x| + 10 |x|^(1/3) + 12 and widens
    once before giving up.
    """
    ax = abs(float(x))
    if ax == 0.0:
        return 0, 0.0
    n = math.ceil(ax + 10.0 * ax ** (1.0 / 3.0) + 12.0)
    bound = bessel_tail_bound(ax, n + 1)
    if bound >= eps:
        n = math.ceil(ax + 2.0 * (n - ax))
        bound = bessel_tail_bound(ax, n + 1)
    if 2 * n + 1 > max_terms:
        raise AccuracyError(
            f"Bessel window for |x|={ax:g} needs {2 * n + 1} terms, cap is {max_terms}",
            bound)
    if bound >= eps:
        raise AccuracyError(f"Bessel tail for |x|={ax:g} not below eps={eps:g}", bound)
    return n, bound


# ---------------------------------------------------------------------------
# Integer-order Bessel functions
# ---------------------------------------------------------------------------

def _small_series(x, nmax):
    """J_0..J_nmax for 0 < x < 0.01 from the ascending series (no cancellation there)."""
    n = np.arange(nmax + 1)
    lead = np.empty(nmax + 1)
    lead[0] = 1.0
    for k in range(1, nmax + 1):
        lead[k] = lead[k - 1] * (0.5 * x) / k
    q = -0.25 * x * x
    term = np.ones(nmax + 1)
    total = np.ones(nmax + 1)
    for k in range(1, 8):
        term = term * q / (k * (n + k))
        total += term
    return lead * total


def _miller(x, nmax):
    """J_0..J_nmax at x > 0 by normalized backward recurrence."""
    if x < 0.01:
        return _small_series(x, nmax)
    start = nmax + math.ceil(x + 10.0 * x ** (1.0 / 3.0) + 30.0)
    start += start % 2
    out = np.zeros(nmax + 1)
    big, small = 1e250, 1e-250
    j_next, j_cur = 0.0, small
    norm = 0.0
    for k in range(start, 0, -1):
        j_prev = 2.0 * k / x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > big:
            j_cur *= small
            j_next *= small
            out *= small
            norm *= small
        if k - 1 <= nmax:
            out[k - 1] = j_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
    norm += j_cur
    return out / norm


def bessel_row(x, n):
    """Array of ``J_k(x)`` for ``k = -n .. n`` (index ``k + n``)."""
    n = int(n)
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = float(x)
    row = np.zeros(2 * n + 1)
    if x == 0.0:
        row[n] = 1.0
        return row
    pos = _miller(abs(x), n)
    signs = np.where(np.arange(n + 1) % 2 == 0, 1.0, -1.0)
    if x < 0:
        pos = pos * signs
    row[n:] = pos
    row[:n] = (pos[1:] * signs[1:])[::-1]
    return row


def bessel_int(n, x):
    """Integer-order Bessel function of the first kind ``J_n(x)``.

    Accurate to about 1e-15 absolute over the ranges used here; negative
    orders follow ``J_{-n}(x) = (-1)^n J_n(x)``.
    """
    n = int(n)
    x = float(x)
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    m = abs(n)
    val = _miller(abs(x), m)[m]
    if (n < 0) != (x < 0) and m % 2 == 1:
        val = -val
    return float(val)


# ---------------------------------------------------------------------------
# Generalized Bessel functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Row:
    """Truncated coefficient row: ``values[k + half]`` approximates c_k.

    ``err`` bounds |c_k - values| uniformly in k (values outside the row are
    taken as zero) and also the l1 norm of the omitted coefficients.
    """

    half: int
    values: np.ndarray
    err: float

    def lookup(self, idx):
        idx = np.asarray(idx)
        out = np.zeros(idx.shape)
        ok = np.abs(idx) <= self.half
        out[ok] = self.values[idx[ok] + self.half]
        return out

    def l1(self):
        return float(np.abs(self.values).sum())


def _bessel_row_certified(x, eps, tol):
    n, bound = _window(x, eps, tol.max_terms)
    return _Row(n, bessel_row(x, n), bound)


def _gen_row(gamma, beta, eps, tol):
    """Generalized Bessel row built by a dilated convolution of two Bessel rows."""
    a = _bessel_row_certified(gamma, eps / 2.0, tol)
    b = _bessel_row_certified(beta, eps / 2.0, tol)
    up = np.zeros(4 * b.half + 1)
    up[::2] = b.values
    vals = np.convolve(a.values, up)
    return _Row(a.half + 2 * b.half, vals, a.err + b.err)


def gen_bessel_row(gamma, beta, tol=DEFAULT_TOL):
    """All non-negligible generalized Bessel values ``J_r(gamma, beta)``.

    Returns ``(half, values, err)`` where ``values[r + half]`` approximates
    ``J_r(gamma, beta)`` for ``|r| <= half``; values outside the row are below
    ``err`` in magnitude.
    """
    row = _gen_row(float(gamma), float(beta), tol.eps, tol)
    return row.half, row.values, row.err


def gen_bessel(r, gamma, beta, tol=DEFAULT_TOL):
    """Generalized Bessel function ``J_r(gamma, beta)``.

    Parameters
    ----------
    r : int
        Index.
    gamma, beta : float
        Signed linear and quadratic arguments.
    tol : Tolerance
        Requested accuracy; the neglected tail of the defining series is
        certified below ``tol.eps``.

    Raises
    ------
    AccuracyError
        If the truncation window would exceed ``tol.max_terms``.
    """
    r = int(r)
    a = _bessel_row_certified(gamma, tol.eps / 2.0, tol)
    b = _bessel_row_certified(beta, tol.eps / 2.0, tol)
    m = np.arange(-b.half, b.half + 1)
    return float(np.dot(a.lookup(r - 2 * m), b.values))


# ---------------------------------------------------------------------------
# Double series shared by I_{rr'} and J_{r1 r2}
# ---------------------------------------------------------------------------

class DoubleSeries:
    """Evaluator for sums of the form

        S(c1, c2) = sum_{j, j'} U_j V_j' P_{c1 - j - j'} Q_{c2 - j + j'}

    Both two-wave functions share this shape: for ``I_{rr'}`` the summed
    rows are Bessel rows of ``alpha_+`` / ``alpha_-`` and the looked-up rows
    are generalized Bessel rows; for ``J_{r1 r2}`` the summed rows are
    Bessel rows of ``beta_1`` / ``beta_2`` and the looked-up rows are Bessel
    rows of ``alpha_+`` / ``alpha_-``.

    Build one with :meth:`two_wave` or :meth:`interference` and evaluate
    many cells without rebuilding the rows.
    """

    def __init__(self, u, v, p, q):
        self.u, self.v, self.p, self.q = u, v, p, q
        j = np.arange(-u.half, u.half + 1)[:, None]
        jp = np.arange(-v.half, v.half + 1)[None, :]
        self._shift_p = (j + jp).ravel()
        self._shift_q = (j - jp).ravel()
        self._weights = (u.values[:, None] * v.values[None, :]).ravel()
        su, sv = u.l1(), v.l1()
        self.error_bound = (u.err + v.err
                            + su * sv * (p.err * (1.0 + q.err) + q.err)
                            + 8.0 * _EPS_MACHINE * self._weights.size)

    @classmethod
    def two_wave(cls, args, tol=DEFAULT_TOL):
        eps = tol.eps
        u = _bessel_row_certified(args.alpha_plus, eps / 4.0, tol)
        v = _bessel_row_certified(args.alpha_minus, eps / 4.0, tol)
        eps_g = eps / (4.0 * max(u.l1() * v.l1(), 1.0))
        p = _gen_row(args.gamma1, args.beta1, eps_g, tol)
        q = _gen_row(args.gamma2, args.beta2, eps_g, tol)
        return cls(u, v, p, q)

    @classmethod
    def interference(cls, beta1, beta2, alpha_plus, alpha_minus, tol=DEFAULT_TOL):
        eps = tol.eps
        u = _bessel_row_certified(beta1, eps / 4.0, tol)
        v = _bessel_row_certified(beta2, eps / 4.0, tol)
        eps_a = eps / (4.0 * max(u.l1() * v.l1(), 1.0))
        p = _bessel_row_certified(alpha_plus, eps_a, tol)
        q = _bessel_row_certified(alpha_minus, eps_a, tol)
        return cls(u, v, p, q)

    @property
    def reach(self):
        """Largest |c1|, |c2| at which the sum can be non-negligible."""
        return (self.p.half + self.u.half + self.v.half,
                self.q.half + self.u.half + self.v.half)

    def __call__(self, c1, c2):
        terms = (self.p.lookup(int(c1) - self._shift_p)
                 * self.q.lookup(int(c2) - self._shift_q) * self._weights)
        return float(terms.sum())

    def batch(self, c1, c2):
        """Vectorized evaluation over equal-length integer arrays."""
        c1 = np.asarray(c1, dtype=np.int64)
        c2 = np.asarray(c2, dtype=np.int64)
        out = np.empty(c1.shape, dtype=float)
        # chunking keeps the (cells x terms) scratch array bounded; each
        # cell is reduced independently, so results do not depend on chunks
        step = max(1, 2_000_000 // max(self._weights.size, 1))
        flat1, flat2, flat_out = c1.ravel(), c2.ravel(), out.ravel()
        for s in range(0, flat1.size, step):
            a = flat1[s:s + step, None] - self._shift_p[None, :]
            b = flat2[s:s + step, None] - self._shift_q[None, :]
            terms = self.p.lookup(a) * self.q.lookup(b) * self._weights[None, :]
            flat_out[s:s + step] = terms.sum(axis=1)
        return out


def two_wave_I(r, rp, args, tol=DEFAULT_TOL):
    """Two-wave multiphoton function ``I_{r r'}(gamma1, beta1; gamma2, beta2; alpha+, alpha-)``.

    Evaluated by the double series over Bessel functions of the interference
    arguments with generalized Bessel functions of each wave; the neglected
    terms are certified below ``tol.eps``.
    """
    return DoubleSeries.two_wave(args, tol)(r, rp)


def interference_J(r1, r2, beta1, beta2, alpha_plus, alpha_minus, tol=DEFAULT_TOL):
    """Interference-range function ``J_{r1 r2}(beta1, beta2; alpha+, alpha-)``.

    Summed directly in its own series (over Bessel functions of the
    quadratic arguments), which makes it an independent route to
    ``I_{r1+r2, r1-r2}(0, beta1; 0, beta2; alpha+, alpha-)``.
    """
    return DoubleSeries.interference(beta1, beta2, alpha_plus, alpha_minus, tol)(r1, r2)


# ---------------------------------------------------------------------------
# Coefficient functions
# ---------------------------------------------------------------------------

def coeff_D(r, rp, args, eta1, eta2, pol1, pol2, tol=DEFAULT_TOL):
    """In-plane vector ``D_{rr'}`` (spatial 2-vector; time and z parts vanish)."""
    series = DoubleSeries.two_wave(args, tol)
    pol1 = np.asarray(pol1, dtype=float)
    pol2 = np.asarray(pol2, dtype=float)
    c1 = series(r + 1, rp) + series(r - 1, rp)
    c2 = series(r, rp + 1) + series(r, rp - 1)
    return pol1 * eta1 * c1 + pol2 * eta2 * c2


def coeff_B(r, rp, args, eta1, eta2, delta, tol=DEFAULT_TOL):
    """Scalar coefficient ``B_{rr'}``; the cross term carries ``cos(delta)``."""
    f = DoubleSeries.two_wave(args, tol)
    b = eta1 ** 2 * (f(r + 2, rp) + f(r - 2, rp) + 2.0 * f(r, rp))
    b += eta2 ** 2 * (f(r, rp + 2) + f(r, rp - 2) + 2.0 * f(r, rp))
    cross = f(r - 1, rp - 1) + f(r + 1, rp + 1) + f(r - 1, rp + 1) + f(r + 1, rp - 1)
    return b + 2.0 * eta1 * eta2 * cross * math.cos(delta)


_INTERFERENCE_KINDS = ("B_prime", "D_doubleprime", "B_prime_single", "D_doubleprime_single")


def coeff_interference(kind, s1, s2, beta1, beta2, alpha_plus, alpha_minus,
                       eta1, eta2, tol=DEFAULT_TOL):
    """Interference-range coefficients ``B'``, ``D''`` and their single-wave forms.

    Both polarizations lie along ``e_x`` in the interference geometry, so
    the ``D`` kinds return ``(value, 0)``.  The single-wave kinds ignore
    ``s2``, ``beta2`` and ``alpha_pm`` and require ``eta2 == 0``.
    """
    if kind not in _INTERFERENCE_KINDS:
        raise ValueError(f"unknown coefficient kind {kind!r}")
    s1, s2 = int(s1), int(s2)
    if kind.endswith("_single"):
        if eta2 != 0:
            raise ValueError("single-wave coefficients require eta2 == 0")
        row = _bessel_row_certified(beta1, tol.eps, tol)

        def j1(n):
            return float(row.lookup(np.array([n]))[0])

        if kind == "B_prime_single":
            return eta1 ** 2 * (j1(s1 + 1) + j1(s1 - 1) + 2.0 * j1(s1))
        return np.array([eta1 * (j1(s1) + j1(s1 - 1)), 0.0])

    f = DoubleSeries.interference(beta1, beta2, alpha_plus, alpha_minus, tol)
    if kind == "B_prime":
        b = eta1 ** 2 * (f(s1 + 1, s2 + 1) + f(s1 - 1, s2 - 1) + 2.0 * f(s1, s2))
        b += eta2 ** 2 * (f(s1 + 1, s2 - 1) + f(s1 - 1, s2 + 1) + 2.0 * f(s1, s2))
        b += 2.0 * eta1 * eta2 * (f(s1 - 1, s2) + f(s1 + 1, s2)
                                  + f(s1, s2 + 1) + f(s1, s2 - 1))
        return b
    d = eta1 * (f(s1, s2) + f(s1 - 1, s2 - 1)) + eta2 * (f(s1, s2 - 1) + f(s1 - 1, s2))
    return np.array([d, 0.0])


# ---------------------------------------------------------------------------
# Quadrature oracles
# ---------------------------------------------------------------------------

def _node_count(total):
    n = 64 * (1 + math.ceil(total))
    return n + n % 2


def oracle_gen_bessel(r, gamma, beta, threshold=1e-12, max_doublings=4):
    """``J_r(gamma, beta)`` as the Fourier coefficient

        (1/2pi) int_{-pi}^{pi} exp(i[gamma sin t + beta sin 2t - r t]) dt

    by the periodic trapezoid rule, refined until the estimates on ``N`` and
    ``N/2`` nodes agree within ``threshold``.
    """
    n = _node_count(abs(gamma) + abs(beta) + abs(r) / 8.0)
    for _ in range(max_doublings + 1):
        t = -np.pi + 2.0 * np.pi * np.arange(n) / n
        z = np.exp(1j * (gamma * np.sin(t) + beta * np.sin(2.0 * t) - r * t))
        full = z.mean()
        half = z[::2].mean()
        if abs(full - half) < threshold:
            break
        n *= 2
    else:
        raise RepresentationError(f"trapezoid rule did not settle (diff {abs(full - half):.2e})")
    if abs(full.imag) > threshold:
        raise RepresentationError(f"imaginary residual {full.imag:.3e} in J_{r}({gamma}, {beta})")
    return float(full.real)


def oracle_two_wave_I(r, rp, args, threshold=1e-10, max_doublings=2, chunk=256):
    """``I_{rr'}`` as a double Fourier coefficient of ``exp(i f(phi1, phi2))`` with

        f = g1 sin p1 + b1 sin 2p1 + g2 sin p2 + b2 sin 2p2
            + a+ sin(p1 + p2) + a- sin(p1 - p2),

    by the tensor-product trapezoid rule.  The half-grid estimate comes from
    the even nodes of the same pass.
    """
    g1, b1, g2, b2, ap, am = args.as_tuple()
    n = _node_count(args.magnitude() + (abs(r) + abs(rp)) / 8.0)
    for _ in range(max_doublings + 1):
        t = -np.pi + 2.0 * np.pi * np.arange(n) / n
        s, c = np.sin(t), np.cos(t)
        ph1 = g1 * s + b1 * np.sin(2.0 * t) - r * t
        ph2 = g2 * s + b2 * np.sin(2.0 * t) - rp * t
        even = np.arange(n) % 2 == 0
        total = 0.0 + 0.0j
        total_half = 0.0 + 0.0j
        for i0 in range(0, n, chunk):
            sl = slice(i0, min(i0 + chunk, n))
            phase = (ph1[sl, None] + ph2[None, :]
                     + (ap + am) * s[sl, None] * c[None, :]
                     + (ap - am) * c[sl, None] * s[None, :])
            z = np.exp(1j * phase)
            total += z.sum()
            total_half += z[even[sl]][:, even].sum()
        full = total / n ** 2
        half = total_half / (n // 2) ** 2
        if abs(full - half) < threshold:
            break
        n *= 2
    else:
        raise RepresentationError(f"trapezoid rule did not settle (diff {abs(full - half):.2e})")
    if abs(full.imag) > threshold:
        raise RepresentationError(f"imaginary residual {full.imag:.3e} in I_{r},{rp}")
    return float(full.real)
