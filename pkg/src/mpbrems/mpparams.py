"""Multiphoton parameters and kinematic/field regime classification.

The quantum parameters are kept signed: the linear (Bunkin-Fedorov)
parameters ``gamma_j``, the quadratic parameters ``beta_j`` and the
interference parameters ``alpha_+-``.  Their magnitudes are what the
regime inequalities compare; the signs matter for the special functions.

The "much less than" and "much greater than" relations used when
classifying a scenario are made operational with factors 0.1 and 10
respectively.  Borderline cases are reported as ``intermediate`` rather
than being forced into either class.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from .mpbessel import TwoWaveArgs
from .relkin import KinematicsError, geometry_angles, mdot

__all__ = [
    "MultiphotonParams",
    "ClassicalParams",
    "Diagnostic",
    "RegimeReport",
    "SingularCombinationError",
    "bf_gamma",
    "beta_param",
    "alpha_pm",
    "classical_params",
    "multiphoton_params",
    "estimate_orders",
    "classify_regime",
]

MUCH_LESS = 0.1
MUCH_GREATER = 10.0
ALPHA_NEGLIGIBLE = 1e-3
# with omega1 > omega2 the relative detuning stays below 1; "not close"
# frequencies are taken to differ by at least a factor of two
SEPARATED = 0.5


class SingularCombinationError(KinematicsError):
    """``alpha_-`` requested for waves of equal frequency."""


@dataclass(frozen=True)
class MultiphotonParams:
    gamma1: float = 0.0
    gamma2: float = 0.0
    beta1: float = 0.0
    beta2: float = 0.0
    alpha_plus: float = 0.0
    alpha_minus: float = 0.0
    xi1: float = 0.0
    xi2: float = 0.0
    zeta_i: float = 0.0
    zeta_f: float = 0.0
    equal_frequency: bool = False

    def __post_init__(self):
        for k, v in asdict(self).items():
            if k != "equal_frequency" and not math.isfinite(v):
                raise ValueError(f"{k} must be finite")
        if min(self.xi1, self.xi2, self.zeta_i, self.zeta_f) < 0:
            raise ValueError("classical parameters must be nonnegative")

    @property
    def args(self):
        """Argument tuple for the two-wave functions."""
        return TwoWaveArgs(self.gamma1, self.beta1, self.gamma2, self.beta2,
                           self.alpha_plus, self.alpha_minus)

    def max_argument(self):
        return self.args.magnitude()

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ClassicalParams:
    xi1_i: float
    xi2_i: float
    xi1_f: float
    xi2_f: float
    zeta_i: float
    zeta_f: float

    @property
    def xi1(self):
        return max(self.xi1_i, self.xi1_f)

    @property
    def xi2(self):
        return max(self.xi2_i, self.xi2_f)


def _kdot(k, p):
    kp = mdot(k, p)
    if kp == 0.0:
        raise KinematicsError("k.p vanishes; multiphoton parameter undefined")
    return kp


def bf_gamma(j, p1, p2, wave, m=1.0):
    """Signed Bunkin-Fedorov parameter ``m eta_j (e_j . g_j)`` (Minkowski product).

    ``g_j = p2 / (k_j p2) - p1 / (k_j p1)``.  Since ``e_j`` is purely
    spatial, the product equals minus the spatial dot product.  ``j`` only
    labels the wave and is not used in the arithmetic.
    """
    del j
    k = wave.k
    g = p2 / _kdot(k, p2) - p1 / _kdot(k, p1)
    return m * wave.eta * mdot(wave.pol4, g)


def beta_param(j, p1, p2, wave, m=1.0):
    """Signed quadratic parameter ``eta_j^2 m^2 [1/(k_j p2) - 1/(k_j p1)] / 8``."""
    del j
    k = wave.k
    return wave.eta ** 2 * m * m * (1.0 / _kdot(k, p2) - 1.0 / _kdot(k, p1)) / 8.0


def alpha_pm(sign, p1, p2, waves, m=1.0):
    """Signed interference parameter ``alpha_+`` or ``alpha_-``.

    alpha_+- = (eta1 eta2 m^2 cos(Delta) / 2) [1/((k1 +- k2) p2) - 1/((k1 +- k2) p1)]

    Raises
    ------
    SingularCombinationError
        For ``sign='minus'`` when both waves have the same frequency.
    """
    w1, w2 = waves
    if sign == "plus":
        k = w1.k + w2.k
    elif sign == "minus":
        if w1.omega == w2.omega:
            raise SingularCombinationError(
                "alpha_minus is singular for equal frequencies; the waves collapse to one")
        k = w1.k - w2.k
    else:
        raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
    cos_delta = w1.pol[0] * w2.pol[0] + w1.pol[1] * w2.pol[1]
    pref = w1.eta * w2.eta * m * m * cos_delta / 2.0
    if pref == 0.0:
        return 0.0
    return pref * (1.0 / _kdot(k, p2) - 1.0 / _kdot(k, p1))


def classical_params(kin, waves, m=None):
    """Classical field parameters ``xi_j = eta_j m / |p|`` and ``zeta = xi1 xi2 |p| / E``.

    Evaluated for the initial and the final electron state.  ``m`` defaults
    to the mass stored in ``kin``.
    """
    w1, w2 = waves
    m = kin.m if m is None else m
    out = {}
    for tag, p in (("i", kin.p_i), ("f", kin.p_f)):
        pm = p.p
        if pm == 0.0:
            raise KinematicsError(f"zero spatial momentum in state {tag}")
        x1 = w1.eta * m / pm
        x2 = w2.eta * m / pm
        out[f"xi1_{tag}"] = x1
        out[f"xi2_{tag}"] = x2
        out[f"zeta_{tag}"] = x1 * x2 * pm / p.t
    return ClassicalParams(**out)


def multiphoton_params(kin, waves, momenta="bare"):
    """All multiphoton parameters for a scenario.

    ``momenta='bare'`` evaluates the quantum parameters with the free
    momenta (moderate-field regimes); ``'quasi'`` uses the quasimomenta.
    For equal frequencies ``alpha_minus`` is undefined and stored as 0 with
    ``equal_frequency=True``.
    """
    if momenta == "bare":
        p1, p2 = kin.p_i, kin.p_f
    elif momenta == "quasi":
        p1, p2 = kin.quasimomenta(waves)
    else:
        raise ValueError(f"momenta must be 'bare' or 'quasi', got {momenta!r}")
    w1, w2 = waves
    m = kin.m
    equal = w1.omega == w2.omega
    cl = classical_params(kin, waves)
    return MultiphotonParams(
        gamma1=bf_gamma(1, p1, p2, w1, m),
        gamma2=bf_gamma(2, p1, p2, w2, m),
        beta1=beta_param(1, p1, p2, w1, m),
        beta2=beta_param(2, p1, p2, w2, m),
        alpha_plus=alpha_pm("plus", p1, p2, waves, m),
        alpha_minus=0.0 if equal else alpha_pm("minus", p1, p2, waves, m),
        xi1=cl.xi1,
        xi2=cl.xi2,
        zeta_i=cl.zeta_i,
        zeta_f=cl.zeta_f,
        equal_frequency=equal,
    )


def estimate_orders(params, kin, waves):
    """Order-of-magnitude estimates of the quantum parameters next to the exact values.

    Estimates: ``gamma_j ~ eta_j m v / omega_j``, ``beta_j ~ gamma_j xi_j`` and
    ``alpha ~ gamma_1 xi_2 ~ gamma_2 xi_1`` with ``v`` the initial speed.
    ``geometry_suppressed_j`` flags an exact ``gamma_j`` that is a thousand
    times below its estimate, as happens in the interference geometry.
    """
    w1, w2 = waves
    v = kin.v_i
    g_est = [w.eta * kin.m * v / w.omega for w in (w1, w2)]
    xi = [params.xi1, params.xi2]
    est = {
        "gamma1": g_est[0],
        "gamma2": g_est[1],
        "beta1": g_est[0] * xi[0],
        "beta2": g_est[1] * xi[1],
        "alpha_plus": max(g_est[0] * xi[1], g_est[1] * xi[0]),
        "alpha_minus": max(g_est[0] * xi[1], g_est[1] * xi[0]),
    }
    record = {}
    for name, e in est.items():
        exact = abs(getattr(params, name))
        record[name] = {
            "exact": exact,
            "estimate": e,
            "ratio": exact / e if e > 0 else (0.0 if exact == 0 else math.inf),
        }
    for j in (1, 2):
        e = est[f"gamma{j}"]
        record[f"geometry_suppressed_{j}"] = bool(
            e > 0 and abs(getattr(params, f"gamma{j}")) < 1e-3 * e)
    return record


@dataclass(frozen=True)
class Diagnostic:
    """One inequality: ``left`` and ``right`` are its two sides as written;
    ``satisfied`` applies the 0.1 / 10 factors for strong inequalities."""

    label: str
    left: float
    right: float
    satisfied: bool


@dataclass
class RegimeReport:
    kinematic: str
    field_regime: str
    frequency_status: str
    diagnostics: list = field(default_factory=list)
    phi: float = math.nan
    psi: float = math.nan
    params: MultiphotonParams | None = None
    params_bare: MultiphotonParams | None = None
    justification: dict = field(default_factory=dict)

    def rows(self, prefix):
        return [d for d in self.diagnostics if d.label.startswith(prefix)]

    def to_dict(self):
        return {
            "kinematic": self.kinematic,
            "field_regime": self.field_regime,
            "frequency_status": self.frequency_status,
            "phi": self.phi,
            "psi": self.psi,
            "params": self.params.to_dict() if self.params else None,
            "params_bare": self.params_bare.to_dict() if self.params_bare else None,
            "justification": self.justification,
            "diagnostics": [asdict(d) for d in self.diagnostics],
        }


def _relativistic(p, m):
    return p.t - m >= m


def classify_regime(kin, waves, m=None):
    """Evaluate every regime inequality numerically and classify the scenario.

    Returns
    -------
    RegimeReport
        ``kinematic`` is 'interference', 'noninterference' or
        'intermediate'; ``field_regime`` one of 'moderate_noninterference',
        'dipole_like', 'moderate_interference', 'strong', 'outside';
        ``frequency_status`` one of 'collapses_to_single_wave',
        'well_separated', 'intermediate'.  Each row of ``diagnostics`` holds
        an inequality label with its left and right sides.  ``params``
        holds the quasimomentum parameters and ``params_bare`` the values
        with free momenta.
    """
    w1, w2 = waves
    m = kin.m if m is None else m
    diags = []

    def row(label, left, right, ok):
        d = Diagnostic(label, float(left), float(right), bool(ok))
        diags.append(d)
        return d.satisfied

    params = multiphoton_params(kin, waves, "quasi")
    bare = multiphoton_params(kin, waves, "bare")
    cl = classical_params(kin, waves, m)
    v_i = kin.v_i

    # --- kinematic range: angles against the field-dependent scale
    phi, psi = geometry_angles(kin, w1.pol)
    scales = [w.omega / (m * v_i * w.eta) for w in (w1, w2) if w.eta > 0 and v_i > 0]
    scale = min(scales) if scales else math.inf
    dphi, dpsi = abs(phi - math.pi / 2), abs(psi - math.pi / 2)
    row("interference_range: omega/(m v_i eta) <= 1", scale, 1.0, scale <= 1.0)
    int_phi = row("interference_range: |phi - pi/2| << omega/(m v_i eta)", dphi, scale,
                  dphi < MUCH_LESS * scale)
    int_psi = row("interference_range: |psi - pi/2| << omega/(m v_i eta)", dpsi, scale,
                  dpsi < MUCH_LESS * scale)
    non_phi = row("noninterference_range: |phi - pi/2| >> omega/(m v_i eta)", dphi, scale,
                  dphi >= MUCH_GREATER * scale)
    non_psi = row("noninterference_range: |psi - pi/2| >> omega/(m v_i eta)", dpsi, scale,
                  dpsi >= MUCH_GREATER * scale)
    a_max = max(abs(params.alpha_plus), abs(params.alpha_minus))
    alpha_ok = row("interference_alpha: max|alpha_pm| not negligible", a_max, ALPHA_NEGLIGIBLE,
                   a_max > ALPHA_NEGLIGIBLE)
    if int_phi and int_psi and alpha_ok:
        kinematic = "interference"
        kin_just = ["interference_range", "interference_alpha"]
    elif non_phi and non_psi:
        kinematic = "noninterference"
        kin_just = ["noninterference_range"]
    else:
        kinematic = "intermediate"
        kin_just = ["interference_range", "noninterference_range"]

    # --- field strength
    xis = {"xi1_i": cl.xi1_i, "xi2_i": cl.xi2_i, "xi1_f": cl.xi1_f, "xi2_f": cl.xi2_f}
    moderate = all([row(f"moderate_field: {k} << 1", v, 1.0, v <= MUCH_LESS)
                    for k, v in xis.items()])
    products = {
        f"gamma{j}*xi{k}": abs(getattr(params, f"gamma{j}")) * getattr(cl, f"xi{k}")
        for j in (1, 2) for k in (1, 2)
    }
    dipole = all([row(f"dipole_like: {k} << 1", v, 1.0, v <= MUCH_LESS)
                  for k, v in products.items()])
    strong = all([row(f"strong_field: {k} ~ 1", v, 1.0, MUCH_LESS <= v <= MUCH_GREATER)
                  for k, v in products.items()])
    weak_product = all([row(f"interference_field: zeta_{t} << 1", z, 1.0, z <= MUCH_LESS)
                        for t, z in (("i", cl.zeta_i), ("f", cl.zeta_f))])

    if kinematic == "interference":
        field_regime = "moderate_interference" if weak_product else "outside"
        f_just = ["interference_field"]
    elif dipole:
        field_regime, f_just = "dipole_like", ["dipole_like"]
    elif moderate and strong:
        field_regime, f_just = "strong", ["moderate_field", "strong_field"]
    elif moderate:
        field_regime, f_just = "moderate_noninterference", ["moderate_field"]
    else:
        field_regime, f_just = "outside", ["moderate_field", "dipole_like", "interference_field"]

    # --- frequencies
    ratio = abs(w2.omega - w1.omega) / w1.omega
    collapses = row("frequency_collapse: |d omega|/omega1 << 1", ratio, 1.0, ratio <= MUCH_LESS)
    separated = row("frequency_separation: |d omega|/omega1 >= 1", ratio, 1.0, ratio >= SEPARATED)
    row("frequency_bound: omega1 > omega2", w1.omega, w2.omega, w1.omega > w2.omega)
    bound = m if _relativistic(kin.p_i, m) else m * v_i * v_i / 2.0
    for j, w in ((1, w1), (2, w2)):
        row(f"frequency_bound: omega{j} <= frequency bound", w.omega, bound, w.omega <= bound)
    if collapses:
        frequency_status = "collapses_to_single_wave"
    elif separated:
        frequency_status = "well_separated"
    else:
        frequency_status = "intermediate"

    return RegimeReport(
        kinematic=kinematic,
        field_regime=field_regime,
        frequency_status=frequency_status,
        diagnostics=diags,
        phi=phi,
        psi=psi,
        params=params,
        params_bare=bare,
        justification={"kinematic": kin_just, "field_regime": f_just,
                       "frequency_status": ["frequency_collapse", "frequency_separation"]},
    )

