"""Four-vectors, laser-dressed electron kinematics and emission geometry.

Relativistic units (hbar = c = 1) throughout; energies are usually measured
in units of the electron mass so that ``m = 1``.  Both waves propagate
along +z, so every wave four-momentum is ``omega * (1, 0, 0, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FourVector",
    "WaveConfig",
    "ScatteringKinematics",
    "KinematicsError",
    "mdot",
    "intensity_param",
    "effective_mass",
    "quasimomentum",
    "momenta_bookkeeping",
    "geometry_angles",
    "plane_angle",
    "polarization_angle",
]

BOOKKEEPING_MODES = ("general", "moderate", "interference_integer", "interference_half")


class KinematicsError(ValueError):
    """Degenerate or unphysical kinematics."""


@dataclass(frozen=True)
class FourVector:
    """Contravariant four-vector (t, x, y, z) under the (+, -, -, -) metric."""

    t: float
    x: float
    y: float
    z: float

    @classmethod
    def from_array(cls, a):
        t, x, y, z = (float(v) for v in a)
        return cls(t, x, y, z)

    @classmethod
    def on_shell(cls, momentum, m=1.0):
        """Four-momentum of a particle of mass ``m`` with spatial momentum ``momentum``."""
        px, py, pz = (float(v) for v in momentum)
        return cls(math.sqrt(m * m + px * px + py * py + pz * pz), px, py, pz)

    @classmethod
    def lightlike(cls, omega, direction=(0.0, 0.0, 1.0)):
        n = np.asarray(direction, dtype=float)
        n = n / np.linalg.norm(n)
        return cls(float(omega), *(float(omega) * n))

    def __add__(self, other):
        return FourVector(self.t + other.t, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other):
        return FourVector(self.t - other.t, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self):
        return FourVector(-self.t, -self.x, -self.y, -self.z)

    def __mul__(self, c):
        return FourVector(c * self.t, c * self.x, c * self.y, c * self.z)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return FourVector(self.t / c, self.x / c, self.y / c, self.z / c)

    @property
    def spatial(self):
        return np.array([self.x, self.y, self.z])

    @property
    def p(self):
        """Magnitude of the spatial part."""
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_array(self):
        return np.array([self.t, self.x, self.y, self.z])


def mdot(a, b):
    """Minkowski product ``a.t*b.t - a.x*b.x - a.y*b.y - a.z*b.z``."""
    return a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z


@dataclass(frozen=True)
class WaveConfig:
    """One linearly polarized wave travelling along +z.

    Attributes
    ----------
    omega : float
        Frequency (units of the electron mass when ``m = 1``).
    eta : float
        Dimensionless intensity ``e F / (m omega)``.
    pol : tuple of float
        Unit polarization direction in the xy-plane.
    """

    omega: float
    eta: float = 0.0
    pol: tuple = (1.0, 0.0)

    def __post_init__(self):
        pol = tuple(float(v) for v in self.pol)
        object.__setattr__(self, "pol", pol)
        if len(pol) != 2:
            raise ValueError("pol must be a 2-vector in the xy-plane")
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")
        if not self.eta >= 0:
            raise ValueError(f"eta must be nonnegative, got {self.eta!r}")
        if abs(math.hypot(*pol) - 1.0) > 1e-12:
            raise ValueError(f"pol must have unit length, |pol| = {math.hypot(*pol)!r}")

    @property
    def k(self):
        return FourVector(self.omega, 0.0, 0.0, self.omega)

    @property
    def pol4(self):
        """Polarization four-vector ``(0, e_x, e_y, 0)``."""
        return FourVector(0.0, self.pol[0], self.pol[1], 0.0)

    def field_strength(self, m=1.0, e_charge=1.0):
        return m * self.omega * self.eta / e_charge


def polarization_angle(w1, w2):
    """Angle between the two polarization directions, in [0, pi]."""
    c = w1.pol[0] * w2.pol[0] + w1.pol[1] * w2.pol[1]
    s = w1.pol[0] * w2.pol[1] - w1.pol[1] * w2.pol[0]
    return abs(math.atan2(s, c))


def intensity_param(field_strength, omega, m=1.0, e_charge=1.0):
    """Classical intensity parameter ``eta = e F / (m omega)``."""
    if not omega > 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    if not m > 0:
        raise ValueError(f"m must be positive, got {m!r}")
    return e_charge * field_strength / (m * omega)


def effective_mass(m, eta1, eta2):
    """Electron mass dressed by both waves: ``m sqrt(1 + eta1^2/2 + eta2^2/2)``."""
    return m * math.sqrt(1.0 + 0.5 * eta1 * eta1 + 0.5 * eta2 * eta2)


def quasimomentum(p, k1, eta1, eta2, m=1.0):
    """Quasimomentum ``p + m^2 (eta1^2 + eta2^2) / (4 k1.p) * k1``.

    Both waves share the propagation direction, so the shift can be written
    along ``k1`` alone.
    """
    kp = mdot(k1, p)
    if kp == 0.0:
        raise KinematicsError("k1.p vanishes; quasimomentum undefined")
    return p + (m * m * (eta1 * eta1 + eta2 * eta2) / (4.0 * kp)) * k1


@dataclass(frozen=True)
class ScatteringKinematics:
    """Electron momenta before/after scattering and the emitted photon.

    On construction the electron momenta must be on shell within 1e-8
    relative and the photon momentum lightlike; nothing is renormalized.
    """

    p_i: FourVector
    p_f: FourVector
    k_prime: FourVector
    m: float = 1.0

    def __post_init__(self):
        m2 = self.m * self.m
        for name in ("p_i", "p_f"):
            p = getattr(self, name)
            if abs(mdot(p, p) - m2) > 1e-8 * max(m2, p.t * p.t):
                raise KinematicsError(
                    f"{name} is off shell: p^2 = {mdot(p, p)!r}, m^2 = {m2!r}")
            if p.t <= 0:
                raise KinematicsError(f"{name} must have positive energy")
        k = self.k_prime
        if abs(mdot(k, k)) > 1e-12 * max(1.0, k.t * k.t):
            raise KinematicsError(f"k_prime is not lightlike: k^2 = {mdot(k, k)!r}")
        if k.t < 0:
            raise KinematicsError("k_prime must have nonnegative energy")

    @property
    def v_i(self):
        return self.p_i.p / self.p_i.t

    @property
    def v_f(self):
        return self.p_f.p / self.p_f.t

    def quasimomenta(self, waves):
        """``(p~_i, p~_f)`` in the field of ``waves``."""
        w1, w2 = waves
        return (quasimomentum(self.p_i, w1.k, w1.eta, w2.eta, self.m),
                quasimomentum(self.p_f, w1.k, w1.eta, w2.eta, self.m))

    def m_star(self, waves):
        w1, w2 = waves
        return effective_mass(self.m, w1.eta, w2.eta)


def momenta_bookkeeping(kin, waves, l, s, mode="general"):
    """Transferred and intermediate four-momenta ``(q, q_i, q_f)``.

    Parameters
    ----------
    kin : ScatteringKinematics
    waves : pair of WaveConfig
    l, s : int
        Photon numbers of wave 1 and wave 2.  In the interference modes they
        are read as the combination-photon counts ``(l1, l2)``; the
        intermediate momenta are evaluated at the same indices.
    mode : {'general', 'moderate', 'interference_integer', 'interference_half'}
        'moderate' drops the field dressing and the photon-number terms.
    """
    if mode not in BOOKKEEPING_MODES:
        raise ValueError(f"unknown bookkeeping mode {mode!r}")
    k1, k2 = waves[0].k, waves[1].k
    kp = kin.k_prime
    if mode == "moderate":
        return kin.p_f - kin.p_i + kp, kin.p_i - kp, kin.p_f + kp
    pti, ptf = kin.quasimomenta(waves)
    if mode == "general":
        shift = l * k1 + s * k2
        return ptf - pti + kp + shift, pti - kp - shift, ptf + kp + shift
    # combination photons carry k1 + k2 and k1 - k2; the transferred momentum
    # enters with -k' in the interference-range bookkeeping
    half = 0.0 if mode == "interference_integer" else 0.5
    shift = (l - half) * (k1 + k2) + (s - half) * (k1 - k2)
    return ptf - pti - kp + shift, pti - kp - shift, ptf + kp + shift


def plane_angle(a, b, axis):
    """Angle in [0, pi/2] between ``axis`` and the plane spanned by ``a`` and ``b``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    axis = np.asarray(axis, dtype=float)
    n = np.cross(a, b)
    nn = np.linalg.norm(n)
    if nn <= 1e-14 * np.linalg.norm(a) * np.linalg.norm(b):
        raise KinematicsError("vectors are parallel; plane undefined")
    axis = axis / np.linalg.norm(axis)
    normal_part = abs(float(np.dot(n / nn, axis)))
    in_plane = math.sqrt(max(0.0, 1.0 - normal_part * normal_part))
    return math.atan2(normal_part, in_plane)


def geometry_angles(kin, e_x=(1.0, 0.0)):
    """Angles ``(phi, psi)`` between ``e_x`` and the planes (p_i, p_f) and (p_i, k').

    Both are folded into [0, pi/2]; only their distance from pi/2 matters
    for the regime inequalities.
    """
    axis = (float(e_x[0]), float(e_x[1]), 0.0)
    phi = plane_angle(kin.p_i.spatial, kin.p_f.spatial, axis)
    psi = plane_angle(kin.p_i.spatial, kin.k_prime.spatial, axis)
    return phi, psi
