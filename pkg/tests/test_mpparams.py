import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpbrems.mpparams import (MultiphotonParams, SingularCombinationError, alpha_pm,
                              beta_param, bf_gamma, classical_params, classify_regime,
                              estimate_orders, multiphoton_params)
from mpbrems.relkin import FourVector, KinematicsError, ScatteringKinematics, WaveConfig, mdot

OPTICAL = 2e-6  # ~1 eV in units of m


def _kin(pi, pf, kdir=None):
    p_i = FourVector.on_shell(pi)
    p_f = FourVector.on_shell(pf)
    kdir = kdir if kdir is not None else np.asarray(pi) + np.asarray(pf)
    w = p_i.t - p_f.t
    return ScatteringKinematics(p_i, p_f, FourVector.lightlike(abs(w) if w else 1e-3, kdir))


def _interference_kin():
    return _kin((0.0, 0.3, 0.4), (0.0, -0.2, 0.35), (0.0, 1.0, 1.0))


def test_bf_gamma_hand_value():
    # p1 = (E, 0, 0, pz), p2 = (E, px, 0, 0), wave along z polarized along x
    E, pz = math.sqrt(1 + 0.25), 0.5
    p1 = FourVector(E, 0.0, 0.0, pz)
    p2 = FourVector(E, 0.5, 0.0, 0.0)
    w = WaveConfig(0.1, 0.2, (1.0, 0.0))
    # e.g = -(px / (k p2)) with k p2 = omega E
    expected = 0.2 * (-(0.5 / (0.1 * E)))
    assert bf_gamma(1, p1, p2, w) == pytest.approx(expected, rel=1e-14)


def test_bf_gamma_zero_cases():
    p = FourVector.on_shell((0.1, 0.2, 0.3))
    w = WaveConfig(0.1, 0.5)
    assert bf_gamma(1, p, p, w) == 0.0
    p1 = FourVector.on_shell((0.0, 0.2, 0.3))
    p2 = FourVector.on_shell((0.0, -0.4, 0.1))
    assert bf_gamma(1, p1, p2, w) == 0.0


def test_beta_hand_value():
    # k p2 = 2 k p1 = 2c gives beta = -eta^2 m^2 / (16 c)
    w = WaveConfig(1.0, 0.3)
    p1 = FourVector.on_shell((0.0, 0.0, 0.0))          # k p1 = 1
    # E - pz = 2 with E = 1.25, pz = -0.75
    p2 = FourVector(1.25, 0.0, 0.0, -0.75)
    assert mdot(w.k, p2) == pytest.approx(2 * mdot(w.k, p1))
    assert beta_param(1, p1, p2, w) == pytest.approx(-0.09 / 16.0)
    assert beta_param(1, p1, p1, w) == 0.0
    assert beta_param(1, p1, p2, WaveConfig(1.0, 0.0)) == 0.0


def test_degenerate_kp():
    w = WaveConfig(1.0, 0.3)
    with pytest.raises(KinematicsError):
        beta_param(1, w.k, FourVector.on_shell((0, 0, 0)), w)


def test_alpha_zero_cases():
    kin = _interference_kin()
    a = WaveConfig(2 * OPTICAL, 0.1, (1.0, 0.0))
    b = WaveConfig(OPTICAL, 0.1, (0.0, 1.0))
    assert alpha_pm("plus", kin.p_i, kin.p_f, (a, b)) == 0.0
    off = WaveConfig(OPTICAL, 0.0)
    assert alpha_pm("minus", kin.p_i, kin.p_f, (a, off)) == 0.0
    with pytest.raises(SingularCombinationError):
        alpha_pm("minus", kin.p_i, kin.p_f, (a, WaveConfig(2 * OPTICAL, 0.1)))
    with pytest.raises(ValueError):
        alpha_pm("times", kin.p_i, kin.p_f, (a, b))


def test_alpha_exchange_symmetry():
    kin = _kin((0.1, 0.3, 0.4), (-0.2, 0.1, 0.35))
    a = WaveConfig(0.02, 0.1, (1.0, 0.0))
    b = WaveConfig(0.01, 0.05, (math.cos(0.3), math.sin(0.3)))
    ab = (a, b)
    ba = (b, a)
    assert alpha_pm("plus", kin.p_i, kin.p_f, ab) == pytest.approx(
        alpha_pm("plus", kin.p_i, kin.p_f, ba), rel=1e-14)
    assert alpha_pm("minus", kin.p_i, kin.p_f, ab) == pytest.approx(
        -alpha_pm("minus", kin.p_i, kin.p_f, ba), rel=1e-14)


@settings(max_examples=30)
@given(st.floats(0.01, 2.0), st.floats(0.01, 2.0))
def test_parameter_scaling(e1, e2):
    kin = _kin((0.1, 0.3, 0.4), (-0.2, 0.1, 0.35))
    base = (WaveConfig(0.02, 1.0), WaveConfig(0.01, 1.0))
    scaled = (WaveConfig(0.02, e1), WaveConfig(0.01, e2))
    p0 = multiphoton_params(kin, base)
    p1 = multiphoton_params(kin, scaled)
    assert p1.gamma1 == pytest.approx(e1 * p0.gamma1, rel=1e-12)
    assert p1.beta2 == pytest.approx(e2 ** 2 * p0.beta2, rel=1e-12)
    assert p1.alpha_plus == pytest.approx(e1 * e2 * p0.alpha_plus, rel=1e-12)
    assert p1.alpha_minus == pytest.approx(e1 * e2 * p0.alpha_minus, rel=1e-12)


def test_identical_momenta_give_zero_parameters():
    p = (0.1, 0.2, 0.3)
    kin = ScatteringKinematics(FourVector.on_shell(p), FourVector.on_shell(p),
                               FourVector.lightlike(0.0, (0, 0, 1)))
    waves = (WaveConfig(0.02, 0.3), WaveConfig(0.01, 0.2))
    for momenta in ("bare", "quasi"):
        q = multiphoton_params(kin, waves, momenta)
        assert (q.gamma1, q.gamma2, q.beta1, q.beta2, q.alpha_plus, q.alpha_minus) == (0,) * 6


def test_interference_geometry_gamma_exactly_zero():
    kin = _interference_kin()
    waves = (WaveConfig(2 * OPTICAL, 0.3), WaveConfig(OPTICAL, 0.7))
    p = multiphoton_params(kin, waves, "quasi")
    assert p.gamma1 == 0.0 and p.gamma2 == 0.0
    assert p.alpha_plus != 0.0


@settings(max_examples=20)
@given(st.floats(0.0, 1.0), st.floats(0.0, math.pi), st.floats(0.0, 2 * math.pi),
       st.floats(0.05, 0.5), st.floats(0.0, 0.5), st.floats(0.0, 0.5))
def test_combined_beta_identity(cth, az, delta, w, eta1, eta2):
    sth = math.sqrt(1 - cth * cth)
    kin = _kin((0.0, 0.2, 0.6), (sth * math.cos(az) * 0.4, sth * math.sin(az) * 0.4, cth * 0.4))
    a = WaveConfig(w, eta1, (1.0, 0.0))
    b = WaveConfig(w, eta2, (math.cos(delta), math.sin(delta)))
    pti, ptf = kin.quasimomenta((a, b))
    p = multiphoton_params(kin, (a, b), "quasi")
    X = 1.0 / mdot(a.k, ptf) - 1.0 / mdot(a.k, pti)
    combined = X / 8.0 * (eta1 ** 2 + eta2 ** 2 + 2 * eta1 * eta2 * math.cos(delta))
    assert p.beta1 + p.beta2 + p.alpha_plus == pytest.approx(combined, rel=1e-12, abs=1e-300)
    assert p.equal_frequency and p.alpha_minus == 0.0


def test_classical_params():
    kin = _kin((0.0, 0.0, 1.0), (0.0, 1.0, 0.0))
    waves = (WaveConfig(0.02, 1.0), WaveConfig(0.01, 1.0))
    cl = classical_params(kin, waves)
    assert cl.xi1_i == 1.0 and cl.xi2_f == 1.0
    assert cl.zeta_i == pytest.approx(1 / math.sqrt(2))
    off = classical_params(kin, (WaveConfig(0.02), WaveConfig(0.01)))
    assert (off.xi1, off.xi2, off.zeta_i, off.zeta_f) == (0, 0, 0, 0)
    ultra = classical_params(_kin((0, 0, 1e4), (0, 1e4, 1.0)), waves)
    assert ultra.zeta_i == pytest.approx(ultra.xi1_i * ultra.xi2_i, rel=1e-8)


def test_classical_params_zero_momentum():
    kin = _kin((0.0, 0.0, 0.0), (0.0, 0.3, 0.0), (0, 0, 1))
    with pytest.raises(KinematicsError):
        classical_params(kin, (WaveConfig(0.02, 0.1), WaveConfig(0.01, 0.1)))


def test_multiphoton_params_invariants():
    with pytest.raises(ValueError):
        MultiphotonParams(gamma1=math.inf)
    with pytest.raises(ValueError):
        MultiphotonParams(xi1=-1.0)
    with pytest.raises(ValueError):
        multiphoton_params(_interference_kin(), (WaveConfig(1.0), WaveConfig(0.5)), "other")


def test_estimate_orders_field_off():
    kin = _kin((0.1, 0.3, 0.4), (-0.2, 0.1, 0.35))
    waves = (WaveConfig(0.02), WaveConfig(0.01))
    rec = estimate_orders(multiphoton_params(kin, waves), kin, waves)
    assert all(rec[k]["estimate"] == 0 for k in ("gamma1", "gamma2", "beta1", "alpha_plus"))


def test_estimate_orders_randomized_ensemble():
    # v ~ 0.5 with the final momentum well away from the interference plane
    rng = np.random.default_rng(7)
    p = 0.5 / math.sqrt(1 - 0.25)
    ratios = []
    for _ in range(40):
        th = rng.uniform(math.pi / 4, 3 * math.pi / 4)
        az = rng.uniform(-1.2, 1.2)
        pf = p * np.array([math.sin(th) * math.cos(az), math.sin(th) * math.sin(az), math.cos(th)])
        kin = _kin((0.0, 0.0, p), pf * 0.9, (0.0, 1.0, 0.0))
        waves = (WaveConfig(2 * OPTICAL, 0.01), WaveConfig(OPTICAL, 0.01))
        rec = estimate_orders(multiphoton_params(kin, waves), kin, waves)
        ratios += [rec["gamma1"]["ratio"], rec["gamma2"]["ratio"]]
    ratios = np.array(ratios)
    assert np.all((ratios > 0.1) & (ratios < 10))


def test_estimate_orders_flags_geometry_suppression():
    kin = _interference_kin()
    waves = (WaveConfig(2 * OPTICAL, 0.1), WaveConfig(OPTICAL, 0.1))
    rec = estimate_orders(multiphoton_params(kin, waves), kin, waves)
    assert rec["gamma1"]["exact"] == 0.0 and rec["gamma1"]["estimate"] > 0
    assert rec["geometry_suppressed_1"] and rec["geometry_suppressed_2"]


def test_classify_interference_example():
    rep = classify_regime(_interference_kin(), (WaveConfig(2 * OPTICAL, 0.1),
                                                WaveConfig(OPTICAL, 0.1)))
    assert rep.kinematic == "interference"
    assert rep.phi == pytest.approx(math.pi / 2)


def test_classify_noninterference_example():
    kin = _kin((0.3, 0.0, 0.4), (-0.2, 0.0, 0.35), (1.0, 0.0, 1.0))
    rep = classify_regime(kin, (WaveConfig(2 * OPTICAL, 0.1), WaveConfig(OPTICAL, 0.1)))
    assert rep.phi == pytest.approx(0.0, abs=1e-15)
    assert rep.kinematic == "noninterference"


def test_classify_zero_field():
    rep = classify_regime(_interference_kin(), (WaveConfig(2 * OPTICAL), WaveConfig(OPTICAL)))
    for prefix in ("moderate_field", "interference_field", "dipole_like"):
        rows = rep.rows(prefix)
        assert rows and all(d.satisfied for d in rows)
    assert rep.field_regime == "dipole_like"


def test_classify_frequency_status():
    kin = _interference_kin()
    collapse = classify_regime(kin, (WaveConfig(OPTICAL, 0.1), WaveConfig(OPTICAL, 0.1)))
    assert collapse.frequency_status == "collapses_to_single_wave"
    sep = classify_regime(kin, (WaveConfig(3 * OPTICAL, 0.1), WaveConfig(OPTICAL, 0.1)))
    assert sep.frequency_status == "well_separated"
    assert sep.rows("frequency_separation")[0].left == pytest.approx(2 / 3)
    mid = classify_regime(kin, (WaveConfig(1.5 * OPTICAL, 0.1), WaveConfig(OPTICAL, 0.1)))
    assert mid.frequency_status == "intermediate"


def test_every_label_is_justified():
    kin = _kin((0.3, 0.0, 0.4), (-0.2, 0.0, 0.35), (1.0, 0.0, 1.0))
    rep = classify_regime(kin, (WaveConfig(2 * OPTICAL, 0.1), WaveConfig(OPTICAL, 0.1)))
    labels = {d.label.split(":")[0] for d in rep.diagnostics}
    for key in ("kinematic", "field_regime", "frequency_status"):
        assert rep.justification[key]
        assert set(rep.justification[key]) <= labels
    rec = rep.to_dict()
    assert rec["kinematic"] == rep.kinematic and len(rec["diagnostics"]) == len(rep.diagnostics)


@settings(max_examples=20)
@given(st.floats(0.2, 5.0))
def test_classification_scale_invariant(lam):
    base = np.array([0.3, 0.1, 0.4]), np.array([-0.2, 0.05, 0.35])
    waves = (WaveConfig(2 * OPTICAL, 0.1), WaveConfig(OPTICAL, 0.1))
    reps = []
    for s in (1.0, lam):
        kin = _kin(s * base[0], s * base[1], (1.0, 0.2, 1.0))
        reps.append(classify_regime(kin, waves))
    assert reps[0].phi == pytest.approx(reps[1].phi, abs=1e-12)
    # the angle class is unchanged as long as both sit far from the boundaries
    a, b = (r.rows("noninterference_range")[0] for r in reps)
    assert a.left == pytest.approx(b.left, abs=1e-12)


def test_classify_deterministic():
    kin = _interference_kin()
    waves = (WaveConfig(2 * OPTICAL, 0.1), WaveConfig(OPTICAL, 0.1))
    assert classify_regime(kin, waves).to_dict() == classify_regime(kin, waves).to_dict()
