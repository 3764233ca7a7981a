import math

import numpy as np
import pytest

from cqedwb import readout
from cqedwb.errors import DomainError, InvalidInput, NoConvergence
from cqedwb.readout import BrightStateParams, ReadoutParams

SNR_BASE = dict(chi_ghz=0.01, kappa_in_ghz=0.0025, kappa_out_ghz=0.0025, t1_s=3e-6,
                n_bar=10, omega_r_ghz=8.0)


@pytest.mark.parametrize("qubit", [1, -1])
def test_alpha_on_resonance(qubit):
    p = ReadoutParams(eps_rf=0.02, delta_rf_ghz=-qubit * 0.003, chi_ghz=0.003,
                      kappa_in_ghz=0.002, kappa_out_ghz=0.002)
    a = readout.dispersive_alpha(p, qubit)
    assert abs(a) == pytest.approx(0.02 / (2 * math.pi * p.kappa_ghz / 2))


@pytest.mark.parametrize("delta, chi", [(0.0, 0.0), (0.01, 0.002), (-0.004, 0.006)])
@pytest.mark.parametrize("qubit", [1, -1])
def test_alpha_photon_identity(delta, chi, qubit):
    p = ReadoutParams(eps_rf=0.05, delta_rf_ghz=delta, chi_ghz=chi,
                      kappa_in_ghz=0.001, kappa_out_ghz=0.003)
    w = 2 * math.pi
    expected = 0.05 ** 2 / ((w * p.kappa_ghz / 2) ** 2 + (w * (delta + qubit * chi)) ** 2)
    assert abs(readout.dispersive_alpha(p, qubit)) ** 2 == pytest.approx(expected, rel=1e-14)


def test_no_chi_no_information():
    p = ReadoutParams(eps_rf=0.05, kappa_in_ghz=0.002)
    assert readout.dispersive_alpha(p, 1) == readout.dispersive_alpha(p, -1)
    assert readout.distinguishability(p) == 1.0
    assert readout.measurement_snr(ReadoutParams(**{**SNR_BASE, "chi_ghz": 0.0})) == 0.0


def test_distinguishability_decreases_with_chi():
    d = [readout.distinguishability(ReadoutParams(eps_rf=0.02, chi_ghz=c, kappa_in_ghz=0.004))
         for c in (0.0, 0.0005, 0.001, 0.002)]
    assert all(0 < x <= 1 for x in d)
    assert all(a > b for a, b in zip(d, d[1:]))


def test_snr_orders_of_magnitude():
    hot = readout.measurement_snr(ReadoutParams(**SNR_BASE, tn_K=10.0))
    cold = readout.measurement_snr(ReadoutParams(**SNR_BASE, tn_K=0.1))
    lin = readout.measurement_snr(ReadoutParams(**SNR_BASE, tn_K=10.0), angular=False)
    assert 0.1 < lin < 10
    assert cold / hot == pytest.approx(100)
    assert hot / lin == pytest.approx((2 * math.pi) ** 2)


@pytest.mark.parametrize("key, factor, power", [("n_bar", 3.0, 1), ("t1_s", 2.0, 1),
                                               ("tn_K", 4.0, -1)])
def test_snr_scaling(key, factor, power):
    base = ReadoutParams(**SNR_BASE)
    scaled = ReadoutParams(**{**SNR_BASE, key: getattr(base, key) * factor})
    ratio = readout.measurement_snr(scaled) / readout.measurement_snr(base)
    assert ratio == pytest.approx(factor ** power, rel=1e-14)


@pytest.mark.parametrize("kw", [dict(kappa_in_ghz=-1e-3), dict(t1_s=0.0), dict(n_bar=-1)])
def test_readout_params_validation(kw):
    with pytest.raises(InvalidInput):
        ReadoutParams(**kw)


def test_chi_of_amplitude_limits():
    b = BrightStateParams(0.05, 1.0, 0.001, 6.0, 1)
    assert readout.chi_of_amplitude(b, 0.0) == pytest.approx(0.05 ** 2 / 1.0, rel=0.01)
    vals = [readout.chi_of_amplitude(b, a2) for a2 in (0, 1, 10, 100, 1e4, 1e8)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-5


def test_chi_of_amplitude_domain():
    b = BrightStateParams(0.05, 0.01, 0.001, 6.0, -1)
    with pytest.raises(DomainError):
        readout.chi_of_amplitude(b, 0.0)
    assert readout.chi_of_amplitude(b, 2.0) < 0


def test_bright_zero_drive():
    roots = readout.bright_state_solve(BrightStateParams(0.05, 0.5, 0.001, 6.0), 0.0, 6.0)
    assert len(roots) == 1 and roots[0].a2 == 0.0


@pytest.mark.parametrize("xi, wd", [(0.003162, 5.996), (0.01, 5.998), (0.0316, 5.999),
                                    (0.05, 6.0), (0.001, 5.99)])
def test_bright_residuals(xi, wd):
    b = BrightStateParams(0.05, 0.5, 0.0005, 6.0)
    roots = readout.bright_state_solve(b, xi, wd)
    assert len(roots) in (1, 2, 3)
    for r in roots:
        assert abs(r.a2 - readout._rhs(b, xi, wd, r.a2)) < 1e-10 * max(1.0, r.a2)


def test_bright_bistable_region():
    b = BrightStateParams(0.05, 0.5, 0.0005, 6.0)
    roots = readout.bright_state_solve(b, 0.01, 5.998)
    assert len(roots) == 3
    assert [r.stable for r in roots] == [True, False, True]


def test_bright_large_drive_at_bare_frequency():
    b = BrightStateParams(0.05, 0.5, 0.001, 6.0)
    roots = readout.bright_state_solve(b, 0.1, 6.0)
    assert len(roots) == 1 and roots[0].a2 > 1e3


def test_bright_response_step():
    xis = np.geomspace(1e-3, 1e-1, 61)
    crit = {}
    for sz in (1, -1):
        b = BrightStateParams(0.05, 0.5, 0.001, 6.0, sz)
        a2 = np.array([readout.bright_state_solve(b, x, 6.0)[0].a2 for x in xis])
        assert np.all(np.diff(a2) > 0)
        slope = np.diff(np.log(a2)) / np.diff(np.log(xis))
        assert slope.max() > 10  # linear response would give 2
        crit[sz] = np.interp(math.log(500), np.log(a2), np.log(xis))
    assert abs(crit[1] - crit[-1]) > 1e-3


def test_bright_root_above_search_range():
    b = BrightStateParams(0.05, 0.5, 0.0005, 6.0)
    with pytest.raises(NoConvergence):
        readout.bright_state_solve(b, 0.1, 6.0)
    assert readout.bright_state_solve(b, 0.1, 6.0, a2_max=1e6)[0].a2 > 1e4


def test_bright_negative_drive():
    with pytest.raises(InvalidInput):
        readout.bright_state_solve(BrightStateParams(0.05, 0.5, 0.001, 6.0), -1.0, 6.0)
