import math
from dataclasses import replace

import numpy as np
import pytest

from cqedwb import transmon
from cqedwb.errors import InvalidInput, OutOfRegime
from cqedwb.numkit import eig_hermitian
from cqedwb.transmon import FluxNoiseParams, TransmonParams


def levels(p, n=4):
    return eig_hermitian(transmon.cpb_hamiltonian(p))[0][:n]


def test_cpb_shape_and_entries():
    p = TransmonParams.symmetric(10.0, 0.5, ng=0.2)
    h = transmon.cpb_hamiltonian(p)
    assert h.shape == (31, 31)
    assert h[0, 0] == pytest.approx(4 * 0.5 * (-15 - 0.2) ** 2)
    assert h[3, 4] == pytest.approx(-5.0)
    assert np.allclose(h, h.T)


@pytest.mark.parametrize("ng", [0.0, 0.3])
def test_cpb_zero_ej_is_diagonal(ng):
    p = TransmonParams.symmetric(10.0, 0.5, ng=ng, charge_cutoff=10)
    w = eig_hermitian(transmon.cpb_hamiltonian(p, ej_ghz=0.0))[0]
    j = np.arange(-10, 11)
    assert np.allclose(w, np.sort(4 * 0.5 * (j - ng) ** 2))


def test_cpb_degenerate_at_half_charge():
    p = TransmonParams.symmetric(1e-6, 0.5, ng=0.5)
    w = eig_hermitian(transmon.cpb_hamiltonian(p, ej_ghz=1e-9))[0]
    assert w[1] - w[0] < 4 * 0.5 * 1e-6


@pytest.mark.parametrize("ratio", [50, 80, 120, 200])
def test_f01_matches_asymptotic(ratio):
    ec = 0.35
    f01, alpha = transmon.transmon_f01_anharmonicity(TransmonParams.symmetric(ratio * ec, ec))
    assert f01 == pytest.approx(transmon.f01_asymptotic(ratio * ec, ec), rel=0.02)
    assert alpha == pytest.approx(-ec, rel=0.15)


def test_f01_example_value():
    f01, _ = transmon.transmon_f01_anharmonicity(TransmonParams.symmetric(30.0, 0.35))
    expected = math.sqrt(8 * 30 * 0.35) - 0.35
    assert expected == pytest.approx(8.82, abs=0.01)
    assert f01 == pytest.approx(expected, rel=0.02)


def test_charge_sensitivity_shrinks():
    ec = 0.35
    spread = []
    for ratio in (10, 30, 50, 100):
        p = TransmonParams.symmetric(ratio * ec, ec)
        f0 = transmon.transmon_f01_anharmonicity(p)[0]
        f5 = transmon.transmon_f01_anharmonicity(replace(p, ng=0.5))[0]
        spread.append(abs(f0 - f5))
    assert all(a > b for a, b in zip(spread, spread[1:]))


def test_charge_dispersion_wkb_signs():
    p = TransmonParams.symmetric(20.0, 0.35)
    eps = [transmon.charge_dispersion_wkb(m, p) for m in range(4)]
    assert all(a * b < 0 for a, b in zip(eps, eps[1:]))
    assert all(abs(a) < abs(b) for a, b in zip(eps, eps[1:]))


def test_charge_dispersion_shrinks_with_ratio():
    ec = 0.35
    lo = TransmonParams.symmetric(50 * ec, ec)
    hi = TransmonParams.symmetric(100 * ec, ec)
    assert transmon.charge_dispersion_wkb(1, hi) / transmon.charge_dispersion_wkb(1, lo) < 1e-2


@pytest.mark.parametrize("ratio", [50, 100])
@pytest.mark.parametrize("m", [0, 1])
def test_charge_dispersion_wkb_vs_exact(ratio, m):
    # The asymptotic form is the full peak-to-peak swing E_m(1/2) - E_m(0).
    p = TransmonParams.symmetric(ratio * 0.35, 0.35)
    assert transmon.charge_dispersion_exact(m, p) == pytest.approx(
        transmon.charge_dispersion_wkb(m, p), rel=0.2)


def test_charge_dispersion_wkb_regime():
    with pytest.raises(OutOfRegime):
        transmon.charge_dispersion_wkb(0, TransmonParams.symmetric(3.0, 0.35))


@pytest.mark.parametrize("flux, ej1, ej2, expected", [
    (0.0, 10.0, 10.0, 20.0),
    (0.5, 10.0, 10.0, 0.0),
    (0.5, 12.0, 8.0, 4.0),
    (1 / 3, 10.0, 10.0, 10.0),
])
def test_ej_effective(flux, ej1, ej2, expected):
    mag, _ = transmon.ej_effective(TransmonParams(ej1, ej2, 0.3, flux_phi0=flux))
    assert mag == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("flux", [0.1, 0.37, 0.8])
def test_ej_effective_periodic_even(flux):
    p = TransmonParams(12.0, 8.0, 0.3)
    e = lambda f: transmon.ej_effective(replace(p, flux_phi0=f))[0]
    assert e(flux) == pytest.approx(e(-flux))
    assert e(flux) == pytest.approx(e(flux + 1))


def test_f01_vs_flux_symmetric():
    p = TransmonParams.symmetric(20.0, 0.3)
    out = transmon.f01_vs_flux(p, np.linspace(-0.49, 0.49, 21))
    assert np.argmax(out["f01_exact"]) == 10
    assert out["out_of_regime"][0] and not out["out_of_regime"][10]


def test_f01_vs_flux_asymmetric_floor():
    p = TransmonParams(11.0, 9.0, 0.3)
    out = transmon.f01_vs_flux(p, [0.0, 0.25, 0.5])
    assert out["f01_exact"][2] > 0.5
    assert out["f01_exact"][0] > out["f01_exact"][1] > out["f01_exact"][2]


def test_tphi_examples():
    p = TransmonParams.symmetric(30.0, 0.35)
    n = FluxNoiseParams(1e-5)
    assert transmon.tphi_flux_noise(p, n, 0.25) == pytest.approx(1e-6, rel=0.5)
    assert transmon.tphi_flux_noise(p, n, 0.0) == pytest.approx(3e-3, rel=0.5)


def test_tphi_grows_towards_sweet_spot():
    p = TransmonParams.symmetric(30.0, 0.35)
    n = FluxNoiseParams(1e-5)
    t = [transmon.tphi_flux_noise(p, n, f) for f in (0.1, 0.01, 0.001)]
    assert t[0] < t[1] < t[2]


def test_tphi_errors():
    n = FluxNoiseParams(1e-5)
    with pytest.raises(OutOfRegime):
        transmon.tphi_flux_noise(TransmonParams.symmetric(30.0, 0.35), n, 0.5)
    with pytest.raises(OutOfRegime):
        transmon.tphi_flux_noise(TransmonParams(16.0, 14.0, 0.35), n, 0.25)
    with pytest.raises(InvalidInput):
        FluxNoiseParams(0.0)


@pytest.mark.parametrize("kw", [dict(ec_ghz=0.0), dict(ej1_ghz=0.0, ej2_ghz=0.0),
                                dict(charge_cutoff=5), dict(ng=float("nan"))])
def test_params_validation(kw):
    base = dict(ej1_ghz=5.0, ej2_ghz=5.0, ec_ghz=0.3)
    base.update(kw)
    with pytest.raises(InvalidInput):
        TransmonParams(**base)


@pytest.mark.parametrize("ng", [0.1, 0.27, 0.45])
def test_charge_periodicity_and_mirror(ng):
    p = TransmonParams.symmetric(3.0, 0.5, ng=ng)
    base = levels(p)
    assert np.allclose(levels(replace(p, ng=ng + 1)), base, atol=1e-8)
    assert np.allclose(levels(replace(p, ng=1 - ng)), base, atol=1e-8)


@pytest.mark.parametrize("ratio", [10, 60, 200])
def test_truncation_convergence(ratio):
    p = TransmonParams.symmetric(ratio * 0.3, 0.3, ng=0.2)
    a = levels(replace(p, charge_cutoff=15))
    b = levels(replace(p, charge_cutoff=25))
    assert np.max(np.abs(a - b)) < 1e-8
