import math

import numpy as np
import pytest

from cqedwb import pulsectl
from cqedwb.errors import DegenerateBasis, InvalidInput
from cqedwb.numkit import SX, evolve_unitary
from cqedwb.pulsectl import PI, PulseErrorModel, Rotation


def test_rotation_normalizes_axis():
    r = Rotation((3.0, 0.0, 4.0), 1.0)
    assert np.linalg.norm(r.axis) == pytest.approx(1, abs=1e-12)
    with pytest.raises(InvalidInput):
        Rotation((0.0, 0.0, 0.0), 1.0)


def test_x_pi_flips():
    psi = pulsectl.rotation_unitary(Rotation.x(PI)) @ [1, 0]
    assert np.array_equal(psi, [0, -1j])


def test_two_pi_is_minus_identity():
    u = pulsectl.rotation_unitary(Rotation((1.0, 2.0, -0.5), 2 * PI))
    assert np.allclose(u, -np.eye(2))


def test_hadamard_identity():
    # R_y(pi/2) first, then R_x(pi): i X R_y(pi/2) is the Hadamard
    u = pulsectl.rotation_unitary(Rotation.x(PI)) @ pulsectl.rotation_unitary(Rotation.y(PI / 2))
    had = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    assert np.allclose(1j * u, had)
    assert np.allclose(1j * u @ [1, 0], np.array([1, 1]) / math.sqrt(2))


@pytest.mark.parametrize("angle", [0.0, PI / 2, PI, 0.3, -1.2])
def test_rotation_unitary_matches_propagator(angle):
    # R_x(theta) = exp(-i theta sigma_x / 2), i.e. H = sigma_x / 2 for time theta / 2 pi
    u = pulsectl.rotation_unitary(Rotation.x(angle))
    assert np.allclose(u, evolve_unitary(SX / 2, angle / (2 * PI)), atol=1e-12)
    assert np.allclose(u @ u.conj().T, np.eye(2), atol=1e-15)


def test_rabi_trace():
    omega = 0.02
    t = np.array([0.0, 0.25 / omega, 0.5 / omega, 1 / omega])
    assert np.allclose(pulsectl.rabi_trace(omega, t), [0, 0.5, 1, 0], atol=1e-15)
    grid = np.linspace(0, 200, 57)
    assert np.allclose(pulsectl.rabi_trace(omega, grid),
                       pulsectl.rabi_trace_propagated(omega, grid), atol=1e-10)


def test_no_error_is_exact():
    for r in pulsectl.PULSES.values():
        assert np.array_equal(pulsectl.apply_error(r, PulseErrorModel()), pulsectl.rotation_unitary(r))


def test_power_doubles_angle():
    u = pulsectl.apply_error(Rotation.x(PI / 2), PulseErrorModel(power_db=6.0206))
    assert np.allclose(u, pulsectl.rotation_unitary(Rotation.x(PI)), atol=1e-5)
    assert 10 ** (6.0206 / 20) == pytest.approx(2, abs=1e-5)


def test_detuning_leaves_z_rotation():
    r = Rotation.z(0.7)
    u = pulsectl.apply_error(r, PulseErrorModel(detuning_frac=0.05))
    assert np.allclose(u, pulsectl.rotation_unitary(r))


@pytest.mark.parametrize("field", ["power_db", "detuning_frac", "skew_rad", "amp_imbalance"])
def test_error_continuity(field):
    for name, r in pulsectl.PULSES.items():
        u = pulsectl.apply_error(r, PulseErrorModel(**{field: 1e-9}))
        assert np.linalg.norm(u - pulsectl.rotation_unitary(r), 2) < 1e-8


def test_skew_and_imbalance_semantics():
    skew = pulsectl.apply_error(Rotation.y(PI), PulseErrorModel(skew_rad=0.1))
    expected = pulsectl.rotation_unitary(Rotation((-math.sin(0.1), math.cos(0.1), 0.0), PI))
    assert np.allclose(skew, expected)
    imb = pulsectl.apply_error(Rotation.x(PI / 2), PulseErrorModel(amp_imbalance=0.1))
    assert np.allclose(imb, pulsectl.rotation_unitary(Rotation.x(1.1 * PI / 2)))
    assert np.allclose(pulsectl.apply_error(Rotation.y(PI / 2), PulseErrorModel(amp_imbalance=0.1)),
                       pulsectl.rotation_unitary(Rotation.y(PI / 2)))


def test_error_model_validation():
    with pytest.raises(InvalidInput):
        PulseErrorModel(power_db=float("nan"))


def test_allxy_ideal():
    res = pulsectl.allxy_simulate()
    assert res.labels[0] == "Id,Id" and res.labels[-1] == "Y9,Y9"
    assert len(res.labels) == 21
    assert np.array_equal(res.z, np.array(pulsectl.ALLXY_IDEAL, dtype=float))
    assert list(pulsectl.ALLXY_IDEAL).count(1) == 5
    assert list(pulsectl.ALLXY_IDEAL).count(0) == 12
    assert list(pulsectl.ALLXY_IDEAL).count(-1) == 4


@pytest.mark.parametrize("kind, table", [("power", pulsectl.ALLXY_POWER_SLOPES),
                                         ("detuning", pulsectl.ALLXY_DETUNING_SLOPES)])
def test_allxy_slopes(kind, table):
    slopes = pulsectl.allxy_slopes(kind)
    for label, coef in table.items():
        assert slopes[label] == pytest.approx(coef, rel=0.05), label
    for label in set(slopes) - set(table):
        assert abs(slopes[label]) < 1e-6, label


def test_allxy_key_rows():
    assert pulsectl.allxy_slopes("power")["X9,Xp"] == pytest.approx(3, abs=0.05)
    d = pulsectl.allxy_slopes("detuning")
    assert d["X9,Y9"] == pytest.approx(-2, abs=0.05)
    assert d["Y9,X9"] == pytest.approx(2, abs=0.05)


@pytest.mark.parametrize("label, coef", [("Xp,Yp", -1.0), ("Yp,Xp", -1.0),
                                         ("Xp,Id", 0.5), ("X9,X9", 2.0)])
def test_allxy_detuning_quadratic_rows(label, coef):
    eps = 1e-3
    res = pulsectl.allxy_simulate(PulseErrorModel(detuning_frac=eps))
    k = pulsectl.ALLXY_LABELS.index(label)
    assert (res.z[k] - pulsectl.ALLXY_IDEAL[k]) / eps ** 2 == pytest.approx(coef, rel=1e-3)


@pytest.mark.parametrize("e", [PulseErrorModel(power_db=1.0), PulseErrorModel(detuning_frac=0.3),
                               PulseErrorModel(skew_rad=0.2, amp_imbalance=-0.1)])
def test_allxy_bounded(e):
    z = pulsectl.allxy_simulate(e).z
    assert np.all(np.abs(z) <= 1 + 1e-12)


def test_syndrome_fit_zero():
    fit = pulsectl.allxy_syndrome_fit(pulsectl.allxy_simulate())
    assert all(v == 0 for v in fit.coefficients.values())
    assert fit.residual == 0


@pytest.mark.parametrize("kind", ["power", "detuning"])
def test_syndrome_fit_pure(kind):
    eps = 1e-3
    e = (PulseErrorModel(power_db=pulsectl.power_db_for_overrotation(eps)) if kind == "power"
         else PulseErrorModel(detuning_frac=eps))
    fit = pulsectl.allxy_syndrome_fit(pulsectl.allxy_simulate(e))
    other = "detuning" if kind == "power" else "power"
    assert abs(fit.coefficients[other]) < 0.1 * abs(fit.coefficients[kind])


def test_syndrome_fit_mixed_residual():
    eps = 1e-3
    e = PulseErrorModel(power_db=pulsectl.power_db_for_overrotation(eps), detuning_frac=eps)
    fit = pulsectl.allxy_syndrome_fit(pulsectl.allxy_simulate(e))
    # every neglected term is second order in eps with O(1) coefficients
    assert fit.residual < 21 * 10 * eps ** 2


def test_syndrome_fit_degenerate():
    v = pulsectl.syndrome_vectors()["power"]
    with pytest.raises(DegenerateBasis):
        pulsectl.allxy_syndrome_fit(pulsectl.allxy_simulate(), {"a": v, "b": -v})
