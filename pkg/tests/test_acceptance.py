"""Acceptance suite: one test (and one summary line) per criterion."""
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from cqedwb import cavity, cqedspec, fluxdesign, pulsectl, qec, tomo, transmon
from cqedwb.numkit import basis_state, dm, kron, pauli_expectations, random_density_matrix


def report(number, title, checks, elapsed, budget):
    """Record the criterion line and fail the test if any check failed.

    ``checks`` is a list of (description, passed) pairs.
    """
    ok = all(p for _, p in checks) and elapsed < budget
    failed = [d for d, p in checks if not p]
    if elapsed >= budget:
        failed.append(f"runtime {elapsed:.2f}s >= {budget}s")
    detail = "; ".join(d for d, _ in checks)
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'} {title} ({elapsed:.2f}s) :: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, "failed: " + " | ".join(failed)


def within(x, target, rel):
    return abs(x - target) <= rel * abs(target)


def test_criterion_01_flux_noise_dephasing():
    t0 = time.perf_counter()
    p = transmon.TransmonParams.symmetric(30.0, 0.35)
    noise = transmon.FluxNoiseParams(1e-5)
    t_quarter = transmon.tphi_flux_noise(p, noise, 0.25)
    t_sweet = transmon.tphi_flux_noise(p, noise, 0.0)
    el = time.perf_counter() - t0
    report(1, "flux-noise Tphi", [
        (f"Tphi(1/4)={t_quarter * 1e6:.3f} us vs 1 us +-50%", within(t_quarter, 1e-6, 0.5)),
        (f"Tphi(0)={t_sweet * 1e3:.3f} ms vs 3 ms +-50%", within(t_sweet, 3e-3, 0.5)),
    ], el, 1.0)


def test_criterion_02_fbl_lifetimes():
    t0 = time.perf_counter()
    w = fluxdesign.ghz_to_omega(9.0)
    bare = fluxdesign.FblCircuit(0.25e-15, 40e-15, 0.5e-9)
    filt = fluxdesign.FblCircuit(0.25e-15, 40e-15, 0.5e-9, cg_F=10e-12, cs_F=0.0, lf_H=1e-9)
    yc, yd = fluxdesign.fbl_unfiltered_Y(bare, w)
    fc, fd = fluxdesign.fbl_filtered_Y(filt, w)
    t = [fluxdesign.t1_from_admittance(40e-15, y) for y in (yc, yd, fc, fd)]
    el = time.perf_counter() - t0
    report(2, "FBL lifetimes", [
        (f"unfiltered common {t[0] * 1e6:.3f} us vs 2 us", within(t[0], 2e-6, 0.5)),
        (f"differential {t[1] * 1e6:.1f} us vs 100 us", within(t[1], 100e-6, 0.5)),
        (f"filtered common {t[2] * 1e3:.3f} ms vs 1.6 ms", within(t[2], 1.6e-3, 0.5)),
        (f"filtered differential {t[3]:.4f} s vs 0.15 s", within(t[3], 0.15, 0.5)),
    ], el, 1.0)


def test_criterion_03_flux_coupling():
    t0 = time.perf_counter()
    ref_loop = fluxdesign.FblGeometry(500e-6, 400e-6, 100e-6, 100e-6, current_I_A=1e-3)
    n_phi0 = fluxdesign.flux_f(ref_loop) / transmon.PHI0
    # Plate gap is not stated for the device; 1 mm is assumed (see notes).
    device = fluxdesign.FblGeometry(500e-6, 790e-6, 325e-6, 325e-6, plate_gap_w_m=1e-3)
    i_req = fluxdesign.required_current(device)
    el = time.perf_counter() - t0
    report(3, "flux coupling", [
        (f"reference loop {n_phi0:.4f} phi0 vs 1 +-20%", within(n_phi0, 1.0, 0.2)),
        (f"device {i_req * 1e3:.3f} mA per phi0 vs 1.7 mA +-30%", within(i_req, 1.7e-3, 0.3)),
    ], el, 1.0)


def test_criterion_04_screening():
    t0 = time.perf_counter()
    ratios = np.geomspace(0.1, 10, 41)  # d/w
    dev = []
    for r in ratios:
        exact = fluxdesign.screening_G(r, 1.0, "sum")
        fit = fluxdesign.screening_G(r, 1.0, "fit")
        dev.append(abs(fit - exact) / exact)
    worst = int(np.argmax(dev))
    # Case I: w >> d, G ~ 1 - pi^2/6 (d/w)^2, compared at the level of G
    g10 = fluxdesign.screening_G(1.0, 10.0, "sum")
    approx = 1 - math.pi ** 2 / 600
    case1 = abs(approx - g10) / g10
    corr = abs((1 - g10) - math.pi ** 2 / 600) / (math.pi ** 2 / 600)
    # Case II: w << d, log-log slope of G against r = w/d over [0.05, 0.2]
    r = np.geomspace(0.05, 0.2, 9)
    g = np.array([fluxdesign.screening_G(1.0, x, "sum") for x in r])
    positive = bool(np.all(g > 0))
    slope = np.polyfit(np.log(r), np.log(g), 1)[0]
    el = time.perf_counter() - t0
    report(4, "screening", [
        (f"fit vs sum max rel dev {dev[worst]:.3g} at d/w={ratios[worst]:.3g} (< 0.05)",
         dev[worst] < 0.05),
        (f"case I G rel err {case1:.1e} (< 0.01; correction term alone {corr:.2e})", case1 < 0.01),
        (f"case II G > 0 on r in [0.05, 0.2]: {positive}", positive),
        (f"case II log-log slope {slope:.1f} (4 +- 0.3)", abs(slope - 4) <= 0.3),
    ], el, 1.0)


def test_criterion_05_qec_polynomial():
    t0 = time.perf_counter()
    s = qec.qec_fidelity_sweep("phase", np.linspace(0, 1, 41))
    c0, c1, c2, c3 = s.coefficients
    el = time.perf_counter() - t0
    report(5, "QEC polynomial", [
        (f"c1={c1:.2e} (|c1| < 1e-6)", abs(c1) < 1e-6),
        (f"c2={c2:.6f} (-3 +- 0.01)", abs(c2 + 3) <= 0.01),
        (f"c3={c3:.6f} (2 +- 0.02)", abs(c3 - 2) <= 0.02),
    ], el, 10.0)


def test_criterion_06_allxy():
    t0 = time.perf_counter()
    ideal = pulsectl.allxy_simulate()
    exact = bool(np.array_equal(ideal.z, np.array(pulsectl.ALLXY_IDEAL, dtype=float)))
    checks = [("21 ideal outputs exact", exact and len(ideal.z) == 21)]
    for kind, table in (("power", pulsectl.ALLXY_POWER_SLOPES),
                        ("detuning", pulsectl.ALLXY_DETUNING_SLOPES)):
        slopes = pulsectl.allxy_slopes(kind, 1e-4)
        worst = max(abs(slopes[k] - v) / abs(v) for k, v in table.items())
        checks.append((f"{kind}: {len(table)} slopes, worst rel err {worst:.1e}", worst < 0.05))
    el = time.perf_counter() - t0
    report(6, "AllXY table", checks, el, 1.0)


def test_criterion_07_tomography_round_trip():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(5):
        m = tomo.MeasurementModel(3, tuple(rng.normal(size=8)))
        rho = random_density_matrix(8, rng)
        est = tomo.reconstruct_state(tomo.simulate_voltages(rho, m), m)
        worst = max(worst, float(np.max(np.abs(est.paulis - pauli_expectations(rho, 3)))))
    m = tomo.MeasurementModel(3, tuple(rng.normal(size=8)))
    ghz = dm((basis_state("000") + basis_state("111")) / math.sqrt(2))
    bars = dict(zip(tomo.pauli_labels(3), tomo.reconstruct_state(tomo.simulate_voltages(ghz, m), m).paulis))
    singles = max(abs(bars[s]) for s in ("ZII", "IZI", "IIZ", "XII", "IXI", "IIX", "YII", "IYI", "IIY"))
    pairs = min(bars[s] for s in ("ZZI", "ZIZ", "IZZ"))
    ground = tomo.reconstruct_state(tomo.simulate_voltages(dm(basis_state("000")), m), m).paulis
    unit_bars = int(np.sum(np.abs(ground - 1) < 1e-9))
    el = time.perf_counter() - t0
    report(7, "tomography round trip", [
        (f"random rho max Pauli dev {worst:.1e} (< 1e-9)", worst < 1e-9),
        (f"GHZ singles max |.|={singles:.1e}, ZZ pairs min={pairs:.12f}",
         singles < 1e-9 and abs(pairs - 1) < 1e-9),
        (f"ground state shows {unit_bars} unit bars (7)", unit_bars == 7),
    ], el, 5.0)


def test_criterion_08_witnesses():
    t0 = time.perf_counter()
    ghz = (basis_state("000") + basis_state("111")) / math.sqrt(2)
    w = qec.witnesses(ghz)
    phis = np.linspace(0, 2 * math.pi, 361)
    worst = min(max(abs(s1), abs(s2)) for s1, s2, _, _ in
                (qec.mermin_terms(dm(qec.ghz_phi_state(p))) for p in phis))
    rng = np.random.default_rng(8)
    max_ms, max_f = 0.0, 0.0
    for _ in range(200):
        qs = [rng.normal(size=2) + 1j * rng.normal(size=2) for _ in range(3)]
        psi = kron(*[(q / np.linalg.norm(q)).reshape(-1, 1) for q in qs]).ravel()
        rep = qec.witnesses(psi)
        max_ms = max(max_ms, abs(rep.M_S1), abs(rep.M_S2))
        max_f = max(max_f, rep.ghz_fidelity)
    el = time.perf_counter() - t0
    report(8, "witnesses", [
        (f"GHZ M_S1={w.M_S1:.12f}, M_P1={w.M_P1:.12f}",
         abs(w.M_S1 - 4) < 1e-9 and abs(w.M_P1 + 1) < 1e-9),
        (f"GHZ_phi sweep min max|M_S|={worst:.4f} (> 2)", worst > 2),
        (f"product states max|M_S|={max_ms:.4f} (<= 2), max GHZ fidelity={max_f:.4f} (<= 0.5)",
         max_ms <= 2 + 1e-9 and max_f <= 0.5 + 1e-9),
    ], el, 10.0)


def test_criterion_09_kerr_q():
    t0 = time.perf_counter()
    n, beta, k = 40, 1.5, 1e-3
    psi = cavity.coherent_state(beta, n)
    q = cavity.q_function(cavity.coherent_state(1.0 + 0.5j, n), extent=6, points=121)
    i, j = np.unravel_index(np.argmax(q.values), q.values.shape)
    peak_alpha = q.alpha[i, j]
    # Peak on the grid point nearest beta, where Q is exactly 1/pi.
    peak = cavity.q_function(cavity.coherent_state(beta, n), extent=6, points=121)
    peak_val = float(peak.values.max())
    rev = cavity.state_fidelity(cavity.kerr_evolve(psi, k, 1 / k), cavity.coherent_state(-beta, n))
    cat = cavity.state_fidelity(cavity.kerr_evolve(psi, k, 0.5 / k), cavity.cat_state(2, beta, n))
    norms = [cavity.q_function(s).norm for s in (psi, cavity.cat_state(2, beta, n), cavity.fock_state(1, n))]
    el = time.perf_counter() - t0
    report(9, "Kerr and Q function", [
        (f"coherent Q peak {peak_val:.9f} vs 1/pi", abs(peak_val - 1 / math.pi) < 1e-6
         and abs(peak_alpha - (1 + 0.5j)) < 0.06),
        (f"revival fidelity 1-{1 - rev:.1e}", rev > 1 - 1e-9),
        (f"cat overlap at Trev/2 {cat:.12f} (> 0.999)", cat > 0.999),
        (f"Q norms {', '.join(f'{x:.5f}' for x in norms)} (1 +- 0.01)",
         all(abs(x - 1) < 0.01 for x in norms)),
    ], el, 10.0)


def test_criterion_10_spectra_consistency():
    t0 = time.perf_counter()
    ec = 0.25
    f01_dev = 0.0
    for ratio in (50, 100, 150, 200):
        p = transmon.TransmonParams.symmetric(ratio * ec, ec)
        f01 = transmon.transmon_f01_anharmonicity(p)[0]
        approx = transmon.f01_asymptotic(ratio * ec, ec)
        f01_dev = max(f01_dev, abs(f01 - approx) / f01)
    g, delta, ec_q = 0.05, 1.0, 0.3
    fq = 6.257
    q = cqedspec.Qubit.anharmonic(fq, -ec_q, g, 4)
    s = cqedspec.SystemSpec((q,), fq - delta, 6)
    chi_num = cqedspec.chi_exact(s)
    chi_pert = cqedspec.chi_dispersive(g, delta, ec_q)
    chi_dev = abs(chi_pert - chi_num) / abs(chi_num)
    m = cqedspec.CrossingModel(0.05, 0.1)
    ph_dev = abs(cqedspec.crossing_conditional_phase(m) - cqedspec.crossing_phase_numeric(m))
    el = time.perf_counter() - t0
    report(10, "spectra consistency", [
        (f"f01 vs asymptotic max rel dev {f01_dev:.2e} (< 0.02)", f01_dev < 0.02),
        (f"chi perturbative {chi_pert:.4e} vs exact {chi_num:.4e}, rel dev {chi_dev:.3f} (< 0.05)",
         chi_dev < 0.05),
        (f"crossing phase mismatch {ph_dev:.1e} rad (< 1e-3)", ph_dev < 1e-3),
    ], el, 10.0)
