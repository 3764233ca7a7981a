"""Transmon levels, flux tuning and cavity-dressed spectra.

Run with ``python3 demos/transmon_and_spectra.py``.
"""
import numpy as np

from cqedwb import cqedspec, transmon

# A symmetric transmon deep in the charge-insensitive regime.
p = transmon.TransmonParams.symmetric(30.0, 0.35)
f01, alpha = transmon.transmon_f01_anharmonicity(p)
print(f"EJ/EC = {30 / 0.35:.1f}: f01 = {f01:.4f} GHz, anharmonicity = {alpha * 1e3:.1f} MHz")
print(f"asymptotic sqrt(8 EJ EC) - EC = {transmon.f01_asymptotic(30.0, 0.35):.4f} GHz")

# Charge dispersion shrinks exponentially with EJ/EC.
for m in (0, 1):
    print(f"level {m}: charge dispersion {transmon.charge_dispersion_exact(m, p) * 1e9:.3e} Hz")

# Tuning with flux trades frequency for sensitivity to 1/f flux noise.
noise = transmon.FluxNoiseParams(1e-5)
for phi in (0.0, 0.1, 0.25):
    t = transmon.tphi_flux_noise(p, noise, phi)
    print(f"flux {phi:.2f} Phi0: Tphi = {t * 1e6:.2f} us")

# Couple an anharmonic qubit to a cavity 1 GHz below it.
g, delta, ec = 0.05, 1.0, 0.3
q = cqedspec.Qubit.anharmonic(6.257, -ec, g, 4)
s = cqedspec.SystemSpec((q,), 6.257 - delta, 6)
print(f"chi exact {cqedspec.chi_exact(s) * 1e3:.4f} MHz, "
      f"perturbative {cqedspec.chi_dispersive(g, delta, ec) * 1e3:.4f} MHz")

# A sudden pass through an avoided crossing imprints a conditional phase.
m = cqedspec.CrossingModel(0.05, 0.1)
print(f"crossing phase: closed form {cqedspec.crossing_conditional_phase(m):.6f} rad, "
      f"propagated {cqedspec.crossing_phase_numeric(m):.6f} rad")
for n in (1, 2, 3):
    print(f"resonant JC doublet n = {n}:", np.round(cqedspec.jc_ladder_energies(n, 0.1, 0.0), 4))
