"""Single-qubit pulses, the AllXY diagnostic and dispersive readout.

Run with ``python3 demos/pulses_and_readout.py``.
"""
import numpy as np

from cqedwb import pulsectl, readout
from cqedwb.pulsectl import PulseErrorModel

# Ideal AllXY staircase, then one with a small amplitude and detuning error.
ideal = pulsectl.allxy_simulate()
bad = pulsectl.allxy_simulate(PulseErrorModel(power_db=0.2, detuning_frac=0.02))
for lab, z0, z in zip(ideal.labels, ideal.z, bad.z):
    print(f"{lab:6s} ideal {z0:+.0f}  with errors {z:+.4f}")

# Project the error pattern back onto the two syndromes.
fit = pulsectl.allxy_syndrome_fit(bad)
print("syndrome coefficients:", {k: round(v, 4) for k, v in fit.coefficients.items()},
      f"residual {fit.residual:.2e}")

# Dispersive readout: the pointer states separate when chi is comparable to kappa.
for chi in (0.0, 0.001, 0.003):
    p = readout.ReadoutParams(eps_rf=0.02, chi_ghz=chi, kappa_in_ghz=0.004)
    print(f"chi {chi * 1e3:.0f} MHz: pointer overlap {readout.distinguishability(p):.3f}")
snr = readout.measurement_snr(readout.ReadoutParams(chi_ghz=0.01, kappa_in_ghz=0.0025,
                                                    kappa_out_ghz=0.0025, t1_s=3e-6, n_bar=10,
                                                    omega_r_ghz=8.0, tn_K=10.0))
print(f"SNR with a 10 K amplifier: {snr:.1f}")

# Very strong drive at the bare cavity frequency switches on a bright state.
b = readout.BrightStateParams(0.05, 0.5, 0.001, 6.0)
for xi in np.geomspace(0.01, 0.1, 5):
    print(f"drive {xi:.4f}: photons {readout.bright_state_solve(b, xi, 6.0)[0].a2:.1f}")
