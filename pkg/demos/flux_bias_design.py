"""Flux-bias line design: mutual flux, screening and lifetime limits.

Run with ``python3 demos/flux_bias_design.py``.
"""
from dataclasses import replace

import numpy as np

from cqedwb import fluxdesign
from cqedwb.transmon import PHI0

UM = 1e-6

# A 100 um square loop 400 um from a 500 um long line carrying 1 mA.
loop = fluxdesign.FblGeometry(500 * UM, 400 * UM, 100 * UM, 100 * UM)
print(f"flux through the loop: {fluxdesign.flux_f(loop) / PHI0:.3f} Phi0")
for alt in (0, 100, 400):
    g = replace(loop, altitude_A_m=alt * UM)
    print(f"  loop raised {alt} um: {fluxdesign.flux_g_altitude(g) / PHI0:.3f} Phi0")

# A superconducting ground plane a distance w below screens the field.
for ratio in np.geomspace(0.1, 10, 5):
    print(f"d/w = {ratio:6.2f}: G = {fluxdesign.screening_G(ratio, 1.0):.4e}")

dev = fluxdesign.FblGeometry(500 * UM, 790 * UM, 325 * UM, 325 * UM, plate_gap_w_m=1e-3)
print(f"current for one flux quantum: {fluxdesign.required_current(dev) * 1e3:.3f} mA")

# Relaxation through the line, with and without an on-chip filter.
w = fluxdesign.ghz_to_omega(9.0)
bare = fluxdesign.FblCircuit(0.25e-15, 40e-15, 0.5e-9)
filt = replace(bare, cg_F=10e-12, lf_H=1e-9)
for name, fn, c in (("unfiltered", fluxdesign.fbl_unfiltered_Y, bare),
                    ("filtered", fluxdesign.fbl_filtered_Y, filt)):
    yc, yd = fn(c, w)
    tc, td = (fluxdesign.t1_from_admittance(c.csigma_F, y) for y in (yc, yd))
    print(f"{name}: T1 common {tc:.3e} s, differential {td:.3e} s")
