"""Joint-readout state tomography and chi-matrix process tomography.

Run with ``python3 demos/tomography.py``.
"""
import math

import numpy as np

from cqedwb import tomo
from cqedwb.numkit import basis_state, dm, pauli_labels

rng = np.random.default_rng(7)

# A joint readout whose voltage depends on all three qubits.
m = tomo.MeasurementModel(3, tuple(rng.normal(size=8)))
ghz = dm((basis_state("000") + basis_state("111")) / math.sqrt(2))
v = tomo.simulate_voltages(ghz, m, noise_sigma=1e-3, rng=rng)
est = tomo.reconstruct_state(v, m)
print(f"63 pre-rotations, design condition number {est.condition:.1f}")
for lab, val in zip(pauli_labels(3), est.paulis):
    if abs(val) > 0.1:
        print(f"  <{lab}> = {val:+.3f}")

# Process tomography of a controlled-phase gate from 16 input states.
u = np.diag([1, 1, 1, -1]).astype(complex)
preps = tomo.standard_preps(2)
chi = tomo.process_tomography(preps, [u @ r @ u.conj().T for r in preps])
labels = pauli_labels(2, include_identity=True)
for k in np.flatnonzero(np.abs(np.diag(chi)) > 1e-9):
    print(f"chi[{labels[k]},{labels[k]}] = {chi[k, k].real:.3f}")
print(f"fidelity to the ideal gate: {tomo.process_fidelity(chi, tomo.chi_of_unitary(u)):.6f}")
