"""Three-qubit repetition codes, Toffoli constructions and witnesses.

Run with ``python3 demos/error_correction.py``.
"""
import math

import numpy as np

from cqedwb import qec
from cqedwb.numkit import basis_state

# Fidelity of the corrected data qubit against the error probability.
sweep = qec.qec_fidelity_sweep("phase", np.linspace(0, 1, 41))
c0, c1, c2, c3 = sweep.coefficients
print(f"cubic fit: {c0:.4f} + {c1:.1e} p + {c2:.4f} p^2 + {c3:.4f} p^3")
for p in (0.1, 0.3, 0.5):
    print(f"p = {p}: corrected {qec.code_fidelity('phase', p):.4f}, bare {1 - p:.4f}")

# The four-cNOT Toffoli only adds a phase on the ancillas.
full, opt, _ = qec.toffoli_constructions()
print(f"six-cNOT build vs Toffoli: {qec.equal_up_to_phase(qec.circuit_unitary(full), qec.toffoli_matrix()):.1e}")

# Entanglement witnesses for GHZ and a product state.
for name, psi in (("GHZ", (basis_state("000") + basis_state("111")) / math.sqrt(2)),
                  ("|000>", basis_state("000"))):
    w = qec.witnesses(psi)
    print(f"{name}: M_S1 {w.M_S1:+.3f}, M_P1 {w.M_P1:+.3f}, GHZ fidelity {w.ghz_fidelity:.3f}")
