"""Kerr evolution of a coherent state: rotation, cats and revival.

Run with ``python3 demos/kerr_cats.py``.
"""
import cmath

from cqedwb import cavity

n, beta, k = 40, 1.5, 1e-3
psi = cavity.coherent_state(beta, n)

# Early on the Q function rotates at a rate set by the mean photon number.
t = 0.02 / k
c = cavity.q_function(cavity.kerr_evolve(psi, k, t)).centroid()
print(f"rotation after {t:.0f} ns: predicted {cavity.kerr_rotation_angle(k, t, beta):.4f} rad, "
      f"Q centroid {cmath.phase(c):.4f} rad")

# At 1/(qK) the state is a q-component cat; at 1/K it revives as |-beta>.
for q in (4, 3, 2):
    f = cavity.state_fidelity(cavity.kerr_evolve(psi, k, 1 / (q * k)), cavity.cat_state(q, beta, n))
    print(f"t = Trev/{q}: overlap with the {q}-component cat {f:.9f}")
f = cavity.state_fidelity(cavity.kerr_evolve(psi, k, 1 / k), cavity.coherent_state(-beta, n))
print(f"t = Trev: overlap with |-beta> {f:.12f}")

# The qubit line splits into photon-number peaks 2 chi apart.
for df, w in cavity.number_splitting_spectrum(-0.002, 1.5, 6):
    print(f"  offset {df * 1e3 + 0.0:+.1f} MHz weight {w:.3f}")
