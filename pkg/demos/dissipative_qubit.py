"""
A dissipative qubit semigroup
=============================

H = 0 and Kossakowski matrix diag(1, 1, a) in the Pauli basis. The Bloch
vector decays as (e^{-(1+a)t} r1, e^{-(1+a)t} r2, e^{-2t} r3).
"""
import numpy as np

from cpmaps import bloch_to_density, density_to_bloch, evolve_map, qubit_pauli_generator
from cpmaps.semigroup import qubit_bloch_solution, qubit_classification_evidence

r0 = np.array([1.0, 0.0, 0.0])
ts = np.linspace(0, 2, 5)

for a in (0.5, -0.5, -1.2):
    g = qubit_pauli_generator(a)
    ev = qubit_classification_evidence(a)
    print(f"a={a:+.1f}: {ev.classification.value}, min Choi eigenvalue of Lambda_{ev.t:g} = "
          f"{ev.min_choi_eigenvalue:+.2e}")
    for t in ts:
        r = density_to_bloch(evolve_map(g, t).apply(bloch_to_density(r0)))
        exact = qubit_bloch_solution(a, r0, t)
        print(f"   t={t:.1f}  r={np.round(r, 5)}  |r|={np.linalg.norm(r):.4f}  err={np.abs(r - exact).max():.1e}")

# for a < -1 the norm exceeds one: the map sends a state outside the Bloch ball
