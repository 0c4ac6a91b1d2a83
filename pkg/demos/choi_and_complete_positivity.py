"""
Choi matrices and complete positivity
=====================================

The transposition is positive but not completely positive. Mixing it with
the trace map gives a family that becomes CP only past d/(d+1).
"""
import numpy as np

from cpmaps import is_completely_positive, pcp_family_map, positivity_probe, transposition_map
from cpmaps.compat import choi_spectrum, cp_threshold

# The Choi matrix of the transposition is the flip operator over d.
T = transposition_map(3)
print("Choi spectrum of T, d=3:", np.round(np.linalg.eigvalsh(T.choi), 6))
print("CP verdict:", is_completely_positive(T).is_cp)

# Sampling pure inputs finds no negative output: T is positive.
print("probe:", positivity_probe(T, samples=32, seed=1).status)

# The family mu * trace + (1 - mu) * T
d = 3
for mu in np.linspace(0, 1, 9):
    v = is_completely_positive(pcp_family_map(d, mu))
    plus, minus = choi_spectrum(d, mu)
    print(f"mu={mu:.3f}  CP={v.is_cp!s:5}  min eig={v.min_choi_eigenvalue:+.5f}  closed form={minus:+.5f}")
print("threshold d/(d+1) =", cp_threshold(d))
