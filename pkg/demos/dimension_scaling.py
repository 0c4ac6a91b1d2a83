"""
Shrinking compatibility with dimension
======================================

At fixed mu the interval of compatible entangled isotropic states has
length mu(d-1)/(d^2(1-mu)), which falls off like 1/d.
"""
import numpy as np

from cpmaps import v_comp

ds = np.array([2, 4, 8, 16, 32, 64, 128])
for mu in (0.1, 0.5):
    v = np.array([v_comp(int(d), mu) for d in ds])
    print(f"mu={mu}")
    for d, x in zip(ds, v):
        print(f"   d={d:4d}  V_comp={x:.6f}  d*V_comp={d * x:.4f}")
