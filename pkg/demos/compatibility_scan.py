"""
Compatible entangled isotropic states
=====================================

For mu below the CP threshold, only isotropic states up to F_comp keep a
positive image under the lifted map. The entangled ones among them form an
interval of length V_comp.
"""
import numpy as np

from cpmaps.compat import compat_scan, f_comp_bisection, lifted_isotropic_spectrum, scan_to_csv

print(scan_to_csv(compat_scan([2, 3, 4], [0.0, 0.25, 0.5], verify=True)))

# E- changes sign exactly at F_comp
d, mu = 3, 0.5
edge = f_comp_bisection(d, mu)
for F in (edge - 1e-3, edge, edge + 1e-3):
    print(f"F={F:.6f}  E-={lifted_isotropic_spectrum(d, mu, F).e_minus:+.2e}")
