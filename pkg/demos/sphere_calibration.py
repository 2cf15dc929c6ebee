"""
Principal curvatures of round spheres
=====================================

Spheres are the simplest calibration target: every direction is principal
and every principal curvature equals 1/r.  The chart normal points inward,
so the curvatures come out positive.
"""

import numpy as np

from bclab import factory, grids
from bclab.geometry import local_geometry, mean_curvatures

###############################################################################
# One sphere, one point
# ---------------------
sphere = factory.sphere(n=4, r=0.5)
u = grids.base_point(sphere)
lg = local_geometry(sphere, u)

print(sphere.name)
print("  principal curvatures:", lg.spectrum.eigenvalues)
print("  groups (value, multiplicity):", lg.spectrum.groups)

###############################################################################
# s1 is the trace of the shape operator and s2 the second elementary
# symmetric function, so for S^n(r) we expect n/r and C(n, 2)/r^2.
for n in (3, 4, 5):
    for r in (0.5, 1.0, 2.0):
        s1, s2 = mean_curvatures(local_geometry(factory.sphere(n, r), np.full(n, 1.0)).spectrum)
        print(f"n={n} r={r}: s1={s1:.12f} (expect {n / r}), s2={s2:.12f} (expect {n * (n - 1) / 2 / r**2})")

###############################################################################
# A product S^2(1) x E^2 has two curvature groups
cyl = factory.round_cylinder(p=2, r=1.0, q=2)
print(cyl.name, local_geometry(cyl, grids.base_point(cyl)).spectrum.groups)
