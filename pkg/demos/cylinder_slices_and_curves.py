"""
Slices and integral curves
==========================

Coordinate slices of the two families are round spheres or flat planes, and
the integral curves of the last principal direction are circles (rotational
family with q = 1) or straight lines (cylinder family).
"""

import math

from bclab import analysis, factory, grids
from bclab.profile import integrate_profile

rot = factory.generalized_rotational(integrate_profile("rotational", 2, 1, (1.0, 1.3, math.pi / 4)), 2, 1)
cyl = factory.generalized_cylinder(integrate_profile("cylinder", 2, 1), 2, 1)

###############################################################################
# Slices through the base point
for surface in (rot, cyl):
    u0 = grids.base_point(surface)
    for label, block in surface.meta["blocks"].items():
        rep = analysis.slice_sphericity_check(surface, u0, block)
        extra = f" radius={rep.details['radius']:.12f}" if "radius" in rep.details else ""
        print(f"{surface.name} {label}: {rep.details['kind']} fit residual {rep.max:.2e}{extra}")
    psi, phi, _ = surface.meta["profile"].state_at(u0[0])
    print(f"  profile at s={u0[0]:.4f}: psi={psi:.12f} phi={phi:.12f}")

###############################################################################
# Trace e_n and fit a circle or a line to it
for surface in (rot, cyl):
    kind, resid, curvature = analysis.en_curve_circle_check(surface, grids.base_point(surface))
    print(f"{surface.name}: e_n curve is a {kind}, fit residual {resid:.2e}, curvature {curvature:.6f}")
