"""
Building a rotational H-hypersurface in E^6
===========================================

A profile curve (psi(s), phi(s)) obeying the rotational curvature equation
is integrated, lifted to a hypersurface

    x = (psi(s) Theta1(t2, t3), phi(s) Theta2(t4, t5)),

and checked pointwise.  We also run an ellipsoid through the same checks to
see that the verifier can say no.
"""

import math

from bclab import analysis, factory, grids
from bclab.geometry import curvature_spectrum
from bclab.profile import integrate_profile, profile_curvature_report

###############################################################################
# Integrate the profile
# ---------------------
# psi0 != phi0 keeps us off the straight cone psi = phi, on which the mean
# curvature vanishes identically and most checks become vacuous.
curve = integrate_profile("rotational", p=2, q=2, initial=(1.0, 1.3, math.pi / 4), s_max=0.5, local_tol=1e-10)
print(f"{len(curve)} samples on s in {curve.s_range}, {curve.stats.accepted} accepted steps")
print("curvature condition defect on the samples:", profile_curvature_report(curve).max)

###############################################################################
# Lift to a hypersurface and look at its spectrum
surface = factory.generalized_rotational(curve, 2, 2)
u = grids.base_point(surface)
print(surface.name, "groups:", curvature_spectrum(surface, u).groups)

###############################################################################
# The defining condition S(grad s1) = -(s1/2) grad s1 on a 20 x 5 grid
grid = grids.tensor_grid(surface, {0: 20, 1: 5})
print("H-residual max:", analysis.h_condition_report(surface, grid).max)
print("|3 k1 + k2 + ... + kn| max:", analysis.structural_identity_check(surface, grid).max)
print("Codazzi max (25 points):", analysis.codazzi_report(surface, grids.halton_grid(surface, 25)).max)

###############################################################################
# Negative control
# ----------------
ellipsoid = factory.ellipsoid((1.0, 1.3, 1.7))
print("ellipsoid H-residual max:", analysis.h_condition_report(ellipsoid, grids.halton_grid(ellipsoid, 50)).max)
print("ellipsoid Codazzi max:", analysis.codazzi_report(ellipsoid, grids.halton_grid(ellipsoid, 10)).max)
