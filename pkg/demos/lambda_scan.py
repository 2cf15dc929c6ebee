"""
Scanning for a constant null-2-type lambda
==========================================

A null 2-type hypersurface needs lambda = s1^2 - 2 s2 - (Laplacian s1)/s1
to be constant.  Constancy is necessary only, so the scan flags candidates
and never claims membership.
"""

import math

from bclab import analysis, factory, grids
from bclab.errors import MeanCurvatureVanishes
from bclab.profile import integrate_profile

surfaces = [
    factory.sphere(3, 2.0),
    factory.round_cylinder(1, 0.5, 2),
    factory.generalized_rotational(integrate_profile("rotational", 2, 2, (1.0, 1.3, math.pi / 4)), 2, 2),
    factory.generalized_rotational(integrate_profile("rotational", 2, 2), 2, 2),  # the minimal cone
]

for surface in surfaces:
    grid = grids.tensor_grid(surface, {0: 6, 1: 2})
    try:
        scan = analysis.null2type_lambda_scan(surface, grid)
    except MeanCurvatureVanishes as exc:
        print(f"{surface.name}: no lambda, {exc}")
        continue
    print(f"{surface.name}: mean={scan.lambda_mean:.10f} spread={scan.lambda_spread:.2e} candidate={scan.candidate}")
