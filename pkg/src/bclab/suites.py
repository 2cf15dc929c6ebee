"""Verification suites run over a surface, as used by ``bclab verify``.

Each suite yields one :class:`ResidualReport`.  A suite that cannot be
evaluated (a pole on the grid, an unstable frame, ...) is reported as failed
with an infinite residual and the error message, rather than aborting the
whole run.
"""

from __future__ import annotations

import math

import numpy as np

from . import analysis, grids
from .errors import BclabError
from .profile import _fd5, profile_curvature_report
from .report import ResidualReport

DEFAULT_TOLERANCES = {
    "h_condition": 1e-6,
    "codazzi": 1e-4,
    "structural": 1e-6,
    "slice": 1e-8,
    "unit_speed": 1e-8,
    "profile_curvature": 1e-7,
}

PROFILE_FAMILIES = ("rotational", "cylinder")


def _failed(name, tolerance, exc):
    return ResidualReport.from_values(
        name, [(math.nan,)], [math.inf], tolerance, error=f"{type(exc).__name__}: {exc}"
    )


def _guard(name, tolerance, fn):
    try:
        return fn()
    except BclabError as exc:
        return _failed(name, tolerance, exc)


def verification_grid(surface, counts=(20, 5)):
    """Chebyshev tensor grid over the leading parameters, others at the base point."""
    counts = {i: int(c) for i, c in enumerate(counts) if i < surface.dim_domain}
    return grids.tensor_grid(surface, counts)


def slice_reports(surface, tolerance):
    """Fit each parameter block of the chart at the base point.

    On profile charts the fitted radius of the first sphere block must match
    ``psi(s)`` and that of the second must match ``phi(s)``; the residual at
    each sample is the larger of the fit defect and the radius error.
    """
    meta = surface.meta
    u0 = grids.base_point(surface)
    curve = meta.get("profile")
    expected = {}
    if curve is not None:
        psi, phi, _ = curve.state_at(u0[0])
        expected = {"sphere1": psi, "sphere2": phi}
    out = []
    for label, block in sorted(meta.get("blocks", {}).items()):
        if not block:
            continue
        name = f"slice-{label}"

        def run(block=block, label=label, name=name):
            kind = "plane" if label == "flat" else "sphere"
            rep = analysis.slice_sphericity_check(surface, u0, block, tolerance=tolerance, kind=kind)
            values = rep.values
            details = dict(rep.details)
            if label in expected:
                err = abs(rep.details["radius"] - expected[label])
                details.update(expected_radius=float(expected[label]), radius_error=err)
                values = np.maximum(values, err)
            return ResidualReport.from_values(name, rep.grid, values, tolerance, **details)

        out.append(_guard(name, tolerance, run))
    return out


def unit_speed_report(surface, tolerance):
    """``|psi'^2 + phi'^2 - 1|`` from five-point differences of the samples."""
    curve = surface.meta.get("profile")
    if curve is None:
        return ResidualReport.from_values(
            "unit-speed", [(0.0,)], [0.0], tolerance, note="not applicable: no profile curve"
        )
    h = float(np.mean(np.diff(curve.s)))
    dpsi, _ = _fd5(curve.psi, h)
    dphi, _ = _fd5(curve.phi, h)
    defect = np.abs(dpsi**2 + dphi**2 - 1.0)
    return ResidualReport.from_values("unit-speed", [(float(s),) for s in curve.s[2:-2]], defect, tolerance)


def profile_curvature_suite(surface, tolerance):
    curve = surface.meta.get("profile")
    if curve is None:
        return None
    rep = profile_curvature_report(curve, tolerance)
    rep.details.pop("k1", None)
    return rep


def verify_surface(surface, grid_counts=(20, 5), codazzi_points=50, tolerances=None):
    """Run every suite; returns the reports in a fixed order."""
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    grid = verification_grid(surface, grid_counts)
    is_profile = surface.meta.get("family") in PROFILE_FAMILIES

    reports = [
        _guard("h-condition", tol["h_condition"], lambda: analysis.h_condition_report(surface, grid, tol["h_condition"])),
        _guard(
            "codazzi",
            tol["codazzi"],
            lambda: analysis.codazzi_report(surface, grids.halton_grid(surface, codazzi_points), tol["codazzi"]),
        ),
        _guard(
            "structural-identity",
            tol["structural"],
            lambda: analysis.structural_identity_check(
                surface,
                grid,
                tol["structural"],
                fallback_direction=0 if is_profile else None,
                vacuous=not is_profile,
            ),
        ),
    ]
    reports += slice_reports(surface, tol["slice"])
    reports.append(unit_speed_report(surface, tol["unit_speed"]))
    extra = profile_curvature_suite(surface, tol["profile_curvature"])
    if extra is not None:
        reports.append(extra)
    return reports, tol
