"""Acceptance criteria 1-9, one PASS/FAIL line each.

Run under pytest (lines are printed even with output capture on) or as a
script: ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from bclab import analysis, factory, grids
from bclab.cli import main as cli_main
from bclab.geometry import jet_fd_discrepancy, local_geometry, mean_curvatures
from bclab.profile import integrate_profile, self_convergence_order, theta_derivatives

STATED_INITIAL = (1.0, 1.0, math.pi / 4)
# companion data off the psi = phi fixed point, where grad s1 does not vanish
GENERIC_INITIAL = (1.0, 1.3, math.pi / 4)


def _fmt(x):
    return f"{x:.2e}"


# ---------------------------------------------------------------------------


def criterion_1():
    """Sphere calibration."""
    t0 = time.perf_counter()
    worst_k = worst_s = 0.0
    for n, r in itertools.product((3, 4, 5), (0.5, 1.0, 2.0)):
        surface = factory.sphere(n, r)
        for u in grids.halton_grid(surface, 5):
            spec = local_geometry(surface, u).spectrum
            s1, s2 = mean_curvatures(spec)
            worst_k = max(worst_k, float(np.max(np.abs(spec.eigenvalues - 1 / r))))
            worst_s = max(worst_s, abs(s1 - n / r), abs(s2 - math.comb(n, 2) / r**2))
    elapsed = time.perf_counter() - t0
    ok = worst_k < 1e-9 and worst_s < 1e-9 and elapsed < 1.0
    return ok, f"max|k-1/r|={_fmt(worst_k)} max s1/s2 err={_fmt(worst_s)} time={elapsed:.2f}s"


def criterion_2():
    """Codazzi on every factory family, 50 generic points each."""
    t0 = time.perf_counter()
    surfaces = [
        factory.sphere(3, 1.0),
        factory.round_cylinder(2, 1.0, 2),
        factory.ellipsoid((1.0, 1.3, 1.7)),
        factory.torus(2.0, 0.7, 3),
        factory.generalized_rotational(integrate_profile("rotational", 2, 2, STATED_INITIAL), 2, 2),
        factory.generalized_rotational(integrate_profile("rotational", 2, 2, GENERIC_INITIAL), 2, 2),
        factory.generalized_cylinder(integrate_profile("cylinder", 2, 2, STATED_INITIAL), 2, 2),
    ]
    worst = {s.name: analysis.codazzi_report(s, grids.halton_grid(s, 50)).max for s in surfaces}
    elapsed = time.perf_counter() - t0
    top = max(worst.values())
    ok = top < 1e-4 and elapsed < 10.0
    return ok, f"max Codazzi={_fmt(top)} over {len(surfaces)} surfaces time={elapsed:.2f}s"


def _profile_round_trip(family, initial):
    """H-residual, structural identities, multiplicities and S entries on a 20x5 grid."""
    curve = integrate_profile(family, 2, 2, initial, 0.5, 1e-10)
    build = factory.generalized_rotational if family == "rotational" else factory.generalized_cylinder
    surface = build(curve, 2, 2)
    grid = grids.tensor_grid(surface, {0: 20, 1: 5})
    h_max = analysis.h_condition_report(surface, grid).max
    ident = half = s_err = flat = 0.0
    patterns = set()
    for u in grid:
        lg = local_geometry(surface, u, 3)
        spec = lg.spectrum
        patterns.add(tuple(sorted(spec.multiplicities)))
        # k1: principal curvature along d/ds (the profile direction)
        i1 = int(np.argmax(np.abs(spec.eigenvectors.T @ lg.metric.g[:, 0])))
        k = spec.eigenvalues
        k1 = k[i1]
        ident = max(ident, abs(3 * k1 + (k.sum() - k1)))
        half = max(half, abs(k1 + lg.s1 / 2))
        psi, phi, theta = curve.state_at(u[0])
        kp = theta_derivatives((psi, phi, theta), family, 2, 2)[0]
        k2 = math.sin(theta) / psi
        k3 = -math.cos(theta) / phi if family == "rotational" else 0.0
        s_err = max(s_err, float(np.max(np.abs(lg.S - np.diag([kp, k2, k2, k3, k3])))))
        if family == "cylinder":
            # curvatures whose principal directions lie in the flat parameter block
            block = surface.meta["blocks"]["flat"]
            in_flat = [i for i in range(k.size) if np.linalg.norm(spec.eigenvectors[block, i]) > 0.5]
            flat = max(flat, float(np.max(np.abs(k[in_flat]))) if len(in_flat) == len(block) else math.inf)
    ok = h_max < 1e-6 and ident < 1e-6 and half < 1e-6 and patterns == {(1, 2, 2)} and s_err < 1e-6
    detail = (
        f"H={_fmt(h_max)} 3k1+sum={_fmt(ident)} k1+s1/2={_fmt(half)} "
        f"mult={sorted(patterns)} S-diag={_fmt(s_err)}"
    )
    return ok, detail, surface, flat


def criterion_3():
    """Rotational round trip, stated data plus a non-degenerate companion."""
    t0 = time.perf_counter()
    ok_a, det_a, _, _ = _profile_round_trip("rotational", STATED_INITIAL)
    elapsed = time.perf_counter() - t0
    ok_b, det_b, _, _ = _profile_round_trip("rotational", GENERIC_INITIAL)
    ok = ok_a and ok_b and elapsed < 30.0
    return ok, f"stated[{det_a} time={elapsed:.2f}s] companion[{det_b}]"


def criterion_4():
    """Cylinder round trip with the flat block checks."""
    ok, detail, surface, flat = _profile_round_trip("cylinder", STATED_INITIAL)
    plane = max(
        analysis.slice_sphericity_check(surface, u, surface.meta["blocks"]["flat"], kind="plane").max
        for u in grids.halton_grid(surface, 5)
    )
    ok = ok and flat < 1e-8 and plane < 1e-10
    return ok, f"{detail} flat|k|={_fmt(flat)} plane-fit={_fmt(plane)}"


def criterion_5():
    """Negative controls must fail the H-condition."""
    out = {}
    for surface in (factory.ellipsoid((1.0, 1.3, 1.7)), factory.torus(2.0, 0.7, 3)):
        grid = grids.tensor_grid(surface, {0: 20, 1: 5}) + grids.halton_grid(surface, 50)
        out[surface.name] = analysis.h_condition_report(surface, grid).max
    ok = all(v > 1e-2 for v in out.values())
    return ok, " ".join(f"{k}: H={_fmt(v)}" for k, v in out.items())


def criterion_6():
    """Sphere-block slices of the rotational family are round with radius psi(s)."""
    fit = rad = 0.0
    for initial in (STATED_INITIAL, GENERIC_INITIAL):
        curve = integrate_profile("rotational", 2, 2, initial)
        surface = factory.generalized_rotational(curve, 2, 2)
        for u in grids.tensor_grid(surface, {0: 5}):
            psi, phi, _ = curve.state_at(u[0])
            for block, radius in ((surface.meta["blocks"]["sphere1"], psi), (surface.meta["blocks"]["sphere2"], phi)):
                rep = analysis.slice_sphericity_check(surface, u, block, kind="sphere")
                fit = max(fit, rep.max)
                rad = max(rad, abs(rep.details["radius"] - radius))
    ok = fit < 1e-8 and rad < 1e-8
    return ok, f"sphere-fit={_fmt(fit)} |R-psi|={_fmt(rad)}"


def criterion_7():
    """e_n integral curves: circles (rotational, q=1) and lines (cylinder)."""
    rot = factory.generalized_rotational(integrate_profile("rotational", 2, 1, GENERIC_INITIAL), 2, 1)
    cyl = factory.generalized_cylinder(integrate_profile("cylinder", 2, 1, STATED_INITIAL), 2, 1)
    circ = 0.0
    kinds = set()
    for u in grids.halton_grid(rot, 3):
        kind, resid, _ = analysis.en_curve_circle_check(rot, u)
        kinds.add(kind)
        circ = max(circ, resid)
    line = 0.0
    line_kinds = set()
    for u in grids.halton_grid(cyl, 3):
        kind, _, curvature = analysis.en_curve_circle_check(cyl, u)
        line_kinds.add(kind)
        line = max(line, curvature)
    ok = kinds == {"circle"} and circ < 1e-6 and line_kinds == {"line"} and line < 1e-8
    return ok, f"rotational q=1 {sorted(kinds)} fit={_fmt(circ)}; cylinder {sorted(line_kinds)} curvature={_fmt(line)}"


def criterion_8():
    """Jet hygiene, integrator order and lambda constancy on CMC surfaces."""
    surfaces = [
        factory.sphere(3, 0.5),
        factory.plane(3),
        factory.round_cylinder(2, 1.0, 2),
        factory.ellipsoid((1.0, 1.3, 1.7)),
        factory.torus(),
        factory.generalized_rotational(integrate_profile("rotational", 2, 2, STATED_INITIAL), 2, 2),
        factory.generalized_rotational(integrate_profile("rotational", 2, 2, GENERIC_INITIAL), 2, 2),
        factory.generalized_cylinder(integrate_profile("cylinder", 2, 2, STATED_INITIAL), 2, 2),
    ]
    jet = max(max(jet_fd_discrepancy(s, u).values()) for s in surfaces for u in grids.halton_grid(s, 3))
    orders = [
        self_convergence_order("rotational", 2, 2, GENERIC_INITIAL, 0.5),
        self_convergence_order("cylinder", 2, 2, STATED_INITIAL, 0.5),
        self_convergence_order("rotational", 2, 1, GENERIC_INITIAL, 0.5),
    ]
    spread = 0.0
    for cmc in (factory.sphere(3, 2.0), factory.sphere(4, 0.5), factory.round_cylinder(1, 0.5, 2), factory.round_cylinder(2, 1.0, 1)):
        spread = max(spread, analysis.null2type_lambda_scan(cmc, grids.halton_grid(cmc, 10)).lambda_spread)
    ok = jet < 1e-5 and min(orders) >= 4 and spread < 1e-8
    return ok, f"jet-vs-FD={_fmt(jet)} order>={min(orders):.2f} lambda-spread={_fmt(spread)}"


def _pipeline(root):
    """Generate, verify and scan a set of surfaces through the CLI; returns the files written."""
    root = Path(root)
    jobs = [
        ("rot", ["--family", "rotational", "--p", "2", "--q", "2", "--obj"]),
        ("rotg", ["--family", "rotational", "--initial", "1", "1.3", "0.7853981633974483"]),
        ("cyl", ["--family", "cylinder", "--p", "2", "--q", "2"]),
        ("ell", ["--family", "ellipsoid", "--semi-axes", "1", "1.3", "1.7"]),
        ("rc", ["--family", "round_cylinder", "--p", "1", "--q", "2", "--r", "0.5"]),
    ]
    for name, args in jobs:
        out = root / name
        cli_main(["generate", "--out", str(out)] + args)
        cli_main(["verify", "--manifest", str(out / "manifest.json"), "--out", str(out)])
    cli_main(["scan-lambda", "--manifest", str(root / "rc" / "manifest.json"), "--out", str(root / "rc" / "scan.json")])
    cli_main(["scan-lambda", "--manifest", str(root / "rotg" / "manifest.json"), "--out", str(root / "rotg" / "scan.json")])
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


def criterion_9():
    """Two consecutive runs of the CLI pipeline give byte-identical files."""
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        first, second = _pipeline(a), _pipeline(b)
    differing = sorted(k for k in first if first.get(k) != second.get(k))
    ok = first.keys() == second.keys() and not differing and len(first) >= 16
    return ok, f"{len(first)} files compared, {len(differing)} differ"


CRITERIA = {
    1: ("sphere calibration", criterion_1),
    2: ("Codazzi universality", criterion_2),
    3: ("rotational family round trip", criterion_3),
    4: ("cylinder family round trip", criterion_4),
    5: ("negative controls", criterion_5),
    6: ("slice sphericity", criterion_6),
    7: ("e_n integral curves", criterion_7),
    8: ("numerical hygiene", criterion_8),
    9: ("determinism", criterion_9),
}


def _line(number):
    title, fn = CRITERIA[number]
    ok, detail = fn()
    return ok, f"[acceptance {number}] {'PASS' if ok else 'FAIL'} {title}: {detail}"


def _check(number, capsys):
    ok, line = _line(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def test_criterion_1_sphere_calibration(capsys):
    _check(1, capsys)


def test_criterion_2_codazzi_universality(capsys):
    _check(2, capsys)


def test_criterion_3_rotational_round_trip(capsys):
    _check(3, capsys)


def test_criterion_4_cylinder_round_trip(capsys):
    _check(4, capsys)


def test_criterion_5_negative_controls(capsys):
    _check(5, capsys)


def test_criterion_6_slice_sphericity(capsys):
    _check(6, capsys)


def test_criterion_7_integral_curves(capsys):
    _check(7, capsys)


def test_criterion_8_numerical_hygiene(capsys):
    _check(8, capsys)


def test_criterion_9_determinism(capsys):
    _check(9, capsys)


if __name__ == "__main__":
    results = [_line(n) for n in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
