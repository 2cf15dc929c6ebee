"""Pointwise and grid checks of the curvature identities.

Conventions: ``laplace_beltrami_s1`` returns ``div grad s1`` (non-negative
spectrum sign).  The null-2-type relation and the normal part of
``Delta^2 x`` are written with the geometers' Laplacian ``-div grad``, the
sign under which those relations hold; see :func:`null2type_lambda`.

The H-residual ``|S(grad s1) + (s1/2) grad s1|`` is unchanged when the
normal is flipped (``S``, ``s1`` and ``grad s1`` all change sign), so it
does not depend on the orientation convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import (
    CurveLeftDomain,
    GradientVanishes,
    InsufficientSamples,
    MeanCurvatureVanishes,
    NearPole,
    OutOfDomain,
    RankDeficient,
    UnstableFrame,
)
from .geometry import local_geometry, mean_curvatures
from .grids import grid_map
from .report import ResidualReport

GRAD_FLOOR = 1e-7
S1_FLOOR = 1e-7
KAPPA_FLOOR = 1e-8
LAMBDA_TOL = 1e-3
H_LB = 1e-3
H_FRAME = 1e-3

_W5 = ((-2.0, 1.0 / 12), (-1.0, -8.0 / 12), (1.0, 8.0 / 12), (2.0, -1.0 / 12))


def _near(surface, u, order=3):
    try:
        return local_geometry(surface, u, order)
    except (OutOfDomain, RankDeficient) as exc:
        raise NearPole(str(exc)) from exc


# ---------------------------------------------------------------------------
# gradient of s1 and eigenvalue derivatives


def s1_differential(lg):
    """Chart components ``d s1 / d u_l`` from the order-3 jet."""
    dg, dh = lg.derivative_tensors()
    g_inv, S = lg.metric.g_inv, lg.S
    return np.array([np.trace(g_inv @ (dh[l] - dg[l] @ S)) for l in range(dg.shape[0])])


def mean_curvature_gradient(surface, u, lg=None):
    """``grad s1`` in chart components, ``g^{ij} d_j s1``."""
    lg = _near(surface, u) if lg is None else lg
    return lg.metric.g_inv @ s1_differential(lg)


def eigenvalue_differentials(lg):
    """``dk[i, l] = d k_i / d u_l`` by first-order perturbation.

    For a repeated eigenvalue the derivative of its group mean is returned
    for every member, which is the only frame-independent quantity.
    """
    dg, dh = lg.derivative_tensors()
    spec = lg.spectrum
    V, k = spec.eigenvectors, spec.eigenvalues
    n = k.size
    raw = np.empty((n, dg.shape[0]))
    for i in range(n):
        v = V[:, i]
        raw[i] = np.einsum("a,lab,b->l", v, dh - k[i] * dg, v)
    out = raw.copy()
    for gi in range(len(spec.groups)):
        members = spec.group_members(gi)
        out[members] = raw[members].mean(axis=0)
    return out


def g_norm(lg, v):
    return float(math.sqrt(max(v @ lg.metric.g @ v, 0.0)))


def h_condition_residual(surface, u, lg=None):
    """``|| S(grad s1) + (s1 / 2) grad s1 ||_g``."""
    lg = _near(surface, u) if lg is None else lg
    grad = mean_curvature_gradient(surface, u, lg)
    return g_norm(lg, lg.S @ grad + 0.5 * lg.s1 * grad)


def gradient_alignment(surface, u, lg=None):
    """``(k, |sin angle|)`` for the principal direction closest to ``grad s1``."""
    lg = _near(surface, u) if lg is None else lg
    grad = mean_curvature_gradient(surface, u, lg)
    norm = g_norm(lg, grad)
    if norm <= GRAD_FLOOR:
        raise GradientVanishes(f"|grad s1| = {norm:.3e} at {np.asarray(u).tolist()}")
    V = lg.spectrum.eigenvectors
    cosines = np.abs(V.T @ lg.metric.g @ grad) / norm
    i = int(np.argmax(cosines))
    sine = math.sqrt(max(0.0, 1.0 - min(1.0, cosines[i]) ** 2))
    return float(lg.spectrum.eigenvalues[i]), sine, i


# ---------------------------------------------------------------------------
# Laplacian, null 2-type, biharmonic


def laplace_beltrami_s1(surface, u, h_lb=H_LB):
    """``(1/sqrt g) d_i (sqrt g g^{ij} d_j s1)`` by five-point differences of the flux."""
    u = np.asarray(u, dtype=float)
    base = _near(surface, u)
    div = 0.0
    for i in range(u.size):
        acc = 0.0
        for off, w in _W5:
            v = u.copy()
            v[i] += off * h_lb
            lg = _near(surface, v)
            flux = lg.metric.sqrt_det_g * (lg.metric.g_inv @ s1_differential(lg))
            acc += w * flux[i]
        div += acc / h_lb
    return div / base.metric.sqrt_det_g


def null2type_lambda(s1, s2, lap_s1):
    """``lambda`` solving ``-lap s1 = -s1 (s1^2 - 2 s2 - lambda)``, i.e.
    ``s1^2 - 2 s2 - lap s1 / s1`` with ``lap = div grad``."""
    return s1 * s1 - 2.0 * s2 - lap_s1 / s1


@dataclass(frozen=True)
class Null2TypeScan:
    grid: list
    lambda_values: np.ndarray
    lambda_mean: float
    lambda_spread: float
    s1_floor: float
    candidate: bool
    tolerance: float

    def to_dict(self):
        return {
            "grid": [list(map(float, p)) for p in self.grid],
            "lambda_values": self.lambda_values.tolist(),
            "lambda_mean": self.lambda_mean,
            "lambda_spread": self.lambda_spread,
            "s1_floor": self.s1_floor,
            "candidate": self.candidate,
            "tolerance": self.tolerance,
        }


def null2type_lambda_scan(surface, grid, s1_floor_tol=S1_FLOOR, lambda_tol=LAMBDA_TOL, h_lb=H_LB):
    """Per-point ``lambda`` and its spread; constancy is necessary, not sufficient."""
    grid = [np.asarray(u, dtype=float) for u in grid]

    def one(u):
        lg = _near(surface, u)
        s1, s2 = mean_curvatures(lg.spectrum)
        if abs(s1) <= s1_floor_tol:
            raise MeanCurvatureVanishes(f"|s1| = {abs(s1):.3e} at {u.tolist()}")
        return abs(s1), null2type_lambda(s1, s2, laplace_beltrami_s1(surface, u, h_lb))

    rows = grid_map(one, grid)
    s1_abs = np.array([r[0] for r in rows])
    lam = np.array([r[1] for r in rows])
    spread = float(np.ptp(lam))
    return Null2TypeScan(
        grid=grid,
        lambda_values=lam,
        lambda_mean=float(lam.mean()),
        lambda_spread=spread,
        s1_floor=float(s1_abs.min()),
        candidate=spread < lambda_tol,
        tolerance=lambda_tol,
    )


def biharmonic_residual(surface, u, h_lb=H_LB):
    """``(normal, tangent)`` parts of ``Delta^2 x``; both vanish iff biharmonic at ``u``."""
    lg = _near(surface, u)
    s1, s2 = mean_curvatures(lg.spectrum)
    lap = laplace_beltrami_s1(surface, u, h_lb)
    normal = abs(-lap + s1 * (s1 * s1 - 2.0 * s2))
    return normal, h_condition_residual(surface, u, lg)


# ---------------------------------------------------------------------------
# principal frame, connection forms, Codazzi


def ambient_frame(lg):
    """Orthonormal principal frame as ambient vectors, columns ``e_1..e_n``."""
    return lg.jet.jacobian @ lg.spectrum.eigenvectors


def _check_gaps(spec):
    values = [v for v, _ in spec.groups]
    if len(values) > 1 and np.min(-np.diff(values)) <= spec.eps_cluster:
        raise UnstableFrame("principal curvature groups are not separated")


def _aligned_neighbor(surface, v, base):
    """Principal frame at ``v`` rotated within each group onto the frame at the base."""
    lg = _near(surface, v, 2)
    spec = base.spectrum
    if lg.spectrum.multiplicities != spec.multiplicities:
        raise UnstableFrame(f"multiplicity pattern changes near {base.jet.u.tolist()}")
    X0 = ambient_frame(base)
    X = ambient_frame(lg)
    out = np.empty_like(X)
    for gi in range(len(spec.groups)):
        cols = spec.group_members(gi)
        U, _, Wt = np.linalg.svd(X[:, cols].T @ X0[:, cols])
        out[:, cols] = X[:, cols] @ (U @ Wt)
    return lg, out


@dataclass(frozen=True)
class ConnectionForms:
    """``omega[i, j, l] = <nabla_{e_l} e_i, e_j>`` in the principal frame.

    Entries with ``i`` and ``j`` in the same curvature group depend on the
    frame gauge inside that group; the rest are gauge covariant.
    """

    omega: np.ndarray
    eigenvalues: np.ndarray
    group_of: np.ndarray
    antisymmetry_defect: float


def connection_forms(surface, u, h_frame=H_FRAME, lg=None):
    u = np.asarray(u, dtype=float)
    base = _near(surface, u, 2) if lg is None else lg
    _check_gaps(base.spectrum)
    n = u.size
    X0 = ambient_frame(base)
    dX = np.zeros((n,) + X0.shape)
    for m in range(n):
        for off, w in _W5:
            v = u.copy()
            v[m] += off * h_frame
            _, X = _aligned_neighbor(surface, v, base)
            dX[m] += w * X
        dX[m] /= h_frame
    E = base.spectrum.eigenvectors
    # D_{e_l} X_i = sum_m E[m, l] dX[m][:, i]
    deriv = np.einsum("ml,mai->ila", E, dX)
    omega = np.einsum("ila,aj->ijl", deriv, X0)
    defect = float(np.max(np.abs(omega + omega.transpose(1, 0, 2))))
    return ConnectionForms(omega, base.spectrum.eigenvalues.copy(), base.spectrum.group_of.copy(), defect)


def eigenvalue_field_derivatives(surface, u, h=H_FRAME, lg=None):
    """``D[i, j] = e_i(k_j)`` by five-point differences of the eigenvalue fields.

    Eigenvalues are followed by sorted position and averaged over the base
    point's curvature groups.
    """
    u = np.asarray(u, dtype=float)
    base = _near(surface, u, 2) if lg is None else lg
    spec = base.spectrum
    E = spec.eigenvectors
    n = u.size
    D = np.zeros((n, n))
    for i in range(n):
        for off, w in _W5:
            lg_v = _near(surface, u + off * h * E[:, i], 2)
            k = lg_v.spectrum.eigenvalues
            for gi in range(len(spec.groups)):
                members = spec.group_members(gi)
                D[i, members] += w * k[members].mean()
    return D / h


def codazzi_residual(surface, u, h=H_FRAME, details=False):
    """Largest defect of both scalar Codazzi relations over all index triples."""
    u = np.asarray(u, dtype=float)
    base = _near(surface, u, 2)
    k = base.spectrum.group_values()
    om = connection_forms(surface, u, h, base).omega
    D = eigenvalue_field_derivatives(surface, u, h, base)
    n = k.size
    first = second = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                first = max(first, abs(D[i, j] - om[i, j, j] * (k[i] - k[j])))
    for i, j, l in permutations(range(n), 3):
        second = max(second, abs(om[i, j, l] * (k[i] - k[j]) - om[i, l, j] * (k[i] - k[l])))
    if details:
        return max(first, second), {"first": first, "second": second}
    return max(first, second)


# ---------------------------------------------------------------------------
# grid reports


def h_condition_report(surface, grid, tolerance=1e-6):
    grid = [np.asarray(u, dtype=float) for u in grid]

    def one(u):
        lg = _near(surface, u)
        return h_condition_residual(surface, u, lg), g_norm(lg, mean_curvature_gradient(surface, u, lg))

    rows = grid_map(one, grid)
    values = [r[0] for r in rows]
    grad_max = max(r[1] for r in rows)
    report = ResidualReport.from_values("h-condition", grid, values, tolerance, grad_s1_max=grad_max)
    if grad_max <= GRAD_FLOOR:
        report.details["note"] = "vacuous: ∇s1 ≈ 0 on the grid"
    return report


def codazzi_report(surface, grid, tolerance=1e-4, h=H_FRAME):
    grid = [np.asarray(u, dtype=float) for u in grid]
    values = grid_map(lambda u: codazzi_residual(surface, u, h), grid)
    return ResidualReport.from_values("codazzi", grid, values, tolerance)


def structural_identity_check(surface, grid, tolerance=1e-6, fallback_direction=None, vacuous=False):
    """``|3 k1 + k2 + ... + kn|`` with ``k1`` the curvature along ``grad s1``.

    ``k1`` is the eigenvalue whose direction is closest to ``grad s1``, so
    the residual equals ``|2 k1 + s1|``.  Where ``grad s1`` vanishes a
    :class:`GradientVanishes` is raised, unless ``fallback_direction`` names
    a chart parameter whose coordinate direction then stands in for it
    (``0`` selects ``d/ds`` on profile charts).  With ``vacuous=True`` such
    points instead contribute a zero residual and are counted in the note,
    since the identity says nothing where ``grad s1 = 0``.
    """
    grid = [np.asarray(u, dtype=float) for u in grid]

    def one(u):
        lg = _near(surface, u)
        try:
            k1, _, _ = gradient_alignment(surface, u, lg)
            used = False
        except GradientVanishes:
            if fallback_direction is None:
                if vacuous:
                    return 0.0, True
                raise
            d = np.zeros(u.size)
            d[fallback_direction] = 1.0
            k1 = float(d @ lg.shape.h @ d / (d @ lg.metric.g @ d))
            used = True
        return abs(2.0 * k1 + lg.s1), used

    rows = grid_map(one, grid)
    n_fallback = sum(r[1] for r in rows)
    report = ResidualReport.from_values("structural-identity", grid, [r[0] for r in rows], tolerance)
    if n_fallback and fallback_direction is not None:
        report.details["note"] = f"grad s1 vanished at {n_fallback} points; k1 taken along parameter {fallback_direction}"
    elif n_fallback:
        report.details["note"] = f"vacuous at {n_fallback} points: ∇s1 ≈ 0"
    return report


# ---------------------------------------------------------------------------
# slices and integral curves


def fit_affine(points, dim):
    """Best ``dim``-dimensional affine subspace: ``(centroid, basis, distances)``."""
    pts = np.asarray(points, dtype=float)
    c = pts.mean(axis=0)
    _, _, Vt = np.linalg.svd(pts - c)
    basis = Vt[:dim].T
    rel = pts - c
    dist = np.linalg.norm(rel - rel @ basis @ basis.T, axis=1)
    return c, basis, dist


def fit_sphere(points, dim):
    """Sphere of dimension ``dim - 1`` inside the best ``dim``-dimensional affine subspace.

    Returns ``(centre, radius, per-point residual)``; the residual combines
    radial deviation and distance from the subspace.
    """
    c0, basis, off = fit_affine(points, dim)
    y = (np.asarray(points, dtype=float) - c0) @ basis
    A = np.column_stack([2.0 * y, np.ones(len(y))])
    sol, *_ = np.linalg.lstsq(A, np.sum(y * y, axis=1), rcond=None)
    centre_y = sol[:-1]
    radius = math.sqrt(sol[-1] + centre_y @ centre_y)
    radial = np.linalg.norm(y - centre_y, axis=1) - radius
    return c0 + basis @ centre_y, radius, np.hypot(radial, off)


def slice_sphericity_check(
    surface, fixed_params, varying_block, samples_per_dim=4, spread=0.3, tolerance=1e-8, kind="auto"
):
    """Fit a round sphere or an affine plane to a coordinate slice.

    ``fixed_params`` is a full parameter vector; the parameters listed in
    ``varying_block`` are swept on a small tensor grid around it.
    """
    u0 = np.asarray(fixed_params, dtype=float)
    block = list(varying_block)
    m = len(block)
    box = surface.domain_box
    axes = []
    for i in block:
        lo = max(u0[i] - spread, box[i, 0] + 0.05)
        hi = min(u0[i] + spread, box[i, 1] - 0.05)
        axes.append(np.linspace(lo, hi, samples_per_dim))
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
    params = []
    for combo in mesh:
        u = u0.copy()
        u[block] = combo
        params.append(u)
    if len(params) < m + 3:
        raise InsufficientSamples(f"{len(params)} samples cannot determine a {m}-dimensional slice")
    pts = np.array([surface(u) for u in params])
    diameter = float(np.max(np.linalg.norm(pts - pts.mean(axis=0), axis=1)))
    _, _, plane_dist = fit_affine(pts, m)
    if kind == "plane" or (kind == "auto" and plane_dist.max() < 1e-10 * max(1.0, diameter)):
        return ResidualReport.from_values(
            "slice-plane", params, plane_dist, tolerance, kind="plane", block=block
        )
    centre, radius, resid = fit_sphere(pts, m + 1)
    return ResidualReport.from_values(
        "slice-sphere", params, resid, tolerance, kind="sphere", block=block, radius=radius, centre=centre.tolist()
    )


def _simple_direction(surface, u, lg, direction):
    spec = lg.spectrum
    if direction != "auto":
        return int(direction)
    simple = [gi for gi, (_, mult) in enumerate(spec.groups) if mult == 1]
    if len(simple) == 1:
        return int(spec.group_members(simple[0])[0])
    if len(simple) == 2:
        _, _, i_grad = gradient_alignment(surface, u, lg)
        others = [int(spec.group_members(gi)[0]) for gi in simple if spec.group_members(gi)[0] != i_grad]
        if len(others) == 1:
            return others[0]
    raise UnstableFrame("cannot single out the e_n direction from the spectrum")


def fit_circle(points):
    """Circle (or line) through 3-D or higher points: ``(kind, curvature, residuals)``."""
    pts = np.asarray(points, dtype=float)
    c0, basis, off = fit_affine(pts, 2)
    y = (pts - c0) @ basis
    a, b, c = y[0], y[len(y) // 2], y[-1]
    area2 = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
    sides = np.linalg.norm(b - a) * np.linalg.norm(c - b) * np.linalg.norm(c - a)
    menger = 2.0 * area2 / sides
    if menger < KAPPA_FLOOR:
        _, _, line_dist = fit_affine(pts, 1)
        return "line", menger, line_dist
    A = np.column_stack([2.0 * y, np.ones(len(y))])
    sol, *_ = np.linalg.lstsq(A, np.sum(y * y, axis=1), rcond=None)
    centre = sol[:2]
    radius = math.sqrt(sol[2] + centre @ centre)
    radial = np.linalg.norm(y - centre, axis=1) - radius
    return "circle", 1.0 / radius, np.hypot(radial, off)


def trace_principal_curve(surface, u0, index, step, n_steps):
    """Arclength RK4 along the principal direction field ``e_index``."""
    u = np.asarray(u0, dtype=float).copy()
    prev = None

    def field(v):
        nonlocal prev
        if not surface.contains(v):
            raise CurveLeftDomain(f"integral curve left the chart at {v.tolist()}")
        lg = local_geometry(surface, v, 2)
        e = lg.spectrum.eigenvectors[:, index]
        x = lg.jet.jacobian @ e
        if prev is not None and x @ prev < 0:
            e, x = -e, -x
        prev = x
        return e

    path = [u.copy()]
    for _ in range(n_steps):
        k1 = field(u)
        k2 = field(u + 0.5 * step * k1)
        k3 = field(u + 0.5 * step * k2)
        k4 = field(u + step * k3)
        u = u + step * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        path.append(u.copy())
    return np.array(path)


def en_curve_circle_check(surface, u0, arc_samples=41, arc_length=1.0, direction="auto"):
    """Trace the integral curve of ``e_n`` and classify it as circle or line.

    Returns ``(kind, fit_residual, curvature)``.
    """
    u0 = np.asarray(u0, dtype=float)
    lg = local_geometry(surface, u0, 3)
    index = _simple_direction(surface, u0, lg, direction)
    path = trace_principal_curve(surface, u0, index, arc_length / (arc_samples - 1), arc_samples - 1)
    pts = np.array([surface(u) for u in path])
    kind, curvature, resid = fit_circle(pts)
    return kind, float(np.max(resid)), float(curvature)


# ---------------------------------------------------------------------------


def classify_spectrum(spectrum):
    """Summary of a curvature spectrum: distinct values and multiplicity pattern."""
    groups = spectrum.groups
    mult = [m for _, m in groups]
    label = {1: "umbilical", 2: "two distinct principal curvatures", 3: "three distinct principal curvatures"}
    return {
        "distinct": len(groups),
        "values": [v for v, _ in groups],
        "multiplicities": mult,
        "label": label.get(len(groups), f"{len(groups)} distinct principal curvatures"),
    }
