"""Charts for the classified families and for reference/control surfaces.

All charts are written once, generically over floats and :class:`Taylor`
numbers, so the same formula yields point values and exact jets up to
third order.  Parameters are ordered as in the classification:
``(s, t_2, ..., t_n)`` for profile-based charts.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BadParams, FamilyMismatch, PoleMargin
from .geometry import ParametricHypersurface, cofactor_normal, evaluate_jet
from .taylor import Taylor, cos, sin, value

POLE_MARGIN = 1e-3
FLAT_EXTENT = 10.0


def spherical_factor(angles):
    """Nested cos/sin parametrization of the unit sphere S^p in R^{p+1}.

    ``(cos t1, sin t1 cos t2, ..., sin t1 ... sin t_{p-1} cos t_p,
    sin t1 ... sin t_p)``.  Works on floats and on Taylor numbers.
    """
    out = []
    prod = 1.0
    for t in angles:
        out.append(prod * cos(t))
        prod = prod * sin(t)
    out.append(prod)
    return out


def angle_box(p):
    """Box for the p angles of :func:`spherical_factor` (last one is azimuthal)."""
    return [(0.0, math.pi)] * (p - 1) + [(0.0, 2.0 * math.pi)]


def _assemble(components, m, order):
    comps = []
    for c in components:
        if not isinstance(c, Taylor):
            c = Taylor.constant(c, m)
        comps.append(c)
    point = np.array([c.val for c in comps])
    d1 = np.array([c.grad for c in comps]).T
    d2 = np.moveaxis(np.array([c.hess for c in comps]), 0, -1) if order >= 2 else None
    d3 = np.moveaxis(np.array([c.third for c in comps]), 0, -1) if order >= 3 else None
    return point, d1, d2, d3


def analytic_surface(formula, box, name, conventional_normal=None, meta=None):
    """Wrap a generic ``formula(list_of_params) -> list_of_coordinates``.

    If ``conventional_normal(u)`` is given, the surface orientation is set so
    that the determinant-rule normal agrees with it (checked at the box
    centre; the sign relation is constant on a connected regular chart).
    """
    box = np.asarray(box, dtype=float)

    def chart(u):
        return np.array([value(c) for c in formula([float(x) for x in u])])

    def jet_oracle(u, order):
        t = Taylor.variables(u, order=3 if order >= 3 else order)
        return _assemble(formula(t), len(u), order)

    surface = ParametricHypersurface(chart, box, jet_oracle, name=name, meta=dict(meta or {}))
    if conventional_normal is not None:
        centre = _reference_point(box)
        jac = evaluate_jet(surface, centre, 1).jacobian
        sign = 1 if float(np.dot(cofactor_normal(jac), conventional_normal(centre))) > 0 else -1
        surface = ParametricHypersurface(
            chart, box, jet_oracle, orientation=sign, name=name, meta=surface.meta
        )
    return surface


def _reference_point(box):
    # off-centre so symmetric charts do not sit on special points
    return box[:, 0] + (box[:, 1] - box[:, 0]) * 0.4371


# ---------------------------------------------------------------------------
# classified families


def _lift_profile(curve, s):
    if isinstance(s, Taylor):
        dpsi, dphi, _ = curve.derivatives_at(s.val)
        return s.compose(*dpsi), s.compose(*dphi)
    psi, phi, _ = curve.state_at(s)
    return psi, phi


def _check_profile(curve, family, p, q, need_phi):
    if curve.family != family:
        raise FamilyMismatch(f"profile family is {curve.family!r}, expected {family!r}")
    if p < 1 or q < 1:
        raise BadParams("p and q must both be >= 1")
    if (curve.p, curve.q) != (p, q) and not (family == "cylinder" and curve.p == p):
        raise FamilyMismatch(f"profile was integrated for p={curve.p}, q={curve.q}")
    if np.min(curve.psi) <= POLE_MARGIN or (need_phi and np.min(curve.phi) <= POLE_MARGIN):
        raise PoleMargin("profile comes within the pole margin")


def generalized_rotational(curve, p, q):
    """``x = (psi(s) Theta1(t_2..t_{p+1}), phi(s) Theta2(t_{p+2}..t_n))`` in E^{p+q+2}."""
    _check_profile(curve, "rotational", p, q, need_phi=True)
    n = p + q + 1

    def formula(u):
        psi, phi = _lift_profile(curve, u[0])
        return [psi * c for c in spherical_factor(u[1 : p + 1])] + [
            phi * c for c in spherical_factor(u[p + 1 :])
        ]

    def conventional_normal(u):
        _, _, theta = curve.state_at(u[0])
        a = np.array(spherical_factor(u[1 : p + 1]))
        b = np.array(spherical_factor(u[p + 1 :]))
        return np.concatenate([-math.sin(theta) * a, math.cos(theta) * b])

    box = [curve.s_range] + angle_box(p) + angle_box(q)
    meta = dict(
        family="rotational",
        p=p,
        q=q,
        n=n,
        profile=curve,
        blocks={"sphere1": list(range(1, p + 1)), "sphere2": list(range(p + 1, n))},
        polar=_polar_indices(1, p) + _polar_indices(p + 1, q),
    )
    return analytic_surface(formula, box, f"rotational(p={p},q={q})", conventional_normal, meta)


def generalized_cylinder(curve, p, q):
    """``x = (psi(s) Theta1(t_2..t_{p+1}), phi(s), t_{p+2}, ..., t_n)`` in E^{p+q+2}."""
    _check_profile(curve, "cylinder", p, q, need_phi=False)
    n = p + q + 1

    def formula(u):
        psi, phi = _lift_profile(curve, u[0])
        return [psi * c for c in spherical_factor(u[1 : p + 1])] + [phi] + list(u[p + 1 :])

    def conventional_normal(u):
        _, _, theta = curve.state_at(u[0])
        a = np.array(spherical_factor(u[1 : p + 1]))
        return np.concatenate([-math.sin(theta) * a, [math.cos(theta)], np.zeros(q)])

    box = [curve.s_range] + angle_box(p) + [(-FLAT_EXTENT, FLAT_EXTENT)] * q
    meta = dict(
        family="cylinder",
        p=p,
        q=q,
        n=n,
        profile=curve,
        blocks={"sphere1": list(range(1, p + 1)), "flat": list(range(p + 1, n))},
        polar=_polar_indices(1, p),
    )
    return analytic_surface(formula, box, f"cylinder(p={p},q={q})", conventional_normal, meta)


def _polar_indices(first, count):
    """Parameter indices whose sine vanishes at the box ends (chart poles)."""
    return list(range(first, first + count - 1))


# ---------------------------------------------------------------------------
# reference and control surfaces


def sphere(n, r=1.0):
    """Round sphere S^n(r) in E^{n+1}; inward normal, curvatures ``+1/r``."""
    n, r = _dim(n), _positive(r, "radius")

    def formula(u):
        return [r * c for c in spherical_factor(u)]

    meta = dict(family="sphere", n=n, r=r, blocks={"sphere": list(range(1, n))}, polar=_polar_indices(0, n))
    return analytic_surface(
        formula, angle_box(n), f"sphere(n={n},r={r})", lambda u: -np.array(spherical_factor(u)), meta
    )


def round_cylinder(p, r=1.0, q=1):
    """S^p(r) x E^q in E^{p+q+1}; curvatures ``1/r`` (x p) and ``0`` (x q)."""
    p, q, r = _dim(p, 1), _dim(q, 1), _positive(r, "radius")

    def formula(u):
        return [r * c for c in spherical_factor(u[:p])] + list(u[p:])

    def normal(u):
        return np.concatenate([-np.array(spherical_factor(u[:p])), np.zeros(q)])

    box = angle_box(p) + [(-FLAT_EXTENT, FLAT_EXTENT)] * q
    meta = dict(
        family="round_cylinder",
        p=p,
        q=q,
        n=p + q,
        r=r,
        blocks={"sphere": list(range(p)), "flat": list(range(p, p + q))},
        polar=_polar_indices(0, p),
    )
    return analytic_surface(formula, box, f"round_cylinder(p={p},r={r},q={q})", normal, meta)


def plane(n):
    """The coordinate hyperplane ``x_{n+1} = 0`` in E^{n+1}."""
    n = _dim(n)

    def formula(u):
        return list(u) + [0.0]

    meta = dict(family="plane", n=n, blocks={"flat": list(range(n))}, polar=[])
    return analytic_surface(
        formula,
        [(-FLAT_EXTENT, FLAT_EXTENT)] * n,
        f"plane(n={n})",
        lambda u: np.eye(n + 1)[n],
        meta,
    )


def ellipsoid(semi_axes):
    """``sum x_i^2 / a_i^2 = 1``; the number of semi-axes is the ambient dimension."""
    a = np.asarray(semi_axes, dtype=float)
    if a.ndim != 1 or a.size < 3 or np.any(a <= 0):
        raise BadParams("ellipsoid needs at least 3 positive semi-axes")
    n = a.size - 1

    def formula(u):
        return [ai * c for ai, c in zip(a, spherical_factor(u))]

    def normal(u):
        x = a * np.array(spherical_factor(u))
        return -x / a**2

    meta = dict(
        family="ellipsoid", n=n, semi_axes=a.tolist(), blocks={"sphere": list(range(1, n))}, polar=_polar_indices(0, n)
    )
    return analytic_surface(formula, angle_box(n), f"ellipsoid{tuple(a.tolist())}", normal, meta)


def torus(R=2.0, r=0.7, n=3):
    """Tube of radius ``r`` around a circle of radius ``R`` in E^{n+1}.

    Parameters ``(a, b, c_1, ..., c_{n-2})``: ``a`` is the tube angle,
    ``b`` runs along the core circle, the ``c`` angles parametrize S^{n-2}.
    """
    n = _dim(n, 3)
    R, r = _positive(R, "R"), _positive(r, "r")
    if not R > r:
        raise BadParams("torus needs R > r")

    def formula(u):
        a, b, rest = u[0], u[1], u[2:]
        w = R + r * cos(a)
        return [w * cos(b), w * sin(b)] + [r * sin(a) * c for c in spherical_factor(rest)]

    def normal(u):
        a, b, rest = u[0], u[1], u[2:]
        return -np.concatenate(
            [math.cos(a) * np.array([math.cos(b), math.sin(b)]), math.sin(a) * np.array(spherical_factor(rest))]
        )

    box = [(0.0, math.pi), (0.0, 2.0 * math.pi)] + angle_box(n - 2)
    meta = dict(
        family="torus",
        n=n,
        R=R,
        r=r,
        blocks={"sphere": list(range(2, n))},
        polar=[0] + _polar_indices(2, n - 2),
    )
    return analytic_surface(formula, box, f"torus(R={R},r={r},n={n})", normal, meta)


REFERENCE_KINDS = {
    "sphere": sphere,
    "round_cylinder": round_cylinder,
    "plane": plane,
    "ellipsoid": ellipsoid,
    "torus": torus,
}


def reference_surface(kind, **params):
    try:
        build = REFERENCE_KINDS[kind]
    except KeyError:
        raise BadParams(f"unknown reference surface {kind!r}") from None
    try:
        return build(**params)
    except TypeError as exc:
        raise BadParams(str(exc)) from exc


def _dim(n, least=2):
    if int(n) != n or n < least:
        raise BadParams(f"dimension must be an integer >= {least}")
    return int(n)


def _positive(x, what):
    x = float(x)
    if not x > 0:
        raise BadParams(f"{what} must be positive")
    return x
