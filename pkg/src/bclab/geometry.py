"""Local differential geometry of parametrized hypersurfaces of E^{n+1}.

Everything here works at a single parameter point: immersion jets, the
induced metric, the unit normal, the second fundamental form, the shape
operator and its spectrum.  Sign conventions:

* the Weingarten map is ``S = g^-1 h`` with ``h_ij = <x_ij, N>``, so a round
  sphere with inward normal has curvature ``+1/r``;
* ``s1`` is the *trace* of ``S`` (not the average) and ``s2`` the second
  elementary symmetric polynomial of the principal curvatures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Optional

import numpy as np

from .eigen import cholesky, generalized_eigh
from .errors import Degenerate, OutOfDomain, RankDeficient

RANK_TOL = 1e-8
DET_TOL = 1e-12


@dataclass(frozen=True)
class Jet:
    """Immersion value and partial derivatives at one parameter point.

    ``d1[i]`` is ``x_{t_i}``, ``d2[i, j]`` is ``x_{t_i t_j}`` and ``d3[i, j, k]``
    the third partials; the trailing axis is the ambient coordinate.
    """

    order: int
    u: np.ndarray
    point: np.ndarray
    d1: np.ndarray
    d2: Optional[np.ndarray] = None
    d3: Optional[np.ndarray] = None

    @property
    def dim_domain(self):
        return self.d1.shape[0]

    @property
    def jacobian(self):
        """(n+1, n) matrix whose columns are the coordinate tangent vectors."""
        return self.d1.T


@dataclass(frozen=True)
class ParametricHypersurface:
    """A chart ``u -> x(u)`` from a box in R^n into E^{n+1}.

    ``jet_oracle(u, order)`` returns exact derivative arrays
    ``(point, d1, d2, d3)``; without it :func:`evaluate_jet` falls back on
    nested five-point central differences of ``chart`` with step ``h_fd``.
    ``orientation`` (+1 or -1) multiplies the determinant-rule normal.
    """

    chart: Callable[[np.ndarray], np.ndarray]
    domain_box: np.ndarray
    jet_oracle: Optional[Callable] = None
    h_fd: float = 1e-3
    orientation: int = 1
    name: str = "chart"
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        box = np.asarray(self.domain_box, dtype=float)
        if box.ndim != 2 or box.shape[1] != 2 or np.any(box[:, 0] >= box[:, 1]):
            raise ValueError("domain_box must be an (n, 2) array of increasing intervals")
        if box.shape[0] < 1:
            raise ValueError("need at least one parameter")
        object.__setattr__(self, "domain_box", box)
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @property
    def dim_domain(self):
        return self.domain_box.shape[0]

    @property
    def dim_ambient(self):
        return self.dim_domain + 1

    def contains(self, u, strict=True):
        u = np.asarray(u, dtype=float)
        lo, hi = self.domain_box[:, 0], self.domain_box[:, 1]
        if strict:
            return bool(np.all(u > lo) and np.all(u < hi))
        return bool(np.all(u >= lo) and np.all(u <= hi))

    def __call__(self, u):
        return np.asarray(self.chart(np.asarray(u, dtype=float)), dtype=float)


# ---------------------------------------------------------------------------
# jets

_STENCIL = ((-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0))


def _fd_partial(f, u, idx, h):
    """Nested five-point central difference ``d^k f / du_idx[0] ... du_idx[-1]``."""
    if not idx:
        return f(u)
    i, rest = idx[0], idx[1:]
    acc = 0.0
    for off, w in _STENCIL:
        v = u.copy()
        v[i] += off * h
        acc = acc + w * _fd_partial(f, v, rest, h)
    return acc / (12.0 * h)


def fd_jet(f, u, order, h):
    """Finite-difference jet of a vector map ``f`` (no domain checks)."""
    u = np.asarray(u, dtype=float)
    point = np.asarray(f(u), dtype=float)
    n, dim = u.size, point.size
    d1 = np.array([_fd_partial(f, u, (i,), h) for i in range(n)])
    d2 = d3 = None
    if order >= 2:
        d2 = np.empty((n, n, dim))
        for i in range(n):
            for j in range(i, n):
                d2[i, j] = d2[j, i] = _fd_partial(f, u, (i, j), h)
    if order >= 3:
        d3 = np.empty((n, n, n, dim))
        for i in range(n):
            for j in range(i, n):
                for k in range(j, n):
                    val = _fd_partial(f, u, (i, j, k), h)
                    for a, b, c in {(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)}:
                        d3[a, b, c] = val
    return point, d1, d2, d3


def evaluate_jet(surface, u, order=2):
    """Value and partial derivatives of the immersion at ``u``.

    Raises
    ------
    OutOfDomain
        ``u`` is not strictly inside ``surface.domain_box``.
    RankDeficient
        The Jacobian's smallest singular value is below ``RANK_TOL``.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    u = np.asarray(u, dtype=float)
    if u.shape != (surface.dim_domain,):
        raise ValueError(f"expected {surface.dim_domain} parameters, got shape {u.shape}")
    if not surface.contains(u):
        raise OutOfDomain(f"parameter point {u.tolist()} outside domain box")
    if surface.jet_oracle is not None:
        point, d1, d2, d3 = surface.jet_oracle(u, order)
    else:
        point, d1, d2, d3 = fd_jet(surface, u, order, surface.h_fd)
    sv = np.linalg.svd(d1, compute_uv=False)
    if sv[-1] <= RANK_TOL:
        raise RankDeficient(f"chart Jacobian has singular value {sv[-1]:.3e} at {u.tolist()}")
    return Jet(
        order=order,
        u=u,
        point=np.asarray(point, dtype=float),
        d1=np.asarray(d1, dtype=float),
        d2=None if order < 2 else np.asarray(d2, dtype=float),
        d3=None if order < 3 else np.asarray(d3, dtype=float),
    )


# ---------------------------------------------------------------------------
# first and second fundamental forms


@dataclass(frozen=True)
class MetricTensor:
    g: np.ndarray
    g_inv: np.ndarray
    sqrt_det_g: float


def induced_metric(jet):
    g = jet.d1 @ jet.d1.T
    g = 0.5 * (g + g.T)
    det = np.linalg.det(g)
    if not det > DET_TOL:
        raise Degenerate(f"det g = {det:.3e} at {jet.u.tolist()}")
    L = cholesky(g)
    linv = np.linalg.inv(L)
    g_inv = linv.T @ linv
    return MetricTensor(g=g, g_inv=0.5 * (g_inv + g_inv.T), sqrt_det_g=float(np.prod(np.diag(L))))


def cofactor_normal(jacobian):
    """Generalized cross product of the columns of an (n+1, n) matrix.

    The result ``c`` satisfies ``det([J | c]) = |c|^2 > 0``.
    """
    m, n = jacobian.shape
    c = np.empty(m)
    for k in range(m):
        minor = np.delete(jacobian, k, axis=0)
        c[k] = (-1.0) ** (k + n) * np.linalg.det(minor)
    return c


def unit_normal(jet, orientation=1):
    """Unit normal fixed by the determinant rule, times ``orientation``."""
    c = cofactor_normal(jet.jacobian)
    norm = np.linalg.norm(c)
    scale = np.prod(np.linalg.norm(jet.d1, axis=1))
    if norm <= RANK_TOL * max(scale, 1e-300):
        raise RankDeficient(f"tangent frame degenerate at {jet.u.tolist()}")
    return orientation * c / norm


def second_fundamental_form(jet, normal):
    if jet.d2 is None:
        raise ValueError("second fundamental form needs a jet of order >= 2")
    h = np.einsum("ijk,k->ij", jet.d2, normal)
    return 0.5 * (h + h.T)


def shape_operator(metric, h):
    return metric.g_inv @ h


@dataclass(frozen=True)
class ShapeData:
    normal: np.ndarray
    h: np.ndarray
    S: np.ndarray


@dataclass(frozen=True)
class CurvatureSpectrum:
    """Principal curvatures sorted descending, with g-orthonormal directions.

    ``eigenvectors[:, i]`` holds the chart components of ``e_i``.
    ``group_of[i]`` is the index into ``groups`` of eigenvalue ``i``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    groups: list
    group_of: np.ndarray
    eps_cluster: float

    @property
    def multiplicities(self):
        return tuple(m for _, m in self.groups)

    def group_members(self, gi):
        return np.flatnonzero(self.group_of == gi)

    def group_values(self):
        """Eigenvalues with each one replaced by its group mean."""
        return np.array([self.groups[g][0] for g in self.group_of])


def default_eps_cluster(values):
    return 1e-6 * (1.0 + float(np.max(np.abs(values))))


def cluster(values, eps):
    """Group sorted (descending) values whose consecutive gaps are below ``eps``."""
    groups, group_of = [], np.empty(len(values), dtype=int)
    start = 0
    for i in range(1, len(values) + 1):
        if i == len(values) or values[i - 1] - values[i] >= eps:
            block = values[start:i]
            group_of[start:i] = len(groups)
            groups.append((float(np.mean(block)), i - start))
            start = i
    return groups, group_of


def principal_curvatures(metric, h, eps_cluster=None):
    w, v = generalized_eigh(h, metric.g)
    eps = default_eps_cluster(w) if eps_cluster is None else eps_cluster
    if eps <= 0:
        raise ValueError("eps_cluster must be positive")
    groups, group_of = cluster(w, eps)
    return CurvatureSpectrum(w, v, groups, group_of, eps)


def mean_curvatures(spectrum):
    """``(s1, s2)``: trace and second elementary symmetric polynomial."""
    k = np.asarray(spectrum.eigenvalues if isinstance(spectrum, CurvatureSpectrum) else spectrum, dtype=float)
    s1 = float(np.sum(k))
    s2 = float(sum(a * b for a, b in combinations(k, 2)))
    return s1, s2


# ---------------------------------------------------------------------------
# everything at one point


@dataclass(frozen=True)
class LocalGeometry:
    jet: Jet
    metric: MetricTensor
    shape: ShapeData
    spectrum: CurvatureSpectrum

    @property
    def S(self):
        return self.shape.S

    @property
    def s1(self):
        return float(np.trace(self.shape.S))

    @property
    def s2(self):
        return mean_curvatures(self.spectrum)[1]

    def derivative_tensors(self):
        """Chart derivatives ``dg[l, a, b]`` and ``dh[l, a, b]`` (needs order 3)."""
        jet = self.jet
        if jet.d3 is None:
            raise ValueError("derivative tensors need a jet of order 3")
        t = np.einsum("alk,bk->lab", jet.d2, jet.d1)
        dg = t + t.transpose(0, 2, 1)
        christoffel_low = np.einsum("abk,ck->abc", jet.d2, jet.d1)
        # dN/du_l = -sum_c S[c, l] x_c
        dh = np.einsum("ablk,k->lab", jet.d3, self.shape.normal) - np.einsum(
            "cl,abc->lab", self.shape.S, christoffel_low
        )
        return dg, 0.5 * (dh + dh.transpose(0, 2, 1))


def local_geometry(surface, u, order=2, eps_cluster=None):
    jet = evaluate_jet(surface, u, order)
    metric = induced_metric(jet)
    normal = unit_normal(jet, surface.orientation)
    h = second_fundamental_form(jet, normal)
    S = shape_operator(metric, h)
    spectrum = principal_curvatures(metric, h, eps_cluster)
    return LocalGeometry(jet, metric, ShapeData(normal, h, S), spectrum)


def curvature_spectrum(surface, u, eps_cluster=None):
    return local_geometry(surface, u, 2, eps_cluster).spectrum


def jet_fd_discrepancy(surface, u, h=1e-4):
    """Gradient-check of an analytic jet against five-point differences.

    Order ``k`` derivatives are compared with central differences of the
    analytic order ``k - 1`` derivatives.  Returns the error of each order
    relative to the largest entry of that derivative tensor (or 1 if the
    tensor vanishes).
    """
    u = np.asarray(u, dtype=float)
    jet = evaluate_jet(surface, u, 3)

    def lower(order):
        def f(v):
            j = evaluate_jet(surface, v, max(order, 1))
            return (j.point, j.d1, j.d2)[order]

        return f

    out = {}
    for order, exact in ((1, jet.d1), (2, jet.d2), (3, jet.d3)):
        f = lower(order - 1)
        approx = np.array([_fd_partial(f, u, (i,), h) for i in range(u.size)])
        scale = max(float(np.max(np.abs(exact))), 1.0 if not np.any(exact) else 0.0)
        out[order] = float(np.max(np.abs(approx - exact)) / scale)
    return out
