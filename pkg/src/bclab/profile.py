"""Profile curves of the two classified families.

A profile is a unit-speed plane curve ``(psi(s), phi(s))`` written through
its tangent angle, ``psi' = cos(theta)``, ``phi' = sin(theta)``.  Under this
convention ``phi' psi'' - phi'' psi' = -theta'``, so the curvature conditions
become first-order equations for ``theta``:

rotational (sphere x sphere blocks)::

    theta' = -(p sin(theta) / psi - q cos(theta) / phi) / 3

cylinder (sphere block x flat block)::

    theta' = -p sin(theta) / (3 psi)

``theta'`` is also the principal curvature of the hypersurface along the
profile direction (with the normal ``(-phi' Theta1, psi' Theta2)``).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import BadInitial, InsufficientSamples, PoleHit, StepCollapse
from .report import ResidualReport

POLE_TOL = 1e-6
FAMILIES = ("rotational", "cylinder")


def rotational_rhs(state, p, q, pole_tol=POLE_TOL):
    psi, phi, theta = state
    if psi <= pole_tol or phi <= pole_tol:
        raise PoleHit(f"psi={psi:.3e}, phi={phi:.3e} at or below pole tolerance")
    s, c = math.sin(theta), math.cos(theta)
    return np.array([c, s, -(p * s / psi - q * c / phi) / 3.0])


def cylinder_rhs(state, p, pole_tol=POLE_TOL):
    psi, _, theta = state
    if psi <= pole_tol:
        raise PoleHit(f"psi={psi:.3e} at or below pole tolerance")
    s, c = math.sin(theta), math.cos(theta)
    return np.array([c, s, -p * s / (3.0 * psi)])


def family_rhs(family, p, q, pole_tol=POLE_TOL):
    if family == "rotational":
        return lambda y: rotational_rhs(y, p, q, pole_tol)
    if family == "cylinder":
        return lambda y: cylinder_rhs(y, p, pole_tol)
    raise ValueError(f"unknown family {family!r}")


def theta_derivatives(state, family, p, q):
    """``(theta', theta'')`` along the flow, by the chain rule through the RHS."""
    psi, phi, theta = state
    s, c = math.sin(theta), math.cos(theta)
    if family == "rotational":
        f = -(p * s / psi - q * c / phi) / 3.0
        f_psi = p * s / (3.0 * psi**2)
        f_phi = -q * c / (3.0 * phi**2)
        f_theta = -(p * c / psi + q * s / phi) / 3.0
    else:
        f = -p * s / (3.0 * psi)
        f_psi = p * s / (3.0 * psi**2)
        f_phi = 0.0
        f_theta = -p * c / (3.0 * psi)
    return f, f_psi * c + f_phi * s + f_theta * f


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4)

_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def dopri_step(f, y, h):
    """One Dormand-Prince step: fifth-order solution and embedded error vector."""
    k = [f(y)]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
        k.append(f(yi))
    k = np.array(k)
    return y + h * (_B5 @ k), h * (_E @ k)


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    min_step: float = math.inf


def _integrate_to(f, y, s0, s1, h, local_tol, stats, halt):
    """Adaptive PI-controlled integration from ``s0`` to ``s1`` (> s0).

    Returns ``(y, s, h, halted)``; stops early when ``halt(y)`` is true.
    """
    beta = 0.04
    alpha = 0.2 - 0.75 * beta
    err_old = 1e-4
    s = s0
    while s < s1:
        h = min(h, s1 - s)
        last = h >= s1 - s
        try:
            y_new, err_vec = dopri_step(f, y, h)
            err = float(np.max(np.abs(err_vec))) / local_tol
            if not np.all(np.isfinite(y_new)):
                err = math.inf
        except PoleHit:
            err = math.inf
        if err <= 1.0:
            s = s1 if last else s + h
            y = y_new
            stats.accepted += 1
            stats.min_step = min(stats.min_step, h)
            fac = 0.9 * max(err, 1e-10) ** (-alpha) * err_old**beta
            h = h * min(5.0, max(0.2, fac))
            err_old = max(err, 1e-4)
            if halt(y):
                return y, s, h, True
        else:
            stats.rejected += 1
            fac = 0.25 if not math.isfinite(err) else max(0.1, 0.9 * err ** (-alpha))
            h = h * fac
        if h < 1e-12:
            if halt(y, near=True):
                return y, s, h, True
            raise StepCollapse(f"step size {h:.3e} collapsed at s={s:.6g}")
    return y, s, h, False


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileCurve:
    """Arclength samples ``(s, psi, phi, theta)`` of a profile curve."""

    s: np.ndarray
    psi: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    p: int
    q: int
    family: str
    local_tol: float
    initial: tuple = (1.0, 1.0, math.pi / 4)
    halted_early: bool = False
    pole_tol: float = POLE_TOL
    stats: StepStats = field(default_factory=StepStats, compare=False)

    def __len__(self):
        return self.s.size

    @cached_property
    def states(self):
        return np.column_stack([self.psi, self.phi, self.theta])

    @property
    def s_range(self):
        return float(self.s[0]), float(self.s[-1])

    @property
    def kappa(self):
        """``phi' psi'' - phi'' psi'`` at the samples (equals ``-theta'``)."""
        return np.array([-theta_derivatives(y, self.family, self.p, self.q)[0] for y in self.states])

    def state_at(self, s):
        """Cubic Hermite interpolation of ``(psi, phi, theta)`` using the ODE slopes."""
        s = float(s)
        lo, hi = self.s_range
        if not lo <= s <= hi:
            raise ValueError(f"s={s} outside profile range [{lo}, {hi}]")
        i = int(np.clip(np.searchsorted(self.s, s) - 1, 0, self.s.size - 2))
        s0, s1 = self.s[i], self.s[i + 1]
        y0, y1 = self.states[i], self.states[i + 1]
        f0, f1 = self._slope(y0), self._slope(y1)
        hh = s1 - s0
        t = (s - s0) / hh
        h00 = (1 + 2 * t) * (1 - t) ** 2
        h10 = t * (1 - t) ** 2
        h01 = t * t * (3 - 2 * t)
        h11 = t * t * (t - 1)
        return h00 * y0 + h10 * hh * f0 + h01 * y1 + h11 * hh * f1

    def _slope(self, y):
        th1, _ = theta_derivatives(y, self.family, self.p, self.q)
        return np.array([math.cos(y[2]), math.sin(y[2]), th1])

    def derivatives_at(self, s):
        """``(psi^(0..3), phi^(0..3), theta)`` at arclength ``s``.

        Derivatives beyond the first come from the ODE, not from the
        interpolant, so the curvature condition holds exactly at ``s``.
        """
        psi, phi, theta = self.state_at(s)
        th1, th2 = theta_derivatives((psi, phi, theta), self.family, self.p, self.q)
        sn, cs = math.sin(theta), math.cos(theta)
        dpsi = (psi, cs, -sn * th1, -cs * th1**2 - sn * th2)
        dphi = (phi, sn, cs * th1, -sn * th1**2 + cs * th2)
        return dpsi, dphi, theta

    def to_csv(self):
        """CSV text with columns ``s, psi, phi, theta, kappa``."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "psi", "phi", "theta", "kappa"])
        for row in zip(self.s, self.psi, self.phi, self.theta, self.kappa):
            w.writerow([f"{float(v):.17g}" for v in row])
        return buf.getvalue()


def _check_initial(family, p, q, initial, s_max, local_tol, pole_tol):
    if family not in FAMILIES:
        raise BadInitial(f"family must be one of {FAMILIES}, got {family!r}")
    if int(p) != p or p < 1:
        raise BadInitial("p must be ≥ 1")
    if int(q) != q or q < 1:
        raise BadInitial("q must be ≥ 1")
    if len(initial) != 3 or not all(math.isfinite(v) for v in initial):
        raise BadInitial("initial data must be three finite numbers (psi0, phi0, theta0)")
    psi0, phi0, _ = initial
    if psi0 <= pole_tol:
        raise BadInitial("psi0 must be positive")
    if family == "rotational" and phi0 <= pole_tol:
        raise BadInitial("phi0 must be positive for the rotational family")
    if not s_max > 0:
        raise BadInitial("s_max must be positive")
    if not 1e-12 <= local_tol <= 1e-6:
        raise BadInitial("local_tol must lie in [1e-12, 1e-6]")


def _sample(f, y0, s_end, n_samples, local_tol, halt):
    """Integrate over a uniform sample grid; returns ``s_reached`` if halted."""
    grid = np.linspace(0.0, s_end, n_samples)
    stats = StepStats()
    ys = [y0]
    y, h = y0, min(1e-2, s_end / 10)
    for k in range(1, n_samples):
        y, s, h, halted = _integrate_to(f, y, grid[k - 1], grid[k], h, local_tol, stats, halt)
        if halted:
            if s <= 0.0:
                raise StepCollapse("initial data sits on a pole")
            return grid, np.array(ys), stats, s
        ys.append(y)
    return grid, np.array(ys), stats, None


def integrate_profile(
    family,
    p,
    q,
    initial=(1.0, 1.0, math.pi / 4),
    s_max=0.5,
    local_tol=1e-10,
    n_samples=201,
    pole_tol=POLE_TOL,
):
    """Integrate a profile curve on ``[0, s_max]`` and sample it uniformly.

    Steps are chosen by an embedded Dormand-Prince 5(4) pair under a PI
    controller with per-step error at most ``local_tol``; every sample point
    is hit exactly by the integrator.  If the curve approaches a pole
    (``psi``, or ``phi`` for the rotational family, below ``10 * pole_tol``)
    integration stops and the samples are redistributed over the reached
    interval; ``halted_early`` records this.
    """
    _check_initial(family, p, q, initial, s_max, local_tol, pole_tol)
    if n_samples < 200:
        raise ValueError("n_samples must be at least 200")
    f = family_rhs(family, p, q, pole_tol)

    def halt(y, near=False):
        m = y[0] if family == "cylinder" else min(y[0], y[1])
        return m < (1e3 if near else 10.0) * pole_tol

    y0 = np.array(initial, dtype=float)
    grid, ys, stats, s_reached = _sample(f, y0, float(s_max), n_samples, local_tol, halt)
    halted = s_reached is not None
    if halted:
        # spread the samples over the interval actually reached
        grid, ys, stats, _ = _sample(f, y0, s_reached, n_samples, local_tol, lambda y, near=False: near)
        grid = grid[: len(ys)]
    return ProfileCurve(
        s=grid,
        psi=ys[:, 0],
        phi=ys[:, 1],
        theta=ys[:, 2],
        p=int(p),
        q=int(q),
        family=family,
        local_tol=float(local_tol),
        initial=tuple(float(v) for v in initial),
        halted_early=halted,
        pole_tol=pole_tol,
        stats=stats,
    )


def integrate_fixed(family, p, q, initial, s_max, n_steps, pole_tol=POLE_TOL):
    """Endpoint of ``n_steps`` equal Dormand-Prince steps (fifth-order solution)."""
    f = family_rhs(family, p, q, pole_tol)
    y = np.array(initial, dtype=float)
    h = s_max / n_steps
    for _ in range(n_steps):
        y, _ = dopri_step(f, y, h)
    return y


def self_convergence_order(family, p, q, initial, s_max, n_steps=8):
    """Observed order from step halving: ``log2(|y_h - y_h/2| / |y_h/2 - y_h/4|)``.

    Returns ``inf`` when the coarse differences are already at round-off
    level (the scheme integrates the solution exactly, e.g. a straight line).
    """
    ya = integrate_fixed(family, p, q, initial, s_max, n_steps)
    yb = integrate_fixed(family, p, q, initial, s_max, 2 * n_steps)
    yc = integrate_fixed(family, p, q, initial, s_max, 4 * n_steps)
    floor = 64 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(yc))))
    coarse, fine = float(np.max(np.abs(ya - yb))), float(np.max(np.abs(yb - yc)))
    if coarse <= floor:
        return math.inf
    return math.log2(coarse / max(fine, floor))


# ---------------------------------------------------------------------------

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0


def _fd5(values, h):
    """Fourth-order first and second differences at interior samples."""
    v = np.asarray(values, dtype=float)
    win = np.lib.stride_tricks.sliding_window_view(v, 5)
    return win @ _D1 / h, win @ _D2 / h**2


def profile_curvature_report(curve, tolerance=1e-7):
    """Finite-difference check of the curvature condition on the samples.

    The curvature ``phi' psi'' - phi'' psi'`` and the right-hand side of the
    family's condition are both rebuilt from five-point differences of the
    sampled ``psi`` and ``phi`` alone (``theta`` is not used).  ``details``
    carries the unit-speed defect and ``k1 = -kappa`` for comparison with
    ``-s1/2`` on the hypersurface.
    """
    if len(curve) < 5:
        raise InsufficientSamples("need at least 5 samples")
    h = np.diff(curve.s)
    if np.ptp(h) > 1e-9 * h.mean():
        raise ValueError("profile samples must be uniformly spaced")
    h = float(h.mean())
    dpsi, ddpsi = _fd5(curve.psi, h)
    dphi, ddphi = _fd5(curve.phi, h)
    psi, phi = curve.psi[2:-2], curve.phi[2:-2]
    kappa = dphi * ddpsi - ddphi * dpsi
    if curve.family == "rotational":
        rhs = (curve.p * dphi / psi - curve.q * dpsi / phi) / 3.0
    else:
        rhs = curve.p * dphi / (3.0 * psi)
    defect = np.abs(kappa - rhs)
    report = ResidualReport.from_values(
        "profile-curvature", [(float(s),) for s in curve.s[2:-2]], defect, tolerance
    )
    report.details.update(
        unit_speed_fd_max=float(np.max(np.abs(dpsi**2 + dphi**2 - 1.0))),
        k1=(-kappa).tolist(),
        kappa_vs_theta_prime_max=float(np.max(np.abs(kappa - curve.kappa[2:-2]))),
    )
    return report


def profile_from_arrays(s, psi, phi, family, p, q, theta=None):
    """Wrap externally generated samples (e.g. a test curve) as a ProfileCurve."""
    s, psi, phi = (np.asarray(a, dtype=float) for a in (s, psi, phi))
    if theta is None:
        theta = np.unwrap(np.arctan2(np.gradient(phi, s), np.gradient(psi, s)))
    return ProfileCurve(s, psi, phi, np.asarray(theta, dtype=float), int(p), int(q), family, float("nan"))


def profile_from_csv(text, family, p, q, local_tol=float("nan"), initial=(1.0, 1.0, math.pi / 4)):
    """Inverse of :meth:`ProfileCurve.to_csv` (the ``kappa`` column is recomputed)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0][:4] != ["s", "psi", "phi", "theta"]:
        raise ValueError("profile CSV must start with the header s,psi,phi,theta")
    data = np.array([[float(v) for v in r[:4]] for r in rows[1:] if r], dtype=float)
    if data.shape[0] < 2:
        raise InsufficientSamples("profile CSV holds fewer than two samples")
    return ProfileCurve(
        data[:, 0], data[:, 1], data[:, 2], data[:, 3], int(p), int(q), family, float(local_tol),
        tuple(float(v) for v in initial),
    )
