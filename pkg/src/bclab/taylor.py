"""Truncated multivariate Taylor arithmetic up to third order.

A :class:`Taylor` holds a scalar value together with its gradient, Hessian
and third-derivative tensor with respect to ``m`` independent variables.
Arithmetic and elementary functions propagate all four exactly (up to
rounding), which is how the factory charts obtain closed-form jets without
symbolic algebra.

Example
-------
>>> u = Taylor.variables([0.3, 1.1])
>>> f = sin(u[0]) * u[1]
>>> round(f.grad[0], 12) == round(np.cos(0.3) * 1.1, 12)
True
"""

from __future__ import annotations

import math

import numpy as np


class Taylor:
    __slots__ = ("val", "grad", "hess", "third", "order")

    def __init__(self, val, grad, hess=None, third=None, order=3):
        self.val = float(val)
        self.grad = grad
        self.hess = hess
        self.third = third
        self.order = order

    @classmethod
    def variables(cls, point, order=3):
        """Independent variables ``u_i`` seeded at ``point``."""
        point = np.asarray(point, dtype=float)
        m = point.size
        eye = np.eye(m)
        out = []
        for i in range(m):
            hess = np.zeros((m, m)) if order >= 2 else None
            third = np.zeros((m, m, m)) if order >= 3 else None
            out.append(cls(point[i], eye[i].copy(), hess, third, order))
        return out

    @classmethod
    def constant(cls, value, m, order=3):
        hess = np.zeros((m, m)) if order >= 2 else None
        third = np.zeros((m, m, m)) if order >= 3 else None
        return cls(value, np.zeros(m), hess, third, order)

    # -- helpers ---------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, Taylor):
            return other
        return Taylor.constant(other, self.grad.size, self.order)

    def compose(self, f0, f1, f2=0.0, f3=0.0):
        """Return ``f(self)`` given ``f`` and its first three derivatives at ``self.val``."""
        g = self.grad
        grad = f1 * g
        hess = third = None
        if self.order >= 2:
            gg = np.multiply.outer(g, g)
            hess = f2 * gg + f1 * self.hess
        if self.order >= 3:
            third = f3 * np.multiply.outer(gg, g) + f2 * _sym3(self.hess, g) + f1 * self.third
        return Taylor(f0, grad, hess, third, self.order)

    # -- arithmetic ------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Taylor):
            return Taylor(self.val + other, self.grad, self.hess, self.third, self.order)
        return Taylor(
            self.val + other.val,
            self.grad + other.grad,
            None if self.order < 2 else self.hess + other.hess,
            None if self.order < 3 else self.third + other.third,
            self.order,
        )

    __radd__ = __add__

    def __neg__(self):
        return Taylor(
            -self.val,
            -self.grad,
            None if self.order < 2 else -self.hess,
            None if self.order < 3 else -self.third,
            self.order,
        )

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Taylor):
            c = float(other)
            return Taylor(
                c * self.val,
                c * self.grad,
                None if self.order < 2 else c * self.hess,
                None if self.order < 3 else c * self.third,
                self.order,
            )
        a, b = self, other
        grad = a.grad * b.val + a.val * b.grad
        hess = third = None
        if self.order >= 2:
            ab = np.multiply.outer(a.grad, b.grad)
            hess = a.hess * b.val + ab + ab.T + a.val * b.hess
        if self.order >= 3:
            third = (
                a.third * b.val
                + a.val * b.third
                + _sym3(a.hess, b.grad)
                + _sym3(b.hess, a.grad)
            )
        return Taylor(a.val * b.val, grad, hess, third, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Taylor):
            return self * (1.0 / other)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self):
        v = self.val
        return self.compose(1.0 / v, -1.0 / v**2, 2.0 / v**3, -6.0 / v**4)

    def __repr__(self):
        return f"Taylor(val={self.val!r}, m={self.grad.size}, order={self.order})"


def _sym3(a, b):
    """``a_ij b_k + a_ik b_j + a_jk b_i`` for symmetric ``a``."""
    t = np.multiply.outer(a, b)
    return t + t.transpose(0, 2, 1) + t.transpose(2, 0, 1)


def sin(x):
    if isinstance(x, Taylor):
        s, c = math.sin(x.val), math.cos(x.val)
        return x.compose(s, c, -s, -c)
    return math.sin(x)


def cos(x):
    if isinstance(x, Taylor):
        s, c = math.sin(x.val), math.cos(x.val)
        return x.compose(c, -s, -c, s)
    return math.cos(x)


def value(x):
    return x.val if isinstance(x, Taylor) else float(x)
