"""Truncated second-order Taylor arithmetic on R^3.

A ``Jet2`` carries the value, gradient and Hessian of a scalar quantity at a
chart point.  Arithmetic on jets propagates derivatives through products,
quotients, integer powers and the elementary functions exactly (to machine
precision), so one evaluation of a composite expression yields its first and
second partials with no finite differencing.

The Hessian is stored as the 6 independent entries in the order
(xx, xy, xz, yy, yz, zz), which keeps it symmetric by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivisionAtSingularPoint, DomainError

# Values closer to zero than this raise on division; near-pole values above it
# are returned as-is (callers must sample away from singular loci).
POLE_TOL = 1e-300

# Packed Hessian layout: entry k holds d^2/dx_i dx_j with (i, j) from this list.
HESS_PAIRS = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


@dataclass(frozen=True)
class ChartPoint:
    """A point (x, y, z) of the coordinate chart."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise ValueError(f"chart coordinates must be finite, got {c!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def __getitem__(self, i: int) -> float:
        return (self.x, self.y, self.z)[i]


def _packed_outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Packed a_i * b_j for the 6 Hessian slots (i <= j)."""
    return np.array([a[i] * b[j] for i, j in HESS_PAIRS])


def _packed_symouter(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Packed a_i b_j + a_j b_i for the 6 Hessian slots."""
    return np.array([a[i] * b[j] + a[j] * b[i] for i, j in HESS_PAIRS])


class Jet2:
    """Value, gradient and packed Hessian of a scalar at a point."""

    __slots__ = ("value", "grad", "hess")

    def __init__(self, value: float, grad: np.ndarray, hess: np.ndarray):
        self.value = float(value)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)

    @staticmethod
    def constant(v: float) -> "Jet2":
        return Jet2(v, np.zeros(3), np.zeros(6))

    def hess_matrix(self) -> np.ndarray:
        """Unpack the Hessian into a symmetric 3x3 matrix."""
        m = np.empty((3, 3))
        for k, (i, j) in enumerate(HESS_PAIRS):
            m[i, j] = m[j, i] = self.hess[k]
        return m

    def __repr__(self):
        return f"Jet2(value={self.value!r}, grad={self.grad!r}, hess={self.hess!r})"

    # arithmetic -------------------------------------------------------------

    @staticmethod
    def _lift(x) -> "Jet2":
        if isinstance(x, Jet2):
            return x
        return Jet2.constant(float(x))

    def __add__(self, other):
        other = Jet2._lift(other)
        return Jet2(self.value + other.value, self.grad + other.grad,
                    self.hess + other.hess)

    __radd__ = __add__

    def __sub__(self, other):
        other = Jet2._lift(other)
        return Jet2(self.value - other.value, self.grad - other.grad,
                    self.hess - other.hess)

    def __rsub__(self, other):
        return Jet2._lift(other).__sub__(self)

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __mul__(self, other):
        other = Jet2._lift(other)
        return Jet2(
            self.value * other.value,
            self.value * other.grad + other.value * self.grad,
            self.value * other.hess + other.value * self.hess
            + _packed_symouter(self.grad, other.grad),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Jet2._lift(other)
        return self * other._reciprocal()

    def __rtruediv__(self, other):
        return Jet2._lift(other) * self._reciprocal()

    def _reciprocal(self) -> "Jet2":
        if abs(self.value) < POLE_TOL:
            raise DivisionAtSingularPoint(f"denominator {self.value!r} below pole tolerance")
        inv = 1.0 / self.value
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __pow__(self, n):
        if not isinstance(n, int) or isinstance(n, bool):
            raise TypeError("Jet2 exponents must be Python ints")
        return self.pow_int(n)

    def pow_int(self, n: int) -> "Jet2":
        if n == 0:
            return Jet2.constant(1.0)
        if n < 0 and abs(self.value) < POLE_TOL:
            raise DivisionAtSingularPoint(
                f"negative power of {self.value!r} below pole tolerance")
        v = self.value
        return self._chain(v ** n, n * v ** (n - 1), n * (n - 1) * v ** (n - 2))

    def _chain(self, f0: float, f1: float, f2: float) -> "Jet2":
        """Second-order chain rule through a scalar function f with
        f(value) = f0, f'(value) = f1, f''(value) = f2."""
        return Jet2(f0, f1 * self.grad,
                    f1 * self.hess + f2 * _packed_outer(self.grad, self.grad))

    # elementary functions ----------------------------------------------------

    def exp(self) -> "Jet2":
        e = math.exp(self.value)
        return self._chain(e, e, e)

    def log(self) -> "Jet2":
        if self.value <= 0.0:
            raise DomainError(f"log of non-positive value {self.value!r}")
        inv = 1.0 / self.value
        return self._chain(math.log(self.value), inv, -inv * inv)

    def sqrt(self) -> "Jet2":
        if self.value <= 0.0:
            raise DomainError(f"sqrt of non-positive value {self.value!r}")
        s = math.sqrt(self.value)
        return self._chain(s, 0.5 / s, -0.25 / (s * self.value))

    def sin(self) -> "Jet2":
        s, c = math.sin(self.value), math.cos(self.value)
        return self._chain(s, c, -s)

    def cos(self) -> "Jet2":
        s, c = math.sin(self.value), math.cos(self.value)
        return self._chain(c, -s, -c)

    def sinh(self) -> "Jet2":
        s, c = math.sinh(self.value), math.cosh(self.value)
        return self._chain(s, c, s)

    def cosh(self) -> "Jet2":
        s, c = math.sinh(self.value), math.cosh(self.value)
        return self._chain(c, s, c)


def jet_seed(p: ChartPoint, which: int) -> Jet2:
    """Seed jet for the coordinate projection x, y or z (which in {0,1,2})."""
    if which not in (0, 1, 2):
        raise ValueError(f"coordinate index must be 0, 1 or 2, got {which!r}")
    grad = np.zeros(3)
    grad[which] = 1.0
    return Jet2(p[which], grad, np.zeros(6))
