"""The smooth-number density function and its delay-equation table.

rho(u) solves u*rho'(u) = -rho(u-1) with rho = 1 on [0, 1].  Closed
forms exist through u = 2 (1 - log u on [1, 2]); past that the table is
marched with the conservative trapezoid stepper and sharpened by one
Richardson extrapolation against a half-step solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .grid import SolutionGrid, integrate_delay_equation
from .piecewise import integrate_callable

__all__ = [
    "RhoTable",
    "default_table",
    "rho",
    "rho_inverse",
    "rho_total_integral",
    "dde_residual_max",
]

LOG2 = float(np.log(2.0))


def _march(u_max: float, h: float) -> np.ndarray:
    m = round(1.0 / h)
    n = round(u_max / h)
    values = np.empty(n + 1)
    u = np.arange(n + 1) * h
    values[: m + 1] = 1.0
    top = min(2 * m, n)
    values[m + 1 : top + 1] = 1.0 - np.log(u[m + 1 : top + 1])
    if n > 2 * m:
        integrate_delay_equation(values, 2 * m + 1, m, h, rate=1.0)
    return values


@dataclass(frozen=True)
class RhoTable:
    """Dense table of rho on [0, u_max] with optional Richardson sharpening."""

    grid: SolutionGrid
    richardson: bool = field(default=True)

    @staticmethod
    def build(u_max: float = 40.0, h: float = 1e-4, richardson: bool = True) -> "RhoTable":
        if u_max < 3.0:
            raise ValueError("table must reach at least u = 3")
        values = _march(u_max, h)
        if richardson:
            fine = _march(u_max, h / 2.0)
            values = (4.0 * fine[::2] - values) / 3.0
            # re-pin the closed-form region: extrapolation only helps past u = 2
            m = round(1.0 / h)
            u = np.arange(2 * m + 1) * h
            values[: m + 1] = 1.0
            values[m + 1 : 2 * m + 1] = 1.0 - np.log(u[m + 1 :])
        return RhoTable(SolutionGrid(h=h, u_max=u_max, values=values), richardson)

    def rho(self, u: float | np.ndarray) -> float | np.ndarray:
        """rho(u); exact on [0, 2], cubic off-grid interpolation beyond."""
        u_arr = np.asarray(u, dtype=float)
        scalar = u_arr.ndim == 0
        u_arr = np.atleast_1d(u_arr)
        out = np.zeros_like(u_arr)
        if np.any(u_arr < 0.0):
            raise ValueError("argument must be nonnegative")
        if np.any(u_arr > self.grid.u_max + 1e-12):
            raise ValueError("argument beyond tabulated range")
        low = u_arr <= 1.0
        out[low] = 1.0
        mid = (u_arr > 1.0) & (u_arr <= 2.0)
        out[mid] = 1.0 - np.log(u_arr[mid])
        high = u_arr > 2.0
        if np.any(high):
            out[high] = self.grid.value_cubic(u_arr[high])
        if scalar:
            return float(out[0])
        return out

    def rho_inverse(self, x: float) -> float:
        """Smallest u >= 1 with rho(u) = x, for 0 < x <= 1.

        The branch on [1, 2] inverts in closed form; below rho(2) the
        table is bisected (rho is strictly decreasing for u >= 1).
        """
        if not 0.0 < x <= 1.0:
            raise ValueError("inverse needs 0 < x <= 1")
        if x >= 1.0 - LOG2:
            return float(np.exp(1.0 - x))
        lo, hi = 2.0, self.grid.u_max
        if self.rho(hi) > x:
            raise ValueError("target below the tabulated range of rho")
        for _ in range(200):
            midpt = 0.5 * (lo + hi)
            if self.rho(midpt) > x:
                lo = midpt
            else:
                hi = midpt
            if hi - lo < 1e-13:
                break
        return 0.5 * (lo + hi)

    def total_integral(self, u_cut: float) -> float:
        """integral_0^{u_cut} rho; converges to exp(Euler gamma) as u_cut grows.

        [0, 2] in closed form (integral of 1 - log u is 2u - u log u - 2
        past 1), then adaptive quadrature on the table split at integer
        kink points.
        """
        if u_cut < 2.0:
            raise ValueError("cut must be >= 2")
        closed = 1.0 + (2.0 * 2.0 - 2.0 * np.log(2.0) - 2.0) - 0.0
        if u_cut == 2.0:
            return closed
        cuts = [float(k) for k in range(3, int(np.floor(u_cut)) + 1)]
        tail = integrate_callable(lambda t: np.asarray(self.rho(t)), 2.0, u_cut, tol=1e-10, breakpoints=cuts)
        return closed + tail.value

    def dde_residual_max(self, lo: float = 1.5, hi: float = 10.0) -> float:
        """Max |u*rho'(u) + rho(u-1)| over grid nodes in [lo, hi].

        rho' is taken by centered differences on the table.  Nodes where
        the second derivative jumps (u = 2 exactly) are excluded: a
        centered difference straddling a curvature jump is only first
        order accurate, which says nothing about the table itself.
        """
        g = self.grid
        h, v = g.h, g.values
        m = g.m
        n_lo = max(int(np.ceil(lo / h)), m + 1)
        n_hi = min(int(np.floor(hi / h)), len(v) - 2)
        idx = np.arange(n_lo, n_hi + 1)
        idx = idx[idx != 2 * m]
        deriv = (v[idx + 1] - v[idx - 1]) / (2.0 * h)
        resid = idx * h * deriv + v[idx - m]
        return float(np.max(np.abs(resid)))


@lru_cache(maxsize=4)
def default_table(u_max: float = 40.0, h: float = 1e-4) -> RhoTable:
    return RhoTable.build(u_max=u_max, h=h, richardson=True)


def rho(u: float | np.ndarray) -> float | np.ndarray:
    return default_table().rho(u)


def rho_inverse(x: float) -> float:
    return default_table().rho_inverse(x)


def rho_total_integral(u_cut: float = 20.0) -> float:
    return default_table().total_integral(u_cut)


def dde_residual_max(lo: float = 1.5, hi: float = 10.0) -> float:
    return default_table().dde_residual_max(lo, hi)
