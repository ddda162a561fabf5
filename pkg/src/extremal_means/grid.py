"""Uniform solution grids and the conservative delay-equation stepper.

The delay equations solved in this package all have the conservative form

    d/du [ u * w(u) ] = w(u) - rate * w(u - 1),

so the trapezoid update over one grid cell telescopes: with u_n = n*h the
product (u*w) picks up h*w at the cell midpoint from the first term and
loses rate*(h/2)*(w_{n-m} + w_{n-m-1}) from the delayed term (m = 1/h
steps back).  Dividing by u_n - h/2 = u_{n-1} + h/2 collapses the update
to a single running sum per unit block, which vectorizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["SolutionGrid", "integrate_delay_equation"]


@dataclass(frozen=True)
class SolutionGrid:
    """Values of a delay-equation solution on u = 0, h, 2h, ..., u_max."""

    h: float
    u_max: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        m = round(1.0 / self.h)
        if abs(m * self.h - 1.0) > 1e-12:
            raise ValueError("h must divide 1 exactly")
        n = round(self.u_max / self.h)
        if len(self.values) != n + 1:
            raise ValueError("values length inconsistent with h and u_max")
        if not np.all(self.values[: m + 1] == 1.0):
            raise ValueError("solution must be identically 1 on [0, 1]")
        if np.max(np.abs(self.values)) > 1.0 + 1e-6:
            raise ValueError("solution escaped the unit band")

    @property
    def m(self) -> int:
        return round(1.0 / self.h)

    def grid_u(self) -> np.ndarray:
        return np.arange(len(self.values)) * self.h

    def value(self, u: float | np.ndarray) -> np.ndarray | float:
        """Linear interpolation; clamped at the ends."""
        u = np.asarray(u, dtype=float)
        pos = np.clip(u / self.h, 0.0, len(self.values) - 1.0)
        idx = np.minimum(pos.astype(np.int64), len(self.values) - 2)
        frac = pos - idx
        out = self.values[idx] * (1.0 - frac) + self.values[idx + 1] * frac
        return float(out) if out.ndim == 0 else out

    def value_cubic(self, u: float | np.ndarray) -> np.ndarray | float:
        """Four-point Lagrange interpolation with the stencil kept inside
        one unit interval (the solutions have derivative kinks at integers)."""
        u = np.asarray(u, dtype=float)
        scalar = u.ndim == 0
        u = np.atleast_1d(u)
        m = self.m
        n_last = len(self.values) - 1
        pos = np.clip(u / self.h, 0.0, float(n_last))
        base = pos.astype(np.int64)
        # clamp the 4-point stencil [base-1, base+2] inside the unit block;
        # the top node belongs to the last full block, not an empty one above
        block = np.minimum(base // m, n_last // m - 1)
        lo = np.maximum(block * m, 0)
        hi = np.minimum((block + 1) * m, n_last)
        start = np.clip(base - 1, lo, np.maximum(hi - 3, lo))
        t = pos - start
        w0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0
        w1 = t * (t - 2.0) * (t - 3.0) / 2.0
        w2 = -t * (t - 1.0) * (t - 3.0) / 2.0
        w3 = t * (t - 1.0) * (t - 2.0) / 6.0
        v = self.values
        out = w0 * v[start] + w1 * v[start + 1] + w2 * v[start + 2] + w3 * v[start + 3]
        return float(out[0]) if scalar else out


def integrate_delay_equation(
    values: np.ndarray,
    start: int,
    m: int,
    h: float,
    rate: float,
) -> None:
    """March the conservative delay update in place from index `start`.

    values[:start] must already hold the solution.  Each unit block of at
    most m indices is filled by one cumulative sum, valid because the
    delayed indices i-m, i-m-1 stay strictly below the block start.
    """
    if start <= m:
        raise ValueError("need the full history u <= 1 before stepping")
    n_total = len(values)
    i = start
    while i < n_total:
        stop = min(i + m, n_total)
        idx = np.arange(i, stop)
        c = rate * 0.5 * h * (values[idx - m] + values[idx - m - 1]) / (idx * h - 0.5 * h)
        values[i:stop] = values[i - 1] - np.cumsum(c)
        i = stop
