"""First zeros of the truncated means and the two summary tables.

The cutoff profile chi_delta (1 on [0,1), -delta on [1,U)) produces a mean
sigma_delta that decreases from 1 and crosses zero at a finite point U_delta
once delta > 0.  This module locates that first zero, inverts the map
delta -> U_delta, and integrates the mean up to the zero.  Those three
operations generate the two tables exported by the command line tool.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import SolutionGrid
from .piecewise import integrate_callable
from .sigma import sigma_closed, sigma_dde

# Above this delta the first zero sits in (1,2] and solves
# (1+delta) log U = 1 exactly.  Equals 1/log(2) - 1.
CLOSED_FORM_DELTA = 1.0 / math.log(2.0) - 1.0

# Zeros beyond this are treated as out of range; the search raises instead
# of chasing a crossing that the grid cannot certify.
U_CAP = 12.0

_BISECT_TOL_U = 1e-13
_BISECT_TOL_DELTA = 1e-12


class RootNotFoundError(RuntimeError):
    """No sign change found below the cap; the drift is too weak."""


def locate_first_zero(grid: SolutionGrid) -> float | None:
    """First u with grid value <= 0, refined on the cubic interpolant.

    Returns None when every node stays positive.  The scan starts after the
    initial plateau, so the mandatory 1.0 values never trip the search.
    """
    m = grid.m
    vals = grid.values
    neg = np.nonzero(vals[m + 1 :] <= 0.0)[0]
    if neg.size == 0:
        return None
    i = int(neg[0]) + m + 1
    lo = (i - 1) * grid.h
    hi = i * grid.h
    if vals[i] == 0.0:
        return hi
    # cubic interpolant sign bisection; the bracket is one cell wide
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if grid.value_cubic(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= _BISECT_TOL_U:
            break
    return 0.5 * (lo + hi)


def find_U(delta: float, use_closed_form: bool = True) -> float:
    """First zero of the cutoff mean for drift strength delta.

    Three regimes: an explicit exponential for large delta, a bisection on
    the closed-form mean while the zero is at most 3, and a marched grid
    beyond that.  Raises RootNotFoundError when the zero would exceed U_CAP.
    `use_closed_form=False` forces the bisection branch (used to test that
    the branches agree at the seam).
    """
    delta = float(delta)
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if use_closed_form and delta >= CLOSED_FORM_DELTA:
        return math.exp(1.0 / (1.0 + delta))

    if sigma_closed(delta, 2.0) <= 0.0:
        lo, hi = 1.0, 2.0
    elif sigma_closed(delta, 3.0) <= 0.0:
        lo, hi = 2.0, 3.0
    else:
        sol = sigma_dde(delta, U_CAP, richardson=True, locate_zero=False)
        u = locate_first_zero(sol.grid)
        if u is None:
            raise RootNotFoundError(
                f"mean stays positive up to u = {U_CAP}; delta = {delta} is too small"
            )
        return u

    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if sigma_closed(delta, mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= _BISECT_TOL_U:
            break
    return 0.5 * (lo + hi)


def delta_for_U(u: float) -> float:
    """Drift strength whose mean first vanishes at u.  Inverse of find_U.

    Closed form for u <= 2; otherwise a monotone bisection in delta.
    """
    u = float(u)
    if not 1.0 < u <= U_CAP:
        raise ValueError(f"u must lie in (1, {U_CAP}], got {u}")
    if u <= 2.0:
        return 1.0 / math.log(u) - 1.0
    if u <= 3.0:
        # sigma_closed(., u) is positive below the matching delta and
        # negative above it; 0.04 keeps the zero beyond 3 for the low end
        lo, hi = 0.04, CLOSED_FORM_DELTA
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            if sigma_closed(mid, u) > 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= _BISECT_TOL_DELTA:
                break
        return 0.5 * (lo + hi)

    # u in (3, U_CAP]: bracket from above, then bisect on find_U itself.
    # RootNotFoundError means the zero is past the cap, hence past u.
    hi = CLOSED_FORM_DELTA
    lo = 0.03
    while True:
        try:
            if find_U(lo) >= u:
                break
        except RootNotFoundError:
            break
        lo *= 0.25
        if lo < 1e-15:
            raise RootNotFoundError(f"could not bracket delta for u = {u}")
    while hi - lo > _BISECT_TOL_DELTA:
        mid = 0.5 * (lo + hi)
        try:
            u_mid = find_U(mid)
        except RootNotFoundError:
            u_mid = math.inf
        if u_mid >= u:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _closed_mean_integral(delta: float, w: float, tol: float = 1e-11) -> float:
    """Integral of the cutoff mean over [2, w] for 2 <= w <= 3.

    Integrating the closed form and swapping the order of integration in its
    double-integral tail gives a single smooth quadrature in the inner
    variable; no nested quadrature is needed.
    """
    if w <= 2.0:
        return 0.0
    head = (w - 2.0) - (1.0 + delta) * (
        w * math.log(w) - w - 2.0 * math.log(2.0) + 2.0
    )

    def inner(t: np.ndarray) -> np.ndarray:
        wt = w - t
        return (wt * np.log(wt) - wt + 1.0) / t

    tail = integrate_callable(inner, 1.0, w - 1.0, tol=tol)
    return head + 0.5 * (1.0 + delta) ** 2 * tail.value


def compute_I(delta: float, U: float | None = None, grid: SolutionGrid | None = None) -> float:
    """Average of the cutoff mean over [0, U]: the table quantity I.

    U and a marched grid may be supplied to reuse work; both are computed on
    demand otherwise.  The grid is only consulted when U > 3, where the
    closed forms stop.
    """
    delta = float(delta)
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if U is None:
        U = find_U(delta)
    if U <= 2.0:
        return (1.0 + delta) * (U - 1.0) / U

    # [0,2] in closed form: plateau of length 1 plus 1 - (1+d) log u piece
    total = 2.0 - (1.0 + delta) * (2.0 * math.log(2.0) - 1.0)
    w = min(U, 3.0)
    total += _closed_mean_integral(delta, w)
    if U > 3.0:
        if grid is None:
            u_max = float(max(4, math.ceil(U + 1e-12)))
            grid = sigma_dde(delta, u_max, richardson=True, locate_zero=False).grid
        cuts = [float(j) for j in range(4, int(math.floor(U)) + 1)]
        tail = integrate_callable(grid.value_cubic, 3.0, U, tol=1e-11, breakpoints=cuts)
        total += tail.value
    return total / U


@dataclass(frozen=True)
class TableRow:
    """One report line: key column, drift, first zero, mean value."""

    key: float | int
    delta: float
    U: float
    I: float
    gamma_Sk: float | None = None


def gamma_odd_order(k: int) -> float:
    """Sharper mean-value floor available for odd-order value sets."""
    if k < 3 or k % 2 == 0:
        raise ValueError(f"k must be odd and at least 3, got {k}")
    a = 1.0 + math.cos(math.pi / k)
    return a * (1.0 - math.exp(-1.0 / a))


@lru_cache(maxsize=None)
def table_by_first_zero() -> tuple[TableRow, ...]:
    """Rows keyed by the first zero u, from sqrt(e) up to 3 in steps of 0.1."""
    keys = [math.sqrt(math.e)] + [round(1.7 + 0.1 * j, 1) for j in range(14)]
    rows = []
    for u in keys:
        d = delta_for_U(u)
        rows.append(TableRow(key=u, delta=d, U=u, I=compute_I(d, U=u)))
    return tuple(rows)


@lru_cache(maxsize=None)
def table_by_order(k_min: int = 4, k_max: int = 17) -> tuple[TableRow, ...]:
    """Rows keyed by the order k of the value set, with drift 1/(k-1)."""
    if not (isinstance(k_min, int) and isinstance(k_max, int)):
        raise ValueError("k_min and k_max must be integers")
    if not 3 <= k_min <= k_max <= 64:
        raise ValueError(f"need 3 <= k_min <= k_max <= 64, got {k_min}..{k_max}")
    rows = []
    for k in range(k_min, k_max + 1):
        d = 1.0 / (k - 1)
        u = find_U(d)
        g = gamma_odd_order(k) if k % 2 == 1 else None
        rows.append(TableRow(key=k, delta=d, U=u, I=compute_I(d, U=u), gamma_Sk=g))
    return tuple(rows)
