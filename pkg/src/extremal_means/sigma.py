"""Solutions of the mean-value integral equation u*s(u) = int_0^u chi(t) s(u-t) dt.

Three independent routes to the same object:

* solve_volterra: forward second-kind trapezoid solver for arbitrary
  piecewise chi profiles (chi = 1 on [0,1), values in [-1,1]).
* sigma_closed / sigma_dde: the one-parameter step profile (1, then
  -delta) admits closed forms through u = 3 and a conservative delay
  equation d/du[u*s] = s(u) - (1+delta)*s(u-1) beyond.
* sigma_series: alternating expansion in powers of delta around the
  delta = 0 solution, used as a cross-check only.

sigma_dde and sigma_series describe the profile that keeps weight
-delta for ALL t > 1 (no cutoff); its first zero U is where the cutoff
profile chi_delta switches to 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .grid import SolutionGrid, integrate_delay_equation
from .piecewise import (
    ConstantSegment,
    PiecewiseFunction,
    SampledSegment,
    integrate_callable,
)

__all__ = [
    "DeltaSolution",
    "solve_volterra",
    "sigma_closed",
    "sigma_dde",
    "sigma_series",
    "chi_delta",
]


def _closed_tail_integral(u: float, tol: float = 1e-12) -> float:
    """integral_1^{u-1} log(u-t)/t dt for u in (2, 3]."""
    return integrate_callable(lambda t: np.log(u - t) / t, 1.0, u - 1.0, tol=tol).value


def sigma_closed(delta: float, u: float) -> float:
    """Step-profile solution by closed form, valid for u in [0, 3].

    1 on [0,1]; 1-(1+delta)*log u on [1,2]; one extra quadrature term on
    [2,3].  This is the no-cutoff branch: it equals the true solution of
    the cutoff profile only up to the first zero U.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    if not 0.0 <= u <= 3.0 + 1e-12:
        raise ValueError("closed forms cover u in [0, 3] only")
    if u <= 1.0:
        return 1.0
    base = 1.0 - (1.0 + delta) * math.log(u)
    if u <= 2.0:
        return float(base)
    return float(base + 0.5 * (1.0 + delta) ** 2 * _closed_tail_integral(u))


def sigma_closed_band(delta: float, x: np.ndarray) -> np.ndarray:
    """Vectorized closed form on [0, 2] (the range kernel builders need)."""
    x = np.asarray(x, dtype=float)
    if np.any(x > 2.0 + 1e-12):
        raise ValueError("vectorized closed form stops at u = 2")
    out = np.ones_like(x)
    mask = x > 1.0
    out[mask] = 1.0 - (1.0 + delta) * np.log(x[mask])
    return out


# ---------------------------------------------------------------------------
# general Volterra solver


def _cell_values(chi: PiecewiseFunction, n_cells: int, h: float):
    """One-sided chi values per cell plus split-cell records for off-grid jumps.

    L[k], R[k] are the values at the cell's endpoints taken from the
    segment that owns the cell interior, so grid-aligned jumps are
    handled exactly.  A breakpoint strictly inside cell k0 zeroes that
    cell's weights; the returned record carries both one-sided values so
    the stepper can integrate the two sub-cells exactly.
    """
    t_left = np.arange(n_cells) * h
    mid = t_left + 0.5 * h
    seg_idx = np.asarray(chi.segment_index(mid))
    L = np.empty(n_cells)
    R = np.empty(n_cells)
    for i, seg in enumerate(chi.segments):
        mask = seg_idx == i
        if np.any(mask):
            L[mask] = seg.values(t_left[mask])
            R[mask] = seg.values(t_left[mask] + h)
    records = []
    for i, bp in enumerate(chi.breakpoints):
        if i == 0:
            continue
        pos = bp / h
        if abs(pos - round(pos)) < 1e-9:
            continue  # grid-aligned jump already captured by one-sided cells
        k0 = int(math.floor(pos))
        if k0 >= n_cells:
            continue
        if bp <= 1.0:
            raise ValueError("off-grid breakpoints below 1 are not supported")
        left_seg = chi.segments[i - 1]
        right_seg = chi.segments[i]
        rec = {
            "k0": k0,
            "bp": bp,
            "left_at_node": float(left_seg.values(np.array([k0 * h]))[0]),
            "left_at_bp": float(left_seg.values(np.array([bp]))[0]),
            "right_at_bp": float(right_seg.values(np.array([bp]))[0]),
            "right_at_node": float(right_seg.values(np.array([(k0 + 1) * h]))[0]),
        }
        L[k0] = 0.0
        R[k0] = 0.0
        records.append(rec)
    ks = [r["k0"] for r in records]
    if len(set(ks)) != len(ks):
        raise ValueError("two off-grid breakpoints share one grid cell; reduce h")
    return L, R, records


def _volterra_values(chi: PiecewiseFunction, u_max: float, h: float) -> np.ndarray:
    m = round(1.0 / h)
    n_total = round(u_max / h)
    L, R, records = _cell_values(chi, n_total, h)
    if max(np.max(np.abs(L)), np.max(np.abs(R))) > 1.0 + 1e-9:
        raise ValueError("chi must stay in [-1, 1]")
    w = np.empty(n_total)  # w[j] multiplies sigma_{n-j}, j >= 1
    w[0] = 0.0
    w[1:] = 0.5 * h * (L[1:] + R[:-1])
    sigma = np.empty(n_total + 1)
    sigma[: m + 1] = 1.0
    srev = np.empty(n_total + 1)  # srev[n_total - i] = sigma_i, contiguous dots
    srev[n_total - m :] = 1.0
    half_tail = 0.5 * h * R  # weight of sigma_0 = 1 via the last cell
    denom_shift = 0.5 * h * L[0]
    for n in range(m + 1, n_total + 1):
        rhs = float(np.dot(w[1:n], srev[n_total - n + 1 : n_total])) + half_tail[n - 1]
        for rec in records:
            k0 = rec["k0"]
            if k0 > n - 1:
                continue
            bp = rec["bp"]
            x = n * h - bp  # sigma argument at the interior breakpoint
            pos = x / h
            i0 = min(int(pos), n - 1)
            frac = pos - i0
            s_bp = sigma[i0] * (1.0 - frac) + sigma[i0 + 1] * frac
            ha = bp - k0 * h
            hb = (k0 + 1) * h - bp
            rhs += 0.5 * ha * (rec["left_at_node"] * sigma[n - k0] + rec["left_at_bp"] * s_bp)
            rhs += 0.5 * hb * (rec["right_at_bp"] * s_bp + rec["right_at_node"] * sigma[n - k0 - 1])
        val = rhs / (n * h - denom_shift)
        sigma[n] = val
        srev[n_total - n] = val
    return sigma


def solve_volterra(
    chi: PiecewiseFunction,
    u_max: float,
    h: float = 1e-4,
    richardson: bool = False,
) -> SolutionGrid:
    """Forward trapezoid solve of u*s(u) = int_0^u chi(t) s(u-t) dt.

    The diagonal (t -> 0 end, where chi = 1) is moved to the left-hand
    side, making the marching explicit.  Off-grid jump points of chi get
    exact split-cell treatment, so the discrete residual stays O(h^2)
    even for cutoff profiles.
    """
    if u_max < 1.0:
        raise ValueError("u_max must be >= 1")
    if h > 1e-3:
        raise ValueError("step must satisfy h <= 1e-3")
    if abs(round(1.0 / h) * h - 1.0) > 1e-12:
        raise ValueError("h must divide 1 exactly")
    if chi.domain_end < u_max:
        raise ValueError("chi not defined up to u_max")
    first = chi.segments[0]
    if not (isinstance(first, ConstantSegment) and first.value == 1.0):
        raise ValueError("chi must be identically 1 on [0, 1)")
    if len(chi.breakpoints) > 1 and chi.breakpoints[1] < 1.0 - 1e-12:
        raise ValueError("chi must be identically 1 on [0, 1)")
    if abs(chi.eval_left(1.0) - 1.0) > 1e-12:
        raise ValueError("chi must be identically 1 on [0, 1)")
    values = _volterra_values(chi, u_max, h)
    if richardson:
        fine = _volterra_values(chi, u_max, h / 2.0)
        values = (4.0 * fine[::2] - values) / 3.0
        m = round(1.0 / h)
        values[: m + 1] = 1.0
    return SolutionGrid(h=h, u_max=u_max, values=values)


# ---------------------------------------------------------------------------
# the one-parameter step profile


def chi_delta(delta: float) -> PiecewiseFunction:
    """Cutoff step profile: 1 on [0,1), -delta on [1,U), 0 from U on,
    with U the first zero of the induced solution."""
    from .extremal import find_U

    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    U = find_U(delta)
    return PiecewiseFunction(
        breakpoints=(0.0, 1.0, U),
        segments=(ConstantSegment(1.0), ConstantSegment(-delta), ConstantSegment(0.0)),
    )


@dataclass(frozen=True)
class DeltaSolution:
    """No-cutoff step-profile solution with its first zero and mean."""

    delta: float
    grid: SolutionGrid
    U: Optional[float] = None
    I: Optional[float] = None


def _dde_march(delta: float, u_max: float, h: float) -> np.ndarray:
    m = round(1.0 / h)
    n = round(u_max / h)
    values = np.empty(n + 1)
    u = np.arange(n + 1) * h
    values[: m + 1] = 1.0
    top = min(2 * m, n)
    values[m + 1 : top + 1] = 1.0 - (1.0 + delta) * np.log(u[m + 1 : top + 1])
    if n > 2 * m:
        integrate_delay_equation(values, 2 * m + 1, m, h, rate=1.0 + delta)
    return values


def sigma_dde(
    delta: float,
    u_max: float,
    h: float = 1e-4,
    richardson: bool = True,
    locate_zero: bool = True,
) -> DeltaSolution:
    """Step-profile solution by the conservative delay update.

    Seeds the closed form on [0, 2], then marches
    d/du[u*s] = s(u) - (1+delta)*s(u-1).  With richardson=True a
    half-step solve sharpens the table; the closed-form region is
    re-pinned afterwards.  When the first zero lies on the grid, U and
    the mean I are filled in.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    if u_max < 2.0:
        raise ValueError("u_max must be >= 2")
    values = _dde_march(delta, u_max, h)
    if richardson:
        fine = _dde_march(delta, u_max, h / 2.0)
        values = (4.0 * fine[::2] - values) / 3.0
        m = round(1.0 / h)
        u = np.arange(2 * m + 1) * h
        values[: m + 1] = 1.0
        top = min(2 * m, len(values) - 1)
        values[m + 1 : top + 1] = 1.0 - (1.0 + delta) * np.log(u[m + 1 : top + 1])
    grid = SolutionGrid(h=h, u_max=u_max, values=values)
    U = None
    I = None
    if locate_zero and delta > 0.0:
        from .extremal import compute_I, locate_first_zero

        U = locate_first_zero(grid)
        if U is not None:
            I = compute_I(delta, U=U, grid=grid)
    return DeltaSolution(delta=delta, grid=grid, U=U, I=I)


# ---------------------------------------------------------------------------
# series cross-check


def _simplex_term(j: int, u: float) -> float:
    """T_j(u): j-fold average of the delta=0 solution against dt/t over
    the region {t_i >= 1, sum t_i <= u}; T_j vanishes for u <= j."""
    from .dickman import default_table

    table = default_table()
    if u <= j:
        return 0.0
    tol = (1e-11, 1e-9, 1e-7)[j - 1]
    kinks = [u - i for i in range(int(math.floor(u)) + 1)]
    if j == 1:
        fn = lambda ts: np.asarray(table.rho(np.maximum(u - ts, 0.0))) / ts
    else:
        fn = lambda ts: np.array(
            [_simplex_term(j - 1, u - t) for t in np.atleast_1d(ts)]
        ) / np.asarray(ts)
    return integrate_callable(fn, 1.0, u - (j - 1), tol=tol, breakpoints=kinks).value


def sigma_series(delta: float, u: float, j_max: int) -> float:
    """Expansion of the no-cutoff solution in powers of -delta, truncated
    after j_max correction terms.  j_max <= 3; a cross-check, not a solver."""
    from .dickman import rho

    if not 0 <= j_max <= 3:
        raise ValueError("series truncation supports j_max in 0..3")
    if u < 0:
        raise ValueError("u must be >= 0")
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    total = float(rho(u))
    for j in range(1, j_max + 1):
        total += ((-delta) ** j / math.factorial(j)) * _simplex_term(j, u)
    return total
