"""Extending the cutoff profile so the mean vanishes identically.

Past the first zero U the profile is no longer free: requiring the mean to
stay at zero forces the renewal rule

    chi(t) = integral over v in [1, U] of k(v) chi(t - v) dv,   t > U,

with kernel k(v) = (1+delta) s(v-1) / v, where s is the pre-cutoff mean.
The kernel is nonnegative with unit total mass (its antiderivative is
1 - s(x), and s(U) = 0), so each extension value is an average of earlier
profile values; the extension therefore stays inside [-delta, 1] and is
continuous, while the profile itself jumps at U.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .extremal import find_U
from .piecewise import (
    ConstantSegment,
    PiecewiseFunction,
    SampledSegment,
    integrate_callable,
)
from .sigma import sigma_dde, solve_volterra


def _mean_evaluator(delta: float, U: float):
    """Vectorized pre-cutoff mean on [0, max(2, U)], via a marched table.

    The table seeds its closed-form region exactly, so node values on [0, 2]
    carry no marching error; beyond that the Richardson-combined march is
    accurate to ~1e-10, far below the O(h^2) renewal quadrature below.
    """
    u_max = float(max(2, math.ceil(U + 1e-12)))
    grid = sigma_dde(delta, u_max, richardson=True, locate_zero=False).grid
    return grid.value_cubic


@dataclass(frozen=True)
class ExtendedChi:
    """Cutoff profile with its mean-preserving extension past U.

    `value` treats the dip window as the closed interval [1, U]; the
    underlying piecewise profile is right-continuous, so profile.eval(U)
    returns the first extension value instead (the jump is genuine).
    """

    delta: float
    U: float
    h: float
    t_max: float
    samples: np.ndarray
    profile: PiecewiseFunction

    def value(self, t: float | np.ndarray) -> float | np.ndarray:
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        if np.any(t_arr < 0.0) or np.any(t_arr > self.t_max + 1e-12):
            raise ValueError(f"argument outside [0, {self.t_max}]")
        out = np.empty_like(t_arr)
        head = t_arr < 1.0
        out[head] = 1.0
        dip = (t_arr >= 1.0) & (t_arr <= self.U)
        out[dip] = -self.delta
        tail = t_arr > self.U
        if np.any(tail):
            seg = self.profile.segments[-1]
            out[tail] = seg.values(t_arr[tail])
        return float(out[0]) if scalar else out


def extend_chi(delta: float, t_max: float | None = None, h: float = 1e-4) -> ExtendedChi:
    """March the renewal rule forward on a step-h grid offset from U.

    Each step averages known values: contributions from the sampled
    extension use a trapezoid over kernel nodes, and contributions from the
    constant head/dip windows use the kernel's exact antiderivative
    1 - s(x), so no quadrature error enters from those regions at all.
    """
    delta = float(delta)
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    m = round(1.0 / h)
    if abs(m * h - 1.0) > 1e-12 or m < 10:
        raise ValueError("h must divide 1 with at least 10 steps per unit")

    U = find_U(delta)
    if t_max is None:
        t_max = 4.0 * U
    if t_max <= U:
        raise ValueError(f"t_max must exceed U = {U}")

    mean_at = _mean_evaluator(delta, U)
    s_at_U = float(mean_at(U))          # ~0 by construction of U

    def kernel(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        return (1.0 + delta) * mean_at(v - 1.0) / v

    # kernel nodes j*h for j in [m, M]; the stub [M*h, U] is handled
    # separately (U need not sit on the grid)
    M = int(math.floor(U / h - 1e-12))
    K_nodes = np.zeros(M + 1)
    K_nodes[m:] = kernel(np.arange(m, M + 1) * h)
    K_end = float(kernel(np.array([U]))[0])
    stub = U - M * h

    L = int(math.ceil((t_max - U) / h - 1e-9))
    ext = np.empty(L + 1)
    extrev = np.empty(L + 1)

    def put(l: int, val: float) -> None:
        ext[l] = val
        extrev[L - l] = val

    # chi at U from the right: both constant windows, no sampled region
    put(0, (1.0 - s_at_U) - (1.0 + delta) * (1.0 - float(mean_at(U - 1.0))))

    # while l*h <= 1 every window argument is below U: fully explicit
    n_early = min(m, L)
    if n_early >= 1:
        x = U - 1.0 + np.arange(1, n_early + 1) * h
        early = -delta - s_at_U + (1.0 + delta) * mean_at(x)
        ext[1 : n_early + 1] = early
        extrev[L - n_early : L] = early[::-1]

    if L > m:
        # dip-window contribution for l in (m, M]: -delta * mass of the
        # kernel over [l*h, U], via the antiderivative identity
        lo = m + 1
        hi = min(L, M)
        dip_term = np.zeros(L + 1)
        if hi >= lo:
            s_nodes = mean_at(np.arange(lo, hi + 1) * h)
            dip_term[lo : hi + 1] = -delta * (s_nodes - s_at_U)

        U_over_h = U / h
        for l in range(m + 1, L + 1):
            jmax = min(l, M)
            lo_i = L - l + m
            dot = float(np.dot(K_nodes[m : jmax + 1], extrev[lo_i : lo_i + (jmax - m + 1)]))
            dot -= 0.5 * (K_nodes[m] * ext[l - m] + K_nodes[jmax] * ext[l - jmax])
            val = h * dot
            if l <= M:
                val += dip_term[l]
            else:
                # stub cell [M*h, U]; its inner endpoint argument lands at
                # l*h past U, generally off the extension grid
                pos = l - U_over_h
                i0 = min(int(pos), l - 1)
                frac = pos - i0
                chi_at = ext[i0] * (1.0 - frac) + ext[i0 + 1] * frac
                val += 0.5 * stub * (K_nodes[M] * ext[l - M] + K_end * chi_at)
            put(l, val)

    top = ext.max()
    bot = ext.min()
    if top > 1.0 + 1e-8 or bot < -delta - 1e-8:
        raise RuntimeError(
            f"extension escaped [-delta, 1]: range [{bot}, {top}]"
        )

    domain_end = U + L * h
    profile = PiecewiseFunction(
        breakpoints=(0.0, 1.0, U),
        segments=(
            ConstantSegment(1.0),
            ConstantSegment(-delta),
            SampledSegment(start=U, h=h, samples=ext),
        ),
        domain_end=domain_end,
    )
    return ExtendedChi(
        delta=delta, U=U, h=h, t_max=domain_end, samples=ext, profile=profile
    )


def kernel_mass(delta: float, U: float | None = None) -> float:
    """Direct quadrature of the renewal kernel over [1, U].

    Independent of the antiderivative identity used by extend_chi; the
    result should equal 1 - s(U), i.e. 1 up to the zero-location error.
    """
    delta = float(delta)
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if U is None:
        U = find_U(delta)
    mean_at = _mean_evaluator(delta, U)

    def kernel(v: np.ndarray) -> np.ndarray:
        return (1.0 + delta) * mean_at(np.asarray(v, dtype=float) - 1.0) / v

    cuts = [float(j) for j in range(2, int(math.floor(U)) + 1)]
    res = integrate_callable(kernel, 1.0, U, tol=1e-11, breakpoints=cuts)
    return res.value


def verify_sigma_vanishes(chi: ExtendedChi, u_max: float, h: float = 1e-4) -> float:
    """Max |mean| on grid nodes in [U, u_max] when driven by the profile.

    Runs the integral-equation solver against the extended profile; the
    construction promises the mean is identically zero past U, so the
    returned number is the end-to-end defect of the whole pipeline.
    """
    if u_max > chi.t_max + 1e-9:
        raise ValueError(f"u_max exceeds the extension range {chi.t_max}")
    if u_max <= chi.U:
        raise ValueError("u_max must exceed the jump point U")
    sol = solve_volterra(chi.profile, u_max, h=h)
    us = sol.grid_u()
    mask = us >= chi.U - 1e-9
    return float(np.max(np.abs(sol.values[mask])))
