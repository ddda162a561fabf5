"""Desk-scale laboratory for completely multiplicative functions.

Everything here is exact, finite arithmetic on sieve arrays: build an f
with prescribed values at primes, measure its partial-sum and log means,
form the companion transforms, and check the pointwise inequalities the
asymptotic theory rests on.  Scales are chosen so a full run takes
seconds; the asymptotic statements themselves are out of reach at desk
scale and are only tracked within generous, named tolerances.

Value convention: an f value at a prime is an angle index ell in
{0, ..., k-1} (the value is e(ell/k)) or None for the value 0.  Angle
indices are added exactly modulo k along factorizations; floating point
enters only when values are materialized into sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chi_renewal import extend_chi
from .extremal import find_U
from .sigma import sigma_dde

SIEVE_CAP = 10**8

# default desk scale: y^sqrt(e) for the order-2 construction just fits
DESK_Y = 10**4
DESK_N = 4_000_000


class InfeasibleError(ValueError):
    """A target profile demands class weights outside [0, 1/(k-1)]."""


def sieve_primes(N: int) -> np.ndarray:
    """All primes <= N, ascending."""
    N = int(N)
    if not 2 <= N <= SIEVE_CAP:
        raise ValueError(f"sieve limit must lie in [2, {SIEVE_CAP}], got {N}")
    composite = np.zeros(N + 1, dtype=bool)
    composite[:2] = True
    for p in range(2, math.isqrt(N) + 1):
        if not composite[p]:
            composite[p * p :: p] = True
    return np.flatnonzero(~composite)


def smallest_prime_factors(N: int) -> np.ndarray:
    """spf[n] for n <= N (spf[1] = 1); primes satisfy spf[p] = p."""
    N = int(N)
    if not 2 <= N <= SIEVE_CAP:
        raise ValueError(f"sieve limit must lie in [2, {SIEVE_CAP}], got {N}")
    spf = np.zeros(N + 1, dtype=np.int32)
    spf[1] = 1
    for p in range(2, math.isqrt(N) + 1):
        if spf[p] == 0:
            spf[p] = p
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf[2:] == 0) + 2
    spf[rest] = rest
    return spf


@dataclass(frozen=True)
class MultiplicativeSpec:
    """Recipe for a completely multiplicative f with k-th root values.

    `assignment` maps primes in (y, N] to an angle index or to None (the
    value 0); primes <= y implicitly carry the value 1, and unassigned
    primes above y default to 1 as well.
    """

    k: int
    y: float
    assignment: dict[int, int | None]
    N: int

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"order must be >= 2, got {self.k}")
        for p, v in self.assignment.items():
            if p <= self.y:
                raise ValueError(f"prime {p} below the threshold y={self.y}")
            if v is not None and not 0 <= v < self.k:
                raise ValueError(f"angle index {v} out of range for order {self.k}")


def random_spec(
    k: int, y: float, N: int, seed: int, zero_probability: float = 0.0
) -> MultiplicativeSpec:
    """Uniformly random angle assignment on primes in (y, N]; deterministic per seed."""
    rng = np.random.default_rng(seed)
    primes = sieve_primes(N)
    sel = primes[primes > y]
    angles = rng.integers(0, k, size=len(sel))
    zeros = rng.random(len(sel)) < zero_probability
    assignment: dict[int, int | None] = {}
    for p, a, z in zip(sel.tolist(), angles.tolist(), zeros.tolist()):
        assignment[p] = None if z else int(a)
    return MultiplicativeSpec(k=k, y=float(y), assignment=assignment, N=int(N))


def build_f(spec: MultiplicativeSpec, N: int) -> np.ndarray:
    """Materialize f(n) for n <= N as a complex array (f[0] = 0).

    Complete multiplicativity is realized through smallest-prime-factor
    recursion f(n) = f(n / spf(n)) . f(spf(n)), evaluated in doubling
    blocks so every lookup lands in already-filled territory.
    """
    N = int(N)
    if spec.N < N:
        raise ValueError(f"spec covers primes to {spec.N} < requested {N}")
    k = spec.k
    spf = smallest_prime_factors(N)
    ell_at = np.zeros(N + 1, dtype=np.int16)
    zero_at = np.zeros(N + 1, dtype=bool)
    for p, v in spec.assignment.items():
        if p <= N:
            if v is None:
                zero_at[p] = True
            else:
                ell_at[p] = v
    ell = np.zeros(N + 1, dtype=np.int16)
    nonzero = np.ones(N + 1, dtype=bool)
    nonzero[0] = False
    lo = 2
    while lo <= N:
        hi = min(2 * lo, N + 1)
        n = np.arange(lo, hi, dtype=np.int64)
        p = spf[lo:hi].astype(np.int64)
        m = n // p  # m < lo, already filled (prime n gives m = 1)
        ell[lo:hi] = (ell[m] + ell_at[p]) % k
        nonzero[lo:hi] = nonzero[m] & ~zero_at[p]
        lo = hi
    roots = np.exp(2j * np.pi * np.arange(k) / k)
    f = roots[ell]
    f[~nonzero] = 0.0
    return f


def build_g(f: np.ndarray, primes: np.ndarray | None = None) -> np.ndarray:
    """Companion transform: completely multiplicative g with g(p) = |1 + f(p)| - 1."""
    N = len(f) - 1
    if primes is None:
        primes = sieve_primes(N)
    g = np.ones(N + 1)
    g[0] = 0.0
    gp_all = np.abs(1.0 + f[primes]) - 1.0
    for p, gp in zip(primes.tolist(), gp_all.tolist()):
        if abs(gp - 1.0) < 1e-15:
            continue
        q = p
        while q <= N:
            g[q::q] *= gp
            q *= p
    return g


def divisor_correlation(f: np.ndarray, n_max: int) -> np.ndarray:
    """h(n) = sum over ab = n of f(a) conj(f(b)), for n <= n_max."""
    n_max = int(min(n_max, len(f) - 1))
    h = np.zeros(n_max + 1, dtype=complex)
    for a in range(1, n_max + 1):
        h[a::a] += f[a] * np.conj(f[1 : n_max // a + 1])
    return h


@dataclass(frozen=True)
class StepProfile:
    """Right-continuous step function: cum[j] holds the value from points[j] on."""

    points: np.ndarray
    cum: np.ndarray

    def value(self, u: float | np.ndarray) -> float | np.ndarray:
        u_arr = np.asarray(u, dtype=float)
        idx = np.searchsorted(self.points, u_arr, side="right")
        out = np.where(idx > 0, self.cum[np.maximum(idx - 1, 0)], 0.0)
        return float(out) if np.ndim(u) == 0 else out


@dataclass(frozen=True)
class TransformBundle:
    """g, h, and the two running profiles derived from one f array."""

    g_values: np.ndarray
    h_values: np.ndarray
    deficiency: StepProfile  # running sum of (1 - g(p))/p over primes
    partial_sum: StepProfile  # running sum of g(n)


def transforms(f: np.ndarray, N: int, h_max: int | None = None) -> TransformBundle:
    """All companion quantities of f in one pass.

    h is the divisor correlation (cost n log n, so cap it with h_max when
    only small n matter); the deficiency profile jumps at primes, the
    partial-sum profile at every integer.
    """
    N = int(N)
    if N > len(f) - 1:
        raise ValueError(f"f covers n <= {len(f) - 1} < requested {N}")
    primes = sieve_primes(N)
    g = build_g(f[: N + 1], primes)
    h = divisor_correlation(f, h_max if h_max is not None else N)
    deficiency = StepProfile(
        points=primes.astype(np.int64),
        cum=np.cumsum((1.0 - g[primes]) / primes),
    )
    partial = StepProfile(points=np.arange(1, N + 1), cum=np.cumsum(g[1:]))
    return TransformBundle(g_values=g, h_values=h, deficiency=deficiency, partial_sum=partial)


def divisor_domination_check(f: np.ndarray, n_max: int) -> int:
    """Count n <= n_max where |sum_{d|n} f(d)| exceeds sum_{d|n} g(d).

    Only n free of squares of "bad" primes (those with f(p) != 1) are in
    scope; the inequality is claimed there and the count should be 0.
    """
    n_max = int(min(n_max, len(f) - 1))
    primes = sieve_primes(n_max)
    g = build_g(f[: n_max + 1], primes)
    f_div = np.zeros(n_max + 1, dtype=complex)
    g_div = np.zeros(n_max + 1)
    for d in range(1, n_max + 1):
        f_div[d::d] += f[d]
        g_div[d::d] += g[d]
    excluded = np.zeros(n_max + 1, dtype=bool)
    for p in primes.tolist():
        if p * p > n_max:
            break
        if abs(f[p] - 1.0) > 1e-12:
            excluded[p * p :: p * p] = True
    excluded[0] = True
    violations = (np.abs(f_div) > g_div + 1e-9) & ~excluded
    return int(np.sum(violations))


def sandwich_check(g: np.ndarray, n_max: int) -> float:
    """Max defect of 1 - S1 <= g(n) <= 1 - S1 + (S1^2 - S2)/2 on clean n.

    S1 and S2 are the first two power sums of (1 - g(p)) over primes
    dividing n; n with a repeated bad prime (g(p) != 1) are excluded.
    Returns the worst violation of either side, floored at 0.
    """
    n_max = int(min(n_max, len(g) - 1))
    primes = sieve_primes(n_max)
    s1 = np.zeros(n_max + 1)
    s2 = np.zeros(n_max + 1)
    excluded = np.zeros(n_max + 1, dtype=bool)
    for p in primes.tolist():
        c = 1.0 - g[p]
        if c != 0.0:
            s1[p::p] += c
            s2[p::p] += c * c
            if p * p <= n_max:
                excluded[p * p :: p * p] = True
    excluded[0] = True
    gn = g[: n_max + 1]
    lower = (1.0 - s1) - gn
    upper = gn - (1.0 - s1 + 0.5 * (s1 * s1 - s2))
    worst = np.maximum(lower, upper)
    worst[excluded] = -np.inf
    return float(max(0.0, np.max(worst)))


def empirical_chi(
    f: np.ndarray, y: float, u: float, primes: np.ndarray | None = None
) -> complex:
    """Log-weighted prime average of f up to y^u."""
    N = len(f) - 1
    x = float(y) ** float(u)
    if x > N + 1e-9:
        raise ValueError(f"y^u = {x:g} exceeds the f range {N}")
    if primes is None:
        primes = sieve_primes(int(min(x, N)))
    sel = primes[: np.searchsorted(primes, x, side="right")]
    logs = np.log(sel)
    return complex(np.sum(f[sel] * logs) / np.sum(logs))


@dataclass(frozen=True)
class MeanValueReport:
    """Partial-sum and log means of f^j at one cutoff."""

    x: float
    j: int
    partial_sum_over_x: complex
    log_mean: complex

    def check(self, slack: float = 1e-9) -> bool:
        """Trivial-size bounds: |partial| <= 1, |log mean| <= 1 + 1/log x."""
        return (
            abs(self.partial_sum_over_x) <= 1.0 + slack
            and abs(self.log_mean) <= 1.0 + 1.0 / math.log(self.x) + slack
        )


def mean_values(f: np.ndarray, x: float, j: int = 1) -> MeanValueReport:
    """Exact finite means of f^j over n <= x."""
    N = len(f) - 1
    if not 2.0 <= x <= N:
        raise ValueError(f"cutoff must lie in [2, {N}], got {x}")
    if j < 1:
        raise ValueError(f"exponent must be >= 1, got {j}")
    n = int(x)
    vals = f[1 : n + 1] if j == 1 else f[1 : n + 1] ** j
    partial = complex(np.sum(vals) / x)
    log_mean = complex(np.sum(vals / np.arange(1, n + 1)) / math.log(x))
    return MeanValueReport(x=float(x), j=int(j), partial_sum_over_x=partial, log_mean=log_mean)


def construct_tracking_spec(
    k: int, delta: float, y: float, A: float, N: int
) -> MultiplicativeSpec:
    """Partition primes so the empirical profile tracks the delta target.

    Each prime p in (y, y^{A U}] at exponent t = log p / log y belongs to
    class 0 with weight 1 - (k-1) alpha(t) and to each other class with
    weight alpha(t) = (1 - chi(t))/k, where chi is the dip profile up to
    its first zero U and the mean-preserving extension beyond.  Greedy
    largest-deficit-first assignment on log-prime weight keeps every
    class's running sum within one prime gap of its target.
    """
    k = int(k)
    if k < 2:
        raise ValueError(f"order must be >= 2, got {k}")
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if A <= 0.0:
        raise ValueError(f"range multiplier must be positive, got {A}")
    U = find_U(delta)
    t_end = A * U
    x_end = float(y) ** t_end
    if x_end > N * (1.0 + 1e-9):
        raise ValueError(f"y^(A U) = {x_end:g} exceeds the sieve limit {N}")

    primes = sieve_primes(N)
    lo = np.searchsorted(primes, y, side="right")
    hi = np.searchsorted(primes, x_end, side="right")
    sel = primes[lo:hi]
    logs = np.log(sel)
    t = logs / math.log(y)

    chi_vals = np.full(len(sel), -delta)
    beyond = t > U
    if np.any(beyond):
        ext = extend_chi(delta, t_max=t_end)
        chi_vals[beyond] = ext.value(t[beyond])
    alpha = (1.0 - chi_vals) / k
    cap = 1.0 / (k - 1)
    if alpha.min() < -1e-12 or alpha.max() > cap + 1e-12:
        raise InfeasibleError(
            f"class weight range [{alpha.min():.6f}, {alpha.max():.6f}] "
            f"escapes [0, {cap:.6f}] for order {k}"
        )
    alpha = np.clip(alpha, 0.0, cap)

    target_cum = np.zeros(k)
    assigned = np.zeros(k)
    assignment: dict[int, int | None] = {}
    inc = np.empty(k)
    for i in range(len(sel)):
        w = logs[i]
        a = alpha[i]
        inc[0] = (1.0 - (k - 1) * a) * w
        inc[1:] = a * w
        target_cum += inc
        ell = int(np.argmax(target_cum - assigned))
        assigned[ell] += w
        assignment[int(sel[i])] = ell
    return MultiplicativeSpec(k=k, y=float(y), assignment=assignment, N=int(N))


@dataclass(frozen=True)
class TrackRow:
    """One cutoff of a construction-vs-target comparison."""

    u: float
    x: float
    partial_sum: complex
    log_mean: complex
    target: float
    deviation: float


def tracking_rows(
    f: np.ndarray, y: float, delta: float, u_values: list[float]
) -> list[TrackRow]:
    """Measured means at x = y^u against the delta-profile target.

    The target is the dip solution for u <= U and 0 beyond; deviation is
    the distance of the partial-sum mean from it.
    """
    N = len(f) - 1
    u_values = [float(u) for u in u_values]
    if not u_values:
        return []
    x_top = y ** max(u_values)
    if x_top > N + 1e-9:
        raise ValueError(f"largest cutoff y^u = {x_top:g} exceeds the f range {N}")
    U = find_U(delta)
    u_cap = max(2.0, math.ceil(min(U, max(u_values)) + 1e-12))
    target_at = sigma_dde(delta, u_cap, richardson=True, locate_zero=False).grid.value_cubic
    csum = np.cumsum(f[1:])
    csum_div = np.cumsum(f[1:] / np.arange(1, N + 1))
    rows = []
    for u in u_values:
        x = float(y) ** u
        n = int(x)
        partial = complex(csum[n - 1] / x)
        log_mean = complex(csum_div[n - 1] / math.log(x))
        target = float(target_at(u)) if u <= U else 0.0
        rows.append(
            TrackRow(
                u=u,
                x=x,
                partial_sum=partial,
                log_mean=log_mean,
                target=target,
                deviation=abs(partial - target),
            )
        )
    return rows


def mobius(n: int) -> int:
    """Moebius function by trial division (small n only)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    count = 0
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            count += 1
        d += 1
    if n > 1:
        count += 1
    return -1 if count % 2 else 1


def totient(n: int) -> int:
    """Euler phi by trial division (small n only)."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    result = n
    d = 2
    m = n
    while d * d <= m:
        if m % d == 0:
            while m % d == 0:
                m //= d
            result -= result // d
        d += 1
    if m > 1:
        result -= result // m
    return result


def coprime_power_sum(k: int, l: int) -> tuple[complex, float]:
    """Sum of e(j/l) over j <= k coprime to k, and its closed form.

    The closed form is mobius(l) totient(k) / totient(l); the pair is
    returned so tests can compare the brute sum against it.
    """
    if k < 1 or l < 1 or k % l != 0:
        raise ValueError(f"need l | k with both positive, got k={k}, l={l}")
    js = np.array([j for j in range(1, k + 1) if math.gcd(j, k) == 1])
    lhs = complex(np.sum(np.exp(2j * np.pi * js / l)))
    rhs = mobius(l) * totient(k) / totient(l)
    return lhs, float(rhs)
