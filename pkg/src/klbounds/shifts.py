"""Shift-schedule optimization for coupling-based divergence bounds.

An N-entry schedule eta_0..eta_{N-1} (last entry 1) moves an auxiliary
process along W2 geodesics toward the approximating chain.  The induced
distance recursion comes in two flavors:

- Simple:    d_{n+1} = L (1 - eta_n) d_n + a
- WeakAware: d_{n+1}^2 = L^2 (1-eta_n)^2 d_n^2 + 2 a1 (1-eta_n) d_n + a0^2

and the objective charged to a schedule is

    c * sum_{n < N-1} eta_n^2 d_n^2  +  c' * d_{N-1}^2  +  b^2.

This module provides exact evaluation of that objective, closed-form
optimal values/schedules for the Simple recursion (contraction factor
L = 1 and L in (0,1)), the feasible three-phase schedule used for the
WeakAware recursion on 1/2 <= L <= 2, and an independent dynamic-programming
oracle for desk-scale verification.

Index convention: all closed forms are stated for N shifts with
eta_{N-1} = 1 (the final interpolating shift), i.e. N-1 free shifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "FeasibilityError",
    "SimpleError",
    "WeakAwareError",
    "ShiftProblem",
    "ShiftSchedule",
    "ObjectiveTrace",
    "evaluate_schedule",
    "optimal_value_L1",
    "optimal_shifts_L1",
    "single_step_opt",
    "optimal_value_Lgeneral",
    "optimal_shifts_Lgeneral",
    "final_bound_with_cross_reg",
    "three_phase_schedule",
    "dp_oracle",
]


class FeasibilityError(ValueError):
    """Raised when a shift schedule violates the [0,1] / last-entry-1 constraints."""


@dataclass(frozen=True)
class SimpleError:
    """Additive one-step error level: d_{n+1} = L (1-eta) d_n + a."""

    a: float

    def __post_init__(self):
        if self.a < 0.0:
            raise ValueError("error level a must be >= 0")


@dataclass(frozen=True)
class WeakAwareError:
    """Strong/weak error levels driving the squared-distance recursion.

    a0 is the strong level, a1 the weak level (weak + gamma * strong in the
    framework's usage).
    """

    a0: float
    a1: float

    def __post_init__(self):
        if self.a0 < 0.0 or self.a1 < 0.0:
            raise ValueError("error levels must be >= 0")


@dataclass(frozen=True)
class ShiftProblem:
    """Optimization instance: step count, contraction, errors, and costs."""

    n: int
    L: float
    d0: float
    error: SimpleError | WeakAwareError
    c: float = 1.0
    c_prime: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.L <= 0.0:
            raise ValueError("L must be > 0")
        if self.d0 < 0.0 or self.c < 0.0 or self.c_prime < 0.0 or self.b < 0.0:
            raise ValueError("d0, c, c_prime, b must be >= 0")


@dataclass(frozen=True)
class ShiftSchedule:
    """Feasible shift vector: every entry in [0,1], final entry 1."""

    eta: np.ndarray

    def __post_init__(self):
        e = np.atleast_1d(np.asarray(self.eta, dtype=float))
        if e.ndim != 1 or e.size < 1:
            raise FeasibilityError("schedule must be a nonempty vector")
        if np.any(e < -1e-15) or np.any(e > 1.0 + 1e-15):
            raise FeasibilityError("shift entries must lie in [0, 1]")
        if abs(e[-1] - 1.0) > 1e-12:
            raise FeasibilityError("final shift must equal 1")
        e = np.clip(e, 0.0, 1.0)
        e[-1] = 1.0
        e.setflags(write=False)
        object.__setattr__(self, "eta", e)

    def __len__(self) -> int:
        return self.eta.size


@dataclass(frozen=True)
class ObjectiveTrace:
    """Distance trace and objective decomposition for one schedule."""

    distances: np.ndarray
    main_term: float
    final_term: float

    @property
    def total(self) -> float:
        return self.main_term + self.final_term


def propagate_distances(problem: ShiftProblem, eta: np.ndarray) -> np.ndarray:
    """Distances d_0..d_{N-1} under the problem's recursion (last shift unused)."""
    d = np.empty(problem.n)
    d[0] = problem.d0
    L = problem.L
    if isinstance(problem.error, SimpleError):
        a = problem.error.a
        for k in range(problem.n - 1):
            d[k + 1] = L * (1.0 - eta[k]) * d[k] + a
    else:
        a0, a1 = problem.error.a0, problem.error.a1
        for k in range(problem.n - 1):
            rest = 1.0 - eta[k]
            d[k + 1] = math.sqrt(
                L * L * rest * rest * d[k] ** 2 + 2.0 * a1 * rest * d[k] + a0 * a0
            )
    return d


def evaluate_schedule(problem: ShiftProblem, schedule: ShiftSchedule) -> ObjectiveTrace:
    """Exact objective of a feasible schedule.

    The returned total is a valid upper bound on the N-step KL divergence
    whenever the one-step regularity/cross-regularity/error assumptions hold
    with the problem's constants.
    """
    if not isinstance(schedule, ShiftSchedule):
        schedule = ShiftSchedule(np.asarray(schedule, dtype=float))
    if len(schedule) != problem.n:
        raise FeasibilityError(f"schedule length {len(schedule)} != n = {problem.n}")
    eta = schedule.eta
    d = propagate_distances(problem, eta)
    main = problem.c * float(np.sum(eta[:-1] ** 2 * d[:-1] ** 2))
    final = problem.c_prime * d[-1] ** 2 + problem.b**2
    d.setflags(write=False)
    return ObjectiveTrace(distances=d, main_term=main, final_term=final)


# ---------------------------------------------------------------------------
# Closed forms, L = 1
# ---------------------------------------------------------------------------


def optimal_value_L1(n: int, a: float, d0: float) -> float:
    """Optimal value of the uniform-cost Simple problem at L = 1.

    min sum_{k<n} eta_k^2 d_k^2 subject to the recursion and eta_{n-1}=1:
    (d0 + (n-1) a)^2 / n for d0 >= a, else d0^2 + (n-1) a^2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if a < 0.0 or d0 < 0.0:
        raise ValueError("a, d0 must be >= 0")
    if d0 >= a:
        s = d0 + (n - 1) * a
        return s * s / n
    return d0 * d0 + (n - 1) * a * a


def optimal_shifts_L1(n: int, a: float, d0: float) -> tuple[ShiftSchedule, np.ndarray]:
    """Optimal schedule for the uniform-cost L=1 problem, plus its distance trace.

    eta_k = min(1, ((n-1) a + d0) / (k a + (n-k) d0)) for k < n-1, eta_{n-1} = 1.
    The degenerate instance a = d0 = 0 returns the all-zero-then-one schedule.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if a < 0.0 or d0 < 0.0:
        raise ValueError("a, d0 must be >= 0")
    eta = np.ones(n)
    d = np.empty(n)
    d[0] = d0
    num = (n - 1) * a + d0
    for k in range(n - 1):
        denom = k * a + (n - k) * d0
        if denom <= 0.0:
            eta[k] = 0.0 if num == 0.0 else 1.0
        else:
            eta[k] = min(1.0, num / denom)
        d[k + 1] = (1.0 - eta[k]) * d[k] + a
    return ShiftSchedule(eta), d


def single_step_opt(d: float, a: float, m: int) -> tuple[float, float]:
    """One-step shift optimization with m remaining steps.

    Solves min_{eta in [0,1]} eta^2 d^2 + ((1-eta) d + m a)^2 / m:
    eta = min(1, (d + m a) / ((m+1) d)), value (d + m a)^2 / (m+1) for
    d >= a, else d^2 + m a^2.  d = 0 uses the limit convention eta = 1.
    """
    if d < 0.0 or a < 0.0:
        raise ValueError("d, a must be >= 0")
    if m < 1:
        raise ValueError("m must be >= 1")
    if d == 0.0:
        return 1.0, m * a * a
    eta = min(1.0, (d + m * a) / ((m + 1) * d))
    if d >= a:
        s = d + m * a
        return eta, s * s / (m + 1)
    return eta, d * d + m * a * a


# ---------------------------------------------------------------------------
# Closed forms, L in (0, 1)
# ---------------------------------------------------------------------------


def _one_minus_pow(L: float, k: float) -> float:
    """1 - L^k, stable near L = 1 (expm1 of k log L)."""
    return -math.expm1(k * math.log(L))


def optimal_value_Lgeneral(n: int, a: float, d0: float, L: float) -> float:
    """Optimal value of the uniform-cost Simple problem for L in (0,1).

    (1+L)/(1-L) * (a (1-L^{n-1}) + d0 L^{n-1} (1-L))^2 / (1-L^{2n});
    inputs with d0 < a are clamped to d0 = a (the bound is increasing in
    d0, and the closed form assumes d0 >= a).
    """
    if not 0.0 < L < 1.0:
        raise ValueError("L must lie in (0, 1); use optimal_value_L1 at L = 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    if a < 0.0 or d0 < 0.0:
        raise ValueError("a, d0 must be >= 0")
    d0 = max(d0, a)
    e1 = _one_minus_pow(L, 1)
    num = a * _one_minus_pow(L, n - 1) + d0 * L ** (n - 1) * e1
    return (1.0 + L) * num * num / (e1 * _one_minus_pow(L, 2 * n))


def optimal_shifts_Lgeneral(n: int, a: float, d0: float, L: float) -> ShiftSchedule:
    """Optimal schedule for the uniform-cost Simple problem, L in (0,1).

    Per-step form with p = n-1-k remaining free steps:
        eta_k = L^p (1+L) (a (1-L^p) + d_k L^p (1-L)) / (d_k (1-L^{2(p+1)}))
    propagated through d_{k+1} = (1-eta_k) L d_k + a.  d0 < a is clamped
    as in optimal_value_Lgeneral.
    """
    if not 0.0 < L < 1.0:
        raise ValueError("L must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    if a < 0.0 or d0 < 0.0:
        raise ValueError("a, d0 must be >= 0")
    d = max(d0, a)
    eta = np.ones(n)
    e1 = _one_minus_pow(L, 1)
    for k in range(n - 1):
        p = n - 1 - k
        if d <= 0.0:
            eta[k] = 0.0
            d = a
            continue
        lp = L**p
        num = lp * (1.0 + L) * (a * _one_minus_pow(L, p) + d * lp * e1)
        eta[k] = min(1.0, num / (d * _one_minus_pow(L, 2 * (p + 1))))
        d = (1.0 - eta[k]) * L * d + a
    return ShiftSchedule(eta)


def final_bound_with_cross_reg(
    n: int, a: float, d0: float, L: float, c: float, c_prime: float, b: float
) -> float:
    """Bound value with final-step cross-regularity (c', b) replacing (c, 0).

    For L in (0,1):
        (c + (c'-c) (1-L^2)/(1-L^{2n})) * (1+L)/(1-L)
            * (a (1-L^{n-1}) + L^{n-1} (1-L) d0)^2 / (1-L^{2n}) + b^2,
    and at L = 1 the limit ((n-1) c + c') (d0 + (n-1) a)^2 / n^2 + b^2.
    Equals the exact objective of the uniform-cost optimal schedule under
    the (c, c', b) costs when d0 >= a.
    """
    if not 0.0 < L <= 1.0:
        raise ValueError("L must lie in (0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    if min(a, d0, c, c_prime, b) < 0.0:
        raise ValueError("constants must be >= 0")
    if L == 1.0:
        s = d0 + (n - 1) * a
        return ((n - 1) * c + c_prime) * s * s / (n * n) + b * b
    e1 = _one_minus_pow(L, 1)
    e2n = _one_minus_pow(L, 2 * n)
    cost = c + (c_prime - c) * _one_minus_pow(L, 2) / e2n
    num = a * _one_minus_pow(L, n - 1) + L ** (n - 1) * e1 * d0
    return cost * (1.0 + L) * num * num / (e1 * e2n) + b * b


# ---------------------------------------------------------------------------
# Three-phase schedule for the WeakAware recursion
# ---------------------------------------------------------------------------


def three_phase_schedule(n: int, L: float, a0: float = 0.0, a1: float = 0.0) -> ShiftSchedule:
    """Feasible phase-stitched schedule for 1/2 <= L <= 2.

    For L <= 1: eta_k = (1/L - 1) / (L^{-(n-k)} - 1) while L^{-(n-k)} >= 2,
    then eta_k = 1/(n-k).  For L > 1: eta_k = 1 - 1/L^2 while
    n-k > 2L/(L-1), then eta_k with L (1-eta_k) = ((n-k-1)/(n-k))^2.
    The final entry is always 1.  The error levels a0, a1 identify the
    recursion the schedule is meant for but do not affect the entries.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.5 <= L <= 2.0:
        raise ValueError("three-phase schedule requires 1/2 <= L <= 2")
    del a0, a1
    eta = np.ones(n)
    log_l = math.log(L)
    for k in range(n - 1):
        remaining = n - k
        if L <= 1.0:
            # L^{-(n-k)} >= 2  <=>  remaining * (-log L) >= log 2
            if remaining * (-log_l) >= math.log(2.0):
                eta[k] = math.expm1(-log_l) / math.expm1(remaining * (-log_l))
            else:
                eta[k] = 1.0 / remaining
        else:
            if remaining > 2.0 * L / (L - 1.0):
                eta[k] = 1.0 - 1.0 / (L * L)
            else:
                ratio = (remaining - 1.0) / remaining
                eta[k] = 1.0 - ratio * ratio / L
    return ShiftSchedule(eta)


# ---------------------------------------------------------------------------
# Dynamic-programming oracle
# ---------------------------------------------------------------------------


def _objective(problem: ShiftProblem, eta) -> float:
    d = propagate_distances(problem, eta)
    main = problem.c * sum(eta[k] ** 2 * d[k] ** 2 for k in range(problem.n - 1))
    return main + problem.c_prime * d[-1] ** 2


def _polish_simple(problem: ShiftProblem, eta: np.ndarray, sweeps: int = 200) -> np.ndarray:
    """Cyclic exact coordinate minimization for the Simple recursion.

    Downstream distances are affine in any single eta_k, so the objective
    restricted to one coordinate is a convex quadratic with coefficients
    computable in O(n); each coordinate update is exact calculus.
    """
    eta = [float(v) for v in eta]
    n, L, a = problem.n, problem.L, problem.error.a
    c, cp = problem.c, problem.c_prime
    best = _objective(problem, eta)
    for _ in range(sweeps):
        prev = best
        d = list(propagate_distances(problem, eta))
        for k in range(n - 2, -1, -1):
            dk = d[k]
            # d_j = p_j + q_j * eta_k for j > k
            p = L * dk + a
            q = -L * dk
            quad = c * dk * dk
            lin = 0.0
            for j in range(k + 1, n - 1):
                w = c * eta[j] ** 2
                quad += w * q * q
                lin += 2.0 * w * p * q
                p, q = L * (1.0 - eta[j]) * p + a, L * (1.0 - eta[j]) * q
            quad += cp * q * q
            lin += 2.0 * cp * p * q
            if quad > 0.0:
                eta[k] = min(1.0, max(0.0, -lin / (2.0 * quad)))
            d[k + 1] = L * (1.0 - eta[k]) * d[k] + a
            for j in range(k + 1, n - 1):
                d[j + 1] = L * (1.0 - eta[j]) * d[j] + a
        best = _objective(problem, eta)
        if prev - best <= 1e-15 * max(1.0, abs(prev)):
            break
    return np.asarray(eta)


def _polish_weak_aware(problem: ShiftProblem, eta: np.ndarray, sweeps: int = 40) -> np.ndarray:
    """Cyclic bounded scalar minimization for the WeakAware recursion."""
    eta = eta.copy()
    n = problem.n
    best = _objective(problem, eta)
    for _ in range(sweeps):
        prev = best
        for k in range(n - 2, -1, -1):
            def obj(x, idx=k):
                e = eta.copy()
                e[idx] = x
                return _objective(problem, e)

            res = minimize_scalar(obj, bounds=(0.0, 1.0), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun < obj(eta[k]):
                eta[k] = float(res.x)
        best = _objective(problem, eta)
        if prev - best <= 1e-14 * max(1.0, abs(prev)):
            break
    return eta


def _coordinate_polish(problem: ShiftProblem, eta: np.ndarray) -> np.ndarray:
    if isinstance(problem.error, SimpleError):
        return _polish_simple(problem, eta)
    return _polish_weak_aware(problem, eta)


def dp_oracle(
    problem: ShiftProblem,
    n_eta: int = 128,
    n_dist: int = 256,
    polish: bool = True,
) -> tuple[ShiftSchedule, float]:
    """Independent verification oracle: grid value iteration plus polishing.

    Backward induction over a discretized shift per step, with the value
    function held on a logarithmic distance grid (linear interpolation),
    followed by cyclic per-coordinate refinement of the extracted schedule.
    The returned value is the exact objective of a feasible schedule, hence
    an upper bound on the true optimum; on Simple instances it matches the
    closed forms to well below 1e-6 relative.
    """
    if problem.n > 30:
        raise ValueError("oracle-scale error: dp_oracle is limited to n <= 30")
    if n_eta < 100:
        raise ValueError("grid resolution must be >= 100 points per shift")
    n, L = problem.n, problem.L
    if isinstance(problem.error, SimpleError):
        a_worst = problem.error.a
    else:
        a_worst = problem.error.a0 + problem.error.a1

    # Distance grid covering the zero-shift (worst-case) trajectory.
    d_max = problem.d0
    reach = problem.d0
    for _ in range(n - 1):
        reach = L * reach + a_worst
        d_max = max(d_max, reach)
    d_max = max(d_max * 1.05, 1e-9)
    grid = np.concatenate(
        [[0.0], np.geomspace(max(d_max * 1e-6, 1e-12), d_max, n_dist - 1)]
    )
    etas = np.linspace(0.0, 1.0, n_eta)

    def step_all(d_vals: np.ndarray, eta_vals: np.ndarray) -> np.ndarray:
        rest = 1.0 - eta_vals[None, :]
        if isinstance(problem.error, SimpleError):
            return L * rest * d_vals[:, None] + problem.error.a
        a0, a1 = problem.error.a0, problem.error.a1
        sq = (L * rest * d_vals[:, None]) ** 2 + 2.0 * a1 * rest * d_vals[:, None] + a0 * a0
        return np.sqrt(sq)

    # Backward value iteration: tails[k] holds the value-to-go from step k
    # on the distance grid, with tails[n-1](d) = c' d^2 (b^2 added at the end).
    tails = [problem.c_prime * grid**2]
    for _ in range(n - 1):
        nxt = np.clip(step_all(grid, etas), grid[0], grid[-1])
        cont = np.interp(nxt, grid, tails[-1])
        stage = problem.c * etas[None, :] ** 2 * grid[:, None] ** 2
        tails.append(np.min(stage + cont, axis=1))
    tails.reverse()

    # Forward greedy extraction with scalar refinement per step.
    eta = np.ones(n)
    d = problem.d0

    def cont_of(eta_x, d_cur: float, tail: np.ndarray):
        nx = np.clip(step_all(np.array([d_cur]), np.atleast_1d(eta_x))[0], grid[0], grid[-1])
        return problem.c * np.atleast_1d(eta_x) ** 2 * d_cur**2 + np.interp(nx, grid, tail)

    for k in range(n - 1):
        tail = tails[k + 1]
        coarse = cont_of(etas, d, tail)
        x0 = etas[int(np.argmin(coarse))]
        res = minimize_scalar(
            lambda x: float(cont_of(x, d, tail)[0]),
            bounds=(max(0.0, x0 - 2.0 / n_eta), min(1.0, x0 + 2.0 / n_eta)),
            method="bounded",
            options={"xatol": 1e-10},
        )
        eta[k] = float(res.x)
        d = step_all(np.array([d]), np.array([eta[k]]))[0, 0]

    if polish:
        candidates = [eta]
        uniform = np.ones(n)
        uniform[: n - 1] = [1.0 / (n - j) for j in range(n - 1)]
        candidates.append(uniform)
        candidates.append(np.concatenate([np.full(n - 1, 0.5), [1.0]]))
        best_eta, best_val = None, math.inf
        for cand in candidates:
            polished = _coordinate_polish(problem, cand)
            val = evaluate_schedule(problem, ShiftSchedule(polished)).total
            if val < best_val:
                best_eta, best_val = polished, val
        eta = best_eta

    schedule = ShiftSchedule(eta)
    return schedule, evaluate_schedule(problem, schedule).total
