"""Merit functions and runtime checks of the step-size and regret inequalities.

The checks take any trace object exposing ``xs``, ``zs``, ``grads``,
``extraps`` and ``gammas`` arrays with row ``t`` holding iteration ``t``
(see :class:`vi_solve.solvers.Trajectory`). They return the worst raw
violation (positive means the inequality failed); callers decide on the
tolerance, usually scaled by ``R * G``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import Ball, Box, ConfigurationError, VISolveError, project, substream


class InstrumentationError(VISolveError):
    """A trace lacks the fields a check needs."""


@dataclass(frozen=True)
class ErrorReport:
    err_value: float
    dist_to_solution: float
    metric_kind: str   # "err", "err_restricted" or "distance"


# ---------------------------------------------------------------------------
# merit functions


def err_ball_skew(mean_matrix, center, radius: float, x) -> float:
    r"""``sup_{y in Ball(c, r)} <M y, x - y>`` for skew-symmetric ``M``.

    Skewness removes the quadratic term, leaving a linear maximization::

        err(x) = <M c, x> + r ||M^T x||
    """
    m = np.asarray(mean_matrix, dtype=float)
    x = np.asarray(x, dtype=float)
    c = np.asarray(center, dtype=float)
    return float((m @ c) @ x + radius * np.linalg.norm(m.T @ x))


def err_restricted_skew(mean_matrix, x0, D: float, x) -> float:
    """Merit restricted to the ball of radius ``D`` around ``x0``."""
    return err_ball_skew(mean_matrix, x0, D, x)


def dist_to_solution(x, x_star=None) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.linalg.norm(x if x_star is None else x - x_star))


def err_oracle(F_eval: Callable[[np.ndarray], np.ndarray], region, x, budget: int = 10_000,
               seed: int = 0, starts: int = 4, ascent_iters: int = 60) -> float:
    """Numerical lower bound on ``sup_{y in region} <F(y), x - y>``.

    Combines multi-start projected gradient ascent (finite-difference
    gradients, backtracking steps) with ``budget`` uniform boundary samples.
    The samples come from a fixed stream, so a larger budget evaluates a
    superset of points and never returns a smaller value. Exact up to
    rounding when ``F`` is linear-skew and ``region`` is a ball.
    """
    if not isinstance(region, (Ball, Box)):
        raise ConfigurationError("err_oracle needs a bounded Ball or Box region")
    x = np.asarray(x, dtype=float)

    def h(y):
        return float(F_eval(y) @ (x - y))

    if isinstance(region, Ball):
        center, scale = region.center, region.radius
    else:
        center, scale = 0.5 * (region.lower + region.upper), 0.5 * float(np.max(region.upper - region.lower))
    dim = x.shape[0]
    fd = 1e-6 * max(1.0, scale)

    def grad(y):
        out = np.empty(dim)
        for i in range(dim):
            e = np.zeros(dim)
            e[i] = fd
            out[i] = (h(y + e) - h(y - e)) / (2 * fd)
        return out

    best = -math.inf
    rng = substream(seed, "err-oracle-starts", 0)
    inits = [center.copy(), project(region, x)]
    for _ in range(starts):
        inits.append(project(region, center + scale * rng.uniform(-1, 1, dim)))
    for y in inits:
        val = h(y)
        for _ in range(ascent_iters):
            g = grad(y)
            gn = np.linalg.norm(g)
            if gn == 0:
                break
            step = 2.0 * scale / gn
            improved = False
            while step * gn > 1e-14 * scale:
                cand = project(region, y + step * g)
                cv = h(cand)
                if cv > val:
                    y, val, improved = cand, cv, True
                    break
                step *= 0.5
            if not improved:
                break
        best = max(best, val)

    if budget > 0:
        samples = substream(seed, "err-oracle-boundary", 0).standard_normal((budget, dim))
        if isinstance(region, Ball):
            pts = center + scale * samples / np.linalg.norm(samples, axis=1, keepdims=True)
        else:
            u = substream(seed, "err-oracle-box", 0).uniform(size=(budget, dim))
            pts = region.lower + u * (region.upper - region.lower)
            # push one coordinate per sample onto a face
            face = np.abs(samples).argmax(axis=1)
            rows = np.arange(budget)
            pts[rows, face] = np.where(samples[rows, face] > 0, region.upper[face], region.lower[face])
        for p in pts:
            v = h(p)
            if v > best:
                best = v
    return best


# ---------------------------------------------------------------------------
# trace checks


def _fields(trace, *names):
    out = []
    for name in names:
        val = getattr(trace, name, None)
        if val is None:
            raise InstrumentationError(f"trace is missing field {name!r}")
        out.append(np.asarray(val, dtype=float))
    return out


def duality_slacks(trace, mode: Optional[str] = None) -> tuple[np.ndarray, np.ndarray]:
    """Per-iteration ``(lhs, rhs)`` of the duality bound, ``t = 1 .. T``.

    Scalar step sizes: ``lhs = gamma ||x_t - z_t||``, ``rhs = ||g_t - e_t||``
    with ``e_t`` the extrapolation gradient. Per-coordinate metrics:
    ``lhs = ||x_t - z_t||_D``, ``rhs = ||g_t - e_t||_{D^{-1}}``. ``mode``
    selects ``gamma_t`` ("current") or ``gamma_{t-1}`` ("lagged").
    """
    xs, zs, grads, extraps, gammas = _fields(trace, "xs", "zs", "grads", "extraps", "gammas")
    if mode is None:
        info = getattr(trace, "info", None)
        mode = getattr(info, "duality", None)
        if mode is None:
            raise InstrumentationError("duality mode unknown for this trace")
    if mode not in ("current", "lagged"):
        raise ConfigurationError(f"unknown duality mode {mode!r}")
    g = gammas[1:] if mode == "current" else gammas[:-1]
    diff_x = xs[1:] - zs[1:]
    diff_g = grads[1:] - extraps[1:]
    if g.ndim == 1:
        lhs = g * np.linalg.norm(diff_x, axis=1)
        rhs = np.linalg.norm(diff_g, axis=1)
    else:
        lhs = np.sqrt(np.sum(g * diff_x * diff_x, axis=1))
        with np.errstate(divide="ignore", invalid="ignore"):
            rhs = np.sqrt(np.sum(np.where(g > 0, diff_g * diff_g / g, 0.0), axis=1))
    return lhs, rhs


def check_duality_bound(trace, mode: Optional[str] = None) -> float:
    """Worst ``lhs - rhs`` of the duality bound over the trace."""
    lhs, rhs = duality_slacks(trace, mode)
    return float(np.max(lhs - rhs)) if lhs.size else -math.inf


def duality_tolerance(trace) -> np.ndarray:
    """Per-iteration slack ``1e-9 (1 + ||g_t|| + ||e_t||)``."""
    grads, extraps = _fields(trace, "grads", "extraps")
    return 1e-9 * (1.0 + np.linalg.norm(grads[1:], axis=1) + np.linalg.norm(extraps[1:], axis=1))


def regret_samples(domain, trace, k: int = 100, seed: int = 0, mean_matrix=None) -> np.ndarray:
    """``k`` random feasible points plus adversarial boundary candidates.

    The candidates are the boundary point along ``-sum_t g_t`` (maximizer of
    the linear left-hand side) and, given ``mean_matrix``, the maximizer of
    the merit at ``x_bar`` along ``M^T x_bar``.
    """
    if not isinstance(domain, (Ball, Box)):
        raise ConfigurationError("regret samples need a Ball or Box domain")
    dim = domain.dim
    rng = substream(seed, "regret-y", 0)
    if isinstance(domain, Ball):
        dirs = rng.standard_normal((k, dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        radii = domain.radius * rng.uniform(size=(k, 1)) ** (1.0 / dim)
        ys = domain.center + radii * dirs
    else:
        ys = domain.lower + rng.uniform(size=(k, dim)) * (domain.upper - domain.lower)
    extra = []
    grads = getattr(trace, "grads", None)
    if grads is not None:
        gsum = np.asarray(grads)[1:].sum(axis=0)
        extra.append(project(domain, domain_center(domain) - 1e6 * gsum))
    x_bar = getattr(trace, "x_bar", None)
    if x_bar is not None and mean_matrix is not None:
        direction = np.asarray(mean_matrix).T @ x_bar
        extra.append(project(domain, domain_center(domain) + 1e6 * direction))
    if extra:
        ys = np.vstack([ys, np.asarray(extra)])
    return ys


def domain_center(domain) -> np.ndarray:
    if isinstance(domain, Ball):
        return domain.center
    return 0.5 * (domain.lower + domain.upper)


def regret_terms(trace) -> tuple[np.ndarray, np.ndarray, float, float]:
    """``(sum_t g_t, sum_t <g_t, x_t>, sum_t ||g_t - e_t||^2, gain)``."""
    xs, zs, grads, extraps, gammas = _fields(trace, "xs", "zs", "grads", "extraps", "gammas")
    g = grads[1:]
    gsum = g.sum(axis=0)
    gx = float(np.sum(g * xs[1:]))
    sq = float(np.sum((g - extraps[1:]) ** 2))
    a = xs[1:] - zs[:-1]
    b = xs[:-1] - zs[:-1]
    gain = 0.5 * float(np.sum(gammas[:-1] * (np.sum(a * a, axis=1) + np.sum(b * b, axis=1))))
    return gsum, gx, sq, gain


def check_regret_bound(trace, domain, y_samples, eta: float, gamma0: float, R: float) -> float:
    """Worst ``LHS - RHS`` of the scalar regret inequality over ``y_samples``.

    ``LHS(y) = sum_t <g_t, x_t - y>`` and
    ``RHS = R^2 gamma0 / 2 + (R^2 / (2 eta) + 2 eta) sqrt(sum ||g_t - e_t||^2)
    - 1/2 sum_t gamma_{t-1} (||x_t - z_{t-1}||^2 + ||x_{t-1} - z_{t-1}||^2)``
    with ``R`` at least the diameter of ``domain``.
    """
    ys = np.atleast_2d(np.asarray(y_samples, dtype=float))
    if not np.all([domain.contains(y, tol=1e-9) for y in ys]):
        raise ConfigurationError("regret samples must lie in the domain")
    gsum, gx, sq, gain = regret_terms(trace)
    lhs = gx - ys @ gsum
    rhs = 0.5 * R * R * gamma0 + (0.5 * R * R / eta + 2.0 * eta) * math.sqrt(sq) - gain
    return float(np.max(lhs - rhs))


def check_vector_regret_bound(trace, domain, y_samples, R_inf: float, diag0) -> float:
    """Per-coordinate analogue, valid with ``eta = R_inf``.

    ``RHS = R_inf^2 tr(D_0) + 3 R_inf sum_i sqrt(sum_t (g_ti - e_ti)^2)
    - 1/2 sum_t (||x_t - z_t||^2_{D_t} + ||x_t - z_{t-1}||^2_{D_t})``.
    """
    xs, zs, grads, extraps, gammas = _fields(trace, "xs", "zs", "grads", "extraps", "gammas")
    if gammas.ndim != 2:
        raise InstrumentationError("vector regret check needs per-coordinate step sizes")
    ys = np.atleast_2d(np.asarray(y_samples, dtype=float))
    g = grads[1:]
    lhs = float(np.sum(g * xs[1:])) - ys @ g.sum(axis=0)
    per_coord = np.sqrt(np.sum((g - extraps[1:]) ** 2, axis=0))
    a = xs[1:] - zs[1:]
    b = xs[1:] - zs[:-1]
    gain = 0.5 * float(np.sum(gammas[1:] * (a * a + b * b)))
    rhs = R_inf * R_inf * float(np.sum(diag0)) + 3.0 * R_inf * float(per_coord.sum()) - gain
    return float(np.max(lhs - rhs))


def movement_terms(trace) -> tuple[np.ndarray, np.ndarray]:
    """Metric ``D_t`` (rows ``t = 0..T``) and squared movements ``d_t^2`` (rows ``t = 1..T``)."""
    xs, zs, gammas = _fields(trace, "xs", "zs", "gammas")
    if gammas.ndim != 2:
        raise InstrumentationError("metric recurrence check needs per-coordinate step sizes")
    a = xs[1:] - zs[:-1]
    b = xs[1:] - zs[1:]
    return gammas, a * a + b * b


def metric_recurrence_windows(T: int, count: int = 100, seed: int = 0) -> list[tuple[int, int]]:
    """``count`` random windows ``1 <= a < b <= T`` plus the full window."""
    if T < 2:
        return [(1, T)]
    rng = substream(seed, "windows", T)
    out = [(1, T)]
    for _ in range(count):
        a, b = sorted(rng.choice(np.arange(1, T + 1), size=2, replace=False).tolist())
        out.append((a, b))
    return out


def check_metric_recurrence(trace, R_inf: float, windows=None, seed: int = 0) -> dict[str, float]:
    """Relative violations of the movement-metric sandwich, per window and coordinate.

    With ``R^2 = 2 R_inf^2`` and ``S = sum_{t=a}^b D_{t-1} d_t^2``:

    * ``lower``: ``S >= 2 R^2 (D_b - D_{a-1})``
    * ``upper``: ``S <= (sqrt(2) + 1) R^2 (D_b - D_{a-1})``
    * ``log``: ``sum_{t=a}^b d_t^2 <= 4 R^2 ln(D_b / D_{a-1})``

    The last two assume ``d_t^2 <= R^2``, which holds when ``R_inf`` bounds
    the coordinate-wise diameter. Each violation is divided by the
    magnitude of the operands so rounding in the differences is not
    mistaken for failure; a value ``<= 0`` means the inequality holds.
    """
    D, d2 = movement_terms(trace)
    T = d2.shape[0]
    if windows is None:
        windows = metric_recurrence_windows(T, seed=seed)
    R2 = 2.0 * R_inf * R_inf
    weighted = np.vstack([np.zeros(D.shape[1]), np.cumsum(D[:-1] * d2, axis=0)])
    plain = np.vstack([np.zeros(D.shape[1]), np.cumsum(d2, axis=0)])
    logd = np.log(D)
    worst = {"lower": -math.inf, "upper": -math.inf, "log": -math.inf}
    for a, b in windows:
        if not 1 <= a <= b <= T:
            raise ConfigurationError(f"window ({a}, {b}) outside [1, {T}]")
        S = weighted[b] - weighted[a - 1]
        P = plain[b] - plain[a - 1]
        gap = D[b] - D[a - 1]
        mag = np.abs(S) + 2.0 * R2 * (np.abs(D[b]) + np.abs(D[a - 1])) + np.finfo(float).tiny
        lower = (2.0 * R2 * gap - S) / mag
        upper = (S - (math.sqrt(2.0) + 1.0) * R2 * gap) / (mag * (math.sqrt(2.0) + 1.0))
        log_gap = logd[b] - logd[a - 1]
        log_mag = np.abs(P) + 4.0 * R2 * (np.abs(logd[b]) + np.abs(logd[a - 1]) + 1.0)
        logv = (P - 4.0 * R2 * log_gap) / log_mag
        worst["lower"] = max(worst["lower"], float(lower.max()))
        worst["upper"] = max(worst["upper"], float(upper.max()))
        worst["log"] = max(worst["log"], float(logv.max()))
    return worst


def check_feasibility(trace, domain, tol: float = 1e-10) -> int:
    """Number of recorded ``x_t`` or ``z_t`` outside ``domain``."""
    xs, zs = _fields(trace, "xs", "zs")
    return sum(not domain.contains(p, tol=tol) for p in np.vstack([xs, zs]))


def scalar_sum_inequalities(a, a0: float = 0.0, cap: Optional[float] = None,
                            rtol: float = 1e-12) -> bool:
    """Check both adaptive-sum sandwiches on the sequence ``a``.

    * ``sqrt(sum a) <= sum_t a_t / sqrt(sum_{s<=t} a_s) <= 2 sqrt(sum a)``
    * ``sqrt(a0 + sum_{t<T} a_t) - sqrt(a0) <= sum_t a_t / sqrt(a0 + sum_{s<t} a_s)
      <= 2 cap / sqrt(a0) + 3 sqrt(cap) + 3 sqrt(a0 + sum_{t<T} a_t)``

    Terms with a vanishing denominator and numerator count as 0; a zero
    denominator under a positive numerator gives ``inf``, which only the
    matching ``inf`` right-hand side (``a0 = 0``) can absorb.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 1:
        raise ConfigurationError("a must be one-dimensional")
    if np.any(a < 0) or a0 < 0:
        raise ConfigurationError("inputs must be non-negative")
    if cap is None:
        cap = float(a.max()) if a.size else 0.0
    if np.any(a > cap):
        raise ConfigurationError("entries exceed cap")
    if a.size == 0:
        return True

    def ratio(num, den):
        with np.errstate(divide="ignore", invalid="ignore"):
            r = num / np.sqrt(den)
        r[num == 0] = 0.0
        return r

    def le(lhs, rhs):
        if math.isinf(rhs):
            return True
        return lhs <= rhs + rtol * max(abs(lhs), abs(rhs), 1e-300)

    prefix = np.cumsum(a)
    total = float(prefix[-1])
    mid = float(np.sum(ratio(a, prefix)))
    ok = le(math.sqrt(total), mid) and le(mid, 2.0 * math.sqrt(total))

    shifted = a0 + np.concatenate([[0.0], prefix[:-1]])
    mid2 = float(np.sum(ratio(a, shifted)))
    head = a0 + (float(prefix[-2]) if a.size > 1 else 0.0)
    lower2 = math.sqrt(head) - math.sqrt(a0)
    with np.errstate(divide="ignore"):
        upper2 = (2.0 * cap / math.sqrt(a0) if a0 > 0 else (math.inf if cap > 0 else 0.0)) \
            + 3.0 * math.sqrt(cap) + 3.0 * math.sqrt(head)
    ok = ok and le(lower2, mid2) and le(mid2, upper2)
    return bool(ok)


def merit_report(mean_matrix, domain, x, x0=None) -> ErrorReport:
    """Closed-form merit of ``x`` for a linear-skew problem on ``domain``."""
    if isinstance(domain, Ball):
        return ErrorReport(err_ball_skew(mean_matrix, domain.center, domain.radius, x),
                           dist_to_solution(x), "err")
    if x0 is None:
        raise ConfigurationError("restricted merit needs x0")
    D = 2.0 * float(np.linalg.norm(x0))
    return ErrorReport(err_restricted_skew(mean_matrix, x0, D, x), dist_to_solution(x), "err_restricted")
