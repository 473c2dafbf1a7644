"""Adaptive extra-gradient steppers and non-adaptive baselines.

Every algorithm follows the same protocol::

    state = init_state(config, domain, oracle, x0)
    for _ in range(T):
        state = STEPPERS[config.algorithm](state, domain, oracle, config)

:func:`run` wraps that loop, records the trajectory and returns the uniform
average of ``x_1 .. x_T``.

Oracle queries per run of ``T`` iterations:

=========================================  ===========
algorithm                                  queries
=========================================  ===========
adapeg, adapeg-unbounded, adapeg-bregman*  ``T + 1``
adapeg-vector*, adapeg-peg, adapeg-optim   ``T + 1``
movement, peg                              ``T + 1``
adaeg, adaeg-unbounded, eg                 ``2 T``
=========================================  ===========

The single-call methods query ``F^(x0)`` once at initialization; the
two-call methods query ``F^(z_{t-1})`` and ``F^(x_t)`` inside each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .core import (
    EUCLIDEAN,
    Ball,
    ConfigurationError,
    MirrorMap,
    StochasticOracle,
    VISolveError,
    linf_diameter,
    project,
    prox_step,
    prox_step_diag,
)


class InvariantViolation(VISolveError, AssertionError):
    """A step-size invariant failed during a run."""


@dataclass(frozen=True)
class AlgorithmInfo:
    calls: int            # fresh oracle queries per iteration
    metric: str           # "scalar", "vector", "movement" or "fixed"
    duality: Optional[str]  # which step size bounds ||x_t - z_t||: "current", "lagged" or None
    lagged: bool = False  # anchors use the previous iteration's step sizes (unbounded family)


ALGORITHMS: dict[str, AlgorithmInfo] = {
    "adapeg": AlgorithmInfo(1, "scalar", "current"),
    "adapeg-unbounded": AlgorithmInfo(1, "scalar", "lagged", lagged=True),
    "adaeg": AlgorithmInfo(2, "scalar", "current"),
    "adaeg-unbounded": AlgorithmInfo(2, "scalar", "lagged", lagged=True),
    "adapeg-bregman": AlgorithmInfo(1, "scalar", None),
    "adapeg-bregman-unbounded": AlgorithmInfo(1, "scalar", None, lagged=True),
    "adapeg-vector": AlgorithmInfo(1, "vector", "current"),
    "adapeg-vector-unbounded": AlgorithmInfo(1, "vector", "lagged", lagged=True),
    "adapeg-peg": AlgorithmInfo(1, "scalar", "lagged"),
    "adapeg-optim": AlgorithmInfo(1, "scalar", None),
    "movement": AlgorithmInfo(1, "movement", "lagged"),
    "eg": AlgorithmInfo(2, "fixed", "current"),
    "peg": AlgorithmInfo(1, "fixed", "current"),
}


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters for one algorithm.

    ``step`` overrides the constant EG/PEG step; otherwise the constant step
    is ``1/beta_hint`` for EG and ``1/(2 beta_hint)`` for PEG. In
    ``"decaying"`` mode the step is ``decay_c / sqrt(t)``.
    """

    algorithm: str = "adapeg"
    eta: float = 1.0
    gamma0: float = 1.0
    R_inf: Optional[float] = None
    beta_hint: Optional[float] = None
    step: Optional[float] = None
    step_mode: str = "constant"
    decay_c: Optional[float] = None
    mirror: str = "euclidean"

    def with_(self, **changes) -> "SolverConfig":
        return replace(self, **changes)

    @property
    def info(self) -> AlgorithmInfo:
        try:
            return ALGORITHMS[self.algorithm]
        except KeyError:
            raise ConfigurationError(f"unknown algorithm {self.algorithm!r}") from None


@dataclass
class SolverState:
    x: np.ndarray
    z: np.ndarray
    x0: np.ndarray
    grad: Optional[np.ndarray]        # F^(x_t), latest fresh query at x_t
    extrap: Optional[np.ndarray]      # gradient used for the x_t subproblem
    eta: float
    gamma0: float
    gamma: float = 0.0                # gamma_t (or 1/eta_t for EG/PEG)
    gamma_prev: float = 0.0           # gamma_{t-1}
    gamma_prev2: float = 0.0          # gamma_{t-2}
    diag: Optional[np.ndarray] = None
    diag_prev: Optional[np.ndarray] = None
    diag_prev2: Optional[np.ndarray] = None
    diag0: Optional[np.ndarray] = None
    sq_sum: object = 0.0
    x_sum: Optional[np.ndarray] = None
    count: int = 0
    t: int = 0
    queries: int = 0
    R_inf: Optional[float] = None

    @property
    def x_bar(self) -> np.ndarray:
        if self.count == 0:
            return self.x0.copy()
        return self.x_sum / self.count


def _query(state: SolverState, oracle: StochasticOracle, x, step: int, tag: str) -> np.ndarray:
    state.queries += 1
    return oracle.evaluate(x, step, tag)


def _finish(state: SolverState, t: int, x, z, g, e) -> SolverState:
    state.t = t
    state.x = x
    state.z = z
    state.grad = g
    state.extrap = e
    state.x_sum = state.x_sum + x
    state.count += 1
    return state


def _push_gamma(state: SolverState, gamma: float) -> None:
    state.gamma_prev2 = state.gamma_prev
    state.gamma_prev = state.gamma
    state.gamma = gamma


def _push_diag(state: SolverState, diag: np.ndarray) -> None:
    state.diag_prev2 = state.diag_prev
    state.diag_prev = state.diag
    state.diag = diag


def _scalar_gamma(state: SolverState, diff: np.ndarray) -> float:
    state.sq_sum += float(diff @ diff)
    eta = state.eta
    return math.sqrt(eta * eta * state.gamma0 * state.gamma0 + state.sq_sum) / eta


# ---------------------------------------------------------------------------
# scalar single-call family (bounded domains)


def _adapeg(state, domain, oracle, mirror: MirrorMap, variant: str) -> SolverState:
    t = state.t + 1
    g_old = state.grad
    gam_old = state.gamma
    x = prox_step(domain, mirror, g_old, ((state.z, gam_old),))
    g = _query(state, oracle, x, t, "x")
    gam = _scalar_gamma(state, g - g_old)
    if variant == "main":
        anchors = ((state.z, gam_old), (x, gam - gam_old))
    elif variant == "peg":
        anchors = ((state.z, gam_old),)
    else:  # optim
        anchors = ((state.z, gam),)
    z = prox_step(domain, mirror, g, anchors)
    _push_gamma(state, gam)
    return _finish(state, t, x, z, g, g_old)


def adapeg_step(state: SolverState, domain, oracle: StochasticOracle) -> SolverState:
    """One iteration of adaptive past extra-gradient on a bounded domain."""
    return _adapeg(state, domain, oracle, EUCLIDEAN, "main")


def adapeg_bregman_step(state: SolverState, domain, mirror: MirrorMap,
                        oracle: StochasticOracle) -> SolverState:
    """:func:`adapeg_step` with Bregman anchors ``gamma * D_psi(u, a)``."""
    if not mirror.compatible(domain):
        raise ConfigurationError(f"mirror map {mirror.kind!r} is not compatible with {type(domain).__name__}")
    return _adapeg(state, domain, oracle, mirror, "main")


def adapeg_peg_variant_step(state: SolverState, domain, oracle: StochasticOracle) -> SolverState:
    """z-update anchored at ``z_{t-1}`` with ``gamma_{t-1}`` only."""
    return _adapeg(state, domain, oracle, EUCLIDEAN, "peg")


def adapeg_optim_variant_step(state: SolverState, domain, oracle: StochasticOracle) -> SolverState:
    """z-update anchored at ``z_{t-1}`` with the fresh ``gamma_t``.

    On free space this is ``x_{t+1} = x_t - (2/gamma_t) F^(x_t) + (1/gamma_{t-1}) F^(x_{t-1})``.
    """
    return _adapeg(state, domain, oracle, EUCLIDEAN, "optim")


# ---------------------------------------------------------------------------
# scalar single-call family (unbounded domains): anchors lag by one step


def _adapeg_unbounded(state, domain, oracle, mirror: MirrorMap) -> SolverState:
    t = state.t + 1
    g_old = state.grad
    anchors = ((state.z, state.gamma_prev), (state.x0, state.gamma - state.gamma_prev))
    x = prox_step(domain, mirror, g_old, anchors)
    g = _query(state, oracle, x, t, "x")
    z = prox_step(domain, mirror, g, anchors)
    _push_gamma(state, _scalar_gamma(state, g - g_old))
    return _finish(state, t, x, z, g, g_old)


def adapeg_unbounded_step(state: SolverState, domain, oracle: StochasticOracle) -> SolverState:
    """Adaptive past extra-gradient stabilized towards ``x0``; any domain."""
    return _adapeg_unbounded(state, domain, oracle, EUCLIDEAN)


def adapeg_bregman_unbounded_step(state: SolverState, domain, mirror: MirrorMap,
                                  oracle: StochasticOracle) -> SolverState:
    if not mirror.compatible(domain):
        raise ConfigurationError(f"mirror map {mirror.kind!r} is not compatible with {type(domain).__name__}")
    return _adapeg_unbounded(state, domain, oracle, mirror)


# ---------------------------------------------------------------------------
# two-call family


def adaeg_step(state: SolverState, domain, oracle: StochasticOracle) -> SolverState:
    """Adaptive extra-gradient: extrapolate with a fresh ``F^(z_{t-1})``."""
    t = state.t + 1
    gam_old = state.gamma
    e = _query(state, oracle, state.z, t, "z")
    x = prox_step(domain, EUCLIDEAN, e, ((state.z, gam_old),))
    g = _query(state, oracle, x, t, "x")
    gam = _scalar_gamma(state, g - e)
    z = prox_step(domain, EUCLIDEAN, g, ((state.z, gam_old), (x, gam - gam_old)))
    _push_gamma(state, gam)
    return _finish(state, t, x, z, g, e)


def adaeg_unbounded_step(state: SolverState, domain, oracle: StochasticOracle) -> SolverState:
    t = state.t + 1
    anchors = ((state.z, state.gamma_prev), (state.x0, state.gamma - state.gamma_prev))
    e = _query(state, oracle, state.z, t, "z")
    x = prox_step(domain, EUCLIDEAN, e, anchors)
    g = _query(state, oracle, x, t, "x")
    z = prox_step(domain, EUCLIDEAN, g, anchors)
    _push_gamma(state, _scalar_gamma(state, g - e))
    return _finish(state, t, x, z, g, e)


# ---------------------------------------------------------------------------
# per-coordinate family


def _vector_diag(state: SolverState, diff: np.ndarray) -> np.ndarray:
    state.sq_sum = state.sq_sum + diff * diff
    eta = state.eta
    return np.sqrt(eta * eta * state.diag0 * state.diag0 + state.sq_sum) / eta


def adapeg_vector_step(state: SolverState, domain, oracle: StochasticOracle) -> SolverState:
    """Per-coordinate step sizes ``D_t``; Mahalanobis-norm subproblems."""
    t = state.t + 1
    g_old = state.grad
    d_old = state.diag
    x = prox_step_diag(domain, g_old, ((state.z, d_old),))
    g = _query(state, oracle, x, t, "x")
    d_new = _vector_diag(state, g - g_old)
    z = prox_step_diag(domain, g, ((state.z, d_old), (x, d_new - d_old)))
    _push_diag(state, d_new)
    state.gamma_prev, state.gamma = state.gamma, float(d_new.mean())
    return _finish(state, t, x, z, g, g_old)


def adapeg_vector_unbounded_step(state: SolverState, domain, oracle: StochasticOracle) -> SolverState:
    t = state.t + 1
    g_old = state.grad
    anchors = ((state.z, state.diag_prev), (state.x0, state.diag - state.diag_prev))
    x = prox_step_diag(domain, g_old, anchors)
    g = _query(state, oracle, x, t, "x")
    z = prox_step_diag(domain, g, anchors)
    d_new = _vector_diag(state, g - g_old)
    _push_diag(state, d_new)
    state.gamma_prev, state.gamma = state.gamma, float(d_new.mean())
    return _finish(state, t, x, z, g, g_old)


def single_call_movement_step(state: SolverState, domain, oracle: StochasticOracle) -> SolverState:
    """Single-call method whose metric grows with the iterate movement.

    ``D_{t,i}^2 = D_{t-1,i}^2 (1 + ((x_ti - z_{t-1,i})^2 + (x_ti - z_ti)^2) / (2 R_inf^2))``
    """
    t = state.t + 1
    g_old = state.grad
    d_old = state.diag
    x = prox_step_diag(domain, g_old, ((state.z, d_old),))
    g = _query(state, oracle, x, t, "x")
    z = prox_step_diag(domain, g, ((state.z, d_old),))
    a = x - state.z
    b = x - z
    d_new = d_old * np.sqrt(1.0 + (a * a + b * b) / (2.0 * state.R_inf * state.R_inf))
    _push_diag(state, d_new)
    state.gamma_prev, state.gamma = state.gamma, float(d_new.mean())
    return _finish(state, t, x, z, g, g_old)


# ---------------------------------------------------------------------------
# non-adaptive baselines


def eg_step(state: SolverState, domain, oracle: StochasticOracle, eta_t: float) -> SolverState:
    """Extra-gradient: two fresh queries per iteration."""
    if not eta_t > 0:
        raise ConfigurationError("step size must be positive")
    t = state.t + 1
    e = _query(state, oracle, state.z, t, "z")
    x = project(domain, state.z - eta_t * e)
    g = _query(state, oracle, x, t, "x")
    z = project(domain, state.z - eta_t * g)
    _push_gamma(state, 1.0 / eta_t)
    return _finish(state, t, x, z, g, e)


def peg_step(state: SolverState, domain, oracle: StochasticOracle, eta_t: float) -> SolverState:
    """Past extra-gradient: reuses ``F^(x_{t-1})`` for extrapolation."""
    if not eta_t > 0:
        raise ConfigurationError("step size must be positive")
    t = state.t + 1
    g_old = state.grad
    x = project(domain, state.z - eta_t * g_old)
    g = _query(state, oracle, x, t, "x")
    z = project(domain, state.z - eta_t * g)
    _push_gamma(state, 1.0 / eta_t)
    return _finish(state, t, x, z, g, g_old)


def baseline_step_size(config: SolverConfig, t: int) -> float:
    """``eta_t`` for EG/PEG at iteration ``t >= 1``."""
    if config.step_mode == "decaying":
        if config.decay_c is None:
            raise ConfigurationError("decaying step mode needs decay_c")
        return config.decay_c / math.sqrt(t)
    if config.step_mode != "constant":
        raise ConfigurationError(f"unknown step_mode {config.step_mode!r}")
    if config.step is not None:
        return config.step
    if config.beta_hint is None:
        raise ConfigurationError("constant step mode needs beta_hint (or an explicit step)")
    factor = 1.0 if config.algorithm == "eg" else 0.5
    return factor / config.beta_hint


# ---------------------------------------------------------------------------
# dispatch


def _wrap_plain(fn):
    return lambda state, domain, oracle, config: fn(state, domain, oracle)


def _wrap_bregman(fn):
    return lambda state, domain, oracle, config: fn(state, domain, MirrorMap(config.mirror), oracle)


def _wrap_baseline(fn):
    return lambda state, domain, oracle, config: fn(state, domain, oracle,
                                                    baseline_step_size(config, state.t + 1))


STEPPERS: dict[str, Callable] = {
    "adapeg": _wrap_plain(adapeg_step),
    "adapeg-unbounded": _wrap_plain(adapeg_unbounded_step),
    "adaeg": _wrap_plain(adaeg_step),
    "adaeg-unbounded": _wrap_plain(adaeg_unbounded_step),
    "adapeg-bregman": _wrap_bregman(adapeg_bregman_step),
    "adapeg-bregman-unbounded": _wrap_bregman(adapeg_bregman_unbounded_step),
    "adapeg-vector": _wrap_plain(adapeg_vector_step),
    "adapeg-vector-unbounded": _wrap_plain(adapeg_vector_unbounded_step),
    "adapeg-peg": _wrap_plain(adapeg_peg_variant_step),
    "adapeg-optim": _wrap_plain(adapeg_optim_variant_step),
    "movement": _wrap_plain(single_call_movement_step),
    "eg": _wrap_baseline(eg_step),
    "peg": _wrap_baseline(peg_step),
}


def init_state(config: SolverConfig, domain, oracle: StochasticOracle, x0) -> SolverState:
    """Validate ``config`` against ``domain`` and build the ``t = 0`` state."""
    info = config.info
    x0 = np.array(x0, dtype=float)
    if x0.shape != (domain.dim,):
        raise ConfigurationError(f"x0 has shape {x0.shape}, domain dimension is {domain.dim}")
    if not domain.contains(x0):
        raise ConfigurationError("x0 must lie in the domain")
    if info.metric != "fixed":
        if not config.eta > 0:
            raise ConfigurationError("eta must be > 0")
        if config.gamma0 < 0:
            raise ConfigurationError("gamma0 must be >= 0")
        if config.gamma0 == 0 and (info.lagged or info.metric == "movement"):
            raise ConfigurationError(f"{config.algorithm} requires gamma0 > 0")
        if config.gamma0 == 0 and not domain.bounded:
            raise ConfigurationError("gamma0 > 0 is required on an unbounded domain")
    if config.algorithm.startswith("adapeg-bregman") and not MirrorMap(config.mirror).compatible(domain):
        raise ConfigurationError(f"mirror map {config.mirror!r} is not compatible with {type(domain).__name__}")
    if info.metric == "fixed":
        if config.step_mode == "constant" and config.step is None and config.beta_hint is None:
            raise ConfigurationError("constant step mode needs beta_hint (or an explicit step)")
        if config.step_mode == "decaying" and config.decay_c is None:
            raise ConfigurationError("decaying step mode needs decay_c")

    state = SolverState(x=x0.copy(), z=x0.copy(), x0=x0.copy(), grad=None, extrap=None,
                        eta=float(config.eta), gamma0=float(config.gamma0),
                        x_sum=np.zeros_like(x0))
    if info.metric == "scalar":
        state.gamma = float(config.gamma0)
    elif info.metric in ("vector", "movement"):
        state.diag0 = np.full(x0.shape, float(config.gamma0))
        state.diag = state.diag0.copy()
        state.diag_prev = np.zeros_like(x0)
        state.diag_prev2 = np.zeros_like(x0)
        state.sq_sum = np.zeros_like(x0)
        state.gamma = float(config.gamma0)
    if info.metric == "movement" and not domain.bounded:
        raise ConfigurationError("movement algorithm needs a bounded domain")
    r_inf = config.R_inf if config.R_inf is not None else (linf_diameter(domain) if domain.bounded else None)
    if r_inf is not None:
        if not r_inf > 0:
            raise ConfigurationError("R_inf must be > 0")
        state.R_inf = float(r_inf)
    if info.calls == 1:
        state.grad = _query(state, oracle, state.x, 0, "x")
    return state


def step(state: SolverState, domain, oracle: StochasticOracle, config: SolverConfig) -> SolverState:
    return STEPPERS[config.algorithm](state, domain, oracle, config)


def _assert_monotone(state: SolverState, metric: str) -> None:
    if metric == "scalar":
        if not (state.gamma >= state.gamma_prev and state.gamma >= state.gamma0):
            raise InvariantViolation(f"step size decreased at t={state.t}")
    elif metric in ("vector", "movement"):
        if np.any(state.diag < state.diag_prev) or np.any(state.diag < state.diag0):
            raise InvariantViolation(f"per-coordinate step size decreased at t={state.t}")


@dataclass
class Trajectory:
    """Recorded run. Row ``t`` of each array holds iteration ``t`` (row 0 is ``t = 0``)."""

    algorithm: str
    config: SolverConfig
    domain: object
    T: int
    seed: int
    x0: np.ndarray
    x_bar: np.ndarray
    x_last: np.ndarray
    queries: int
    query_counts: np.ndarray
    xs: Optional[np.ndarray] = None
    zs: Optional[np.ndarray] = None
    grads: Optional[np.ndarray] = None
    extraps: Optional[np.ndarray] = None
    gammas: Optional[np.ndarray] = None
    err_bar: Optional[float] = None
    err_last: Optional[float] = None
    err_kind: Optional[str] = None
    R_inf: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def info(self) -> AlgorithmInfo:
        return ALGORITHMS[self.algorithm]

    def x_bar_at(self, t: int) -> np.ndarray:
        """Average of ``x_1 .. x_t``."""
        if self.xs is None:
            raise ValueError("trajectory was recorded without iterates")
        if not 1 <= t <= self.T:
            raise ValueError(f"t must be in [1, {self.T}]")
        return self.xs[1:t + 1].sum(axis=0) / t

    def x_bar_prefix(self) -> np.ndarray:
        """All running averages, row ``t-1`` is ``x_bar_t``."""
        return np.cumsum(self.xs[1:], axis=0) / np.arange(1, self.T + 1)[:, None]


def _merit(problem, domain, x0):
    """Closed-form merit function for linear skew problems, or None."""
    from . import metrics

    mean = getattr(problem, "mean_matrix", None)
    if mean is None:
        op = getattr(problem, "operator", problem)
        mean = getattr(op, "mean", None)
    if mean is None:
        return None, None
    if isinstance(domain, Ball):
        return (lambda x: metrics.err_ball_skew(mean, domain.center, domain.radius, x)), "err"
    if not domain.bounded:
        radius = 2.0 * float(np.linalg.norm(x0))
        return (lambda x: metrics.err_restricted_skew(mean, x0, radius, x)), "err_restricted"
    return None, None


def run(config: SolverConfig, problem, domain, T: int, seed: int = 0, *,
        x0=None, minibatch_size: Optional[int] = None, keep_iterates: bool = True,
        observer: Optional[Callable[[SolverState], None]] = None,
        check_invariants: bool = True) -> Trajectory:
    """Run ``T`` iterations of ``config.algorithm``.

    ``problem`` is a :class:`~vi_solve.problems.BilinearInstance` or an
    operator; ``x0`` defaults to ``problem.x0``. The stochastic oracle is
    seeded with ``seed`` so that identical calls give bit-identical output.
    For linear skew problems the merit at ``x_bar_T`` and ``x_T`` is filled
    in (``err`` on a ball, ``err_D`` with ``D = 2||x0||`` on free space).
    """
    if T < 1:
        raise ConfigurationError("T must be >= 1")
    operator = getattr(problem, "operator", problem)
    if x0 is None:
        x0 = getattr(problem, "x0", None)
        if x0 is None:
            raise ConfigurationError("x0 is required when the problem does not carry one")
    oracle = StochasticOracle(operator, minibatch_size=minibatch_size, seed=seed)
    stepper = STEPPERS[config.algorithm]
    state = init_state(config, domain, oracle, x0)
    info = config.info

    dim = domain.dim
    counts = np.empty(T + 1, dtype=np.int64)
    counts[0] = state.queries
    if keep_iterates:
        nan = np.full(dim, np.nan)
        xs = np.empty((T + 1, dim))
        zs = np.empty((T + 1, dim))
        grads = np.empty((T + 1, dim))
        extraps = np.empty((T + 1, dim))
        vector_metric = info.metric in ("vector", "movement")
        gammas = np.empty((T + 1, dim)) if vector_metric else np.empty(T + 1)
        xs[0] = state.x
        zs[0] = state.z
        grads[0] = state.grad if state.grad is not None else nan
        extraps[0] = nan
        gammas[0] = state.diag if vector_metric else state.gamma
    for t in range(1, T + 1):
        state = stepper(state, domain, oracle, config)
        if check_invariants:
            _assert_monotone(state, info.metric)
        counts[t] = state.queries
        if keep_iterates:
            xs[t] = state.x
            zs[t] = state.z
            grads[t] = state.grad
            extraps[t] = state.extrap
            gammas[t] = state.diag if vector_metric else state.gamma
        if observer is not None:
            observer(state)

    traj = Trajectory(algorithm=config.algorithm, config=config, domain=domain, T=T, seed=seed,
                      x0=np.array(x0, dtype=float), x_bar=state.x_bar, x_last=state.x.copy(),
                      queries=state.queries, query_counts=counts, R_inf=state.R_inf)
    if keep_iterates:
        traj.xs, traj.zs, traj.grads, traj.extraps, traj.gammas = xs, zs, grads, extraps, gammas
    merit, kind = _merit(problem, domain, traj.x0)
    if merit is not None:
        traj.err_bar = merit(traj.x_bar)
        traj.err_last = merit(traj.x_last)
        traj.err_kind = kind
    return traj


# ---------------------------------------------------------------------------
# Adam-style optimizer driven by gradient differences


@dataclass(frozen=True)
class AdamConfig:
    lr: float = 1e-4
    beta1: float = 0.5
    beta2: float = 0.9
    eps: float = 1e-8

    def __post_init__(self):
        for name in ("beta1", "beta2"):
            b = getattr(self, name)
            if not 0.0 <= b < 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1)")
        if not self.lr > 0 or not self.eps > 0:
            raise ConfigurationError("lr and eps must be > 0")


@dataclass(frozen=True)
class AdamMoments:
    m: np.ndarray
    v: np.ndarray
    g_prev: np.ndarray
    lag: np.ndarray        # m_hat_{t-1} / (sqrt(v_hat_{t-1}) + eps), zero before the first step

    @classmethod
    def zeros_like(cls, params) -> "AdamMoments":
        z = np.zeros_like(np.asarray(params, dtype=float))
        return cls(z, z.copy(), z.copy(), z.copy())


def adapeg_adam_step(params, grad, moments: AdamMoments, config: AdamConfig,
                     t: int) -> tuple[np.ndarray, AdamMoments]:
    """One update; the second moment tracks squared gradient *differences*.

    ``theta_{t+1} = theta_t - 2 lr m_hat_t / (sqrt(v_hat_t) + eps)
    + lr m_hat_{t-1} / (sqrt(v_hat_{t-1}) + eps)``, the trailing term being
    zero at ``t = 1``.
    """
    if t < 1:
        raise ConfigurationError("t must be >= 1")
    params = np.asarray(params, dtype=float)
    g = np.asarray(grad, dtype=float)
    if g.shape != params.shape:
        raise ConfigurationError("gradient and parameter shapes differ")
    b1, b2 = config.beta1, config.beta2
    m = b1 * moments.m + (1.0 - b1) * g
    diff = g - moments.g_prev
    v = b2 * moments.v + (1.0 - b2) * diff * diff
    m_hat = m / (1.0 - b1 ** t)
    v_hat = v / (1.0 - b2 ** t)
    direction = m_hat / (np.sqrt(v_hat) + config.eps)
    new_params = params - 2.0 * config.lr * direction + config.lr * moments.lag
    return new_params, AdamMoments(m=m, v=v, g_prev=g.copy(), lag=direction)
