"""Experiment orchestration: grid search, multi-seed runs and aggregation.

An experiment fixes one bilinear instance (or one per seed, optionally),
runs every algorithm template over its hyperparameter grid and ``num_seeds``
oracle seeds, records the running-average merit on a thinned iteration
grid and aggregates mean and sample standard deviation across seeds.

Output is a pure function of the :class:`ExperimentConfig`: sub-seeds are
derived by hashing, and parallel results are merged in canonical
``(algorithm, grid point, seed)`` order.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import ConfigurationError, VISolveError, derive_seed, l2_diameter, linf_diameter
from .metrics import dist_to_solution, err_ball_skew, err_restricted_skew
from .problems import BilinearInstance, default_domains, gen_bilinear
from .solvers import ALGORITHMS, InvariantViolation, SolverConfig, run

log = logging.getLogger(__name__)

DEFAULT_GRID: tuple[float, ...] = tuple(sorted(m * 10.0 ** k for m in (1, 5) for k in range(-5, 6)))
METRICS = ("err", "err_restricted", "dist_to_solution", "gamma_stat")
SEARCHABLE = ("gamma0", "eta", "step", "decay_c", "beta_hint")
_TEMPLATE_KEYS = {"name", "algorithm", "search", "grid", "eta", "gamma0", "R_inf", "beta_hint",
                  "step", "step_mode", "decay_c", "mirror"}


@dataclass(frozen=True)
class AlgorithmTemplate:
    """One algorithm entry of an experiment.

    Unset hyperparameters are filled from the instance: ``eta`` is the ball
    radius (constrained) or ``||x0||`` (unconstrained), ``beta_hint`` the
    instance smoothness and ``R_inf`` the coordinate-wise domain diameter.
    ``search`` names one parameter to tune over ``grid`` (or the
    experiment grid).
    """

    algorithm: str
    name: Optional[str] = None
    search: Optional[str] = None
    grid: Optional[tuple[float, ...]] = None
    eta: Optional[float] = None
    gamma0: float = 1.0
    R_inf: Optional[float] = None
    beta_hint: Optional[float] = None
    step: Optional[float] = None
    step_mode: str = "constant"
    decay_c: Optional[float] = None
    mirror: str = "euclidean"

    @property
    def label(self) -> str:
        return self.name or self.algorithm

    @classmethod
    def from_dict(cls, doc: dict, where: str = "algorithms") -> "AlgorithmTemplate":
        if isinstance(doc, str):
            doc = {"algorithm": doc}
        if not isinstance(doc, dict):
            raise ConfigurationError(f"{where}: expected an object or algorithm name")
        unknown = set(doc) - _TEMPLATE_KEYS
        if unknown:
            raise ConfigurationError(f"{where}: unknown field(s) {sorted(unknown)}")
        if "algorithm" not in doc:
            raise ConfigurationError(f"{where}: missing field 'algorithm'")
        if doc["algorithm"] not in ALGORITHMS:
            raise ConfigurationError(f"{where}.algorithm: unknown algorithm {doc['algorithm']!r}")
        if doc.get("search") is not None and doc["search"] not in SEARCHABLE:
            raise ConfigurationError(f"{where}.search: must be one of {SEARCHABLE}")
        kw = dict(doc)
        if kw.get("grid") is not None:
            kw["grid"] = _float_grid(kw["grid"], f"{where}.grid")
        for key in ("eta", "gamma0", "R_inf", "beta_hint", "step", "decay_c"):
            if kw.get(key) is not None and not isinstance(kw[key], (int, float)):
                raise ConfigurationError(f"{where}.{key}: expected a number")
        return cls(**kw)

    def to_dict(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if v is not None}
        if "grid" in out:
            out["grid"] = list(out["grid"])
        return out


def _float_grid(values, where: str) -> tuple[float, ...]:
    if not isinstance(values, (list, tuple)) or not values:
        raise ConfigurationError(f"{where}: expected a non-empty list of numbers")
    try:
        out = tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{where}: expected a non-empty list of numbers") from None
    if not all(math.isfinite(v) for v in out):
        raise ConfigurationError(f"{where}: grid values must be finite")
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str = "experiment"
    d: int = 20
    n: int = 10
    instance_seed: int = 0
    rotation: str = "similarity"
    instance_per_seed: bool = False
    setting: str = "deterministic"
    minibatch: int = 16
    domain: str = "constrained"
    T: int = 10_000
    num_seeds: int = 5
    seed_base: int = 0
    record_every: int = 10
    per_decade: int = 30
    grid: tuple[float, ...] = DEFAULT_GRID
    algorithms: tuple[AlgorithmTemplate, ...] = ()
    record_invariants: bool = False
    record_wall_time: bool = False

    def __post_init__(self):
        checks = [
            (self.T >= 1, "T", "must be >= 1"),
            (self.num_seeds >= 1, "num_seeds", "must be >= 1"),
            (self.d >= 1, "d", "must be >= 1"),
            (self.n >= 1, "n", "must be >= 1"),
            (self.record_every >= 1, "record_every", "must be >= 1"),
            (self.per_decade >= 1, "per_decade", "must be >= 1"),
            (self.minibatch >= 1, "minibatch", "must be >= 1"),
            (self.setting in ("deterministic", "stochastic"), "setting",
             "must be 'deterministic' or 'stochastic'"),
            (self.domain in ("constrained", "unconstrained"), "domain",
             "must be 'constrained' or 'unconstrained'"),
            (len(self.grid) > 0, "grid", "must be non-empty"),
            (len(self.algorithms) > 0, "algorithms", "must list at least one algorithm"),
        ]
        for ok, name, msg in checks:
            if not ok:
                raise ConfigurationError(f"{name}: {msg}")
        labels = [a.label for a in self.algorithms]
        if len(set(labels)) != len(labels):
            raise ConfigurationError("algorithms: display names must be unique")

    @property
    def minibatch_size(self) -> Optional[int]:
        return self.minibatch if self.setting == "stochastic" else None

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigurationError("config: expected a JSON object")
        kw = dict(doc)
        inst = kw.pop("instance", None)
        if inst is not None:
            if not isinstance(inst, dict):
                raise ConfigurationError("instance: expected an object")
            mapping = {"d": "d", "n": "n", "seed": "instance_seed", "rotation": "rotation",
                       "instance_per_seed": "instance_per_seed"}
            for key, value in inst.items():
                if key not in mapping:
                    raise ConfigurationError(f"instance.{key}: unknown field")
                kw[mapping[key]] = value
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(kw) - known
        if unknown:
            raise ConfigurationError(f"config: unknown field(s) {sorted(unknown)}")
        for key in ("d", "n", "T", "num_seeds", "seed_base", "record_every", "per_decade",
                    "minibatch", "instance_seed"):
            if key in kw and (not isinstance(kw[key], int) or isinstance(kw[key], bool)):
                raise ConfigurationError(f"{key}: expected an integer")
        if "grid" in kw:
            kw["grid"] = _float_grid(kw["grid"], "grid")
        if "algorithms" not in kw or not isinstance(kw["algorithms"], list):
            raise ConfigurationError("algorithms: expected a list")
        kw["algorithms"] = tuple(AlgorithmTemplate.from_dict(a, f"algorithms[{i}]")
                                 for i, a in enumerate(kw["algorithms"]))
        return cls(**kw)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "instance": {"d": self.d, "n": self.n, "seed": self.instance_seed,
                         "rotation": self.rotation, "instance_per_seed": self.instance_per_seed},
            "setting": self.setting,
            "minibatch": self.minibatch,
            "domain": self.domain,
            "T": self.T,
            "num_seeds": self.num_seeds,
            "seed_base": self.seed_base,
            "record_every": self.record_every,
            "per_decade": self.per_decade,
            "grid": list(self.grid),
            "algorithms": [a.to_dict() for a in self.algorithms],
            "record_invariants": self.record_invariants,
            "record_wall_time": self.record_wall_time,
        }

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


def recording_grid(T: int, record_every: int = 10, per_decade: int = 30) -> np.ndarray:
    """Iterations to record: ``1``, every ``record_every`` up to 1000, log-spaced after, and ``T``."""
    pts = {1, T}
    pts.update(range(record_every, min(T, 1000) + 1, record_every))
    if T > 1000:
        decades = math.log10(T / 1000.0)
        k = max(1, int(math.ceil(decades * per_decade)))
        pts.update(int(round(v)) for v in np.logspace(3.0, math.log10(T), k + 1))
    return np.array(sorted(p for p in pts if 1 <= p <= T), dtype=np.int64)


# ---------------------------------------------------------------------------
# single runs


@dataclass
class RunResult:
    algorithm: str
    grid_index: int
    grid_value: Optional[float]
    seed_index: int
    sub_seed: int
    iterations: np.ndarray
    queries: np.ndarray
    metrics: dict
    status: str = "ok"             # "ok", "divergent" or "failed"
    message: str = ""
    wall_ns: Optional[np.ndarray] = None
    invariants: Optional[dict] = None

    @property
    def final(self) -> dict:
        return {k: float(v[-1]) for k, v in self.metrics.items()}


@lru_cache(maxsize=8)
def _instance(d: int, n: int, seed: int, rotation: str) -> BilinearInstance:
    return gen_bilinear(d, n, seed, rotation=rotation)


def instance_for(config: ExperimentConfig, seed_index: int) -> BilinearInstance:
    seed = config.instance_seed
    if config.instance_per_seed:
        seed = derive_seed(config.instance_seed, "instance", seed_index)
    return _instance(config.d, config.n, seed, config.rotation)


def resolve(template: AlgorithmTemplate, config: ExperimentConfig, instance: BilinearInstance,
            value: Optional[float] = None) -> SolverConfig:
    """Fill defaults from the instance and apply the searched ``value``."""
    domain = default_domains(instance)[config.domain]
    eta = template.eta
    if eta is None:
        eta = instance.radius if config.domain == "constrained" else float(np.linalg.norm(instance.x0))
    r_inf = template.R_inf
    if r_inf is None and domain.bounded:
        r_inf = linf_diameter(domain)
    cfg = SolverConfig(algorithm=template.algorithm, eta=eta, gamma0=template.gamma0, R_inf=r_inf,
                       beta_hint=template.beta_hint if template.beta_hint is not None else instance.beta,
                       step=template.step, step_mode=template.step_mode, decay_c=template.decay_c,
                       mirror=template.mirror)
    if template.search is not None and value is not None:
        cfg = cfg.with_(**{template.search: value})
    return cfg


def _record_row(state, instance, domain_kind: str, x0) -> list[float]:
    x_bar = state.x_bar
    mean = instance.mean_matrix
    if domain_kind == "constrained":
        err = err_ball_skew(mean, np.zeros_like(x_bar), instance.radius, x_bar)
        err_r = math.nan
    else:
        err = math.nan
        err_r = err_restricted_skew(mean, x0, 2.0 * float(np.linalg.norm(x0)), x_bar)
    return [err, err_r, dist_to_solution(x_bar), float(state.gamma)]


def run_one(config: ExperimentConfig, alg_index: int, grid_index: int, seed_index: int) -> RunResult:
    """Execute one ``(algorithm, grid point, seed)`` run."""
    import time

    template = config.algorithms[alg_index]
    grid = _grid_of(template, config)
    value = grid[grid_index] if template.search is not None else None
    instance = instance_for(config, seed_index)
    domain = default_domains(instance)[config.domain]
    sub_seed = derive_seed(config.seed_base, template.label, grid_index, seed_index)
    rec = recording_grid(config.T, config.record_every, config.per_decade)
    rows = np.full((len(rec), len(METRICS)), math.nan)
    queries = np.zeros(len(rec), dtype=np.int64)
    wall = np.zeros(len(rec), dtype=np.int64) if config.record_wall_time else None
    cursor = [0]
    start = time.perf_counter_ns()

    def observer(state):
        i = cursor[0]
        if i < len(rec) and state.t == rec[i]:
            rows[i] = _record_row(state, instance, config.domain, instance.x0)
            queries[i] = state.queries
            if wall is not None:
                wall[i] = time.perf_counter_ns() - start
            cursor[0] = i + 1

    status, message, traj = "ok", "", None
    try:
        cfg = resolve(template, config, instance, value)
        with np.errstate(over="ignore", invalid="ignore"):
            traj = run(cfg, instance, domain, config.T, seed=sub_seed,
                       minibatch_size=config.minibatch_size, keep_iterates=config.record_invariants,
                       observer=observer)
    except (InvariantViolation, FloatingPointError) as exc:
        # step sizes only fail to grow once they turn NaN
        status, message = "divergent", f"{type(exc).__name__}: {exc}"
    except (VISolveError, ValueError, ZeroDivisionError) as exc:
        status, message = "failed", f"{type(exc).__name__}: {exc}"
    if status == "ok" and not np.all(np.isfinite(rows[:, _applicable(config)])):
        status, message = "divergent", "non-finite metric"
    metrics = {name: rows[:, j] for j, name in enumerate(METRICS)}
    result = RunResult(algorithm=template.label, grid_index=grid_index, grid_value=value,
                       seed_index=seed_index, sub_seed=sub_seed, iterations=rec, queries=queries,
                       metrics=metrics, status=status, message=message, wall_ns=wall)
    if config.record_invariants and traj is not None:
        result.invariants = {
            "algorithm": cfg.algorithm, "xs": traj.xs, "zs": traj.zs, "grads": traj.grads,
            "extraps": traj.extraps, "gammas": traj.gammas, "eta": cfg.eta, "gamma0": cfg.gamma0,
            "R_inf": traj.R_inf, "domain": config.domain,
        }
    return result


def _applicable(config: ExperimentConfig) -> list[int]:
    return [0, 2] if config.domain == "constrained" else [1, 2]


def selection_metric(config: ExperimentConfig) -> str:
    return "err" if config.domain == "constrained" else "err_restricted"


def _grid_of(template: AlgorithmTemplate, config: ExperimentConfig) -> tuple:
    if template.search is None:
        return (None,)
    return template.grid if template.grid is not None else config.grid


def _jobs(config: ExperimentConfig, alg_indices=None) -> list[tuple[int, int, int]]:
    out = []
    for a, template in enumerate(config.algorithms):
        if alg_indices is not None and a not in alg_indices:
            continue
        for g in range(len(_grid_of(template, config))):
            for s in range(config.num_seeds):
                out.append((a, g, s))
    return out


def worker_count() -> int:
    env = os.environ.get("VI_SOLVE_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigurationError("VI_SOLVE_THREADS must be an integer") from None
        return max(1, n)
    return os.cpu_count() or 1


def _run_job(args):
    config, a, g, s = args
    return run_one(config, a, g, s)


def execute(config: ExperimentConfig, jobs, workers: Optional[int] = None) -> list[RunResult]:
    """Run ``jobs`` (possibly in parallel) and return results in job order."""
    workers = worker_count() if workers is None else workers
    payload = [(config, a, g, s) for a, g, s in jobs]
    if workers <= 1 or len(payload) <= 1:
        return [_run_job(p) for p in payload]
    with ProcessPoolExecutor(max_workers=min(workers, len(payload))) as pool:
        return list(pool.map(_run_job, payload))


# ---------------------------------------------------------------------------
# aggregation


@dataclass
class Curve:
    algorithm: str
    grid_index: int
    grid_value: Optional[float]
    iterations: np.ndarray
    queries_mean: np.ndarray
    mean: dict
    std: dict
    runs_used: int
    runs_divergent: int
    runs_failed: int


def aggregate(runs: list[RunResult]) -> Curve:
    """Mean and sample standard deviation (divisor ``max(1, k - 1)``) over runs.

    Divergent or failed runs are excluded and counted. Runs must share an
    iteration grid.
    """
    if not runs:
        raise ConfigurationError("aggregate needs at least one run")
    from .metrics import InstrumentationError

    base = runs[0].iterations
    for r in runs[1:]:
        if not np.array_equal(r.iterations, base):
            raise InstrumentationError("runs have misaligned recording grids")
    # canonical order makes the reduction independent of input order
    ordered = sorted(runs, key=lambda r: (r.seed_index, r.sub_seed))
    good = [r for r in ordered if r.status == "ok"]
    k = len(good)
    mean, std = {}, {}
    for name in runs[0].metrics:
        if k == 0:
            mean[name] = np.full(len(base), math.nan)
            std[name] = np.full(len(base), math.nan)
            continue
        stack = np.stack([r.metrics[name] for r in good])
        m = stack.sum(axis=0) / k
        mean[name] = m
        std[name] = np.sqrt(((stack - m) ** 2).sum(axis=0) / max(1, k - 1))
    q = np.stack([r.queries for r in good]).sum(axis=0) / k if k else np.full(len(base), math.nan)
    first = runs[0]
    return Curve(algorithm=first.algorithm, grid_index=first.grid_index, grid_value=first.grid_value,
                 iterations=base, queries_mean=q, mean=mean, std=std, runs_used=k,
                 runs_divergent=sum(r.status == "divergent" for r in ordered),
                 runs_failed=sum(r.status == "failed" for r in ordered))


@dataclass
class Selection:
    algorithm: str
    grid_index: Optional[int]
    value: Optional[float]
    score: float
    status: str        # "fixed", "selected" or "all-diverged"
    solver_config: Optional[SolverConfig] = None


@dataclass
class AggregateResult:
    config: ExperimentConfig
    runs: list
    curves: list
    selections: dict
    provenance: dict = field(default_factory=dict)

    @property
    def all_diverged(self) -> bool:
        return all(r.status != "ok" for r in self.runs)

    def selected_curves(self) -> list[Curve]:
        out = []
        for c in self.curves:
            sel = self.selections[c.algorithm]
            if sel.grid_index is not None and c.grid_index == sel.grid_index:
                out.append(c)
        return out


def _select(curves: list[Curve], template: AlgorithmTemplate, metric: str) -> tuple[Optional[int], float, str]:
    best, best_score = None, math.inf
    for c in curves:
        score = float(c.mean[metric][-1]) if c.runs_used else math.nan
        if not math.isfinite(score):
            continue
        value = c.grid_value if c.grid_value is not None else 0.0
        if best is None or score < best_score or (score == best_score and value < best[1]):
            best, best_score = (c.grid_index, value), score
    if best is None:
        return None, math.nan, "all-diverged"
    status = "selected" if template.search is not None else "fixed"
    return best[0], best_score, status


def grid_search(config: ExperimentConfig, template: AlgorithmTemplate,
                workers: Optional[int] = None) -> Selection:
    """Best hyperparameter for ``template`` by mean final merit of ``x_bar_T``.

    Ties go to the smaller parameter value. Divergent grid points are
    skipped; if all diverge the selection status is ``"all-diverged"``.
    """
    cfg = ExperimentConfig(**{**config.__dict__, "algorithms": (template,)})
    runs = execute(cfg, _jobs(cfg), workers)
    curves = _curves(cfg, runs)
    idx, score, status = _select(curves, template, selection_metric(cfg))
    return _selection(cfg, template, curves, idx, score, status)


def _selection(config, template, curves, idx, score, status) -> Selection:
    value = None
    solver_cfg = None
    if idx is not None:
        value = curves[idx].grid_value
        solver_cfg = resolve(template, config, instance_for(config, 0), value)
    return Selection(algorithm=template.label, grid_index=idx, value=value, score=score,
                     status=status, solver_config=solver_cfg)


def _curves(config: ExperimentConfig, runs: list[RunResult]) -> list[Curve]:
    groups: dict = {}
    for r in runs:
        groups.setdefault((r.algorithm, r.grid_index), []).append(r)
    order = {t.label: i for i, t in enumerate(config.algorithms)}
    keys = sorted(groups, key=lambda k: (order[k[0]], k[1]))
    return [aggregate(groups[k]) for k in keys]


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None) -> AggregateResult:
    """Run every template over its grid and seeds; select and aggregate."""
    from . import __version__

    runs = execute(config, _jobs(config), workers)
    curves = _curves(config, runs)
    metric = selection_metric(config)
    selections = {}
    for template in config.algorithms:
        mine = [c for c in curves if c.algorithm == template.label]
        idx, score, status = _select(mine, template, metric)
        selections[template.label] = _selection(config, template, mine, idx, score, status)
        if status == "all-diverged":
            log.warning("%s: every grid point diverged", template.label)
        elif template.search is not None:
            log.info("%s: selected %s = %r (mean final %s %.6g)", template.label, template.search,
                     selections[template.label].value, metric, score)
    for r in runs:
        if r.status != "ok":
            log.warning("%s grid %d seed %d: %s (%s)", r.algorithm, r.grid_index, r.seed_index,
                        r.status, r.message)
    inst = instance_for(config, 0)
    provenance = {
        "version": __version__,
        "numpy": np.__version__,
        "config": config.to_dict(),
        "config_hash": config.config_hash(),
        "instance": inst.to_dict() if not config.instance_per_seed else
        [instance_for(config, s).to_dict() for s in range(config.num_seeds)],
        "domain": {"kind": config.domain, "radius": inst.radius if config.domain == "constrained" else None,
                   "l2_diameter": l2_diameter(default_domains(inst)[config.domain])},
        "sub_seeds": [{"algorithm": r.algorithm, "grid_index": r.grid_index, "seed_index": r.seed_index,
                       "sub_seed": r.sub_seed, "status": r.status, "message": r.message} for r in runs],
        "selections": {k: {"grid_index": s.grid_index, "value": s.value, "score": s.score,
                           "status": s.status,
                           "solver_config": asdict(s.solver_config) if s.solver_config else None}
                       for k, s in selections.items()},
        "divergent_runs": sum(r.status == "divergent" for r in runs),
        "failed_runs": sum(r.status == "failed" for r in runs),
    }
    return AggregateResult(config=config, runs=runs, curves=curves, selections=selections,
                           provenance=provenance)


# ---------------------------------------------------------------------------
# presets


DESK_ALGORITHMS = ("adapeg", "adaeg", "adapeg-vector", "movement", "eg", "peg",
                   "adapeg-peg", "adapeg-optim")


def preset(name: str, setting: str = "deterministic") -> dict:
    """JSON document for a named experiment preset."""
    if name == "desk":
        return ExperimentConfig(experiment_id="desk", d=20, n=10, T=10_000, num_seeds=5,
                                setting="deterministic", domain="constrained",
                                algorithms=tuple(AlgorithmTemplate(a) for a in DESK_ALGORITHMS)).to_dict()
    if name not in ("paper-constrained", "paper-unconstrained"):
        raise ConfigurationError(f"unknown preset {name!r}")
    if setting not in ("deterministic", "stochastic"):
        raise ConfigurationError("setting must be 'deterministic' or 'stochastic'")
    constrained = name == "paper-constrained"
    adaptive = ["adapeg", "adapeg-vector", "adaeg"] if constrained else \
        ["adapeg-unbounded", "adapeg-vector-unbounded", "adaeg-unbounded"]
    algs = [AlgorithmTemplate(a, search="gamma0") for a in adaptive]
    if constrained:
        algs.append(AlgorithmTemplate("movement", search="gamma0"))
    if setting == "deterministic":
        algs += [AlgorithmTemplate("eg"), AlgorithmTemplate("peg")]
    else:
        algs += [AlgorithmTemplate("eg", step_mode="decaying", search="decay_c"),
                 AlgorithmTemplate("peg", step_mode="decaying", search="decay_c")]
    cfg = ExperimentConfig(experiment_id=f"{name}-{setting}", d=100,
                           n=1 if setting == "deterministic" else 100, T=100_000, num_seeds=5,
                           setting=setting, minibatch=16,
                           domain="constrained" if constrained else "unconstrained",
                           algorithms=tuple(algs))
    return cfg.to_dict()
