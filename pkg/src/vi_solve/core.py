"""Feasible sets, mirror maps, operators and the stochastic evaluation oracle.

Everything here is a pure function of its inputs. Points are plain 1-d
``numpy.ndarray`` of float64; domains and operators are small immutable
objects that the solvers share freely.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

#: anchor coordinates are floored here before taking logarithms
ENTROPY_FLOOR = 1e-300

_MEMBER_TOL = 1e-12


class VISolveError(Exception):
    """Base class for errors raised by this package."""


class ConfigurationError(VISolveError, ValueError):
    """Invalid problem, domain or solver configuration."""


class NonFiniteError(ConfigurationError, FloatingPointError):
    """A vector holds NaN or Inf; inside a run this means the iterates diverged."""


class UnboundedSubproblemError(ConfigurationError):
    """A linear subproblem has no minimizer on an unbounded domain."""


class OracleUnsupportedError(VISolveError, TypeError):
    """The operator cannot be sampled block-wise."""


# ---------------------------------------------------------------------------
# random sub-streams


def tag_code(tag: str) -> int:
    """Stable 32-bit code for a purpose tag."""
    return zlib.crc32(tag.encode("utf-8"))


def substream(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    """Generator derived from ``(seed, tag, index)`` by seed-sequence hashing.

    The stream depends only on the triple, never on how many other streams
    were drawn before, so evaluation order cannot change results.
    """
    if seed < 0 or index < 0:
        raise ConfigurationError("seed and index must be non-negative")
    return np.random.default_rng(np.random.SeedSequence([int(seed), tag_code(tag), int(index)]))


def derive_seed(seed: int, *parts) -> int:
    """Derive a child integer seed from a root seed and arbitrary labels."""
    words = [int(seed)]
    for p in parts:
        words.append(p if isinstance(p, int) and p >= 0 else tag_code(str(p)))
    return int(np.random.SeedSequence(words).generate_state(1, dtype=np.uint64)[0] >> 1)


# ---------------------------------------------------------------------------
# domains


def _as_vector(p, dim: Optional[int] = None) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise ConfigurationError(f"expected a 1-d vector, got shape {p.shape}")
    if dim is not None and p.shape[0] != dim:
        raise ConfigurationError(f"dimension mismatch: expected {dim}, got {p.shape[0]}")
    if not np.all(np.isfinite(p)):
        raise NonFiniteError("vector has non-finite entries")
    return p


@dataclass(frozen=True, eq=False)
class FreeSpace:
    dim: int

    bounded = False

    def contains(self, p, tol: float = _MEMBER_TOL) -> bool:
        return np.asarray(p).shape == (self.dim,)


@dataclass(frozen=True, eq=False)
class Ball:
    """Euclidean ball ``{u : ||u - center|| <= radius}``."""

    center: np.ndarray
    radius: float

    bounded = True

    def __post_init__(self):
        c = _as_vector(self.center)
        object.__setattr__(self, "center", c)
        if not (np.isfinite(self.radius) and self.radius > 0):
            raise ConfigurationError("ball radius must be strictly positive")
        object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def centered(cls, dim: int, radius: float) -> "Ball":
        return cls(np.zeros(dim), radius)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def _slack(self) -> float:
        return _MEMBER_TOL * max(1.0, self.radius)

    def contains(self, p, tol: float = _MEMBER_TOL) -> bool:
        p = np.asarray(p, dtype=float)
        return float(np.linalg.norm(p - self.center)) <= self.radius + tol * max(1.0, self.radius)


@dataclass(frozen=True, eq=False)
class Box:
    lower: np.ndarray
    upper: np.ndarray

    bounded = True

    def __post_init__(self):
        lo = _as_vector(self.lower)
        hi = _as_vector(self.upper, lo.shape[0])
        if np.any(lo > hi):
            raise ConfigurationError("box requires lower <= upper component-wise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def contains(self, p, tol: float = _MEMBER_TOL) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lower - tol) and np.all(p <= self.upper + tol))


@dataclass(frozen=True, eq=False)
class Simplex:
    """Probability simplex ``{u >= 0 : sum(u) = 1}``."""

    dim: int

    bounded = True

    def __post_init__(self):
        if self.dim < 1:
            raise ConfigurationError("simplex dimension must be >= 1")

    def contains(self, p, tol: float = _MEMBER_TOL) -> bool:
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= 0.0) and abs(p.sum() - 1.0) <= tol)


Domain = FreeSpace | Ball | Box | Simplex


def l2_diameter(domain) -> float:
    """Euclidean diameter ``max ||x - y||`` of a bounded domain."""
    if isinstance(domain, Ball):
        return 2.0 * domain.radius
    if isinstance(domain, Box):
        return float(np.linalg.norm(domain.upper - domain.lower))
    if isinstance(domain, Simplex):
        return float(np.sqrt(2.0)) if domain.dim > 1 else 0.0
    return float("inf")


def linf_diameter(domain) -> float:
    """ell-infinity diameter ``max ||x - y||_inf`` of a bounded domain."""
    if isinstance(domain, Ball):
        return 2.0 * domain.radius
    if isinstance(domain, Box):
        return float(np.max(domain.upper - domain.lower))
    if isinstance(domain, Simplex):
        return 1.0 if domain.dim > 1 else 0.0
    return float("inf")


def _project_simplex(p: np.ndarray) -> np.ndarray:
    # sort-and-threshold
    u = np.sort(p)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, p.shape[0] + 1)
    rho = np.count_nonzero(u - css / ind > 0)
    theta = css[rho - 1] / rho
    return np.maximum(p - theta, 0.0)


def project(domain, p) -> np.ndarray:
    """Euclidean projection of ``p`` onto ``domain``.

    Members are returned unchanged, so the map is exactly idempotent.
    """
    p = _as_vector(p, domain.dim)
    if isinstance(domain, FreeSpace):
        return p
    if isinstance(domain, Ball):
        diff = p - domain.center
        nrm = float(np.sqrt(diff @ diff))
        if nrm <= domain.radius + domain._slack():
            return p
        return domain.center + (domain.radius / nrm) * diff
    if isinstance(domain, Box):
        if np.all(p >= domain.lower) and np.all(p <= domain.upper):
            return p
        return np.clip(p, domain.lower, domain.upper)
    if isinstance(domain, Simplex):
        if domain.contains(p):
            return p
        return _project_simplex(p)
    raise ConfigurationError(f"unknown domain {domain!r}")


def _check_metric(weights, dim: int) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (dim,):
        raise ConfigurationError(f"metric dimension mismatch: expected {dim}, got {w.shape}")
    if not np.all(w > 0) or not np.all(np.isfinite(w)):
        raise ConfigurationError("diagonal metric entries must be finite and strictly positive")
    return w


def _ball_multiplier(delta: np.ndarray, w: np.ndarray, radius: float,
                     tol: float = 1e-14, max_iter: int = 200) -> float:
    """Bisection for lam >= 0 with ||delta * w / (w + lam)|| = radius.

    Stops once the radius residual is below ``tol * max(1, radius)`` or the
    bracket no longer shrinks in floating point.
    """

    def excess(lam):
        return float(np.linalg.norm(delta * (w / (w + lam)))) - radius

    lo = 0.0
    hi = float(np.max(w)) * float(np.linalg.norm(delta)) / radius
    while excess(hi) > 0:  # guard against rounding at the analytic bound
        hi *= 2.0
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        r = excess(mid)
        if r > 0:
            lo = mid
        else:
            hi = mid
        if abs(r) <= tol * max(1.0, radius) or not lo < 0.5 * (lo + hi) < hi:
            break
    return hi  # feasible side


def _project_simplex_diag(p: np.ndarray, w: np.ndarray) -> np.ndarray:
    # argmin sum_i w_i (u_i - p_i)^2 / 2 on the simplex: u_i = max(0, p_i - mu / w_i)
    inv = 1.0 / w
    order = np.argsort(-(p * w), kind="stable")
    ps = p[order]
    invs = inv[order]
    cp = np.cumsum(ps)
    ci = np.cumsum(invs)
    mus = (cp - 1.0) / ci
    active = ps - mus * invs > 0
    k = int(np.nonzero(active)[0].max()) if active.any() else 0
    return np.maximum(p - mus[k] * inv, 0.0)


def project_diag(domain, p, metric) -> np.ndarray:
    """``argmin_{u in domain} ||u - p||_D^2`` for a diagonal metric ``D``."""
    p = _as_vector(p, domain.dim)
    w = _check_metric(metric, domain.dim)
    if isinstance(domain, (FreeSpace, Box)):
        return project(domain, p)
    if isinstance(domain, Ball):
        delta = p - domain.center
        if float(np.linalg.norm(delta)) <= domain.radius + domain._slack():
            return p
        lam = _ball_multiplier(delta, w, domain.radius)
        return domain.center + delta * (w / (w + lam))
    if isinstance(domain, Simplex):
        if domain.contains(p):
            return p
        return _project_simplex_diag(p, w)
    raise ConfigurationError(f"unknown domain {domain!r}")


def linear_minimize(domain, g) -> np.ndarray:
    """``argmin_{u in domain} <g, u>``; ties broken deterministically."""
    g = _as_vector(g, domain.dim)
    if isinstance(domain, FreeSpace):
        if np.any(g != 0):
            raise UnboundedSubproblemError(
                "linear subproblem is unbounded on free space (gamma0 = 0 needs a bounded domain)")
        return np.zeros(domain.dim)
    if isinstance(domain, Ball):
        nrm = float(np.linalg.norm(g))
        if nrm == 0.0:
            return domain.center.copy()
        return domain.center - (domain.radius / nrm) * g
    if isinstance(domain, Box):
        return np.where(g > 0, domain.lower, np.where(g < 0, domain.upper, domain.lower))
    if isinstance(domain, Simplex):
        u = np.zeros(domain.dim)
        u[int(np.argmin(g))] = 1.0
        return u
    raise ConfigurationError(f"unknown domain {domain!r}")


# ---------------------------------------------------------------------------
# mirror maps


@dataclass(frozen=True)
class MirrorMap:
    """Distance-generating function: ``"euclidean"`` or ``"entropy"``."""

    kind: str = "euclidean"

    def __post_init__(self):
        if self.kind not in ("euclidean", "entropy"):
            raise ConfigurationError(f"unknown mirror map {self.kind!r}")

    def psi(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if self.kind == "euclidean":
            return 0.5 * float(x @ x)
        xs = np.maximum(x, ENTROPY_FLOOR)
        return float(np.sum(np.where(x > 0, x * np.log(xs), 0.0)))

    def grad(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "euclidean":
            return x.copy()
        return np.log(np.maximum(x, ENTROPY_FLOOR)) + 1.0

    def divergence(self, x, y) -> float:
        """Bregman divergence ``psi(x) - psi(y) - <grad psi(y), x - y>``."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "euclidean":
            d = x - y
            return 0.5 * float(d @ d)
        # generalized KL; equals KL(x || y) on the simplex
        ys = np.maximum(y, ENTROPY_FLOOR)
        xs = np.maximum(x, ENTROPY_FLOOR)
        terms = np.where(x > 0, x * (np.log(xs) - np.log(ys)), 0.0)
        return float(np.sum(terms) - x.sum() + y.sum())

    def compatible(self, domain) -> bool:
        return self.kind == "euclidean" or isinstance(domain, Simplex)


EUCLIDEAN = MirrorMap("euclidean")
NEGATIVE_ENTROPY = MirrorMap("entropy")


def prox_step(domain, mirror: MirrorMap, g, anchors: Sequence[tuple]) -> np.ndarray:
    """Solve ``argmin_u <g, u> + sum_k c_k D_psi(u, a_k)`` over ``domain``.

    ``anchors`` is a sequence of ``(point, weight)`` pairs with weights >= 0.
    With zero total weight the problem is linear and is delegated to
    :func:`linear_minimize`, which only works on bounded domains.
    """
    total = 0.0
    for _, c in anchors:
        if c < 0:
            raise ConfigurationError("anchor weights must be non-negative")
        total += c
    if total == 0.0:
        return linear_minimize(domain, g)
    if mirror.kind == "euclidean":
        acc = -np.asarray(g, dtype=float)
        for a, c in anchors:
            if c != 0.0:
                acc = acc + c * a
        return project(domain, acc / total)
    if not isinstance(domain, Simplex):
        raise ConfigurationError("negative-entropy mirror map requires a simplex domain")
    logits = -np.asarray(g, dtype=float)
    for a, c in anchors:
        if c != 0.0:
            logits = logits + c * np.log(np.maximum(np.asarray(a, dtype=float), ENTROPY_FLOOR))
    logits = logits / total
    logits -= logits.max()
    u = np.exp(logits)
    return u / u.sum()


def prox_step_diag(domain, g, anchors: Sequence[tuple]) -> np.ndarray:
    """Per-coordinate analogue of :func:`prox_step` (Euclidean only).

    Solves ``argmin_u <g, u> + 1/2 sum_k ||u - a_k||^2_{W_k}`` where each
    anchor is ``(point, weight_vector)`` with non-negative weights.
    """
    g = np.asarray(g, dtype=float)
    total = np.zeros_like(g)
    acc = -g
    for a, w in anchors:
        w = np.asarray(w, dtype=float)
        if np.any(w < 0):
            raise ConfigurationError("anchor weights must be non-negative")
        total = total + w
        acc = acc + w * a
    if np.all(total > 0):
        return project_diag(domain, acc / total, total)
    if np.all(total == 0):
        return linear_minimize(domain, g)
    # mixed zero / positive weights: only separable domains decouple
    zero = total == 0
    if isinstance(domain, FreeSpace):
        if np.any(g[zero] != 0):
            raise UnboundedSubproblemError("zero-weight coordinate with nonzero gradient on free space")
        out = np.zeros_like(g)
        out[~zero] = acc[~zero] / total[~zero]
        return out
    if isinstance(domain, Box):
        out = linear_minimize(domain, g)
        out[~zero] = np.clip(acc[~zero] / total[~zero], domain.lower[~zero], domain.upper[~zero])
        return out
    raise ConfigurationError("partially zero diagonal metric is only supported on free space and boxes")


# ---------------------------------------------------------------------------
# operators and oracle


class LinearSkewOperator:
    """``F(x) = mean_i M_i x`` for skew-symmetric blocks ``M_i``."""

    def __init__(self, blocks, beta: Optional[float] = None, G: Optional[float] = None):
        blocks = np.asarray(blocks, dtype=float)
        if blocks.ndim == 2:
            blocks = blocks[None]
        if blocks.ndim != 3 or blocks.shape[1] != blocks.shape[2]:
            raise ConfigurationError("blocks must have shape (n, dim, dim)")
        self.blocks = blocks
        self.blocks.setflags(write=False)
        self.mean = blocks.mean(axis=0)
        self.mean.setflags(write=False)
        self.beta = beta
        self.G = G

    @property
    def n(self) -> int:
        return self.blocks.shape[0]

    @property
    def dim(self) -> int:
        return self.blocks.shape[1]

    def __call__(self, x) -> np.ndarray:
        return self.mean @ x

    def block(self, i: int, x) -> np.ndarray:
        if not 0 <= i < self.n:
            raise IndexError(f"block index {i} out of range for n={self.n}")
        return self.blocks[i] @ x

    def minibatch(self, idx, x) -> np.ndarray:
        return (self.blocks[idx] @ x).sum(axis=0) / len(idx)


class CallbackOperator:
    """Operator given by an arbitrary evaluation callback."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], dim: int,
                 beta: Optional[float] = None, G: Optional[float] = None):
        self.fn = fn
        self.dim = dim
        self.beta = beta
        self.G = G
        self.n = None

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.fn(x), dtype=float)


def zero_operator(dim: int) -> LinearSkewOperator:
    return LinearSkewOperator(np.zeros((1, dim, dim)), beta=0.0, G=0.0)


@dataclass(frozen=True)
class StochasticOracle:
    """Evaluation oracle ``F^(x)``.

    ``minibatch_size=None`` gives exact full-batch values. Otherwise each
    query draws ``minibatch_size`` block indices uniformly with replacement
    from a sub-stream keyed by ``(seed, tag, step_index)``; the same query
    always returns the same estimate.
    """

    operator: object
    minibatch_size: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.minibatch_size is not None and self.minibatch_size < 1:
            raise ConfigurationError("minibatch_size must be >= 1")

    @property
    def dim(self) -> int:
        return self.operator.dim

    @property
    def exact(self) -> bool:
        return self.minibatch_size is None

    def evaluate(self, x, step_index: int, tag: str = "x") -> np.ndarray:
        if self.minibatch_size is None:
            return self.operator(x)
        return sample_minibatch(self, x, step_index, tag)


def sample_minibatch(oracle: StochasticOracle, x, step_index: int, tag: str = "x") -> np.ndarray:
    """Mean of ``minibatch_size`` uniformly drawn block evaluations at ``x``."""
    op = oracle.operator
    if getattr(op, "n", None) is None:
        raise OracleUnsupportedError("minibatch sampling needs an operator made of blocks")
    if oracle.minibatch_size is None:
        return op(x)
    if op.n == 1:
        return op.block(0, x)
    rng = substream(oracle.seed, tag, step_index)
    idx = rng.integers(0, op.n, size=oracle.minibatch_size)
    return op.minibatch(idx, x)


def check_finite(x, what: str = "vector") -> np.ndarray:
    if not np.all(np.isfinite(x)):
        raise FloatingPointError(f"{what} has non-finite entries")
    return x
