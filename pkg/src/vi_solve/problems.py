"""Random bilinear saddle-point instances.

``f(u, v) = (1/n) sum_i u^T A_i v`` with ``A_i = Q_i diag(s_i) Q_i^T``,
``s_i ~ Uniform[-10, 10)^d`` and ``Q_i`` Haar-distributed. The associated
operator on ``x = (u, v)`` is ``F(x) = (A v, -A^T u)``, a linear map with a
skew-symmetric matrix and strong solution ``x* = 0``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Ball, ConfigurationError, FreeSpace, LinearSkewOperator, substream, tag_code

log = logging.getLogger(__name__)

ROTATIONS = ("similarity", "one-sided")


def haar_rotation(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal ``d x d`` matrix (sign-corrected QR)."""
    if d < 1:
        raise ConfigurationError("d must be >= 1")
    z = rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def skew_embed(a: np.ndarray) -> np.ndarray:
    """``[[0, A], [-A^T, 0]]``."""
    d = a.shape[0]
    m = np.zeros((2 * d, 2 * d))
    m[:d, d:] = a
    m[d:, :d] = -a.T
    return m


def power_iteration(b: np.ndarray, rng: np.random.Generator, tol: float = 1e-10,
                    max_iter: int = 10_000) -> tuple[float, np.ndarray, int]:
    """Top eigenpair of a symmetric PSD matrix.

    Stops when ``||B v - lam v|| <= tol * lam``. Returns ``(lam, v, iters)``.
    """
    v = rng.standard_normal(b.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for k in range(1, max_iter + 1):
        w = b @ v
        lam = float(v @ w)
        if lam <= 0.0:
            return 0.0, v, k
        if np.linalg.norm(w - lam * v) <= tol * lam:
            return lam, v, k
        v = w / np.linalg.norm(w)
    log.warning("power iteration hit the %d-iteration cap", max_iter)
    return lam, v, max_iter


@dataclass(eq=False)
class BilinearInstance:
    d: int
    n: int
    seed: int
    spectra: np.ndarray            # (n, d)
    a_blocks: np.ndarray           # (n, d, d)
    x0: np.ndarray                 # (2d,)
    beta: float
    rotation: str = "similarity"
    x0_attempt: int = 0
    operator: LinearSkewOperator = field(init=False, repr=False)

    def __post_init__(self):
        blocks = np.stack([skew_embed(a) for a in self.a_blocks])
        self.operator = LinearSkewOperator(blocks, beta=self.beta)
        self.operator.G = self.G_on_domain

    @property
    def dim(self) -> int:
        return 2 * self.d

    @property
    def blocks(self) -> np.ndarray:
        return self.operator.blocks

    @property
    def mean_matrix(self) -> np.ndarray:
        return self.operator.mean

    @property
    def x_star(self) -> np.ndarray:
        return np.zeros(2 * self.d)

    @property
    def radius(self) -> float:
        """Radius ``2 ||x0 - x*||`` of the constrained experiment's ball."""
        return 2.0 * float(np.linalg.norm(self.x0))

    @property
    def G_on_domain(self) -> float:
        """``max ||F(x)||`` over the default ball (linear F, centered ball)."""
        return self.beta * self.radius

    def eval_full(self, x) -> np.ndarray:
        return self.operator(np.asarray(x, dtype=float))

    def eval_block(self, i: int, x) -> np.ndarray:
        return self.operator.block(i, np.asarray(x, dtype=float))

    def rotation_seeds(self) -> list[list[int]]:
        return [[self.seed, tag_code("rotation"), i] for i in range(self.n)]

    def to_dict(self) -> dict:
        return {
            "kind": "bilinear",
            "seed": self.seed,
            "d": self.d,
            "n": self.n,
            "rotation": self.rotation,
            "spectra": self.spectra.tolist(),
            "rotation_seeds": self.rotation_seeds(),
            "x0_attempt": self.x0_attempt,
            "beta": self.beta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _block(seed: int, i: int, d: int, rotation: str, spectrum=None):
    if spectrum is None:
        spectrum = substream(seed, "spectrum", i).uniform(-10.0, 10.0, size=d)
    q = haar_rotation(d, substream(seed, "rotation", i))
    if rotation == "similarity":
        a = (q * spectrum) @ q.T
    else:
        a = q * spectrum
    return spectrum, a


def spectral_norm(mean_matrix: np.ndarray, seed: int = 0) -> float:
    """Largest singular value via power iteration on ``M^T M``."""
    lam, _, _ = power_iteration(mean_matrix.T @ mean_matrix, substream(seed, "power", 0))
    return float(np.sqrt(lam))


def gen_bilinear(d: int, n: int, seed: int, rotation: str = "similarity") -> BilinearInstance:
    """Generate a bilinear instance; bit-identical for identical arguments."""
    if d < 1 or n < 1:
        raise ConfigurationError("d and n must be >= 1")
    if rotation not in ROTATIONS:
        raise ConfigurationError(f"rotation must be one of {ROTATIONS}")
    spectra = np.empty((n, d))
    a_blocks = np.empty((n, d, d))
    for i in range(n):
        spectra[i], a_blocks[i] = _block(seed, i, d, rotation)
    x0, attempt = _draw_x0(seed, d)
    mean_a = a_blocks.mean(axis=0)
    beta = spectral_norm(skew_embed(mean_a), seed)
    return BilinearInstance(d=d, n=n, seed=seed, spectra=spectra, a_blocks=a_blocks, x0=x0,
                            beta=beta, rotation=rotation, x0_attempt=attempt)


def _draw_x0(seed: int, d: int, start: int = 0):
    attempt = start
    while True:
        x0 = substream(seed, "x0", attempt).uniform(-10.0, 10.0, size=2 * d)
        if np.any(x0 != 0):
            return x0, attempt
        log.info("x0 = 0 would give a degenerate ball; redrawing with sub-seed %d", attempt + 1)
        attempt += 1


def instance_from_dict(doc: dict) -> BilinearInstance:
    """Rebuild an instance from :meth:`BilinearInstance.to_dict` output."""
    if doc.get("kind", "bilinear") != "bilinear":
        raise ConfigurationError("not a bilinear instance document")
    seed, d, n = int(doc["seed"]), int(doc["d"]), int(doc["n"])
    rotation = doc.get("rotation", "similarity")
    spectra = np.asarray(doc["spectra"], dtype=float) if "spectra" in doc else None
    if spectra is not None and spectra.shape != (n, d):
        raise ConfigurationError("spectra shape does not match (n, d)")
    a_blocks = np.empty((n, d, d))
    out_spectra = np.empty((n, d))
    for i in range(n):
        out_spectra[i], a_blocks[i] = _block(seed, i, d, rotation,
                                             None if spectra is None else spectra[i])
    x0, attempt = _draw_x0(seed, d, int(doc.get("x0_attempt", 0)))
    beta = spectral_norm(skew_embed(a_blocks.mean(axis=0)), seed)
    return BilinearInstance(d=d, n=n, seed=seed, spectra=out_spectra, a_blocks=a_blocks, x0=x0,
                            beta=beta, rotation=rotation, x0_attempt=attempt)


def instance_from_json(text: str) -> BilinearInstance:
    return instance_from_dict(json.loads(text))


def default_domains(instance: BilinearInstance) -> dict:
    """Constrained ball of radius ``2||x0||`` around ``x* = 0`` and free space."""
    return {
        "constrained": Ball(np.zeros(instance.dim), instance.radius),
        "unconstrained": FreeSpace(instance.dim),
    }
