"""Exact t-SNE, written out rather than wrapped, so every piece is testable.

High-dimensional affinities are perplexity-calibrated Gaussians, symmetrized
into a joint distribution P; low-dimensional affinities Q use the Student-t
kernel with one degree of freedom; gradient descent (optionally with early
exaggeration and momentum) minimizes KL(P || Q). Everything is O(N^2),
which is fine at corpus scale, and fully deterministic given a seed.

sklearn interop is provided by :class:`TsneEmbedder` (fit/fit_transform with
get_params/set_params); :func:`embed_matrix` is the pipeline entry point that
carries document ids through to the :class:`Embedding`.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field, fields

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .features import FeatureMatrix

__all__ = [
    "TsneConfig",
    "AffinityMatrix",
    "Embedding",
    "CalibrationError",
    "pairwise_sq_distances",
    "calibrate_sigma",
    "joint_probabilities",
    "low_dim_affinities",
    "kl_divergence",
    "gradient",
    "TsneEmbedder",
    "embed_matrix",
    "write_embedding_csv",
    "read_embedding_csv",
    "write_kl_trace_csv",
]

_EPS = 1e-12
_MAX_BISECTIONS = 64
_INIT_STD = 1e-2


class CalibrationError(RuntimeError):
    """Perplexity calibration failed to converge for some row."""


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 4.0
    learning_rate: float = 100.0
    n_iters: int = 1000
    exaggeration_factor: float = 4.0
    exaggeration_iters: int = 100
    momentum_early: float = 0.5
    momentum_late: float = 0.8
    momentum_switch_iter: int = 250
    seed: int = 0
    sigma_tolerance: float = 1e-5
    plain_descent: bool = False

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        for m in (self.momentum_early, self.momentum_late):
            if not 0.0 <= m < 1.0:
                raise ValueError("momentum must be in [0, 1)")


@dataclass
class AffinityMatrix:
    """Joint probabilities p_ij: symmetric, zero diagonal, summing to 1."""

    p: np.ndarray

    def validate(self, atol: float = 1e-9) -> None:
        if not np.allclose(self.p, self.p.T, atol=atol):
            raise ValueError("affinity matrix is not symmetric")
        if np.any(np.diag(self.p) != 0.0):
            raise ValueError("affinity matrix has nonzero diagonal")
        if np.any(self.p < 0.0):
            raise ValueError("affinity matrix has negative entries")
        if abs(self.p.sum() - 1.0) > atol:
            raise ValueError(f"affinity matrix sums to {self.p.sum()!r}, not 1")


@dataclass
class Embedding:
    doc_ids: list[str]
    y: np.ndarray
    final_kl: float
    kl_trace: list[float] = field(default_factory=list)


def pairwise_sq_distances(x: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, computed without BLAS matmul so results
    are bit-reproducible across platforms at this problem size."""
    x = np.asarray(x, dtype=float)
    diff = x[:, None, :] - x[None, :, :]
    d = np.einsum("ijk,ijk->ij", diff, diff)
    d = 0.5 * (d + d.T)
    np.fill_diagonal(d, 0.0)
    return d


def _entropy_bits(cond: np.ndarray) -> float:
    nz = cond[cond > 0.0]
    return float(-(nz * np.log2(nz)).sum())


def _conditional_from_beta(sq_row: np.ndarray, beta: float) -> np.ndarray:
    # shift by the row min before exponentiation to avoid underflow
    shifted = sq_row - sq_row.min()
    w = np.exp(-shifted * beta)
    return w / w.sum()


def calibrate_sigma(dist_row: np.ndarray, perplexity: float,
                    tol: float = 1e-5, row_index: int | None = None
                    ) -> tuple[float, np.ndarray]:
    """Find sigma_i so the conditional distribution has the target perplexity.

    ``dist_row`` holds the squared distances from point i to every other
    point (the self-distance is excluded). Bisection runs on
    beta = 1/(2 sigma^2) for at most 64 iterations until 2^H(P_i) lands in
    ``perplexity * (1 +/- tol)``; the returned conditionals sum to 1.
    """
    sq_row = np.asarray(dist_row, dtype=float)
    n_others = sq_row.shape[0]
    if not 0 < perplexity < n_others + 1:
        raise ValueError(
            f"perplexity {perplexity} must be in (0, N) for N = {n_others + 1} points")
    target = np.log2(perplexity)
    beta, beta_min, beta_max = 1.0, 0.0, np.inf
    cond = _conditional_from_beta(sq_row, beta)
    for _ in range(_MAX_BISECTIONS):
        h = _entropy_bits(cond)
        if abs(2.0 ** h - perplexity) <= perplexity * tol:
            return float(np.sqrt(0.5 / beta)), cond
        if h > target:  # too many effective neighbors: narrow the kernel
            beta_min = beta
            beta = beta * 2.0 if beta_max == np.inf else 0.5 * (beta + beta_max)
        else:
            beta_max = beta
            beta = 0.5 * (beta + beta_min)
        cond = _conditional_from_beta(sq_row, beta)
    achieved = 2.0 ** _entropy_bits(cond)
    where = "" if row_index is None else f" for row {row_index}"
    raise CalibrationError(
        f"perplexity calibration did not converge{where}: "
        f"achieved {achieved:.6g}, target {perplexity:.6g}")


def joint_probabilities(x: np.ndarray, perplexity: float,
                        tol: float = 1e-5) -> AffinityMatrix:
    """Symmetrized joint distribution p_ij = (p_j|i + p_i|j) / 2N.

    Entries are floored at 1e-12 before the final normalization so outlier
    rows cannot underflow to zero mass.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n < 3:
        raise ValueError("joint probabilities require at least 3 points")
    sq = pairwise_sq_distances(x)
    mask = ~np.eye(n, dtype=bool)
    cond = np.zeros((n, n))
    for i in range(n):
        _, cond_row = calibrate_sigma(sq[i][mask[i]], perplexity, tol, row_index=i)
        cond[i][mask[i]] = cond_row
    p = (cond + cond.T) / (2.0 * n)
    p = np.where(mask, np.maximum(p, _EPS), 0.0)
    p /= p.sum()
    return AffinityMatrix(p=p)


def low_dim_affinities(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Student-t affinities: returns (q, unnormalized kernel), zero diagonals."""
    unnorm = 1.0 / (1.0 + pairwise_sq_distances(y))
    np.fill_diagonal(unnorm, 0.0)
    q = unnorm / unnorm.sum()
    return q, unnorm


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """KL(P || Q) with both distributions floored at 1e-12, diagonal skipped."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {q.shape}")
    pf = np.maximum(p, _EPS)
    qf = np.maximum(q, _EPS)
    ratio = np.log(pf / qf)
    if p.ndim == 2 and p.shape[0] == p.shape[1]:
        np.fill_diagonal(ratio, 0.0)
        contrib = np.where(np.eye(p.shape[0], dtype=bool), 0.0, pf * ratio)
    else:
        contrib = pf * ratio
    return float(contrib.sum())


def gradient(p: np.ndarray, q: np.ndarray, unnorm: np.ndarray,
             y: np.ndarray) -> np.ndarray:
    """dKL/dy_i = 4 sum_j (p_ij - q_ij) (y_i - y_j) unnorm_ij."""
    w = (p - q) * unnorm
    diff = y[:, None, :] - y[None, :, :]
    return 4.0 * np.einsum("ij,ijd->id", w, diff)


def _keyed_normal(n: int, seed: int, keys: list[str] | None) -> np.ndarray:
    """Gaussian init (std 1e-2); keyed per row id so that permuting the input
    rows permutes the initialization."""
    if keys is None:
        rng = np.random.default_rng(seed)
        return rng.standard_normal((n, 2)) * _INIT_STD
    rows = np.empty((n, 2))
    for i, key in enumerate(keys):
        digest = hashlib.sha256(f"{seed}:{key}".encode()).digest()
        row_seed = int.from_bytes(digest[:8], "big")
        rows[i] = np.random.default_rng(row_seed).standard_normal(2) * _INIT_STD
    return rows


class TsneEmbedder(BaseEstimator):
    """Two-dimensional t-SNE estimator (fit / fit_transform).

    Attributes after fitting: ``embedding_`` (N x 2), ``kl_trace_`` (KL of
    the un-exaggerated objective per iteration), ``final_kl_``.
    """

    def __init__(self, perplexity=4.0, learning_rate=100.0, n_iters=1000,
                 exaggeration_factor=4.0, exaggeration_iters=100,
                 momentum_early=0.5, momentum_late=0.8, momentum_switch_iter=250,
                 seed=0, sigma_tolerance=1e-5, plain_descent=False):
        self.perplexity = perplexity
        self.learning_rate = learning_rate
        self.n_iters = n_iters
        self.exaggeration_factor = exaggeration_factor
        self.exaggeration_iters = exaggeration_iters
        self.momentum_early = momentum_early
        self.momentum_late = momentum_late
        self.momentum_switch_iter = momentum_switch_iter
        self.seed = seed
        self.sigma_tolerance = sigma_tolerance
        self.plain_descent = plain_descent

    @classmethod
    def from_config(cls, config: TsneConfig) -> "TsneEmbedder":
        return cls(**{f.name: getattr(config, f.name) for f in fields(config)})

    def fit(self, X, y=None, sample_ids: list[str] | None = None):
        X = check_array(X, dtype=float)
        n = X.shape[0]
        if n < 3:
            raise ValueError("tsne: need at least 3 samples")
        if not self.perplexity < n:
            raise ValueError(f"tsne: perplexity {self.perplexity} must be < N = {n}")
        if self.learning_rate <= 0:
            raise ValueError("tsne: learning_rate must be positive")

        p_true = joint_probabilities(X, self.perplexity, self.sigma_tolerance).p
        exaggerating = not self.plain_descent and self.exaggeration_iters > 0
        p = p_true * self.exaggeration_factor if exaggerating else p_true

        cur = _keyed_normal(n, self.seed, sample_ids)
        prev = cur.copy()
        trace = []
        # divergence is detected explicitly below, so intermediate overflow
        # warnings are suppressed rather than surfaced twice
        with np.errstate(over="ignore", invalid="ignore"):
            for it in range(self.n_iters):
                if exaggerating and it == self.exaggeration_iters:
                    p = p_true
                    exaggerating = False
                q, unnorm = low_dim_affinities(cur)
                grad = gradient(p, q, unnorm, cur)
                if self.plain_descent:
                    nxt = cur - self.learning_rate * grad
                else:
                    momentum = (self.momentum_early if it < self.momentum_switch_iter
                                else self.momentum_late)
                    nxt = cur - self.learning_rate * grad + momentum * (cur - prev)
                nxt -= nxt.mean(axis=0)
                prev, cur = cur, nxt
                if not np.all(np.isfinite(cur)):
                    raise FloatingPointError(
                        f"tsne: non-finite coordinates at iteration {it}")
                trace.append(kl_divergence(p_true, q))
        q, _ = low_dim_affinities(cur)
        self.embedding_ = cur
        self.kl_trace_ = trace
        self.final_kl_ = kl_divergence(p_true, q)
        return self

    def fit_transform(self, X, y=None, sample_ids: list[str] | None = None):
        return self.fit(X, y=y, sample_ids=sample_ids).embedding_

    def transform(self, X):
        check_is_fitted(self, "embedding_")
        raise NotImplementedError(
            "t-SNE has no out-of-sample transform; use fit_transform")


def embed_matrix(m: FeatureMatrix, config: TsneConfig | None = None) -> Embedding:
    """Embed a standardized feature matrix, keying the init by document id."""
    config = config or TsneConfig()
    est = TsneEmbedder.from_config(config).fit(m.values, sample_ids=m.doc_ids)
    return Embedding(doc_ids=list(m.doc_ids), y=est.embedding_,
                     final_kl=est.final_kl_, kl_trace=est.kl_trace_)


def write_embedding_csv(embedding: Embedding, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "x", "y"])
        for doc_id, (x, y) in zip(embedding.doc_ids, embedding.y):
            writer.writerow([doc_id, f"{x:.17g}", f"{y:.17g}"])


def read_embedding_csv(path) -> Embedding:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["doc_id", "x", "y"]:
            raise ValueError(f"{path}: not an embedding CSV")
        doc_ids, coords = [], []
        for row in reader:
            if not row:
                continue
            doc_ids.append(row[0])
            coords.append((float(row[1]), float(row[2])))
    return Embedding(doc_ids=doc_ids, y=np.array(coords, dtype=float),
                     final_kl=float("nan"), kl_trace=[])


def write_kl_trace_csv(embedding: Embedding, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "kl"])
        for i, kl in enumerate(embedding.kl_trace):
            writer.writerow([i, f"{kl:.17g}"])
