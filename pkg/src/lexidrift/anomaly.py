"""Unsupervised anomaly detectors over the standardized feature matrix.

Two complementary methods, both written in-process so the optimization and
scoring paths stay inspectable:

* a nu-one-class SVM with RBF kernel, solved in the dual by pairwise
  coordinate descent (working set of size two, which preserves the equality
  constraint sum(alpha) = 1 by construction), and
* an isolation forest with per-tree derived seeds and the standard
  unsuccessful-search path-length normalization.

Kernel and distance computations avoid BLAS matmul on purpose: at corpus
scale the cost is irrelevant and elementwise reductions keep results
bit-reproducible.
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .features import FeatureMatrix
from .tsne import pairwise_sq_distances

__all__ = [
    "ConvergenceError",
    "OneClassSvmDetector",
    "IsolationForestDetector",
    "AnomalyReport",
    "rbf_kernel",
    "default_gamma",
    "average_path_length",
    "subsample_path_norm",
    "flag_anomalies",
    "write_report_csv",
    "read_report_csv",
]

_EULER_GAMMA = 0.5772156649
_ALPHA_EPS = 1e-8


class ConvergenceError(RuntimeError):
    """The dual solver hit its iteration cap before reaching KKT tolerance."""


def rbf_kernel(x: np.ndarray, z: np.ndarray, gamma: float) -> float:
    """exp(-gamma * ||x - z||^2); always in (0, 1]."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if x.shape != z.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {z.shape}")
    d = x - z
    return float(np.exp(-gamma * (d * d).sum()))


def default_gamma(m: FeatureMatrix | np.ndarray) -> float:
    """1 / (n_features * variance), variance taken over all entries.

    On a standardized matrix this reduces to 1/n_features.
    """
    values = m.values if isinstance(m, FeatureMatrix) else np.asarray(m, dtype=float)
    var = float(values.var())
    if var == 0.0:
        raise ValueError("cannot derive gamma from an all-constant matrix")
    return 1.0 / (values.shape[1] * var)


def _rbf_matrix(x: np.ndarray, gamma: float) -> np.ndarray:
    return np.exp(-gamma * pairwise_sq_distances(x))


def _rbf_cross(x: np.ndarray, rows: np.ndarray, gamma: float) -> np.ndarray:
    diff = x[:, None, :] - rows[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    return np.exp(-gamma * sq)


class OneClassSvmDetector(BaseEstimator):
    """nu-one-class SVM: f(x) = sum_i alpha_i K(x_i, x) - rho, outlier iff f < 0.

    The dual (minimize 0.5 a'Ka subject to 0 <= a_i <= 1/(nu N),
    sum a_i = 1) is solved by repeatedly updating the maximally violating
    pair, so feasibility holds exactly at every step. ``gamma="auto"``
    derives the kernel width from the data via :func:`default_gamma`.
    """

    def __init__(self, nu=0.5, gamma="auto", tol=1e-6, max_iter=100_000):
        self.nu = nu
        self.gamma = gamma
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        n = X.shape[0]
        if not 0.0 < self.nu <= 1.0:
            raise ValueError(f"nu must be in (0, 1], got {self.nu}")
        if n < 2:
            raise ValueError("need at least 2 samples")
        gamma = default_gamma(X) if self.gamma == "auto" else float(self.gamma)
        if gamma <= 0:
            raise ValueError("gamma must be positive")

        cap = 1.0 / (self.nu * n)
        alpha = np.zeros(n)
        n_full = int(math.floor(self.nu * n))
        alpha[:n_full] = cap
        remainder = 1.0 - n_full * cap
        if remainder > 0 and n_full < n:
            alpha[n_full] = remainder

        k = _rbf_matrix(X, gamma)
        g = (k * alpha).sum(axis=1)

        violation = np.inf
        for it in range(self.max_iter):
            can_up = alpha < cap * (1.0 - 1e-12)
            can_down = alpha > cap * 1e-12
            i = int(np.argmin(np.where(can_up, g, np.inf)))
            j = int(np.argmax(np.where(can_down, g, -np.inf)))
            violation = g[j] - g[i]
            if violation <= self.tol:
                break
            eta = k[i, i] + k[j, j] - 2.0 * k[i, j]
            step = violation / eta if eta > 1e-15 else np.inf
            step = min(step, cap - alpha[i], alpha[j])
            alpha[i] = min(cap, alpha[i] + step)
            alpha[j] = max(0.0, alpha[j] - step)
            g += step * (k[:, i] - k[:, j])
        else:
            raise ConvergenceError(
                f"one-class SVM did not converge in {self.max_iter} iterations; "
                f"max KKT violation {violation:.3e}")

        margin = (alpha > _ALPHA_EPS) & (alpha < cap - _ALPHA_EPS)
        if margin.any():
            rho = float(g[margin].mean())
        else:
            at_cap = alpha >= cap - _ALPHA_EPS
            at_zero = alpha <= _ALPHA_EPS
            hi = g[at_cap].max() if at_cap.any() else g.min()
            lo = g[at_zero].min() if at_zero.any() else g.max()
            rho = 0.5 * (float(hi) + float(lo))

        self.gamma_ = gamma
        self.alphas_ = alpha
        self.rho_ = rho
        self.support_rows_ = X
        self.n_iter_ = it + 1
        self.kkt_violation_ = float(max(violation, 0.0))
        return self

    def decision_function(self, X) -> np.ndarray:
        check_is_fitted(self, "alphas_")
        X = check_array(X, dtype=float)
        kx = _rbf_cross(X, self.support_rows_, self.gamma_)
        return (kx * self.alphas_).sum(axis=1) - self.rho_

    def predict(self, X) -> np.ndarray:
        """+1 for inliers, -1 for outliers (decision value strictly below 0)."""
        return np.where(self.decision_function(X) < 0.0, -1, 1)

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).predict(X)


# --- isolation forest --------------------------------------------------------


def average_path_length(n: int) -> float:
    """Expected unsuccessful-search path length c(n) used at leaves."""
    if n <= 1:
        return 0.0
    if n == 2:
        return 1.0
    return 2.0 * (math.log(n - 1.0) + _EULER_GAMMA) - 2.0 * (n - 1.0) / n


def subsample_path_norm(psi: int) -> float:
    """Score normalization constant c(psi) for the subsample size."""
    if psi < 2:
        raise ValueError("subsample size must be at least 2")
    return 2.0 * (math.log(psi - 1.0) + _EULER_GAMMA) - 2.0 * (psi - 1.0) / psi


@dataclass
class _Node:
    size: int
    feature: int | None = None
    value: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None


def _build_tree(data: np.ndarray, height: int, limit: int,
                rng: np.random.Generator) -> _Node:
    n = data.shape[0]
    if n <= 1 or height >= limit:
        return _Node(size=n)
    lo = data.min(axis=0)
    hi = data.max(axis=0)
    splittable = np.flatnonzero(hi > lo)
    if splittable.size == 0:
        return _Node(size=n)
    feature = int(splittable[rng.integers(splittable.size)])
    value = float(rng.uniform(lo[feature], hi[feature]))
    mask = data[:, feature] < value
    return _Node(size=n, feature=feature, value=value,
                 left=_build_tree(data[mask], height + 1, limit, rng),
                 right=_build_tree(data[~mask], height + 1, limit, rng))


def _path_length(x: np.ndarray, node: _Node) -> float:
    depth = 0
    while node.feature is not None:
        node = node.left if x[node.feature] < node.value else node.right
        depth += 1
    return depth + average_path_length(node.size)


class IsolationForestDetector(BaseEstimator):
    """Isolation forest scoring s = 2^(-E[h]/c(psi)), s in (0, 1].

    Scores near 1 indicate easy-to-isolate (anomalous) points; 0.5 and below
    is typical for bulk data. ``psi="auto"`` uses min(256, N). Each tree gets
    its own generator seeded with ``seed + tree_index``, so builds are
    order-independent and reproducible.
    """

    def __init__(self, n_trees=100, psi="auto", contamination=0.1, seed=0):
        self.n_trees = n_trees
        self.psi = psi
        self.contamination = contamination
        self.seed = seed

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        n = X.shape[0]
        if n < 2:
            raise ValueError("need at least 2 samples")
        psi = min(256, n) if self.psi == "auto" else int(self.psi)
        if not 2 <= psi <= n:
            raise ValueError(f"psi must be in [2, {n}], got {psi}")
        limit = math.ceil(math.log2(psi))
        trees = []
        for t in range(self.n_trees):
            rng = np.random.default_rng(self.seed + t)
            sample = X[rng.choice(n, size=psi, replace=False)]
            trees.append(_build_tree(sample, 0, limit, rng))
        self.trees_ = trees
        self.psi_ = psi
        self.c_psi_ = subsample_path_norm(psi)
        self.training_scores_ = self._score(X)
        k = max(1, math.ceil(self.contamination * n))
        self.threshold_ = float(np.sort(self.training_scores_)[::-1][k - 1])
        return self

    def _score(self, X: np.ndarray) -> np.ndarray:
        mean_path = np.array([
            sum(_path_length(x, tree) for tree in self.trees_) / len(self.trees_)
            for x in X])
        return np.exp2(-mean_path / self.c_psi_)

    def score_samples(self, X) -> np.ndarray:
        check_is_fitted(self, "trees_")
        return self._score(check_array(X, dtype=float))

    def predict(self, X) -> np.ndarray:
        """-1 for scores at or above the training contamination cutoff."""
        check_is_fitted(self, "trees_")
        return np.where(self.score_samples(X) >= self.threshold_, -1, 1)

    def fit_predict(self, X, y=None) -> np.ndarray:
        return self.fit(X).predict(X)


# --- reporting ----------------------------------------------------------------


@dataclass
class AnomalyReport:
    doc_ids: list[str]
    dates: list[dt.date]
    scores: list[float]
    flags: list[bool]
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(self.doc_ids), len(self.dates), len(self.scores), len(self.flags)}
        if len(lengths) > 1:
            raise ValueError("report fields have mismatched lengths")

    @property
    def flagged_ids(self) -> list[str]:
        return [d for d, f in zip(self.doc_ids, self.flags) if f]


def flag_anomalies(scores, method: str, doc_ids: list[str], dates: list[dt.date],
                   contamination: float = 0.1, params: dict | None = None
                   ) -> AnomalyReport:
    """Turn raw detector output into per-document flags.

    ``method="ocsvm"`` treats scores as decision values and flags strictly
    negative ones. ``method="iforest"`` flags the ceil(contamination * N)
    highest scores, breaking ties in favor of earlier dates.
    """
    scores = [float(s) for s in scores]
    n = len(scores)
    if not all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    if len(doc_ids) != n or len(dates) != n:
        raise ValueError("scores, doc_ids and dates must have equal length")
    if method == "ocsvm":
        flags = [s < 0.0 for s in scores]
    elif method == "iforest":
        k = min(n, max(0, math.ceil(contamination * n)))
        order = sorted(range(n), key=lambda i: (-scores[i], dates[i], i))
        chosen = set(order[:k])
        flags = [i in chosen for i in range(n)]
    else:
        raise ValueError(f"unknown method {method!r}")
    return AnomalyReport(doc_ids=list(doc_ids), dates=list(dates), scores=scores,
                         flags=flags, method=method, params=dict(params or {}))


def write_report_csv(report: AnomalyReport, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", "date", "score", "flagged", "method"])
        for doc_id, date, score, flag in zip(report.doc_ids, report.dates,
                                             report.scores, report.flags):
            writer.writerow([doc_id, date.isoformat(), f"{score:.17g}",
                             "true" if flag else "false", report.method])


def read_report_csv(path) -> AnomalyReport:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["doc_id", "date", "score", "flagged", "method"]:
            raise ValueError(f"{path}: not an anomaly report CSV")
        doc_ids, dates, scores, flags, method = [], [], [], [], ""
        for row in reader:
            if not row:
                continue
            doc_ids.append(row[0])
            dates.append(dt.date.fromisoformat(row[1]))
            scores.append(float(row[2]))
            flags.append(row[3] == "true")
            method = row[4]
    return AnomalyReport(doc_ids=doc_ids, dates=dates, scores=scores,
                         flags=flags, method=method)
