"""Kernel functions, kernel matrices, the MMD statistic and the kernel-mean labeler.

The labeler scores a query against per-class sample banks by the squared
RKHS distance to each class's kernel mean, with the class-independent
k(x, x) term dropped; the per-class self terms are precomputed once in
ClassBank so repeated labeling (the sanitizer's inner loop) stays cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, EmptySampleSetError

KERNEL_FAMILIES = ("rbf", "linear", "polynomial")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its parameters. sigma is the RBF bandwidth."""

    family: str = "rbf"
    sigma: float = 1.0
    degree: int = 3
    coef: float = 1.0

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family == "rbf" and not self.sigma > 0:
            raise ValueError("rbf bandwidth sigma must be positive")
        if self.family == "polynomial" and self.degree < 1:
            raise ValueError("polynomial degree must be >= 1")


def _as_points(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    return x


def kernel_matrix(spec: KernelSpec, x, y) -> np.ndarray:
    """Pairwise kernel values, shape (len(x), len(y))."""
    x = _as_points(x)
    y = _as_points(y)
    if x.shape[1] != y.shape[1]:
        raise DimensionMismatchError(f"dimension mismatch: {x.shape[1]} vs {y.shape[1]}")
    if spec.family == "linear":
        return x @ y.T
    if spec.family == "polynomial":
        return (x @ y.T + spec.coef) ** spec.degree
    sq = np.sum(x * x, axis=1)[:, None] + np.sum(y * y, axis=1)[None, :] - 2.0 * (x @ y.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-sq / (2.0 * spec.sigma**2))


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Single kernel value k(x, y)."""
    return float(kernel_matrix(spec, x, y)[0, 0])


def mmd(spec: KernelSpec, x_samples, y_samples) -> float:
    """Kernel maximum mean discrepancy between two sample sets.

    Three-term square-root form; tiny negative round-off is clamped to zero
    before the root. Symmetric in its arguments by construction (the two
    sets are canonically ordered before any arithmetic).
    """
    x = _as_points(x_samples)
    y = _as_points(y_samples)
    if x.shape[0] == 0 or y.shape[0] == 0:
        raise EmptySampleSetError("mmd requires non-empty sample sets")
    # canonical order so mmd(x, y) and mmd(y, x) run identical arithmetic
    if (x.shape[0], x.tobytes()) > (y.shape[0], y.tobytes()):
        x, y = y, x
    m = x.shape[0]
    n = y.shape[0]
    kxx = float(np.sum(kernel_matrix(spec, x, x))) / (m * m)
    kyy = float(np.sum(kernel_matrix(spec, y, y))) / (n * n)
    kxy = float(np.sum(kernel_matrix(spec, x, y))) / (m * n)
    return float(np.sqrt(max(kxx + kyy - 2.0 * kxy, 0.0)))


@dataclass(frozen=True)
class ClassBank:
    """Per-class sample matrices in projected space plus precomputed self terms.

    ``stacked`` holds all rows grouped by class; ``offsets[i]:offsets[i+1]``
    slices class ``classes[i]``. ``self_means[i]`` is (1/n_i^2) sum of the
    class's kernel matrix under the bank's kernel.
    """

    classes: np.ndarray
    stacked: np.ndarray
    offsets: np.ndarray
    self_means: np.ndarray
    spec: KernelSpec = field(repr=False)

    @property
    def n_classes(self) -> int:
        return int(self.classes.size)

    def class_rows(self, label: int) -> np.ndarray:
        i = int(np.searchsorted(self.classes, label))
        if i >= self.classes.size or self.classes[i] != label:
            raise KeyError(f"class {label} not in bank")
        return self.stacked[self.offsets[i] : self.offsets[i + 1]]

    def counts(self) -> np.ndarray:
        return np.diff(self.offsets)


def build_bank(spec: KernelSpec, x, labels) -> ClassBank:
    """Group rows of x by label (ascending class order) and precompute self terms."""
    x = _as_points(x)
    labels = np.asarray(labels, dtype=np.int64)
    if x.shape[0] == 0:
        raise EmptySampleSetError("cannot build a bank from zero rows")
    if labels.shape[0] != x.shape[0]:
        raise DimensionMismatchError("labels length must match sample count")
    classes = np.unique(labels)
    blocks = []
    offsets = [0]
    self_means = []
    for c in classes:
        rows = x[labels == c]
        blocks.append(rows)
        offsets.append(offsets[-1] + rows.shape[0])
        self_means.append(float(np.sum(kernel_matrix(spec, rows, rows))) / rows.shape[0] ** 2)
    return ClassBank(
        classes=classes,
        stacked=np.ascontiguousarray(np.vstack(blocks)),
        offsets=np.asarray(offsets, dtype=np.int64),
        self_means=np.asarray(self_means, dtype=np.float64),
        spec=spec,
    )


def label_scores(bank: ClassBank, spec: KernelSpec, x) -> np.ndarray:
    """Per-class scores for one or more queries; lower is closer. Shape (n, L)."""
    x = _as_points(x)
    k = kernel_matrix(spec, x, bank.stacked)
    scores = np.empty((x.shape[0], bank.n_classes))
    for i in range(bank.n_classes):
        lo, hi = bank.offsets[i], bank.offsets[i + 1]
        scores[:, i] = bank.self_means[i] - 2.0 * np.sum(k[:, lo:hi], axis=1) / (hi - lo)
    return scores


def label(bank: ClassBank, spec: KernelSpec, xhat) -> int:
    """Current class of a query: argmin of the kernel-mean score, ties to the lowest class."""
    scores = label_scores(bank, spec, xhat)[0]
    return int(bank.classes[int(np.argmin(scores))])


def label_batch(bank: ClassBank, spec: KernelSpec, x) -> np.ndarray:
    """Vectorized label() over the rows of x."""
    scores = label_scores(bank, spec, x)
    return bank.classes[np.argmin(scores, axis=1)]


def median_pairwise_distance(x, cap: int = 2000, seed: int = 0) -> float:
    """Median Euclidean distance over all pairs (subsampled above ``cap`` rows)."""
    x = _as_points(x)
    if x.shape[0] > cap:
        idx = np.random.default_rng(seed).choice(x.shape[0], size=cap, replace=False)
        x = x[np.sort(idx)]
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    iu = np.triu_indices(x.shape[0], k=1)
    med = float(np.median(np.sqrt(np.maximum(d2[iu], 0.0))))
    return med


def select_bandwidth(
    x,
    labels,
    seed: int = 0,
    folds: int = 5,
    multipliers=(0.1, 0.5, 1.0, 2.0, 5.0, 10.0),
) -> float:
    """RBF bandwidth for the kernel-mean labeler, by cross-validated accuracy.

    Candidates are multiples of the median pairwise distance of x; the one
    with the best stratified k-fold accuracy of label() wins, ties going to
    the smaller bandwidth.
    """
    x = _as_points(x)
    labels = np.asarray(labels, dtype=np.int64)
    med = median_pairwise_distance(x)
    if med <= 0:
        med = 1.0
    candidates = [m * med for m in multipliers]
    fold_of = _stratified_fold_assignment(labels, folds, seed)
    best_sigma = candidates[0]
    best_acc = -1.0
    for sigma in candidates:
        spec = KernelSpec(family="rbf", sigma=sigma)
        hits = 0
        for f in range(folds):
            train = fold_of != f
            test = ~train
            if not np.any(test):
                continue
            bank = build_bank(spec, x[train], labels[train])
            hits += int(np.sum(label_batch(bank, spec, x[test]) == labels[test]))
        acc = hits / labels.size
        if acc > best_acc:
            best_acc = acc
            best_sigma = sigma
    return float(best_sigma)


def _stratified_fold_assignment(labels: np.ndarray, folds: int, seed: int) -> np.ndarray:
    """Round-robin fold ids per class after a seeded shuffle."""
    rng = np.random.default_rng(seed)
    fold_of = np.empty(labels.size, dtype=np.int64)
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        idx = idx[rng.permutation(idx.size)]
        fold_of[idx] = np.arange(idx.size) % folds
    return fold_of
