"""Within-class, between-class and total scatter matrices per classification target.

Accumulation uses the centered form sum (x - mu_l)(x - mu_l)^T, which is
algebraically identical to the raw-moment form but numerically stabler; the
identity S_W + S_B = S_total is verified by tests rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset
from .errors import EmptyClassError, UnknownTargetError


@dataclass(frozen=True)
class ScatterSet:
    """Scatter matrices for one target, plus the means and counts that built them."""

    target: str
    s_w: np.ndarray
    s_b: np.ndarray
    s_total: np.ndarray
    mean: np.ndarray
    class_means: np.ndarray
    class_counts: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.s_w.shape[0])


def _sym(a: np.ndarray) -> np.ndarray:
    return (a + a.T) / 2.0


def compute_scatter(data: LabeledDataset, target: str) -> ScatterSet:
    """Scatter matrices of ``data`` for ``target``.

    S_W sums per-class centered outer products, S_B sums class-count-weighted
    outer products of (class mean - global mean), S_total centers on the
    global mean. Raises UnknownTargetError / EmptyClassError.
    """
    if target not in data.targets:
        raise UnknownTargetError(f"no target named {target!r}")
    x = data.features
    labels = data.targets[target]
    n, m = x.shape
    n_classes = data.n_classes(target)
    mu = x.mean(axis=0)
    s_w = np.zeros((m, m))
    s_b = np.zeros((m, m))
    class_means = np.zeros((n_classes, m))
    class_counts = np.zeros(n_classes, dtype=np.int64)
    for c in range(1, n_classes + 1):
        rows = x[labels == c]
        if rows.shape[0] == 0:
            raise EmptyClassError(f"target {target!r} class {c} has no samples")
        mu_c = rows.mean(axis=0)
        centered = rows - mu_c
        s_w += centered.T @ centered
        diff = mu_c - mu
        s_b += rows.shape[0] * np.outer(diff, diff)
        class_means[c - 1] = mu_c
        class_counts[c - 1] = rows.shape[0]
    centered = x - mu
    s_total = centered.T @ centered
    return ScatterSet(
        target=target,
        s_w=_sym(s_w),
        s_b=_sym(s_b),
        s_total=_sym(s_total),
        mean=mu,
        class_means=class_means,
        class_counts=class_counts,
    )
