"""Coarse-grained perturbation: K-dimensional subspace projections.

Six fitting routes share one model type: unsupervised PCA, seeded random
projection, and the scatter-pencil family. The pencils are

    dca        (S_BU,                    S_total_U + rho0 I)
    mdr        (S_BU,                    S_BP + rho0 I)
    jupa       (S_BU + rho1' S_WP,       S_WU + rho1 S_BP + rho0 I)
    jupa-multi (sum S_BU_i + sum rho'_i S_WP_i,
                sum S_WU_i + sum rho_i S_BP_i + rho0 I)

all solved as symmetric-definite generalized eigenproblems, keeping the
top-k principal eigenvectors as projection columns.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import linalg
from .dataset import LabeledDataset
from .errors import (
    DimensionMismatchError,
    EmptyPencilError,
    KTooLargeError,
    LengthMismatchError,
)
from .scatter import ScatterSet

MODEL_FORMAT = "ppdr-projection"
MODEL_VERSION = 1

DEFAULT_RHO0 = 0.001

METHODS = ("pca", "random", "dca", "mdr", "jupa", "jupa-multi")


@dataclass(frozen=True)
class ProjectionModel:
    """Fitted M x K projection with its method descriptor and parameters."""

    method: str
    w: np.ndarray
    params: dict
    train_mean: np.ndarray
    center: bool = True
    eigenvalues: np.ndarray = field(default=None, repr=False)

    @property
    def input_dim(self) -> int:
        return int(self.w.shape[0])

    @property
    def output_dim(self) -> int:
        return int(self.w.shape[1])


def _check_k(k: int, m: int):
    if not 1 <= k < m:
        raise KTooLargeError(f"k={k} must satisfy 1 <= k < {m}")


def _check_pencil_numerator(a: np.ndarray, scale: float):
    if np.linalg.norm(a, "fro") <= 1e-12 * max(1.0, scale):
        raise EmptyPencilError("pencil numerator is identically zero (no positive eigenvalue)")


def _pencil_model(method: str, a, b, k: int, params: dict, mean: np.ndarray) -> ProjectionModel:
    result = linalg.generalized_eig(a, b, k)
    return ProjectionModel(
        method=method,
        w=np.ascontiguousarray(result.eigenvectors),
        params=params,
        train_mean=np.asarray(mean, dtype=np.float64),
        eigenvalues=result.eigenvalues,
    )


def fit_pca(train: LabeledDataset, k: int) -> ProjectionModel:
    """Top-k eigenvectors of the centered covariance of the training features."""
    m = train.n_features
    _check_k(k, m)
    centered = train.features - train.features.mean(axis=0)
    cov = (centered.T @ centered) / max(train.n_rows - 1, 1)
    result = linalg.symmetric_eig(cov)
    return ProjectionModel(
        method="pca",
        w=np.ascontiguousarray(result.eigenvectors[:, :k]),
        params={"k": k},
        train_mean=train.features.mean(axis=0),
        eigenvalues=result.eigenvalues[:k],
    )


def fit_random(m: int, k: int, seed: int) -> ProjectionModel:
    """Seeded Gaussian matrix with orthonormalized columns; mean is zero."""
    _check_k(k, m)
    g = np.random.default_rng(seed).standard_normal((m, k))
    return ProjectionModel(
        method="random",
        w=linalg.orthonormal_basis(g),
        params={"k": k, "seed": int(seed)},
        train_mean=np.zeros(m),
    )


def fit_dca(scatter_u: ScatterSet, k: int, rho0: float = DEFAULT_RHO0) -> ProjectionModel:
    """Utility-driven projection: pencil (S_BU, S_total_U + rho0 I)."""
    m = scatter_u.dim
    _check_k(k, m)
    if not rho0 > 0:
        raise ValueError("rho0 must be positive")
    _check_pencil_numerator(scatter_u.s_b, np.linalg.norm(scatter_u.s_total, "fro"))
    b = scatter_u.s_total + rho0 * np.eye(m)
    return _pencil_model("dca", scatter_u.s_b, b, k, {"k": k, "rho0": rho0}, scatter_u.mean)


def fit_mdr(scatter_u: ScatterSet, scatter_p: ScatterSet, k: int, rho0: float = DEFAULT_RHO0) -> ProjectionModel:
    """Privacy-emphasized projection: pencil (S_BU, S_BP + rho0 I)."""
    m = scatter_u.dim
    if scatter_p.dim != m:
        raise DimensionMismatchError("utility and privacy scatters differ in size")
    _check_k(k, m)
    if not rho0 > 0:
        raise ValueError("rho0 must be positive")
    _check_pencil_numerator(scatter_u.s_b, np.linalg.norm(scatter_u.s_total, "fro"))
    b = scatter_p.s_b + rho0 * np.eye(m)
    return _pencil_model("mdr", scatter_u.s_b, b, k, {"k": k, "rho0": rho0}, scatter_u.mean)


def fit_jupa(
    scatter_u: ScatterSet,
    scatter_p: ScatterSet,
    k: int,
    rho0: float = DEFAULT_RHO0,
    rho1: float = 1.0,
    rho1p: float = 1.0,
) -> ProjectionModel:
    """Joint utility/privacy projection: pencil
    (S_BU + rho1' S_WP, S_WU + rho1 S_BP + rho0 I)."""
    m = scatter_u.dim
    if scatter_p.dim != m:
        raise DimensionMismatchError("utility and privacy scatters differ in size")
    _check_k(k, m)
    if not rho0 > 0:
        raise ValueError("rho0 must be positive")
    if rho1 < 0 or rho1p < 0:
        raise ValueError("rho1 and rho1p must be non-negative")
    a = scatter_u.s_b + rho1p * scatter_p.s_w
    b = scatter_u.s_w + rho1 * scatter_p.s_b + rho0 * np.eye(m)
    _check_pencil_numerator(a, np.linalg.norm(scatter_u.s_total, "fro"))
    params = {"k": k, "rho0": rho0, "rho1": rho1, "rho1p": rho1p}
    return _pencil_model("jupa", a, b, k, params, scatter_u.mean)


def fit_jupa_multi(
    scatters_u,
    scatters_p,
    k: int,
    rho0: float = DEFAULT_RHO0,
    rho_list=(1.0,),
    rhop_list=(1.0,),
) -> ProjectionModel:
    """Multi-target joint projection; single-element lists reduce to fit_jupa."""
    scatters_u = list(scatters_u)
    scatters_p = list(scatters_p)
    rho_list = list(rho_list)
    rhop_list = list(rhop_list)
    if not scatters_u or not scatters_p:
        raise LengthMismatchError("scatter lists must be non-empty")
    if len(rho_list) != len(scatters_p) or len(rhop_list) != len(scatters_p):
        raise LengthMismatchError(
            f"parameter lists ({len(rho_list)}, {len(rhop_list)}) must match "
            f"privacy scatter count {len(scatters_p)}"
        )
    m = scatters_u[0].dim
    for s in scatters_u + scatters_p:
        if s.dim != m:
            raise DimensionMismatchError("all scatters must share the feature dimension")
    _check_k(k, m)
    if not rho0 > 0:
        raise ValueError("rho0 must be positive")
    a = sum(s.s_b for s in scatters_u)
    a = a + sum(r * s.s_w for r, s in zip(rhop_list, scatters_p))
    b = sum(s.s_w for s in scatters_u)
    b = b + sum(r * s.s_b for r, s in zip(rho_list, scatters_p)) + rho0 * np.eye(m)
    scale = np.linalg.norm(sum(s.s_total for s in scatters_u), "fro")
    _check_pencil_numerator(a, scale)
    params = {
        "k": k,
        "rho0": rho0,
        "rho1": [float(r) for r in rho_list],
        "rho1p": [float(r) for r in rhop_list],
    }
    return _pencil_model("jupa-multi", a, b, k, params, scatters_u[0].mean)


def project(model: ProjectionModel, x) -> np.ndarray:
    """Row-wise projection (x - training mean) @ W; accepts a vector or a matrix."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[1] != model.input_dim:
        raise DimensionMismatchError(f"expected {model.input_dim} features, got {x.shape[1]}")
    shifted = x - model.train_mean if model.center else x
    out = shifted @ model.w
    return out[0] if single else out


def save_model(model: ProjectionModel, path):
    """Versioned JSON serialization; floats go through repr so round-trips are bit-exact."""
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "method": model.method,
        "params": model.params,
        "center": model.center,
        "train_mean": model.train_mean.tolist(),
        "w": model.w.tolist(),
        "eigenvalues": None if model.eigenvalues is None else np.asarray(model.eigenvalues).tolist(),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> ProjectionModel:
    path = Path(path)
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FORMAT or doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported projection model document at {path}")
    eigenvalues = doc.get("eigenvalues")
    return ProjectionModel(
        method=doc["method"],
        w=np.asarray(doc["w"], dtype=np.float64),
        params=doc["params"],
        train_mean=np.asarray(doc["train_mean"], dtype=np.float64),
        center=bool(doc["center"]),
        eigenvalues=None if eigenvalues is None else np.asarray(eigenvalues, dtype=np.float64),
    )
