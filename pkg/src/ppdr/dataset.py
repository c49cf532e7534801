"""Dataset ingestion, binary encoding, balanced three-way splits and archive IO.

CSV files are read against an explicit column schema (numeric / categorical /
label). Categorical columns are binary-encoded: a column with c observed
categories becomes ceil(log2 c) 0/1 columns, category codes assigned in
lexicographic order. Label columns become classification targets with
contiguous class indices 1..L.

A prepared dataset is stored as a small archive directory:

    dataset.json    metadata (format version, targets, class names,
                    feature names, split row counts, standardization stats)
    training.npy    float64 matrix, one row per sample
    testing.npy     columns = features, then one class-index column
    adversary.npy   per target, in the order listed in dataset.json

The layout is versioned via the "format"/"version" keys in dataset.json.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    EmptyAfterDroppingError,
    InsufficientSamplesError,
    SchemaMismatchError,
    SingleCategoryColumnError,
)

ARCHIVE_FORMAT = "ppdr-dataset"
ARCHIVE_VERSION = 1

SPLIT_ROLES = ("training", "testing", "adversary")

COLUMN_KINDS = ("numeric", "categorical", "label")

DEFAULT_MISSING = ("", "?")


@dataclass(frozen=True)
class Column:
    """One schema entry: column name, kind, and the tokens treated as missing."""

    name: str
    kind: str
    missing: tuple = DEFAULT_MISSING

    def __post_init__(self):
        if self.kind not in COLUMN_KINDS:
            raise SchemaMismatchError(f"unknown column kind {self.kind!r} for {self.name!r}")


@dataclass(frozen=True)
class RawTable:
    """Column-major string table straight from CSV, missing rows already dropped."""

    columns: tuple
    values: dict
    n_rows: int
    dropped: int


@dataclass(frozen=True)
class LabeledDataset:
    """Feature matrix with one or more named classification targets.

    Class indices are contiguous 1..L per target. ``split_role`` is "source"
    for unsplit data and one of training/testing/adversary afterwards.
    """

    features: np.ndarray
    targets: dict
    split_role: str = "source"
    feature_names: tuple = ()
    target_classes: dict = field(default_factory=dict)

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        object.__setattr__(self, "features", feats)
        if feats.ndim != 2:
            raise SchemaMismatchError("features must be a 2-D matrix")
        if not np.all(np.isfinite(feats)):
            raise SchemaMismatchError("features contain non-finite values")
        object.__setattr__(
            self, "targets", {k: np.asarray(v, dtype=np.int64) for k, v in self.targets.items()}
        )
        for name, labels in self.targets.items():
            if labels.shape != (feats.shape[0],):
                raise SchemaMismatchError(f"target {name!r} does not label every row")
            present = np.unique(labels)
            if present.size and (present[0] != 1 or present[-1] != present.size):
                raise SchemaMismatchError(
                    f"target {name!r} classes are not contiguous 1..L: {present.tolist()}"
                )

    @property
    def n_rows(self) -> int:
        return int(self.features.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.features.shape[1])

    def n_classes(self, target: str) -> int:
        return int(np.max(self.targets[target])) if self.n_rows else 0

    def subset(self, rows, split_role: str) -> "LabeledDataset":
        rows = np.asarray(rows, dtype=np.int64)
        return LabeledDataset(
            features=self.features[rows].copy(),
            targets={k: v[rows].copy() for k, v in self.targets.items()},
            split_role=split_role,
            feature_names=self.feature_names,
            target_classes=self.target_classes,
        )


@dataclass(frozen=True)
class SplitSpec:
    """Balanced-split sizes: per-combination pool and the three split totals."""

    per_combination: int
    training: int
    testing: int
    adversary: int
    seed: int = 0

    def validate(self, n_combinations: int):
        total = self.training + self.testing + self.adversary
        if total != self.per_combination * n_combinations:
            raise InsufficientSamplesError(
                f"split totals {total} != per_combination {self.per_combination} "
                f"x {n_combinations} combinations"
            )
        for name in ("training", "testing", "adversary"):
            if getattr(self, name) % n_combinations != 0:
                raise InsufficientSamplesError(
                    f"{name} count {getattr(self, name)} not divisible "
                    f"by {n_combinations} combinations"
                )


def load_csv(path, schema) -> RawTable:
    """Read a CSV with header row against ``schema`` (a sequence of Column).

    Rows containing a missing token in any column are dropped and counted.
    Raises FileNotFoundError, SchemaMismatchError (header or cell-type
    mismatch) or EmptyAfterDroppingError.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    schema = tuple(schema)
    names = [c.name for c in schema]
    values = {c.name: [] for c in schema}
    dropped = 0
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatchError(f"{path} is empty") from None
        if header != names:
            raise SchemaMismatchError(f"header {header} does not match schema columns {names}")
        for line_no, row in enumerate(reader, start=2):
            if len(row) != len(schema):
                raise SchemaMismatchError(f"{path}:{line_no}: expected {len(schema)} fields, got {len(row)}")
            if any(cell.strip() in col.missing for cell, col in zip(row, schema)):
                dropped += 1
                continue
            for cell, col in zip(row, schema):
                cell = cell.strip()
                if col.kind == "numeric":
                    try:
                        float(cell)
                    except ValueError:
                        raise SchemaMismatchError(
                            f"{path}:{line_no}: column {col.name!r} is numeric but got {cell!r}"
                        ) from None
                values[col.name].append(cell)
    n_rows = len(values[names[0]]) if names else 0
    if n_rows == 0:
        raise EmptyAfterDroppingError(f"{path}: no rows left after dropping {dropped} incomplete rows")
    return RawTable(columns=schema, values=values, n_rows=n_rows, dropped=dropped)


def binary_encode(table: RawTable) -> LabeledDataset:
    """Turn a raw table into numeric features plus targets.

    Numeric columns pass through; a categorical column with c categories
    becomes ceil(log2 c) binary columns (codes in lexicographic category
    order, most significant bit first); label columns become targets with
    classes 1..L in lexicographic order.
    """
    feature_cols = []
    feature_names = []
    targets = {}
    target_classes = {}
    for col in table.columns:
        raw = table.values[col.name]
        if col.kind == "numeric":
            feature_cols.append(np.asarray([float(v) for v in raw]))
            feature_names.append(col.name)
        elif col.kind == "categorical":
            cats = sorted(set(raw))
            if len(cats) < 2:
                raise SingleCategoryColumnError(f"column {col.name!r} has a single observed category")
            code_of = {c: i for i, c in enumerate(cats)}
            width = math.ceil(math.log2(len(cats)))
            codes = np.asarray([code_of[v] for v in raw], dtype=np.int64)
            for bit in range(width - 1, -1, -1):
                feature_cols.append(((codes >> bit) & 1).astype(np.float64))
                feature_names.append(f"{col.name}#b{bit}")
        else:
            cats = sorted(set(raw))
            code_of = {c: i + 1 for i, c in enumerate(cats)}
            targets[col.name] = np.asarray([code_of[v] for v in raw], dtype=np.int64)
            target_classes[col.name] = tuple(cats)
    features = np.column_stack(feature_cols) if feature_cols else np.empty((table.n_rows, 0))
    return LabeledDataset(
        features=features,
        targets=targets,
        split_role="source",
        feature_names=tuple(feature_names),
        target_classes=target_classes,
    )


def balanced_sample(data: LabeledDataset, utility_target: str, privacy_target: str, spec: SplitSpec):
    """Equal-count (utility, privacy) combinations in each of the three splits.

    Each combination's pool is shuffled once under the seed and sliced
    contiguously into training | testing | adversary. Returns the three
    datasets; raises InsufficientSamplesError naming any deficient combination.
    """
    for t in (utility_target, privacy_target):
        if t not in data.targets:
            raise InsufficientSamplesError(f"unknown target {t!r}")
    u = data.targets[utility_target]
    p = data.targets[privacy_target]
    combos = sorted({(int(a), int(b)) for a, b in zip(u, p)})
    n_combos = len(combos)
    spec.validate(n_combos)
    per = {
        "training": spec.training // n_combos,
        "testing": spec.testing // n_combos,
        "adversary": spec.adversary // n_combos,
    }
    rng = np.random.default_rng(spec.seed)
    picks = {role: [] for role in SPLIT_ROLES}
    for uc, pc in combos:
        pool = np.flatnonzero((u == uc) & (p == pc))
        if pool.size < spec.per_combination:
            raise InsufficientSamplesError(
                f"combination ({utility_target}={uc}, {privacy_target}={pc}) has "
                f"{pool.size} samples, needs {spec.per_combination}"
            )
        pool = pool[rng.permutation(pool.size)][: spec.per_combination]
        a = per["training"]
        b = a + per["testing"]
        picks["training"].append(pool[:a])
        picks["testing"].append(pool[a:b])
        picks["adversary"].append(pool[b:])
    out = []
    for role in SPLIT_ROLES:
        rows = np.sort(np.concatenate(picks[role]))
        out.append(data.subset(rows, role))
    return tuple(out)


def standardize_splits(training: LabeledDataset, *others):
    """Z-score every split with the training split's per-feature mean and std.

    Constant features keep std 1 so they map to zero. Returns the new splits
    plus the (mean, std) used, for the archive metadata.
    """
    mu = training.features.mean(axis=0)
    sd = training.features.std(axis=0)
    sd = np.where(sd < 1e-12, 1.0, sd)

    def apply(ds: LabeledDataset) -> LabeledDataset:
        return LabeledDataset(
            features=(ds.features - mu) / sd,
            targets=dict(ds.targets),
            split_role=ds.split_role,
            feature_names=ds.feature_names,
            target_classes=ds.target_classes,
        )

    return tuple(apply(d) for d in (training, *others)) + (mu, sd)


def write_archive(directory, dataset_id: str, splits: dict, seed: int, standardization=None) -> Path:
    """Write the versioned archive (metadata + one matrix per split)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    any_split = next(iter(splits.values()))
    target_names = sorted(any_split.targets)
    meta = {
        "format": ARCHIVE_FORMAT,
        "version": ARCHIVE_VERSION,
        "dataset": dataset_id,
        "seed": seed,
        "feature_count": any_split.n_features,
        "feature_names": list(any_split.feature_names),
        "matrix_layout": "feature columns first, then one class-index column per target (listed order)",
        "targets": {
            name: {"classes": list(any_split.target_classes.get(name, ()))} for name in target_names
        },
        "splits": {},
        "standardization": None,
    }
    if standardization is not None:
        mu, sd = standardization
        meta["standardization"] = {"mean": list(map(float, mu)), "std": list(map(float, sd))}
    for role, ds in splits.items():
        matrix = np.hstack(
            [ds.features] + [ds.targets[name][:, None].astype(np.float64) for name in target_names]
        )
        np.save(directory / f"{role}.npy", matrix)
        meta["splits"][role] = {"rows": ds.n_rows, "file": f"{role}.npy"}
    with open(directory / "dataset.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return directory


def read_archive(directory) -> tuple:
    """Load an archive written by write_archive; returns (splits dict, metadata)."""
    directory = Path(directory)
    meta_path = directory / "dataset.json"
    if not meta_path.exists():
        raise FileNotFoundError(f"no archive metadata at {meta_path}")
    with open(meta_path) as fh:
        meta = json.load(fh)
    if meta.get("format") != ARCHIVE_FORMAT or meta.get("version") != ARCHIVE_VERSION:
        raise SchemaMismatchError(f"unsupported archive format in {meta_path}")
    target_names = sorted(meta["targets"])
    m = meta["feature_count"]
    splits = {}
    for role, info in meta["splits"].items():
        matrix = np.load(directory / info["file"])
        targets = {
            name: matrix[:, m + i].astype(np.int64) for i, name in enumerate(target_names)
        }
        splits[role] = LabeledDataset(
            features=matrix[:, :m].copy(),
            targets=targets,
            split_role=role,
            feature_names=tuple(meta["feature_names"]),
            target_classes={k: tuple(v["classes"]) for k, v in meta["targets"].items()},
        )
    return splits, meta
