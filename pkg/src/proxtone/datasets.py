"""Dataset loading (LIBSVM text), synthetic problem generators, mini-batch partitioning."""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np


@dataclass
class LabeledDataset:
    """Binary classification data: dense feature rows and +/-1 labels."""

    features: np.ndarray  # (m, p)
    labels: np.ndarray  # (m,), values in {+1, -1}

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=float)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D array")
        if len(self.labels) != self.features.shape[0]:
            raise ValueError("label count does not match sample count")
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise ValueError("labels must be +1 or -1")

    @property
    def p(self):
        return self.features.shape[1]

    @property
    def sample_count(self):
        return self.features.shape[0]


@dataclass
class MulticlassDataset:
    """Dense features with integer class labels in 0..classes-1 (MLP objective input)."""

    features: np.ndarray  # (m, d)
    labels: np.ndarray  # (m,) ints
    classes: int

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.labels.min() < 0 or self.labels.max() >= self.classes:
            raise ValueError("labels out of range")

    @property
    def p(self):
        return self.features.shape[1]

    @property
    def sample_count(self):
        return self.features.shape[0]


@dataclass
class MiniBatchPartition:
    """Disjoint cover of sample indices; batch sizes differ by at most one."""

    batch_assignments: list = field(default_factory=list)

    @property
    def n(self):
        return len(self.batch_assignments)


def load_libsvm(path, label_map=None):
    """Parse a LIBSVM-format text file into a dense LabeledDataset.

    label_map translates raw numeric labels to +/-1 (e.g. {2: -1, 1: 1} for
    covertype). Duplicate feature indices on a line: last wins, with a warning.
    """
    rows = []
    labels = []
    max_index = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split()
            try:
                raw_label = float(tokens[0])
            except ValueError:
                raise ValueError(f"line {lineno}: malformed label {tokens[0]!r}")
            if label_map is not None:
                if raw_label not in label_map:
                    raise ValueError(f"line {lineno}: label {raw_label} not in label map")
                label = label_map[raw_label]
            else:
                label = raw_label
            if label not in (-1, 1):
                raise ValueError(f"line {lineno}: label {label} is not +1/-1")
            row = {}
            for tok in tokens[1:]:
                try:
                    idx_s, val_s = tok.split(":", 1)
                    idx = int(idx_s)
                    val = float(val_s)
                except ValueError:
                    raise ValueError(f"line {lineno}: malformed feature token {tok!r}")
                if idx <= 0:
                    raise ValueError(f"line {lineno}: feature index {idx} must be positive")
                if idx in row:
                    warnings.warn(f"line {lineno}: duplicate feature index {idx}, last value wins")
                row[idx] = val
                max_index = max(max_index, idx)
            rows.append(row)
            labels.append(label)
    if not rows:
        raise ValueError("no samples in file")
    features = np.zeros((len(rows), max_index))
    for i, row in enumerate(rows):
        for idx, val in row.items():
            features[i, idx - 1] = val
    return LabeledDataset(features, np.asarray(labels, dtype=float))


def write_libsvm(dataset, path):
    """Write a LabeledDataset back to LIBSVM text (full float precision, 1-based indices)."""
    with open(path, "w") as fh:
        for row, label in zip(dataset.features, dataset.labels):
            parts = ["+1" if label > 0 else "-1"]
            for j in np.flatnonzero(row):
                parts.append(f"{j + 1}:{float(row[j])!r}")
            fh.write(" ".join(parts) + "\n")


def synth_logistic(p, m, sparsity, seed):
    """Synthetic sparse logistic problem: normal features, labels from the sign
    of a sparse ground-truth logit, flipped with probability 0.05."""
    if p < 1 or m < 1:
        raise ValueError("p and m must be >= 1")
    if not 0 < sparsity <= 1:
        raise ValueError("sparsity must be in (0, 1]")
    rng = np.random.default_rng(seed)
    k = math.ceil(sparsity * p)
    truth = np.zeros(p)
    support = rng.choice(p, size=k, replace=False)
    truth[support] = rng.standard_normal(k)
    features = rng.standard_normal((m, p))
    logits = features @ truth
    labels = np.where(logits >= 0, 1.0, -1.0)
    flips = rng.random(m) < 0.05
    labels[flips] *= -1
    return LabeledDataset(features, labels)


def synth_multiclass(d, m, classes, seed, spread=1.0, noise=1.5):
    """Gaussian class clusters around random prototypes (MLP training data)."""
    rng = np.random.default_rng(seed)
    prototypes = rng.standard_normal((classes, d)) * spread
    labels = rng.integers(classes, size=m)
    features = prototypes[labels] + rng.standard_normal((m, d)) * noise
    return MulticlassDataset(features, labels, classes)


def partition(dataset, n, seed):
    """Seeded shuffle then round-robin deal into n nonempty batches."""
    m = dataset.sample_count
    if not 1 <= n <= m:
        raise ValueError(f"batch count {n} must be in [1, {m}]")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(m)
    batches = [perm[i::n].copy() for i in range(n)]
    return MiniBatchPartition(batches)
