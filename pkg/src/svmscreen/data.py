"""Sparse classification data: container, text parser, feature statistics.

The on-disk format is the usual sparse text layout, one sample per line::

    <label> <index>:<value> <index>:<value> ...

with 1-based, strictly increasing indices and labels mapped to +/-1
(positive values to +1, everything else to -1).  Lines starting with ``#``
are comments.  In-memory the design matrix is stored by columns
(compressed sparse column arrays) because every downstream computation is
feature-wise.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels


class DataFormatError(ValueError):
    """Input text cannot be parsed into a dataset."""


@dataclass(frozen=True)
class Dataset:
    """Immutable n_samples x n_features design matrix with +/-1 labels.

    Columns are stored in CSC form: column j occupies the half-open slice
    ``col_ptr[j]:col_ptr[j+1]`` of ``row_idx``/``values``, with row indices
    strictly increasing inside each column.
    """

    n_samples: int
    n_features: int
    col_ptr: np.ndarray
    row_idx: np.ndarray
    values: np.ndarray
    labels: np.ndarray
    n_pos: int = field(default=-1)
    n_neg: int = field(default=-1)

    def __post_init__(self):
        object.__setattr__(self, "col_ptr", np.ascontiguousarray(self.col_ptr, dtype=np.int64))
        object.__setattr__(self, "row_idx", np.ascontiguousarray(self.row_idx, dtype=np.int64))
        object.__setattr__(self, "values", np.ascontiguousarray(self.values, dtype=np.float64))
        object.__setattr__(self, "labels", np.ascontiguousarray(self.labels, dtype=np.float64))
        if self.n_pos < 0:
            object.__setattr__(self, "n_pos", int((self.labels > 0).sum()))
        if self.n_neg < 0:
            object.__setattr__(self, "n_neg", int((self.labels < 0).sum()))
        self._validate()

    def _validate(self):
        if self.n_samples < 1:
            raise ValueError("need at least one sample")
        if self.n_features < 1:
            raise ValueError("need at least one feature")
        if self.labels.shape != (self.n_samples,):
            raise ValueError("labels length does not match n_samples")
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise ValueError("labels must be exactly -1 or +1")
        if self.n_pos + self.n_neg != self.n_samples:
            raise ValueError("n_pos + n_neg must equal n_samples")
        if self.col_ptr.shape != (self.n_features + 1,):
            raise ValueError("col_ptr length must be n_features + 1")
        if self.col_ptr[0] != 0 or self.col_ptr[-1] != self.row_idx.shape[0]:
            raise ValueError("col_ptr must start at 0 and end at nnz")
        if np.any(np.diff(self.col_ptr) < 0):
            raise ValueError("col_ptr must be nondecreasing")
        if self.values.shape != self.row_idx.shape:
            raise ValueError("row_idx and values must have equal length")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature values must be finite")
        nnz = self.row_idx.shape[0]
        if nnz:
            if self.row_idx.min() < 0 or self.row_idx.max() >= self.n_samples:
                raise ValueError("row indices out of range")
            # Strictly increasing inside each column: a non-positive step is
            # only allowed where a new column starts.
            col_start = np.zeros(nnz, dtype=bool)
            starts = self.col_ptr[1:-1]
            col_start[starts[starts < nnz]] = True
            bad = (np.diff(self.row_idx) <= 0) & ~col_start[1:]
            if np.any(bad):
                raise ValueError("row indices must be strictly increasing within a column")

    @classmethod
    def from_columns(cls, columns, labels, n_samples=None):
        """Build from a sequence of (row_indices, values) pairs, one per feature."""
        labels = np.asarray(labels, dtype=np.float64)
        if n_samples is None:
            n_samples = labels.shape[0]
        col_ptr = np.zeros(len(columns) + 1, dtype=np.int64)
        idx_parts = []
        val_parts = []
        for j, (idx, vals) in enumerate(columns):
            idx = np.asarray(idx, dtype=np.int64)
            col_ptr[j + 1] = col_ptr[j] + idx.shape[0]
            idx_parts.append(idx)
            val_parts.append(np.asarray(vals, dtype=np.float64))
        row_idx = np.concatenate(idx_parts) if idx_parts else np.zeros(0, dtype=np.int64)
        values = np.concatenate(val_parts) if val_parts else np.zeros(0)
        return cls(n_samples, len(columns), col_ptr, row_idx, values, labels)

    @classmethod
    def from_dense(cls, matrix, labels):
        """Build from a dense n x m array, keeping exact nonzeros as entries.

        Labels are mapped like the text parser: positive to +1, the rest
        to -1.
        """
        matrix = np.asarray(matrix, dtype=np.float64)
        labels = np.where(np.asarray(labels, dtype=np.float64) > 0, 1.0, -1.0)
        cols = []
        for j in range(matrix.shape[1]):
            idx = np.flatnonzero(matrix[:, j] != 0.0)
            cols.append((idx, matrix[idx, j]))
        return cls.from_columns(cols, labels, n_samples=matrix.shape[0])

    def column(self, j):
        """Row indices and values of feature j as array views."""
        lo, hi = self.col_ptr[j], self.col_ptr[j + 1]
        return self.row_idx[lo:hi], self.values[lo:hi]

    def subset(self, feature_indices):
        """New Dataset restricted to the given features, order preserved."""
        feature_indices = np.asarray(feature_indices, dtype=np.int64)
        cols = [self.column(j) for j in feature_indices]
        return Dataset.from_columns(cols, self.labels, n_samples=self.n_samples)

    def to_dense(self):
        """Densify; intended for small diagnostic problems only."""
        out = np.zeros((self.n_samples, self.n_features))
        for j in range(self.n_features):
            idx, vals = self.column(j)
            out[idx, j] = vals
        return out


@dataclass(frozen=True)
class FeatureStats:
    """Per-feature statistics of fhat_j = labels * f_j, as parallel arrays.

    ``proj_y_norm`` is the norm of fhat_j projected off the label vector;
    it satisfies proj_y_norm^2 = sq_norm - dot_y^2 / n because y'y = n.
    """

    dot_y: np.ndarray  # fhat_j' y
    dot_one: np.ndarray  # fhat_j' 1
    sq_norm: np.ndarray  # ||fhat_j||^2
    proj_y_norm: np.ndarray  # ||P_y(fhat_j)||


def compute_feature_stats(dataset):
    """One O(nnz) pass producing the FeatureStats table for all features."""
    dot_y, dot_one, sq_norm, proj_y_norm = kernels.feature_stats(
        dataset.col_ptr, dataset.row_idx, dataset.values, dataset.labels
    )
    return FeatureStats(dot_y, dot_one, sq_norm, proj_y_norm)


def parse_sparse_text(text, strict_labels=False):
    """Parse sparse classification text into a Dataset.

    Parameters
    ----------
    text : str
        One ``<label> <idx>:<val> ...`` record per line; ``#`` lines and
        blank lines are skipped; both LF and CRLF line ends are accepted.
    strict_labels : bool
        When true, label tokens must literally be +1 or -1 instead of
        being mapped by sign.

    Returns
    -------
    Dataset with n_features equal to the largest index seen.
    """
    labels = []
    rows = []
    max_index = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        try:
            label_value = float(tokens[0])
        except ValueError:
            raise DataFormatError(f"line {lineno}: bad label token {tokens[0]!r}") from None
        if strict_labels and label_value not in (1.0, -1.0):
            raise DataFormatError(f"line {lineno}: label must be +1 or -1, got {tokens[0]}")
        label = 1.0 if label_value > 0 else -1.0
        indices = []
        values = []
        previous = 0
        for token in tokens[1:]:
            head, sep, tail = token.partition(":")
            if not sep:
                raise DataFormatError(f"line {lineno}: expected index:value, got {token!r}")
            try:
                index = int(head)
                value = float(tail)
            except ValueError:
                raise DataFormatError(f"line {lineno}: expected index:value, got {token!r}") from None
            if index < 1:
                raise DataFormatError(f"line {lineno}: indices are 1-based, got {index}")
            if index <= previous:
                raise DataFormatError(f"line {lineno}: index {index} is not increasing")
            indices.append(index - 1)
            values.append(value)
            previous = index
        labels.append(label)
        rows.append((indices, values))
        max_index = max(max_index, previous)
    if not labels:
        raise DataFormatError("no data lines found")
    if max_index == 0:
        raise DataFormatError("no features present in any line")

    n = len(labels)
    m = max_index
    counts = np.zeros(m, dtype=np.int64)
    for indices, _ in rows:
        for j in indices:
            counts[j] += 1
    col_ptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(counts, out=col_ptr[1:])
    row_idx = np.empty(col_ptr[-1], dtype=np.int64)
    vals = np.empty(col_ptr[-1])
    cursor = col_ptr[:-1].copy()
    for i, (indices, values) in enumerate(rows):
        for j, v in zip(indices, values):
            k = cursor[j]
            row_idx[k] = i
            vals[k] = v
            cursor[j] += 1
    return Dataset(n, m, col_ptr, row_idx, vals, np.array(labels))


def serialize_sparse_text(dataset):
    """Render a Dataset back to canonical sparse text.

    Values are written with shortest round-trip formatting, so
    parse(serialize(d)) reproduces d exactly.
    """
    per_row = [[] for _ in range(dataset.n_samples)]
    for j in range(dataset.n_features):
        idx, vals = dataset.column(j)
        for i, v in zip(idx, vals):
            per_row[i].append(f"{j + 1}:{float(v)!r}")
    lines = []
    for i in range(dataset.n_samples):
        head = "+1" if dataset.labels[i] > 0 else "-1"
        lines.append(" ".join([head] + per_row[i]))
    return "\n".join(lines) + "\n"


def read_sparse_file(path, strict_labels=False):
    """Parse a sparse text file from disk (UTF-8)."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_sparse_text(handle.read(), strict_labels=strict_labels)
