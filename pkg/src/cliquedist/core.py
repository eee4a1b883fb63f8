"""Shared domain types, validation, and file ingestion.

All types are immutable after construction and safe to share across
worker threads. Distance matrices are stored as full square arrays
(both triangles); the unordered-edge view is always derived, never stored.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    AsymmetricMatrix,
    CorpusError,
    DuplicateLabel,
    LabelMismatch,
    MalformedEmbedding,
    MalformedMatrix,
    MalformedTable,
    NegativeDistance,
    NonzeroDiagonal,
)

SYMMETRY_TOL = 1e-12
FLOAT_FMT = "%.17g"  # round-trips float64 exactly


def _check_unique(labels, what="label"):
    seen = set()
    for lab in labels:
        if lab in seen:
            raise DuplicateLabel(f"duplicate {what}: {lab!r}")
        seen.add(lab)


@dataclass(frozen=True)
class LabeledDistanceMatrix:
    """Symmetric nonnegative distances over a fixed ordered label set."""

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        _check_unique(labels)
        if not labels:
            raise MalformedMatrix("matrix needs at least one label")
        values = np.array(self.values, dtype=float)
        n = len(labels)
        if values.shape != (n, n):
            raise MalformedMatrix(
                f"expected {n}x{n} values for {n} labels, got {values.shape}")
        if not np.isfinite(values).all():
            raise MalformedMatrix("matrix contains NaN or infinite entries")
        if (values < 0).any():
            i, j = np.argwhere(values < 0)[0]
            raise NegativeDistance(
                f"negative distance at ({labels[i]}, {labels[j]}): {values[i, j]}")
        if (np.diag(values) != 0).any():
            i = int(np.argwhere(np.diag(values) != 0)[0, 0])
            raise NonzeroDiagonal(f"nonzero self-distance for {labels[i]}")
        asym = np.abs(values - values.T)
        if asym.max() > SYMMETRY_TOL:
            i, j = np.unravel_index(int(asym.argmax()), asym.shape)
            raise AsymmetricMatrix(
                f"asymmetry {asym[i, j]:.3g} at ({labels[i]}, {labels[j]}) "
                f"exceeds {SYMMETRY_TOL}")
        values.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def aligned_to(self, labels) -> "LabeledDistanceMatrix":
        """Reorder rows/columns to match another label ordering by name."""
        labels = tuple(labels)
        if set(labels) != set(self.labels) or len(labels) != self.n:
            raise LabelMismatch(
                f"label sets differ: {sorted(self.labels)} vs {sorted(labels)}")
        idx = np.array([self.labels.index(lab) for lab in labels])
        return LabeledDistanceMatrix(labels, self.values[np.ix_(idx, idx)])


@dataclass(frozen=True)
class FeatureTable:
    """Per-label categorical feature assignments; tokens are opaque strings."""

    labels: tuple[str, ...]
    feature_names: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]  # rows[i][k] = token of labels[i], feature k

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        _check_unique(self.labels)
        _check_unique(self.feature_names, "feature name")
        if not self.labels or not self.feature_names:
            raise MalformedTable("feature table needs at least one row and one feature")
        k = len(self.feature_names)
        for lab, row in zip(self.labels, self.rows):
            if len(row) != k:
                raise MalformedTable(f"row {lab!r} has {len(row)} cells, expected {k}")
            if any(tok == "" for tok in row):
                raise MalformedTable(f"row {lab!r} has an empty cell")
        if len(self.rows) != len(self.labels):
            raise MalformedTable("row count does not match label count")

    def cell(self, label: str, feature: str) -> str:
        return self.rows[self.labels.index(label)][self.feature_names.index(feature)]


@dataclass(frozen=True)
class ConceptTag:
    """A concept identifier with its semantic-type code."""

    cui: str
    semtype: str

    def __post_init__(self):
        if not self.cui:
            raise ValueError("cui must be nonempty")


@dataclass(frozen=True)
class Sentence:
    text: str
    tokens: tuple[str, ...]
    concepts: frozenset[ConceptTag] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "concepts", frozenset(self.concepts))

    def cuis(self) -> frozenset[str]:
        return frozenset(t.cui for t in self.concepts)


@dataclass(frozen=True)
class Document:
    id: str
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if not self.id:
            raise CorpusError("document id must be nonempty")
        if not self.sentences:
            raise CorpusError(f"document {self.id!r} has no sentences")

    def tokens(self) -> list[str]:
        out = []
        for s in self.sentences:
            out.extend(s.tokens)
        return out


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        _check_unique((d.id for d in self.documents), "document id")

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.documents)

    def document(self, doc_id: str) -> Document:
        for d in self.documents:
            if d.id == doc_id:
                return d
        raise KeyError(doc_id)


class EmbeddingStore:
    """word -> dense vector mapping with a fixed dimension."""

    def __init__(self, dimension: int, vectors: dict[str, np.ndarray]):
        if dimension < 1:
            raise MalformedEmbedding(f"dimension must be positive, got {dimension}")
        self.dimension = int(dimension)
        self._vectors = {}
        for word, vec in vectors.items():
            v = np.asarray(vec, dtype=float)
            if v.shape != (self.dimension,):
                raise MalformedEmbedding(
                    f"vector for {word!r} has length {v.shape}, expected {dimension}")
            if not np.isfinite(v).all():
                raise MalformedEmbedding(f"vector for {word!r} is not finite")
            v.setflags(write=False)
            self._vectors[word] = v

    def __contains__(self, word: str) -> bool:
        return word in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def vector(self, word: str) -> np.ndarray:
        return self._vectors[word]

    def get(self, word: str):
        return self._vectors.get(word)


# -- file ingestion -----------------------------------------------------------


def load_feature_table(path) -> FeatureTable:
    """Read a `label,<f1>,...,<fK>` CSV into a FeatureTable (file order kept)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise MalformedTable(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    if len(header) < 2:
        raise MalformedTable(f"{path}: header has no feature columns")
    features = tuple(header[1:])
    labels, cells = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        row = [c.strip() for c in row]
        if len(row) != len(header):
            raise MalformedTable(
                f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        labels.append(row[0])
        cells.append(tuple(row[1:]))
    if not labels:
        raise MalformedTable(f"{path}: no data rows")
    return FeatureTable(tuple(labels), features, tuple(cells))


def load_embeddings(path) -> EmbeddingStore:
    """Read a word2vec-text file: header `<count> <dim>`, then one word per line.

    A count that disagrees with the number of vector lines is tolerated with
    a warning; a dimension violation on any line is an error.
    """
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise MalformedEmbedding(f"{path}: malformed header {header!r}")
        try:
            count, dim = int(header[0]), int(header[1])
        except ValueError:
            raise MalformedEmbedding(f"{path}: malformed header {header!r}") from None
        if dim < 1:
            raise MalformedEmbedding(f"{path}: dimension must be positive, got {dim}")
        vectors = {}
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            word, comps = parts[0], parts[1:]
            if len(comps) != dim:
                raise MalformedEmbedding(
                    f"{path}:{lineno}: {word!r} has {len(comps)} components, "
                    f"expected {dim}")
            try:
                vec = np.array([float(c) for c in comps])
            except ValueError:
                raise MalformedEmbedding(
                    f"{path}:{lineno}: non-numeric component for {word!r}") from None
            vectors[word] = vec
    if len(vectors) != count:
        warnings.warn(
            f"{path}: header declares {count} vectors, file has {len(vectors)}",
            stacklevel=2)
    return EmbeddingStore(dim, vectors)


def load_distance_matrix(path) -> LabeledDistanceMatrix:
    """Read a distance-matrix CSV: header row of labels, square numeric body.

    Body rows may carry the row label as a leading field (the layout this
    package writes) or consist of bare values.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise MalformedMatrix(f"{path}: empty file")
    labels = tuple(c.strip() for c in rows[0])
    n = len(labels)
    body = rows[1:]
    if len(body) != n:
        raise MalformedMatrix(f"{path}: expected {n} data rows, got {len(body)}")
    values = np.empty((n, n))
    for i, row in enumerate(body):
        row = [c.strip() for c in row]
        if len(row) == n + 1:
            if row[0] != labels[i]:
                raise MalformedMatrix(
                    f"{path}: row {i + 1} labeled {row[0]!r}, expected {labels[i]!r}")
            row = row[1:]
        if len(row) != n:
            raise MalformedMatrix(
                f"{path}: row {i + 1} has {len(row)} values, expected {n}")
        try:
            values[i] = [float(c) for c in row]
        except ValueError:
            raise MalformedMatrix(f"{path}: non-numeric value in row {i + 1}") from None
    return LabeledDistanceMatrix(labels, values)


def save_distance_matrix(m: LabeledDistanceMatrix, path) -> None:
    """Write the CSV layout read back by load_distance_matrix, bit-exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(m.labels)
        for lab, row in zip(m.labels, m.values):
            w.writerow([lab] + [FLOAT_FMT % x for x in row])
