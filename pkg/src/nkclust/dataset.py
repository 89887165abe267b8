"""Objects, partitions, CSV ingestion and synthetic benchmark generators."""

from __future__ import annotations

import csv
import enum
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "BalanceLevel",
    "Dataset",
    "DatasetError",
    "GaussianModelConfig",
    "as_partition",
    "generate_gaussian_model",
    "load_csv",
    "load_labels",
    "make_spiral",
    "save_csv",
    "save_labels",
    "write_generated",
]

# Layout constants of the Gaussian model. Ranges are not given by the
# original model description, see README.
CENTER_RANGE = (0.0, 100.0)
HALF_LENGTH_RANGE = (5.0, 20.0)
GAP_RANGE = (5.0, 15.0)
MAX_REJECTION_DRAWS = 1000


class DatasetError(ValueError):
    """Raised for malformed datasets, label files or generator configs."""


@dataclass(frozen=True)
class Dataset:
    """N objects described by l real attributes (one row per object)."""

    objects: np.ndarray

    def __post_init__(self):
        objects = np.array(self.objects, dtype=np.float64)
        if objects.ndim == 1:
            objects = objects[:, None]
        if objects.ndim != 2:
            raise DatasetError("objects must be a 2-D array")
        if objects.shape[0] < 2:
            raise DatasetError(f"need at least 2 objects, got {objects.shape[0]}")
        if objects.shape[1] < 1:
            raise DatasetError("need at least one attribute")
        if not np.all(np.isfinite(objects)):
            raise DatasetError("attribute values must be finite")
        objects.setflags(write=False)
        object.__setattr__(self, "objects", objects)

    @property
    def n(self) -> int:
        return self.objects.shape[0]

    @property
    def dims(self) -> int:
        return self.objects.shape[1]


def as_partition(labels, n: int | None = None) -> np.ndarray:
    """Validate ``labels`` and return them as an int64 label vector.

    Label 0 marks noise; any other non-negative integer names a cluster.
    """
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise DatasetError("a partition is a 1-D label vector")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise DatasetError("labels must be integers")
    arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise DatasetError("labels must be non-negative")
    if n is not None and arr.size != n:
        raise DatasetError(f"partition has {arr.size} labels, dataset has {n} objects")
    return arr


# ---------------------------------------------------------------------------
# CSV


def _is_number(field: str) -> bool:
    try:
        float(field)
    except ValueError:
        return False
    return True


def _read_rows(path) -> list[list[str]]:
    with open(path, newline="") as fh:
        rows = [[f.strip() for f in row] for row in csv.reader(fh)]
    rows = [r for r in rows if r and any(r)]
    if rows and not all(_is_number(f) for f in rows[0]):
        rows = rows[1:]
    return rows


def load_csv(path, label_column: bool = False) -> tuple[Dataset, np.ndarray | None]:
    """Read a comma separated dataset.

    A non-numeric first row is taken as a header. With ``label_column`` the
    last column holds integer ground-truth labels and is returned separately.
    """
    rows = _read_rows(path)
    if not rows:
        raise DatasetError(f"{path}: no data rows")
    width = len(rows[0])
    for lineno, row in enumerate(rows, 1):
        if len(row) != width:
            raise DatasetError(f"{path}: ragged row {lineno} ({len(row)} fields, expected {width})")
    try:
        values = np.array([[float(f) for f in row] for row in rows])
    except ValueError as exc:
        raise DatasetError(f"{path}: non-numeric attribute ({exc})") from None
    labels = None
    if label_column:
        if width < 2:
            raise DatasetError(f"{path}: label column requested but only one column present")
        raw = values[:, -1]
        if np.any(raw < 0):
            raise DatasetError(f"{path}: negative label")
        labels = as_partition(raw)
        values = values[:, :-1]
    return Dataset(values), labels


def save_csv(path, ds: Dataset, labels=None) -> None:
    """Write ``ds`` as CSV, optionally appending labels as the last column."""
    data = ds.objects
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for i, row in enumerate(data):
            fields = [repr(float(v)) for v in row]
            if labels is not None:
                fields.append(str(int(labels[i])))
            writer.writerow(fields)


def load_labels(path) -> np.ndarray:
    """Read a label file: one integer per line (a header line is skipped)."""
    rows = _read_rows(path)
    if not rows:
        raise DatasetError(f"{path}: no labels")
    if any(len(r) != 1 for r in rows):
        raise DatasetError(f"{path}: label files hold exactly one column")
    try:
        raw = np.array([float(r[0]) for r in rows])
    except ValueError:
        raise DatasetError(f"{path}: non-numeric label") from None
    if np.any(raw < 0):
        raise DatasetError(f"{path}: negative label")
    return as_partition(raw)


def save_labels(path, labels) -> None:
    labels = as_partition(labels)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text("".join(f"{int(v)}\n" for v in labels))


# ---------------------------------------------------------------------------
# Gaussian model


class BalanceLevel(str, enum.Enum):
    EQUAL = "equal"
    FIRST_10PCT = "first10pct"
    FIRST_60PCT = "first60pct"


@dataclass(frozen=True)
class GaussianModelConfig:
    n_clusters: int
    dims: int
    n_objects: int
    balance_level: BalanceLevel = BalanceLevel.EQUAL
    noise_fraction: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "balance_level", BalanceLevel(self.balance_level))
        if self.n_clusters < 1 or self.dims < 1 or self.n_objects < 1:
            raise DatasetError("n_clusters, dims and n_objects must be positive")
        if not 0.0 <= self.noise_fraction < 1.0:
            raise DatasetError("noise_fraction must lie in [0, 1)")
        if self.n_clusters > self.n_objects - self.n_noise:
            raise DatasetError("more clusters than non-noise objects")

    @property
    def n_noise(self) -> int:
        return int(round(self.noise_fraction * self.n_objects))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["balance_level"] = self.balance_level.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GaussianModelConfig":
        return cls(**d)


def cluster_sizes(cfg: GaussianModelConfig) -> np.ndarray:
    """Cluster sizes for the configured balance level (noise excluded)."""
    n = cfg.n_objects - cfg.n_noise
    c = cfg.n_clusters
    if c == 1:
        return np.array([n])
    if cfg.balance_level is BalanceLevel.EQUAL:
        sizes = np.full(c, n // c)
        sizes[: n % c] += 1
        return sizes
    share = 0.1 if cfg.balance_level is BalanceLevel.FIRST_10PCT else 0.6
    first = min(max(int(round(share * n)), 1), n - (c - 1))
    rest = n - first
    sizes = np.full(c - 1, rest // (c - 1))
    sizes[: rest % (c - 1)] += 1
    return np.concatenate([[first], sizes])


def _layout(cfg: GaussianModelConfig, rng: np.random.Generator):
    """Centers and half-lengths; intervals disjoint on every dimension but the first."""
    c, l = cfg.n_clusters, cfg.dims
    half = rng.uniform(*HALF_LENGTH_RANGE, size=(c, l))
    centers = np.empty((c, l))
    centers[:, 0] = rng.uniform(*CENTER_RANGE, size=c)
    for d in range(1, l):
        # intervals laid end to end in random order with random gaps
        order = rng.permutation(c)
        gaps = rng.uniform(*GAP_RANGE, size=c)
        pos = CENTER_RANGE[0]
        for rank, k in enumerate(order):
            if rank:
                pos += gaps[rank]
            centers[k, d] = pos + half[k, d]
            pos += 2.0 * half[k, d]
    return centers, half


def _truncated_normal(rng, center, half, size):
    """Sample a box-truncated normal with sd = boundary length / 3."""
    sd = 2.0 * half / 3.0
    lo, hi = center - half, center + half
    out = rng.normal(center, sd, size=(size, center.size))
    bad = (out < lo) | (out > hi)
    draws = 1
    while bad.any() and draws < MAX_REJECTION_DRAWS:
        redo = rng.normal(center, sd, size=out.shape)
        out = np.where(bad, redo, out)
        bad = (out < lo) | (out > hi)
        draws += 1
    return np.clip(out, lo, hi)


def generate_gaussian_model(cfg: GaussianModelConfig) -> tuple[Dataset, np.ndarray]:
    """Draw a Gaussian-model dataset and its ground truth (noise labelled 0).

    Objects are grouped by cluster (cluster 1 first), noise objects come last.
    """
    rng = np.random.default_rng(cfg.seed)
    centers, half = _layout(cfg, rng)
    sizes = cluster_sizes(cfg)
    blocks, labels = [], []
    for k, size in enumerate(sizes):
        blocks.append(_truncated_normal(rng, centers[k], half[k], int(size)))
        labels.append(np.full(int(size), k + 1, dtype=np.int64))
    points = np.vstack(blocks)
    if cfg.n_noise:
        lo, hi = points.min(axis=0), points.max(axis=0)
        blocks.append(rng.uniform(lo, hi, size=(cfg.n_noise, cfg.dims)))
        labels.append(np.zeros(cfg.n_noise, dtype=np.int64))
        points = np.vstack(blocks)
    return Dataset(points), np.concatenate(labels)


def write_generated(out_dir, cfg: GaussianModelConfig, stem: str = "dataset",
                    labels_in_dataset: bool = False) -> dict:
    """Generate and write ``<stem>.csv``, ``<stem>_truth.csv`` and ``<stem>.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ds, truth = generate_gaussian_model(cfg)
    paths = {
        "dataset": out / f"{stem}.csv",
        "truth": out / f"{stem}_truth.csv",
        "config": out / f"{stem}.json",
    }
    save_csv(paths["dataset"], ds, truth if labels_in_dataset else None)
    save_labels(paths["truth"], truth)
    sidecar = {"generator": "gaussian_model", "config": cfg.to_dict(),
               "labels_in_dataset": labels_in_dataset}
    paths["config"].write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return {k: str(v) for k, v in paths.items()}


# ---------------------------------------------------------------------------
# Spiral


def make_spiral(n: int = 312, arms: int = 3, turns: float = 1.25, gap: float = 3.0,
                r0: float = 2.0, jitter: float = 0.15, seed: int = 0) -> tuple[Dataset, np.ndarray]:
    """Interleaved Archimedean spiral arms, one cluster per arm.

    Stand-in for the "Path-based 2 (Spiral)" shape benchmark (N=312, 3 arms).
    Points are evenly spaced along each arm; ``gap`` is the radial distance
    between neighbouring arms.
    """
    rng = np.random.default_rng(seed)
    sizes = np.full(arms, n // arms)
    sizes[: n % arms] += 1
    b = gap * arms / (2.0 * math.pi)  # radius gained per radian
    pts, labels = [], []
    for a, size in enumerate(sizes):
        # invert the arc length numerically for even spacing along the arm
        fine = np.linspace(0.0, 2.0 * math.pi * turns, 4096)
        seg = np.hypot(b, r0 + b * fine)
        arc = np.concatenate([[0.0], np.cumsum(0.5 * (seg[1:] + seg[:-1]) * np.diff(fine))])
        phi = np.interp(np.linspace(0.0, arc[-1], size), arc, fine)
        theta = phi + 2.0 * math.pi * a / arms
        r = r0 + b * phi
        xy = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        xy += rng.normal(0.0, jitter, size=xy.shape)
        pts.append(xy)
        labels.append(np.full(size, a + 1, dtype=np.int64))
    return Dataset(np.vstack(pts)), np.concatenate(labels)
