"""COCOMO81-style project data: CSV loading, validation, seeded splits and features."""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .cocomo import DRIVERS, DevelopmentMode, eaf_from_multipliers
from .errors import BadCount, DegenerateFeature, EmptyDataset, ParseError, ValidationError

COLUMNS = ("id", "mode") + tuple(d.lower() for d in DRIVERS) + ("kdsi", "actual")

GENERATOR_ID = "numpy.random.Generator(PCG64)/permutation"

MULTIPLIER_RANGE = (0.0, 2.0)


@dataclass(frozen=True)
class ProjectRecord:
    id: int
    mode: DevelopmentMode
    multipliers: tuple[float, ...]
    size: float
    actual_effort: float

    def __post_init__(self):
        object.__setattr__(self, "multipliers", tuple(float(m) for m in self.multipliers))
        problems = self.problems()
        if problems:
            raise ValidationError(f"project {self.id}: " + "; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if not (isinstance(self.id, int) and self.id > 0):
            out.append(f"id must be a positive integer, got {self.id!r}")
        if len(self.multipliers) != len(DRIVERS):
            out.append(f"expected {len(DRIVERS)} multipliers, got {len(self.multipliers)}")
        lo, hi = MULTIPLIER_RANGE
        for name, m in zip(DRIVERS, self.multipliers):
            if not (lo < m < hi):
                out.append(f"{name} multiplier {m} outside ({lo:g}, {hi:g})")
        if not (self.size > 0 and math.isfinite(self.size)):
            out.append(f"kdsi must be positive, got {self.size}")
        if not (self.actual_effort > 0 and math.isfinite(self.actual_effort)):
            out.append(f"actual effort must be positive, got {self.actual_effort}")
        return out

    @property
    def eaf(self) -> float:
        return eaf_from_multipliers(self.multipliers)


@dataclass(frozen=True)
class Dataset:
    records: tuple[ProjectRecord, ...]
    provenance: str = ""

    def __post_init__(self):
        records = tuple(self.records)
        if not records:
            raise EmptyDataset("dataset has no records")
        ids = [r.id for r in records]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValidationError(f"duplicate project ids: {dupes}")
        object.__setattr__(self, "records", records)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(r.id for r in self.records)

    def subset(self, ids: Iterable[int]) -> list[ProjectRecord]:
        wanted = set(ids)
        return [r for r in self.records if r.id in wanted]


def _parse_float(text: str, column: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"line {line}: column {column!r} is not a number: {text!r}") from None


def parse_dataset(text: str, provenance: str = "") -> Dataset:
    """Parse CSV text with the columns in :data:`COLUMNS` (header required, any order)."""
    reader = csv.reader(io.StringIO(text))
    rows = [(reader.line_num, row) for row in reader if any(cell.strip() for cell in row)]
    if not rows:
        raise EmptyDataset(f"no data in {provenance or 'input'}")
    _, header = rows[0]
    header = [h.strip().lower() for h in header]
    missing = [c for c in COLUMNS if c not in header]
    if missing:
        raise ParseError(f"header is missing columns: {', '.join(missing)}")
    index = {c: header.index(c) for c in COLUMNS}
    records, errors = [], []
    for line, row in rows[1:]:
        if len(row) != len(header):
            raise ParseError(f"line {line}: expected {len(header)} fields, got {len(row)}")
        cell = {c: row[i].strip() for c, i in index.items()}
        try:
            pid = int(cell["id"])
        except ValueError:
            raise ParseError(f"line {line}: id is not an integer: {cell['id']!r}") from None
        try:
            mode = DevelopmentMode.parse(cell["mode"])
        except ValidationError as exc:
            errors.append(f"line {line} (id {pid}): {exc}")
            continue
        multipliers = tuple(_parse_float(cell[d.lower()], d.lower(), line) for d in DRIVERS)
        size = _parse_float(cell["kdsi"], "kdsi", line)
        actual = _parse_float(cell["actual"], "actual", line)
        try:
            records.append(ProjectRecord(pid, mode, multipliers, size, actual))
        except ValidationError as exc:
            errors.append(f"line {line}: {exc}")
    if errors:
        raise ValidationError("invalid rows:\n  " + "\n  ".join(errors))
    if not records:
        raise EmptyDataset(f"no project rows in {provenance or 'input'}")
    return Dataset(tuple(records), provenance)


def load_dataset(path) -> Dataset:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return parse_dataset(text, provenance=str(path))


def format_dataset(dataset: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for r in dataset.records:
        writer.writerow(
            [r.id, r.mode.value, *(repr(m) for m in r.multipliers), repr(r.size), repr(r.actual_effort)]
        )
    return buf.getvalue()


def save_dataset(dataset: Dataset, path) -> None:
    Path(path).write_text(format_dataset(dataset), encoding="utf-8")


# Published sample projects: (id, actual effort, published COCOMO estimate).
_TABLE3 = (
    (1, 2040, 2218), (5, 33, 39), (9, 423, 397), (29, 7.3, 7), (34, 230, 201),
    (42, 45, 46), (47, 36, 33), (50, 176, 193), (51, 122, 114), (52, 41, 55),
    (55, 18, 7.5), (56, 958, 537), (58, 130, 145), (61, 50, 47),
)


def sample_dataset() -> Dataset:
    """The 14 published sample projects with their published actual efforts.

    Only ids and actual efforts are real. Every project is marked organic
    with all-nominal multipliers, and its size is back-solved so that
    organic COCOMO gives the published COCOMO estimate. These placeholders
    are not COCOMO81 data; use the sample for smoke runs only.
    """
    a, b = DevelopmentMode.ORGANIC.coefficients
    records = tuple(
        ProjectRecord(
            id=pid,
            mode=DevelopmentMode.ORGANIC,
            multipliers=(1.0,) * len(DRIVERS),
            size=(cocomo / a) ** (1.0 / b),
            actual_effort=float(actual),
        )
        for pid, actual, cocomo in _TABLE3
    )
    return Dataset(records, provenance="embedded 14-project sample (placeholder drivers and sizes)")


# --- splits -----------------------------------------------------------------


@dataclass(frozen=True)
class SplitPlan:
    """Training ids drawn from the dataset; the test set is always every id."""

    train_ids: tuple[int, ...]
    test_ids: tuple[int, ...]
    seed: Optional[int]
    generator: str = GENERATOR_ID

    @property
    def train_count(self) -> int:
        return len(self.train_ids)

    def to_manifest(self) -> dict:
        return {
            "seed": self.seed,
            "generator": self.generator,
            "train_ids": list(self.train_ids),
            "train_count": self.train_count,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_manifest(), indent=2) + "\n"

    @classmethod
    def from_manifest(cls, manifest: dict, dataset: Dataset) -> "SplitPlan":
        train = tuple(int(i) for i in manifest["train_ids"])
        unknown = set(train) - set(dataset.ids)
        if unknown:
            raise ValidationError(f"manifest names ids not in the dataset: {sorted(unknown)}")
        if len(set(train)) != len(train):
            raise ValidationError("manifest repeats a training id")
        if "train_count" in manifest and int(manifest["train_count"]) != len(train):
            raise ValidationError("manifest train_count disagrees with train_ids")
        return cls(train, dataset.ids, manifest.get("seed"), manifest.get("generator", "manifest"))


def split(dataset: Dataset, train_count: int, seed: int) -> SplitPlan:
    """Draw ``train_count`` training ids with a seeded PCG64 permutation.

    Training ids are reported sorted; every id is a test id.
    """
    n = len(dataset)
    if not (isinstance(train_count, (int, np.integer)) and 1 <= train_count <= n):
        raise BadCount(f"train_count must be in [1, {n}], got {train_count}")
    seed = int(seed)
    if seed < 0:
        raise ValidationError("seed must be a non-negative integer")
    order = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    ids = dataset.ids
    train = tuple(sorted(ids[i] for i in order[: int(train_count)]))
    return SplitPlan(train_ids=train, test_ids=ids, seed=seed)


# --- features ---------------------------------------------------------------


class Encoding(enum.Enum):
    SIZE_EAF = "size-eaf"
    SIZE_DRIVERS = "size-drivers"

    @classmethod
    def parse(cls, text) -> "Encoding":
        if isinstance(text, Encoding):
            return text
        key = "".join(ch for ch in str(text).lower() if ch.isalnum())
        aliases = {"sizeeaf": cls.SIZE_EAF, "sizedrivers": cls.SIZE_DRIVERS, "sizeplusdrivers": cls.SIZE_DRIVERS}
        try:
            return aliases[key]
        except KeyError:
            raise ValidationError(f"unknown feature encoding {text!r}") from None


def feature_vector(record: ProjectRecord, encoding=Encoding.SIZE_EAF) -> np.ndarray:
    """Raw (unscaled) features: ``[size, EAF]`` or ``[size, m1..m15]``."""
    encoding = Encoding.parse(encoding)
    if encoding is Encoding.SIZE_EAF:
        return np.array([record.size, record.eaf])
    return np.array([record.size, *record.multipliers])


def feature_matrix(records: Sequence[ProjectRecord], encoding=Encoding.SIZE_EAF) -> np.ndarray:
    return np.vstack([feature_vector(r, encoding) for r in records])


@dataclass(frozen=True, eq=False)
class MinMaxScaler:
    """Per-feature affine map fitted on training rows; constant features map to 0."""

    low: np.ndarray
    span: np.ndarray

    @classmethod
    def fit(cls, x) -> "MinMaxScaler":
        x = np.atleast_2d(np.asarray(x, dtype=float))
        low, high = x.min(axis=0), x.max(axis=0)
        span = high - low
        flat = np.flatnonzero(span == 0)
        if flat.size:
            warnings.warn(
                f"features {flat.tolist()} are constant on the training rows; mapped to 0",
                DegenerateFeature,
                stacklevel=2,
            )
        return cls(low=low, span=span)

    def transform(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        safe = np.where(self.span == 0, 1.0, self.span)
        out = (x - self.low) / safe
        return np.where(self.span == 0, 0.0, out)

    def to_dict(self) -> dict:
        return {"low": self.low.tolist(), "span": self.span.tolist()}
