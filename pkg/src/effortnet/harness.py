"""Experiment runner comparing Intermediate COCOMO, RBNN and GRNN on project data.

The default configuration is the COCOMO81 protocol: 53 randomly chosen
training projects, spread 0.94, and every model evaluated on all projects.
"""

from __future__ import annotations

import contextlib
import csv
import io
import json
import logging
import math
import statistics
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import cocomo
from .dataset import (
    Dataset,
    Encoding,
    MinMaxScaler,
    SplitPlan,
    feature_matrix,
    load_dataset,
    sample_dataset,
    split,
)
from .errors import EffortNetError, IllConditioned, NumericalError, ValidationError
from .grnn import fit_grnn
from .metrics import EvaluationReport, evaluate
from .rbnn import fit_rbnn

log = logging.getLogger(__name__)

MODELS = ("cocomo", "rbnn", "grnn")
MODEL_LABELS = {"cocomo": "Intermediate COCOMO", "rbnn": "RBNN", "grnn": "GRNN"}
NETWORK_MODELS = ("rbnn", "grnn")
FORMATS = ("csv", "markdown")
SAMPLE_DATA = "sample"

COMPARISON_HEADER = ("model", "mare_pct", "vare_pct", "mean_bre", "mmre_pct", "pred40_pct")

# Output file for each bar-chart figure, with the report attribute it plots.
METRIC_FIGURES = (
    ("fig7_mare.csv", "mare_pct"),
    ("fig8_vare.csv", "vare_pct"),
    ("fig9_mean_bre.csv", "mean_bre"),
    ("fig10_mmre.csv", "mmre_pct"),
    ("fig11_pred40.csv", "pred40"),
)


def format_effort(value: float) -> str:
    """Effort to 4 significant digits, positional notation."""
    if not math.isfinite(value):
        return "NA"
    return np.format_float_positional(value, precision=4, unique=False, fractional=False, trim="-")


def format_metric(value: float) -> str:
    """Metrics to 2 decimals."""
    if not math.isfinite(value):
        return "NA"
    return f"{value:.2f}"


@contextlib.contextmanager
def stage(name: str):
    """Tag errors escaping the block with the pipeline stage that raised them."""
    try:
        yield
    except (EffortNetError, OSError, np.linalg.LinAlgError) as exc:
        if not hasattr(exc, "stage"):
            exc.stage = name
        raise


@dataclass(frozen=True)
class ExperimentConfig:
    data_path: str = SAMPLE_DATA
    train_count: int = 53
    seed: int = 0
    spread: float = 0.94
    encoding: Encoding = Encoding.SIZE_EAF
    scale: bool = False
    models: tuple[str, ...] = MODELS
    output_dir: str = "effortnet-out"
    formats: tuple[str, ...] = FORMATS

    def __post_init__(self):
        object.__setattr__(self, "encoding", Encoding.parse(self.encoding))
        models = tuple(m.strip().lower() for m in self.models)
        bad = [m for m in models if m not in MODELS]
        if bad or not models:
            raise ValidationError(f"models must be a non-empty subset of {MODELS}, got {self.models}")
        # Canonical order keeps output files independent of flag order.
        object.__setattr__(self, "models", tuple(m for m in MODELS if m in models))
        formats = tuple(f.strip().lower() for f in self.formats)
        if any(f not in FORMATS for f in formats):
            raise ValidationError(f"formats must be a subset of {FORMATS}, got {self.formats}")
        object.__setattr__(self, "formats", tuple(f for f in FORMATS if f in formats))
        if not (self.spread > 0 and math.isfinite(self.spread)):
            raise ValidationError(f"spread must be positive, got {self.spread}")
        if self.train_count < 1:
            raise ValidationError(f"train_count must be at least 1, got {self.train_count}")
        if int(self.seed) < 0:
            raise ValidationError("seed must be a non-negative integer")

    @property
    def needs_split(self) -> bool:
        return any(m in NETWORK_MODELS for m in self.models)

    def echo(self) -> dict:
        """Settings that shape the results; the output location is left out."""
        out = asdict(self)
        del out["output_dir"]
        out["encoding"] = self.encoding.value
        out["models"] = list(self.models)
        out["formats"] = list(self.formats)
        return out


@dataclass
class Flags:
    negative_predictions: dict[str, list[int]] = field(default_factory=dict)
    bre_excluded: dict[str, int] = field(default_factory=dict)
    conditioning: list[str] = field(default_factory=list)
    rbnn_train_max_rel_error: Optional[float] = None


@dataclass
class EstimateRow:
    id: int
    mode: str
    size: float
    eaf: float
    actual: float
    in_train: bool
    estimates: dict[str, float]


@dataclass
class RunArtifacts:
    config: ExperimentConfig
    provenance: str
    split: Optional[SplitPlan]
    reports: dict[str, EvaluationReport]
    estimates: list[EstimateRow]
    flags: Flags
    fitted: dict[str, object] = field(default_factory=dict)
    scaler: Optional[MinMaxScaler] = None


def _load(config: ExperimentConfig) -> Dataset:
    if str(config.data_path) == SAMPLE_DATA:
        return sample_dataset()
    return load_dataset(config.data_path)


def run_experiment(config: ExperimentConfig, dataset: Optional[Dataset] = None) -> RunArtifacts:
    """Fit the selected models and evaluate each on every project in the dataset."""
    with stage("load dataset"):
        if dataset is None:
            dataset = _load(config)
    records = list(dataset.records)
    actual = np.array([r.actual_effort for r in records])
    ids = [r.id for r in records]
    flags = Flags()
    predictions: dict[str, np.ndarray] = {}
    fitted: dict[str, object] = {}
    plan = scaler = None

    if "cocomo" in config.models:
        with stage("cocomo"):
            predictions["cocomo"] = np.array([cocomo.effort(r.mode, r.size, r.eaf) for r in records])

    if config.needs_split:
        with stage("split"):
            plan = split(dataset, config.train_count, config.seed)
        with stage("features"):
            train = dataset.subset(plan.train_ids)
            x_train = feature_matrix(train, config.encoding)
            x_all = feature_matrix(records, config.encoding)
            if config.scale:
                scaler = MinMaxScaler.fit(x_train)
                x_train, x_all = scaler.transform(x_train), scaler.transform(x_all)
            t_train = np.array([r.actual_effort for r in train])
        if "rbnn" in config.models:
            with stage("rbnn"), warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", IllConditioned)
                model = fit_rbnn(x_train, t_train, config.spread)
                predictions["rbnn"] = np.atleast_1d(model.predict(x_all))
            flags.conditioning.extend(str(w.message) for w in caught if issubclass(w.category, IllConditioned))
            fitted["rbnn"] = model
            rel = np.abs(np.atleast_1d(model.predict(x_train)) - t_train) / np.maximum(1.0, np.abs(t_train))
            flags.rbnn_train_max_rel_error = float(rel.max())
        if "grnn" in config.models:
            with stage("grnn"):
                model = fit_grnn(x_train, t_train, config.spread)
                predictions["grnn"] = np.atleast_1d(model.predict(x_all))
            fitted["grnn"] = model

    reports = {}
    for name in config.models:
        est = predictions[name]
        if not np.all(np.isfinite(est)):
            err = NumericalError(f"{name} produced non-finite predictions")
            err.stage = name
            raise err
        negatives = [i for i, e in zip(ids, est) if e <= 0]
        if negatives:
            flags.negative_predictions[name] = negatives
            log.warning("%s: %d non-positive predictions (ids %s)", name, len(negatives), negatives)
        with stage(f"metrics ({name})"):
            reports[name] = evaluate(actual, est, ids)
        flags.bre_excluded[name] = reports[name].bre_excluded

    train_ids = set(plan.train_ids) if plan else set()
    rows = [
        EstimateRow(
            id=r.id,
            mode=r.mode.value,
            size=r.size,
            eaf=r.eaf,
            actual=r.actual_effort,
            in_train=r.id in train_ids,
            estimates={m: float(predictions[m][k]) for m in config.models},
        )
        for k, r in enumerate(records)
    ]
    return RunArtifacts(
        config=config,
        provenance=dataset.provenance,
        split=plan,
        reports=reports,
        estimates=rows,
        flags=flags,
        fitted=fitted,
        scaler=scaler,
    )


# --- report emission ----------------------------------------------------------


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)  # RFC 4180: minimal quoting, CRLF line ends
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _metric_value(report: EvaluationReport, attr: str) -> float:
    return report.pred40 if attr == "pred40" else getattr(report, attr)


def comparison_rows(artifacts: RunArtifacts) -> list[list[str]]:
    return [
        [name, *(format_metric(_metric_value(rep, a)) for a in ("mare_pct", "vare_pct", "mean_bre", "mmre_pct", "pred40"))]
        for name, rep in artifacts.reports.items()
    ]


def _estimate_table(artifacts: RunArtifacts) -> tuple[list[str], list[list[str]]]:
    models = list(artifacts.config.models)
    header = ["id", "mode", "kdsi", "eaf", "actual", "in_train", *models]
    rows = [
        [
            str(r.id), r.mode, format_effort(r.size), format_effort(r.eaf), format_effort(r.actual),
            "1" if r.in_train else "0", *(format_effort(r.estimates[m]) for m in models),
        ]
        for r in artifacts.estimates
    ]
    return header, rows


def render_files(artifacts: RunArtifacts) -> dict[str, str]:
    """Every output file as ``{name: text}``; writing is left to :func:`emit_report`."""
    cfg = artifacts.config
    files: dict[str, str] = {}
    if artifacts.split is not None:
        files["split.json"] = artifacts.split.to_json()
    for name, model in artifacts.fitted.items():
        doc = model.to_dict()
        doc["feature_encoding"] = cfg.encoding.value
        doc["scaler"] = artifacts.scaler.to_dict() if artifacts.scaler is not None else None
        files[f"{name}_model.json"] = json.dumps(doc, indent=2, sort_keys=True) + "\n"

    if "csv" in cfg.formats:
        files["comparison.csv"] = _csv_text(COMPARISON_HEADER, comparison_rows(artifacts))
        files["estimates.csv"] = _csv_text(*_estimate_table(artifacts))
        if "rbnn" in cfg.models:
            files["fig5_actual_vs_rbnn.csv"] = _csv_text(
                ("id", "actual", "predicted"),
                ([r.id, format_effort(r.actual), format_effort(r.estimates["rbnn"])] for r in artifacts.estimates),
            )
        files["fig6_all_models.csv"] = _csv_text(
            ("id", "actual", *cfg.models),
            (
                [r.id, format_effort(r.actual), *(format_effort(r.estimates[m]) for m in cfg.models)]
                for r in artifacts.estimates
            ),
        )
        for fname, attr in METRIC_FIGURES:
            column = "pred40_pct" if attr == "pred40" else attr
            files[fname] = _csv_text(
                ("model", column),
                ([m, format_metric(_metric_value(rep, attr))] for m, rep in artifacts.reports.items()),
            )
    if "markdown" in cfg.formats:
        files["report.md"] = render_markdown(artifacts)
    return files


def _md_table(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return "\n".join(lines)


def render_markdown(artifacts: RunArtifacts) -> str:
    cfg, flags = artifacts.config, artifacts.flags
    out = ["# Effort estimation comparison", ""]
    out += ["## Configuration", ""]
    out += [f"- {k}: `{v}`" for k, v in cfg.echo().items()]
    out += [f"- dataset: {artifacts.provenance} ({len(artifacts.estimates)} projects)", ""]

    out += ["## Split", ""]
    if artifacts.split is None:
        out += ["No split: only training-free models were run.", ""]
    else:
        sp = artifacts.split
        out += [
            f"- seed: {sp.seed}",
            f"- generator: {sp.generator}",
            f"- training projects ({sp.train_count}): {', '.join(map(str, sp.train_ids))}",
            f"- test projects: all {len(sp.test_ids)}",
            "",
        ]

    out += ["## Comparison", ""]
    out.append(
        _md_table(
            ["Model", "MARE (%)", "VARE (%)", "Mean BRE", "MMRE (%)", "Pred(40) (%)"],
            ([MODEL_LABELS[r[0]], *r[1:]] for r in comparison_rows(artifacts)),
        )
    )
    out.append("")

    out += ["## Flags", ""]
    for m in cfg.models:
        neg = flags.negative_predictions.get(m, [])
        out.append(
            f"- {MODEL_LABELS[m]}: {len(neg)} non-positive predictions"
            + (f" (ids {', '.join(map(str, neg))})" if neg else "")
            + f"; {flags.bre_excluded.get(m, 0)} pairs excluded from mean BRE"
        )
    if flags.rbnn_train_max_rel_error is not None:
        out.append(f"- RBNN max relative error on training projects: {flags.rbnn_train_max_rel_error:.3e}")
    out += [f"- conditioning: {msg}" for msg in flags.conditioning]
    out.append("")

    out += ["## Estimates (man-months)", ""]
    out.append(_md_table(*_estimate_table(artifacts)))
    out.append("")
    return "\n".join(out)


def emit_report(artifacts: RunArtifacts, output_dir=None) -> list[Path]:
    """Write every rendered file into ``output_dir`` (default: the config's)."""
    out = Path(output_dir if output_dir is not None else artifacts.config.output_dir)
    written = []
    with stage("write report"):
        out.mkdir(parents=True, exist_ok=True)
        for name, text in render_files(artifacts).items():
            path = out / name
            try:
                with open(path, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            except OSError as exc:
                raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc
            written.append(path)
    return written


# --- seed sweep ---------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    seed: int
    mmre: dict[str, float]


def seed_sweep(config: ExperimentConfig, seeds: Iterable[int], dataset: Optional[Dataset] = None) -> list[SweepRow]:
    """Repeat :func:`run_experiment` for each seed and collect per-model MMRE."""
    if dataset is None:
        with stage("load dataset"):
            dataset = _load(config)
    rows = []
    for s in seeds:
        cfg = ExperimentConfig(**{**_config_kwargs(config), "seed": int(s)})
        art = run_experiment(cfg, dataset)
        rows.append(SweepRow(seed=int(s), mmre={m: r.mmre_pct for m, r in art.reports.items()}))
    return rows


def _config_kwargs(config: ExperimentConfig) -> dict:
    return {f: getattr(config, f) for f in config.__dataclass_fields__}


def render_sweep(rows: Sequence[SweepRow], models: Sequence[str]) -> dict[str, str]:
    header = ["seed", *(f"{m}_mmre_pct" for m in models)]
    table = [[r.seed, *(format_metric(r.mmre[m]) for m in models)] for r in rows]
    summary = []
    if "rbnn" in models and "grnn" in models:
        wins = sum(r.mmre["rbnn"] < r.mmre["grnn"] for r in rows)
        summary.append(f"- RBNN MMRE below GRNN MMRE in {wins}/{len(rows)} seeds")
    for m in models:
        med = statistics.median(r.mmre[m] for r in rows)
        summary.append(f"- median {MODEL_LABELS[m]} MMRE: {format_metric(med)}%")
    md = "\n".join(
        ["# Seed sweep", "", _md_table(header, table), "", *summary, ""]
    )
    return {"sweep.csv": _csv_text(header, table), "sweep.md": md}
