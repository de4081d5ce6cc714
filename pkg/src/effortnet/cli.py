"""Command-line entry point: ``effortnet {run, sweep, cocomo, inspect-split}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import cocomo
from .dataset import Encoding, SplitPlan, load_dataset, sample_dataset, split
from .errors import EffortNetError, NumericalError, ValidationError
from .harness import (
    FORMATS,
    MODELS,
    SAMPLE_DATA,
    ExperimentConfig,
    emit_report,
    render_sweep,
    run_experiment,
    seed_sweep,
)

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_NUMERICAL = 0, 1, 2, 3


def _csv_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _add_experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help=f"project CSV, or '{SAMPLE_DATA}' for the embedded sample")
    p.add_argument("--train-count", type=int, default=53)
    p.add_argument("--spread", type=float, default=0.94)
    p.add_argument("--encoding", choices=[e.value for e in Encoding], default=Encoding.SIZE_EAF.value)
    p.add_argument("--scale", action="store_true", help="min-max scale features using training rows")
    p.add_argument("--models", type=_csv_list, default=MODELS, help="comma list of cocomo,rbnn,grnn")
    p.add_argument("--out", default="effortnet-out", help="output directory")
    p.add_argument("--format", dest="formats", type=_csv_list, default=FORMATS, help="comma list of csv,markdown")


def _config(args, seed: int) -> ExperimentConfig:
    return ExperimentConfig(
        data_path=args.data,
        train_count=args.train_count,
        seed=seed,
        spread=args.spread,
        encoding=args.encoding,
        scale=args.scale,
        models=args.models,
        output_dir=args.out,
        formats=args.formats,
    )


def cmd_run(args) -> int:
    artifacts = run_experiment(_config(args, args.seed))
    paths = emit_report(artifacts)
    for name, rep in artifacts.reports.items():
        print(
            f"{name:7s} MARE {rep.mare_pct:7.2f}%  VARE {rep.vare_pct:7.2f}%  "
            f"MeanBRE {rep.mean_bre:6.2f}  MMRE {rep.mmre_pct:7.2f}%  Pred(40) {rep.pred40:6.2f}%"
        )
    flags = artifacts.flags
    for name, ids in flags.negative_predictions.items():
        print(f"WARNING: {name} made {len(ids)} non-positive predictions (ids {ids}); excluded from mean BRE")
    for msg in flags.conditioning:
        print(f"WARNING: {msg}")
    print(f"wrote {len(paths)} files to {Path(args.out)}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = _config(args, args.first_seed)
    rows = seed_sweep(base, range(args.first_seed, args.first_seed + args.seeds))
    files = render_sweep(rows, base.models)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        with open(out / name, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    print(files["sweep.md"])
    return EXIT_OK


def _parse_rating(text: str) -> tuple[str, str]:
    driver, sep, level = text.partition("=")
    if not sep:
        raise ValidationError(f"rating must look like DRIVER=LEVEL, got {text!r}")
    return driver.strip().upper(), level.strip()


def cmd_cocomo(args) -> int:
    mode = cocomo.DevelopmentMode.parse(args.mode)
    if args.multipliers is not None:
        if args.rating:
            raise ValidationError("give either --rating or --multipliers, not both")
        values = [float(v) for v in _csv_list(args.multipliers)]
        inp = cocomo.CocomoInput(mode, args.size, multipliers=values)
    else:
        ratings = cocomo.nominal_ratings()
        seen = set()
        for text in args.rating or ():
            driver, level = _parse_rating(text)
            if driver in seen:
                raise ValidationError(f"{driver} rated twice")
            seen.add(driver)
            ratings[driver] = level
        inp = cocomo.CocomoInput(mode, args.size, ratings=ratings)
    a, b = mode.coefficients
    eaf = inp.eaf
    result = cocomo.estimate_effort(inp)
    print(f"mode: {mode.value}")
    print(f"a={a:g}, b={b:g}")
    print(f"EAF: {eaf:.4f}")
    print(f"effort: {result:.2f} man-months")
    return EXIT_OK


def cmd_inspect_split(args) -> int:
    dataset = sample_dataset() if args.data == SAMPLE_DATA else load_dataset(args.data)
    if args.manifest:
        plan = SplitPlan.from_manifest(json.loads(Path(args.manifest).read_text(encoding="utf-8")), dataset)
    else:
        plan = split(dataset, args.train_count, args.seed)
    print(plan.to_json(), end="")
    held_out = [i for i in dataset.ids if i not in set(plan.train_ids)]
    print(f"held-out ids ({len(held_out)}): {held_out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="effortnet", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="fit and compare the models on a dataset")
    _add_experiment_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="repeat `run` over consecutive seeds and tabulate MMRE")
    _add_experiment_args(p)
    p.add_argument("--seeds", type=int, default=20, help="number of seeds")
    p.add_argument("--first-seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("cocomo", help="Intermediate COCOMO effort for one project")
    p.add_argument("--mode", required=True, help="organic, semidetached or embedded")
    p.add_argument("--size", type=float, required=True, help="size in KDSI")
    p.add_argument("--rating", action="append", metavar="DRIVER=LEVEL", help="repeatable; unrated drivers are nominal")
    p.add_argument("--multipliers", metavar="M1,...,M15", help="the 15 numeric multipliers in table order")
    p.set_defaults(func=cmd_cocomo)

    p = sub.add_parser("inspect-split", help="print the split manifest for a seed or saved manifest")
    p.add_argument("--data", required=True)
    p.add_argument("--train-count", type=int, default=53)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--manifest", help="existing split.json to validate and print")
    p.set_defaults(func=cmd_inspect_split)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (NumericalError, np.linalg.LinAlgError) as exc:
        return _fail(exc, EXIT_NUMERICAL)
    except (EffortNetError, ValueError) as exc:
        return _fail(exc, EXIT_VALIDATION)
    except OSError as exc:
        return _fail(exc, EXIT_IO)


def _fail(exc: BaseException, code: int) -> int:
    where = getattr(exc, "stage", None)
    print(f"error{f' [{where}]' if where else ''}: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
