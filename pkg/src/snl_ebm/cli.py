"""Command line front end.

Subcommands:

    generate   draw a built-in dataset and write train/val/test CSV files
    train      fit a density or regression model, write metrics + checkpoints
    eval       report the likelihood bounds from a checkpoint, per seed
    grid       tabulate energy and log-density on a lattice

Training is configured by a flat key = value file ('#' starts a comment)
plus repeatable --set key=value overrides; unknown keys, bad values, and
missing required keys are all collected and reported together with exit
code 2. Runtime failures exit 1. Checkpoints store every float as a %.17g
string so a reload reproduces the exact parameter vector.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import datasets, evaluation, proposals, regression, serialize, training
from .errors import ConfigError, SnlError
from .models import DENSITY_WIDTHS, MlpEnergy
from .proposals import MdnProposal, StandardGaussian, UniformBox, fit_gaussian
from .rng import PortableRng

CHECKPOINT_FORMAT = 1


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_auto_bool(text: str):
    if text.strip().lower() == "auto":
        return None
    return _parse_bool(text)


def _parse_widths(text: str) -> list[int]:
    out = [int(p) for p in text.split(",") if p.strip()]
    if len(out) < 2:
        raise ValueError("widths need at least input and output sizes")
    return out


def _parse_choice(*choices: str):
    def parse(text: str) -> str:
        t = text.strip()
        if t not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}; got {text!r}")
        return t
    return parse


def _parse_optional_float(text: str):
    t = text.strip().lower()
    if t in ("auto", "none"):
        return None
    return float(text)


_ALL_NAMES = datasets.DENSITY_NAMES + datasets.REGRESSION_NAMES

# key -> (parser, default); None default means unset.
_KNOWN_KEYS = {
    "task": (_parse_choice("density", "regression"), None),  # inferred from data.name when unset
    "data.name": (_parse_choice(*_ALL_NAMES), None),
    "data.path": (str, None),
    "data.has_header": (_parse_bool, False),
    "data.n": (int, None),  # defaults per task below
    "data.seed": (int, 0),
    "data.standardize": (_parse_auto_bool, None),  # auto: density yes, regression no
    "model.widths": (_parse_widths, list(DENSITY_WIDTHS)),
    "model.base": (_parse_choice("none", "gaussian"), "none"),
    "model.normalizer": (_parse_bool, True),
    "model.seed": (int, 0),
    "proposal.kind": (_parse_choice("standard", "fitted", "uniform", "mdn"), "fitted"),
    "proposal.components": (int, 2),
    "train.objective": (_parse_choice("snl", "nce"), "snl"),
    "train.epochs": (int, 25),
    "train.learning_rate": (float, 1e-3),
    "train.batch_size": (int, 128),
    "train.proposal_samples": (int, None),  # density 1024, regression 16 per point
    "train.optimizer": (_parse_choice("adam", "sgd"), "adam"),
    "train.seed": (int, 0),
    "train.nce_nu": (_parse_optional_float, None),
    "train.mdn_learning_rate": (float, 1e-3),
    "eval.samples": (int, 20000),
    "eval.seed": (int, 0),
    "out.dir": (str, None),
}


def read_config(path: str | None, overrides: list[str]) -> dict:
    """Resolve the training configuration, collecting every problem at once."""
    problems: list[str] = []
    raw: dict[str, str] = {}

    def take(key: str, value: str, where: str, fresh: dict) -> None:
        key = key.strip()
        if key not in _KNOWN_KEYS:
            problems.append(f"{where}: unknown key {key!r}")
            return
        if key in fresh:
            problems.append(f"{where}: duplicate key {key!r}")
            return
        fresh[key] = value.strip()

    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError([f"cannot read config file: {exc}"])
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                problems.append(f"{path}:{lineno}: expected 'key = value', got {body!r}")
                continue
            key, value = body.split("=", 1)
            take(key, value, f"{path}:{lineno}", raw)
    set_keys: dict[str, str] = {}  # --set wins over the file, duplicates only within --set
    for item in overrides:
        if "=" not in item:
            problems.append(f"--set {item!r}: expected key=value")
            continue
        key, value = item.split("=", 1)
        take(key, value, f"--set {key.strip()}", set_keys)
    raw.update(set_keys)

    config = {}
    for key, (parser, default) in _KNOWN_KEYS.items():
        if key in raw:
            try:
                config[key] = parser(raw[key])
            except ValueError as exc:
                problems.append(f"{key}: {exc}")
        else:
            config[key] = default

    if config.get("out.dir") is None:
        problems.append("out.dir is required")
    has_name = config.get("data.name") is not None
    has_path = config.get("data.path") is not None
    if has_name == has_path:
        problems.append("exactly one of data.name and data.path is required")

    # resolve the task and per-task defaults
    if config["task"] is None:
        if has_name:
            config["task"] = "regression" if config["data.name"] in datasets.REGRESSION_NAMES else "density"
        else:
            config["task"] = "density"
    task = config["task"]
    if has_name:
        is_regression_name = config["data.name"] in datasets.REGRESSION_NAMES
        if is_regression_name != (task == "regression"):
            problems.append(f"data.name {config['data.name']!r} does not belong to task {task!r}")
    if config["data.n"] is None:
        config["data.n"] = datasets.DEFAULT_REGRESSION_N if task == "regression" else datasets.DEFAULT_DENSITY_N
    if config["data.standardize"] is None:
        config["data.standardize"] = task == "density"
    if config["train.proposal_samples"] is None:
        config["train.proposal_samples"] = 16 if task == "regression" else 1024
    if task == "density" and config["proposal.kind"] == "mdn":
        problems.append("proposal.kind mdn is only available for the regression task")

    if problems:
        raise ConfigError(problems)
    return config


def _resolved_lines(config: dict) -> list[str]:
    out = []
    for key in sorted(config):
        value = config[key]
        if value is None:
            continue
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        elif isinstance(value, bool):
            value = "true" if value else "false"
        out.append(f"{key} = {value}")
    return out


def _load_split(config: dict):
    """Dataset split plus the standardizer actually applied (or None)."""
    if config["data.name"] is not None:
        split = datasets.load_named(config["data.name"], config["data.n"], config["data.seed"])
    else:
        points = datasets.load_delimited(config["data.path"], has_header=config["data.has_header"])
        n = points.shape[0]
        n_train, n_val = (7 * n) // 10, n // 10
        sizes = (n_train, n_val, n - n_train - n_val)
        split = datasets.split_dataset(points, sizes, PortableRng(config["data.seed"]).split("split"))
    standardizer = None
    if config["data.standardize"]:
        standardizer = datasets.fit_standardizer(split.train)
        split = standardizer.transform_split(split)
    return split, standardizer


def _standardizer_payload(standardizer):
    if standardizer is None:
        return None
    return {
        "mean": serialize.fmt_vector(standardizer.mean),
        "scale": serialize.fmt_vector(standardizer.scale),
    }


def _standardizer_from_payload(payload):
    if not payload:
        return None
    return datasets.Standardizer(
        mean=serialize.parse_vector(payload["mean"]),
        scale=serialize.parse_vector(payload["scale"]),
    )


def _write_checkpoint(path: Path, payload: dict) -> None:
    payload = {"format": CHECKPOINT_FORMAT, **payload}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def _read_checkpoint(path: str) -> dict:
    with open(path) as fh:
        payload = json.load(fh)
    version = payload.get("format")
    if version != CHECKPOINT_FORMAT:
        raise ValueError(f"checkpoint format {version!r} not supported (expected {CHECKPOINT_FORMAT})")
    return payload


# -- density pipeline ---------------------------------------------------------


def _build_density_proposal(kind: str, train_data: np.ndarray):
    if kind == "standard":
        return StandardGaussian(train_data.shape[1])
    if kind == "uniform":
        bounds = evaluation.data_bounds(train_data, margin=0.1)
        return UniformBox(bounds[:, 0], bounds[:, 1])
    return fit_gaussian(train_data)


def _density_payload(model, b, standardizer, proposal, config, result) -> dict:
    return {
        "kind": "density",
        "widths": list(model.net.widths),
        "theta": [serialize.fmt(v) for v in model.theta],
        "b": serialize.fmt(b),
        "base": model.base.descriptor() if model.base is not None else None,
        "proposal": proposal.descriptor(),
        "standardizer": _standardizer_payload(standardizer),
        "best_epoch": int(result.best_epoch),
        "epochs_trained": len(result.history),
        "config": _resolved_lines(config),
    }


def load_density_checkpoint(path: str):
    """(model, b, standardizer, proposal, config lines) from a density run."""
    payload = _read_checkpoint(path)
    if payload.get("kind") != "density":
        raise ValueError(f"expected a density checkpoint, found kind {payload.get('kind')!r}")
    base = proposals.from_descriptor(payload["base"]) if payload["base"] else None
    model = MlpEnergy(list(payload["widths"]), base=base)
    model.theta = serialize.parse_vector(payload["theta"])
    b = float(payload["b"])
    standardizer = _standardizer_from_payload(payload.get("standardizer"))
    proposal = proposals.from_descriptor(payload["proposal"])
    return model, b, standardizer, proposal, payload.get("config", [])


def _train_density(config: dict, out_dir: Path) -> int:
    split, standardizer = _load_split(config)
    base = StandardGaussian(config["model.widths"][0]) if config["model.base"] == "gaussian" else None
    model = MlpEnergy(config["model.widths"], base=base, rng=PortableRng(config["model.seed"]).split("model"))
    proposal = _build_density_proposal(config["proposal.kind"], split.train)
    train_config = training.TrainConfig(
        objective=config["train.objective"],
        epochs=config["train.epochs"],
        learning_rate=config["train.learning_rate"],
        batch_size=config["train.batch_size"],
        proposal_samples=config["train.proposal_samples"],
        optimizer=config["train.optimizer"],
        seed=config["train.seed"],
        nce_nu=config["train.nce_nu"],
    )
    result = training.train_density(model, proposal, split.train, split.val, train_config)

    with open(out_dir / "metrics.csv", "w") as fh:
        fh.write("epoch,train_snl,val_snl,b,seconds\n")
        for rec in result.history:
            fh.write(f"{rec.epoch},{rec.train_snl:.12g},{rec.val_snl:.12g},{rec.b:.12g},{rec.seconds:.3f}\n")

    final_b = result.state.b
    _write_checkpoint(out_dir / "checkpoint_final.json",
                      _density_payload(model, final_b, standardizer, proposal, config, result))
    model.theta = result.best_theta
    _write_checkpoint(out_dir / "checkpoint_best.json",
                      _density_payload(model, result.best_b, standardizer, proposal, config, result))
    if result.history:
        best = result.history[result.best_epoch - 1] if result.best_epoch else result.history[-1]
        print(f"trained {len(result.history)} epochs; best val {best.val_snl:.6f} at epoch {result.best_epoch}")
    else:
        print("trained 0 epochs; wrote the initial state")
    print(f"checkpoints: {out_dir / 'checkpoint_best.json'}, {out_dir / 'checkpoint_final.json'}")
    return 0


def _eval_density(args, payload_path: str) -> int:
    model, b, standardizer, proposal, config_lines = load_density_checkpoint(payload_path)
    config = dict(line.split(" = ", 1) for line in config_lines) if config_lines else {}

    dataset_name = config.get("data.name", "")
    if args.data is not None:
        points = datasets.load_delimited(args.data, has_header=args.has_header)
        if standardizer is not None:
            points = standardizer.transform(points)
        splits = {"data": points}
        dataset_name = args.data
    elif dataset_name:
        split = datasets.load_named(dataset_name, int(config.get("data.n", datasets.DEFAULT_DENSITY_N)),
                                    int(config.get("data.seed", 0)))
        if standardizer is not None:
            split = standardizer.transform_split(split)
        splits = {"train": split.train, "val": split.val, "test": split.test}
    else:
        print("checkpoint has no named dataset; pass --data", file=sys.stderr)
        return 2

    seeds = _parse_seed_list(args.seeds)
    lines = [f"dataset {dataset_name}", f"checkpoint {payload_path}",
             f"n_samples {args.samples}", f"seeds {','.join(str(s) for s in seeds)}"]
    per_seed = []
    for seed in seeds:
        report = evaluation.evaluate(model, b, splits, proposal,
                                     n_samples=args.samples, seed=seed, dataset=dataset_name)
        per_seed.append(report)
        lines.append(f"[seed {seed}]")
        lines.extend(report.lines())
    lines.append("[aggregate]")
    for name in splits:
        for field in ("l_snl", "l_is"):
            values = np.array([getattr(s, field) for r in per_seed for s in r.splits if s.name == name])
            std = float(values.std(ddof=1)) if values.size > 1 else 0.0
            lines.append(f"{name}.{field}_mean {values.mean():.12g}")
            lines.append(f"{name}.{field}_std {std:.12g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


# -- regression pipeline ------------------------------------------------------


def _build_regression_proposal(config: dict, y_train: np.ndarray, rng: PortableRng):
    kind = config["proposal.kind"]
    if kind == "mdn":
        return MdnProposal(regression.FEATURE_WIDTHS[-1], config["proposal.components"], rng)
    if kind == "standard":
        return StandardGaussian(1)
    if kind == "uniform":
        lo, hi = float(y_train.min()), float(y_train.max())
        pad = 0.1 * max(hi - lo, 1e-12)
        return UniformBox([lo - pad], [hi + pad])
    return fit_gaussian(y_train.reshape(-1, 1))


def _regression_payload(model, normalizer, proposal, eval_proposal, standardizer, config, result) -> dict:
    return {
        "kind": "regression",
        "feature_theta": serialize.fmt_vector(model.feature_net.theta),
        "y_theta": serialize.fmt_vector(model.y_net.theta),
        "head_theta": serialize.fmt_vector(model.head.theta),
        "normalizer_phi": serialize.fmt_vector(normalizer.phi) if normalizer is not None else None,
        "proposal": proposal.descriptor(),
        "eval_proposal": eval_proposal.descriptor(),
        "standardizer": _standardizer_payload(standardizer),
        "best_epoch": int(result.best_epoch),
        "epochs_trained": len(result.history),
        "config": _resolved_lines(config),
    }


def load_regression_checkpoint(path: str):
    payload = _read_checkpoint(path)
    if payload.get("kind") != "regression":
        raise ValueError(f"expected a regression checkpoint, found kind {payload.get('kind')!r}")
    model = regression.ConditionalEnergyModel()
    model.feature_net.theta = serialize.parse_vector(payload["feature_theta"])
    model.y_net.theta = serialize.parse_vector(payload["y_theta"])
    model.head.theta = serialize.parse_vector(payload["head_theta"])
    normalizer = None
    if payload.get("normalizer_phi") is not None:
        normalizer = regression.NormalizerNet()
        normalizer.phi = serialize.parse_vector(payload["normalizer_phi"])
    proposal = proposals.from_descriptor(payload["proposal"])
    eval_proposal = proposals.from_descriptor(payload["eval_proposal"])
    standardizer = _standardizer_from_payload(payload.get("standardizer"))
    return model, normalizer, proposal, eval_proposal, standardizer, payload.get("config", [])


def _train_regression(config: dict, out_dir: Path) -> int:
    split, standardizer = _load_split(config)
    x_tr, y_tr = split.train[:, 0], split.train[:, 1]
    x_val, y_val = split.val[:, 0], split.val[:, 1]
    rng = PortableRng(config["model.seed"])
    model = regression.ConditionalEnergyModel(rng.split("model"))
    normalizer = regression.NormalizerNet(rng.split("normalizer")) if config["model.normalizer"] else None
    proposal = _build_regression_proposal(config, y_tr, rng.split("proposal-init"))
    eval_proposal = fit_gaussian(y_tr.reshape(-1, 1))
    train_config = regression.RegressionTrainConfig(
        objective=config["train.objective"],
        epochs=config["train.epochs"],
        learning_rate=config["train.learning_rate"],
        batch_size=config["train.batch_size"],
        samples_per_point=config["train.proposal_samples"],
        seed=config["train.seed"],
        nce_nu=config["train.nce_nu"],
        mdn_learning_rate=config["train.mdn_learning_rate"],
    )
    result = regression.train_regression(model, normalizer, proposal, (x_tr, y_tr), (x_val, y_val), train_config)

    with open(out_dir / "metrics.csv", "w") as fh:
        fh.write("epoch,train_objective,val_snl,seconds\n")
        for rec in result.history:
            fh.write(f"{rec.epoch},{rec.train_objective:.12g},{rec.val_snl:.12g},{rec.seconds:.3f}\n")

    _write_checkpoint(out_dir / "checkpoint_final.json",
                      _regression_payload(model, normalizer, proposal, eval_proposal, standardizer, config, result))
    model.theta = result.best_theta
    if normalizer is not None and result.best_phi is not None:
        normalizer.phi = result.best_phi
    _write_checkpoint(out_dir / "checkpoint_best.json",
                      _regression_payload(model, normalizer, proposal, eval_proposal, standardizer, config, result))
    print(f"trained {len(result.history)} epochs; best epoch {result.best_epoch}")
    print(f"checkpoints: {out_dir / 'checkpoint_best.json'}, {out_dir / 'checkpoint_final.json'}")
    return 0


def _eval_regression(args, payload_path: str) -> int:
    model, normalizer, _, eval_proposal, standardizer, config_lines = load_regression_checkpoint(payload_path)
    config = dict(line.split(" = ", 1) for line in config_lines) if config_lines else {}

    dataset_name = config.get("data.name", "")
    if args.data is not None:
        points = datasets.load_delimited(args.data, has_header=args.has_header)
        if standardizer is not None:
            points = standardizer.transform(points)
        dataset_name = args.data
    elif dataset_name:
        split = datasets.load_named(dataset_name, int(config.get("data.n", datasets.DEFAULT_REGRESSION_N)),
                                    int(config.get("data.seed", 0)))
        if standardizer is not None:
            split = standardizer.transform_split(split)
        points = split.test
    else:
        print("checkpoint has no named dataset; pass --data", file=sys.stderr)
        return 2

    pairs = (points[:, 0], points[:, 1])
    normalizer_fn = None
    if normalizer is not None:
        normalizer_fn = lambda xs: normalizer.values(model.features(xs))
    seeds = _parse_seed_list(args.seeds)
    lines = [f"dataset {dataset_name}", f"checkpoint {payload_path}",
             f"n_samples {args.samples}", f"seeds {','.join(str(s) for s in seeds)}"]
    reports = []
    for seed in seeds:
        report = regression.eval_regression_l_is(
            model, pairs, eval_proposal, n_samples=args.samples,
            rng=PortableRng(seed).split("evaluate"), normalizer_fn=normalizer_fn,
        )
        reports.append(report)
        lines.append(f"[seed {seed}]")
        lines.extend("test." + line for line in report.lines())
    lines.append("[aggregate]")
    for field in ("l_snl", "l_is"):
        values = np.array([getattr(r, field) for r in reports])
        std = float(values.std(ddof=1)) if values.size > 1 else 0.0
        lines.append(f"test.{field}_mean {values.mean():.12g}")
        lines.append(f"test.{field}_std {std:.12g}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


# -- commands -----------------------------------------------------------------


def _parse_seed_list(text: str) -> list[int]:
    return [int(p) for p in str(text).split(",") if p.strip() != ""]


def _cmd_generate(args) -> int:
    if args.dataset not in _ALL_NAMES:
        print(f"unknown dataset {args.dataset!r}", file=sys.stderr)
        return 2
    n = args.n
    if n is None:
        n = datasets.DEFAULT_REGRESSION_N if args.dataset in datasets.REGRESSION_NAMES else datasets.DEFAULT_DENSITY_N
    split = datasets.load_named(args.dataset, n, args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for part in ("train", "val", "test"):
        rows = getattr(split, part)
        path = out_dir / f"{args.dataset}_{part}.csv"
        with open(path, "w") as fh:
            for row in rows:
                fh.write(",".join(serialize.fmt(v) for v in row) + "\n")
        print(f"{path}: {rows.shape[0]} rows")
    return 0


def _cmd_train(args) -> int:
    config = read_config(args.config, args.set or [])
    out_dir = Path(config["out.dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.resolved").write_text("\n".join(_resolved_lines(config)) + "\n")
    if config["task"] == "regression":
        return _train_regression(config, out_dir)
    return _train_density(config, out_dir)


def _cmd_eval(args) -> int:
    payload = _read_checkpoint(args.checkpoint)
    if payload.get("kind") == "regression":
        return _eval_regression(args, args.checkpoint)
    return _eval_density(args, args.checkpoint)


def _cmd_grid(args) -> int:
    model, b, standardizer, proposal, _ = load_density_checkpoint(args.checkpoint)
    dim = model.net.widths[0]
    if args.bounds is not None:
        flat = [float(v) for v in args.bounds.split(",")]
        if len(flat) != 2 * dim:
            print(f"--bounds needs {2 * dim} comma-separated numbers", file=sys.stderr)
            return 2
        bounds = np.array(flat).reshape(dim, 2)
    else:
        bounds = np.tile([-4.0, 4.0], (dim, 1))
    grid = evaluation.density_grid(model, b, bounds, resolution=args.resolution)
    with open(args.out, "w") as fh:
        coords = ",".join(f"x{i + 1}" for i in range(dim))
        fh.write(f"{coords},energy,unnorm_log_density,log_density\n")
        for row, e, u, v in zip(grid.points, grid.energy, grid.unnorm_log_density, grid.log_density):
            fh.write(",".join(f"{c:.12g}" for c in row) + f",{e:.12g},{u:.12g},{v:.12g}\n")
    print(f"wrote {grid.points.shape[0]} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="snl-ebm", description="Self-normalized likelihood training for energy models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a built-in dataset and write split CSVs")
    p.add_argument("--dataset", required=True, help=f"one of {', '.join(_ALL_NAMES)}")
    p.add_argument("--n", type=int, default=None, help="total rows before the 70/10/20 split")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(run=_cmd_generate)

    p = sub.add_parser("train", help="train a model from a key = value config")
    p.add_argument("--config", default=None, help="path to the config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config key")
    p.set_defaults(run=_cmd_train)

    p = sub.add_parser("eval", help="report the likelihood bounds from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", default=None, help="score this CSV instead of the stored dataset splits")
    p.add_argument("--has-header", action="store_true")
    p.add_argument("--samples", type=int, default=20000)
    p.add_argument("--seeds", default="0", help="comma-separated evaluation seeds")
    p.add_argument("--out", default=None)
    p.set_defaults(run=_cmd_eval)

    p = sub.add_parser("grid", help="tabulate energy and log-density on a lattice")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--resolution", type=int, default=200)
    p.add_argument("--bounds", default=None, help="lo,hi per dimension, comma separated")
    p.set_defaults(run=_cmd_grid)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (SnlError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
