"""Command-line surface for the ifmixup laboratory.

Subcommands: stats, mix, recover, audit, check-independence, train, cv,
sweep, plot. Exit codes: 0 success, 1 domain error (bad data, failed
recovery), 2 usage error (unknown command or flag).

The train/cv/sweep commands read a single JSON configuration document; any
flag given on the command line overrides the document, which overrides the
built-in defaults. The document's "dataset" block points at a TUDataset
directory (or requests the bundled synthetic generator), and every other
key matches a TrainConfig field:

    {
      "dataset": {"directory": "data/MUTAG", "name": "MUTAG"},
      "model": {"arch": "gin", "k": 5, "hidden": 64},
      "augment": {"kind": "if_mixup", "beta": [20, 1]},
      "epochs": 350, "seed": 0,
      "out": "runs/mutag_ifmixup"
    }
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .graphs import GraphDataset, feature_vocabulary, validate_graph
from .mixing import SWEEP_BETAS, BetaParams, mix_items, sample_lambda
from .models import save_checkpoint
from .plots import SweepBarRow, emit_plot_data
from .recovery import HALF_GUARD, RecoveryError, intrusion_audit, recover_pair
from .training import (
    TrainConfig,
    cross_validate,
    derive_rng,
    metrics_to_csv,
    load_metrics_csv,
    stratified_folds,
    summary_to_json,
    sweep,
    train_config_from_dict,
    train_single,
)
from .tudataset import (
    ParseError,
    compare_table5,
    dataset_stats,
    encode_node_features,
    load_dataset,
    make_synthetic_molecules,
    read_weighted_graph,
    write_weighted_graph,
)

MIXED_NAME = "MIXED"
_DATASET_KEYS = {"directory", "name", "encoding", "synthetic", "num_graphs", "seed"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifmixup",
        description="Graph mixup laboratory: mixing, recovery, training, plots.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="dataset statistics and reference comparison")
    p.add_argument("directory", help="TUDataset directory")
    p.add_argument("name", help="dataset name (file prefix)")
    p.add_argument("--encoding", choices=["one_hot_labels", "one_hot_degree"], default=None)
    p.add_argument("--json", dest="json_out", default=None, help="also write stats as JSON")

    p = sub.add_parser("mix", help="emit one mixed sample as files")
    p.add_argument("directory")
    p.add_argument("name")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=1.0, help="Beta alpha for lambda")
    p.add_argument("--beta", type=float, default=1.0, help="Beta beta for lambda")
    p.add_argument("--encoding", choices=["one_hot_labels", "one_hot_degree"], default=None)
    p.add_argument("--out", required=True, help="output directory for the mixed sample")

    p = sub.add_parser("recover", help="recover the source pair from an emitted mix")
    p.add_argument("mixed_dir", help="directory written by the mix command")

    p = sub.add_parser("audit", help="empirical intrusion audit")
    p.add_argument("directory")
    p.add_argument("name")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--encoding", choices=["one_hot_labels", "one_hot_degree"], default=None)

    p = sub.add_parser("check-independence", help="test the feature-recovery assumptions")
    p.add_argument("directory")
    p.add_argument("name")
    p.add_argument("--encoding", choices=["one_hot_labels", "one_hot_degree"], default=None)

    for cmd, help_text in (
        ("train", "single split training run"),
        ("cv", "repeated stratified cross-validation"),
    ):
        p = sub.add_parser(cmd, help=help_text)
        p.add_argument("config", help="JSON configuration document")
        p.add_argument("--epochs", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--runs", type=int, default=None)
        p.add_argument("--folds", type=int, default=None)
        p.add_argument("--out", default=None, help="output path prefix")

    p = sub.add_parser("sweep", help="cross-validate along one axis")
    p.add_argument("config")
    p.add_argument("--axis", choices=["beta", "layers"], required=True)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--runs", type=int, default=None)
    p.add_argument("--folds", type=int, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("plot", help="CSV + SVG from a metrics file, or 'beta' densities")
    p.add_argument("source", help="path to a metrics CSV, or the literal 'beta'")
    p.add_argument("--out", required=True, help="output base path (no extension)")

    return parser


def _load_for_command(directory: str, name: str, encoding: str | None) -> GraphDataset:
    return load_dataset(directory, name, encoding)


def _cmd_stats(args) -> int:
    ds = _load_for_command(args.directory, args.name, args.encoding)
    stats = dataset_stats(ds)
    print(stats.to_text())
    check = compare_table5(stats)
    if check is not None:
        print(check.to_text())
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(stats.to_json() + "\n")
        print(f"wrote {args.json_out}")
    return 0


def _cmd_mix(args) -> int:
    ds = _load_for_command(args.directory, args.name, args.encoding)
    params = BetaParams(args.alpha, args.beta)
    rng = np.random.default_rng(args.seed)
    ia, ib = int(rng.integers(len(ds))), int(rng.integers(len(ds)))
    lam = sample_lambda(params, rng)
    while abs(lam - 0.5) < HALF_GUARD:
        lam = sample_lambda(params, rng)
    mixed = mix_items(ds.items[ia], ds.items[ib], lam, source_ids=(ia, ib))

    write_weighted_graph(mixed.graph, args.out, MIXED_NAME)
    meta = {
        "format": "ifmixup-mixed-sample",
        "version": 1,
        "dataset": {
            "directory": os.path.abspath(args.directory),
            "name": args.name,
            "encoding": args.encoding,
        },
        "lam": mixed.lam,
        "label": mixed.label.p.tolist(),
        "alpha": args.alpha,
        "beta": args.beta,
        "seed": args.seed,
        "source_indices": [ia, ib],
        "source_sizes": [ds.items[ia][0].n, ds.items[ib][0].n],
    }
    meta_path = os.path.join(args.out, f"{MIXED_NAME}_meta.json")
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2)
    print(
        f"mixed graphs {ia} (n={meta['source_sizes'][0]}) and {ib} "
        f"(n={meta['source_sizes'][1]}) of {args.name} with lambda={lam!r}"
    )
    print(f"wrote {args.out}/{MIXED_NAME}_* and {meta_path}")
    return 0


def _cmd_recover(args) -> int:
    meta_path = os.path.join(args.mixed_dir, f"{MIXED_NAME}_meta.json")
    if not os.path.exists(meta_path):
        raise ParseError(f"missing sidecar {meta_path}; is this a mix output directory?")
    with open(meta_path, encoding="utf-8") as fh:
        meta = json.load(fh)
    if meta.get("format") != "ifmixup-mixed-sample":
        raise ParseError(f"{meta_path}: not a mixed-sample sidecar")
    mixed = read_weighted_graph(args.mixed_dir, MIXED_NAME)
    problems = validate_graph(mixed)
    if problems:
        raise ParseError(f"{args.mixed_dir}: invalid mixed graph: {problems[0]}")

    ds_doc = meta["dataset"]
    ds = _load_for_command(ds_doc["directory"], ds_doc["name"], ds_doc.get("encoding"))
    basis = feature_vocabulary(ds)
    mode = "independent" if basis.vocabulary_independent() else "basis"
    rec = recover_pair(mixed, basis, mode=mode)

    print(f"recovery mode: {mode}")
    if rec.sources_identical:
        print(f"sources identical: single graph with n={rec.graph_a.n}; lambda undetermined")
    else:
        print(
            f"recovered lambda={rec.lam!r} (canonical < 0.5); "
            f"sources n={rec.graph_a.n} and n={rec.graph_b.n}"
        )
    recorded = float(meta["lam"])
    ia, ib = meta["source_indices"]
    ga, gb = ds.items[ia][0], ds.items[ib][0]
    if rec.sources_identical:
        ok = np.array_equal(ga.e, gb.e) and np.allclose(ga.v, gb.v, atol=1e-9)
    else:
        direct = (
            abs(rec.lam - recorded) <= 1e-9
            and np.array_equal(rec.graph_a.e, ga.e)
            and np.array_equal(rec.graph_b.e, gb.e)
            and np.allclose(rec.graph_a.v, ga.v, atol=1e-9)
            and np.allclose(rec.graph_b.v, gb.v, atol=1e-9)
        )
        mirrored = (
            abs(rec.lam - (1.0 - recorded)) <= 1e-9
            and np.array_equal(rec.graph_a.e, gb.e)
            and np.array_equal(rec.graph_b.e, ga.e)
            and np.allclose(rec.graph_a.v, gb.v, atol=1e-9)
            and np.allclose(rec.graph_b.v, ga.v, atol=1e-9)
        )
        ok = direct or mirrored
    print(f"matches recorded sources: {'yes' if ok else 'NO'}")
    if not ok:
        raise RecoveryError("recovered pair does not match the recorded sources")
    return 0


def _cmd_audit(args) -> int:
    ds = _load_for_command(args.directory, args.name, args.encoding)
    report = intrusion_audit(
        ds,
        trials=args.trials,
        params=BetaParams(args.alpha, args.beta),
        rng=np.random.default_rng(args.seed),
    )
    print(report.to_text())
    if report.assumption_ok and not report.ok():
        return 1
    return 0


def _cmd_check_independence(args) -> int:
    ds = _load_for_command(args.directory, args.name, args.encoding)
    basis = feature_vocabulary(ds)
    v_ok = basis.vocabulary_independent()
    t_ok = basis.t_set_independent()
    print(f"dataset:                 {ds.name}")
    print(f"vocabulary size:         {basis.vocabulary.shape[0]} (d={basis.vocabulary.shape[1]})")
    print(f"vocabulary rank:         {basis.rank}")
    print(f"vocabulary independent:  {'yes' if v_ok else 'no'}")
    print(f"coefficient set independent: {'yes' if t_ok else 'no'}")
    if v_ok:
        print("recovery assumption satisfied in independent mode")
    elif t_ok:
        print("recovery assumption satisfied in basis mode")
    else:
        print("recovery assumptions NOT satisfied: mixes may not be invertible")
    return 0


def _read_config(path: str) -> dict:
    if not os.path.exists(path):
        raise ParseError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: config must be a JSON object")
    return doc


def _dataset_from_config(doc: dict, config_path: str) -> GraphDataset:
    ds_doc = doc.get("dataset")
    if not isinstance(ds_doc, dict):
        raise ParseError(f"{config_path}: missing 'dataset' object")
    unknown = set(ds_doc) - _DATASET_KEYS
    if unknown:
        raise ParseError(f"{config_path}: unknown dataset keys {sorted(unknown)}")
    if ds_doc.get("synthetic"):
        parsed = make_synthetic_molecules(
            num_graphs=int(ds_doc.get("num_graphs", 188)),
            seed=int(ds_doc.get("seed", 7)),
        )
        return encode_node_features(parsed, "one_hot_labels")
    for key in ("directory", "name"):
        if key not in ds_doc:
            raise ParseError(f"{config_path}: dataset block needs {key!r}")
    return load_dataset(ds_doc["directory"], ds_doc["name"], ds_doc.get("encoding"))


def _train_config_from_doc(doc: dict, args) -> tuple[TrainConfig, str | None]:
    body = {k: v for k, v in doc.items() if k not in ("dataset", "out")}
    cfg = train_config_from_dict(body)
    for flag in ("epochs", "seed", "runs", "folds"):
        value = getattr(args, flag, None)
        if value is not None:
            cfg = type(cfg)(**{**_cfg_dict(cfg), flag: value})
    out = args.out if args.out is not None else doc.get("out")
    return cfg, out


def _cfg_dict(cfg: TrainConfig) -> dict:
    return {
        "model": cfg.model,
        "augment": cfg.augment,
        "lr0": cfg.lr0,
        "batch_size": cfg.batch_size,
        "epochs": cfg.epochs,
        "folds": cfg.folds,
        "runs": cfg.runs,
        "seed": cfg.seed,
        "weight_decay": cfg.weight_decay,
        "shuffle_nodes_before_mix": cfg.shuffle_nodes_before_mix,
        "audit_mixes": cfg.audit_mixes,
    }


def _cmd_train(args) -> int:
    doc = _read_config(args.config)
    ds = _dataset_from_config(doc, args.config)
    cfg, out = _train_config_from_doc(doc, args)

    class_indices = [y.argmax() for y in ds.labels()]
    folds = stratified_folds(class_indices, cfg.folds, np.random.default_rng(cfg.seed))
    val_items = [ds.items[i] for i in folds[0]]
    train_items = [ds.items[i] for f in folds[1:] for i in f]
    print(
        f"training on {len(train_items)} graphs, validating on {len(val_items)} "
        f"({ds.name}, {cfg.model.arch.upper()} K={cfg.model.k}, augment={cfg.augment.kind})"
    )

    def log_fn(epoch, lr, loss, acc):
        print(f"epoch {epoch + 1:>4}/{cfg.epochs}  lr={lr:.6g}  loss={loss:.4f}  val_acc={acc:.4f}")

    params, log = train_single(train_items, val_items, cfg, derive_rng(cfg.seed, 0, 0), log_fn)
    print(f"final: loss={log.train_loss[-1]:.4f} val_acc={log.val_acc[-1]:.4f}")
    if out:
        os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
        metrics_to_csv(log, f"{out}_metrics.csv")
        save_checkpoint(params, f"{out}_checkpoint.json")
        print(f"wrote {out}_metrics.csv and {out}_checkpoint.json")
    return 0


def _cmd_cv(args) -> int:
    doc = _read_config(args.config)
    ds = _dataset_from_config(doc, args.config)
    cfg, out = _train_config_from_doc(doc, args)
    print(
        f"{cfg.runs} runs of {cfg.folds}-fold cross-validation on {ds.name} "
        f"({cfg.model.arch.upper()} K={cfg.model.k}, augment={cfg.augment.kind})"
    )

    def log_fn(run, fold, acc):
        print(f"run {run + 1}/{cfg.runs} fold {fold + 1}/{cfg.folds}: acc={acc:.4f}")

    log = cross_validate(ds, cfg, log_fn)
    print(f"accuracy: {log.mean:.4f} +- {log.std:.4f} over {cfg.runs} runs")
    if out:
        os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
        summary_to_json(log, cfg, f"{out}_summary.json")
        print(f"wrote {out}_summary.json")
    return 0


def _cmd_sweep(args) -> int:
    doc = _read_config(args.config)
    ds = _dataset_from_config(doc, args.config)
    cfg, out = _train_config_from_doc(doc, args)
    cells = sweep(ds, cfg, args.axis)
    rows = []
    for cell in cells:
        method = cell.config.augment.kind
        print(f"{cell.label:<14} {cell.metrics.mean:.4f} +- {cell.metrics.std:.4f}")
        rows.append(SweepBarRow(ds.name, method, cell.label, cell.metrics.mean, cell.metrics.std))
    if out:
        os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
        csv_path, svg_path = emit_plot_data("sweep_bars", rows, out)
        print(f"wrote {csv_path} and {svg_path}")
    return 0


def _cmd_plot(args) -> int:
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    if args.source == "beta":
        csv_path, svg_path = emit_plot_data("beta_density", SWEEP_BETAS, args.out)
    else:
        if not os.path.exists(args.source):
            raise ParseError(f"metrics file not found: {args.source}")
        try:
            log = load_metrics_csv(args.source)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        csv_path, svg_path = emit_plot_data("loss_curve", log, args.out)
    print(f"wrote {csv_path} and {svg_path}")
    return 0


_HANDLERS = {
    "stats": _cmd_stats,
    "mix": _cmd_mix,
    "recover": _cmd_recover,
    "audit": _cmd_audit,
    "check-independence": _cmd_check_independence,
    "train": _cmd_train,
    "cv": _cmd_cv,
    "sweep": _cmd_sweep,
    "plot": _cmd_plot,
}


def run_command(argv: list[str] | None = None) -> int:
    """Parse and execute one command; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 2 on usage error, 0 on --help
        return int(exc.code) if exc.code is not None else 0
    try:
        return _HANDLERS[args.command](args)
    except (ParseError, RecoveryError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
