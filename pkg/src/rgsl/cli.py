"""Command-line harness: diagnose, cluster, classify, robustness.

Settings are assembled in four layers, later layers winning: built-in
defaults, per-dataset reference presets (when the dataset directory name is
a known benchmark), a flat key=value config file, and explicit CLI flags.
Metrics come out as JSON-lines records with a fixed field order so reruns
with the same settings are byte-identical.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .datasets import (
    DatasetError,
    format_summary,
    load_dataset,
    preset_for,
    resolve_dataset_dir,
    save_affinity,
)
from .downstream import lgc_classify, spectral_clustering
from .evaluation import (
    classification_accuracy,
    clustering_accuracy,
    dense_split,
    macro_f1,
    nmi,
    perturb_edges,
)
from .filtering import high_pass_filter
from .graph import (
    DiagnosticsReport,
    dirichlet_energy,
    homophily,
    normalized_laplacian,
    outlier_energy_ratio,
    sparsity,
)
from .learner import VARIANTS, RobustGraphLearner

TASKS = ("diagnose", "cluster", "classify", "robustness")


class ConfigError(Exception):
    """Invalid or inconsistent experiment configuration."""


def _parse_bool(text):
    lowered = str(text).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_float_list(text):
    return [float(v) for v in str(text).split(",") if v.strip() != ""]


def _parse_int_list(text):
    return [int(v) for v in str(text).split(",") if v.strip() != ""]


def _parse_str_list(text):
    return [v.strip() for v in str(text).split(",") if v.strip() != ""]


# key -> coercion used for config-file entries; CLI flags carry their own types
SETTING_PARSERS = {
    "dataset": str,
    "task": str,
    "out": str,
    "k": int,
    "alpha": float,
    "beta": float,
    "epsilon": float,
    "lr": float,
    "epochs": int,
    "tol": float,
    "seed": int,
    "gradient_mode": str,
    "variant": str,
    "knn_k": int,
    "mask_every": int,
    "normalize_features": _parse_bool,
    "c": int,
    "seeds": int,
    "gamma": float,
    "split_seed": _parse_int_list,
    "lgc_self_loop": _parse_bool,
    "r": _parse_float_list,
    "dump_threshold": float,
}

DEFAULTS = {
    "out": "rgsl-out",
    "k": 2,
    "alpha": 1.0,
    "beta": 1.0,
    "epsilon": 0.001,
    "lr": 0.01,
    "epochs": 500,
    "tol": 1e-5,
    "seed": 0,
    "gradient_mode": "paper",
    "variant": "rgsl",
    "knn_k": 10,
    "mask_every": 1,
    "normalize_features": False,
    "seeds": 10,
    "gamma": 0.1,
    "split_seed": [0],
    "lgc_self_loop": False,
    "r": [0.25, 0.5, 1.0],
    "dump_threshold": 1e-8,
}


def parse_config_file(path):
    """Flat key = value text, '#' comments, unknown keys rejected."""
    entries = {}
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key not in SETTING_PARSERS:
                raise ConfigError(f"{path}:{lineno}: unknown setting {key!r}")
            try:
                entries[key] = SETTING_PARSERS[key](value)
            except (ValueError, ConfigError) as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}")
    return entries


def merge_settings(task, cli_values):
    """defaults < dataset preset < config file < CLI flags."""
    settings = dict(DEFAULTS)
    settings["task"] = task

    config_entries = {}
    if cli_values.get("config"):
        config_entries = parse_config_file(cli_values["config"])

    dataset = cli_values.get("dataset") or config_entries.get("dataset")
    if not dataset:
        raise ConfigError("no dataset given (flag --dataset or config key 'dataset')")
    dataset_dir = resolve_dataset_dir(dataset)
    settings["dataset"] = str(dataset_dir)
    settings.update(preset_for(dataset_dir))

    for key, value in config_entries.items():
        if key in ("dataset", "task"):
            continue
        settings[key] = value

    for key, value in cli_values.items():
        if key in ("config", "dataset") or value is None:
            continue
        settings[key] = value

    if settings["variant"] not in VARIANTS:
        raise ConfigError(f"variant must be one of {VARIANTS}, got {settings['variant']!r}")
    if settings["task"] == "cluster" and settings.get("c") is None:
        raise ConfigError("cluster task needs the number of clusters (--c)")
    return settings


def build_learner(settings, variant=None):
    return RobustGraphLearner(
        k=settings["k"],
        alpha=settings["alpha"],
        beta=settings["beta"],
        epsilon=settings["epsilon"],
        lr=settings["lr"],
        max_epochs=settings["epochs"],
        tol=settings["tol"],
        seed=settings["seed"],
        gradient_mode=settings["gradient_mode"],
        variant=variant or settings["variant"],
        knn_k=settings["knn_k"],
        mask_every=settings["mask_every"],
        normalize_features=settings["normalize_features"],
    )


def _write_records(out_dir, records):
    path = out_dir / "metrics.jsonl"
    with path.open("w") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    return path


def _print_table(records, columns):
    if not records:
        return
    widths = {c: max(len(c), max(len(_fmt(r.get(c))) for r in records)) for c in columns}
    header = "  ".join(c.ljust(widths[c]) for c in columns)
    print(header)
    print("-" * len(header))
    for r in records:
        print("  ".join(_fmt(r.get(c)).ljust(widths[c]) for c in columns))


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def cmd_diagnose(settings):
    g = load_dataset(settings["dataset"], verbose=True)
    L = normalized_laplacian(g)
    filtered = high_pass_filter(g.features, L, settings["k"])
    ratio, count = outlier_energy_ratio(g, filtered.S)
    report = DiagnosticsReport(
        homophily=homophily(g),
        sparsity=sparsity(g),
        dirichlet_energy=dirichlet_energy(filtered.S, g, laplacian=L),
        outlier_ratio=ratio,
        outlier_count=count,
    )
    out_dir = Path(settings["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {"dataset": Path(settings["dataset"]).name, "k": settings["k"]}
    payload.update(report.as_dict())
    with (out_dir / "diagnostics.json").open("w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    for key, value in payload.items():
        print(f"{key}: {_fmt(value)}")
    return [payload]


def cmd_cluster(settings):
    g = load_dataset(settings["dataset"], verbose=True)
    if g.labels is None:
        raise DatasetError("clustering evaluation needs labels")
    learner = build_learner(settings).fit(g)
    out_dir = Path(settings["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    save_affinity(out_dir / "learned_graph.txt", learner.affinity_, settings["dump_threshold"])

    records = []
    for seed in range(settings["seeds"]):
        assignment = spectral_clustering(learner.affinity_, settings["c"], seed=seed)
        np.savetxt(out_dir / f"labels_seed{seed}.txt", assignment.labels, fmt="%d")
        records.append(
            {
                "task": "cluster",
                "dataset": Path(settings["dataset"]).name,
                "variant": settings["variant"],
                "seed": seed,
                "acc": clustering_accuracy(assignment.labels, g.labels),
                "nmi": nmi(assignment.labels, g.labels),
                "f1": macro_f1(assignment.labels, g.labels),
                "inertia": assignment.inertia,
                "epochs_run": len(learner.loss_history_) - 1,
                "final_loss": learner.loss_history_[-1],
            }
        )
    _write_records(out_dir, records)
    _print_table(records, ["seed", "acc", "nmi", "f1"])
    accs = [r["acc"] for r in records]
    print(f"mean acc over {len(accs)} seed(s): {np.mean(accs):.4f} +/- {np.std(accs):.4f}")
    return records


def cmd_classify(settings):
    g = load_dataset(settings["dataset"], verbose=True)
    if g.labels is None:
        raise DatasetError("classification needs labels")
    learner = build_learner(settings).fit(g)
    out_dir = Path(settings["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    save_affinity(out_dir / "learned_graph.txt", learner.affinity_, settings["dump_threshold"])

    records = []
    for split_seed in settings["split_seed"]:
        split = dense_split(g.labels, split_seed)
        train_mask, val_mask, test_mask = split.masks(g.n)
        output = lgc_classify(
            learner.affinity_,
            g.labels,
            train_mask,
            gamma=settings["gamma"],
            add_self_loop=settings["lgc_self_loop"],
        )
        np.savetxt(out_dir / f"predictions_split{split_seed}.txt", output.predictions, fmt="%d")
        records.append(
            {
                "task": "classify",
                "dataset": Path(settings["dataset"]).name,
                "variant": settings["variant"],
                "split_seed": split_seed,
                "gamma": settings["gamma"],
                "val_accuracy": classification_accuracy(output.predictions, g.labels, val_mask),
                "test_accuracy": classification_accuracy(output.predictions, g.labels, test_mask),
            }
        )
    _write_records(out_dir, records)
    _print_table(records, ["split_seed", "val_accuracy", "test_accuracy"])
    accs = [r["test_accuracy"] for r in records]
    print(f"mean test accuracy over {len(accs)} split(s): {np.mean(accs):.4f} +/- {np.std(accs):.4f}")
    return records


def cmd_robustness(settings, variants=None):
    g = load_dataset(settings["dataset"], verbose=True)
    if g.labels is None:
        raise DatasetError("the robustness protocol needs labels")
    variants = variants or [settings["variant"]]
    out_dir = Path(settings["out"])
    out_dir.mkdir(parents=True, exist_ok=True)

    rows = []
    for variant in variants:
        if variant not in VARIANTS:
            raise ConfigError(f"unknown variant {variant!r}")
        for rate in settings["r"]:
            for seed in range(settings["seeds"]):
                noisy = perturb_edges(g, rate, seed)
                learner = build_learner(settings, variant=variant).fit(noisy)
                split = dense_split(g.labels, seed)
                train_mask, _, test_mask = split.masks(g.n)
                output = lgc_classify(
                    learner.affinity_,
                    g.labels,
                    train_mask,
                    gamma=settings["gamma"],
                    add_self_loop=settings["lgc_self_loop"],
                )
                accuracy = classification_accuracy(output.predictions, g.labels, test_mask)
                rows.append((variant, rate, seed, accuracy))

    csv_path = out_dir / "robustness.csv"
    with csv_path.open("w") as fh:
        fh.write("variant,r,seed,accuracy\n")
        for variant, rate, seed, accuracy in rows:
            fh.write(f"{variant},{rate:g},{seed},{accuracy!r}\n")
    for variant in variants:
        for rate in settings["r"]:
            accs = [a for v, rr, _, a in rows if v == variant and rr == rate]
            print(f"{variant} r={rate:g}: mean accuracy {np.mean(accs):.4f} +/- {np.std(accs):.4f}")
    return rows


class _Parser(argparse.ArgumentParser):
    """argparse reports usage problems as ConfigError (exit code 1)."""

    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(
        prog="rgsl",
        description="Learn a robust graph from heterophilic data and evaluate it.",
    )
    sub = parser.add_subparsers(dest="task", required=True, parser_class=_Parser)

    def add_common(p):
        p.add_argument("--dataset", help="dataset directory or name under $RGSL_DATA_DIR")
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--out", help="output directory (default rgsl-out)")
        p.add_argument("--k", type=int, help="high-pass filter order")
        p.add_argument("--alpha", type=float, help="adaptive-norm parameter")
        p.add_argument("--beta", type=float, help="regularizer trade-off")
        p.add_argument("--epsilon", type=float, help="positive-mask threshold")
        p.add_argument("--lr", type=float, help="Adam learning rate")
        p.add_argument("--epochs", type=int, help="maximum optimization epochs")
        p.add_argument("--tol", type=float, help="relative loss-change tolerance")
        p.add_argument("--seed", type=int, help="base random seed")
        p.add_argument("--gradient-mode", dest="gradient_mode", choices=["paper", "exact"])
        p.add_argument("--knn-k", dest="knn_k", type=int, help="neighbors for the knn variant")
        p.add_argument("--mask-every", dest="mask_every", type=int,
                       help="epochs between positive-mask refreshes")
        p.add_argument("--normalize-features", dest="normalize_features",
                       action=argparse.BooleanOptionalAction, default=None)
        p.add_argument("--dump-threshold", dest="dump_threshold", type=float,
                       help="smallest affinity entry written to the dump")

    p_diag = sub.add_parser("diagnose", help="dataset statistics and energy diagnostics")
    add_common(p_diag)

    p_cluster = sub.add_parser("cluster", help="learn a graph and spectrally cluster it")
    add_common(p_cluster)
    p_cluster.add_argument("--variant", choices=list(VARIANTS))
    p_cluster.add_argument("--c", type=int, help="number of clusters")
    p_cluster.add_argument("--seeds", type=int, help="number of clustering seeds")

    p_classify = sub.add_parser("classify", help="learn a graph and propagate labels")
    add_common(p_classify)
    p_classify.add_argument("--variant", choices=list(VARIANTS))
    p_classify.add_argument("--gamma", type=float, help="label-fidelity trade-off")
    p_classify.add_argument("--split-seed", dest="split_seed", type=_parse_int_list,
                            help="comma-separated dense-split seeds")
    p_classify.add_argument("--lgc-self-loop", dest="lgc_self_loop",
                            action=argparse.BooleanOptionalAction, default=None)

    p_rob = sub.add_parser("robustness", help="classification accuracy under edge noise")
    add_common(p_rob)
    p_rob.add_argument("--variant", type=str, help="comma-separated variant list")
    p_rob.add_argument("--r", type=_parse_float_list, help="comma-separated noise rates")
    p_rob.add_argument("--seeds", type=int, help="number of noise seeds")
    p_rob.add_argument("--gamma", type=float, help="label-fidelity trade-off")
    p_rob.add_argument("--lgc-self-loop", dest="lgc_self_loop",
                       action=argparse.BooleanOptionalAction, default=None)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        values = vars(args)
        task = values.pop("task")

        variants = None
        if task == "robustness" and values.get("variant"):
            variants = _parse_str_list(values.pop("variant"))
            values["variant"] = variants[0]

        settings = merge_settings(task, values)
        if task == "diagnose":
            cmd_diagnose(settings)
        elif task == "cluster":
            cmd_cluster(settings)
        elif task == "classify":
            cmd_classify(settings)
        else:
            cmd_robustness(settings, variants=variants)
        return 0
    except (ConfigError, DatasetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # numerical/runtime failures
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
