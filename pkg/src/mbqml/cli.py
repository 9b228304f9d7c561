"""Command line entry points.

`mbqml run config.json` executes any experiment kind from a JSON config;
`mbqml validate config.json` reports config problems without running.
`mbqml kernel-svm` and `mbqml hea` are flag-driven shortcuts for those two
experiments. Results go to a JSON manifest plus CSV tables; stdout carries a
single summary line, diagnostics go to stderr. Exit codes: 0 on completion
(non-convergence is recorded, not fatal), 2 on validation problems, 1 on
IO or parse failures.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import ConfigError, run_experiment, validate_config, write_outputs


def _load_config(path: str) -> dict:
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ValueError("config must be a JSON object")
    return cfg


def _summary_line(cfg: dict, summary: dict, written: list[str]) -> str:
    kind = cfg["kind"]
    if kind == "kernel-svm":
        core = (
            f"dataset={summary['dataset']} train_acc={summary['train_accuracy']:.3f} "
            f"test_acc={summary['test_accuracy']:.3f}"
        )
    elif kind == "hea":
        core = (
            f"success={summary['success']} evaluations={summary['evaluations']} "
            f"best_loss={summary['best_loss']:.3e}"
        )
    elif kind == "gate-learn":
        core = (
            f"seeds={cfg['seeds']} mean_final_test={summary['mean_final_test']:.3e} "
            f"converged={summary['converged_below_1e_3']}"
        )
    elif kind == "teleport":
        core = f"seeds={cfg['seeds']} converged={summary['converged_below_1e_3']}"
    elif kind == "qfi":
        core = f"labeled_acc={summary['labeled_accuracy']:.3f}"
        if "haar_accuracy" in summary:
            core += f" haar_acc={summary['haar_accuracy']:.3f}"
    elif kind in ("noise-sweep", "depolarizing-sweep"):
        fids = " ".join(
            f"{p}:{m:.3f}" for p, m in zip(summary["p"], summary["mean_clean_fidelity"])
        )
        core = f"clean_fidelity {fids}"
    else:
        core = f"dim={summary['dim']} variance={summary['empirical_variance']:.4f}"
    return f"{kind} seed={cfg['seed']} {core} -> {written[0]}"


def _execute(cfg: dict, out_override: str | None) -> int:
    diags = validate_config(cfg)
    if diags:
        for d in diags:
            print(f"config error: {d}", file=sys.stderr)
        return 2
    resolved, summary, tables = run_experiment(cfg)
    out = out_override or resolved.get("out") or f"{resolved['kind']}-seed{resolved['seed']}.json"
    resolved["out"] = out
    try:
        written = write_outputs(resolved, summary, tables, out)
    except OSError as exc:
        print(f"cannot write outputs: {exc}", file=sys.stderr)
        return 1
    print(_summary_line(resolved, summary, written))
    return 0


def _cmd_run(args) -> int:
    try:
        cfg = _load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 1
    if args.seed is not None:
        cfg["seed"] = args.seed
    return _execute(cfg, args.out)


def _cmd_validate(args) -> int:
    try:
        cfg = _load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return 1
    diags = validate_config(cfg)
    if diags:
        for d in diags:
            print(d)
        return 2
    print("ok")
    return 0


def _cmd_kernel_svm(args) -> int:
    cfg = {
        "kind": "kernel-svm",
        "dataset": args.dataset,
        "n_train": args.n_train,
        "n_test": args.n_test,
        "noise": args.noise,
        "seed": args.seed,
    }
    return _execute(cfg, args.out)


def _cmd_hea(args) -> int:
    cfg = {
        "kind": "hea",
        "target": args.target,
        "epsilon": args.epsilon,
        "lmax": args.lmax,
        "delta": args.delta,
        "resets": args.resets,
        "seed": args.seed,
    }
    return _execute(cfg, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mbqml", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None)
    p_run.set_defaults(func=_cmd_run)

    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config")
    p_val.set_defaults(func=_cmd_validate)

    p_svm = sub.add_parser("kernel-svm", help="train the quantum-kernel SVM")
    p_svm.add_argument("--dataset", default="circles", choices=["circles", "moons", "blobs"])
    p_svm.add_argument("--n-train", type=int, default=160)
    p_svm.add_argument("--n-test", type=int, default=40)
    p_svm.add_argument("--noise", type=float, default=0.1)
    p_svm.add_argument("--seed", type=int, default=0)
    p_svm.add_argument("--out", default="kernel-svm.json")
    p_svm.set_defaults(func=_cmd_kernel_svm)

    p_hea = sub.add_parser("hea", help="discrete greedy angle search")
    p_hea.add_argument("--target", default="t-isingxx")
    p_hea.add_argument("--epsilon", type=float, default=0.0)
    p_hea.add_argument("--lmax", type=int, default=4)
    p_hea.add_argument("--delta", type=float, default=1e-3)
    p_hea.add_argument("--resets", type=int, default=5)
    p_hea.add_argument("--seed", type=int, default=0)
    p_hea.add_argument("--out", default="hea-log.csv")
    p_hea.set_defaults(func=_cmd_hea)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for d in exc.diagnostics:
            print(f"config error: {d}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
