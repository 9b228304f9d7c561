"""Config-driven experiment runners behind the command line.

Each experiment kind has a default parameter set, a validator producing
field-level diagnostics, and a runner returning (summary, tables). Outputs
are a JSON manifest embedding the fully resolved config plus one CSV per
table. Writes are atomic (temp file, then rename) and contain nothing
time-dependent, so rerunning a config reproduces files byte for byte.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile

import numpy as np

from . import hea as hea_mod
from . import kernel as kernel_mod
from . import lie, qfi, svm
from . import states
from .flow import find_flow
from .instrument import train_instrument
from .learn import GateModel, clean_test_fidelity, flip_targets, train_gate, PairDataset
from .muta import MutaLayerSpec, build_layer
from .noise import Depolarizing

KINDS = (
    "gate-learn",
    "noise-sweep",
    "depolarizing-sweep",
    "qfi",
    "teleport",
    "kernel-svm",
    "hea",
    "expressivity",
)

_DEFAULTS = {
    "gate-learn": {
        "target": "haar-1q",
        "angle": np.pi / 2,
        "seeds": 20,
        "steps": 500,
        "n_pairs": 10,
        "n_train": 7,
        "lr": 0.05,
    },
    "noise-sweep": {
        "p_values": [round(0.05 * k, 2) for k in range(11)],
        "runs": 5,
        "n_pairs": 100,
        "n_train": 70,
        "steps": 400,
        "lr": 0.05,
    },
    "depolarizing-sweep": {
        "p_values": [0.2],
        "runs": 5,
        "n_pairs": 6,
        "n_train": 4,
        "steps": 250,
        "lr": 0.05,
    },
    "qfi": {
        "n_labeled": 100,
        "train_fraction": 0.8,
        "n_haar": 500,
        "steps": 1500,
        "lr": 0.05,
        "epsilon": 0.5,
        "band": [1.9, 2.1],
    },
    "teleport": {"seeds": 10, "n_train": 35, "n_test": 15, "steps": 250, "lr": 0.05},
    "kernel-svm": {"dataset": "circles", "n_train": 160, "n_test": 40, "noise": 0.1, "C": 10.0},
    "hea": {
        "target": "t-isingxx",
        "epsilon": 0.0,
        "lmax": 4,
        "delta": 1e-3,
        "resets": 5,
        "magic": True,
        "n_pairs": 7,
    },
    "expressivity": {"wires": 2, "tip": 0, "samples": 2000},
}


class ConfigError(ValueError):
    def __init__(self, diagnostics):
        super().__init__("; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


def resolve_config(cfg: dict) -> dict:
    kind = cfg.get("kind")
    merged = dict(_DEFAULTS.get(kind, {}))
    merged.update(cfg)
    return merged


def _check_number(cfg, field, diags, *, integer=False, lo=None, hi=None):
    val = cfg.get(field)
    if val is None:
        diags.append(f"missing field: {field}")
        return None
    if integer and not isinstance(val, (int, np.integer)):
        diags.append(f"{field} must be an integer, got {val!r}")
        return None
    if not isinstance(val, (int, float, np.integer, np.floating)) or isinstance(val, bool):
        diags.append(f"{field} must be a number, got {val!r}")
        return None
    if lo is not None and val < lo:
        diags.append(f"{field} = {val} below minimum {lo}")
    if hi is not None and val > hi:
        diags.append(f"{field} = {val} above maximum {hi}")
    return val


def validate_config(cfg: dict) -> list[str]:
    """Field diagnostics; empty means runnable."""
    diags: list[str] = []
    kind = cfg.get("kind")
    if kind not in KINDS:
        diags.append(f"unknown experiment kind: {kind!r}")
        return diags
    cfg = resolve_config(cfg)
    _check_number(cfg, "seed", diags, integer=True, lo=0)
    if kind in ("gate-learn", "noise-sweep", "depolarizing-sweep", "qfi", "teleport"):
        _check_number(cfg, "steps", diags, integer=True, lo=1)
        _check_number(cfg, "lr", diags, lo=1e-6, hi=10.0)
    if kind == "gate-learn":
        if cfg["target"] not in ("haar-1q", "isingxx"):
            diags.append(f"target must be haar-1q or isingxx, got {cfg['target']!r}")
        _check_number(cfg, "seeds", diags, integer=True, lo=1)
        _check_number(cfg, "n_pairs", diags, integer=True, lo=2)
        _check_number(cfg, "n_train", diags, integer=True, lo=1)
    if kind in ("noise-sweep", "depolarizing-sweep"):
        ps = cfg.get("p_values")
        if not isinstance(ps, (list, tuple)) or not ps:
            diags.append("p_values must be a non-empty list")
        else:
            for p in ps:
                if not isinstance(p, (int, float)) or not 0.0 <= p <= 1.0:
                    diags.append(f"noise probability {p!r} outside [0, 1]")
        _check_number(cfg, "runs", diags, integer=True, lo=1)
        _check_number(cfg, "n_pairs", diags, integer=True, lo=2)
    if kind == "qfi":
        _check_number(cfg, "n_labeled", diags, integer=True, lo=10)
        _check_number(cfg, "train_fraction", diags, lo=0.1, hi=0.9)
        _check_number(cfg, "n_haar", diags, integer=True, lo=0)
        _check_number(cfg, "epsilon", diags, lo=0.0, hi=2.0)
    if kind == "teleport":
        _check_number(cfg, "seeds", diags, integer=True, lo=1)
        _check_number(cfg, "n_train", diags, integer=True, lo=1)
        _check_number(cfg, "n_test", diags, integer=True, lo=1)
    if kind == "kernel-svm":
        if cfg["dataset"] not in ("circles", "moons", "blobs"):
            diags.append(f"dataset must be circles, moons or blobs, got {cfg['dataset']!r}")
        _check_number(cfg, "n_train", diags, integer=True, lo=4)
        _check_number(cfg, "n_test", diags, integer=True, lo=2)
        _check_number(cfg, "noise", diags, lo=0.0, hi=5.0)
        _check_number(cfg, "C", diags, lo=1e-6)
    if kind == "hea":
        if cfg["target"] != "t-isingxx":
            diags.append(f"target must be t-isingxx, got {cfg['target']!r}")
        _check_number(cfg, "epsilon", diags, lo=0.0, hi=1.0)
        _check_number(cfg, "lmax", diags, integer=True, lo=1)
        _check_number(cfg, "delta", diags, lo=1e-12)
        _check_number(cfg, "resets", diags, integer=True, lo=1)
    if kind == "expressivity":
        _check_number(cfg, "samples", diags, integer=True, lo=2)
        _check_number(cfg, "wires", diags, integer=True, lo=1, hi=3)
    return diags


def _single_wire_model() -> GateModel:
    g = build_layer(MutaLayerSpec(num_wires=1)).graph
    return GateModel.all_trainable(g)


def _two_wire_model() -> GateModel:
    g = build_layer(MutaLayerSpec(num_wires=2, tip=0)).graph
    return GateModel.all_trainable(g)


def _run_gate_learn(cfg):
    base = int(cfg["seed"])
    curves_rows = []
    finals = []
    losses_by_step = []
    for k in range(int(cfg["seeds"])):
        seed = base + k
        rng = np.random.default_rng(seed)
        if cfg["target"] == "haar-1q":
            target = np.kron(states.haar_unitary(1, rng), np.eye(2))
        else:
            target = states.ising_xx(float(cfg["angle"]))
        model = _two_wire_model()
        run = train_gate(
            target,
            model,
            seed,
            n_pairs=int(cfg["n_pairs"]),
            n_train=int(cfg["n_train"]),
            steps=int(cfg["steps"]),
            lr=float(cfg["lr"]),
        )
        finals.append(run.final_test)
        losses_by_step.append((run.train_loss, run.test_loss))
        for step, (tr, te) in enumerate(zip(run.train_loss, run.test_loss)):
            curves_rows.append([seed, step, tr, te])
    train_mat = np.array([tl for tl, _ in losses_by_step])
    test_mat = np.array([te for _, te in losses_by_step])
    summary_rows = [
        [
            step,
            float(train_mat[:, step].mean()),
            float(train_mat[:, step].std(ddof=1)),
            float(test_mat[:, step].mean()),
            float(test_mat[:, step].std(ddof=1)),
        ]
        for step in range(train_mat.shape[1])
    ]
    summary = {
        "final_test_losses": finals,
        "mean_final_test": float(np.mean(finals)),
        "std_final_test": float(np.std(finals, ddof=1)) if len(finals) > 1 else 0.0,
        "converged_below_1e_3": int(sum(f < 1e-3 for f in finals)),
    }
    tables = {
        "curves": (["seed", "step", "train_loss", "test_loss"], curves_rows),
        "summary": (["step", "train_mean", "train_std", "test_mean", "test_std"], summary_rows),
    }
    return summary, tables


def _run_noise_sweep(cfg, *, depolarizing: bool):
    base = int(cfg["seed"])
    rows = []
    per_p: dict[float, list[float]] = {}
    for p in cfg["p_values"]:
        for r in range(int(cfg["runs"])):
            seed = base * 10_000 + r * 100 + int(round(float(p) * 100))
            rng = np.random.default_rng(seed)
            target = states.haar_unitary(1, rng)
            model = _single_wire_model()
            if depolarizing:
                noise = Depolarizing(float(p)) if p > 0 else None
                run = train_gate(
                    target,
                    model,
                    seed,
                    n_pairs=int(cfg["n_pairs"]),
                    n_train=int(cfg["n_train"]),
                    steps=int(cfg["steps"]),
                    lr=float(cfg["lr"]),
                    noise=noise,
                )
            else:
                dataset = PairDataset.haar_gate_pairs(
                    target, 1, int(cfg["n_pairs"]), int(cfg["n_train"]), rng
                )
                dataset = flip_targets(dataset, float(p), rng)
                run = train_gate(
                    target,
                    model,
                    seed,
                    steps=int(cfg["steps"]),
                    lr=float(cfg["lr"]),
                    dataset=dataset,
                )
            fid = clean_test_fidelity(model, run, target, seed)
            rows.append([float(p), r, seed, fid, run.final_train])
            per_p.setdefault(float(p), []).append(fid)
    summary = {
        "p": sorted(per_p),
        "mean_clean_fidelity": [float(np.mean(per_p[p])) for p in sorted(per_p)],
        "std_clean_fidelity": [
            float(np.std(per_p[p], ddof=1)) if len(per_p[p]) > 1 else 0.0 for p in sorted(per_p)
        ],
    }
    tables = {
        "sweep": (["p", "run", "seed", "clean_fidelity", "final_train_loss"], rows),
    }
    return summary, tables


def _qfi_truth(batch_states):
    h = (0.0, 0.0, 0.5)
    f_true = np.array([qfi.qfi_oracle(s, h) for s in batch_states])
    return f_true, (f_true > 2.0).astype(int)


def _run_qfi(cfg):
    seed = int(cfg["seed"])
    rng = np.random.default_rng(seed)
    half = int(cfg["n_labeled"]) // 2
    pool = qfi.sample_s1(half, rng) + qfi.sample_s2(int(cfg["n_labeled"]) - half, rng)
    families = ["s1"] * half + ["s2"] * (int(cfg["n_labeled"]) - half)
    order = rng.permutation(len(pool))
    pool = [pool[i] for i in order]
    families = [families[i] for i in order]
    n_train = int(round(float(cfg["train_fraction"]) * len(pool)))
    f_true, labels = _qfi_truth(pool)
    result = qfi.train_qfi_classifier(
        pool[:n_train],
        labels[:n_train],
        seed,
        steps=int(cfg["steps"]),
        lr=float(cfg["lr"]),
        epsilon=float(cfg["epsilon"]),
    )
    band = tuple(cfg["band"])
    acc, kept = qfi.band_excluded_accuracy(result.model, pool[n_train:], labels[n_train:], band)

    def rows_for(states_list, f_vals, labs, fams):
        batch = np.stack([s.amplitudes for s in states_list], axis=1)
        f_hat = qfi.estimate(result.model, batch)
        keep = (f_hat <= band[0]) | (f_hat >= band[1])
        pred = (f_hat > 2.0).astype(int)
        return [
            [i, fams[i], float(f_vals[i]), float(f_hat[i]), int(labs[i]), bool(keep[i]), bool(pred[i] == labs[i])]
            for i in range(len(states_list))
        ]

    labeled_rows = rows_for(pool[n_train:], f_true[n_train:], labels[n_train:], families[n_train:])
    summary = {
        "final_train_loss": result.train_loss[-1],
        "labeled_accuracy": acc,
        "labeled_kept": kept,
    }
    tables = {
        "labeled": (
            ["index", "family", "f_true", "f_hat", "label", "kept", "correct"],
            labeled_rows,
        )
    }
    if int(cfg["n_haar"]) > 0:
        haar_pool = [states.haar_state(2, rng) for _ in range(int(cfg["n_haar"]))]
        hf_true, h_labels = _qfi_truth(haar_pool)
        h_acc, h_kept = qfi.band_excluded_accuracy(result.model, haar_pool, h_labels, band)
        summary["haar_accuracy"] = h_acc
        summary["haar_kept"] = h_kept
        tables["haar"] = (
            ["index", "family", "f_true", "f_hat", "label", "kept", "correct"],
            rows_for(haar_pool, hf_true, h_labels, ["haar"] * len(haar_pool)),
        )
    return summary, tables


def _run_teleport(cfg):
    base = int(cfg["seed"])
    rows = []
    for k in range(int(cfg["seeds"])):
        seed = base + k
        run, _ = train_instrument(
            seed,
            n_train=int(cfg["n_train"]),
            n_test=int(cfg["n_test"]),
            steps=int(cfg["steps"]),
            lr=float(cfg["lr"]),
        )
        rows.append([seed, run.final_train, run.final_test])
    finals = [r[2] for r in rows]
    summary = {
        "test_infidelities": finals,
        "converged_below_1e_3": int(sum(f < 1e-3 for f in finals)),
    }
    return summary, {"runs": (["seed", "final_train", "final_test"], rows)}


def _run_kernel_svm(cfg):
    seed = int(cfg["seed"])
    rng = np.random.default_rng(seed)
    n = int(cfg["n_train"]) + int(cfg["n_test"])
    xs, ys = kernel_mod.make_dataset(cfg["dataset"], n, rng, noise=float(cfg["noise"]))
    n_train = int(cfg["n_train"])
    x_tr, y_tr = xs[:n_train], ys[:n_train]
    x_te, y_te = xs[n_train:], ys[n_train:]
    gram_tr = kernel_mod.gram(x_tr)
    model = svm.svm_train(gram_tr, y_tr, C=float(cfg["C"]), rng=np.random.default_rng(seed + 1))
    train_pred = svm.svm_predict(model, gram_tr)
    cross = kernel_mod.gram(x_tr, x_te)
    test_dec = svm.decision_values(model, cross)
    test_pred = np.where(test_dec >= 0, 1.0, -1.0)
    rows = [
        [i, float(x_te[i, 0]), float(x_te[i, 1]), int(y_te[i]), float(test_dec[i]), int(test_pred[i])]
        for i in range(len(y_te))
    ]
    summary = {
        "dataset": cfg["dataset"],
        "train_accuracy": float(np.mean(train_pred == y_tr)),
        "test_accuracy": float(np.mean(test_pred == y_te)),
        "n_support": int(len(model.support)),
        "sweeps": model.sweeps,
    }
    return summary, {"decisions": (["index", "x0", "x1", "label", "decision", "predicted"], rows)}


def _run_hea(cfg):
    seed = int(cfg["seed"])
    g = hea_mod.two_wire_graph(magic=bool(cfg["magic"]))
    loss = hea_mod.make_pattern_loss(g, hea_mod.t_isingxx_target(), seed, n_pairs=int(cfg["n_pairs"]))
    result = hea_mod.greedy_opt(
        loss,
        hea_mod.TWO_WIRE_SLICES,
        hea_mod.GreedyConfig(
            epsilon=float(cfg["epsilon"]),
            n_reset=int(cfg["resets"]),
            l_max=int(cfg["lmax"]),
            delta=float(cfg["delta"]),
        ),
        np.random.default_rng(seed),
    )
    best_curve = result.best_curve
    rows = [[i, result.evaluations[i], float(best_curve[i])] for i in range(len(result.evaluations))]
    summary = {
        "success": bool(result.success),
        "evaluations": len(result.evaluations),
        "best_loss": float(result.best_loss),
        "best_angles": {str(k): float(v) for k, v in sorted(result.best_theta.items())},
    }
    return summary, {"log": (["evaluation_index", "candidate_loss", "best_loss"], rows)}


def _run_expressivity(cfg):
    seed = int(cfg["seed"])
    wires = int(cfg["wires"])
    tip = cfg.get("tip")
    spec = MutaLayerSpec(num_wires=wires, tip=tip if wires > 1 else None)
    g = build_layer(spec).graph
    rng = np.random.default_rng(seed)
    report = lie.variance_probe(g, None, int(cfg["samples"]), rng)
    report["seed"] = seed
    rows = [[label] for label in report["generators"]]
    return report, {"generators": (["generator"], rows)}


def run_experiment(cfg: dict):
    """Validate, resolve defaults, run; returns (resolved config, summary, tables)."""
    diags = validate_config(cfg)
    if diags:
        raise ConfigError(diags)
    cfg = resolve_config(cfg)
    kind = cfg["kind"]
    if kind == "gate-learn":
        summary, tables = _run_gate_learn(cfg)
    elif kind == "noise-sweep":
        summary, tables = _run_noise_sweep(cfg, depolarizing=False)
    elif kind == "depolarizing-sweep":
        summary, tables = _run_noise_sweep(cfg, depolarizing=True)
    elif kind == "qfi":
        summary, tables = _run_qfi(cfg)
    elif kind == "teleport":
        summary, tables = _run_teleport(cfg)
    elif kind == "kernel-svm":
        summary, tables = _run_kernel_svm(cfg)
    elif kind == "hea":
        summary, tables = _run_hea(cfg)
    else:
        summary, tables = _run_expressivity(cfg)
    return cfg, summary, tables


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(columns, rows) -> str:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(v):
    v = _jsonable(v)
    if isinstance(v, bool):
        return int(v)
    return v


def write_outputs(resolved_cfg: dict, summary: dict, tables: dict, out: str) -> list[str]:
    """JSON manifest plus one CSV per table; returns the written paths."""
    base, ext = os.path.splitext(out)
    manifest = {"config": _jsonable(resolved_cfg), "results": _jsonable(summary)}
    written = []
    json_path = base + ".json"
    _atomic_write(json_path, json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    written.append(json_path)
    for name in sorted(tables):
        columns, rows = tables[name]
        if ext == ".csv" and len(tables) == 1:
            csv_path = out
        else:
            csv_path = f"{base}.{name}.csv"
        _atomic_write(csv_path, _csv_text(columns, rows))
        written.append(csv_path)
    return written
