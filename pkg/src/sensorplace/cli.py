"""Command-line front end.

Subcommands: synth, learn-graph, features, select, evaluate, sweep,
alpha-sweep.  Every option can also come from a config file passed with
--config: flat `key = value` lines, `#` starts a comment, and keys are the
long option names with either dashes or underscores.  Explicit command-line
flags override config-file values.

Every run writes its outputs plus a manifest.json capturing the resolved
configuration and sha256 hashes of inputs and outputs; reruns with
identical inputs and configuration produce byte-identical outputs.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .baselines import (
    CovarianceModel,
    entropy_select,
    localization_select,
    mi_select,
    qr_pivot_select,
    random_select,
)
from .centrality import LocalizationKernel, centrality_table
from .clustering import KMeansConfig, kmeans
from .evaluation import (
    DetectorConfig,
    EvalProtocol,
    ReconstructionConfig,
    evaluate_selection_with_curve,
    sweep_m,
    training_block,
)
from .features import FeatureConfig, build_feature_matrix, zscore_normalize
from .graph_learning import ConvergenceError, LearnConfig, learn_graph_from_signal
from .graphs import (
    Graph,
    TimeVertexSignal,
    eigendecompose,
    laplacian,
    load_graph_csv,
    load_graph_json,
    save_graph_csv,
    save_graph_json,
)
from .selection import Weights, one_at_a_time_grid, alpha_sweep, toposcore, tvml_select

METHODS = ("tvml", "random", "entropy", "mi", "qr", "loc")


class UsageError(Exception):
    """Invalid flag combinations detected after parsing."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_config_file(path) -> list[tuple[str, str]]:
    pairs = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}: line {lineno}: expected key = value")
            key, value = line.split("=", 1)
            pairs.append((key.strip().replace("_", "-"), value.strip()))
    return pairs


def _inject_config(argv: list[str]) -> list[str]:
    """Expand `--config FILE` into leading flags so real flags override."""
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    if at + 1 >= len(argv):
        return argv  # let argparse report the missing value
    injected = []
    for key, value in _read_config_file(argv[at + 1]):
        injected += [f"--{key}", value]
    return injected + argv


def _load_graph(path) -> Graph:
    path = str(path)
    return load_graph_json(path) if path.endswith(".json") else load_graph_csv(path)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.replace(";", ",").split(",") if v.strip() != ""]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.replace(";", ",").split(",") if v.strip() != ""]


def _resolve_m(args, n: int) -> int:
    if args.m is not None:
        return int(args.m)
    if args.percent is not None:
        return max(1, int(round(args.percent / 100.0 * n)))
    raise UsageError("either --m or --percent is required")


def _config_snapshot(args) -> dict:
    skip = {"func", "config"}
    out = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        out[key] = str(value) if isinstance(value, Path) else value
    return out


def _selector_factory(args, signal: TimeVertexSignal, graph: Graph | None):
    """Map a method name to a callable m -> SelectionResult."""
    kernel = LocalizationKernel(decay=args.kernel_decay)
    weights = Weights(tuple(args.alpha)) if args.alpha else Weights()
    mandatory = tuple(args.mandatory) if getattr(args, "mandatory", None) else ()
    cov = None
    basis = None

    def factory(method):
        nonlocal cov, basis
        if method in ("tvml", "loc") and graph is None:
            raise UsageError(f"method {method!r} requires --graph")
        if method == "tvml":
            return lambda m: tvml_select(
                signal, graph, m,
                weights=weights, kernel=kernel,
                feature_cfg=FeatureConfig(k_bins=args.k_bins),
                seed=args.seed, mandatory=mandatory,
            )
        if method == "random":
            return lambda m: random_select(signal.n, m, args.seed)
        if method in ("entropy", "mi"):
            if cov is None:
                cov = CovarianceModel.from_signal(signal)
            return (lambda m: entropy_select(cov, m)) if method == "entropy" else (
                lambda m: mi_select(cov, m)
            )
        if method == "qr":
            return lambda m: qr_pivot_select(signal, m)
        if method == "loc":
            if basis is None:
                basis = eigendecompose(laplacian(graph))
            return lambda m: localization_select(basis, kernel, m)
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")

    return factory


def _protocol(args) -> EvalProtocol:
    return EvalProtocol(
        test_fraction=args.test_fraction,
        recon=ReconstructionConfig(gamma=args.gamma),
        detector=DetectorConfig(
            window=args.window,
            ridge=args.ridge,
            threshold_sigmas=args.threshold_sigmas,
        ),
    )


# ---------------------------------------------------------------------------
# subcommands

def _cmd_synth(args) -> int:
    from .synth import SynthConfig, synth_generate

    cfg = SynthConfig(
        n_nodes=args.n_nodes,
        n_timesteps=args.n_timesteps,
        dt=args.dt,
        stiffness=args.stiffness,
        stiffness_profile=args.stiffness_profile,
        damping=args.damping,
        damage_elements=tuple(args.damage_elements) if args.damage_elements else None,
        damage_fraction=args.damage_fraction,
        load_speed=args.load_speed,
        load_amplitude=args.load_amplitude,
        load_width=args.load_width,
        noise_std=args.noise_std,
        seed=args.seed,
    )
    healthy, damaged, truth = synth_generate(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.save_csv(healthy, out / "healthy.csv")
    io.save_csv(damaged, out / "damaged.csv")
    save_graph_csv(truth, out / "truth_graph.csv")
    save_graph_json(truth, out / "truth_graph.json")
    outputs = ["healthy.csv", "damaged.csv", "truth_graph.csv", "truth_graph.json"]
    io.write_manifest(out, _config_snapshot(args), [], [out / f for f in outputs])
    print(f"wrote {', '.join(outputs)} to {out}")
    return 0


def _cmd_learn_graph(args) -> int:
    signal = io.load_csv(args.input)
    cfg = LearnConfig(
        lambda1=args.lambda1,
        lambda2=args.lambda2,
        max_iter=args.max_iter,
        rel_tol=args.rel_tol,
        prune_ratio=args.prune_ratio,
    )
    warm = _load_graph(args.warm_start) if args.warm_start else None
    history: list[tuple[int, float, float]] = []
    graph = learn_graph_from_signal(
        signal, cfg, warm_start=warm,
        callback=lambda it, f, g: history.append((it, f, g)),
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_graph_csv(graph, out / "graph.csv")
    save_graph_json(graph, out / "graph.json")
    io.write_convergence_csv(history, out / "convergence.csv")
    outputs = [out / f for f in ("graph.csv", "graph.json", "convergence.csv")]
    io.write_manifest(out, _config_snapshot(args), [args.input], outputs)
    print(f"learned graph on {graph.n} nodes in {len(history)} iterations")
    return 0


def _cmd_features(args) -> int:
    signal = io.load_csv(args.input, sampling_rate=args.sampling_rate)
    feats = build_feature_matrix(signal, FeatureConfig(k_bins=args.k_bins))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_features_csv(feats, out / "features.csv")
    io.write_manifest(out, _config_snapshot(args), [args.input], [out / "features.csv"])
    print(f"extracted {feats.values.shape[1]} features for {feats.n} sensors")
    return 0


def _cmd_select(args) -> int:
    signal = io.load_csv(args.input, sampling_rate=args.sampling_rate)
    graph = _load_graph(args.graph) if args.graph else None
    m = _resolve_m(args, signal.n)
    result = _selector_factory(args, signal, graph)(args.method)(m)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_selection(result, out / "selection.json", out / "selection.csv")
    outputs = [out / "selection.json", out / "selection.csv"]
    if result.clusters is not None:
        io.write_clusters(
            result.clusters, out / "clusters.csv", out / "clusters.json",
            sensor_ids=result.config.get("clustered_sensors"),
        )
        outputs += [out / "clusters.csv", out / "clusters.json"]
    inputs = [args.input] + ([args.graph] if args.graph else [])
    io.write_manifest(out, _config_snapshot(args), inputs, outputs)
    print(f"{args.method} selected sensors: {result.selected}")
    return 0


def _cmd_evaluate(args) -> int:
    healthy = io.load_csv(args.healthy)
    damaged = io.load_csv(args.damaged)
    graph = _load_graph(args.graph) if args.graph else None
    protocol = _protocol(args)
    if args.selection:
        import json

        with open(args.selection) as fh:
            selected = json.load(fh)["selected"]
        method = "file"
    else:
        train = TimeVertexSignal(
            training_block(healthy, protocol),
            healthy.sampling_rate,
            healthy.node_labels,
        )
        m = _resolve_m(args, healthy.n)
        selected = _selector_factory(args, train, graph)(args.method)(m).selected
        method = args.method
    if graph is None:
        raise UsageError("evaluate requires --graph for reconstruction")
    report, curve = evaluate_selection_with_curve(
        healthy, damaged, graph, selected, protocol
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = io.metrics_to_dict(report)
    payload["method"] = method
    payload["selected"] = list(selected)
    io.write_json(payload, out / "metrics.json")
    io.write_roc_csv(curve, out / "roc.csv")
    inputs = [args.healthy, args.damaged] + ([args.graph] if args.graph else [])
    if args.selection:
        inputs.append(args.selection)
    io.write_manifest(
        out, _config_snapshot(args), inputs, [out / "metrics.json", out / "roc.csv"]
    )
    print(
        f"rmse={report.rmse:.4f} mae={report.mae:.4f} f1={report.f1:.4f} "
        f"auc={report.auc:.4f}"
    )
    return 0


def _cmd_sweep(args) -> int:
    healthy = io.load_csv(args.healthy)
    damaged = io.load_csv(args.damaged)
    graph = _load_graph(args.graph)
    protocol = _protocol(args)
    train = TimeVertexSignal(
        training_block(healthy, protocol), healthy.sampling_rate, healthy.node_labels
    )
    methods = args.methods or list(METHODS)
    rows = []
    min_m: dict[str, dict[str, int | None]] = {}
    for seed in args.seeds:
        seed_args = argparse.Namespace(**{**vars(args), "seed": seed})
        factory = _selector_factory(seed_args, train, graph)
        selectors = {name: factory(name) for name in methods}
        result = sweep_m(
            healthy, damaged, graph, args.m_values, selectors,
            seed=seed, protocol=protocol,
            accuracy_threshold=args.accuracy_threshold,
        )
        rows.extend(result.rows)
        for name, m in result.min_m.items():
            min_m.setdefault(name, {})[str(seed)] = m
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_sweep_csv(rows, out / "sweep.csv")
    outputs = [out / "sweep.csv"]
    if args.accuracy_threshold is not None:
        io.write_json(min_m, out / "min_m.json")
        outputs.append(out / "min_m.json")
    io.write_manifest(
        out, _config_snapshot(args),
        [args.healthy, args.damaged, args.graph], outputs,
    )
    print(f"wrote {len(rows)} sweep rows to {out / 'sweep.csv'}")
    return 0


def _cmd_alpha_sweep(args) -> int:
    import csv as _csv

    signal = io.load_csv(args.input, sampling_rate=args.sampling_rate)
    graph = _load_graph(args.graph)
    m = _resolve_m(args, signal.n)
    feats = zscore_normalize(
        build_feature_matrix(signal, FeatureConfig(k_bins=args.k_bins))
    )
    clusters = kmeans(feats, KMeansConfig(k=m, seed=args.seed))
    table = centrality_table(
        graph, kernel=LocalizationKernel(decay=args.kernel_decay)
    )
    entries = alpha_sweep(table, clusters, one_at_a_time_grid(args.steps))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "alpha_sweep.csv", "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(
            ["alpha0", "alpha1", "alpha2", "alpha3", "alpha4", "selected", "jaccard"]
        )
        for entry in entries:
            writer.writerow(
                [f"{a:.17g}" for a in entry.alpha]
                + [
                    ";".join(str(i) for i in entry.result.selected),
                    f"{entry.jaccard_vs_uniform:.17g}",
                ]
            )
    io.write_manifest(
        out, _config_snapshot(args),
        [args.input, args.graph], [out / "alpha_sweep.csv"],
    )
    print(f"swept {len(entries)} weight vectors")
    return 0


# ---------------------------------------------------------------------------
# parser assembly

def _add_common(sub, *groups):
    sub.add_argument("--config", help="key = value config file; flags override it")
    sub.add_argument("--out", required=True, help="output directory")
    if "seed" in groups:
        sub.add_argument("--seed", type=int, default=0, help="base RNG seed")
    if "selector" in groups:
        sub.add_argument(
            "--alpha", type=_float_list, default=None,
            help="five comma-separated centrality weights (default uniform 0.2)",
        )
        sub.add_argument(
            "--kernel-decay", type=float, default=10.0,
            help="localization kernel decay in g = exp(-decay * lam / lam_max)",
        )
        sub.add_argument(
            "--k-bins", type=int, default=10,
            help="count of low-frequency magnitude bins in the feature vector",
        )
        sub.add_argument(
            "--mandatory", type=_int_list, default=None,
            help="comma-separated sensor indices that must be selected (tvml)",
        )
    if "protocol" in groups:
        sub.add_argument("--gamma", type=float, default=0.5,
                         help="graph-regularization weight for reconstruction")
        sub.add_argument("--window", type=int, default=128,
                         help="detection window length in timesteps")
        sub.add_argument("--ridge", type=float, default=1e-3,
                         help="ridge regularizer of the one-step predictor")
        sub.add_argument("--threshold-sigmas", type=float, default=2.0,
                         help="threshold = mean + sigmas * std of healthy scores")
        sub.add_argument("--test-fraction", type=float, default=0.25,
                         help="trailing fraction of each corpus held out as test")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="sensorplace",
        description="Graph-based sensor placement for time-varying signals",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("synth", help="generate a synthetic mass-spring corpus")
    _add_common(s, "seed")
    s.add_argument("--n-nodes", type=int, default=10)
    s.add_argument("--n-timesteps", type=int, default=6000)
    s.add_argument("--dt", type=float, default=0.05)
    s.add_argument("--stiffness", type=float, default=36.0,
                   help="base spring stiffness")
    s.add_argument("--stiffness-profile", choices=("sectioned", "uniform"),
                   default="sectioned",
                   help="per-element layout derived from the base stiffness")
    s.add_argument("--damping", type=float, default=0.4)
    s.add_argument("--damage-elements", type=_int_list, default=None,
                   help="spring indices to weaken (default: two mid-span)")
    s.add_argument("--damage-fraction", type=float, default=0.5)
    s.add_argument("--load-speed", type=float, default=3.0)
    s.add_argument("--load-amplitude", type=float, default=5.0)
    s.add_argument("--load-width", type=float, default=1.0)
    s.add_argument("--noise-std", type=float, default=0.01)
    s.set_defaults(func=_cmd_synth)

    s = subs.add_parser("learn-graph", help="infer the sensor graph from a signal")
    _add_common(s)
    s.add_argument("--input", required=True, help="signal CSV")
    s.add_argument("--lambda1", type=float, default=0.01,
                   help="log-barrier weight on node degrees")
    s.add_argument("--lambda2", type=float, default=0.5,
                   help="Frobenius regularization weight")
    s.add_argument("--max-iter", type=int, default=10_000)
    s.add_argument("--rel-tol", type=float, default=1e-6)
    s.add_argument("--prune-ratio", type=float, default=0.0,
                   help="drop weights below this fraction of the max")
    s.add_argument("--warm-start", default=None, help="graph CSV/JSON to start from")
    s.set_defaults(func=_cmd_learn_graph)

    s = subs.add_parser("features", help="extract per-sensor feature vectors")
    _add_common(s)
    s.add_argument("--input", required=True, help="signal CSV")
    s.add_argument("--k-bins", type=int, default=10)
    s.add_argument("--sampling-rate", type=float, default=None)
    s.set_defaults(func=_cmd_features)

    s = subs.add_parser("select", help="choose M sensors with one method")
    _add_common(s, "seed", "selector")
    s.add_argument("--input", required=True, help="signal CSV")
    s.add_argument("--graph", default=None, help="graph CSV/JSON (tvml, loc)")
    s.add_argument("--method", choices=METHODS, default="tvml")
    s.add_argument("--m", type=int, default=None, help="number of sensors")
    s.add_argument("--percent", type=float, default=None,
                   help="sensor budget as percent of N (alternative to --m)")
    s.add_argument("--sampling-rate", type=float, default=None)
    s.set_defaults(func=_cmd_select)

    s = subs.add_parser("evaluate", help="score one selection on both tasks")
    _add_common(s, "seed", "selector", "protocol")
    s.add_argument("--healthy", required=True, help="healthy signal CSV")
    s.add_argument("--damaged", required=True, help="damaged signal CSV")
    s.add_argument("--graph", default=None, help="graph CSV/JSON")
    s.add_argument("--method", choices=METHODS, default="tvml")
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--percent", type=float, default=None)
    s.add_argument("--selection", default=None,
                   help="selection.json to evaluate instead of running a method")
    s.set_defaults(func=_cmd_evaluate)

    s = subs.add_parser("sweep", help="grid of (method, M) evaluation cells")
    _add_common(s, "selector", "protocol")
    s.add_argument("--healthy", required=True)
    s.add_argument("--damaged", required=True)
    s.add_argument("--graph", required=True)
    s.add_argument("--m-values", type=_int_list, required=True,
                   help="comma-separated sensor budgets")
    s.add_argument("--methods", type=lambda v: v.split(","), default=None,
                   help=f"comma-separated subset of {','.join(METHODS)}")
    s.add_argument("--seeds", type=_int_list, default=[0],
                   help="comma-separated seeds; one sweep per seed")
    s.add_argument("--accuracy-threshold", type=float, default=None,
                   help="report smallest M with accuracy above this")
    s.set_defaults(func=_cmd_sweep)

    s = subs.add_parser("alpha-sweep",
                        help="one-at-a-time sensitivity sweep of the weights")
    _add_common(s, "seed")
    s.add_argument("--input", required=True, help="signal CSV")
    s.add_argument("--graph", required=True, help="graph CSV/JSON")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--steps", type=int, default=11,
                   help="grid points per weight component over [0, 1]")
    s.add_argument("--k-bins", type=int, default=10)
    s.add_argument("--kernel-decay", type=float, default=10.0)
    s.add_argument("--sampling-rate", type=float, default=None)
    s.set_defaults(func=_cmd_alpha_sweep)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and not argv[0].startswith("-"):
        try:
            argv = argv[:1] + _inject_config(argv[1:])
        except OSError as exc:
            print(f"sensorplace: error: {exc}", file=sys.stderr)
            return 2
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"sensorplace: usage error: {exc}", file=sys.stderr)
        return 1
    except (ConvergenceError, np.linalg.LinAlgError) as exc:
        print(f"sensorplace: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"sensorplace: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
