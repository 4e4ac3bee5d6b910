"""Signal CSV ingestion, result writers, and run manifests.

Signal CSV layout: first row is the sensor-id header (an optional leading
`time` column is detected by name and dropped), each following row is one
timestep.  Values are written with 17 significant digits so a save/load
round trip is exact.  All JSON goes through one writer (sorted keys, fixed
separators) and manifests record sha256 content hashes of inputs and
outputs, which makes byte-identical reruns checkable.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .graphs import TimeVertexSignal

FORMAT_VERSION = "1"


def load_csv(path, sampling_rate: float | None = None) -> TimeVertexSignal:
    """Read a row-per-timestep CSV into an N x T signal."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or not any(c.strip() for c in header):
            raise ValueError(f"{path}: empty signal file")
        labels = [c.strip() for c in header]
        drop_time = labels and labels[0].lower() == "time"
        if drop_time:
            labels = labels[1:]
        if not labels:
            raise ValueError(f"{path}: no sensor columns")
        width = len(labels) + (1 if drop_time else 0)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != width:
                raise ValueError(
                    f"{path}: row {lineno}: expected {width} fields, got {len(row)}"
                )
            values = row[1:] if drop_time else row
            parsed = []
            for col, cell in enumerate(values):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    name = labels[col]
                    raise ValueError(
                        f"{path}: row {lineno}, column {name!r}: "
                        f"non-numeric value {cell!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return TimeVertexSignal(np.array(rows).T, sampling_rate, labels)


def save_csv(signal: TimeVertexSignal, path) -> None:
    labels = signal.node_labels or [f"s{i + 1}" for i in range(signal.n)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(labels)
        for t in range(signal.t):
            writer.writerow([f"{v:.17g}" for v in signal.values[:, t]])


def write_json(payload, path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def selection_to_dict(result) -> dict:
    clusters = result.clusters.labels.tolist() if result.clusters is not None else None
    scores = result.scores.tolist() if result.scores is not None else None
    return {
        "method": result.method,
        "selected": list(result.selected),
        "scores": scores,
        "clusters": clusters,
        "config": result.config,
    }


def write_selection(result, json_path, csv_path) -> None:
    payload = selection_to_dict(result)
    write_json(payload, json_path)
    n = int(result.config.get("n", 0))
    if result.scores is not None:
        n = max(n, len(result.scores))
    clustered = result.config.get("clustered_sensors")
    cluster_of = {}
    if result.clusters is not None:
        ids = clustered if clustered is not None else range(len(result.clusters.labels))
        cluster_of = {
            int(i): int(lab) for i, lab in zip(ids, result.clusters.labels)
        }
    chosen = set(result.selected)
    n = max(n, (max(chosen) + 1) if chosen else 0)
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sensor_id", "cluster", "psi", "selected"])
        for i in range(n):
            cluster = cluster_of.get(i, "")
            psi = f"{result.scores[i]:.17g}" if result.scores is not None else ""
            writer.writerow([i, cluster, psi, int(i in chosen)])


def write_clusters(assignment, csv_path, json_path, sensor_ids=None) -> None:
    ids = sensor_ids if sensor_ids is not None else range(len(assignment.labels))
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sensor_id", "cluster"])
        for sensor, label in zip(ids, assignment.labels):
            writer.writerow([int(sensor), int(label)])
    write_json(
        {
            "labels": assignment.labels.tolist(),
            "sensor_ids": [int(i) for i in ids],
            "centroids": assignment.centroids.tolist(),
            "inertia": assignment.inertia,
        },
        json_path,
    )


def write_features_csv(features, path) -> None:
    labels = features.node_labels or [f"s{i + 1}" for i in range(features.n)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sensor_id"] + list(features.column_names))
        for i in range(features.n):
            writer.writerow(
                [labels[i]] + [f"{v:.17g}" for v in features.values[i]]
            )


def metrics_to_dict(report) -> dict:
    return {
        "tp": report.tp,
        "tn": report.tn,
        "fp": report.fp,
        "fn": report.fn,
        "accuracy": report.accuracy,
        "precision": report.precision,
        "recall": report.recall,
        "f1": report.f1,
        "auc": report.auc,
        "rmse": report.rmse,
        "mae": report.mae,
        "flags": list(report.flags),
    }


def write_roc_csv(curve, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "fpr", "tpr"])
        for k, threshold in enumerate(curve.thresholds):
            writer.writerow(
                [
                    f"{threshold:.17g}",
                    f"{curve.fpr[k + 1]:.17g}",
                    f"{curve.tpr[k + 1]:.17g}",
                ]
            )


def write_sweep_csv(rows, path) -> None:
    columns = [
        "method", "M", "seed", "rmse", "mae",
        "accuracy", "precision", "recall", "f1", "auc",
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow(
                [
                    row[c] if c in ("method", "M", "seed") else f"{row[c]:.17g}"
                    for c in columns
                ]
            )


def write_convergence_csv(history, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter", "objective", "grad_norm"])
        for it, objective, grad_norm in history:
            writer.writerow([it, f"{objective:.17g}", f"{grad_norm:.17g}"])


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir, config: dict, inputs, outputs) -> Path:
    """Provenance record: config plus content hashes of inputs and outputs."""
    manifest = {
        "version": FORMAT_VERSION,
        "config": config,
        "input_hashes": {Path(p).name: sha256_file(p) for p in inputs},
        "output_hashes": {Path(p).name: sha256_file(p) for p in outputs},
    }
    path = Path(out_dir) / "manifest.json"
    write_json(manifest, path)
    return path
