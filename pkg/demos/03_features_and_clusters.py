"""Per-sensor features, clustering, and selection stability under PCA."""

import warnings

import numpy as np

import sensorplace as sp

warnings.filterwarnings("ignore", message="constant feature columns")

# Ten sensors in two waveform families: rows 0-4 slow and small, rows 5-9
# fast and large.
signal = sp.two_regime_signal(seed=4)
feats = sp.build_feature_matrix(signal, sp.FeatureConfig(k_bins=10))
print("feature columns:", feats.column_names)

normalized = sp.zscore_normalize(feats)
clusters = sp.kmeans(normalized, sp.KMeansConfig(k=2, seed=0))
print("cluster labels:", clusters.labels, f"(inertia {clusters.inertia:.2f})")

# How stable is the selected sensor set when the feature space is reduced?
graph = sp.chain_graph(10)
baseline = sp.tvml_select(signal, graph, 3, seed=0).selected
print("selection with all features:", sorted(baseline))

table = sp.centrality_table(graph)
scores = sp.toposcore(table)
for dims in (10, 6, 4, 2):
    reduced = sp.pca_reduce(normalized, dims)
    cl = sp.kmeans(reduced, sp.KMeansConfig(k=3, seed=0))
    picked = sp.select_representatives(scores, cl).selected
    overlap = sp.jaccard(picked, baseline)
    print(f"PCA dims {dims:2d}: selection {sorted(picked)}  Jaccard vs full {overlap:.2f}")
