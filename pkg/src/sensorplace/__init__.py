"""Graph-based sensor placement for time-varying sensor networks.

The pipeline: learn (or supply) a sensor graph, extract statistical and
spectral features per sensor, cluster the feature vectors, score nodes by
a blend of five graph centralities, and pick one representative per
cluster.  Five baseline selectors and a deterministic reconstruction and
damage-detection harness make the placements comparable.
"""

__version__ = "0.1.0"

from .baselines import (
    CovarianceModel,
    entropy_select,
    localization_select,
    mi_select,
    qr_pivot_select,
    random_select,
)
from .centrality import (
    CentralityTable,
    LocalizationKernel,
    betweenness_centrality,
    centrality_table,
    degree_centrality,
    eigenvector_centrality,
    harmonic_centrality,
    localization_matrix,
    localization_norms,
)
from .clustering import ClusterAssignment, KMeansConfig, kmeans
from .evaluation import (
    DetectorConfig,
    EvalProtocol,
    MetricsReport,
    ReconstructionConfig,
    RocCurve,
    UnobservableComponentError,
    classification_metrics,
    detect,
    detection_threshold,
    evaluate_selection,
    fit_detector,
    jaccard,
    reconstruct,
    reconstruction_metrics,
    roc_auc,
    sample_vertices,
    sweep_m,
)
from .features import (
    FeatureConfig,
    FeatureMatrix,
    build_feature_matrix,
    pca_reduce,
    spectral_features,
    stat_features,
    zscore_normalize,
)
from .graph_learning import (
    ConvergenceError,
    LearnConfig,
    learn_graph,
    learn_graph_from_signal,
    pairwise_distances,
    postprocess,
    zscore_rows,
)
from .graphs import (
    Graph,
    SpectralBasis,
    TimeVertexSignal,
    connected_components,
    eigendecompose,
    filter_signal,
    gft,
    igft,
    laplacian,
    load_graph_csv,
    load_graph_json,
    save_graph_csv,
    save_graph_json,
    smoothness,
)
from .rng import SplitMix64
from .selection import (
    SelectionResult,
    Weights,
    alpha_sweep,
    one_at_a_time_grid,
    select_representatives,
    toposcore,
    tvml_select,
)
from .synth import SynthConfig, chain_graph, default_benchmark, synth_generate, two_regime_signal
