"""Staged event tree models learned by hierarchical clustering on the simplex."""

from .data import CountTable, Dataset, count_transitions, pool_counts, read_csv, read_schema
from .errors import NumericError, StagetreeError, ValidationError
from .estimation import (
    ModelScore,
    fit_saturated,
    log_likelihood,
    n_free_params,
    refit_pooled,
    score_bic,
)
from .evaluate import (
    ComparisonReport,
    hamming_distance,
    median_aggregate,
    relative_bic,
    relative_hd,
)
from .hcluster import Dendrogram, LINKAGE_NAMES, agglomerate, cut
from .kernels import ACTIVE_BACKEND
from .learn import LearnConfig, baseline_full, learn_bhc, learn_hclust, select_k
from .metrics import (
    METRIC_NAMES,
    Metric,
    fisher,
    hellinger,
    jensen_shannon,
    kaniadakis,
    pairwise_matrix,
    resolve_metric,
    total_kl,
    total_variation,
)
from .simulate import (
    random_parameters,
    random_staging_join,
    random_staging_split,
    replication_rng,
    sample,
)
from .tree import (
    EventTree,
    FittedStagedTree,
    Staging,
    VariableSpec,
    build_event_tree,
    load_model,
    model_from_dict,
    model_to_dict,
    saturated_staging,
    save_model,
    single_stage_staging,
    stage_partition,
)

__version__ = "0.1.0"
