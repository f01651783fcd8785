"""Hard-label decision-boundary attack toolkit.

Attacks a classifier through its top-1 label alone by searching sign-vector
ray directions for the closest decision boundary, and evaluates the results
(success rate, query statistics, average boundary distance).
"""

from .errors import (
    BudgetExhausted,
    ConfigError,
    DimensionMismatch,
    EmptyInput,
    HardLabelError,
    MissingHistory,
    NoSuccesses,
    ParseError,
    RangeError,
    ShapeError,
)
from .oracle import (
    ClassifierModel,
    Example,
    HardLabelOracle,
    load_dataset,
    load_model,
    save_dataset,
    save_model,
)
from .search import (
    AttackResult,
    AttackState,
    BlockPartition,
    StoppingRule,
    all_ones_direction,
    brute_force_radius,
    dbr_search,
    flip_block,
    is_sign_direction,
    random_vertex_baseline,
    rays_hierarchical,
    rays_naive,
)
from .metrics import (
    CurveSeries,
    EvaluationReport,
    adbd,
    attack_success_rate,
    build_curves,
    evaluation_report,
    query_stats,
    robust_accuracy,
)
from .fixtures import (
    make_linear_model,
    make_mlp_fixture,
    model_accuracy,
    nearest_other_class_distance,
    sample_gaussian_blobs,
    train_mlp_classifier,
)
from .harness import (
    ResultRecord,
    RunConfig,
    cmd_attack,
    cmd_report,
    filter_correctly_classified,
    load_results,
    run_attack,
    write_results,
)

__version__ = "0.1.0"
