"""Ranking engine for expressing novel slang senses with existing words."""

from .choice import (
    ChoiceModelConfig,
    KernelParams,
    Posterior,
    cf_posterior,
    cf_weights,
    fit_kernels,
    likelihood_1nn,
    likelihood_prototype,
    posterior,
    prepare_sense_space,
    sense_similarity,
)
from .contrastive import (
    EncoderParams,
    TrainConfig,
    Triplet,
    build_positive_pairs,
    encode,
    loss_gradient,
    sample_negative,
    train,
    triplet_loss,
)
from .embedding import (
    EmbeddingStore,
    build_neighborhoods,
    cosine_distance,
    load_vector_file,
    neighbor_rank_percentile,
    save_vector_file,
    sentence_embedding,
    toy_embedder,
)
from .errors import (
    ConfigError,
    DataError,
    NumericalError,
    SlangChoiceError,
    UnembeddableDefinition,
)
from .evaluation import (
    EvalReport,
    RankResult,
    auc,
    location_test,
    partition_few_zero,
    prior_correlation,
    rank_candidates,
    roc_curve,
    semantic_distance_report,
    synonymy_degree,
)
from .lexicon import (
    DataSplit,
    FilterConfig,
    Lexicon,
    PosDistribution,
    SenseDefinition,
    content_words,
    historical_splits,
    ingest,
    overlap_fraction,
    pos_distribution,
    split,
)
from .priors import (
    LmScoreTable,
    PriorVector,
    TransitionMatrix,
    combine_priors,
    estimate_transition_matrix,
    linguistic_prior,
    smoothed_query_distribution,
    syntactic_prior,
    uniform_prior,
)

__version__ = "0.1.0"
