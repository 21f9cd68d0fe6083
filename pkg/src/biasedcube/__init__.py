"""Verification toolkit for global hypercontractivity on biased product spaces."""

from .cube_core import (
    Bias,
    BiasedFunction,
    Restriction,
    Spectrum,
    biased_norm,
    character_table,
    derivative,
    from_spectrum,
    laplacian,
    leq_slack,
    moment,
    rel_close,
    restrict,
    superset_sums,
    transform,
    truncate,
)
from .families import (
    Hypergraph,
    SetFamily,
    Star,
    complete_graph,
    compress,
    contains_cross,
    cover_numbers,
    criticality_classify,
    expand,
    family_contains,
    junta_extract,
    matching_graph,
    path_graph,
    pseudorandomness_report,
    shadow,
    turan_exact,
)
from .hc_verify import (
    Corpus,
    CorpusEntry,
    CorpusSpec,
    anti_tribes_mu,
    anti_tribes_total_influence,
    default_corpus_spec,
    generate_corpus,
    tribes_mu,
    tribes_total_influence,
    tribes_values,
    verify_degree_r,
    verify_global_hc,
    verify_term_bound,
)
from .influence import (
    InfluenceTable,
    beta_smallness,
    influence_table,
    is_global,
    russo_check,
    verify_bourgain_pp,
    verify_concentration,
    verify_equivalence_lemmas,
)
from .noise_ops import (
    DirectedParams,
    composition_gap,
    directed_inner,
    directed_noise_apply,
    noise_apply,
    noise_matrix,
    noise_stability,
    replacement_step_check,
)
from .product_space import (
    Factor,
    ProductSpace,
    efron_stein,
    es_apply,
    verify_es_hc,
)
from .rv_poly import (
    FiniteRV,
    MultilinearPoly,
    SmoothTest,
    exact_expectation,
    hamming_ball,
    invariance_gap,
    rv_influence,
    verify_q_moment,
)
from .threshold import (
    MeasureCurve,
    anti_tribes_function,
    binomial_tail_check,
    boost_profile_check,
    boost_search,
    critical_probability,
    measure_curve,
    pinned_anti_tribes_function,
    pinned_boost_spot_check,
    threshold_checks,
)

__all__ = [
    "Bias",
    "BiasedFunction",
    "Corpus",
    "CorpusEntry",
    "CorpusSpec",
    "DirectedParams",
    "Factor",
    "FiniteRV",
    "Hypergraph",
    "InfluenceTable",
    "MeasureCurve",
    "MultilinearPoly",
    "ProductSpace",
    "Restriction",
    "SetFamily",
    "SmoothTest",
    "Spectrum",
    "Star",
    "anti_tribes_function",
    "anti_tribes_mu",
    "anti_tribes_total_influence",
    "beta_smallness",
    "biased_norm",
    "binomial_tail_check",
    "boost_profile_check",
    "boost_search",
    "character_table",
    "complete_graph",
    "composition_gap",
    "compress",
    "contains_cross",
    "cover_numbers",
    "critical_probability",
    "criticality_classify",
    "default_corpus_spec",
    "derivative",
    "directed_inner",
    "directed_noise_apply",
    "efron_stein",
    "es_apply",
    "exact_expectation",
    "expand",
    "family_contains",
    "from_spectrum",
    "generate_corpus",
    "hamming_ball",
    "influence_table",
    "invariance_gap",
    "is_global",
    "junta_extract",
    "laplacian",
    "leq_slack",
    "matching_graph",
    "measure_curve",
    "moment",
    "noise_apply",
    "noise_matrix",
    "noise_stability",
    "path_graph",
    "pinned_anti_tribes_function",
    "pinned_boost_spot_check",
    "pseudorandomness_report",
    "rel_close",
    "replacement_step_check",
    "restrict",
    "russo_check",
    "rv_influence",
    "shadow",
    "superset_sums",
    "threshold_checks",
    "transform",
    "tribes_mu",
    "tribes_total_influence",
    "tribes_values",
    "truncate",
    "turan_exact",
    "verify_bourgain_pp",
    "verify_concentration",
    "verify_degree_r",
    "verify_equivalence_lemmas",
    "verify_es_hc",
    "verify_global_hc",
    "verify_q_moment",
]

__version__ = "0.1.0"
