"""Smoothed trie height under star-like probabilistic automaton perturbations."""
from .alphabet import Alphabet, LcpResult, StringSpec, common_prefix_length, lcp
from .analysis import (
    AnalysisReport,
    DichotomyVerdict,
    Entropy,
    GammaResult,
    Verdict,
    analyze,
    check_dichotomy,
    delta,
    delta_table,
    factor_denominator,
    gamma,
    lower_bound_height,
    lower_bound_P,
    output_vector,
    renyi_entropy_memoryless,
    tail_bound,
    upper_bound_height,
)
from .errors import (
    AlphabetError,
    EnumerationSizeError,
    HypothesisError,
    InputUnderrunError,
    NumericError,
    PfaFormatError,
    StarLikeError,
    TrieSmoothError,
)
from .harness import (
    AdversarialFamily,
    ExperimentConfig,
    HeightStats,
    format_csv,
    generate_family,
    run_height_experiment,
    sweep_n,
    write_csv,
)
from .oracle import (
    McEstimate,
    ProbabilityInterval,
    coincidence_probability,
    mc_coincidence,
    prefix_probability,
)
from .perturbation import (
    BatchRun,
    PerturbedPrefix,
    SampleBudget,
    make_rng,
    perturb_many,
    perturb_prefix,
    sample_perturbed_set,
    simulate_batch,
    split,
)
from .pfa import (
    Classification,
    Pfa,
    StarLikePfa,
    Violation,
    classify,
    dump_pfa,
    load_pfa,
    make_convex,
    make_del,
    make_ins,
    make_sub,
    pfa_from_json,
    pfa_to_json,
    to_star_like,
    validate,
)
from .trie import SATURATED, Trie, build_trie, height, height_by_pairwise_lcp

__version__ = "0.1.0"

__all__ = [
    "AdversarialFamily",
    "Alphabet",
    "AlphabetError",
    "AnalysisReport",
    "analyze",
    "BatchRun",
    "build_trie",
    "check_dichotomy",
    "Classification",
    "classify",
    "coincidence_probability",
    "common_prefix_length",
    "delta",
    "delta_table",
    "DichotomyVerdict",
    "dump_pfa",
    "Entropy",
    "EnumerationSizeError",
    "ExperimentConfig",
    "factor_denominator",
    "format_csv",
    "gamma",
    "GammaResult",
    "generate_family",
    "height",
    "height_by_pairwise_lcp",
    "HeightStats",
    "HypothesisError",
    "InputUnderrunError",
    "lcp",
    "LcpResult",
    "load_pfa",
    "lower_bound_height",
    "lower_bound_P",
    "make_convex",
    "make_del",
    "make_ins",
    "make_rng",
    "make_sub",
    "mc_coincidence",
    "McEstimate",
    "NumericError",
    "output_vector",
    "perturb_many",
    "perturb_prefix",
    "PerturbedPrefix",
    "Pfa",
    "pfa_from_json",
    "pfa_to_json",
    "PfaFormatError",
    "prefix_probability",
    "ProbabilityInterval",
    "renyi_entropy_memoryless",
    "run_height_experiment",
    "sample_perturbed_set",
    "SampleBudget",
    "SATURATED",
    "simulate_batch",
    "split",
    "StarLikeError",
    "StarLikePfa",
    "StringSpec",
    "sweep_n",
    "tail_bound",
    "to_star_like",
    "Trie",
    "TrieSmoothError",
    "upper_bound_height",
    "validate",
    "Verdict",
    "Violation",
    "write_csv",
]
