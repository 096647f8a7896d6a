"""Interactive one-shot Slepian-Wolf coding: staged hash protocols, one-round
protocol compression and average-case communication lower bounds."""

__version__ = "0.1.0"

from .distributions import (ConditionalDistribution, Distribution, JointDistribution,
                            conditional_entropy, conditional_entropy_averaged,
                            conditional_mutual_information, delta_noise_entropy,
                            harmonic_conditional, harmonic_sigma_entropy, make_delta_noise,
                            make_fano_tight, make_harmonic_permutation, make_identity,
                            make_independent_uniform, make_point_mass, renyi_entropy,
                            shannon_entropy)
from .engine import (Direction, Message, ProtocolOutcome, ProtocolStats, Transcript,
                     TrialRecord, expected_stats, replay, run_protocol, run_trials, summarize)
from .errors import (BadParam, ConfigError, DomainOverflow, IncompatibleSupports,
                     NoSeedFound, NonTermination, NotInSupport, ProtocolError, SidelinkError,
                     UnknownY)
from .hashing import Backend, HashOracle, derive_seed
from .protocols import (ConstRoundConfig, Lemma1Config, const_round_bound, const_round_transmit,
                        derandomize, evaluate_seed, lemma1_transmit, staged_outcomes,
                        theorem1_bound, theorem1_transmit)
from .compression import (CompressionReport, OneRoundProtocol, compress_one_round,
                          compression_report, information_complexity, statistical_distance)
from .bounds import (BoundReport, bound_consistency_report, entropy_bound_check,
                     fano_lower_bound, one_way_lower_bound, orlitsky_zero_error_bound,
                     two_way_lower_bound)
from .experiment import ExperimentConfig, list_presets, run_experiment

__all__ = [
    "ConditionalDistribution", "Distribution", "JointDistribution", "conditional_entropy",
    "conditional_entropy_averaged", "conditional_mutual_information", "delta_noise_entropy",
    "harmonic_conditional", "harmonic_sigma_entropy", "make_delta_noise", "make_fano_tight",
    "make_harmonic_permutation", "make_identity", "make_independent_uniform", "make_point_mass",
    "renyi_entropy", "shannon_entropy", "Direction", "Message", "ProtocolOutcome",
    "ProtocolStats", "Transcript", "TrialRecord", "expected_stats", "replay", "run_protocol",
    "run_trials", "summarize", "BadParam", "ConfigError", "DomainOverflow",
    "IncompatibleSupports", "NoSeedFound", "NonTermination", "NotInSupport", "ProtocolError",
    "SidelinkError", "UnknownY", "Backend", "HashOracle", "derive_seed", "ConstRoundConfig",
    "Lemma1Config", "const_round_bound", "const_round_transmit", "derandomize", "evaluate_seed",
    "lemma1_transmit", "staged_outcomes", "theorem1_bound", "theorem1_transmit",
    "CompressionReport", "OneRoundProtocol", "compress_one_round", "compression_report",
    "information_complexity", "statistical_distance", "BoundReport", "bound_consistency_report",
    "entropy_bound_check", "fano_lower_bound", "one_way_lower_bound",
    "orlitsky_zero_error_bound", "two_way_lower_bound", "ExperimentConfig", "list_presets",
    "run_experiment",
]
