"""Synthesis and exact verification of stochastic flow networks built from fair splitters."""
from .analysis import (AnalysisReport, CycleBudgetExceeded, NotLoopFree, PreconditionViolated, SensitivityReport,
                       TransitionDecomposition, absorption_distribution, analyze, decompose, det_bound_oracle, entropy,
                       expected_latency, expected_visits, latency_variance, mason_distribution, mason_probability,
                       sensitivity, verify_denominator_bound, verify_loop_free_dyadic)
from .linalg import SingularSystem
from .network import (Distribution, FlowNetwork, InvalidNetwork, NetworkFormatError, Splitter, Target,
                      ValidationReport, deserialize, fair, serialize, to_dot, validate)
from .simulation import SimConfig, SimReport, simulate
from .synthesis import (TargetDistribution, TargetProbability, synth_distribution_huffman, synth_distribution_ky,
                        synth_dyadic, synth_latency_oriented, synth_optimal, synth_size_relaxed, synthesize)

__version__ = "0.1.0"
