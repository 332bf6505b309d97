from .distribution import TargetDistribution, synth_distribution_huffman, synth_distribution_ky
from .errors import (BadSum, DegenerateTarget, DyadicTarget, EmptyInput, NotDyadic, NotNormalized, OutOfRange,
                     SynthesisError, TooManyLeaves, TreeMismatch)
from .scalar import (TargetProbability, UpgTemplate, adversarial_network, binary_expansion, bits_needed,
                     is_power_of_two, open_network, open_three_way, synth_dyadic, synth_latency_oriented, synth_optimal,
                     synth_size_relaxed, synth_three_way, synth_upg, synthesize, upg_instantiate)
from .trace import SynthesisTrace
from .trees import (AtomSet, WeightedTree, brute_force_optimal_tree, dyadic_atoms, huffman_merges, huffman_tree,
                    knuth_yao_tree)
from .wiring import close_feedback

__all__ = [name for name in dir() if not name.startswith("_")]
