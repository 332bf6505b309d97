"""Worked examples: the 14/29 reduction chain, the 7/29 ladder, fifths and the four-label Huffman split."""
from fractions import Fraction

from sfn.analysis import absorption_distribution, expected_latency
from sfn.synthesis import (WeightedTree, synth_distribution_huffman, synth_distribution_ky, synth_latency_oriented,
                           synth_optimal, synth_size_relaxed)


def show(title, net, trace) -> None:
    print(f"== {title}: {net.size} splitters, distribution {absorption_distribution(net)}, "
          f"ET {expected_latency(net)}")
    print(trace.to_text())
    print()


def main() -> None:
    show("optimal 14/29", *synth_optimal(Fraction(14, 29)))
    show("latency-oriented 14/29", *synth_latency_oriented(Fraction(14, 29)))
    show("size-relaxed 7/29", *synth_size_relaxed(Fraction(7, 29)))
    show("knuth-yao uniform fifths", *synth_distribution_ky([Fraction(1, 5)] * 5))
    w = [Fraction(1, 2), Fraction(1, 6), Fraction(1, 4), Fraction(1, 12)]
    show("huffman default tree", *synth_distribution_huffman(w))
    show("explicit tree [0, [1, [2, 3]]]", *synth_distribution_huffman(w, WeightedTree.from_nested([0, [1, [2, 3]]], w)))


if __name__ == "__main__":
    main()
