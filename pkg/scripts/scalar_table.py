"""Worst-case size and latency of the three scalar constructions, per bit-width n.

For every a/b with 2^(n-1) < b <= 2^n prints the largest splitter count and
the largest ET * b / 2^n next to the proven limits.
"""
import argparse
import math
from collections import defaultdict
from fractions import Fraction

from sfn.analysis import expected_latency
from sfn.bounds import fractions_up_to
from sfn.synthesis import bits_needed, is_power_of_two, synthesize

LIMITS = {
    "optimal": (lambda n: n, lambda n: 3 * n / 4 + 1 / 4),
    "size-relaxed": (lambda n: n + 3, lambda n: 6.0),
    "latency-oriented": (lambda n: 2 * (n - 1), lambda n: math.log2(3) + 2),
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--b-max", type=int, default=128)
    args = parser.parse_args()

    worst_size: dict = defaultdict(int)
    worst_et: dict = defaultdict(float)
    for a, b in fractions_up_to(args.b_max):
        n = bits_needed(b)
        for method in LIMITS:
            if method == "latency-oriented" and is_power_of_two(b):
                continue  # dyadic targets use the plain chain
            net, _ = synthesize(Fraction(a, b), method)
            worst_size[method, n] = max(worst_size[method, n], net.size)
            worst_et[method, n] = max(worst_et[method, n], float(expected_latency(net) * b / 2 ** n))

    print(f"{'method':<18}{'n':>3}{'size':>6}{'limit':>7}{'ET*b/2^n':>11}{'limit':>9}")
    for method, (size_limit, et_limit) in LIMITS.items():
        for n in range(1, bits_needed(args.b_max) + 1):
            if (method, n) not in worst_size:
                continue
            print(f"{method:<18}{n:>3}{worst_size[method, n]:>6}{size_limit(n):>7}"
                  f"{worst_et[method, n]:>11.4f}{et_limit(n):>9.4f}")


if __name__ == "__main__":
    main()
