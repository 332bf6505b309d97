"""Knuth-Yao versus Huffman-tree synthesis on random rational distributions.

Reports mean and worst splitter counts and expected latencies per m, with
entropy-based latency references.
"""
import argparse
import random
from statistics import mean

from sfn.analysis import entropy, expected_latency
from sfn.bounds import random_target_distribution
from sfn.synthesis import synth_distribution_huffman, synth_distribution_ky


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cases", type=int, default=2000)
    parser.add_argument("--b-max", type=int, default=64)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    rows: dict[int, list[tuple]] = {}
    for _ in range(args.cases):
        t = random_target_distribution(rng, 6, args.b_max)
        ky, _ = synth_distribution_ky(t)
        hf, _ = synth_distribution_huffman(t)
        rows.setdefault(t.m, []).append(
            (ky.size, float(expected_latency(ky)), hf.size, float(expected_latency(hf)), entropy(t.probs)))

    print(f"{'m':>2}{'cases':>7}{'KY size':>9}{'KY ET':>8}{'HF size':>9}{'HF ET':>8}{'H(X)':>7}{'max KY/HF ET':>14}")
    for m in sorted(rows):
        r = rows[m]
        col = list(zip(*r))
        worst = max(k / h for _, k, _, h, _ in r if h)
        print(f"{m:>2}{len(r):>7}{mean(col[0]):>9.2f}{mean(col[1]):>8.3f}{mean(col[2]):>9.2f}"
              f"{mean(col[3]):>8.3f}{mean(col[4]):>7.3f}{worst:>14.3f}")


if __name__ == "__main__":
    main()
