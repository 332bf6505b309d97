import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sfn.analysis import absorption_distribution, entropy, expected_latency
from sfn.synthesis import (EmptyInput, NotDyadic, NotNormalized, OutOfRange, TargetDistribution, TooManyLeaves,
                           TreeMismatch, WeightedTree, brute_force_optimal_tree, dyadic_atoms, huffman_merges,
                           huffman_tree, knuth_yao_tree, synth_distribution_huffman, synth_distribution_ky,
                           synth_optimal)

F = Fraction


@st.composite
def dyadic_distributions(draw, m_max: int = 6, n_max: int = 6):
    n = draw(st.integers(1, n_max))
    m = draw(st.integers(1, m_max))
    cuts = sorted(draw(st.lists(st.integers(0, 2 ** n), min_size=m - 1, max_size=m - 1)))
    return [F(hi - lo, 2 ** n) for lo, hi in zip([0] + cuts, cuts + [2 ** n])]


@st.composite
def target_distributions(draw, m_max: int = 6, b_max: int = 64):
    m = draw(st.integers(2, m_max))
    b = draw(st.integers(m, b_max))
    cuts = sorted(draw(st.lists(st.integers(1, b - 1), min_size=m - 1, max_size=m - 1, unique=True)))
    return TargetDistribution(tuple(hi - lo for lo, hi in zip([0] + cuts, cuts + [b])), b)


class TestWeightedTree:
    def test_nested_round_trip(self):
        w = [F(1, 2), F(1, 6), F(1, 4), F(1, 12)]
        tree = WeightedTree.from_nested([0, [1, [2, 3]]], w)
        assert tree.to_nested() == [0, [1, [2, 3]]]
        assert tree.weight == 1 and [n.weight for n in tree.internal_nodes()] == [1, F(1, 2), F(1, 3)]
        assert tree.internal_weight_product() == F(1, 6)

    @pytest.mark.parametrize("nested", [[0, 1, 2], [0, 7], "x"])
    def test_bad_nesting(self, nested):
        with pytest.raises(TreeMismatch):
            WeightedTree.from_nested(nested, [F(1, 2), F(1, 2)])


class TestKnuthYao:
    def test_atoms(self):
        atoms = dyadic_atoms([F(14, 32), F(15, 32), F(3, 32)])
        assert atoms.atoms == ((F(1, 4), F(1, 8), F(1, 16)), (F(1, 4), F(1, 8), F(1, 16), F(1, 32)),
                               (F(1, 16), F(1, 32)))
        assert atoms.kraft_sum() == 1 and atoms.total(1) == F(15, 32)

    def test_fair_coin(self):
        _, _, net = knuth_yao_tree([F(1, 2), F(1, 2)])
        assert net.size == 1

    def test_errors(self):
        with pytest.raises(NotDyadic):
            dyadic_atoms([F(1, 3), F(2, 3)])
        with pytest.raises(NotNormalized):
            dyadic_atoms([F(1, 2), F(1, 4)])
        with pytest.raises(EmptyInput):
            dyadic_atoms([])

    def test_allotment_is_shallow_first_by_label(self):
        tree, _, net = knuth_yao_tree([F(1, 4), F(1, 2), F(1, 4)])
        assert tree.to_nested() == [1, [0, 2]]
        assert net.size == 2

    @given(dyadic_distributions())
    def test_reproduces_distribution(self, probs):
        tree, atoms, net = knuth_yao_tree(probs)
        assert tuple(absorption_distribution(net)) == tuple(probs)
        assert net.size == max(atoms.count - 1, 0)
        h = entropy(probs)
        assert h - 1e-12 <= float(expected_latency(net)) <= h + 2 + 1e-12
        tree.check()


class TestKnuthYaoDistribution:
    def test_uniform_fifths(self):
        net, trace = synth_distribution_ky([F(1, 5)] * 5)
        assert net.size == 6
        assert tuple(absorption_distribution(net)) == (F(1, 5),) * 5
        assert trace.of_kind("feedback")

    def test_fair_coin(self):
        assert synth_distribution_ky("1/2,1/2")[0].size == 1

    def test_extension(self):
        t = TargetDistribution.of("1/5,1/5,1/5,1/5,1/5")
        assert t.dyadic_extension() == (F(1, 8),) * 5 + (F(3, 8),)
        assert TargetDistribution.of("1/4,3/4").dyadic_extension() == (F(1, 4), F(3, 4))

    def test_bad_input(self):
        with pytest.raises(OutOfRange):
            TargetDistribution.of("1/2,1/3")
        with pytest.raises(OutOfRange):
            TargetDistribution.of([F(1)])

    @given(target_distributions())
    def test_bounds(self, t):
        net, _ = synth_distribution_ky(t)
        assert tuple(absorption_distribution(net)) == t.probs
        m, n = t.m, t.n
        assert net.size <= m * (n - (m.bit_length() - 1) + 1)
        h = entropy(t.dyadic_extension())
        scale = 2 ** n / t.denominator
        assert h * scale - 1e-12 <= float(expected_latency(net)) <= (h + 2) * scale + 1e-12


class TestHuffman:
    def test_merge_order(self):
        w = [F(v, 100) for v in (10, 10, 15, 15, 20, 30)]
        merges = [(a, b, a + b) for a, b in huffman_merges(w)]
        assert merges == [(F(1, 10), F(1, 10), F(1, 5)), (F(3, 20), F(3, 20), F(3, 10)),
                          (F(1, 5), F(1, 5), F(2, 5)), (F(3, 10), F(3, 10), F(3, 5)), (F(2, 5), F(3, 5), F(1))]

    def test_fair_coin(self):
        tree = huffman_tree([F(1, 2), F(1, 2)])
        assert [n.weight for n in tree.internal_nodes()] == [1]

    def test_empty(self):
        with pytest.raises(EmptyInput):
            huffman_tree([])

    def test_tie_prefers_earlier_node(self):
        tree = huffman_tree([F(1, 2), F(1, 6), F(1, 4), F(1, 12)])
        assert tree.to_nested() == [0, [2, [3, 1]]]


class TestOptimalTree:
    def test_two_leaves(self):
        tree, prod = brute_force_optimal_tree([F(1, 3), F(2, 3)])
        assert prod == 1 and tree.weight == 1

    def test_four_leaves(self):
        w = [F(1, 2), F(1, 6), F(1, 4), F(1, 12)]
        _, prod = brute_force_optimal_tree(w)
        # huffman: 1/12 + 1/6 = 1/4, 1/4 + 1/4 = 1/2, then the root
        assert prod == F(1, 8) == huffman_tree(w).internal_weight_product()

    def test_too_many(self):
        with pytest.raises(TooManyLeaves):
            brute_force_optimal_tree([F(1, 7)] * 7)

    @given(st.lists(st.integers(1, 30), min_size=2, max_size=5))
    def test_huffman_is_optimal(self, raw):
        w = [F(r, sum(raw)) for r in raw]
        assert huffman_tree(w).internal_weight_product() == brute_force_optimal_tree(w)[1]


class TestHuffmanDistribution:
    W = [F(1, 2), F(1, 6), F(1, 4), F(1, 12)]

    def test_explicit_tree(self):
        tree = WeightedTree.from_nested([0, [1, [2, 3]]], self.W)
        net, trace = synth_distribution_huffman(self.W, tree)
        assert net.size == 5
        assert [s["dist"] for s in trace.of_kind("split")] == [["1/2", "1/2"], ["1/3", "2/3"], ["3/4", "1/4"]]
        assert [s["splitters"] for s in trace.of_kind("split")] == [1, 2, 2]
        assert tuple(absorption_distribution(net)) == tuple(self.W)

    def test_default_tree(self):
        net, _ = synth_distribution_huffman(self.W)
        assert net.size == 4 and tuple(absorption_distribution(net)) == tuple(self.W)

    def test_fair_coin(self):
        assert synth_distribution_huffman("1/2,1/2")[0].size == 1

    def test_zero_labels_skipped(self):
        net, _ = synth_distribution_huffman("0,1/3,0,2/3")
        assert tuple(absorption_distribution(net)) == (0, F(1, 3), 0, F(2, 3))
        net, _ = synth_distribution_huffman("0,1,0")
        assert net.size == 0

    def test_mismatched_tree(self):
        with pytest.raises(TreeMismatch):
            synth_distribution_huffman(self.W, WeightedTree.from_nested([0, [1, 2]], self.W))
        bad = WeightedTree.join(WeightedTree.leaf(0, F(1, 3)), WeightedTree.leaf(1, F(2, 3)))
        with pytest.raises(TreeMismatch):
            synth_distribution_huffman("1/2,1/2", bad)

    @given(target_distributions())
    def test_bounds(self, t):
        net, _ = synth_distribution_huffman(t)
        assert tuple(absorption_distribution(net)) == t.probs
        assert net.size <= (t.m - 1) * t.n
        inner = list(huffman_tree(list(t.probs)).internal_nodes())
        sub = [expected_latency(synth_optimal(x.left.weight / x.weight)[0]) for x in inner]
        et = expected_latency(net)
        assert et == sum(x.weight * e for x, e in zip(inner, sub))
        assert float(et) <= (entropy(t.probs) + 1) * float(max(sub)) + 1e-12


def test_random_distribution_sweep():
    from sfn.bounds import random_target_distribution
    rng = random.Random(3)
    for _ in range(200):
        t = random_target_distribution(rng)
        for synth in (synth_distribution_ky, synth_distribution_huffman):
            assert tuple(absorption_distribution(synth(t)[0])) == t.probs
