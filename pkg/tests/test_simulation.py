import io
import json
from fractions import Fraction
from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sfn.analysis import absorption_distribution, expected_latency, latency_variance
from sfn.network import FlowNetwork, O
from sfn.simulation import (TRUNCATED, SimConfig, SplitMix64, _threshold, iter_trials, mix64, run_token, simulate,
                            trial_outcomes, write_trial_log)
from sfn.synthesis import synth_optimal

from conftest import two_loop
from strategies import networks

F = Fraction


def within(report, net, k):
    exact = absorption_distribution(net)
    n = report.trials
    for count, p in zip(report.counts, exact):
        sigma = sqrt(float(p * (1 - p)) / n)
        assert abs(count / n - float(p)) <= k * sigma + 1e-15
    sigma = sqrt(float(latency_variance(net)) / n)
    assert abs(report.mean_latency - float(expected_latency(net))) <= k * sigma + 1e-15


class TestGenerator:
    def test_reference_stream(self):
        rng = SplitMix64(0)
        assert [rng.next() for _ in range(3)] == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]

    def test_per_trial_streams_differ(self):
        assert SplitMix64.for_trial(1, 0).next() != SplitMix64.for_trial(1, 1).next()
        assert SplitMix64.for_trial(5, 3).state == mix64(5 + 4 * 0x9E3779B97F4A7C15)

    def test_threshold_exact(self):
        assert _threshold(F(1, 2)) == 2 ** 63
        assert _threshold(F(1, 3)) == -(-(2 ** 64) // 3)


class TestRunToken:
    def test_pass_through(self):
        net = FlowNetwork((), O(0), 1)
        assert run_token(net, SplitMix64(1)) == (0, 0)

    def test_reproducible(self):
        a = [run_token(two_loop(), SplitMix64.for_trial(9, t)) for t in range(50)]
        b = [run_token(two_loop(), SplitMix64.for_trial(9, t)) for t in range(50)]
        assert a == b

    def test_truncation(self):
        outcomes = [run_token(two_loop(), SplitMix64.for_trial(0, t), max_steps=1) for t in range(64)]
        assert {label for label, _ in outcomes} == {0, TRUNCATED}


class TestSimulate:
    def test_vectorized_matches_scalar(self):
        config = SimConfig(2000, seed=11)
        labels, steps = trial_outcomes(two_loop(), config)
        assert list(zip(labels.tolist(), steps.tolist())) == list(iter_trials(two_loop(), config))

    @settings(max_examples=25)
    @given(networks(max_splitters=5), st.integers(0, 2 ** 64 - 1))
    def test_vectorized_matches_scalar_everywhere(self, net, seed):
        config = SimConfig(200, seed=seed, max_steps=50)
        labels, steps = trial_outcomes(net, config)
        assert list(zip(labels.tolist(), steps.tolist())) == list(iter_trials(net, config))

    def test_partition_independent(self):
        config = SimConfig(1000, seed=3)
        whole = trial_outcomes(two_loop(), config)
        parts = [trial_outcomes(two_loop(), config, first=f, count=250) for f in range(0, 1000, 250)]
        assert np.array_equal(whole[0], np.concatenate([p[0] for p in parts]))
        assert np.array_equal(whole[1], np.concatenate([p[1] for p in parts]))

    def test_two_loop_statistics(self):
        report = simulate(two_loop(), SimConfig(10 ** 6, seed=1))
        assert sum(report.counts) + report.truncated == report.trials
        within(report, two_loop(), 3)

    def test_fourteen_twenty_ninths(self):
        net, _ = synth_optimal(F(14, 29))
        within(simulate(net, SimConfig(10 ** 6, seed=42)), net, 3)

    def test_single_trial(self):
        report = simulate(two_loop(), SimConfig(1))
        assert sum(report.counts) == 1

    def test_repeatable(self):
        config = SimConfig(5000, seed=99)
        assert simulate(two_loop(), config) == simulate(two_loop(), config)

    def test_truncated_count(self):
        report = simulate(two_loop(), SimConfig(1000, seed=0, max_steps=1))
        assert report.truncated > 0 and sum(report.counts) + report.truncated == 1000

    def test_report_document(self):
        d = simulate(two_loop(), SimConfig(10, seed=2)).to_dict()
        assert d["trials"] == 10 and len(d["counts"]) == 2

    def test_trial_log(self):
        buf = io.StringIO()
        write_trial_log(two_loop(), SimConfig(5, seed=4), buf)
        records = [json.loads(line) for line in buf.getvalue().splitlines()]
        assert [r["trial"] for r in records] == list(range(5))
        assert [(r["label"], r["steps"]) for r in records] == list(iter_trials(two_loop(), SimConfig(5, seed=4)))

    @pytest.mark.parametrize("kwargs", [{"trials": 0}, {"trials": 1, "max_steps": 0}])
    def test_config_guard(self, kwargs):
        with pytest.raises(ValueError):
            SimConfig(**kwargs)
