import json
import subprocess
import sys

import pydot
import pytest

from sfn.cli import main
from sfn.network import deserialize, serialize

from conftest import two_loop


@pytest.fixture
def loop_file(tmp_path):
    path = tmp_path / "loop.json"
    path.write_text(serialize(two_loop()))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestSynth:
    def test_fourteen_twenty_ninths(self, capsys, tmp_path):
        out_file = tmp_path / "n.json"
        code, out, _ = run(capsys, "synth", "--prob", "14/29", "--method", "optimal", "--out", str(out_file))
        assert code == 0 and "5 splitters" in out and "(14/29, 15/29)" in out
        assert deserialize(out_file.read_text()).size == 5

    def test_half(self, capsys):
        code, out, _ = run(capsys, "synth", "--prob", "1/2")
        assert code == 0 and "1 splitter\n" in out

    def test_trace_expansions(self, capsys):
        code, out, _ = run(capsys, "synth", "--prob", "7/29", "--method", "size-relaxed", "--trace")
        assert code == 0 and "a=00111" in out and "c=10110" in out

    @pytest.mark.parametrize("prob", ["3/2", "0.5", "x", "1/0"])
    def test_invalid_target(self, capsys, prob):
        code, _, err = run(capsys, "synth", "--prob", prob)
        assert code == 2 and err.startswith("error:")

    def test_json(self, capsys):
        code, out, _ = run(capsys, "synth", "--prob", "1/3", "--method", "latency-oriented", "--format", "json")
        doc = json.loads(out)
        assert code == 0 and doc["expected_latency"] == "2" and doc["distribution"] == ["1/3", "2/3"]


class TestSynthDist:
    def test_uniform_fifths(self, capsys):
        code, out, _ = run(capsys, "synth-dist", "--dist", "1/5,1/5,1/5,1/5,1/5", "--method", "ky")
        assert code == 0 and "6 splitters" in out and "entropy" in out

    def test_huffman_with_tree_file(self, capsys, tmp_path):
        tree = tmp_path / "tree.json"
        tree.write_text("[0, [1, [2, 3]]]")
        code, out, _ = run(capsys, "synth-dist", "--dist", "1/2,1/6,1/4,1/12", "--method", "huffman",
                           "--tree", str(tree))
        assert code == 0 and "5 splitters" in out

    def test_huffman_default_tree(self, capsys):
        code, out, _ = run(capsys, "synth-dist", "--dist", "1/2,1/6,1/4,1/12", "--method", "huffman")
        assert code == 0 and "4 splitters" in out

    def test_fair_coin(self, capsys):
        code, out, _ = run(capsys, "synth-dist", "--dist", "1/2,1/2", "--method", "ky")
        assert code == 0 and "1 splitter\n" in out

    def test_not_normalized(self, capsys):
        code, _, err = run(capsys, "synth-dist", "--dist", "1/2,1/3")
        assert code == 2 and "sum" in err

    def test_bad_tree(self, capsys, tmp_path):
        tree = tmp_path / "tree.json"
        tree.write_text("[0, [1, 2]]")
        code, _, _ = run(capsys, "synth-dist", "--dist", "1/2,1/6,1/4,1/12", "--method", "huffman",
                         "--tree", str(tree))
        assert code == 2


class TestFileCommands:
    def test_analyze(self, capsys, loop_file):
        code, out, _ = run(capsys, "analyze", loop_file, "--mason-crosscheck")
        assert code == 0 and "(2/3, 1/3)" in out and "expected latency: 2\n" in out and "agrees" in out

    def test_analyze_invalid(self, capsys, tmp_path):
        path = tmp_path / "trap.json"
        path.write_text('{"num_outputs": 1, "start": "s:0", "splitters": '
                        '[{"id": 0, "bias": "1/2", "branch0": "s:0", "branch1": "s:0"}]}')
        code, _, err = run(capsys, "analyze", str(path))
        assert code == 1 and "trap" in err

    def test_analyze_unparsable(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{")
        code, _, err = run(capsys, "analyze", str(path))
        assert code == 2 and "line 1" in err

    def test_cycle_budget_env(self, capsys, loop_file, monkeypatch):
        monkeypatch.setenv("SFN_CYCLE_BUDGET", "0")
        code, _, _ = run(capsys, "analyze", loop_file, "--mason-crosscheck")
        assert code == 1

    def test_simulate(self, capsys, loop_file, tmp_path):
        log = tmp_path / "log.jsonl"
        code, out, _ = run(capsys, "simulate", loop_file, "--seed", "7", "--trials", "100000", "--log", str(log))
        assert code == 0 and "exact 2/3" in out and "exact 2 " in out
        assert len(log.read_text().splitlines()) == 100000
        code, again, _ = run(capsys, "simulate", loop_file, "--seed", "7", "--trials", "100000")
        assert again == out

    def test_export_dot(self, capsys, loop_file):
        code, out, _ = run(capsys, "export", loop_file, "--dot", "--annotate")
        assert code == 0 and '"0: 2/3"' in out and '"1: 1/3"' in out
        assert pydot.graph_from_dot_data(out)

    def test_export_document(self, capsys, loop_file):
        code, out, _ = run(capsys, "export", loop_file)
        assert deserialize(out) == two_loop()


class TestTraceCommand:
    def test_prob(self, capsys):
        code, out, _ = run(capsys, "trace", "--prob", "14/29")
        assert code == 0 and "7/16" in out

    def test_dist(self, capsys):
        code, out, _ = run(capsys, "trace", "--dist", "1/5,1/5,1/5,1/5,1/5")
        assert code == 0 and "atoms" in out

    def test_needs_exactly_one_target(self, capsys):
        assert run(capsys, "trace")[0] == 2
        assert run(capsys, "trace", "--prob", "1/3", "--method", "ky")[0] == 2


class TestCheckBounds:
    def test_tiny_sweep(self, capsys, tmp_path):
        report = tmp_path / "r.json"
        code, out, _ = run(capsys, "check-bounds", "--b-max", "2", "--report", str(report))
        assert code == 0 and "FAIL" not in out
        assert all(r["passed"] for r in json.loads(report.read_text()))

    def test_mutant_caught(self, capsys):
        code, out, _ = run(capsys, "check-bounds", "--b-max", "16", "--method", "optimal", "--inject-mutant")
        assert code == 1 and "counterexample" in out and "1/3" in out

    def test_guard(self, capsys):
        assert run(capsys, "check-bounds", "--b-max", "5000")[0] == 2


def test_usage_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(["synth"])
    assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sfn", "synth", "--prob", "1/3"], capture_output=True, text=True)
    assert proc.returncode == 0 and "2 splitters" in proc.stdout
