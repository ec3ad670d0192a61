"""
Tests: command line entry points end to end.
"""

import pytest

from conftest import build
from coflowsched.cli import main
from coflowsched.harness import CSV_FIELDS, read_csv
from coflowsched.workload import read_instance, write_instance


class TestGen:

    def test_writes_instance(self, tmp_path):
        out = tmp_path / "inst.txt"
        assert main(["gen", "--seed", "7", "--coflows", "5", "--cores", "3", "-o", str(out)]) == 0
        instance = read_instance(out)
        assert instance.cores == 3
        assert [c.id for c in instance.coflows] == [1, 2, 3, 4, 5]
        assert instance.network.is_identical

    def test_same_seed_same_file(self, tmp_path):
        for name in ("a.txt", "b.txt"):
            main(["gen", "--seed", "3", "--heterogeneity", "2", "-o", str(tmp_path / name)])
        assert (tmp_path / "a.txt").read_bytes() == (tmp_path / "b.txt").read_bytes()

    def test_seed_required(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["gen", "-o", str(tmp_path / "inst.txt")])

    def test_bad_heterogeneity(self, tmp_path):
        assert main(["gen", "--seed", "1", "--cores", "2", "--heterogeneity", "3", "-o", str(tmp_path / "x")]) == 1


class TestRun:

    def test_config_file(self, tmp_path):
        config = tmp_path / "s.cfg"
        config.write_text("name = smoke\ncores = 2\ncoflows = 3\nports = 6\nmixture = sparse\n", encoding="utf-8")
        rows, summary = tmp_path / "rows.csv", tmp_path / "summary.csv"
        code = main(["run", str(config), "--seed", "5", "--trials", "2", "-o", str(rows), "--summary", str(summary)])
        assert code == 0
        records = read_csv(rows)
        assert len(records) == 2 * 4
        assert {r["scenario"] for r in records} == {"smoke"}
        assert summary.exists()

    def test_preset_with_cdf(self, tmp_path):
        rows, cdf = tmp_path / "rows.csv", tmp_path / "cdf.csv"
        code = main(["run", "--preset", "cdf", "--seed", "1", "--trials", "1", "-o", str(rows), "--cdf", str(cdf)])
        assert code == 0
        assert rows.read_text(encoding="utf-8").splitlines()[0] == ",".join(CSV_FIELDS)
        assert "discrete" in cdf.read_text(encoding="utf-8")

    def test_trace_preset(self, tmp_path, tiny_trace):
        rows = tmp_path / "rows.csv"
        code = main(["run", "--preset", "trace", "--trace", str(tiny_trace), "--seed", "0", "-o", str(rows)])
        assert code == 0
        assert len(read_csv(rows)) == 5 * 4

    def test_needs_config_or_preset(self, tmp_path):
        assert main(["run", "--seed", "1", "-o", str(tmp_path / "rows.csv")]) == 1

    def test_missing_config(self, tmp_path):
        assert main(["run", str(tmp_path / "absent.cfg"), "--seed", "1", "-o", str(tmp_path / "rows.csv")]) == 1


class TestTrace:

    def test_stats_per_threshold(self, tiny_trace, capsys):
        assert main(["trace", str(tiny_trace), "--threshold", "0", "4", "10"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines == [
            "threshold,coflows,min_flows,max_flows,max_raw_flows,min_size,max_size",
            "0,3,1,6,6,1,10",
            "4,2,4,6,6,1,4",
            "10,0,0,0,0,0,0",
        ]

    def test_raw_count_before_merging(self, tmp_path, capsys):
        path = tmp_path / "trace.txt"
        path.write_text("4 1\n1 0 2 0 0 1 3:4\n", encoding="utf-8")
        assert main(["trace", str(path), "--threshold", "0", "2"]) == 0
        # two mappers on rack 0 list two pairs that merge into one flow; the threshold sees one
        assert capsys.readouterr().out.splitlines()[1:] == ["0,1,1,1,2,4,4", "2,0,0,0,0,0,0"]

    def test_missing_trace(self, tmp_path):
        assert main(["trace", str(tmp_path / "absent.txt")]) == 1


class TestOracle:

    def test_prints_optimum_and_witness(self, tmp_path, capsys):
        path = tmp_path / "inst.txt"
        write_instance(build(2, {1: {(1, 1): 4, (2, 2): 4}}), path)
        assert main(["oracle", str(path)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines == [
            "optimum=4",
            "explored=2",
            "port_lb=2",
            "combined_lb=4",
            "core1=1->1@1,2->2@1",
            "core2=",
        ]

    def test_coflow_level(self, tmp_path, capsys):
        path = tmp_path / "inst.txt"
        write_instance(build(2, {1: {(1, 1): 5}, 2: {(1, 1): 5}}), path)
        assert main(["oracle", str(path), "--level", "coflow"]) == 0
        assert capsys.readouterr().out.splitlines()[0] == "optimum=5"

    def test_state_limit(self, tmp_path):
        path = tmp_path / "inst.txt"
        write_instance(build(3, {1: {(1, 1): 1, (1, 2): 1, (2, 1): 1, (2, 2): 1}}), path)
        assert main(["oracle", str(path), "--max-states", "5"]) == 1


class TestRealize:

    def test_dump_to_file(self, tmp_path):
        inst, out = tmp_path / "inst.txt", tmp_path / "schedule.txt"
        write_instance(build(2, {1: {(1, 1): 5}, 2: {(1, 1): 5}}), inst)
        assert main(["realize", str(inst), "--scheduler", "fls", "-o", str(out)]) == 0
        assert out.read_text(encoding="utf-8") == "1,0,5,1->1@1\n2,0,5,1->1@2\n"

    def test_dump_to_stdout(self, tmp_path, capsys):
        inst = tmp_path / "inst.txt"
        write_instance(build(1, {1: {(1, 1): 2, (2, 2): 3}}), inst)
        assert main(["realize", str(inst)]) == 0
        assert capsys.readouterr().out.splitlines()[0].startswith("1,0,")

    def test_scheduler_network_mismatch(self, tmp_path):
        inst = tmp_path / "inst.txt"
        write_instance(build(2, {1: {(1, 1): 5}}, speeds=(1, 2)), inst)
        assert main(["realize", str(inst), "--scheduler", "cls"]) == 1

    def test_missing_instance(self, tmp_path):
        assert main(["realize", str(tmp_path / "absent.txt")]) == 1
