import numpy as np
import pytest

from biasaudit.cli import main
from biasaudit.data import (
    load_dataset,
    load_schema,
    save_dataset,
    save_schema,
    stratified_split,
)
from biasaudit.synth import (
    SynthConfig,
    generate_base,
    inject_group_bias,
    load_truth,
    save_truth,
)


def write_inputs(tmp_path, dataset, name="data"):
    data_path = tmp_path / f"{name}.csv"
    schema_path = tmp_path / f"{name}_schema.txt"
    save_dataset(dataset, data_path)
    save_schema(dataset.schema, schema_path)
    return str(data_path), str(schema_path)


def write_csv(tmp_path, text, name="tiny"):
    data_path = tmp_path / f"{name}.csv"
    data_path.write_text(text, encoding="utf-8")
    schema_path = tmp_path / f"{name}_schema.txt"
    schema_path.write_text("numerical = x\ncategorical =\nlabel = y\ngroup = s\n",
                           encoding="utf-8")
    return str(data_path), str(schema_path)


@pytest.fixture(scope="module")
def synth_inputs(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("synth")
    cfg = SynthConfig(n_per_group=250, seed=3)
    biased, truth = inject_group_bias(generate_base(cfg), cfg)
    data_path, schema_path = write_inputs(tmp, biased)
    truth_path = tmp / "truth.txt"
    save_truth(truth, truth_path)
    return data_path, schema_path, str(truth_path), biased


class TestAttribute:
    def test_writes_report_and_detects_bias(self, synth_inputs, tmp_path):
        data_path, schema_path, truth_path, biased = synth_inputs
        out = tmp_path / "out"
        code = main(["attribute", "--input", data_path, "--schema", schema_path,
                     "--out", str(out)])
        assert code == 0
        report = (out / "bias_report.txt").read_text().splitlines()
        assert len(report) == 1 + biased.n
        truth = load_truth(truth_path)
        flagged = np.zeros(biased.n, dtype=bool)
        for line in report[1:]:
            fields = line.split("\t")
            idx, defined = int(fields[0]), fields[5] == "1"
            flagged[idx] = defined and float(fields[4]) > 0.5
        target = biased.groups == 0
        accuracy = (flagged[target] == truth[target]).mean()
        assert accuracy >= 0.95

    def test_bad_schema_path_exits_one_without_output(self, synth_inputs, tmp_path):
        data_path, _, _, _ = synth_inputs
        out = tmp_path / "out"
        code = main(["attribute", "--input", data_path, "--schema",
                     str(tmp_path / "missing.txt"), "--out", str(out)])
        assert code == 1
        assert not (out / "bias_report.txt").exists()

    def test_bad_input_path_exits_one(self, synth_inputs, tmp_path):
        _, schema_path, _, _ = synth_inputs
        code = main(["attribute", "--input", str(tmp_path / "missing.csv"),
                     "--schema", schema_path, "--out", str(tmp_path / "o")])
        assert code == 1

    def test_disconnected_groups_warns_and_succeeds(self, tmp_path, capsys):
        data_path, schema_path = write_csv(
            tmp_path, "x,s,y\n0.0,0,1\n0.01,0,0\n5.0,1,1\n5.01,1,0\n")
        out = tmp_path / "out"
        code = main(["attribute", "--input", data_path, "--schema", schema_path,
                     "--out", str(out), "--tr", "0.1"])
        assert code == 0
        assert "undefined" in capsys.readouterr().err
        assert (out / "bias_report.txt").exists()

    def test_adjacency_similarity_variant(self, tmp_path):
        # identical rows -> complete graph; row-normalized bypass weighs the
        # four other-group rows (credibility 1/3 each) at 1/4 apiece, two of
        # them opposite-label -> bias 0.5; the lone-group query has no
        # same-group mass (zero diagonal), so its credibility is undefined
        data_path, schema_path = write_csv(
            tmp_path, "x,s,y\n0.5,0,0\n0.5,1,1\n0.5,1,1\n0.5,1,0\n0.5,1,0\n")
        out = tmp_path / "out"
        code = main(["attribute", "--input", data_path, "--schema", schema_path,
                     "--out", str(out), "--similarity", "adjacency", "--tr", "1.0"])
        assert code == 0
        lines = (out / "bias_report.txt").read_text().splitlines()
        fields = lines[1].split("\t")
        assert fields[3] == "nan"
        assert fields[4] == "0.500000"
        assert fields[5] == "1"


class TestExplain:
    def test_hand_derived_contributions(self, tmp_path, capsys):
        # identical rows -> complete graph; damping 0.5 gives Q = 0.4*I + 0.2
        # everywhere, hand-solved contributions (0.5, 0.0) for the query
        data_path, schema_path = write_csv(
            tmp_path, "x,s,y\n0.5,0,0\n0.5,1,1\n0.5,1,0\n")
        code = main(["explain", "--input", data_path, "--schema", schema_path,
                     "--index", "0", "--topk", "2", "--tr", "1.0", "--damping", "0.5"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 4  # header, query, two explanation rows
        query = lines[1].split("\t")
        assert query[0] == "query"
        assert query[-3] == "0.500000"
        first, second = lines[2].split("\t"), lines[3].split("\t")
        assert first[1] == "1" and first[-3] == "0.500000"
        assert first[-2] == "0.750000" and first[-1] == "0.200000"
        assert second[1] == "2" and second[-3] == "0.000000"

    def test_zero_bias_query_prints_zero_contributions(self, tmp_path, capsys):
        # every comparable other-group row shares the query's label
        data_path, schema_path = write_csv(
            tmp_path, "x,s,y\n0.5,0,1\n0.5,1,1\n0.5,1,1\n")
        code = main(["explain", "--input", data_path, "--schema", schema_path,
                     "--index", "0", "--topk", "2", "--tr", "1.0"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[1].split("\t")[-3] == "0.000000"  # the bias itself
        for line in lines[2:]:
            assert line.split("\t")[-3] == "0.000000"
        assert len(lines) == 4

    def test_topk_zero_prints_header_only(self, tmp_path, capsys):
        data_path, schema_path = write_csv(
            tmp_path, "x,s,y\n0.5,0,0\n0.5,1,1\n0.5,1,0\n")
        code = main(["explain", "--input", data_path, "--schema", schema_path,
                     "--index", "0", "--topk", "0", "--tr", "1.0"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert len(lines) == 2  # header and query row only

    def test_undefined_query_exits_three(self, tmp_path, capsys):
        data_path, schema_path = write_csv(
            tmp_path, "x,s,y\n0.0,0,1\n0.01,0,0\n5.0,1,1\n5.01,1,0\n")
        code = main(["explain", "--input", data_path, "--schema", schema_path,
                     "--index", "0", "--topk", "3", "--tr", "0.1"])
        assert code == 3
        assert "no comparable other-group evidence" in capsys.readouterr().err

    def test_index_out_of_range_exits_one(self, tmp_path):
        data_path, schema_path = write_csv(
            tmp_path, "x,s,y\n0.5,0,0\n0.5,1,1\n")
        code = main(["explain", "--input", data_path, "--schema", schema_path,
                     "--index", "9", "--topk", "1"])
        assert code == 1


class TestMitigate:
    def test_zero_budget_before_equals_after(self, synth_inputs, tmp_path):
        data_path, schema_path, _, _ = synth_inputs
        out = tmp_path / "out"
        code = main(["mitigate", "--input", data_path, "--schema", schema_path,
                     "--out", str(out), "--strategy", "rem", "--budget", "0"])
        assert code == 0
        before = (out / "metrics_before.txt").read_text()
        after = (out / "metrics_after.txt").read_text()
        assert before == after
        assert (out / "plan.txt").exists()
        assert (out / "edited_dataset.csv").exists()

    def test_removal_outputs(self, synth_inputs, tmp_path):
        data_path, schema_path, _, biased = synth_inputs
        out = tmp_path / "out"
        code = main(["mitigate", "--input", data_path, "--schema", schema_path,
                     "--out", str(out), "--strategy", "rem", "--budget", "20",
                     "--control", "random"])
        assert code == 0
        edited = load_dataset(str(out / "edited_dataset.csv"),
                              load_schema(schema_path))
        train_size = len(stratified_split(biased, seed=0)[0][0])
        assert edited.n == train_size - 20
        plan_lines = (out / "plan.txt").read_text().splitlines()
        assert len(plan_lines) == 1 + 20
        assert (out / "metrics_control.txt").exists()

    def test_augmentation_deterministic(self, synth_inputs, tmp_path):
        data_path, schema_path, _, biased = synth_inputs
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            code = main(["mitigate", "--input", data_path, "--schema", schema_path,
                         "--out", str(out), "--strategy", "aug", "--budget", "15",
                         "--seed", "11"])
            assert code == 0
            outs.append((out / "plan.txt").read_text())
        assert outs[0] == outs[1]
        edited = load_dataset(str(tmp_path / "a" / "edited_dataset.csv"),
                              load_schema(schema_path))
        train_size = len(stratified_split(biased, seed=11)[0][0])
        assert edited.n == train_size + 15

    def test_exact_tie_exits_four(self, tmp_path):
        rows = ["x,s,y"]
        for i in range(10):
            rows.append(f"{i / 10:.2f},{i % 2},{1 if i < 5 else 0}")
        data_path = tmp_path / "tie.csv"
        data_path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        schema_path = tmp_path / "tie_schema.txt"
        schema_path.write_text("numerical = x\ncategorical =\nlabel = y\ngroup = s\n",
                               encoding="utf-8")
        with pytest.warns(UserWarning):
            code = main(["mitigate", "--input", str(data_path), "--schema", str(schema_path),
                         "--out", str(tmp_path / "out"), "--strategy", "rem",
                         "--budget", "1", "--tr", "1.0"])
        assert code == 4
        with pytest.warns(UserWarning):
            code = main(["mitigate", "--input", str(data_path), "--schema", str(schema_path),
                         "--out", str(tmp_path / "out"), "--strategy", "rem",
                         "--budget", "1", "--tr", "1.0", "--tie-label", "1"])
        assert code == 0


def test_console_entry_point(tmp_path):
    import subprocess
    import sys

    result = subprocess.run(
        [sys.executable, "-m", "biasaudit.cli", "--help"],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "attribute" in result.stdout and "mitigate" in result.stdout
