import json
import math

import numpy as np
import pytest

from altbound.cli import RunConfig, main, run

IDENTITY_DOC = {"N": 2, "M": 2, "A": [[[1, 0], [0, 1]]], "B": [[[1, 0], [0, 1]]]}
SQUEEZE_DOC = {"N": 2, "M": 2, "A": [[[1, 0], [0, 1]]], "B": [[[0.5, 0], [0, 2]]]}
STANFORD_AS_B_DOC = {
    "N": 2,
    "M": 2,
    "A": [[[1, 0], [0, 1]]],
    "B": [
        [[0.5, 0.0], [0.0, 2.0]],
        [
            [math.sqrt(3.0) / 2.0, 0.5],
            [-0.5, math.sqrt(3.0) / 2.0],
        ],
    ],
}
A_ONLY_DOC = {"N": 2, "M": 2, "A": [[[1, 0], [0, 1]], [[1, 1], [0, 1]]], "B": []}


@pytest.fixture
def docs(tmp_path):
    paths = {}
    for name, doc in [
        ("identity", IDENTITY_DOC),
        ("squeeze", SQUEEZE_DOC),
        ("stanford_b", STANFORD_AS_B_DOC),
        ("a_only", A_ONLY_DOC),
    ]:
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(doc))
        paths[name] = str(p)
    return paths


def run_json(config):
    code, text = run(config)
    return code, json.loads(text)


class TestCommands:
    def test_validate(self, docs):
        code, report = run_json(RunConfig(command="validate", input_path=docs["squeeze"]))
        assert code == 0
        assert report["result"]["invertible"] is True
        assert report["settings"]["norm"] == "maxrow"
        assert report["settings"]["orientation"] == "right"
        assert "tolerances" in report

    def test_validate_zero_row_still_exits_zero(self, tmp_path):
        doc = {"N": 2, "M": 2, "A": [[[1, 0], [0, 0]]], "B": [[[1, 0], [0, 1]]]}
        p = tmp_path / "zero_row.json"
        p.write_text(json.dumps(doc))
        code, report = run_json(RunConfig(command="validate", input_path=str(p)))
        assert code == 0
        assert report["result"]["nonzero_rows"] is False

    def test_mu_table_json_and_csv(self, docs):
        config = RunConfig(command="mu-table", input_path=docs["identity"], n_max=4)
        code, report = run_json(config)
        assert code == 0
        assert [row["mu"] for row in report["result"]["rows"]] == [1.0] * 4
        assert report["result"]["verdict"]["kind"] == "bounded-up-to-horizon"
        config.fmt = "csv"
        code, text = run(config)
        lines = text.splitlines()
        assert lines[0] == "n,mu,witness_a,best_b,nodes,certified"
        assert len(lines) == 5

    def test_csv_rejected_elsewhere(self, docs):
        from altbound.errors import ParseError

        with pytest.raises(ParseError):
            run(RunConfig(command="validate", input_path=docs["identity"], fmt="csv"))

    def test_best_response(self, docs):
        code, report = run_json(
            RunConfig(
                command="best-response",
                input_path=docs["stanford_b"],
                a_indices="0",
            )
        )
        assert code == 0
        assert report["result"]["b_indices"] == [1]
        assert report["result"]["certified"] is True

    def test_adversary_positive_and_negative(self, docs, tmp_path):
        doc = {
            "N": 2,
            "M": 2,
            "A": [
                (1.02 * np.array(STANFORD_AS_B_DOC["B"][0])).tolist(),
                (1.02 * np.array(STANFORD_AS_B_DOC["B"][1])).tolist(),
            ],
            "B": [[[1, 0], [0, 1]]],
        }
        p = tmp_path / "growing.json"
        p.write_text(json.dumps(doc))
        code, report = run_json(
            RunConfig(command="adversary", input_path=str(p), m_target=3)
        )
        assert code == 0
        assert report["result"]["verified"] is True
        assert report["result"]["certificate"]["total_len"] == 8

        code, report = run_json(
            RunConfig(command="adversary", input_path=docs["identity"], m_target=2)
        )
        assert code == 1
        assert report["result"]["found"] is False

    def test_contractivity_exit_codes(self, docs, tmp_path):
        code, report = run_json(
            RunConfig(command="contractivity", input_path=docs["stanford_b"], horizon=8)
        )
        assert code == 1
        assert report["result"]["result"] == "no-within-horizon"
        assert report["result"]["witness"] == [0] * 8

        doc = {"N": 2, "M": 2, "A": [[[0.5, 0], [0, 0.5]]], "B": [[[1, 0], [0, 1]]]}
        p = tmp_path / "half.json"
        p.write_text(json.dumps(doc))
        code, report = run_json(
            RunConfig(command="contractivity", input_path=str(p), horizon=1)
        )
        assert code == 0
        assert report["result"]["k"] == 1

    def test_stanford(self):
        code, report = run_json(
            RunConfig(command="stanford", alpha=1.0, n=8, target=1e-3, x="0,1")
        )
        assert code == 0
        result = report["result"]
        assert result["q"] == pytest.approx(0.7329304734406691)
        assert result["lower_bound"]["min_product_norm"] >= 1.0 - 1e-9
        assert result["trace"][0]["matrix_applied"] == "rotation"
        assert result["final_norm"] <= 1e-3

    def test_counterexample(self, docs):
        code, report = run_json(
            RunConfig(
                command="counterexample",
                input_path=docs["a_only"],
                alpha=1.02,
                n=10,
                target=1e-3,
                x="1,0",
            )
        )
        assert code == 0
        result = report["result"]
        assert result["norm_floor"]["min_product_norm"] >= 1.02**10 - 1e-9
        assert result["pointwise"]["final_vector_norm"] <= 1e-3
        assert len(result["system"]["B"]) == 4

    def test_probe_exit_codes(self, docs, tmp_path):
        code, report = run_json(
            RunConfig(command="probe", input_path=docs["identity"], horizon=10, cap=5.0)
        )
        assert code == 0
        assert report["result"]["outcome"] == "stayed-below-cap"

        doc = {"N": 2, "M": 2, "A": [[[2, 0], [0, 2]]], "B": [[[1, 0], [0, 1]]]}
        p = tmp_path / "double.json"
        p.write_text(json.dumps(doc))
        code, report = run_json(
            RunConfig(command="probe", input_path=str(p), horizon=10, cap=10.0, x="1,0")
        )
        assert code == 1
        assert report["result"]["exceeded_at"] == 4

    def test_convert_round_trips(self, docs):
        code, text = run(RunConfig(command="convert", input_path=docs["squeeze"]))
        assert code == 0
        doc = json.loads(text)
        assert doc["orientation"] == "left"
        assert doc["A"] == [[[1.0, 0.0], [0.0, 1.0]]]


class TestErrorsAndDeterminism:
    def test_missing_file_exit_two(self, capsys):
        code = main(["validate", "nope.json"])
        assert code == 2
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "FileNotFoundError"

    def test_malformed_json_exit_two(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{oops")
        assert main(["validate", str(p)]) == 2
        assert json.loads(capsys.readouterr().err)["error"] == "ParseError"

    def test_budget_exit_three(self, docs, capsys):
        code = main(
            ["mu-table", docs["stanford_b"], "--n-max", "30", "--node-budget", "2000"]
        )
        assert code == 3

    def test_node_budget_floor_enforced(self, docs, capsys):
        assert main(["validate", docs["identity"], "--node-budget", "10"]) == 2

    def test_human_format_mu_table(self, docs, capsys):
        assert main(["mu-table", docs["identity"], "--n-max", "3", "--format", "human"]) == 0
        out = capsys.readouterr().out
        assert "verdict: bounded up to horizon" in out

    def test_out_flag_writes_file(self, docs, tmp_path, capsys):
        target = tmp_path / "report.json"
        assert main(["validate", docs["identity"], "--out", str(target)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(target.read_text())["command"] == "validate"

    @pytest.mark.parametrize(
        "argv_builder",
        [
            lambda d: RunConfig(command="validate", input_path=d["squeeze"]),
            lambda d: RunConfig(command="mu-table", input_path=d["stanford_b"], n_max=5),
            lambda d: RunConfig(
                command="best-response", input_path=d["stanford_b"], a_indices="0,0"
            ),
            lambda d: RunConfig(command="contractivity", input_path=d["stanford_b"], horizon=4),
            lambda d: RunConfig(command="stanford", alpha=1.02, n=6, target=1e-2),
            lambda d: RunConfig(
                command="counterexample", input_path=d["a_only"], alpha=1.02, n=6, target=1e-2
            ),
            lambda d: RunConfig(command="probe", input_path=d["identity"], horizon=10, cap=5.0),
            lambda d: RunConfig(command="convert", input_path=d["squeeze"]),
        ],
    )
    def test_reports_are_byte_identical(self, docs, argv_builder):
        first = run(argv_builder(docs))
        second = run(argv_builder(docs))
        assert first == second
