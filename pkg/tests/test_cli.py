import csv
import json
import os

import pytest

from barypade.cli import main

from conftest import CONFIGS


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def identity_inputs(tmp_path):
    return (
        write_json(tmp_path / "c.json", [{"re": "0", "im": "0"}, {"re": "1", "im": "0"}]),
        write_json(tmp_path / "x.json", [{"re": "1", "im": "0"}, {"re": "-1", "im": "0"}]),
    )


@pytest.fixture(scope="module")
def single_block_cert(tmp_path_factory):
    d = tmp_path_factory.mktemp("single")
    out, svg, grid = d / "cert.json", d / "map.svg", d / "grid.csv"
    code = main(["adversary", "--config", os.path.join(CONFIGS, "single_block.json"), "--out", str(out),
                 "--svg", str(svg), "--grid", str(grid), "--grid-points", "4"])
    return code, out, svg, grid


class TestApproximate:
    def test_identity(self, tmp_path, identity_inputs):
        out = tmp_path / "r.json"
        assert main(["approximate", "--coeffs", identity_inputs[0], "--nodes", identity_inputs[1],
                     "--degree", "1", "--prec", "256", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert [w["re"] for w in doc["weights"]] == ["1.0", "-1.0"]
        assert doc["contact"]["pass"] and doc["poles"] == []

    def test_degree_mismatch(self, tmp_path, identity_inputs, capsys):
        assert main(["approximate", "--coeffs", identity_inputs[0], "--nodes", identity_inputs[1],
                     "--degree", "2", "--out", str(tmp_path / "r.json")]) == 1
        assert "degree" in capsys.readouterr().err

    def test_zero_series_is_degenerate(self, tmp_path, identity_inputs):
        zeros = write_json(tmp_path / "z.json", ["0", "0"])
        assert main(["approximate", "--coeffs", zeros, "--nodes", identity_inputs[1],
                     "--degree", "1", "--out", str(tmp_path / "r.json")]) == 2

    def test_missing_file(self, tmp_path, identity_inputs):
        assert main(["approximate", "--coeffs", str(tmp_path / "nope.json"), "--nodes", identity_inputs[1],
                     "--degree", "1", "--out", str(tmp_path / "r.json")]) == 1


class TestAdversary:
    def test_single_block(self, single_block_cert):
        code, out, svg, grid = single_block_cert
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["all_pass"] and doc["format"] == "barypade-certificate"
        assert float(doc["levels"][0]["pi"]["re"]) == pytest.approx(2, abs=1e-100)

    def test_svg(self, single_block_cert):
        text = single_block_cert[2].read_text()
        assert text.startswith("<svg") and "level 0 (n = 1)" in text
        assert text.count("<circle") >= 3

    def test_grid(self, single_block_cert):
        with open(single_block_cert[3]) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["k", "re", "im", "abs_r", "abs_f"]
        assert len(rows) == 1 + 16

    def test_degree_gap_config(self, tmp_path):
        with open(os.path.join(CONFIGS, "single_block.json")) as fh:
            doc = json.load(fh)
        doc["levels"].append({"n": 2, "nodes": {"roots_of_unity": {"radius": "1", "rotation": "0.25"}},
                              "alpha": {"re": "0", "im": "3"}})
        cfg = write_json(tmp_path / "bad.json", doc)
        assert main(["adversary", "--config", cfg, "--out", str(tmp_path / "c.json")]) == 1

    def test_exhausted_still_writes(self, tmp_path):
        with open(os.path.join(CONFIGS, "single_block.json")) as fh:
            doc = json.load(fh)
        doc["levels"][0]["target"] = {"re": "2.75", "im": "0"}
        doc["search"] = {"max_retries": 1}
        out = tmp_path / "c.json"
        assert main(["adversary", "--config", write_json(tmp_path / "cfg.json", doc), "--out", str(out)]) == 3
        assert json.loads(out.read_text())["all_pass"] is False


class TestVerify:
    def test_untouched(self, single_block_cert, capsys):
        assert main(["verify", "--cert", str(single_block_cert[1])]) == 0
        assert json.loads(capsys.readouterr().out)["all_pass"] is True

    def test_edited_pole(self, single_block_cert, tmp_path, capsys):
        doc = json.loads(single_block_cert[1].read_text())
        doc["levels"][0]["pi"]["re"] = "3.5"
        path = write_json(tmp_path / "edited.json", doc)
        assert main(["verify", "--cert", path]) == 4
        report = json.loads(capsys.readouterr().out)
        assert report["levels"][0]["item_ii"]["pass"] is False

    def test_edited_coefficient(self, single_block_cert, tmp_path, capsys):
        doc = json.loads(single_block_cert[1].read_text())
        doc["coefficients"][0]["re"] = "0.001"
        assert main(["verify", "--cert", write_json(tmp_path / "edited.json", doc)]) == 4
        assert json.loads(capsys.readouterr().out)["item_i"]["pass"] is False

    def test_corrupted_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["verify", "--cert", str(bad)]) == 1

    def test_stored_verdicts_are_not_trusted(self, single_block_cert, tmp_path):
        doc = json.loads(single_block_cert[1].read_text())
        doc["coefficients"][2]["re"] = "0.75"
        doc["all_pass"] = True
        assert main(["verify", "--cert", write_json(tmp_path / "lie.json", doc)]) == 4
