import json
import subprocess
import sys

import pytest

from bimetric3.cli import main

T1_DOC = {
    "g": [["1", "0", "0"], ["0", "-1", "0"], ["0", "0", "-1"]],
    "g_check": [["2", "0", "0"], ["0", "1", "0"], ["0", "0", "3"]],
}


def write_doc(path, doc):
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestClassify:
    def test_exact_t1(self, tmp_path, capsys):
        p = write_doc(tmp_path / "pair.json", T1_DOC)
        code, out, _ = run_cli(capsys, "classify", "--input", p)
        assert code == 0
        doc = json.loads(out)
        assert doc["class"] == "T1_THREE_REAL_DISTINCT"
        assert doc["invariants"]["D3"] == "900"
        assert doc["mode"] == "EXACT"

    def test_equal_metrics_t7(self, tmp_path, capsys):
        doc = {"g": T1_DOC["g"], "g_check": T1_DOC["g"]}
        p = write_doc(tmp_path / "pair.json", doc)
        code, out, _ = run_cli(capsys, "classify", "--input", p)
        assert code == 0
        parsed = json.loads(out)
        assert parsed["class"] == "T7_TRIPLE_SCALAR"
        assert parsed["invariants"]["sigma2"] == 0

    def test_wrong_signature_exit_1(self, tmp_path, capsys):
        doc = {
            "g": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "-1"]],
            "g_check": T1_DOC["g_check"],
        }
        p = write_doc(tmp_path / "pair.json", doc)
        code, _, err = run_cli(capsys, "classify", "--input", p)
        assert code == 1
        assert "signature (2,1,0), expected (1,2,0)" in err

    def test_float_mode_inferred(self, tmp_path, capsys):
        doc = {
            "g": [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]],
            "g_check": [[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 3.0]],
        }
        p = write_doc(tmp_path / "pair.json", doc)
        code, out, _ = run_cli(capsys, "classify", "--input", p)
        assert code == 0
        parsed = json.loads(out)
        assert parsed["mode"] == "FLOAT"
        assert parsed["class"] == "T1_THREE_REAL_DISTINCT"

    def test_mode_override_exact(self, tmp_path, capsys):
        doc = {
            "g": [[1, 0, 0], [0, -1, 0], [0, 0, -1]],
            "g_check": [[2, 0, 0], [0, 1, 0], [0, 0, 3]],
        }
        p = write_doc(tmp_path / "pair.json", doc)
        code, out, _ = run_cli(capsys, "classify", "--input", p, "--mode", "exact")
        assert code == 0
        parsed = json.loads(out)
        assert parsed["mode"] == "EXACT"
        assert any("converted exactly" in w for w in parsed["warnings"])

    def test_mixed_modes_rejected(self, tmp_path, capsys):
        doc = {
            "g": [["1", 0, "0"], [0, "-1", "0"], ["0", "0", "-1"]],
            "g_check": T1_DOC["g_check"],
        }
        p = write_doc(tmp_path / "pair.json", doc)
        code, _, err = run_cli(capsys, "classify", "--input", p)
        assert code == 1
        assert "mixes" in err

    def test_stable_output_bytes(self, tmp_path, capsys):
        p = write_doc(tmp_path / "pair.json", T1_DOC)
        _, out1, _ = run_cli(capsys, "classify", "--input", p)
        _, out2, _ = run_cli(capsys, "classify", "--input", p)
        assert out1 == out2

    def test_text_format(self, tmp_path, capsys):
        p = write_doc(tmp_path / "pair.json", T1_DOC)
        code, out, _ = run_cli(capsys, "classify", "--input", p, "--format", "text")
        assert code == 0
        assert "class:     T1_THREE_REAL_DISTINCT" in out


class TestCanonicalize:
    def test_canonical_input_identity_transform(self, tmp_path, capsys):
        p = write_doc(tmp_path / "pair.json", T1_DOC)
        code, out, _ = run_cli(capsys, "canonicalize", "--input", p)
        assert code == 0
        doc = json.loads(out)
        assert doc["residual"] <= 1e-12
        assert doc["transform"] == [[1.0, -0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        assert doc["canonical"]["params"]["a"] == 2.0

    def test_scrambled_t10(self, tmp_path, capsys):
        code, out, _ = run_cli(
            capsys, "generate", "--class", "T10", "--params", "a=1", "--seed", "5",
            "--output", str(tmp_path / "pair.json"),
        )
        assert code == 0
        code, out, _ = run_cli(
            capsys, "canonicalize", "--input", str(tmp_path / "pair.json")
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["class"] == "T10_TRIPLE_R2"
        assert doc["residual"] < 1e-9
        assert doc["canonical"]["params"] == {"a": "1"}

    def test_tolerance_failure_exit_2(self, tmp_path, capsys):
        run_cli(
            capsys, "generate", "--class", "T1", "--seed", "9", "--bound", "9",
            "--output", str(tmp_path / "pair.json"),
        )
        code, _, err = run_cli(
            capsys, "canonicalize", "--input", str(tmp_path / "pair.json"),
            "--tol", "1e-15",
        )
        assert code == 2
        assert "residual" in err


class TestGenerate:
    def test_round_trip(self, tmp_path, capsys):
        out_path = tmp_path / "pair.json"
        code, _, _ = run_cli(
            capsys, "generate", "--class", "T1", "--params", "a=2,b=1,c=3",
            "--seed", "7", "--output", str(out_path),
        )
        assert code == 0
        code, out, _ = run_cli(capsys, "classify", "--input", str(out_path))
        assert code == 0
        assert json.loads(out)["class"] == "T1_THREE_REAL_DISTINCT"
        truth = json.loads((tmp_path / "pair.json.truth.json").read_text())
        assert truth["params"] == {"a": "2", "b": "1", "c": "3"}

    def test_side_condition_exit_1(self, tmp_path, capsys):
        code, _, err = run_cli(
            capsys, "generate", "--class", "T1", "--params", "a=2,b=1,c=1",
            "--output", str(tmp_path / "pair.json"),
        )
        assert code == 1
        assert "requires b != c" in err

    def test_scalar_class_small_bound(self, tmp_path, capsys):
        out_path = tmp_path / "pair.json"
        code, _, _ = run_cli(
            capsys, "generate", "--class", "T7", "--params", "a=1", "--bound", "1",
            "--seed", "3", "--output", str(out_path),
        )
        assert code == 0
        doc = json.loads(out_path.read_text())
        code, out, _ = run_cli(capsys, "classify", "--input", str(out_path))
        assert json.loads(out)["class"] == "T7_TRIPLE_SCALAR"

    def test_numeric_class_alias(self, tmp_path, capsys):
        code, _, _ = run_cli(
            capsys, "generate", "--class", "10", "--seed", "1",
            "--output", str(tmp_path / "pair.json"),
        )
        assert code == 0


class TestVerify:
    def _generate_and_canonicalize(self, tmp_path, capsys, cid="T9", seed="11"):
        pair = tmp_path / "pair.json"
        result = tmp_path / "result.json"
        run_cli(capsys, "generate", "--class", cid, "--seed", seed,
                "--output", str(pair))
        run_cli(capsys, "canonicalize", "--input", str(pair),
                "--output", str(result))
        return pair, result

    def test_round_trip_passes(self, tmp_path, capsys):
        pair, result = self._generate_and_canonicalize(tmp_path, capsys)
        code, out, _ = run_cli(
            capsys, "verify", "--input", str(pair), "--result", str(result)
        )
        assert code == 0
        assert "check residual: PASS" in out

    def test_tampered_transform_fails(self, tmp_path, capsys):
        pair, result = self._generate_and_canonicalize(tmp_path, capsys)
        doc = json.loads(result.read_text())
        doc["transform"][0][0] += 0.1
        result.write_text(json.dumps(doc, indent=2) + "\n")
        code, out, _ = run_cli(
            capsys, "verify", "--input", str(pair), "--result", str(result)
        )
        assert code == 2
        assert "check residual: FAIL" in out

    def test_tampered_class_fails(self, tmp_path, capsys):
        pair, result = self._generate_and_canonicalize(tmp_path, capsys)
        doc = json.loads(result.read_text())
        doc["class"] = "T8_TRIPLE_R1_SPLUS"
        result.write_text(json.dumps(doc, indent=2) + "\n")
        code, out, _ = run_cli(
            capsys, "verify", "--input", str(pair), "--result", str(result)
        )
        assert code == 2
        assert "check class: FAIL" in out


class TestBatchMode:
    def test_directory_processing(self, tmp_path, capsys):
        indir = tmp_path / "in"
        outdir = tmp_path / "out"
        indir.mkdir()
        for i, cid in enumerate(["T1", "T7", "T10"]):
            run_cli(capsys, "generate", "--class", cid, "--seed", str(i),
                    "--output", str(indir / f"{cid}.json"))
        for extra in indir.glob("*.truth.json"):
            extra.unlink()
        code, out, _ = run_cli(
            capsys, "classify", "--input", str(indir), "--output", str(outdir),
            "--jobs", "2",
        )
        assert code == 0
        results = sorted(p.name for p in outdir.iterdir())
        assert results == ["T1.result.json", "T10.result.json", "T7.result.json"]
        t10 = json.loads((outdir / "T10.result.json").read_text())
        assert t10["class"] == "T10_TRIPLE_R2"


class TestConsoleScript:
    def test_module_entry_point(self, tmp_path):
        doc_path = tmp_path / "pair.json"
        doc_path.write_text(json.dumps(T1_DOC))
        proc = subprocess.run(
            [sys.executable, "-m", "bimetric3.cli", "classify", "--input", str(doc_path)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["class"] == "T1_THREE_REAL_DISTINCT"
