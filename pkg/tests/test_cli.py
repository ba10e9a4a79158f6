import json
import shutil
import subprocess
import sys

import pytest

from minlaplace.cli import main
from minlaplace.documents import dump_connection, load_connection, parse_connection, DocumentError

from conftest import CORPUS, rank_one

SMALL = ["rank1", "rank1_gaussian", "rank2_two_points", "empty"]


def write(tmp_path, conn, name="c.conn.json"):
    path = tmp_path / name
    path.write_text(dump_connection(conn), encoding="utf-8")
    return path


def small_corpus(tmp_path):
    for name in SMALL:
        for suffix in (".conn.json", ".report.json"):
            shutil.copy(CORPUS / f"{name}{suffix}", tmp_path / f"{name}{suffix}")
    return tmp_path


# -- validate ------------------------------------------------------------------


def test_validate_pass(tmp_path, capsys):
    assert main(["validate", str(write(tmp_path, rank_one()))]) == 0
    assert capsys.readouterr().out == "resonance-free: pass\nadmissible: pass\n"


def test_validate_fail_names_clause(tmp_path, capsys):
    path = write(tmp_path, rank_one(mu=1, beta=0))
    assert main(["validate", str(path)]) == 1
    out = capsys.readouterr().out
    assert "resonance-free: fail" in out and "Re(mu) in Z" in out and "p1" in out


def test_validate_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.conn.json"
    path.write_text('{"rank": 1, "regular_singularities": [', encoding="utf-8")
    assert main(["validate", str(path)]) == 2
    assert "bad.conn.json:1:" in capsys.readouterr().err


def test_validate_out_file(tmp_path):
    out = tmp_path / "v.txt"
    assert main(["validate", str(write(tmp_path, rank_one())), "--out", str(out)]) == 0
    assert out.read_text().startswith("resonance-free: pass")


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["transform"])
    assert exc.value.code == 2


# -- documents ---------------------------------------------------------------------


def test_document_round_trip():
    for path in sorted(CORPUS.glob("*.conn.json")):
        conn = load_connection(path)
        assert parse_connection(json.loads(dump_connection(conn))) == conn


@pytest.mark.parametrize(
    "mutate, location",
    [
        (lambda d: d.pop("rank"), "rank"),
        (lambda d: d["regular_singularities"][0]["eigen"][0].update(weight="0.25"), "eigen[0].weight"),
        (lambda d: d["regular_singularities"][0].update(residue_matrix=[["1/2", "0"]]), "residue_matrix[0]"),
        (lambda d: d["irregular"].update(C_diagonal=["1/2"]), "irregular"),
    ],
)
def test_document_errors_carry_location(mutate, location):
    doc = json.loads((CORPUS / "rank1.conn.json").read_text())
    mutate(doc)
    with pytest.raises(DocumentError) as exc:
        parse_connection(doc)
    assert location in str(exc.value)


# -- transform ---------------------------------------------------------------------


def test_transform_full_closed_form(tmp_path, capsys):
    assert main(["transform", str(CORPUS / "rank1.conn.json"), "--full"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["transform"]["closed_form"] == "X = 1/3 + 1/2/(xi-2)"
    assert report["verdict"] == "pass"


def test_transform_predict_only(capsys):
    assert main(["transform", str(CORPUS / "rank1.conn.json"), "--predict-only"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert "transform" not in report and "prediction" in report


def test_transform_involution_section(capsys):
    assert main(["transform", str(CORPUS / "rank2_two_points.conn.json"), "--involution"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert "involution" in report


def test_transform_directory_in_order(tmp_path, capsys):
    small_corpus(tmp_path)
    assert main(["transform", str(tmp_path)]) == 0
    decoder = json.JSONDecoder()
    text, names, pos = capsys.readouterr().out, [], 0
    while pos < len(text):
        obj, end = decoder.raw_decode(text, pos)
        names.append(obj["name"])
        pos = end + 1
    assert names == sorted(SMALL)


def test_transform_invalid_input_exit_one(tmp_path, capsys):
    assert main(["transform", str(write(tmp_path, rank_one(mu=1, beta=0)))]) == 1
    assert json.loads(capsys.readouterr().out)["verdict"] == "invalid input"


def test_timing_is_opt_in(capsys):
    main(["transform", str(CORPUS / "rank1.conn.json")])
    assert "timing_seconds" not in capsys.readouterr().out
    main(["transform", str(CORPUS / "rank1.conn.json"), "--timing"])
    assert "timing_seconds" in capsys.readouterr().out


def test_transform_output_is_deterministic(capsys):
    main(["transform", str(CORPUS / "rank2_two_points.conn.json"), "--full", "--involution"])
    first = capsys.readouterr().out
    main(["transform", str(CORPUS / "rank2_two_points.conn.json"), "--full", "--involution"])
    assert capsys.readouterr().out == first


# -- corpus-check ------------------------------------------------------------------


def test_corpus_check_untouched(tmp_path, capsys):
    assert main(["corpus-check", str(small_corpus(tmp_path))]) == 0
    assert capsys.readouterr().out.count("identical") == len(SMALL)


def test_corpus_check_detects_perturbed_weight(tmp_path, capsys):
    small_corpus(tmp_path)
    path = tmp_path / "rank1.conn.json"
    doc = json.loads(path.read_text())
    doc["irregular"]["weights"] = ["1/5"]
    path.write_text(json.dumps(doc, indent=2))
    assert main(["corpus-check", str(tmp_path)]) == 1
    out = capsys.readouterr().out
    assert "rank1.conn.json: differs at line" in out
    assert "rank1_gaussian.conn.json: identical" in out
    # pdeg moves from 1/3 + 1/4 to 1/5 + 1/4
    assert "check changed: pdeg preservation: predicted 7/12, input 7/12: pass" in out
    assert "now: pdeg preservation: predicted 9/20, input 9/20: pass" in out


def test_corpus_check_missing_golden(tmp_path, capsys):
    small_corpus(tmp_path)
    (tmp_path / "empty.report.json").unlink()
    assert main(["corpus-check", str(tmp_path)]) == 1
    assert "missing golden" in capsys.readouterr().out


def test_corpus_check_update_then_identical(tmp_path, capsys):
    small_corpus(tmp_path)
    (tmp_path / "rank1.report.json").write_text("{}\n")
    assert main(["corpus-check", str(tmp_path), "--update"]) == 0
    capsys.readouterr()
    assert main(["corpus-check", str(tmp_path)]) == 0


def test_corpus_check_empty_dir(tmp_path, capsys):
    assert main(["corpus-check", str(tmp_path)]) == 0
    assert "warning" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "minlaplace", "validate", str(CORPUS / "rank1.conn.json")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "resonance-free: pass" in proc.stdout
