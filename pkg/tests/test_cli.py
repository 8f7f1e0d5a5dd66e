import hashlib
import json

import pytest

from cuspcensus.cli import main, strip_timing


def write_gram(path, rows):
    lines = [str(len(rows))] + [" ".join(str(x) for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def diag_rows(*xs):
    return [[x if i == j else 0 for j in range(len(xs))] for i, x in enumerate(xs)]


def hyperbolic_plus(*xs):
    n = len(xs) + 2
    rows = [[0] * n for _ in range(n)]
    rows[0][n - 1] = rows[n - 1][0] = 1
    for k, x in enumerate(xs, start=1):
        rows[k][k] = x
    return rows


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    report = json.loads(out)
    assert report["exit_code"] == code
    return code, report


def no_floats(x):
    if isinstance(x, float):
        return False
    if isinstance(x, dict):
        return all(no_floats(v) for v in x.values())
    if isinstance(x, list):
        return all(no_floats(v) for v in x)
    return True


def test_onecusp_exit_codes(capsys):
    code, rep = run_json(capsys, "onecusp", "--dim", "30")
    assert code == 0 and rep["verdict"] == "Proven"
    code, rep = run_json(capsys, "onecusp", "--dim", "9")
    assert code == 2 and rep["verdict"] == "NotProvenByThisBound"
    code, rep = run_json(capsys, "onecusp", "--dim", "3")
    assert code == 3 and rep["error"]["kind"] == "input"


def test_classnumber(capsys):
    code, rep = run_json(capsys, "classnumber", "-23")
    assert code == 0
    assert rep["result"]["class_number"] == 3 and len(rep["result"]["reduced_forms"]) == 3
    code, _ = run_json(capsys, "classnumber", "5")
    assert code == 3


def test_bad_usage_is_input_error(capsys):
    assert main(["bogus"]) == 3
    assert main(["onecusp"]) == 3
    assert main(["enumerate", "--max-cusps", "1/0"]) == 3
    capsys.readouterr()


def test_cusps_and_census_on_files(tmp_path, capsys):
    gauss = write_gram(tmp_path / "gauss.gram", hyperbolic_plus(1, 1))
    code, rep = run_json(capsys, "cusps", str(gauss))
    assert code == 0 and rep["result"]["principal_cusps"] == 1
    digest = hashlib.sha256(gauss.read_bytes()).hexdigest()
    assert rep["input"] == {"path": str(gauss), "sha256": digest}

    i3 = write_gram(tmp_path / "i3.gram", diag_rows(1, 1, 1))
    code, rep = run_json(capsys, "census", str(i3), "--prime", "3")
    assert code == 0 and rep["verdict"] == "classes=1"


def test_cusps_input_errors(tmp_path, capsys):
    i3 = write_gram(tmp_path / "i3.gram", diag_rows(1, 1, 1))
    code, rep = run_json(capsys, "cusps", str(i3))
    assert code == 3 and rep["error"]["kind"] == "cocompact"
    bad = tmp_path / "bad.gram"
    bad.write_text("2\n1 x\n0 1\n")
    code, rep = run_json(capsys, "cusps", str(bad))
    assert code == 3 and rep["error"]["kind"] == "parse"
    code, rep = run_json(capsys, "census", str(tmp_path / "missing.gram"))
    assert code == 3


def test_budget_exhaustion_reports_partial(tmp_path, capsys):
    lat = write_gram(tmp_path / "l23.gram", diag_rows(1, 1, 23))
    code, rep = run_json(capsys, "census", str(lat), "--prime", "3", "--budget", "2")
    assert code == 4 and rep["error"]["kind"] == "resource"
    assert rep["result"]["partial_census"]["class_count"] == 2
    code, rep = run_json(capsys, "cusps", str(write_gram(tmp_path / "h23.gram", hyperbolic_plus(1, 1, 23))),
                         "--prime", "3", "--budget", "2")
    assert code == 4 and "partial_census" in rep["result"]


def test_small_height_escalates(tmp_path, capsys):
    # no zero of height 1 exists; the search widens tenfold until one is found
    f = write_gram(tmp_path / "big.gram", diag_rows(1, 1, -1000001))
    code, rep = run_json(capsys, "cusps", str(f), "--height", "1")
    assert code == 0 and rep["result"]["principal_cusps"] >= 1


def test_reports_are_deterministic_and_float_free(capsys):
    for argv in (["onecusp", "--dim", "34"], ["delta0"], ["enumerate", "--max-cusps", "1"]):
        _, first = run_json(capsys, *argv)
        _, second = run_json(capsys, *argv)
        assert strip_timing(first) == strip_timing(second)
        assert no_floats(first), argv
        assert isinstance(first["timing"]["elapsed_ns"], int)


def test_delta0_verdict(capsys):
    code, rep = run_json(capsys, "delta0")
    assert code == 0 and rep["verdict"] in ("MeetsPaperValue", "BelowPaperValue")
    assert rep["result"]["factors"]


def test_text_rendering(capsys):
    code, out = run(capsys, "onecusp", "--dim", "30", "--text")
    assert code == 0
    assert "verdict: Proven" in out and "exit code 0" in out


def test_out_dir_writes_files(tmp_path, capsys):
    out = tmp_path / "reports"
    assert main(["onecusp", "--dim", "32", "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    files = sorted(p.name for p in out.iterdir())
    assert files == ["onecusp-n32.json"]
    assert json.loads((out / "onecusp-n32.json").read_text())["verdict"] == "Proven"


@pytest.mark.parametrize("jobs", ["1", "2"])
def test_batch_json_lines(tmp_path, capsys, jobs):
    write_gram(tmp_path / "a.gram", hyperbolic_plus(1, 1))
    write_gram(tmp_path / "b.gram", diag_rows(1, 1, 1))
    (tmp_path / "list.txt").write_text("a.gram\n# comment\nb.gram\n")
    code, out = run(capsys, "cusps", "--batch", str(tmp_path / "list.txt"), "--jobs", jobs)
    lines = out.splitlines()
    assert len(lines) == 2
    reports = [json.loads(line) for line in lines]
    assert [r["exit_code"] for r in reports] == [0, 3]
    assert code == 3  # worst over the batch


def test_batch_out_dir(tmp_path, capsys):
    write_gram(tmp_path / "a.gram", diag_rows(1, 1, 1))
    write_gram(tmp_path / "b.gram", diag_rows(1, 1, 1, 1))
    (tmp_path / "list.txt").write_text("a.gram\nb.gram\n")
    out = tmp_path / "o"
    assert main(["census", "--batch", str(tmp_path / "list.txt"), "--out", str(out), "--prime", "3"]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["a.json", "b.json"]
    capsys.readouterr()


def test_file_and_batch_are_exclusive(tmp_path, capsys):
    assert main(["census"]) == 3
    capsys.readouterr()


def test_precision_env(monkeypatch, capsys):
    monkeypatch.setenv("CUSPCENSUS_PRECISION_BITS", "256")
    code, rep = run_json(capsys, "onecusp", "--dim", "30")
    assert code == 0
    monkeypatch.setenv("CUSPCENSUS_PRECISION_BITS", "8")
    code, _ = run_json(capsys, "onecusp", "--dim", "30")
    assert code == 3
    monkeypatch.setenv("CUSPCENSUS_PRECISION_BITS", "many")
    code, _ = run_json(capsys, "onecusp", "--dim", "30")
    assert code == 3
