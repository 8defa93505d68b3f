import json
import subprocess
import sys

import pytest

from webhol.cli import main
from webhol.web import DiscreteWeb, baez_sawin_web

BS = "1100,0011,1010,0101"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def result(stdout):
    return json.loads(stdout)["result"]


def test_typeset(capsys):
    code, out, _ = run(capsys, "typeset", "--typeset", BS)
    assert code == 0
    r = result(out)
    assert r["rich"] and r["deficit"] == 0 and r["rank_r"] == 3


def test_typeset_from_file(tmp_path, capsys):
    f = tmp_path / "v.json"
    f.write_text(json.dumps([[1, 1, 0], [0, 0, 1]]))
    code, out, _ = run(capsys, "typeset", "--typeset", str(f))
    assert code == 0
    assert result(out)["deficit"] == 1


def test_closure(capsys):
    code, out, _ = run(capsys, "closure", "--group", "cyclic:3", "--typeset", BS)
    assert code == 0
    r = result(out)
    assert r["count"] == 27 and r["full"] is False
    envelope = json.loads(out)
    assert envelope["version"] and envelope["caps"]["states"] > 0


def test_closure_inline_json_group(capsys):
    code, out, _ = run(capsys, "closure", "--group", '{"kind": "cyclic", "m": 2}', "--typeset", BS)
    assert code == 0 and result(out)["count"] == 8


def test_output_is_deterministic(capsys):
    a = run(capsys, "closure", "--group", "cyclic:3", "--typeset", BS)[1]
    b = run(capsys, "closure", "--group", "cyclic:3", "--typeset", BS)[1]
    assert a == b


def test_qbound(capsys):
    code, out, _ = run(capsys, "qbound", "--group", "alternating:5", "--typeset", "10,01,11")
    r = result(out)
    assert code == 0 and r["q_min"] == 1 and r["bound"] == 1 and r["ok"]


def test_qbound_not_perfect_exits_1(capsys):
    code, out, _ = run(capsys, "qbound", "--group", "symmetric:3", "--typeset", "10,01")
    assert code == 1
    assert result(out)["kind"] == "NotPerfect"


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--group", "alternating:5", "--typeset", "110,011,101", "--target", "1,2,3")
    assert code == 0
    r = result(out)
    assert r["target"] == [1, 2, 3] and r["length"] == len(r["word"])
    code, out, _ = run(capsys, "decompose", "--group", "alternating:5", "--typeset", "110,011,101", "--samples", "20")
    assert code == 0 and result(out)["all_evaluate"]


def test_decompose_not_rich(capsys):
    code, _, _ = run(capsys, "decompose", "--group", "alternating:5", "--typeset", "110,001", "--target", "1,2,3")
    assert code == 1


def test_lattice(capsys):
    code, out, _ = run(capsys, "lattice", "--typeset", BS, "--modulus", "3", "--modulus", "2", "--profile", "0,1")
    r = result(out)
    assert code == 0
    assert r["mod_images"] == {"3": 27, "2": 8} and r["codimension"] == 1


def test_web(tmp_path, capsys):
    f = tmp_path / "web.json"
    f.write_text(json.dumps(baez_sawin_web(6).to_json()))
    code, out, _ = run(capsys, "web", "--web", str(f), "--group", "cyclic:3", "--tau", "7")
    r = result(out)
    assert code == 0
    assert r["achievable_order"] == 27 and r["truncation"]["status"] == "ok"


def test_invalid_web_exits_1(tmp_path, capsys):
    w = DiscreteWeb((("a", "b", "c", "d"), ("a", "b", "c", "d")))
    f = tmp_path / "web.json"
    f.write_text(json.dumps(w.to_json()))
    code, out, _ = run(capsys, "web", "--web", str(f))
    assert code == 1 and not result(out)["valid"]


def test_predict(capsys):
    code, out, _ = run(capsys, "predict", "--group", "cyclic:3", "--typeset", BS)
    assert code == 0 and result(out)["order"] == 27


def test_text_format(capsys):
    code, out, _ = run(capsys, "typeset", "--typeset", BS, "--format", "text")
    assert code == 0 and "rich" in out and not out.startswith("{")


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["closure", "--typeset", BS],
        ["closure", "--group", "dihedral:4", "--typeset", BS],
        ["closure", "--group", "{not json", "--typeset", BS],
        ["typeset", "--typeset", "10,1"],
        ["closure", "--group", "alternating:5", "--typeset", "110000,011000", "--cap-states", "1000"],
        ["web", "--web", "/nonexistent/web.json"],
        ["typeset", "--typeset", BS, "--threads", "0"],
        ["typeset", "--format", "xml"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "webhol", "typeset", "--typeset", "10,01"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["rich"]
