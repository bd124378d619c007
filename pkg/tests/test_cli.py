import json
import subprocess
import sys
from pathlib import Path

import pytest

from depchar.cli import SessionConfig, UsageError, main, render_human

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "tests" / "golden"
sys.path.insert(0, str(GOLDEN))
from cases import CASES  # noqa: E402

I = "tests/golden/inputs/"


@pytest.fixture(autouse=True)
def at_root(monkeypatch):
    monkeypatch.chdir(ROOT)
    monkeypatch.delenv("DEPCHAR_WORKERS", raising=False)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys):
    code, out, _ = run(capsys, CASES[name] + ["--format", "records"])
    expected = (GOLDEN / "expected" / f"{name}.jsonl").read_text()
    assert f"# exit {code}\n" + out == expected


def test_exit_codes(capsys):
    assert run(capsys, ["implies", I + "sym.dep", I + "cyc.dep"])[0] == 1
    assert run(capsys, ["implies", I + "fd.dep", I + "fd_target.dep"])[0] == 0
    assert run(capsys, ["check-sat", I + "tri.facts", I + "trans.dep"])[0] == 0
    assert run(capsys, ["check-sat", I + "path.facts", I + "cyc.dep"])[0] == 1
    assert run(capsys, ["check-sat", I + "path.facts", I + "sym.dep"])[0] == 1
    assert run(capsys, ["check-sat", I + "cycle2.facts", I + "sym.dep"])[0] == 0


def test_human_output_renders_records(capsys):
    code, out, _ = run(capsys, ["implies", I + "sym.dep", I + "cyc.dep"])
    assert out.startswith("[implies]\n")
    assert "implied: false" in out
    _, rec, _ = run(capsys, ["implies", I + "sym.dep", I + "cyc.dep", "--format", "records"])
    assert render_human([json.loads(rec)]) == out


@pytest.mark.parametrize("argv", [
    ["implies", I + "missing.dep", I + "cyc.dep"],
    ["implies", I + "nonfull.dep", I + "cyc.dep"],
    ["implies", I + "sym.dep", I + "cyc.dep", "--method", "brute"],
    ["verify-properties", "--n", "2", "--bound", "2"],
    ["verify-properties", "--deps", I + "trans.dep", "--extensional", I + "models", "--n", "2", "--bound", "2"],
    ["enumerate", "edds", "--schema", "R/2", "--n", "3", "--m", "2"],
    ["enumerate", "edds", "--schema", "P/1", "--n", "-1", "--m", "0"],
    ["diagram", I + "cycle2.facts", "--as-edd", "--as-dd"],
])
def test_errors_exit_2(argv, capsys):
    code, out, err = run(capsys, argv)
    assert code == 2
    assert err.strip()


def test_bad_syntax_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.dep"
    bad.write_text("E(x,y) -> \n")
    code, _, err = run(capsys, ["implies", str(bad), I + "cyc.dep"])
    assert code == 2 and err.strip()


def test_session_config_validation():
    with pytest.raises(UsageError):
        SessionConfig("implies", n=-1)
    with pytest.raises(UsageError):
        SessionConfig("implies", output_format="xml")
    with pytest.raises(UsageError):
        SessionConfig("implies", workers=0)
    with pytest.raises(UsageError):
        SessionConfig("implies", inputs=("no/such/file.dep",))
    assert SessionConfig("implies", inputs=(I + "sym.dep",), n=0).n == 0


def test_workers_keep_input_order(tmp_path, capsys, monkeypatch):
    targets = tmp_path / "targets.dep"
    targets.write_text("\n".join([
        "E(x,y), E(y,z) -> E(z,x).",
        "E(x,y) -> E(y,x).",
        "E(x,y), E(y,z), E(z,w) -> E(w,x).",
        "E(x,y) -> x = y.",
        "E(x,y), E(y,x) -> E(x,x).",
    ]) + "\n")
    argv = ["implies", I + "sym.dep", str(targets), "--format", "records"]
    serial = run(capsys, argv)
    monkeypatch.setenv("DEPCHAR_WORKERS", "4")
    parallel = run(capsys, argv)
    assert serial == parallel
    assert [json.loads(line)["target"] for line in serial[1].splitlines()][1] == "E(x,y) -> E(y,x)."


def test_bad_worker_env(capsys, monkeypatch):
    monkeypatch.setenv("DEPCHAR_WORKERS", "many")
    assert run(capsys, ["implies", I + "sym.dep", I + "cyc.dep"])[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "depchar", "implies", I + "fd.dep", I + "fd_target.dep",
                           "--format", "records"], cwd=ROOT, capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["implied"] is True
