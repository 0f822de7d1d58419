import io
import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from qlspin.cli import REPORT_JSON, SCAN_CSV, main
from qlspin.config import default_config_text
from qlspin.sequence import CANONICAL_DETECTION

FAST_CFG = default_config_text().replace("state.n_max = 15", "state.n_max = 6").replace(
    "scan.points = 41", "scan.points = 21").replace("scan.shots_per_point = 200", "scan.shots_per_point = 100")


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    (tmp_path / "good.seq").write_text(CANONICAL_DETECTION)
    (tmp_path / "bad.seq").write_text("shuttle p c\nexchange theta=pi/2\n")
    (tmp_path / "broken.seq").write_text("shuttle p b\nshuttle p q\n")
    (tmp_path / "default.cfg").write_text(default_config_text())
    (tmp_path / "fast.cfg").write_text(FAST_CFG)
    (tmp_path / "bad.cfg").write_text("scan.start_hz = 1\nscan.stop_hz = 2\nwhat = 3\n")
    return tmp_path


def test_validate_ok(files):
    code, out = run("validate", str(files / "good.seq"), "--config", str(files / "default.cfg"))
    assert code == 0 and "ok (8 steps)" in out


def test_validate_violation(files, capsys):
    code, _ = run("validate", str(files / "bad.seq"))
    assert code == 1
    assert "step 1: exchange requires both particles in coupling zone" in capsys.readouterr().err


def test_run_violation_exit_1(files, capsys):
    code, _ = run("run", str(files / "bad.seq"), "--config", str(files / "fast.cfg"))
    assert code == 1
    assert "step 1" in capsys.readouterr().err


def test_syntax_error_positioned(files, capsys):
    code, _ = run("validate", str(files / "broken.seq"))
    assert code == 1
    assert "broken.seq:2:11: unknown zone 'q'" in capsys.readouterr().err


def test_usage_errors(files, capsys):
    assert run()[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("validate", str(files / "missing.seq"))[0] == 2
    assert run("validate", str(files / "good.seq"), "--config", str(files / "missing.cfg"))[0] == 2
    assert run("validate", str(files / "good.seq"), "--config", str(files / "bad.cfg"))[0] == 2
    assert run("scan", "larmor", "--threads", "0")[0] == 2
    assert "unknown key what" in capsys.readouterr().err


def test_run_prints_events(files):
    code, out = run("run", str(files / "good.seq"), "--config", str(files / "fast.cfg"))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# seed 42"
    assert "detect be" in out and "outcome=bright" in out
    assert "p.spin   P(up) = 1" in out


def test_scan_deterministic(files):
    args = ("scan", "larmor", "--config", str(files / "fast.cfg"), "--seed", "42")
    code, a = run(*args)
    assert code == 0
    assert a.splitlines()[0] == "frequency_hz,shots,bright_count,bright_fraction,binomial_stderr"
    assert len(a.splitlines()) == 22
    assert run(*args)[1] == a
    assert run(*args, "--threads", "4")[1] == a
    assert run("scan", "larmor", "--config", str(files / "fast.cfg"), "--seed", "43")[1] != a


def test_scan_writes_file(files):
    out_dir = files / "o"
    code, text = run("scan", "larmor", "--config", str(files / "fast.cfg"), "--out", str(out_dir))
    assert code == 0 and text == ""
    assert (out_dir / SCAN_CSV).read_text().startswith("frequency_hz,")


def test_measure_g_outputs(files):
    cfg = str(files / "fast.cfg")
    code, text = run("measure-g", "--config", cfg, "--out", str(files / "m1"), "--threads", "1")
    assert code == 0
    report = json.loads(text)
    schema = json.loads(resources.files("qlspin").joinpath("data/report.schema.json").read_text())
    jsonschema.validate(report, schema)
    assert report["seed"] == 42
    assert report["g"] == 2 * report["f_L_hz"] / report["f_c_hz"]
    run("measure-g", "--config", cfg, "--out", str(files / "m8"), "--threads", "8")
    for name in (SCAN_CSV, REPORT_JSON):
        assert (files / "m1" / name).read_bytes() == (files / "m8" / name).read_bytes()


def test_selftest():
    code, out = run("selftest")
    assert code == 0
    assert out.count("PASS") == len(out.splitlines())


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qlspin", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "measure-g" in proc.stdout
