import subprocess
import sys

import numpy as np
import pytest

from torusrot import report as rpt
from torusrot.cli import main
from torusrot.config import ConfigError, load_config

TRANSLATION = """\
[map]
family = translation
alpha = 0.25
beta = 0.5
[estimate]
ladder = 1 2 4 8
grid_n = 8
"""

SKEW = """\
[map]
family = skew
axis = vertical
omega = 0
constant = 0.5
cos = -0.5
[estimate]
n_max = 64
grid_n = 64
"""

POINT_WORKED = """\
[map]
family = translation
alpha = 0.5
beta = 0.33333333333333331
[matrix]
L = 1 0 0  0 1 0  -1 0 1
[estimate]
ladder = 1 2 4 8
grid_n = 8
[zaction]
p_max = 96
[certificate]
k_scan = 16
grid_n = 8
trials = 100
"""

IDENTITY = """\
[map]
family = translation
alpha = 0.25
beta = 0.5
[matrix]
L = 1 0 0  0 1 0  0 0 1
[estimate]
ladder = 1 2 4 8
grid_n = 8
[zaction]
p_max = 64
[certificate]
k_scan = 8
grid_n = 8
trials = 100
"""

GATE = POINT_WORKED.replace("alpha = 0.5", "alpha = 1").replace("beta = 0.33333333333333331", "beta = 0")

CERT_FAIL = """\
[map]
family = twowave
p1 = 0.3
p2 = 0.2
q1 = 0.15
q2 = 0.15
[matrix]
L = 1 0 0  0 1 0  -2 0 1
[estimate]
n_max = 256
grid_n = 32
[certificate]
k_scan = 1
"""


def run(tmp_path, text, command="pushforward", name="run"):
    cfg = tmp_path / f"{name}.cfg"
    cfg.write_text(text)
    out = tmp_path / f"{name}.txt"
    code = main([command, "--config", str(cfg), "--out", str(out)])
    return code, (rpt.read(out) if out.exists() else None), out


@pytest.mark.parametrize(
    "text, line",
    [
        ("[map]\nfamily = translation\nalpha = 1\nbeta = 2\ngamma = 3\n", 5),
        ("[map]\nfamily = translation\nalpha = 1\nbeta = 2\n[extras]\n", 5),
        ("[map]\nfamily = translation\nalpha = x\nbeta = 2\n", 3),
        ("[map]\nfamily = twowave\nq1 = 0.2\n", 2),
        ("[map]\nfamily = translation\nalpha = 1\nbeta = 2\n[matrix]\nL = 2 0 0 0 1 0 0 0 1\n", 6),
        ("[map]\nfamily = translation\nalpha = 1\nbeta = 2\n[estimate]\nladder = 4 2\n", 6),
        ("alpha = 1\n", 1),
        ("[map]\nfamily = translation\nalpha = 1\nbeta = 2\n[certificate]\nk_scan = 0\n", 6),
    ],
)
def test_config_errors_are_line_numbered(text, line):
    with pytest.raises(ConfigError) as info:
        load_config(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_malformed_config_exit_code(tmp_path, capsys):
    code, _, _ = run(tmp_path, "[map]\nfamily = translation\nalpha = 0.1\nbeta = 0.2\ncolour = red\n", "estimate")
    assert code == 2
    assert "line 5" in capsys.readouterr().err
    assert main(["estimate", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_estimate_translation(tmp_path):
    code, rep, _ = run(tmp_path, TRANSLATION, "estimate")
    assert code == 0 and rep["status"] == "ok"
    assert rpt.parse_vertices(rep["estimate.inner.vertices"]).tolist() == [[0.25, 0.5]]
    assert rpt.parse_numbers(rep["estimate.hausdorff_trace"]) == [0.0, 0.0, 0.0]


def test_estimate_skew(tmp_path):
    code, rep, _ = run(tmp_path, SKEW, "estimate")
    assert code == 0
    v = rpt.parse_vertices(rep["estimate.inner.vertices"])
    assert len(v) == 2 and np.allclose(v[:, 0], 0)
    # omega = 0 keeps every vertical line invariant, so the ladder hulls agree
    trace = rpt.parse_numbers(rep["estimate.hausdorff_trace"])
    assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))
    assert max(trace) <= 1e-12


def test_pushforward_worked_example(tmp_path):
    code, rep, _ = run(tmp_path, POINT_WORKED)
    assert code == 0
    assert rep["status"] == "pass" and rep["theorem.passed"] == "true"
    assert float(rep["theorem.distance"]) <= 0.1
    assert rep["certificate.status"] == "valid" and rep["empirical.violations"] == "0"
    assert rep["words.U"] == "1 0 -1"
    assert rep["certificate.k0"] == "1" and float(rep["certificate.R_prime"]) == 0.0


def test_pushforward_identity(tmp_path):
    code, rep, _ = run(tmp_path, IDENTITY)
    assert code == 0
    assert (rep["words.U"], rep["words.V"], rep["words.G"]) == ("1 0 0", "0 1 0", "0 0 1")
    assert rep["hypothesis.line"] == "at-infinity"
    assert rep["hypothesis.clearance"] == "inf"


def test_pushforward_hypothesis_gate(tmp_path):
    code, rep, _ = run(tmp_path, GATE)
    assert code == 4
    assert float(rep["hypothesis.clearance"]) == 0.0
    assert rep["status"] == "hypothesis-failed"
    assert not any(k.startswith("theorem.") for k in rep)


def test_pushforward_certificate_failure(tmp_path):
    code, rep, _ = run(tmp_path, CERT_FAIL)
    assert code == 5
    assert rep["certificate.status"] == "failed"
    assert "theorem.passed" not in rep


def test_pushforward_needs_matrix(tmp_path):
    code, _, _ = run(tmp_path, TRANSLATION)
    assert code == 2


def test_report_round_trip(tmp_path):
    r = rpt.Report()
    vals = [0.1, 1 / 3, 2.0, -1e-300, 123456789.123456789, np.pi]
    r["x.floats"] = vals
    r["x.int"] = 7
    r["x.flag"] = True
    r["x.inf"] = float("inf")
    path = tmp_path / "r.txt"
    r.write(path)
    back = rpt.typed(rpt.read(path))
    assert back["x.floats"] == vals
    assert back["x.int"] == 7 and back["x.flag"] is True and back["x.inf"] == float("inf")
    assert isinstance(back["x.floats"][2], float)


def test_pushforward_report_round_trip(tmp_path):
    from torusrot.pushforward import build_pushforward, verify_theorem
    from torusrot.dynamics import Translation
    from torusrot.projective import IntMatrix3

    _, rep, _ = run(tmp_path, POINT_WORKED)
    th = verify_theorem(
        build_pushforward(Translation(0.5, 1 / 3), IntMatrix3.from_flat([1, 0, 0, 0, 1, 0, -1, 0, 1])),
        [1, 2, 4, 8], 8, 96,
    )
    assert float(rep["theorem.distance"]) == th.distance
    np.testing.assert_array_equal(rpt.parse_vertices(rep["theorem.zaction.inner.vertices"]), th.zaction.estimate.inner.vertices)


def test_reports_are_deterministic(tmp_path):
    _, _, a = run(tmp_path, POINT_WORKED, name="a")
    _, _, b = run(tmp_path, POINT_WORKED, name="b")
    assert a.read_bytes() == b.read_bytes()


def test_render_point_report(tmp_path):
    _, _, path = run(tmp_path, POINT_WORKED)
    svg = tmp_path / "fig.svg"
    assert main(["render", str(path), "--out", str(svg)]) == 0
    text = svg.read_text()
    assert text.count('class="marker"') >= 1
    assert text.count('class="infinity-line"') == 1
    assert "L-hat image" in text and "Z^3 estimate" in text
    svg2 = tmp_path / "fig2.svg"
    main(["render", str(path), "--out", str(svg2)])
    assert svg.read_bytes() == svg2.read_bytes()


def test_render_polygons(tmp_path):
    _, _, path = run(tmp_path, SKEW, "estimate")
    svg = tmp_path / "fig.svg"
    assert main(["render", str(path), "--out", str(svg)]) == 0
    text = svg.read_text()
    assert text.startswith("<?xml") and 'width="800"' in text
    assert "<polygon" in text and "rotation set (outer)" in text


def test_render_unreadable(tmp_path):
    assert main(["render", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "x.svg")]) == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("kind = estimate\n")
    assert main(["render", str(bad), "--out", str(tmp_path / "x.svg")]) == 2


def test_selftest(capsys):
    assert main(["selftest", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 5 and "FAIL" not in out


def test_console_entry_point(tmp_path):
    cfg = tmp_path / "t.cfg"
    cfg.write_text(TRANSLATION)
    proc = subprocess.run(
        [sys.executable, "-m", "torusrot.cli", "estimate", "--config", str(cfg)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith(rpt.HEADER)
