import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qmink.cli import PRESETS, run
from qmink.cloud import PointCloud, read_ply

CAP = lambda t: json.dumps({"type": "cap", "center": [1, 0, 0, 0], "t": t})  # noqa: E731
ARC = lambda phi, d: json.dumps({"type": "arc", "axis": [0, 0, 1], "phi": phi, "delta": d})  # noqa: E731


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def test_product_caps(capsys):
    code, out, _ = _run(capsys, "product", "--a", CAP(0.5), "--b", CAP(0.4))
    assert code == 0
    assert out["result"]["exact"] == {"type": "cap", "center": [1.0, 0, 0, 0], "t": pytest.approx(0.9)}
    job = out["job"]
    assert job["n"] == 10_000 and job["seed"] == 42 and job["tol"] == 1e-9 and job["command"] == "product"


def test_product_arcs_and_full(capsys):
    _, out, _ = _run(capsys, "product", "--a", ARC(0, math.pi / 4), "--b", ARC(0.2, math.pi / 4))
    assert out["result"]["exact"]["phi"] == pytest.approx(0.2)
    assert out["result"]["exact"]["delta"] == pytest.approx(math.pi / 2)
    _, out, _ = _run(capsys, "product", "--a", CAP(2.0), "--b", CAP(2.0))
    assert out["result"]["exact"] == {"type": "full"}


def test_product_from_file(capsys, tmp_path):
    f = tmp_path / "job.json"
    f.write_text(json.dumps({"a": json.loads(CAP(0.1)), "b": json.loads(CAP(0.2))}))
    code, out, _ = _run(capsys, "product", "--file", str(f), "--report", str(tmp_path / "r.json"))
    assert code == 0 and out["job"]["file"] == str(f)
    assert json.loads((tmp_path / "r.json").read_text()) == out


def test_usage_and_domain_errors(capsys, tmp_path):
    assert _run(capsys, "product", "--a", "{bad", "--b", CAP(0.1))[0] == 2
    assert _run(capsys, "product", "--a", '{"type": "blob"}', "--b", CAP(0.1))[0] == 2
    assert _run(capsys, "product", "--a", CAP(0.1))[0] == 2
    assert _run(capsys, "product", "--a", CAP(5.0), "--b", CAP(0.1))[0] == 3
    assert _run(capsys, "verify", "NOPE")[0] == 2
    assert _run(capsys, "verify", "CAP_SHARPNESS", "--s", "2", "--t", "2")[0] == 3
    assert _run(capsys, "verify", "CAP_CLOSURE", "--n", "0")[0] == 2
    assert _run(capsys, "product", "--file", str(tmp_path / "missing.json"))[0] == 4
    with pytest.raises(SystemExit) as exc:
        run(["frobnicate"])
    assert exc.value.code == 2


def test_verify_examples(capsys, tmp_path):
    code, out, _ = _run(capsys, "verify", "CAP_CLOSURE", "--s", "0.7", "--t", "0.6", "--n", "10000", "--seed", "1",
                        "--report", str(tmp_path / "rep.json"))
    assert code == 0 and out["report"]["status"] == "PASS"
    assert json.loads((tmp_path / "rep.json").read_text())["report"]["violations"] == 0
    code, out, _ = _run(capsys, "verify", "BCH_CONSISTENCY", "--n", "10000")
    assert code == 0
    code, out, _ = _run(capsys, "verify", "CAP_CLOSURE", "--s", "2.0", "--t", "2.0")
    assert code == 0 and out["report"]["notes"] == ["FULL_SPHERE"]


def test_verify_fail_exit(capsys):
    code, out, _ = _run(capsys, "verify", "FULL_SPHERE_COVERAGE", "--s", "1.6", "--t", "1.6",
                        "--param", "radius=0.001", "--n", "100")
    assert code == 1 and out["report"]["status"] == "FAIL"
    assert out["job"]["params"]["radius"] == 0.001


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_presets(capsys, tmp_path, preset):
    bch = tmp_path / f"{preset}.ply"
    code, out, _ = _run(capsys, "export", "--preset", preset, "--method", "bch", "--out", str(bch))
    assert code == 0 and out["cloud"]["points"] == 10_000
    cloud = read_ply(bch)
    assert cloud.frame == "R3_BCH"
    assert np.linalg.norm(cloud.points, axis=1).max() <= math.pi + 1e-9
    code, out, _ = _run(capsys, "export", "--preset", preset, "--method", "stereo", "--out", str(tmp_path / "s.csv"))
    assert code == 0 and out["cloud"]["dropped"] == 0 and out["cloud"]["points"] == 10_000


def test_example3_tags(capsys, tmp_path):
    _run(capsys, "export", "--preset", "example3", "--out", str(tmp_path / "e.csv"), "--n", "500")
    cloud = PointCloud.from_csv(tmp_path / "e.csv")
    assert cloud.frame == "S3" and list(cloud.tags) == ["t", "u", "v"]
    assert np.all(np.abs(cloud.tags["t"]) <= math.pi / 2)
    assert np.all((cloud.tags["v"] >= 0) & (cloud.tags["v"] <= math.pi / 8))


def test_singleton_export(capsys, tmp_path):
    a = json.dumps({"type": "singleton", "q": [0, 1, 0, 0]})
    b = json.dumps({"type": "singleton", "q": [0, 0, 1, 0]})
    code, _, _ = _run(capsys, "export", "--a", a, "--b", b, "--method", "stereo", "--n", "1",
                      "--out", str(tmp_path / "one.csv"))
    assert code == 0
    lines = (tmp_path / "one.csv").read_text().splitlines()
    assert len(lines) == 2 and lines[0] == "x,y,z"
    assert [float(x) for x in lines[1].split(",")] == [0.0, 0.0, 1.0]


def test_export_and_project_roundtrip(capsys, tmp_path):
    raw = tmp_path / "raw.ply"
    assert _run(capsys, "export", "--preset", "example5", "--n", "300", "--out", str(raw))[0] == 0
    code, out, _ = _run(capsys, "project", "--input", str(raw), "--method", "bch", "--out", str(tmp_path / "p.csv"))
    assert code == 0 and out["cloud"]["frame"] == "R3_BCH"
    assert _run(capsys, "project", "--input", str(tmp_path / "p.csv"), "--out", str(tmp_path / "q.csv"))[0] == 2
    assert _run(capsys, "project", "--input", str(tmp_path / "nope.ply"), "--out", str(tmp_path / "q.csv"))[0] == 4


def test_export_io_error(capsys, tmp_path):
    code, _, err = _run(capsys, "export", "--preset", "example1", "--n", "10", "--out",
                        str(tmp_path / "no" / "dir" / "x.ply"))
    assert code == 4 and "I/O" in err
    assert _run(capsys, "export", "--preset", "example1", "--out", str(tmp_path / "x.txt"))[0] == 2


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "qmink", "verify", "AXISCAP_SHARP_HALFPI", "--xi", str(math.pi / 6)],
                         capture_output=True, text=True, env={"QMINK_THREADS": "2", "PATH": ""})
    assert out.returncode == 0, out.stderr
    assert json.loads(out.stdout)["job"]["threads"] == 2
