import io
import json
import subprocess
import sys

import pytest

from qreinhardt import __version__
from qreinhardt.cli import run
from qreinhardt.verify import phi_k, phi_k_inverse


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    w12 = {"n": 2, "r": 1, "rows": [[1], [2]]}
    f = {}
    f["w12"] = write("w12.json", w12)
    f["w13"] = write("w13.json", {"n": 2, "r": 1, "rows": [[1], [3]]})
    f["bad"] = write("bad.json", {"n": 2, "r": 1, "rows": [[1], [-1]]})
    f["phi2"] = write("phi2.json", phi_k(2).to_json())
    f["phi2inv"] = write("phi2inv.json", phi_k_inverse(2).to_json())
    f["ball"] = write("ball.json", {"type": "ball", "n": 2})
    f["egg"] = write("egg.json", {"type": "egg", "n": 2, "p": [1, 3]})
    f["push"] = write(
        "push.json",
        {"type": "pushforward", "base": {"type": "ball", "n": 2}, "map": phi_k(2).to_json(), "weights": w12},
    )
    f["auto"] = write(
        "auto.json",
        {
            "n": 2,
            "components": [
                [{"exp": [1, 0], "re": "0", "im": "1"}],
                [{"exp": [0, 1], "re": "-1", "im": "0"}],
            ],
        },
    )
    f["garbage"] = write("garbage.json", "not a mapping")
    (tmp_path / "broken.json").write_text("{")
    f["broken"] = str(tmp_path / "broken.json")
    f["dir"] = tmp_path
    return f


def test_resonance_report(files):
    code, out, _ = call(["resonance", files["w12"]])
    rep = json.loads(out)
    assert code == 0
    assert rep["mu"] == 2
    assert rep["E"] == [[[1, 0]], [[0, 1], [2, 0]]]
    assert rep["ordering"] == [1, 2]
    assert rep["tool"] == "qreinhardt" and rep["version"] == __version__


def test_validate(files):
    code, out, err = call(["validate", files["w12"]])
    assert code == 0 and json.loads(out)["c"] == [1]
    code, out, err = call(["validate", files["bad"]])
    assert code == 2
    assert json.loads(out)["gamma"] == [1, 1]
    assert "gamma" in err


def test_resonance_on_invalid_weights_prints_gamma(files):
    code, out, err = call(["resonance", files["bad"]])
    assert code == 2 and json.loads(out)["gamma"] == [1, 1]


def test_map_subcommands(files):
    code, out, _ = call(["map", "invert", files["phi2"], "--weights", files["w12"]])
    rep = json.loads(out)
    assert code == 0 and rep["pass"] and rep["degree"] == 2
    assert rep["result"] == phi_k_inverse(2).to_json()
    code, out, _ = call(["map", "compose", files["phi2"], files["phi2inv"]])
    assert code == 0
    assert json.loads(out)["degree"] == 1
    code, out, _ = call(["map", "check", files["phi2"], "--weights", files["w12"]])
    assert code == 0 and json.loads(out)["pass"]
    code, out, _ = call(["map", "check", files["phi2"], "--weights", files["w13"]])
    assert code == 1
    assert json.loads(out)["violations"] == [{"component": 2, "exp": [2, 0]}]
    code, _, err = call(["map", "invert", files["phi2"], "--weights", files["w13"]])
    assert code == 2 and "not resonant" in err
    code, _, err = call(["map", "invert", files["phi2"]])
    assert code == 2 and "--weights" in err


def test_moments(files):
    code, out, _ = call(["moments", files["ball"], "--alpha", "0,0", "--beta", "0,0"])
    rep = json.loads(out)
    assert code == 0
    assert rep["moment"]["method"] == "closed_form"
    assert rep["moment"]["re"] == pytest.approx(4.934802200544679, rel=1e-15)
    code, out, _ = call(
        ["moments", files["egg"], "--alpha", "1,0", "--beta", "1,0", "--method", "monte_carlo", "--samples", "20000", "--seed", "3"]
    )
    m = json.loads(out)["moment"]
    assert code == 0 and m["seed"] == 3 and m["stderr"] > 0
    code, _, err = call(["moments", files["ball"], "--alpha", "0", "--beta", "0,0"])
    assert code == 2


def test_repcoords(files):
    code, out, _ = call(["repcoords", files["push"], "--dense-cap", "4"])
    rep = json.loads(out)
    assert code == 0 and rep["pass"]
    assert rep["dense"]["discrepancy"] <= 1e-8
    comp2 = {tuple(t["exp"]): t["re"] for t in rep["sigma"]["components"][1]}
    assert comp2[(2, 0)] == pytest.approx(-1, abs=1e-9)
    code, out, _ = call(["repcoords", files["push"], "--method", "monte_carlo", "--samples", "400000", "--dense"])
    rep = json.loads(out)
    assert rep["method"] == "monte_carlo" and rep["seed"] == 0
    assert code == 0, rep["flags"]


def test_verify(files):
    code, out, _ = call(["verify", files["push"], files["push"], files["auto"], "--samples", "300"])
    rep = json.loads(out)
    assert code == 0 and rep["pass"]
    assert rep["residual"] <= 1e-7


def test_suite_and_out_flag(files):
    target = files["dir"] / "suite.json"
    code, out, _ = call(["--out", str(target), "suite", "--seed", "7", "--budget", "0", "--fuzz", "30"])
    assert code == 0 and out == ""
    rep = json.loads(target.read_text())
    assert rep["pass"] and rep["seed"] == 7


def test_suite_corrupt_exit_code(files):
    code, out, err = call(["suite", "--seed", "7", "--budget", "0", "--fuzz", "10", "--corrupt"])
    assert code == 1 and "verdict failed" in err


def test_input_errors(files):
    assert call(["validate", files["broken"]])[0] == 2
    assert call(["validate", files["garbage"]])[0] == 2
    assert call(["validate", str(files["dir"] / "missing.json")])[0] == 2
    assert call(["validate"])[0] == 2
    assert call(["frobnicate"])[0] == 2
    assert call(["resonance", files["w12"], "--bogus"])[0] == 2
    assert call(["--threads", "0", "resonance", files["w12"]])[0] == 2


def test_byte_identical_output(files):
    argv = ["moments", files["egg"], "--alpha", "1,1", "--beta", "1,1", "--method", "monte_carlo", "--samples", "30000"]
    a, b = call(argv)[1], call(["--threads", "3"] + argv)[1]
    assert a == b
    argv = ["suite", "--seed", "1", "--budget", "0", "--fuzz", "10"]
    assert call(argv)[1] == call(argv)[1]


def test_console_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "qreinhardt", "resonance", files["w12"]], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["mu"] == 2
