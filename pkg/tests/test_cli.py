import json
import socket
import subprocess
import sys
import time

import httpx
import pytest

from mfcover.cli import main
from mfcover.mf import format_mf, parse_mf, validate


@pytest.fixture
def mf_file(tmp_path, e6):
    def write(name, X=None):
        p = tmp_path / f"{name}.mf"
        p.write_text(format_mf(X if X is not None else e6.get(name)))
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_verify(capsys, mf_file):
    code, out = run(capsys, "verify", mf_file("N1"), "--json")
    rep = json.loads(out)
    assert code == 0 and rep["status"] == "pass" and rep["result"]["valid"]


def test_verify_broken(capsys, tmp_path):
    p = tmp_path / "bad.mf"
    p.write_text("ring x,y\nprec 20\nfield fp:32003\npotential x^4+y^3\nphi\n[x^3, y]\n[-y^2, x]\n"
                 "psi\n[x, -y]\n[y^2, x^2]\n")
    code, out = run(capsys, "verify", str(p), "--json")
    assert code == 1 and json.loads(out)["result"]["failures"]


def test_decompose(capsys, tmp_path, e6):
    from mfcover.mf import direct_sum_mf
    p = tmp_path / "xx.mf"
    p.write_text(format_mf(direct_sum_mf(e6.get("X"), e6.get("X"))))
    code, out = run(capsys, "decompose", str(p), "--json")
    assert code == 0 and json.loads(out)["result"]["decomposition"] == {"X": 2}


def test_cover_emits_valid_mf(capsys, tmp_path):
    p = tmp_path / "rx.mf"
    p.write_text("ring x\nprec 30\nfield fp:32003\npotential x^4\nphi\n[x]\npsi\n[x^3]\n")
    code, out = run(capsys, "cover", str(p), "--n", "3", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["result"]["match"] == "N1"
    C = parse_mf(rep["result"]["mf"]["text"])
    assert validate(C).valid


def test_tensor(capsys, tmp_path):
    a, b = tmp_path / "a.mf", tmp_path / "b.mf"
    a.write_text("ring x\nprec 20\nfield fp:32003\npotential x^4\nphi\n[x]\npsi\n[x^3]\n")
    b.write_text("ring y\nprec 20\nfield fp:32003\npotential y^3\nphi\n[y]\npsi\n[y^2]\n")
    code, out = run(capsys, "tensor", str(a), str(b))
    assert code == 0 and out.startswith("tensor: pass") and "potential x^4+y^3" in out
    code, _ = run(capsys, "tensor", str(a), str(a))
    assert code == 3


def test_approx_and_sigma(capsys, mf_file):
    code, out = run(capsys, "approx", mf_file("A"), "--json")
    res = json.loads(out)["result"]
    assert code == 0 and res["kernel"] == "B" and res["middle"] == {"M1": 2, "M2": 1}
    code, out = run(capsys, "approx", mf_file("A"), "--side", "left", "--json")
    assert json.loads(out)["result"]["middle"] == {"M2": 1, "N1": 2}
    code, out = run(capsys, "sigma", mf_file("X"), "--json")
    assert json.loads(out)["result"]["membership"] == {"1": False, "2": True, "3": True}


def test_quiver(capsys):
    code, out = run(capsys, "quiver", "--ring", "3,4", "--ideals", "M1=3,8", "N1=3,4", "M2=6,8", "--format", "dot")
    assert code == 0 and out.count("->") == 9
    code, out = run(capsys, "quiver", "--catalog", "E8", "--json")
    assert len(json.loads(out)["result"]["arrows"]) == 12
    code, _ = run(capsys, "quiver", "--ring", "4,6", "--ideals", "M=0")
    assert code == 3


def test_resolve(capsys):
    code, out = run(capsys, "resolve", "--vertex", "N1", "--steps", "5")
    assert code == 0 and "kernel of d(N1): B" in out
    code, _ = run(capsys, "resolve", "--vertex", "Q")
    assert code == 3


def test_bounds(capsys):
    code, out = run(capsys, "bounds", "--exponents", "4,3", "--sweep", "20", "--json")
    res = json.loads(out)["result"]
    assert code == 0 and (res["loewy"], res["bfk"], res["cover_sum"]) == (4, 7, 1)
    assert res["sweep"]["violations"] == []
    assert run(capsys, "bounds", "--exponents", "4,x")[0] == 3
    assert run(capsys, "bounds", "--exponents", "1,3")[0] == 3


def test_repro_e6(capsys):
    code, out = run(capsys, "repro", "e6")
    assert code == 0 and "FAIL" not in out


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "verify", str(tmp_path / "missing.mf"))[0] == 3
    assert run(capsys)[0] == 3
    assert run(capsys, "verify", str(tmp_path / "missing.mf"), "--field", "fp:12")[0] == 3
    bad = tmp_path / "bad.mf"
    bad.write_text("ring x\nphi\n[x]\n")
    assert run(capsys, "verify", str(bad))[0] == 3


def test_json_is_deterministic(capsys, mf_file):
    path = mf_file("X")
    outs = [run(capsys, "decompose", path, "--json", "--seed", "3")[1] for _ in range(2)]
    assert outs[0] == outs[1]
    outs = [run(capsys, "approx", path, "--json", "--no-cache")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_rationals_field(capsys, mf_file):
    code, out = run(capsys, "verify", mf_file("M2"), "--field", "q", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["config"]["field"] == "q"


def _free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_server_round_trip(capsys, mf_file):
    port = _free_port()
    proc = subprocess.Popen([sys.executable, "-m", "mfcover.cli", "serve", "--port", str(port)],
                            stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    url = f"http://127.0.0.1:{port}"
    try:
        for _ in range(100):
            try:
                if httpx.get(url + "/v1/health").status_code == 200:
                    break
            except httpx.HTTPError:
                time.sleep(0.1)
        else:
            pytest.fail("service did not start")
        path = mf_file("A")
        local = run(capsys, "approx", path, "--json")
        remote = run(capsys, "approx", path, "--json", "--server", url)
        assert local == remote
    finally:
        proc.terminate()
        proc.wait(10)
