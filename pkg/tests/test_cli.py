import io
import json
import subprocess
import sys

import pytest

from apgeo.cli import EXIT_CAP, EXIT_FAIL, EXIT_OK, EXIT_USAGE, NCache, run
from apgeo.exact_core import parse_matrix

from conftest import a1


@pytest.fixture(autouse=True)
def cache_path(tmp_path, monkeypatch):
    path = tmp_path / "cache.jsonl"
    monkeypatch.setenv("APGEO_CACHE", str(path))
    return path


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_progression_and_verify(tmp_path):
    code, text = call("progression", "--k", "3", "--gamma", "2,1;1,1")
    assert code == EXIT_OK
    doc = json.loads(text)
    assert doc["primes"] == [3, 5, 7] and doc["C"] == "20"
    path = tmp_path / "w.json"
    path.write_text(text)
    code, text = call("verify", str(path))
    assert code == EXIT_OK and json.loads(text)["passed"]


def test_verify_tampered(tmp_path, capsys):
    _, text = call("progression", "--k", "3", "--gamma", "2,1;1,1")
    doc = json.loads(text)
    doc["terms"][1]["theta"][0][1] = str(int(doc["terms"][1]["theta"][0][1]) + 1)
    path = tmp_path / "tampered.json"
    path.write_text(json.dumps(doc))
    code, text = call("verify", str(path))
    assert code == EXIT_FAIL
    failed = [c["name"] for c in json.loads(text)["checks"] if not c["pass"]]
    assert "theta[2].integral" in failed
    assert "FAILED theta[2].integral" in capsys.readouterr().err


def test_verify_malformed_witness(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text(json.dumps({"C": "x"}))
    assert call("verify", str(path))[0] == EXIT_FAIL
    path.write_text("{not json")
    assert call("verify", str(path))[0] == EXIT_USAGE


def test_nfun():
    assert call("nfun", "--gamma", "2,1;1,1", "--prime", "5", "--r", "2") == (EXIT_OK, "25\n")
    assert call("nfun", "--gamma", "2,1;1,1", "--prime", "5", "--r", "3", "--brute") == (EXIT_OK, "125\n")


def test_contains_and_transfer(tmp_path):
    code, text = call("contains", "--k", "3", "--gamma", "6,1;5,1")
    assert code == EXIT_OK
    doc = json.loads(text)
    assert int(doc["C"]) % 2 == 0 and doc["target"]["j"] == 2
    w = tmp_path / "c.json"
    w.write_text(text)
    assert call("verify", str(w))[0] == EXIT_OK
    m = tmp_path / "map.json"
    m.write_text("[[1, 1], [2, 3]]")
    out = tmp_path / "t.json"
    code, _ = call("transfer", "--witness", str(w), "--dm", "2", "--dmp", "3", "--map", str(m),
                   "--k", "3", "--out", str(out))
    assert code == EXIT_OK
    t = json.loads(out.read_text())["transfer"]
    assert t["D"] == "6" and t["indices"] == [1, 3, 5]
    assert call("verify", str(out))[0] == EXIT_OK


def test_absprim():
    code, text = call("absprim", "--gamma", "6,1;5,1")
    doc = json.loads(text)
    assert code == EXIT_OK and doc["primitive"] and not doc["absolutely_primitive"]
    assert doc["root"] == [["3", "-1"], ["1", "0"]] and doc["m"] == 2
    assert json.loads(call("absprim", "--gamma", "0,-1;1,0")[1])["kind"] == "elliptic"


def test_kernel_check_vdw_density():
    code, text = call("kernel-check", "--n", "2", "--p", "3", "--i", "1", "--exhaustive")
    assert code == EXIT_OK and json.loads(text)["checked"] == 729
    code, text = call("kernel-check", "--n", "3", "--p", "3", "--i", "1", "--samples", "100", "--seed", "3")
    assert code == EXIT_OK and json.loads(text)["checked"] == 100
    code, text = call("vdw", "--colors", "2", "--k", "3", "--cap", "20")
    assert code == EXIT_OK and json.loads(text)["N"] == 9
    assert call("vdw", "--colors", "2", "--k", "3", "--cap", "6")[0] == EXIT_CAP
    code, text = call("density", "--disc", "5", "--bound", "100")
    assert code == EXIT_OK and json.loads(text)["split"] == 10


@pytest.mark.parametrize("argv", [
    ["progression", "--k", "3", "--gamma", "2,1;1"],
    ["progression", "--k", "3", "--gamma", "5,3;3,2"],
    ["nfun", "--gamma", "2,0;0,2", "--prime", "5", "--r", "1"],
    ["verify", "/nonexistent/witness.json"],
    ["kernel-check", "--n", "2", "--p", "3", "--i", "1", "--exhaustive", "--samples", "5"],
    ["frobnicate"],
    [],
])
def test_usage_errors(argv):
    assert call(*argv)[0] == EXIT_USAGE


def test_cap_exhaustion():
    assert call("progression", "--k", "6", "--gamma", "2,1;1,1", "--prime-bound", "50")[0] == EXIT_CAP


def test_cache_is_transparent(cache_path):
    argv = ["contains", "--k", "3", "--gamma", "6,1;5,1"]
    cold = call("--no-cache", *argv)
    assert not cache_path.exists()
    first = call(*argv)
    assert cache_path.exists()
    warm = call(*argv)
    assert cold == first == warm


def test_cache_skips_corrupt_lines(cache_path, caplog):
    g = parse_matrix("2,1;1,1")
    cache = NCache(cache_path)
    assert cache(g, a1(5), 3) == 125
    with open(cache_path, "a") as fh:
        fh.write("not json\n{\"gamma_hash\": 1}\n")
    reloaded = NCache(cache_path)
    assert "skipping corrupt cache line" in caplog.text
    assert reloaded(g, a1(5), 2) == 25


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "apgeo", "--no-cache", "nfun", "--gamma", "2,1;1,1",
                           "--prime", "11", "--r", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "55\n"
