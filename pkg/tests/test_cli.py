import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from gribov.cli import render, run
from gribov.verify import REGISTRY

GOLDEN = Path(__file__).parent / "golden"

# name -> argv; outputs are frozen byte-for-byte under tests/golden
CASES = {
    "spectrum_mu3_n2.csv": ["spectrum", "--mu", "3", "--lambda", "1", "--n", "2"],
    "spectrum_mu0_n3.json": ["spectrum", "--mu", "0", "--lambda", "1", "--n", "3", "--format", "json"],
    "sigma0_n16.csv": ["sigma0", "--lambda", "1", "--mu", "1,2,4", "--n", "16"],
    "sigma0_n16.svg": ["sigma0", "--lambda", "1", "--mu", "1,2,4", "--n", "16", "--format", "svg"],
    "kernel_apply_u2.csv": ["kernel-apply", "--mu", "0", "--lambda", "1", "--coeffs", "0,0,1",
                            "--ymax", "2", "--samples", "5"],
    "inverse_check_n50.json": ["inverse-check", "--nmax", "50"],
    "deficiency_p1_m2.json": ["deficiency", "--p", "1", "--m", "2", "--jmax", "200"],
    "polys_plasma_P5.json": ["polys", "--kind", "plasma_P", "--n", "5"],
    "polys_kouba_Q4.json": ["polys", "--kind", "kouba_Q", "--n", "4"],
    "polys_first_n4.json": ["polys", "--kind", "first", "--n", "4", "--x", "2+1i"],
    "eigvec_xi1_n100.json": ["eigvec", "--xi", "1", "--n", "100"],
    "verify_basis_ops.txt": ["verify", "--only", "basis_ops"],
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, out, err = render(CASES[name])
    assert code == 0, err
    path = GOLDEN / name
    if os.environ.get("GRIBOV_REGEN_GOLDEN"):
        path.write_text(out, encoding="utf-8")
    assert out == path.read_text(encoding="utf-8")


@pytest.mark.parametrize("name", ["spectrum_mu3_n2.csv", "deficiency_p1_m2.json", "kernel_apply_u2.csv"])
def test_repeat_is_byte_identical(name):
    assert render(CASES[name]) == render(CASES[name])


def test_spectrum_rows():
    _, out, _ = render(CASES["spectrum_mu3_n2.csv"])
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert [float(r[0]) for r in rows] == pytest.approx([4, 5], abs=1e-12)


def test_deficiency_verdict():
    _, out, _ = render(CASES["deficiency_p1_m2.json"])
    obj = json.loads(out)
    assert obj["verdict"] == "completely_indeterminate"
    assert (obj["n_plus"], obj["n_minus"]) == (2, 2)


def test_polys_exact_rationals_are_strings():
    _, out, _ = render(CASES["polys_plasma_P5.json"])
    obj = json.loads(out)
    assert all(isinstance(a, str) and isinstance(b, str) for a, b in obj["coeffs"])
    assert [int(a) for a, _ in obj["coeffs"]] == [0, 120, 0, 160, 0, 32]


def test_sigma0_both_has_comparison_columns():
    code, out, _ = render(["sigma0", "--mu", "1", "--n", "64", "--method", "both", "--nodes", "128"])
    assert code == 0
    header = out.splitlines()[0]
    assert header == "mu,sigma0_re,sigma0_im,residual,nystrom_sigma0,iterations,rel_diff"


def test_json_is_17_digits():
    _, out, _ = render(["inverse-check", "--nmax", "10", "--lambda", "0.1"])
    assert '"lambda": 0.10000000000000001' in out


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--mu", "1", "--lambda", "1", "--n", "2", "--tol", "0"],
        ["spectrum", "--mu", "1", "--lambda", "1"],
        ["spectrum", "--mu", "1", "--lambda", "1", "--n", "2", "--bogus"],
        ["spectrum", "--mu", "1", "--lambda", "1", "--n", "2", "--format", "svg"],
        ["deficiency", "--p", "0", "--m", "1"],
        ["sigma0", "--mu", "1,-2", "--n", "8"],
        ["polys", "--kind", "hermite", "--n", "3"],
        ["kernel-apply", "--mu", "0", "--lambda", "1", "--input", "/nonexistent.json"],
        ["nosuchcommand"],
    ],
)
def test_invalid_input_exit_2(argv):
    code, out, err = render(argv)
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "invalid_input"


def test_module_error_exit_1():
    code, out, err = render(["polys", "--kind", "kouba_P", "--n", "61"])
    assert code == 1
    assert json.loads(err) == {"error": "domain_error", "detail": "kouba_polys supports 0 <= n <= 60"}


def test_non_convergence_exit_1():
    code, _, err = render(["spectrum", "--mu", "4", "--lambda", "1", "--n", "64"])
    assert code == 1 and json.loads(err)["error"] == "non_convergence"


def test_threads_env(monkeypatch):
    monkeypatch.setenv("GRIBOV_THREADS", "0")
    assert render(["sigma0", "--mu", "1", "--n", "8"])[0] == 2
    monkeypatch.setenv("GRIBOV_THREADS", "3")
    threaded = render(["sigma0", "--mu", "1,2,4", "--n", "16"])
    monkeypatch.delenv("GRIBOV_THREADS")
    assert threaded == render(["sigma0", "--mu", "1,2,4", "--n", "16"])


def test_kernel_apply_from_file(tmp_path):
    vec = {"basis": "u", "start": 0, "re": [0.0, 0.0, 1.0], "im": [0.0, 0.0, 0.0]}
    path = tmp_path / "v.json"
    path.write_text(json.dumps(vec))
    code, out, _ = render(["kernel-apply", "--mu", "0", "--lambda", "1", "--input", str(path),
                           "--ymax", "2", "--samples", "5"])
    assert code == 0
    assert out == (GOLDEN / "kernel_apply_u2.csv").read_text()
    path.write_text(json.dumps(dict(vec, basis="e")))
    assert render(["kernel-apply", "--mu", "0", "--lambda", "1", "--input", str(path)])[0] == 2


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.csv"
    assert run(CASES["spectrum_mu3_n2.csv"] + ["--output", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert target.read_text() == (GOLDEN / "spectrum_mu3_n2.csv").read_text()


def test_verify_lists_every_check():
    code, out, _ = render(["verify"])
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == len(REGISTRY) + 1
    assert all(line.startswith("PASS ") for line in lines[:-1])
    for c in REGISTRY:
        assert any(line.startswith(f"PASS {c.key}:") for line in lines)


def test_verify_unknown_check():
    assert render(["verify", "--only", "nope"])[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gribov", "spectrum", "--mu", "3", "--lambda", "1", "--n", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == (GOLDEN / "spectrum_mu3_n2.csv").read_text()
    proc = subprocess.run([sys.executable, "-m", "gribov", "spectrum"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2
