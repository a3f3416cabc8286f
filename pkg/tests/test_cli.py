"""CLI contract: flags, exit codes, deterministic machine-readable output."""

import json
import os
import subprocess
import sys

CLI = [sys.executable, "-m", "genuslab.cli"]


def run_cli(*args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        CLI + list(args), capture_output=True, text=True, env=env, timeout=300
    )


def test_genus_hp2_generic():
    r = run_cli("genus", "--manifold", "builtin:HP2", "--spec", "generic")
    assert r.returncode == 0
    payload = json.loads(r.stdout)
    assert payload["value_text"] == "epsilon"
    assert payload["value"] == {"epsilon": "1"}


def test_genus_cp3_ahat_is_zero():
    r = run_cli("genus", "--manifold", "builtin:CP3", "--spec", "ahat")
    assert r.returncode == 0
    assert json.loads(r.stdout)["value"] == "0"


def test_genus_v44_signature_cross_checked():
    r = run_cli("genus", "--manifold", "builtin:V(4,4)", "--spec", "signature")
    assert r.returncode == 0
    payload = json.loads(r.stdout)
    assert payload["value"] == "100"
    assert "cross_check" in payload


def test_expand_hp2_ahat():
    r = run_cli("expand", "--manifold", "builtin:HP2", "--cusp", "ahat", "--qorder", "6")
    assert r.returncode == 0
    payload = json.loads(r.stdout)
    # q^{-1} coefficient of Phi_0(HP2) vanishes: lowest s-exponent is 0, not -2
    assert payload["series"]["lowest_s_exponent"] == 0
    assert payload["k"] == 2
    assert payload["spin_integrality"] is True


def test_expand_cp2_signature_qorder_zero():
    r = run_cli("expand", "--manifold", "builtin:CP2", "--cusp", "signature", "--qorder", "0")
    assert r.returncode == 0
    payload = json.loads(r.stdout)
    assert payload["series"]["coefficients"][0] == "1"


def test_expand_v44_second_coefficient():
    r = run_cli("expand", "--manifold", "builtin:V(4,4)", "--cusp", "ahat", "--qorder", "3")
    payload = json.loads(r.stdout)
    # head coefficient of Phi_0 is -A-hat(V4, TM_C) = 100 (pole order 0)
    assert payload["pole_order_q"] == "0"
    assert payload["series"]["coefficients"][0] == "100"


def test_unknown_manifold_exits_2():
    r = run_cli("genus", "--manifold", "builtin:K3")
    assert r.returncode == 2
    assert json.loads(r.stdout)["code"] == "invalid"


def test_bad_reference_exits_2():
    r = run_cli("genus", "--manifold", "K3")
    assert r.returncode == 2


def test_rigidity_builtin_pass():
    r = run_cli(
        "rigidity",
        "--action",
        "builtin:HP2_diagonal(1,2,4)",
        "--lambda",
        "2,3,5",
        "--qorder",
        "4",
    )
    assert r.returncode == 0
    payload = json.loads(r.stdout)
    assert payload["status"] == "PASS"
    assert payload["matches_loop_series"] is True


def test_rigidity_inadmissible_sample_exits_2():
    r = run_cli(
        "rigidity", "--action", "builtin:HP1_diagonal(1,2)", "--lambda", "1", "--qorder", "2"
    )
    assert r.returncode == 2
    assert json.loads(r.stdout)["code"] == "inadmissible"


def test_obstruct_weights():
    r = run_cli("obstruct", "--weights", "[1,3,4]", "--order", "4")
    assert r.returncode == 0
    payload = json.loads(r.stdout)
    assert payload["m"] == "1/2"
    assert payload["vanish_count"] == 1


def test_obstruct_codim_involution():
    r = run_cli("obstruct", "--codim", "8")
    payload = json.loads(r.stdout)
    assert payload["vanish_count"] == 2
    r = run_cli("obstruct", "--codim", "6", "--order", "3")
    assert json.loads(r.stdout)["vanish_count"] == 1


def test_obstruct_fixdim():
    r = run_cli("obstruct", "--fixdim", "[[8,[4,0]]]")
    assert json.loads(r.stdout)["restricted"] is True
    r = run_cli("obstruct", "--fixdim", "[[8,[4,4]]]")
    assert json.loads(r.stdout)["restricted"] is False


def test_obstruct_matrix_file(tmp_path):
    path = tmp_path / "m.json"
    path.write_text("[[1,0,1,1],[0,1,1,1]]")
    r = run_cli("obstruct", "--matrix-file", str(path))
    assert r.returncode == 0
    payload = json.loads(r.stdout)
    assert payload["normal_form"]["covering_degree"] == 1
    assert payload["code_audit"]["sublinearity_holds"] is True


def test_obstruct_without_inputs_exits_2():
    r = run_cli("obstruct")
    assert r.returncode == 2


def test_verify_small_suite():
    r = run_cli("verify", "--suite", "localterms", "--qorder", "4")
    assert r.returncode == 0
    payload = json.loads(r.stdout)
    assert payload["status"] == "PASS"
    assert payload["failed"] == []


def test_verify_unknown_suite_exits_2():
    r = run_cli("verify", "--suite", "nonsense")
    assert r.returncode == 2


def test_verify_all_binary_identical_across_runs():
    a = run_cli("verify", "--suite", "all", "--qorder", "6")
    b = run_cli("verify", "--suite", "all", "--qorder", "6")
    assert a.returncode == 0 and b.returncode == 0
    assert a.stdout == b.stdout
    assert json.loads(a.stdout)["status"] == "PASS"


def test_env_var_sets_default_qorder():
    r = run_cli(
        "expand",
        "--manifold",
        "builtin:CP2",
        "--cusp",
        "signature",
        env_extra={"GENUSLAB_QORDER": "2"},
    )
    payload = json.loads(r.stdout)
    assert payload["qorder"] == 2
    r = run_cli("verify", "--suite", "localterms", env_extra={"GENUSLAB_QORDER": "zebra"})
    assert r.returncode == 2


def test_formats_csv_and_text():
    r = run_cli("--format", "csv", "obstruct", "--weights", "[1,3,4]", "--order", "4")
    assert r.returncode == 0
    assert r.stdout.splitlines()[0] == "key,value"
    assert any(line.startswith("m,") for line in r.stdout.splitlines())
    r = run_cli("--format", "text", "genus", "--manifold", "builtin:CP2", "--spec", "ahat")
    assert "value = -1/8" in r.stdout


def test_output_file(tmp_path):
    out = tmp_path / "result.json"
    r = run_cli("genus", "--manifold", "builtin:CP2", "--spec", "ahat", "--out", str(out))
    assert r.returncode == 0
    assert r.stdout == ""
    assert json.loads(out.read_text())["value"] == "-1/8"


def test_resource_cap_exits_4(tmp_path):
    path = tmp_path / "big.json"
    identity = [[int(i == j) for j in range(26)] for i in range(26)]
    path.write_text(json.dumps(identity))
    r = run_cli("obstruct", "--matrix-file", str(path))
    assert r.returncode == 4
    assert json.loads(r.stdout)["code"] == "resource-cap"


def test_fabricated_spin_action_exits_3(tmp_path):
    # honest HP2_diagonal(1,2,4) weights with one sign flipped: the localization
    # sums become sample-dependent, FAILing rigidity on a spin ambient
    doc = {
        "name": "tampered",
        "ambient": "builtin:HP2",
        "components": [
            {"model": "point", "normal": [
                {"chern": {}, "weight": -1},  # flipped from +1
                {"chern": {}, "weight": -3},
                {"chern": {}, "weight": 3},
                {"chern": {}, "weight": -5},
            ]},
            {"model": "point", "normal": [
                {"chern": {}, "weight": -1},
                {"chern": {}, "weight": -3},
                {"chern": {}, "weight": 2},
                {"chern": {}, "weight": -6},
            ]},
            {"model": "point", "normal": [
                {"chern": {}, "weight": -3},
                {"chern": {}, "weight": -5},
                {"chern": {}, "weight": -2},
                {"chern": {}, "weight": -6},
            ]},
        ],
    }
    path = tmp_path / "action.json"
    path.write_text(json.dumps(doc))
    r = run_cli("rigidity", "--action", f"file:{path}", "--lambda", "2,3", "--qorder", "3")
    assert r.returncode == 3
    assert json.loads(r.stdout)["code"] == "internal-inconsistency"
