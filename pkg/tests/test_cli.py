import json

import numpy as np
import pytest

from pbclab import io
from pbclab.cli import run
from pbclab.mac import CqMac
from pbclab.operators import DensityOperator
from pbclab.states import basis_state, random_density


def _run(args, capsys):
    code = run(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def _write(path, obj):
    path.write_text(io.dumps(obj))
    return str(path)


def test_entropy_phi_plus(capsys):
    code, out, _ = _run(["entropy", "--state", "builtin:phi_plus"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["H"] == pytest.approx(0, abs=1e-12)
    assert data["H2"] == pytest.approx(0, abs=1e-12)
    assert data["I"] == pytest.approx(2, abs=1e-12)


def test_state_from_file(tmp_path, capsys):
    rng = np.random.default_rng(91)
    path = _write(tmp_path / "rho.json", io.operator_to_json(random_density(2, rng)))
    code, out, _ = _run(["divergence", "--rho", path, "--sigma", "builtin:mixed2", "--alpha", "2"], capsys)
    data = json.loads(out)
    assert code == 0 and data["D_petz"] >= data["D_sandwiched"] - 1e-12


def test_check_prop1_is_deterministic(capsys):
    code, out1, _ = _run(["check", "prop1", "--trials", "20", "--seed", "7"], capsys)
    assert code == 0 and json.loads(out1)["violations"] == 0
    _, out2, _ = _run(["check", "prop1", "--trials", "20", "--seed", "7"], capsys)
    assert out1 == out2


def test_threads_do_not_change_output(capsys, monkeypatch):
    _, out1, _ = _run(["check", "hn", "--trials", "30", "--seed", "3"], capsys)
    monkeypatch.setenv("PBCLAB_THREADS", "4")
    _, out2, _ = _run(["check", "hn", "--trials", "30", "--seed", "3"], capsys)
    assert out1 == out2


def test_failed_check_exits_one(capsys):
    code, out, err = _run(["check", "gentle", "--trials", "5", "--tol-check", "-10"], capsys)
    assert code == 1
    assert json.loads(out)["violations"] == 5
    assert "check failed" in err


def test_malformed_json_exits_two(tmp_path, capsys):
    bad = tmp_path / "spec.json"
    bad.write_text('{"resource": [1,\n')
    code, _, err = _run(["p2p", "simulate", "--spec", str(bad)], capsys)
    assert code == 2
    assert f"{bad}:2:1" in err


def test_unknown_builtin_exits_two(capsys):
    code, _, err = _run(["entropy", "--state", "builtin:nope"], capsys)
    assert code == 2 and "unknown builtin" in err


def test_bad_arguments_exit_two(capsys):
    code, _, _ = _run(["hyptest", "--rho", "builtin:ket0"], capsys)
    assert code == 2


def test_budget_exits_three(capsys):
    code, _, err = _run(["hyptest", "--rho", "builtin:plus", "--sigma", "builtin:ket0", "--eps", "0.1", "--n", "11"], capsys)
    assert code == 3 and "budget" in err


def test_p2p_simulate_noiseless(tmp_path, capsys):
    spec = _write(tmp_path / "spec.json", {"resource": "builtin:phi_plus", "channel": "builtin:identity2", "M": 2})
    code, out, _ = _run(["p2p", "simulate", "--spec", spec], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["exact_error"] <= data["bound"]
    assert data["exact_error"] == pytest.approx((2 - 3**0.5) / 4, abs=1e-12)


def test_p2p_exponent_table_csv(tmp_path, capsys):
    spec = _write(tmp_path / "spec.json", {"resource": "builtin:phi_plus", "channel": "builtin:depolarizing:0.2", "M": 2})
    code, out, _ = _run(["p2p", "exponent", "--spec", spec, "--rate", "0.1", "0.5", "--format", "csv"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "rate,exponent,s_opt" and len(lines) == 3


def test_csv_rejected_for_scalar_output(capsys):
    code, _, _ = _run(["entropy", "--state", "builtin:phi_plus", "--format", "csv"], capsys)
    assert code == 2


def test_mac_region_round_trips(tmp_path, capsys):
    rng = np.random.default_rng(92)
    path = _write(tmp_path / "omega.json", io.operator_to_json(random_density(8, rng, dims=(2, 2, 2))))
    out_path = tmp_path / "region.json"
    code, _, _ = _run(["mac", "region", "--state", path, "--senders", "2", "--out", str(out_path)], capsys)
    data = json.loads(out_path.read_text())
    assert code == 0
    assert [r["kind"] for r in data["regions"]] == ["renyi2", "collision", "mi"]
    assert all(len(r["constraints"]) == 3 for r in data["regions"])
    assert len(data["hull"]) >= 3


def test_mac_derandomize_orthogonal(tmp_path, capsys):
    outs = {(x, y): basis_state(4, 2 * x + y).matrix for x in range(2) for y in range(2)}
    path = _write(tmp_path / "cq.json", io.cqmac_to_json(CqMac([0.5, 0.5], [0.5, 0.5], outs)))
    code, out, _ = _run(["mac", "derandomize", "--cq", path, "--L", "2", "--M", "2", "--tests", "support"], capsys)
    data = json.loads(out)
    assert code == 0 and data["avg_error"] == 0 and data["exhaustive"]


def test_mac_identities_with_crossing(capsys):
    code, out, _ = _run(
        ["mac", "identities", "--theta", "builtin:phi_plus", "--gamma", "builtin:phi_plus",
         "--channel", "builtin:identity4", "--r1", "0.5", "--r2", "0.25", "--direction", "1", "1"],
        capsys,
    )
    data = json.loads(out)
    assert code == 0
    assert max(data["residuals"]) <= 1e-9
    assert data["crossing"]["gap"] <= 1e-4


def test_mac_simulate_and_bound(tmp_path, capsys):
    spec = _write(
        tmp_path / "mac.json",
        {"resources": ["builtin:phi_plus", "builtin:phi_plus"], "channel": "builtin:identity4", "sizes": [2, 2]},
    )
    code, out, _ = _run(["mac", "simulate", "--spec", spec], capsys)
    sim = json.loads(out)
    assert code == 0 and sim["exact_error"] <= sim["bound"]
    code, out, _ = _run(["mac", "bound", "--spec", spec], capsys)
    assert code == 0 and [t["subset"] for t in json.loads(out)["terms"]] == [[1], [2], [1, 2]]


def test_chernoff_multi_reports_gaps(capsys):
    code, out, _ = _run(
        ["chernoff-multi", "--a", "builtin:ket0", "--alt", "builtin:mixed2", "--n", "10", "20"], capsys
    )
    data = json.loads(out)
    assert code == 0 and [r["n"] for r in data["rows"]] == [10, 20]
    assert "not asserted" in data["note"]


def test_typicality_composite(capsys, tmp_path):
    alt = _write(tmp_path / "b.json", io.operator_to_json(DensityOperator(np.diag([0.3, 0.7]))))
    code, out, _ = _run(
        ["typicality", "--state", "builtin:mixed2", "--n", "8", "--delta", "0.2", "--alt", alt], capsys
    )
    assert code == 0 and json.loads(out)["composite"]["exponents_ok"]


def test_stein_and_hyptest(capsys, tmp_path):
    rho = _write(tmp_path / "r.json", io.operator_to_json(DensityOperator(np.diag([0.7, 0.3]))))
    sig = _write(tmp_path / "s.json", io.operator_to_json(DensityOperator(np.diag([0.4, 0.6]))))
    code, out, _ = _run(["stein", "--rho", rho, "--sigma", sig, "--eps", "0.3", "--n", "200"], capsys)
    assert code == 0 and json.loads(out)["ordered"]
    code, out, _ = _run(["hyptest", "--rho", rho, "--sigma", sig, "--eps", "0.3", "--n", "50"], capsys)
    assert code == 0 and json.loads(out)["certified"]
