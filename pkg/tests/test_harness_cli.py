import json

import numpy as np
import pytest

from artifact import harness
from artifact.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_lemmas_passes():
    rep = harness.run_verify("lemmas", 1)
    assert rep.passed, [c.name for c in rep.failures()]


def test_verify_examples_passes():
    assert harness.run_verify("examples", 0).passed


def test_verify_tables_known_failures():
    rep = harness.run_verify("tables", 1)
    names = sorted(c.name for c in rep.failures())
    assert names == ["(1+s0)C_s0 rounds to C_0 [iid delta=0.1]",
                     "(1+s0)C_s0 rounds to C_0 [iid delta=0.2]",
                     "Poisson minorant delta=0.9"]


def test_unknown_suite(capsys):
    with pytest.raises(SystemExit) as e:
        main(["verify", "nope"])
    assert e.value.code == 2


def test_render_tables():
    cols, rows = harness.render_table("t2_4")
    row = [r for r in rows if r["delta"] == "0.5"][0]
    assert np.isclose(row["recomputed"], 1.0167, atol=5e-4) and row["p"] == 0.076
    cols, rows = harness.render_table("t3_gamma")
    row = [r for r in rows if r["delta"] == "0.5"][0]
    assert np.isclose(row["recomputed"], 0.2803, atol=5e-4)
    assert np.isclose(row["gamma_star"], 0.2922, atol=5e-3)
    assert harness.render_table("custom", {}) == (["value"], [])


def test_cli_bound(capsys):
    code, out, _ = run(capsys, "bound", "--op", "poisson_sum", "--lambda", "100", "--delta", "1",
                       "--beta2", "1", "--beta3", "1")
    doc = json.loads(out)
    assert code == 0
    assert np.isclose(doc["value"], 0.03031)
    assert doc["constant"] == "M(1)=0.3031"


def test_cli_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--metric", "kolmogorov", "--dist", "sym_bernoulli_sum", "--n", "2")
    assert code == 0 and np.isclose(json.loads(out)["value"], 0.25)


def test_cli_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--family", "negative_binomial", "--r", "2", "--p", "0.5")
    doc = json.loads(out)
    assert code == 0
    assert np.isclose(doc["lambda"], 1.386294, atol=1e-6)
    k = np.array(doc["y_support"])
    assert np.allclose(doc["y_weights"], 0.5 ** k / (k * np.log(2)), atol=1e-10)


def test_cli_table_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "table", "t2_4")
    assert code == 0
    assert out.splitlines()[0] == "delta,p,printed,recomputed,diff,provenance"


def test_cli_deterministic(capsys):
    a = run(capsys, "bound", "--op", "be_cf_constant")[1]
    b = run(capsys, "bound", "--op", "be_cf_constant")[1]
    assert a == b


def test_cli_error_codes(capsys):
    code, _, err = run(capsys, "bound", "--op", "poisson_sum", "--lambda", "1", "--beta2", "1")
    assert code == 2 and "bound.params.beta" in err
    code, _, err = run(capsys, "bound", "--op", "poisson_sum", "--lambda", "-1", "--beta2", "1", "--beta3", "1")
    assert code == 2
    code, _, err = run(capsys, "bound", "--op", "poisson_sum", "--lambda", "1", "--beta2", "1",
                       "--beta3", "1", "--bogus", "3")
    assert code == 2 and "bogus" in err


def test_cli_verify_exit_codes(capsys):
    assert run(capsys, "--seed", "0", "verify", "examples")[0] == 0
    assert run(capsys, "--seed", "1", "verify", "tables")[0] == 1


def test_cli_spec_file(tmp_path, capsys):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"op": "pb_sum", "params": {"lambda": 100, "theta": 0.1, "beta2": 1, "beta": 1}}))
    code, out, _ = run(capsys, "bound", "--spec", str(spec))
    assert code == 0 and np.isclose(json.loads(out)["value"], 0.05583)
    bad = tmp_path / "b.json"
    bad.write_text("{not json")
    assert run(capsys, "bound", "--spec", str(bad))[0] == 2
