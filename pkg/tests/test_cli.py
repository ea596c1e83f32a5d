"""CLI surface: every subcommand, text and JSON output, exit codes."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from qpermlab.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def run_json(runner, args):
    result = runner.invoke(main, ["--json"] + args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


def test_validate(runner):
    data = run_json(runner, ["validate", "kac_paljutkin", "--tol", "1e-12"])
    assert data["passes"] is True
    text = runner.invoke(main, ["validate", "s3"])
    assert text.exit_code == 0 and "PASS" in text.output


def test_info_kp(runner):
    data = run_json(runner, ["info", "kac_paljutkin"])
    assert data["algebraDim"] == 8
    assert data["blocks"] == [1, 1, 1, 1, 2]
    assert data["deterministicOrder"] == 4
    assert sorted(map(tuple, data["deterministicPermutations"])) == sorted([
        (1, 2, 3, 4), (1, 2, 4, 3), (2, 1, 3, 4), (2, 1, 4, 3)])


def test_slice_and_convolve(runner):
    data = run_json(runner, ["slice", "kac_paljutkin", "haar"])
    assert np.allclose(data["slice"], 0.25)
    conv = run_json(runner, ["convolve", "kac_paljutkin", "counit", "haar"])
    assert np.allclose(conv["slice"], 0.25)


def test_power_and_cesaro(runner):
    data = run_json(runner, ["power", "dual-s3",
                             json.dumps({"kind": "pdf", "values": {
                                 "0": [1, 0], "1": [0.5, 0], "2": [0.5, 0],
                                 "3": [-0.5, 0], "4": [-0.5, 0], "5": [-1, 0]}}),
                             "50"])
    # even powers tend to the subgroup indicator 1_{<(23)>}, whose slice is
    # uniform 1/2 inside each circulant generator block
    matrix = np.array(data["slice"])
    assert np.allclose(matrix, np.array([[0.5, 0.5, 0, 0], [0.5, 0.5, 0, 0],
                                         [0, 0, 0.5, 0.5], [0, 0, 0.5, 0.5]]), atol=1e-7)
    ces = run_json(runner, ["cesaro", "kac_paljutkin", "haar"])
    assert ces["converged"] is True and ces["classification"] == "haar-idempotent"


def test_fix_spectrum(runner):
    data = run_json(runner, ["fix-spectrum", "dual-s4"])
    values = data["spectrum"]
    assert len(values) == 8
    assert min(abs(v - (5 - np.sqrt(17)) / 2) for v in values) < 1e-7


def test_deterministic(runner):
    data = run_json(runner, ["deterministic", "s4"])
    assert data["count"] == 24


def test_idempotent_classify_and_support(runner):
    pal = json.dumps({"kind": "mix", "terms": [
        {"w": 0.25, "state": {"kind": "character", "perm": [1, 2, 3, 4]}},
        {"w": 0.25, "state": {"kind": "character", "perm": [2, 1, 4, 3]}},
        {"w": 0.5, "state": {"kind": "vector",
                             "coords": [[0, 0]] * 4 + [[1, 0], [0, 0]]}},
    ]})
    data = run_json(runner, ["idempotent-classify", "kac_paljutkin", pal])
    assert data["classification"] == "non-haar-idempotent"
    vec = json.dumps({"kind": "vector", "coords": [[0, 0]] * 4 + [[1, 0], [0, 0]]})
    support = run_json(runner, ["support", "kac_paljutkin", vec])
    assert support["value"] == pytest.approx(1.0, abs=1e-9)
    assert support["ambientTrace"] == pytest.approx(1.0, abs=1e-8)


def test_orbitals_command(runner):
    data = run_json(runner, ["orbitals", "kac_paljutkin", "--k", "1"])
    assert data["classes"] == [[[1], [2], [3], [4]]]
    report = run_json(runner, ["orbitals", "kac_paljutkin", "--k", "3"])
    assert report["transitive"] is False
    assert [[3, 1, 4], [1, 3, 1], [4, 1, 4]] in report["witnesses"]


def test_seq_prob(runner):
    cond = json.dumps({"kind": "conditioned",
                       "base": {"kind": "vector",
                                "coords": [[0, 0]] * 4 + [[1, 0], [0, 0]]},
                       "events": [[4, 1]]})
    data = run_json(runner, ["seq-prob", "kac_paljutkin", cond, "4,1", "1,3", "3,1"])
    assert data["probability"] == pytest.approx(0.25, abs=1e-9)


def test_sample_deterministic_given_seed(runner):
    args = ["sample", "kac_paljutkin", "haar", "--shots", "50",
            "--seed", "5", "--positions", "1,3"]
    first = run_json(runner, args)
    second = run_json(runner, args)
    assert first == second
    total = sum(row["count"] for row in first["frequencies"])
    assert total == 50


def test_measure_loop_scriptable(runner):
    result = runner.invoke(main, ["measure", "kac_paljutkin", "haar", "--seed", "7"],
                           input="1\n3\n1\nq\n")
    assert result.exit_code == 0
    assert "position 1 -> outcome" in result.output
    assert "history:" in result.output


def test_rewrite_command(runner):
    data = run_json(runner, ["rewrite", "--n", "3", "u[1,1]u[2,2] == u[2,2]u[1,1]"])
    assert data["status"] == "proved"
    assert len(data["trace"]) > 0
    unknown = runner.invoke(main, ["rewrite", "--n", "4", "--depth", "6",
                                   "u[1,1]u[2,2] == u[2,2]u[1,1]"])
    assert unknown.exit_code == 1
    assert "Unknown" in unknown.output


def test_group_spec_from_file(runner, tmp_path):
    path = tmp_path / "group.json"
    path.write_text(json.dumps({"kind": "symmetric", "n": 3}))
    data = run_json(runner, ["info", f"@{path}"])
    assert data["algebraDim"] == 6


def test_domain_error_exit_code(runner):
    result = runner.invoke(main, ["info", "no-such-group"])
    assert result.exit_code == 1
    usage = runner.invoke(main, ["orbitals", "kac_paljutkin", "--k", "9"])
    assert usage.exit_code == 2


def test_measure_loop_flags_non_classical_reflip(runner):
    # seed 7 with flips 3,1,2,1,3 revisits position 3 with a changed face
    result = runner.invoke(main, ["measure", "kac_paljutkin", "haar", "--seed", "7"],
                           input="3\n1\n2\n1\n3\nq\n")
    assert result.exit_code == 0
    assert "NON-CLASSICAL" in result.output
