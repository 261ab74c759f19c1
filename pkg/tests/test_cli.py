"""Command line driver: exit codes, JSON payloads, table output.

All invocations go through main(argv) in-process so the tests can pin
the exit code contract: 0 on a completed run, 2 on any precondition
violation (bad files, bad flags, infeasible points), 3 when a size cap
stops the computation.
"""

import json
from pathlib import Path

import pytest

from polystat import cli
from polystat import stationarity as st
from polystat.problems import build_example

INSTANCES = Path(__file__).resolve().parent.parent / "instances"

EXAMPLE_A = str(INSTANCES / "example_a.json")
EXAMPLE_B = str(INSTANCES / "example_b.json")
CCMP = str(INSTANCES / "ccmp_2_1.json")
BILEVEL = str(INSTANCES / "bilevel_toy.json")
EMOP = str(INSTANCES / "emop_square.json")


def _run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _run_json(capsys, *argv):
    code, out, err = _run(capsys, *argv, "--json")
    assert code == 0, err
    return json.loads(out)


def test_check_implicit_at_minimizer(capsys):
    code, out, err = _run(
        capsys, "check", "--problem", EXAMPLE_A,
        "--point", "-1", "--kind", "implicit",
    )
    assert code == 0, err
    assert "holds: yes" in out
    assert "nu=(1)" in out


def test_check_json_round_trips_and_reverifies(capsys):
    payload = _run_json(
        capsys, "check", "--problem", EXAMPLE_A,
        "--point", "-1", "--kind", "implicit",
    )
    verdict = st.verdict_from_json(payload)
    assert verdict.holds
    prog = build_example("a")
    derived = st.build_derived(prog)
    assert st.reverify_stationarity(prog, derived, (-1,), verdict)


def test_check_sweep_report_lists_strata(capsys):
    payload = _run_json(
        capsys, "check", "--problem", EXAMPLE_A,
        "--point", "0", "--kind", "explicit",
    )
    assert payload["exists_holds"] is True
    assert payload["forall_holds"] is False
    assert len(payload["per_stratum"]) == 2


def test_seed_is_echoed_first(capsys):
    code, out, err = _run(
        capsys, "check", "--problem", EXAMPLE_A,
        "--point", "-1", "--kind", "implicit", "--seed", "7",
    )
    assert code == 0
    assert out.splitlines()[0] == "seed: 7"


def test_negative_point_both_spellings(capsys):
    code1, _, _ = _run(
        capsys, "check", "--problem", EXAMPLE_A, "--point", "-1", "--kind", "implicit"
    )
    code2, _, _ = _run(
        capsys, "check", "--problem", EXAMPLE_A, "--point=-1", "--kind", "implicit"
    )
    assert code1 == code2 == 0
    code3, _, _ = _run(
        capsys, "coderiv", "--problem", EXAMPLE_A, "--point", "-1,0"
    )
    assert code3 == 0


def test_infeasible_point_exits_2(capsys):
    code, _, err = _run(
        capsys, "check", "--problem", EXAMPLE_A,
        "--point", "-2", "--kind", "implicit",
    )
    assert code == 2
    assert "precondition" in err


def test_unknown_kind_exits_2(capsys):
    code, _, err = _run(
        capsys, "check", "--problem", EXAMPLE_A,
        "--point", "-1", "--kind", "mystic",
    )
    assert code == 2


def test_lambda_on_multiplier_free_kind_exits_2(capsys):
    code, _, err = _run(
        capsys, "check", "--problem", EXAMPLE_A,
        "--point", "-1", "--kind", "mordukhovich_i", "--lambda", "1",
    )
    assert code == 2
    assert "no multiplier" in err


def test_malformed_file_exits_2_with_position(capsys, tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text('{"type": "example_a",}')
    code, _, err = _run(
        capsys, "check", "--problem", str(bad),
        "--point", "-1", "--kind", "implicit",
    )
    assert code == 2
    assert "line" in err


def test_unknown_instance_field_exits_2(capsys, tmp_path):
    bad = tmp_path / "extra.json"
    bad.write_text('{"type": "example_a", "color": "blue"}')
    code, _, err = _run(
        capsys, "check", "--problem", str(bad),
        "--point", "-1", "--kind", "implicit",
    )
    assert code == 2
    assert "color" in err


def test_relate_bad_box_exits_2(capsys):
    code, _, err = _run(
        capsys, "relate", "--problem", EXAMPLE_A, "--box", "3..-3",
    )
    assert code == 2


def test_resource_cap_exits_3(capsys, tmp_path):
    big = tmp_path / "ccmp4.json"
    big.write_text(json.dumps({
        "type": "ccmp", "n": 4, "kappa": 1,
        "objective": {"kind": "affine", "c": ["1", "1", "1", "1"], "c0": "0"},
    }))
    code, _, err = _run(
        capsys, "check", "--problem", str(big),
        "--point", "0,0,0,0", "--kind", "mordukhovich_i",
    )
    assert code == 3
    assert "resource limit" in err


def test_oracle_only_instances_reject_engine_commands(capsys):
    for argv in (
        ["check", "--problem", EXAMPLE_B, "--point", "-1", "--kind", "implicit"],
        ["cones", "--problem", EXAMPLE_B, "--point", "-1"],
        ["coderiv", "--problem", EXAMPLE_B, "--point", "-1,1"],
        ["pipeline", "--problem", EXAMPLE_B, "--point", "-1"],
        ["crosscheck", "--problem", EXAMPLE_B],
    ):
        code, _, err = _run(capsys, *argv)
        assert code == 2, argv
        assert "oracle-only" in err or "cardinality" in err


def test_pipeline_reports_branches(capsys):
    payload = _run_json(
        capsys, "pipeline", "--problem", EXAMPLE_A, "--point", "0",
    )
    assert payload["stationarity"]["implicit"]["holds"] is True
    assert payload["stationarity"]["fuzzy"]["forall_holds"] is False
    assert all(b["certified"] for b in payload["branches"])


def test_cones_on_cardinality_set(capsys):
    payload = _run_json(
        capsys, "cones", "--problem", CCMP, "--point", "0,0",
    )
    assert payload["set"] == "sparsity-set"
    assert len(payload["normal"]["pieces"]) == 2
    code, out, err = _run(capsys, "cones", "--problem", CCMP, "--point", "0,0")
    assert code == 0
    assert "tangent cone" in out and "limiting normal cone" in out


def test_cones_off_the_set_exits_2(capsys):
    code, _, err = _run(capsys, "cones", "--problem", CCMP, "--point", "1,1")
    assert code == 2


def test_coderiv_reports_adjoint_graph(capsys):
    payload = _run_json(
        capsys, "coderiv", "--problem", EXAMPLE_A, "--point", "-1,0",
    )
    assert payload["n_in"] == 1 and payload["n_out"] == 1
    assert payload["graph"]["dim"] == 2
    code, _, err = _run(
        capsys, "coderiv", "--problem", EXAMPLE_A, "--point", "0,-2",
    )
    assert code == 2
    assert "graph" in err


def test_crosscheck_sweeps_by_default(capsys):
    payload = _run_json(capsys, "crosscheck", "--problem", CCMP)
    assert payload["all_ok"] is True
    assert len(payload["points"]) == 5
    assert all(row["ok"] for row in payload["points"])


def test_crosscheck_single_point(capsys):
    payload = _run_json(
        capsys, "crosscheck", "--problem", CCMP, "--point", "-1,0",
    )
    assert payload["all_ok"] is True
    assert len(payload["points"]) == 1
    row = payload["points"][0]
    assert row["cone_match"] and row["multiplier_match"]


def test_crosscheck_needs_cardinality_instance(capsys):
    code, _, err = _run(capsys, "crosscheck", "--problem", BILEVEL)
    assert code == 2


def test_relate_finds_the_counterexample_pairs(capsys):
    payload = _run_json(capsys, "relate", "--problem", EXAMPLE_B)
    lifted = {tuple(r["point"]) for r in payload["lifted"]["points"] if r["local_min"]}
    assert ("-1", "1") in lifted
    assert {"z": ["0"], "lambda": ["0"]} in payload["gaps"]
    assert payload["descent"]["holds"] is True


def test_relate_table_mentions_defaults(capsys):
    code, out, err = _run(capsys, "relate", "--problem", EXAMPLE_A, "--seed", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "seed: 3"
    assert any("box" in ln for ln in lines)


def test_emop_instance_loads_via_cli(capsys):
    payload = _run_json(capsys, "cones", "--problem", EMOP, "--point", "0,0")
    assert payload["set"] == "vector-feasible-set"
    code, _, err = _run(capsys, "cones", "--problem", EMOP, "--point", "2,2")
    assert code == 2
