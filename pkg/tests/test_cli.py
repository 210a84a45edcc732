import csv
import io
import json

import pytest

from forestkit import cli
from forestkit.forests import phi


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


# -- exit codes ----------------------------------------------------------------


def test_count_forests_k4(capsys):
    code, out, _ = run_cli(capsys, "count-forests", "--k", "4")
    assert code == 0
    rows = parse_csv(out)
    assert [int(r["phi"]) for r in rows] == [phi(4, ell) for ell in range(1, 5)]
    # exact integers as decimal strings, never floats
    assert all("." not in r["phi"] for r in rows)


def test_count_forests_huge_k_stays_exact(capsys):
    code, out, _ = run_cli(capsys, "count-forests", "--k", "80", "--ell", "3")
    assert code == 0
    rows = parse_csv(out)
    assert int(rows[0]["phi"]) == phi(80, 3)  # round-trips as a bigint


def test_count_forests_bad_k(capsys):
    code, _, err = run_cli(capsys, "count-forests", "--k", "0")
    assert code == 2
    assert "error" in err


def test_count_forests_bad_p(capsys):
    assert run_cli(capsys, "count-forests", "--k", "4", "--p", "1.5")[0] == 2
    assert run_cli(capsys, "count-forests", "--k", "4", "--p", "zebra")[0] == 2


def test_solve_missing_file_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "solve", "--mode", "tree", "--graph", "missing.txt")
    assert code == 2
    assert "missing.txt" in err


def test_unknown_flag_is_error():
    with pytest.raises(SystemExit) as exc:
        cli.main(["count-forests", "--k", "4", "--bogus"])
    assert exc.value.code == 2


def test_verify_inequalities_ok(capsys):
    code, out, _ = run_cli(capsys, "verify-inequalities", "--kmax", "30")
    assert code == 0
    payload = json.loads(out)
    assert payload["violations_total"] == 0
    assert {r["name"] for r in payload["reports"]} == {
        "stirling_sandwich",
        "f_upper_bound",
        "convexity_integral_bound",
        "sum_f_bound",
    }


def test_solve_round_trip(tmp_path, capsys):
    path = tmp_path / "c5.txt"
    path.write_text("5 5\n0 1\n1 2\n2 3\n3 4\n0 4\n")
    code, out, _ = run_cli(capsys, "solve", "--mode", "forest", "--graph", str(path))
    assert code == 0
    payload = json.loads(out)
    assert payload["size"] == 4
    assert payload["status"] == "complete"
    assert len(payload["witness"]) == 4


def test_solve_budget_exhaustion_exit_code(tmp_path, capsys):
    from forestkit.graph import GnpParams, format_graph_text, sample_gnp

    path = tmp_path / "dense.txt"
    path.write_text(format_graph_text(sample_gnp(GnpParams(60, 0.5, 3))))
    code, out, _ = run_cli(capsys, "solve", "--mode", "forest", "--graph", str(path), "--budget", "50")
    assert code == 3
    assert json.loads(out)["status"] == "incomplete"


def test_expectation_csv_and_json(capsys):
    code, out, _ = run_cli(capsys, "expectation", "--n", "1000", "--p", "0.5")
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == int(rows[0]["K"])
    code, out, _ = run_cli(capsys, "expectation", "--n", "1000", "--p", "0.5", "--format", "json")
    payload = json.loads(out)
    assert payload["ratio"] == pytest.approx(payload["ratio_direct"], rel=1e-9)


def test_expectation_bad_K(capsys):
    assert run_cli(capsys, "expectation", "--n", "10", "--p", "0.5", "--K", "50")[0] == 2


def test_concentration_points_output(capsys):
    code, out, _ = run_cli(capsys, "concentration-points", "--n", "100", "--p", "0.5")
    assert code == 0
    row = parse_csv(out)[0]
    assert (int(row["k_low"]), int(row["k_high"])) == (16, 17)


def test_simulate_and_report_round_trip(tmp_path, capsys):
    out_csv = tmp_path / "rec.csv"
    cfg = tmp_path / "exp.toml"
    cfg.write_text(
        "n_list = [15]\n"
        'p_list = ["0.5"]\n'
        "trials = 3\n"
        "base_seed = 11\n"
        f'output = "{out_csv}"\n'
    )
    code, out, _ = run_cli(capsys, "simulate", "--config", str(cfg), "--verify")
    assert code == 0
    assert json.loads(out)[0]["trials"] == 3
    code, out, _ = run_cli(capsys, "report", "--records", str(out_csv), "--eps-grid", "0,1")
    assert code == 0
    payload = json.loads(out)
    assert payload["cells"][0]["trials"] == 3
    assert len(payload["epsilon_sweep"]) == 2


def test_simulate_missing_config(capsys):
    assert run_cli(capsys, "simulate", "--config", "no-such.toml")[0] == 2


def test_report_missing_records(capsys):
    assert run_cli(capsys, "report", "--records", "no-such.csv")[0] == 2


# -- help reflection: every registered flag appears in --help --------------------


def iter_subparsers(parser):
    for action in parser._actions:
        if hasattr(action, "choices") and isinstance(action.choices, dict):
            yield from action.choices.items()


def test_help_documents_every_flag(capsys):
    parser = cli.build_parser()
    for name, sub in iter_subparsers(parser):
        with pytest.raises(SystemExit) as exc:
            cli.main([name, "--help"])
        assert exc.value.code == 0
        help_text = capsys.readouterr().out
        for action in sub._actions:
            for opt in action.option_strings:
                assert opt in help_text, (name, opt)
            assert action.help, (name, action.option_strings)  # every flag has help text
