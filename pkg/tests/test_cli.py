"""End-to-end tests of the command-line driver and its exit-code contract."""

import json

import pytest

from qeuclid.cli import (
    EXIT_CAPACITY,
    EXIT_CHECK_FAILURE,
    EXIT_DOMAIN,
    EXIT_OPERATOR_MISUSE,
    EXIT_PASS,
    EXIT_USAGE,
    main,
)
from qeuclid.core import BasisIndex, DeformationParams
from qeuclid.lattice import LatticeState, load_state, save_state
from qeuclid.operators import apply
from qeuclid.verify import SUITE_NAMES


class TestVerifyCommand:
    def test_default_configuration_passes(self, tmp_path, capsys):
        code = main(["verify", "--output-dir", str(tmp_path)])
        out = capsys.readouterr().out
        assert code == EXIT_PASS
        assert "all suites pass" in out
        for name in SUITE_NAMES:
            path = tmp_path / f"{name}.json"
            assert path.is_file(), name
            doc = json.loads(path.read_text())
            assert doc["suite"] == name
            assert doc["pass"] is True
        assert len(list(tmp_path.iterdir())) == len(SUITE_NAMES)

    def test_reports_are_byte_identical_across_runs(self, tmp_path):
        dir_a = tmp_path / "a"
        dir_b = tmp_path / "b"
        assert main(["verify", "--q", "2.0", "--output-dir", str(dir_a)]) == EXIT_PASS
        assert main(["verify", "--q", "2.0", "--output-dir", str(dir_b)]) == EXIT_PASS
        for name in SUITE_NAMES:
            assert (dir_a / f"{name}.json").read_bytes() == (
                dir_b / f"{name}.json"
            ).read_bytes()

    def test_degenerate_q_is_a_usage_error(self, tmp_path):
        code = main(["verify", "--q", "1.0", "--output-dir", str(tmp_path)])
        assert code == EXIT_USAGE

    def test_malformed_window_is_a_usage_error(self, tmp_path):
        code = main(["verify", "--window", "nope", "--output-dir", str(tmp_path)])
        assert code == EXIT_USAGE

    def test_wrong_ladder_phase_fails(self, tmp_path, capsys):
        code = main(
            ["verify", "--theta-phase", "+1", "--output-dir", str(tmp_path)]
        )
        out = capsys.readouterr().out
        assert code == EXIT_CHECK_FAILURE
        assert "FAIL" in out
        doc = json.loads((tmp_path / "tensor.json").read_text())
        assert doc["pass"] is False

    def test_capacity_cap_is_enforced(self, tmp_path, capsys):
        code = main(
            ["verify", "--capacity", "10", "--output-dir", str(tmp_path)]
        )
        assert code == EXIT_CAPACITY
        assert "exceeding the cap" in capsys.readouterr().err


class TestSpectrumCommand:
    def test_coordinate_spectrum_csv(self, capsys):
        code = main(["spectrum", "X3", "--q", "2.0", "--window", "0:0,0,0"])
        out = capsys.readouterr().out
        assert code == EXIT_PASS
        lines = out.splitlines()
        assert lines[0] == "M,sigma,mt,m,eigenvalue"
        assert lines[1] == "0,1,0,0,2.0"
        assert lines[2] == "0,-1,0,0,-2.0"

    def test_polar_spectrum_values(self, capsys):
        code = main(["spectrum", "t3", "--q", "2.0", "--window", "0:0,-1,0"])
        out = capsys.readouterr().out
        assert code == EXIT_PASS
        values = sorted({float(line.rsplit(",", 1)[1]) for line in out.splitlines()[1:]})
        assert values == pytest.approx([10.0 / 3.0, 65.0 / 1.5])

    def test_non_diagonal_operator_is_misuse(self, capsys):
        code = main(["spectrum", "Kplus"])
        assert code == EXIT_OPERATOR_MISUSE
        assert "not diagonal" in capsys.readouterr().err

    def test_unknown_operator_is_misuse(self, capsys):
        code = main(["spectrum", "Xbogus"])
        assert code == EXIT_OPERATOR_MISUSE
        assert "catalogue" in capsys.readouterr().err

    def test_json_format_and_output_file(self, tmp_path, capsys):
        out_file = tmp_path / "spec.json"
        code = main(
            [
                "spectrum",
                "tau_k",
                "--q",
                "2.0",
                "--window",
                "0:0,0,1",
                "--format",
                "json",
                "--output",
                str(out_file),
            ]
        )
        assert code == EXIT_PASS
        rows = json.loads(out_file.read_text())
        assert {row["eigenvalue"] for row in rows} == {-0.25, -0.015625}

    def test_output_is_stable_across_runs(self, capsys):
        main(["spectrum", "R2", "--q", "1.5", "--window", "-1:1,0,0"])
        first = capsys.readouterr().out
        main(["spectrum", "R2", "--q", "1.5", "--window", "-1:1,0,0"])
        assert capsys.readouterr().out == first


class TestLimitCommand:
    def test_diagonal_coordinate_is_exactly_classical(self, capsys):
        code = main(["limit", "X3", "X3_cl", "--h", "0.1"])
        out = capsys.readouterr().out
        assert code == EXIT_PASS
        assert "error identically zero" in out

    @pytest.mark.parametrize(
        "deformed, classical",
        [("Torb3", "L3"), ("Torb+", "L+"), ("Torb-", "L-")],
    )
    def test_orbital_family_slopes_in_band(self, deformed, classical, capsys):
        code = main(["limit", deformed, classical])
        out = capsys.readouterr().out
        assert code == EXIT_PASS
        assert "fitted log-log slope" in out

    def test_wrong_phase_has_no_limit(self, capsys):
        code = main(
            ["limit", "Torb+", "L+", "--theta-phase", "+1", "--h", "0.1,0.05"]
        )
        out = capsys.readouterr().out
        assert code == EXIT_CHECK_FAILURE
        assert "no classical limit at this phase" in out

    def test_infeasible_grid_is_a_domain_error(self, capsys):
        code = main(["limit", "t-", "L-", "--h", "3.0"])
        assert code == EXIT_DOMAIN
        assert "no feasible xi interval" in capsys.readouterr().err

    def test_csv_output_file(self, tmp_path, capsys):
        out_file = tmp_path / "limit.csv"
        code = main(
            ["limit", "Torb3", "L3", "--h", "0.05,0.025", "--output", str(out_file)]
        )
        assert code == EXIT_PASS
        lines = out_file.read_text().splitlines()
        assert lines[0] == "h,error,slope"
        assert len(lines) == 3

    def test_empty_mode_range_is_a_usage_error(self):
        assert main(["limit", "Torb3", "L3", "--modes", "3:-3"]) == EXIT_USAGE

    def test_nonpositive_h_is_a_usage_error(self):
        assert main(["limit", "Torb3", "L3", "--h", "0.1,-0.1"]) == EXIT_USAGE


class TestApplyCommand:
    def test_round_trip_matches_library_action(self, tmp_path):
        p = DeformationParams(q=2.0)
        state = LatticeState(
            {BasisIndex(0, 1, -1, 0): 1.0, BasisIndex(0, -1, -2, 1): 0.5j}
        )
        src = tmp_path / "in.txt"
        dst = tmp_path / "out.txt"
        save_state(str(src), state)
        code = main(
            ["apply", "Torb+", "--q", "2.0", "--input", str(src), "--output", str(dst)]
        )
        assert code == EXIT_PASS
        assert load_state(str(dst)) == apply("Torbplus", state, p)

    def test_missing_input_is_a_usage_error(self, tmp_path, capsys):
        code = main(
            [
                "apply",
                "X3",
                "--input",
                str(tmp_path / "absent.txt"),
                "--output",
                str(tmp_path / "out.txt"),
            ]
        )
        assert code == EXIT_USAGE

    def test_malformed_state_file_is_a_usage_error(self, tmp_path, capsys):
        src = tmp_path / "in.txt"
        src.write_text("0 +1 0 0 1.0\n")
        code = main(
            ["apply", "X3", "--input", str(src), "--output", str(tmp_path / "o.txt")]
        )
        assert code == EXIT_USAGE
        assert "expected" in capsys.readouterr().err

    def test_unknown_operator_is_misuse(self, tmp_path):
        src = tmp_path / "in.txt"
        save_state(str(src), LatticeState.basis_state(BasisIndex(0, 1, 0, 0)))
        code = main(
            ["apply", "Qfoo", "--input", str(src), "--output", str(tmp_path / "o.txt")]
        )
        assert code == EXIT_OPERATOR_MISUSE


class TestMatrixCommand:
    def test_dump_and_summary(self, tmp_path, capsys):
        out_file = tmp_path / "mat.txt"
        code = main(
            [
                "matrix",
                "Kplus",
                "--q",
                "2.0",
                "--window",
                "0:0,-1,1",
                "--output",
                str(out_file),
            ]
        )
        out = capsys.readouterr().out
        assert code == EXIT_PASS
        assert "8x8" in out
        lines = out_file.read_text().splitlines()
        assert lines[0] == "# row col re im"
        assert len(lines) > 1

    def test_capacity_override(self, tmp_path, capsys):
        code = main(
            [
                "matrix",
                "X3",
                "--window",
                "0:0,-3,3",
                "--capacity",
                "8",
                "--output",
                str(tmp_path / "m.txt"),
            ]
        )
        assert code == EXIT_CAPACITY


class TestUsageErrors:
    def test_no_subcommand(self):
        assert main([]) == EXIT_USAGE

    def test_unknown_subcommand(self):
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_bad_theta_phase(self):
        assert main(["verify", "--theta-phase", "maybe"]) == EXIT_USAGE
