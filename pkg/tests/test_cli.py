import io
import json
import os

import pytest

from mdlie import __version__, cli, exactlin
from mdlie.cli import (
    EXIT_OK,
    EXIT_PROVEN_FAILURE,
    EXIT_USAGE,
    UsageError,
    main,
    parse_expression,
)
from mdlie.exactlin import ModularRankDisagreement, ModularRankWarning
from mdlie.liealg import sigma_bar_poly, sigma_bar_word
from mdlie.tasaka import (
    BUILD_STATS,
    PeriodSpanError,
    StrayMonomialError,
    clear_caches,
)


@pytest.fixture
def run(tmp_path):
    cache_dir = str(tmp_path / "cache")

    def _run(*argv):
        out = io.StringIO()
        status = main(list(argv) + ["--cache-dir", cache_dir], out=out)
        return status, out.getvalue()

    _run.cache_dir = cache_dir
    return _run


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_command_required(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == EXIT_USAGE


class TestMatrix:
    def test_json(self, run):
        status, output = run("matrix", "--kind", "E", "-N", "12", "-r", "2", "--format", "json")
        assert status == EXIT_OK
        data = json.loads(output)
        assert data["kind"] == "E"
        assert data["row_index"] == [[3, 9], [5, 7], [7, 5], [9, 3]]
        assert data["entries"][-4:] == ["-27/1", "-42/1", "42/1", "28/1"]

    def test_table(self, run):
        status, output = run("matrix", "--kind", "C", "-N", "6", "-r", "2")
        assert status == EXIT_OK
        lines = output.splitlines()
        assert lines[0].split() == ["3,3"]
        assert lines[1].split() == ["3,3", "1/1"]

    def test_eta_tilde(self, run):
        status, output = run(
            "matrix", "--kind", "EtaTilde", "-N", "12", "-r", "2", "--format", "json"
        )
        assert status == EXIT_OK
        assert json.loads(output)["entries"][:4] == ["1/1", "0/1", "0/1", "0/1"]

    def test_bad_level(self, run, capsys):
        with pytest.raises(SystemExit) as excinfo:
            run("matrix", "-N", "15", "-r", "3", "--level", "4")
        assert excinfo.value.code == EXIT_USAGE
        assert "level" in capsys.readouterr().err

    def test_missing_weight(self, run, capsys):
        with pytest.raises(SystemExit) as excinfo:
            run("matrix", "-r", "2")
        assert excinfo.value.code == EXIT_USAGE
        assert "--weight" in capsys.readouterr().err

    def test_unsupported_format(self, run):
        with pytest.raises(SystemExit) as excinfo:
            run("matrix", "-N", "12", "-r", "2", "--format", "csv")
        assert excinfo.value.code == EXIT_USAGE

    def test_corrupt_cache(self, run, capsys):
        run("matrix", "-N", "12", "-r", "2")
        for name in os.listdir(run.cache_dir):
            with open(os.path.join(run.cache_dir, name), "w", encoding="utf-8") as fp:
                fp.write("{")
        status, _ = run("matrix", "-N", "12", "-r", "2")
        assert status == EXIT_PROVEN_FAILURE
        assert "unreadable" in capsys.readouterr().err


class TestRank:
    def test_single(self, run):
        status, output = run("rank", "-N", "12", "-r", "2")
        assert status == EXIT_OK
        assert output == "rank C_12,2 = 3 (size 4, exact)\n"

    def test_single_json(self, run):
        _, output = run("rank", "-N", "15", "-r", "3", "--format", "json")
        data = json.loads(output)
        assert (data["rank"], data["size"], data["method"]) == (8, 10, "exact")

    def test_empty_cell(self, run):
        _, output = run("rank", "-N", "11", "-r", "2")
        assert output == "rank C_11,2 = 0 (size 0, exact)\n"

    def test_modular_verified(self, run):
        _, output = run(
            "rank", "-N", "15", "-r", "3", "--mode", "modular", "--verify", "--format", "json"
        )
        data = json.loads(output)
        assert data["rank"] == 8
        assert len(data["primes"]) == 3

    def test_table_csv(self, run):
        status, output = run("rank", "--weight-max", "15", "--depth-max", "3", "--format", "csv")
        assert status == EXIT_OK
        lines = output.splitlines()
        assert lines[0] == "N,r,size,rank,method,status"
        assert "15,3,10,8,exact,equal" in lines

    def test_cached_rerun(self, run):
        _, first = run("rank", "--weight-max", "12", "--depth-max", "2", "--format", "json")
        entries = len(os.listdir(run.cache_dir))
        _, second = run("rank", "--weight-max", "12", "--depth-max", "2", "--format", "json")
        assert first == second
        assert len(os.listdir(run.cache_dir)) == entries

    def test_warm_verify_runs_exact_check(self, run, monkeypatch):
        argv = ("rank", "-N", "15", "-r", "3", "--mode", "modular", "--format", "json")
        with pytest.warns(ModularRankWarning):
            _, cold = run(*argv)
        assert json.loads(cold)["verified"] is False

        calls = []
        original = exactlin.rank_exact

        def counting(m):
            calls.append(m.rows)
            return original(m)

        monkeypatch.setattr(exactlin, "rank_exact", counting)
        _, warm = run(*argv, "--verify")
        assert 10 in calls
        data = json.loads(warm)
        assert data["verified"] is True
        assert data["rank"] == 8

    def test_needs_cell_or_range(self, run):
        with pytest.raises(SystemExit) as excinfo:
            run("rank", "-N", "12")
        assert excinfo.value.code == EXIT_USAGE


class TestBasis:
    def test_period(self, run):
        _, output = run("basis", "period", "-N", "12", "--format", "json")
        data = json.loads(output)
        assert data["basis"] == [{"8,2": "1/1", "6,4": "-3/1", "4,6": "3/1", "2,8": "-1/1"}]

    def test_period_empty(self, run):
        _, output = run("basis", "period", "-N", "14")
        assert output == "(empty basis)\n"

    def test_kernel(self, run):
        _, output = run("basis", "kernel", "--kind", "C", "-N", "12", "-r", "2", "--format", "json")
        data = json.loads(output)
        assert data["basis"] == [{"3,9": "1/1", "5,7": "-3/1", "7,5": "3/1", "9,3": "-1/1"}]

    def test_w(self, run):
        _, output = run("basis", "w", "-N", "12", "-r", "2", "--format", "json")
        assert len(json.loads(output)["basis"]) == 1

    def test_w_needs_depth(self, run):
        with pytest.raises(SystemExit) as excinfo:
            run("basis", "w", "-N", "12")
        assert excinfo.value.code == EXIT_USAGE


class TestVerify:
    def test_tasaka(self, run, tmp_path):
        report_path = str(tmp_path / "tasaka.json")
        status, output = run(
            "verify", "tasaka", "-r", "3", "--weight-max", "15", "--report", report_path
        )
        assert status == EXIT_OK
        assert output.startswith("tasaka (N <= 15, r <= 3)")
        with open(report_path, encoding="utf-8") as fp:
            data = json.load(fp)
        assert data["title"] == "tasaka"
        assert data["counts"]["FAIL"] == 0

    def test_report_is_deterministic(self, run):
        argv = ("verify", "brown", "--weight-max", "15", "--depth-max", "3", "--format", "json")
        _, first = run(*argv)
        _, second = run(*argv)
        assert first == second

    def test_recurrence(self, run):
        status, output = run(
            "verify", "recurrence", "--weight-max", "16", "--depth-max", "3", "--format", "json"
        )
        assert status == EXIT_OK
        assert json.loads(output)["counts"]["FAIL"] == 0

    @pytest.mark.parametrize("check", ["decomposition", "crosscheck"])
    def test_other_checks(self, run, check):
        status, _ = run("verify", check, "--weight-max", "13", "--depth-max", "3")
        assert status == EXIT_OK

    @pytest.mark.parametrize(
        "argv",
        [
            ("verify", "tasaka", "-r", "3", "--weight-max", "15"),
            ("verify", "brown", "--weight-max", "17", "--depth-max", "3"),
            ("verify", "recurrence", "--weight-max", "17", "--depth-max", "3"),
            ("verify", "decomposition", "--weight-max", "17", "--depth-max", "3"),
            ("verify", "crosscheck", "--weight-max", "15", "--depth-max", "3"),
        ],
        ids=lambda argv: argv[1],
    )
    def test_warm_run_builds_nothing(self, run, argv):
        clear_caches()
        _, cold = run(*argv, "--format", "json")
        clear_caches()
        BUILD_STATS.clear()
        _, warm = run(*argv, "--format", "json")
        assert sum(BUILD_STATS.values()) == 0
        assert warm == cold

    @pytest.mark.parametrize(
        "argv",
        [
            ["verify", "brown", "--weight-max", "17", "--depth-max", "3"],
            ["verify", "tasaka", "-r", "3", "--weight-max", "17"],
        ],
        ids=["brown", "tasaka"],
    )
    def test_separate_cold_runs_are_identical(self, tmp_path, argv):
        outputs = []
        for name in ("first", "second"):
            clear_caches()
            report_path = str(tmp_path / f"{name}.json")
            out = io.StringIO()
            status = main(
                argv
                + ["--format", "json", "--report", report_path]
                + ["--cache-dir", str(tmp_path / name)],
                out=out,
            )
            assert status == EXIT_OK
            with open(report_path, "rb") as fp:
                outputs.append((out.getvalue(), fp.read()))
        assert outputs[0] == outputs[1]

    def test_tasaka_needs_depth(self, run):
        with pytest.raises(SystemExit) as excinfo:
            run("verify", "tasaka", "--weight-max", "15")
        assert excinfo.value.code == EXIT_USAGE

    def test_tasaka_depth_one(self, run):
        with pytest.raises(SystemExit) as excinfo:
            run("verify", "tasaka", "-r", "1", "--weight-max", "15")
        assert excinfo.value.code == EXIT_USAGE


class TestExitStatus:
    def test_ok(self, run):
        status, _ = run("basis", "period", "-N", "12")
        assert status == EXIT_OK

    @pytest.mark.parametrize(
        "error", [PeriodSpanError, StrayMonomialError, ModularRankDisagreement]
    )
    def test_proven_failure(self, run, monkeypatch, capsys, error):
        def broken(N):
            raise error("solution leaves the span")

        monkeypatch.setattr(cli, "period_basis", broken)
        status, _ = run("basis", "period", "-N", "12")
        assert status == EXIT_PROVEN_FAILURE
        assert "solution leaves the span" in capsys.readouterr().err

    def test_usage(self, run):
        with pytest.raises(SystemExit) as excinfo:
            run("basis", "period")
        assert excinfo.value.code == EXIT_USAGE


@pytest.mark.parametrize(
    "command", ["matrix", "rank", "basis", "verify", "hilbert", "bracket", "compose"]
)
def test_help_names_anchor(capsys, command):
    with pytest.raises(SystemExit) as excinfo:
        main([command, "--help"])
    assert excinfo.value.code == 0
    assert "Anchor:" in capsys.readouterr().out


class TestHilbert:
    def test_csv(self, run):
        _, output = run("hilbert", "--weight-max", "15", "--depth-max", "3", "--format", "csv")
        lines = output.splitlines()
        assert lines[0] == "N,r,coefficient"
        assert "12,2,3" in lines
        assert "15,3,8" in lines

    def test_json(self, run):
        _, output = run("hilbert", "--weight-max", "6", "--depth-max", "2", "--format", "json")
        assert json.loads(output) == [
            {"weight": 3, "depth": 1, "coefficient": "1/1"},
            {"weight": 5, "depth": 1, "coefficient": "1/1"},
            {"weight": 6, "depth": 2, "coefficient": "1/1"},
        ]

    def test_table(self, run):
        _, output = run("hilbert", "--weight-max", "6", "--depth-max", "2")
        assert output == "x^3 y^1: 1\nx^5 y^1: 1\nx^6 y^2: 1\n"


class TestBracket:
    def test_dg_relation(self, run):
        status, output = run("bracket", "--kind", "dg", "{s3,s9} - 3*{s5,s7}")
        assert status == EXIT_OK
        assert output == "0\n"

    def test_ihara_leading_depth(self, run):
        _, output = run("bracket", "{s3,s9} - 3*{s5,s7}", "-r", "2")
        assert output == "0\n"

    def test_json(self, run):
        _, output = run("bracket", "--kind", "dg", "{s3,s5}", "--format", "json")
        data = json.loads(output)
        assert data["depth"] == 2
        assert data["terms"]

    def test_syntax_error(self, run, capsys):
        with pytest.raises(SystemExit) as excinfo:
            run("bracket", "{s3,s5")
        assert excinfo.value.code == EXIT_USAGE
        assert "expected" in capsys.readouterr().err


class TestCompose:
    def test_single(self, run):
        _, output = run("compose", "3", "--format", "json")
        data = json.loads(output)
        assert data == {"depth": 1, "terms": {"0,2": "1/1", "1,1": "-2/1", "2,0": "1/1"}}

    def test_even_index(self, run):
        with pytest.raises(SystemExit) as excinfo:
            run("compose", "3", "4")
        assert excinfo.value.code == EXIT_USAGE


class TestParseExpression:
    def test_generator(self):
        assert parse_expression("s5") == sigma_bar_word(5)
        assert parse_expression("s5", "dg") == sigma_bar_poly(5)

    def test_coefficients(self):
        assert parse_expression("2*s3 - s3", "dg") == sigma_bar_poly(3)
        assert parse_expression("1/2*s3", "dg") == sigma_bar_poly(3).scale("1/2")

    def test_antisymmetry(self):
        assert not parse_expression("{s3,s5} + {s5,s3}", "dg")

    def test_parentheses(self):
        assert not parse_expression("-(s3 - s3)")

    @pytest.mark.parametrize("text", ["", "s3 +", "{s3 s5}", "s3 )", "x3"])
    def test_errors(self, text):
        with pytest.raises(UsageError):
            parse_expression(text)

    def test_unknown_kind(self):
        with pytest.raises(UsageError):
            parse_expression("s3", "lie")
