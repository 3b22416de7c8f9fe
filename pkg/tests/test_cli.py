import json

import pytest

from anomaly_forge import cli
from anomaly_forge.cli import JobSpec, main, parse_lattice, run
from anomaly_forge.exact_core import EvennessError, PreconditionError

A2_JSON = '{"gram": [[2,-1],[-1,2]]}'


def run_main(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# -------------------------------------------------------------- parsing


def test_parse_lattice_a2():
    lat = parse_lattice(A2_JSON)
    assert lat.gram.entries == ((2, -1), (-1, 2))


def test_parse_lattice_bare_array():
    lat = parse_lattice("[[2]]")
    assert lat.rank == 1


def test_parse_lattice_rejects_odd_diagonal():
    with pytest.raises(EvennessError):
        parse_lattice('{"gram": [[1]]}')


def test_parse_lattice_rejects_asymmetric():
    with pytest.raises(PreconditionError):
        parse_lattice('{"gram": [[2,1],[0,2]]}')


def test_parse_lattice_rejects_bad_json():
    with pytest.raises(cli.UsageError):
        parse_lattice("{not json")


def test_parse_lattice_rejects_non_integers():
    with pytest.raises(cli.UsageError):
        parse_lattice('{"gram": [[2.0]]}')


def test_parse_lattice_from_file(tmp_path):
    path = tmp_path / "gram.json"
    path.write_text(A2_JSON)
    lat = parse_lattice(str(path))
    assert lat.rank == 2


# ------------------------------------------------------------ exit codes


def test_exit_zero_on_passing_verify(capsys):
    code, out, _ = run_main(capsys, ["verify", "--gram", "[[2]]", "--samples", "20"])
    assert code == 0
    report = json.loads(out)
    assert report["all_passed"] is True


def test_exit_two_on_usage_error(capsys):
    code, _, err = run_main(capsys, ["analyze", "--gram", "{broken"])
    assert code == 2


def test_exit_two_on_missing_gram(capsys):
    code, _, err = run_main(capsys, ["analyze"])
    assert code == 2
    assert "requires --gram" in err


def test_exit_three_on_domain_error(capsys):
    code, _, err = run_main(capsys, ["analyze", "--gram", "[[1]]"])
    assert code == 3
    assert "even" in err


def test_exit_three_on_degenerate_lattice(capsys):
    code, _, err = run_main(capsys, ["analyze", "--gram", "[[2,2],[2,2]]"])
    assert code == 3


def test_exit_one_on_failing_check(capsys, monkeypatch):
    # inject a known-bad check result to pin the exit-code contract
    def broken(job, checks, artifacts):
        checks.append(cli.Check("injected_failure", False, {"reason": "synthetic"}))

    monkeypatch.setitem(cli.RUNNERS, "analyze", broken)
    code, out, _ = run_main(capsys, ["analyze", "--gram", "[[2]]"])
    assert code == 1
    report = json.loads(out)
    assert report["all_passed"] is False


# ----------------------------------------------------------- determinism


def test_verify_is_byte_deterministic(capsys):
    argv = ["verify", "--gram", A2_JSON, "--seed", "7", "--samples", "40"]
    code1, out1, _ = run_main(capsys, argv)
    code2, out2, _ = run_main(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_reports_round_trip_as_json(capsys):
    code, out, _ = run_main(capsys, ["analyze", "--gram", "[[2]]"])
    assert code == 0
    report = json.loads(out)
    assert json.loads(json.dumps(report)) == report
    assert report["exact_arithmetic"] is True
    assert report["tool"]["name"] == "anomaly-forge"


# -------------------------------------------------------------- commands


def test_analyze_artifacts(capsys):
    code, out, _ = run_main(capsys, ["analyze", "--gram", "[[2]]"])
    report = json.loads(out)
    art = report["artifacts"]
    assert art["discriminant"]["invariant_factors"] == [2]
    assert art["discriminant"]["representatives"] == [["0/1"], ["1/2"]]
    assert art["dual_basis"] == [["1/2"]]
    assert art["positive_definite"] is True


def test_decompose_command(capsys):
    code, out, _ = run_main(capsys, ["decompose", "--gram", "[[0,1],[1,0]]"])
    assert code == 0
    report = json.loads(out)
    assert report["all_passed"]
    assert len(report["artifacts"]["terms"]) >= 2


def test_restrict_command(capsys):
    code, out, _ = run_main(capsys, ["restrict", "--gram", "[[2]]"])
    assert code == 0
    report = json.loads(out)
    table = report["artifacts"]["table"]
    assert {"args": [[1], [1], [1]], "exponent": "1/2"} in table


def test_classify_command(capsys):
    code, out, _ = run_main(capsys, ["classify", "--gram", "[[2]]"])
    assert code == 0
    report = json.loads(out)
    assert report["artifacts"]["h3_invariant_factors"] == [2]
    assert report["artifacts"]["class_coordinates"] == [1]
    assert any(c["name"] == "section_stability" and c["passed"] for c in report["checks"])


def test_selftest_command(capsys):
    code, out, _ = run_main(capsys, ["selftest"])
    assert code == 0
    report = json.loads(out)
    assert report["all_passed"]
    assert len(report["checks"]) >= 20


def test_markdown_format(capsys):
    code, out, _ = run_main(capsys, ["analyze", "--gram", "[[2]]", "--format", "markdown"])
    assert code == 0
    assert out.startswith("# anomaly-forge analyze report")
    assert "[PASS]" in out


def test_sign_and_variant_flags(capsys):
    code, out, _ = run_main(
        capsys,
        ["verify", "--gram", A2_JSON, "--sign", "plus", "--variant", "kac", "--samples", "20"],
    )
    assert code == 0
    report = json.loads(out)
    assert report["job"]["sign"] == "plus"
    assert any(c["name"] == "two_cocycle_kac" for c in report["checks"])


def test_jobspec_validation():
    with pytest.raises(cli.UsageError):
        run(JobSpec(command="bogus"))
    with pytest.raises(cli.UsageError):
        run(JobSpec(command="verify", gram=[[2]], samples=0))
    with pytest.raises(cli.UsageError):
        run(JobSpec(command="verify", gram=[[2]], denominators=[1]))


def test_custom_denominators_flow_through(capsys):
    code, out, _ = run_main(
        capsys,
        ["verify", "--gram", "[[2]]", "--samples", "20", "--denominators", "2,4,8"],
    )
    assert code == 0
    report = json.loads(out)
    assert report["job"]["denominators"] == [2, 4, 8]


def test_bad_denominators_rejected(capsys):
    code, _, err = run_main(
        capsys, ["verify", "--gram", "[[2]]", "--denominators", "2,x"]
    )
    assert code == 2
