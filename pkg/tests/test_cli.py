"""End-to-end tests of the command line interface via subprocess."""

import json
import re
import subprocess
import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

LOG = """\
trace(0,0,a). trace(0,1,b). trace(0,2,c).
trace(1,0,a). trace(1,1,c). trace(1,2,b).
trace(2,0,b). trace(2,1,c). trace(2,2,a).
"""

MODEL = """\
constraint(0,"Response"). bind(0,arg_0,a). bind(0,arg_1,b).
constraint(1,"Precedence"). bind(1,arg_0,a). bind(1,arg_1,c).
"""


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "declarekit.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


@pytest.fixture()
def workdir(tmp_path):
    (tmp_path / "log.lp").write_text(LOG)
    (tmp_path / "model.lp").write_text(MODEL)
    return tmp_path


def test_check_summary_line(workdir):
    out = run_cli("check", "--log", "log.lp", "--model", "model.lp", cwd=workdir)
    assert out.returncode == 0
    assert re.fullmatch(
        r"2/3 constraints=2 backend=direct elapsed=\d+\.\d{3}s\n", out.stdout
    )


def test_check_writes_report(workdir):
    out = run_cli(
        "check", "--log", "log.lp", "--model", "model.lp", "--out", "rep.json",
        cwd=workdir,
    )
    assert out.returncode == 0
    doc = json.loads((workdir / "rep.json").read_text())
    assert doc["compliant"] == [0, 1]
    assert doc["supports"] == {"0": "2/3", "1": "2/3"}


def test_check_report_identical_across_threads(workdir):
    for threads, name in (("1", "one.json"), ("3", "three.json")):
        out = run_cli(
            "check", "--log", "log.lp", "--model", "model.lp",
            "--out", name, "--threads", threads,
            cwd=workdir,
        )
        assert out.returncode == 0
    assert (workdir / "one.json").read_bytes() == (workdir / "three.json").read_bytes()


def test_check_missing_file_exits_two(workdir):
    out = run_cli("check", "--log", "nope.lp", "--model", "model.lp", cwd=workdir)
    assert out.returncode == 2
    assert "nope.lp" in out.stderr


def test_check_malformed_log_exits_two(workdir):
    (workdir / "bad.lp").write_text("trace(0,1,a).")
    out = run_cli("check", "--log", "bad.lp", "--model", "model.lp", cwd=workdir)
    assert out.returncode == 2
    assert "missing position" in out.stderr


def test_unknown_backend_exits_three(workdir):
    out = run_cli(
        "check", "--log", "log.lp", "--model", "model.lp", "--backend", "magic",
        cwd=workdir,
    )
    assert out.returncode == 3
    assert "direct, tree, dfa" in out.stderr


def test_unknown_template_exits_three_and_lists_names(workdir):
    out = run_cli(
        "query", "--log", "log.lp", "--template", "Never", "--support", "1/2",
        cwd=workdir,
    )
    assert out.returncode == 3
    for name in ("Choice", "ExclusiveChoice", "AlternateSuccession", "Coexistence"):
        assert name in out.stderr


def test_query_prints_sorted_answers(workdir):
    out = run_cli(
        "query", "--log", "log.lp", "--template", "RespondedExistence",
        "--bind", "arg_0=a", "--support", "2/3",
        cwd=workdir,
    )
    assert out.returncode == 0
    lines = out.stdout.strip().split("\n")
    assert lines[0] == "?arg_1=a support=1/1"
    assert "?arg_1=b support=1/1" in lines
    assert all(re.fullmatch(r"\?arg_1=\w+ support=\d+/\d+", ln) for ln in lines)


def test_query_json_output(workdir):
    out = run_cli(
        "query", "--log", "log.lp", "--template", "Response",
        "--bind", "arg_0=a", "--domain", "arg_1=b,c",
        "--support", "1/3", "--out", "ans.json",
        cwd=workdir,
    )
    assert out.returncode == 0
    doc = json.loads((workdir / "ans.json").read_text())
    assert doc["threshold"] == "1/3"
    assert {"binding": {"arg_1": "b"}, "support": "2/3"} in doc["answers"]


def test_query_needs_exactly_one_source(workdir):
    out = run_cli("query", "--log", "log.lp", "--support", "1/2", cwd=workdir)
    assert out.returncode == 3


def test_compile_template_facts(workdir):
    out = run_cli("compile", "--template", "Response", "--facts-json", "-", cwd=workdir)
    assert out.returncode == 0
    doc = json.loads(out.stdout)
    assert doc["kind"] == "Response"
    assert doc["initial"] == 0
    assert doc["accepting"] == [0]
    assert len(doc["transitions"]) == 6


def test_compile_formula_dot(workdir):
    out = run_cli("compile", "--formula", "G(a -> F b)", "--dot", "-", cwd=workdir)
    assert out.returncode == 0
    assert out.stdout.startswith("digraph")


def test_compile_bad_formula_exits_two(workdir):
    out = run_cli("compile", "--formula", "G(a ->", "--facts-json", "-", cwd=workdir)
    assert out.returncode == 2


def test_generate_writes_log_and_manifest(workdir):
    out = run_cli(
        "generate", "--template", "Response", "--n", "8", "--len", "6",
        "--alphabet", "4", "--seed", "5", "--out", "gen.lp",
        cwd=workdir,
    )
    assert out.returncode == 0
    assert (workdir / "gen.lp").exists()
    manifest = (workdir / "gen.labels.csv").read_text().strip().split("\n")
    assert manifest[0] == "trace_id,label"
    assert len(manifest) == 9


def test_generate_impossible_config_exits_three(workdir):
    out = run_cli(
        "generate", "--template", "Response", "--n", "2", "--len", "1",
        "--alphabet", "4", "--seed", "0", "--out", "gen.lp",
        cwd=workdir,
    )
    assert out.returncode == 3
    assert "positive" in out.stderr


def test_generate_is_deterministic(workdir):
    for name in ("g1.lp", "g2.lp"):
        run_cli(
            "generate", "--template", "ChainResponse", "--n", "10", "--len", "7",
            "--alphabet", "5", "--seed", "21", "--out", name,
            cwd=workdir,
        )
    assert (workdir / "g1.lp").read_bytes() == (workdir / "g2.lp").read_bytes()


def test_convert_round_trip(workdir):
    assert run_cli("convert", "--in", "log.lp", "--out", "log.xes", cwd=workdir).returncode == 0
    assert run_cli("convert", "--in", "log.xes", "--out", "back.lp", cwd=workdir).returncode == 0
    from declarekit import parse_factlog

    assert parse_factlog((workdir / "back.lp").read_text()) == parse_factlog(LOG)


def test_convert_from_fixture_xes(workdir):
    out = run_cli(
        "convert", "--in", str(FIXTURES / "orders.xes"), "--out", "orders.lp",
        cwd=workdir,
    )
    assert out.returncode == 0
    text = (workdir / "orders.lp").read_text()
    assert 'trace(0,0,"receive order").' in text


def test_validate_reports_zero_disagreements(workdir):
    out = run_cli("validate", "--max-len", "4", cwd=workdir)
    assert out.returncode == 0
    assert "0 disagreements" in out.stdout


def test_bench_writes_csv(workdir):
    out = run_cli(
        "bench", "--log", "log.lp", "--model", "model.lp",
        "--backends", "direct,dfa", "--repeat", "2", "--out", "bench.csv",
        cwd=workdir,
    )
    assert out.returncode == 0
    rows = (workdir / "bench.csv").read_text().strip().split("\n")
    assert rows[0] == "task,backend,run,elapsed_ms"
    assert len(rows) == 5
    assert rows[1].startswith("model,direct,0,")
    assert rows[4].startswith("model,dfa,1,")


def test_no_subcommand_exits_three():
    out = run_cli()
    assert out.returncode == 3
