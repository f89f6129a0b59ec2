import json
import subprocess
import sys

import pytest

from qmark import __version__
from qmark.cli import RunConfig, UsageError, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_csv(capsys):
    code, out, _ = run(["eval", "--x", "1/3"], capsys)
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "x,exact,decimal,err"
    assert lines[1] == "1/3,1/4,0.250000000000000000000000000000,0"
    assert lines[-1] == f"# precision_bits=256 version={__version__}"


def test_eval_json(capsys):
    code, out, _ = run(["--out", "json", "eval", "--x", "2/5"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert set(doc) == {"command", "params", "precision_bits", "rows", "err_fields_present"}
    assert doc["rows"][0]["exact"] == "3/8" and doc["err_fields_present"] is True


def test_flags_after_subcommand(capsys):
    code, out, _ = run(["eval", "--x", "1/7", "--digits", "5"], capsys)
    assert code == 0 and "0.015625" in out


def test_cf_and_farey(capsys):
    _, out, _ = run(["cf", "--x", "2/5"], capsys)
    assert "canonical,2/5,0,2 2" in out and "alternate,2/5,0,2 1 1" in out
    _, out, _ = run(["farey", "--gen", "1"], capsys)
    assert out.splitlines()[1:3] == ["1/3,1/4", "2/3,3/4"]


@pytest.mark.parametrize("argv", [["bogus"], ["eval"], ["--digits", "99", "eval", "--x", "1/2"], ["eval", "--x", "a/b"],
                                  ["zeta"], ["salem", "--cbeta", "--n", "10"], ["--prec", "16", "eval", "--x", "1"]])
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err


def test_computation_error_exit_1(capsys):
    code, out, err = run(["salem", "--sigma", "--n-list", "100000000"], capsys)
    assert code == 1 and "ResourceError" in err and out == ""
    code, _, err = run(["dn", "--max", "30", "--method", "taylor"], capsys)
    assert code == 1 and "RangeError" in err


def test_failed_relation_is_exit_0(capsys):
    code, out, _ = run(["relations", "--check", "trig", "--x", "1/3", "--nmax", "5"], capsys)
    assert code == 0 and "trig" in out


def test_run_config():
    with pytest.raises(UsageError):
        RunConfig(digits=80)
    assert RunConfig(precision_bits=512, digits=150).ctx.bits == 512


def test_salem_outputs(capsys):
    code, out, _ = run(["salem", "--sigma", "--n-list", "1,2"], capsys)
    assert code == 0 and out.splitlines()[0] == "N,beta,sum,scaled"
    code, out, _ = run(["--out", "json", "salem", "--sigma", "--n-list", "1000 2000 4000 8000 16000 1000000", "--fit"],
                       capsys)
    assert set(json.loads(out)["rows"][0]) >= {"slope", "intercept", "r2", "N_list"}


def test_thread_count_does_not_change_bytes(capsys):
    outs = []
    for t in ("1", "3"):
        outs.append(run(["--threads", t, "salem", "--cbeta", "--grid", "8", "--n", "80000"], capsys)[1])
        outs.append(run(["--threads", t, "salem", "--weyl", "--n", "4", "--gen", "19"], capsys)[1])
    assert outs[0] == outs[2] and outs[1] == outs[3]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qmark", "eval", "--x", "1/4"], capture_output=True, text=True)
    assert r.returncode == 0 and "1/4,1/8," in r.stdout
