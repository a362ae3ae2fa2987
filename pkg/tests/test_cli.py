import json
from fractions import Fraction

import pytest

from skewbox.cli import EXIT_CONSTRUCTION, EXIT_INPUT, EXIT_OK, EXIT_VERIFY, format_value, main, parse_angle
from skewbox.circle import Angle
from skewbox.scalar import Scalar


@pytest.fixture(scope="module")
def state_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("cli") / "s.json"
    assert main(["build", "--depth", "3", "--out", str(p)]) == EXIT_OK
    return str(p)


def test_parse_angle():
    assert parse_angle("3*") == Angle(3, 0)
    assert parse_angle("<-2*+1/1024>") == Angle(-2, Fraction(1, 1024))
    assert parse_angle("0.25") == Angle(0, Fraction(1, 4))
    assert parse_angle("1*-1/8") == Angle(1, Fraction(-1, 8))
    for bad in ("", "x", "3*1/2", "*"):
        with pytest.raises(ValueError):
            parse_angle(bad)


def test_format_value():
    assert format_value(Scalar.exact(Fraction(-3, 4))) == "-0.75"
    s = format_value(Scalar.interval(Fraction(1, 3), Fraction(1, 3)))
    assert s.startswith("[0.3333") and s.endswith("]")


def test_build_and_eval(state_file, capsys):
    capsys.readouterr()
    assert main(["eval", "map", "-m", "1", "--theta", "<0*>", "--x", "-2", "--state", state_file]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "2" and out[1] == "status: certified"
    assert main(["eval", "gamma", "-j", "2", "--theta", "0.5", "--state", state_file]) == EXIT_OK
    assert main(["eval", "gamma", "--theta", "1/3", "--state", state_file]) == EXIT_OK
    assert "status:" in capsys.readouterr().out


def test_verify_exit_codes(state_file, tmp_path, capsys, monkeypatch):
    rep = tmp_path / "r.txt"
    assert main(["verify", "--suite", "curve", "--samples", "40", "--state", state_file,
                 "--report", str(rep)]) == EXIT_OK
    assert rep.read_text().startswith("suite curve")
    # a state with a broken a-value re-certifies as a construction failure
    doc = json.load(open(state_file))
    doc["levels"][2]["boxes"]["2"]["a"] = {"lo": "0.25", "hi": "0.25"}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert main(["verify", "--state", str(bad)]) == EXIT_CONSTRUCTION
    assert "first failing clause" in capsys.readouterr().err
    # a failing suite maps to the verification exit code
    import skewbox.cli as cli_mod
    from skewbox.verify import FAIL, CheckRecord, VerificationReport

    monkeypatch.setattr(cli_mod, "verify_suite", lambda *a, **k: VerificationReport(
        "all", 0, 1, (CheckRecord("x.y", "", 1, None, FAIL, "w", ""),)))
    assert main(["verify", "--state", state_file]) == EXIT_VERIFY


def test_input_errors(state_file, tmp_path, capsys):
    assert main(["eval", "gamma", "--theta", "garbage", "--state", state_file]) == EXIT_INPUT
    assert main(["eval", "map", "--theta", "0.1", "--x", "5", "--state", state_file]) == EXIT_INPUT
    assert main(["build", "--bogus"]) == EXIT_INPUT
    assert "Usage" in capsys.readouterr().err
    assert main(["plot", "--what", "orbit", "--state", state_file,
                 "--out", str(tmp_path / "no" / "x.svg")]) == EXIT_INPUT
    assert main(["eval", "gamma", "--theta", "0.1", "--state", str(tmp_path / "absent.json")]) == EXIT_INPUT
    assert main(["build", "--depth", "5", "--orbit-horizon", "4"]) == EXIT_INPUT


def test_plot(state_file, tmp_path):
    for what in ("gamma", "boxes", "map", "orbit"):
        out = tmp_path / f"{what}.csv"
        assert main(["plot", "--what", what, "--format", "csv", "--grid", "32",
                     "--state", state_file, "--out", str(out)]) == EXIT_OK
        assert out.read_text().startswith("theta_lo,theta_hi,value_lo,value_hi,tag")


def test_help():
    assert main(["--help"]) == EXIT_OK
