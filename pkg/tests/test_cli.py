import csv
import io as _io
import json

import numpy as np
import pytest

from painleve_tz import __version__
from painleve_tz.cli import main
from painleve_tz.io import crossing_csv, dumps, fmt_float, to_plain, trajectory_csv


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(_io.StringIO(text)))


def test_trace_csv_file(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, _, _ = run(capsys, "trace", "--form", "pi-minus", "--t-max", "50", "--csv", "--out", str(path))
    assert code == 0
    table = rows(path.read_text())
    assert table[0] == ["t", "s", "sdot", "q"]
    t = np.array([float(r[0]) for r in table[1:]])
    assert np.all(np.diff(t) > 0) and t[-1] == 50.0


def test_trace_spacing_includes_final_state(capsys):
    code, out, _ = run(capsys, "trace", "--form", "pi", "--t-max", "1", "--spacing", "0.3")
    assert code == 0
    t = [float(r[0]) for r in rows(out)[1:]]
    assert t == pytest.approx([0.0, 0.3, 0.6, 0.9, 1.0])
    assert t[-1] == 1.0


def test_trace_pi_plus_guard(capsys):
    code, out, _ = run(capsys, "trace", "--form", "pi-plus", "--s-max", "1e6")
    assert code == 0
    last = [float(x) for x in rows(out)[-1]]
    assert last[1] >= 1e6 and last[0] < 1.83


def test_trace_pi_matches_other_forms(capsys):
    from painleve_tz.series import EquationForm, convert_form, scaling
    _, out, _ = run(capsys, "trace", "--form", "pi", "--t-max", "1", "--spacing", "0.25")
    pi_rows = [[float(x) for x in r] for r in rows(out)[1:]]
    for name, form in (("pi-minus", EquationForm.PIMINUS), ("pi-plus", EquationForm.PIPLUS)):
        alpha, _ = scaling(EquationForm.PI, form)
        _, out, _ = run(capsys, "trace", "--form", name, "--t-max", repr(1.0 / alpha),
                        "--spacing", repr(0.25 / abs(alpha)))
        other = [[float(x) for x in r] for r in rows(out)[1:]]
        scale = max(np.hypot(r[1], r[2]) for r in pi_rows)
        for a, b in zip(pi_rows, other):
            t, s, sd = convert_form(b[0], b[1], b[2], form, EquationForm.PI)
            assert t == pytest.approx(a[0], abs=1e-14)
            assert np.hypot(s - a[1], sd - a[2]) <= 1e-8 * scale


def test_trace_json(capsys):
    code, out, _ = run(capsys, "trace", "--form", "pi-minus", "--t-max", "0.5", "--json")
    data = json.loads(out)
    assert code == 0 and data["form"] == "pi-minus" and data["termination"] == "reached_t_max"
    assert len(data["steps"]) == data["n_steps"]
    step = data["steps"][0]
    assert set(step) == {"t0", "t1", "y0", "y1", "error", "dense"}
    assert np.array(step["dense"]).shape == (4, 3)


def test_trace_underflow_exit_code(capsys):
    code, _, err = run(capsys, "trace", "--form", "pi-plus", "--s-max", "1e300", "--t-max", "3")
    assert code == 1 and "underflow" in err


def test_byte_identical_outputs(tmp_path, capsys):
    outputs = []
    for k in range(2):
        path = tmp_path / f"c{k}.csv"
        run(capsys, "crossings", "--t-max", "20", "--out", str(path))
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]
    a = run(capsys, "blowup", "--width-tol", "0.01")[1]
    b = run(capsys, "blowup", "--width-tol", "0.01")[1]
    assert a == b


def test_series_json(capsys):
    code, out, _ = run(capsys, "series", "--form", "pi-minus", "--order", "18", "--json")
    assert code == 0
    assert [e["n"] for e in json.loads(out)] == [3, 8, 13, 18]


def test_series_text_and_csv(capsys):
    _, out, _ = run(capsys, "series", "--form", "pi+", "--order", "8")
    assert out == "a_3 = 1\na_8 = 3/28\n"
    _, out, _ = run(capsys, "series", "--order", "8", "--csv")
    assert out == "n,numerator,denominator\n3,1,1\n8,-3,28\n"


def test_blowup_json(capsys):
    code, out, _ = run(capsys, "blowup", "--width-tol", "0.01")
    data = json.loads(out)
    assert code == 0
    assert list(data)[:5] == ["lower", "upper", "tau", "s_at_tau", "width"]
    assert 1.82 < data["lower"] < data["upper"] < 1.83
    assert data["analytic_lower"] < data["integral_bound"] < data["lower"]


def test_crossings_empty_before_one(capsys):
    code, out, _ = run(capsys, "crossings", "--t-max", "1")
    assert code == 0 and out == "index,t,direction,gap_to_prev,bound,passed\n"


def test_crossings_table(capsys):
    code, out, _ = run(capsys, "crossings", "--t-max", "30")
    table = rows(out)
    assert code == 0 and table[0] == ["index", "t", "direction", "gap_to_prev", "bound", "passed"]
    assert table[1][2] == "upward" and table[1][3:] == ["", "", ""]
    assert all(r[5] == "true" for r in table[2:])
    assert 1.0 < float(table[1][1]) < 1.25 ** 0.4


def test_crossings_json_and_envelope(capsys):
    code, out, _ = run(capsys, "crossings", "--t-max", "5", "--json")
    assert code == 0 and json.loads(out)[0]["direction"] == "upward"
    code, out, _ = run(capsys, "crossings", "--t-max", "20", "--envelope")
    stats = json.loads(out)
    assert code == 0 and [s["window"] for s in stats] == [[1e-9, 20.0], [10.0, 20.0]]


@pytest.mark.parametrize("argv", [
    ["trace", "--form", "bogus"],
    ["trace"],
    ["trace", "--form", "pi", "--rel-tol", "-1"],
    ["trace", "--form", "pi", "--rel-tol", "abc"],
    ["trace", "--form", "pi", "--t-max", "inf"],
    ["trace", "--form", "pi", "--t-max", "0"],
    ["trace", "--form", "pi", "--csv", "--json"],
    ["trace", "--form", "pi", "--rel-tol", "1e-17"],
    ["series", "--order", "-3"],
    ["series", "--order", "99999"],
    ["blowup", "--width-tol", "0"],
    ["verify", "--check", "no.such.check"],
    ["nope"],
])
def test_bad_flags_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 2


def test_verify_list(capsys):
    code, out, _ = run(capsys, "verify", "--list")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) >= 30
    assert all(len(line.split("\t")) == 3 for line in lines)


def test_verify_subset_and_short_horizon(capsys):
    code, out, err = run(capsys, "verify", "--t-max", "1", "--check", "minus.below_gaps",
                         "--check", "series.sparsity")
    data = json.loads(out)
    assert code == 0
    assert {c["check_id"]: c["status"] for c in data["checks"]} == {
        "minus.below_gaps": "skipped", "series.sparsity": "pass"}
    assert "1 passed, 0 failed, 1 skipped" in err


def test_verify_corrupted_exit_1(capsys):
    code, out, _ = run(capsys, "verify", "--corrupt-rhs", "--t-max", "5",
                       "--check", "minus.positivity", "--check", "minus.sqrt3t_bound")
    data = json.loads(out)
    assert code == 1
    assert all(c["status"] == "fail" for c in data["checks"])


def test_version(capsys):
    with pytest.raises(SystemExit):
        main(["--version"])
    assert __version__ in capsys.readouterr().out


def test_float_format_round_trips():
    for x in (0.1, 1 / 3, 1e-300, 2.0 ** 0.5, 123456789.123456789):
        text = fmt_float(x)
        assert float(text) == x
        digits = text.split("e")[0].replace("-", "").replace(".", "").lstrip("0")
        assert len(digits) <= 17


def test_to_plain_handles_special_values():
    from fractions import Fraction
    assert to_plain(float("nan")) is None and to_plain(np.float64(np.inf)) is None
    assert to_plain(Fraction(-3, 28)) == {"numerator": -3, "denominator": 28}
    assert to_plain(np.arange(3)) == [0, 1, 2]
    assert dumps({"a": float("nan")}) == '{\n  "a": null\n}\n'
    with pytest.raises(TypeError):
        to_plain(object())


def test_io_helpers_direct(minus100):
    from painleve_tz.oscillation import crossings
    with pytest.raises(ValueError):
        trajectory_csv(minus100, spacing=0.0)
    assert crossing_csv([]) == "index,t,direction,gap_to_prev,bound,passed\n"
    text = crossing_csv(crossings(minus100, 3.0))
    assert text.count("\n") == 1 + len(crossings(minus100, 3.0))
