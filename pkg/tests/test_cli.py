import json
import math
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from henon_fatou.cli import main
from henon_fatou.cycles import gamma_power
from henon_fatou.serialize import csv_text, dumps, format_complex, parse_complex
from henon_fatou.sets import default_r0, sample_A


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


# --- literals and number formatting --------------------------------------------


@pytest.mark.parametrize(
    "text, value",
    [("1.5-2e-3i", 1.5 - 0.002j), ("-i", -1j), ("2i", 2j), ("3", 3 + 0j), ("+.5-.5i", 0.5 - 0.5j), ("1E2+1i", 100 + 1j)],
)
def test_parse_complex(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize("text", ["1 +2i", " 1", "", "i2", "1+2", "abc", "1e", "1+2ii", "inf", "nan", "1+-2i"])
def test_parse_complex_rejects(text):
    with pytest.raises(ValueError):
        parse_complex(text)


finite = st.floats(allow_nan=False, allow_infinity=False)


@given(finite, finite)
def test_complex_literal_roundtrip(re, im):
    v = complex(re, im)
    assert parse_complex(format_complex(v)) == v


@given(finite)
def test_json_float_roundtrip(x):
    assert json.loads(dumps([x]))[0] == x


def test_json_encodings():
    doc = json.loads(dumps({"c": 1 + 2j, "inf": complex(math.inf, 0), "nan": math.nan}))
    assert doc == {"c": [1, 2], "inf": "inf", "nan": None}
    assert "0.10000000000000001" in dumps([0.1])
    assert csv_text(["x", "z"], [(0.1, 1 - 1j)]) == "x,z\n0.10000000000000001,1-1i\n"


# --- orbit ---------------------------------------------------------------------


def test_orbit_origin(capsys):
    code, out, _ = run(capsys, "orbit", "--m", "2", "--z0", "0", "--w0", "0", "--n", "2")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert (rows[-1]["re_z"], rows[-1]["re_w"]) == (math.exp(-1), 1)
    assert [r["n"] for r in rows] == [0, 1, 2]


def test_orbit_replays_gamma(capsys, tmp_path):
    m = 3
    (pt,) = sample_A((0, 0), 10 * default_r0(m, 3.0), 1, 0, m)
    out = tmp_path / "o.csv"
    code, _, _ = run(
        capsys, "orbit", "--m", str(m), "--z0", format_complex(pt[0]), "--w0", format_complex(pt[1]),
        "--n", str(4 * m), "--format", "csv", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()[1:]
    pairs = [line.split(",")[5] for line in lines]
    assert pairs == [gamma_power((0, 0), n, m).label(m) for n in range(4 * m + 1)]


def test_orbit_bad_literal(capsys):
    with pytest.raises(SystemExit) as info:
        main(["orbit", "--z0", "1 +2i", "--w0", "0", "--n", "2"])
    assert info.value.code == 2
    assert "malformed complex literal" in capsys.readouterr().err


def test_orbit_overflow_exit_3(capsys):
    code, out, err = run(capsys, "orbit", "--m", "2", "--z0", "30i", "--w0", "0", "--n", "5")
    assert code == 3
    assert json.loads(out)["overflowed"] is True
    assert "overflow" in err


# --- cycles ----------------------------------------------------------------------


def test_cycles_m5(capsys):
    code, out, _ = run(capsys, "cycles", "--m", "5")
    doc = json.loads(out)
    assert code == 0 and doc["count"] == 3
    assert [c["sequence"] for c in doc["cycles"]] == [
        "00 10 11 21 22 32 33 43 44 04 00",
        "01 20 12 31 23 42 34 03 40 14 01",
        "02 30 13 41 24 02",
    ]
    assert [(c["h1_slice"], c["h2_slice"]) for c in doc["cycles"]] == [(0, 1), (4, 2), (3, 3)]


def test_cycles_m6_and_m2(capsys):
    _, out, _ = run(capsys, "cycles", "--m", "6", "--format", "csv")
    rows = out.splitlines()[1:]
    assert [r.split(",")[1] for r in rows] == ["12", "12", "12"]
    assert [tuple(r.split(",")[3:]) for r in rows] == [("0", "1"), ("5", "2"), ("4", "3")]
    _, out, _ = run(capsys, "cycles", "--m", "2")
    assert [c["period"] for c in json.loads(out)["cycles"]] == [4]


# --- verify ---------------------------------------------------------------------


def test_verify_all_passes(capsys):
    code, out, _ = run(capsys, "verify", "--m", "3", "--delta", "3")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    suites = {c["suite"] for c in doc["checks"]}
    assert suites == {"combinatorics", "cycling", "growth", "limits", "conjugacy", "diagnostic"}


def test_verify_limits_reports_product(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "limits", "--m", "4", "--delta", "2.5")
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert code == 0
    assert checks["product-h1h2-minus-a"]["measured"] < 1e-9
    assert checks["product-h1h2-minus-a"]["tolerance"] == 1e-9


def test_verify_rejects_small_delta(capsys):
    code, _, err = run(capsys, "verify", "--suite", "conjugacy", "--delta", "2.0")
    assert code == 2 and "delta" in err


def test_verify_failure_exit_1(capsys, monkeypatch):
    from henon_fatou import verify

    def broken(p, **kw):
        return [verify.Check("forced", False, 1.0, 0.0, "<")]

    monkeypatch.setitem(verify._RUNNERS, "growth", broken)
    code, out, _ = run(capsys, "verify", "--suite", "growth")
    assert code == 1 and json.loads(out)["passed"] is False


# --- render --------------------------------------------------------------------


def test_render_small_slice(capsys, tmp_path):
    out = tmp_path / "r.ppm"
    code, stdout, _ = run(capsys, "render", "--m", "5", "--width", "64", "--height", "64", "--out", str(out))
    assert code == 0
    assert set(json.loads(stdout)["periods"]) <= {5, 10}
    meta = json.loads((tmp_path / "r.ppm.json").read_text())
    assert meta["slice"]["width"] == 64
    first = out.read_bytes()
    code, _, _ = run(capsys, "render", "--m", "5", "--width", "64", "--height", "64", "--out", str(out), "--threads", "3")
    assert out.read_bytes() == first


def test_render_zero_extent(capsys, tmp_path):
    code, _, err = run(capsys, "render", "--extent", "0+1i", "--out", str(tmp_path / "x.ppm"))
    assert code == 2 and "extent" in err


def test_render_io_failure(capsys, tmp_path):
    code, _, _ = run(capsys, "render", "--width", "4", "--height", "4", "--out", str(tmp_path / "missing" / "x.ppm"))
    assert code == 3


def test_render_rejects_json_format(capsys, tmp_path):
    code, _, _ = run(capsys, "render", "--format", "json", "--out", str(tmp_path / "x.ppm"))
    assert code == 2


# --- sample and limits -----------------------------------------------------------


def test_sample_is_seeded(capsys):
    args = ("sample", "--set", "A", "--pair", "12", "--m", "3", "--count", "4", "--seed", "7")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b
    pts = json.loads(a)["points"]
    assert len(pts) == 4


def test_sample_W_bad_b(capsys):
    code, _, _ = run(capsys, "sample", "--set", "W", "--b", "9", "--m", "3")
    assert code == 2


def test_limits(capsys):
    code, out, _ = run(capsys, "limits", "--m", "2", "--z0", "8", "--w0", "8")
    doc = json.loads(out)
    assert code == 0
    assert doc["terms"] == 34
    assert doc["delta2"][0] == pytest.approx(-5.3460363018287928433e-29, rel=1e-12)
    assert (doc["h1_slice"], doc["h2_slice"]) == (0, 1)


def test_limits_outside_S(capsys):
    code, _, err = run(capsys, "limits", "--m", "2", "--z0", "1i", "--w0", "1")
    assert code == 3 and "OrbitLeftS" in err


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "henon_fatou", "cycles", "--m", "3", "--format", "csv"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == "representative,period,members,h1_slice,h2_slice"
