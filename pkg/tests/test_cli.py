"""End-to-end CLI behavior: JSON/CSV contracts, determinism, exit codes."""

import json
import math
import os

import pytest

jsonschema = pytest.importorskip("jsonschema")

from conversekit.applications import ActiveConfig, CsConfig, DensityConfig, compute_bounds
from conversekit.cli import CSV_COLUMNS, format_number, main

SCHEMA_PATH = os.path.join(
    os.path.dirname(__file__), "..", "src", "conversekit", "schema",
    "comparison_report.schema.json",
)

DENSITY_ARGS = ["--n", "1e11", "--nu", "1", "--c", "0.1", "--a", "0.5"]
CS_EXAMPLE = [
    "bound", "cs", "--n", "1000000", "--k", "128", "--sigma2", "1",
    "--frob2", "1000000", "--lambda", "0.05", "--delta", "0.05", "--beta", "0.01",
]


@pytest.fixture(scope="module")
def report_schema():
    with open(os.path.abspath(SCHEMA_PATH), encoding="utf-8") as fh:
        return json.load(fh)


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def strip_timestamp(text: str) -> str:
    return "\n".join(
        line for line in text.splitlines() if '"timestamp"' not in line
    )


# --- bound subcommand ---


def test_bound_density_stdout_json(capsys, report_schema):
    code, out, err = run_cli(capsys, ["bound", "density", *DENSITY_ARGS])
    assert code == 0 and err == ""
    payload = json.loads(out)
    assert sorted(payload) == ["manifest", "report"]
    jsonschema.validate(payload["report"], report_schema)
    assert payload["report"]["app"] == "density"
    assert payload["report"]["strong"]["eps_lower"] == pytest.approx(
        0.9955225053120399, rel=1e-15
    )
    manifest = payload["manifest"]
    assert sorted(manifest) == ["command", "config", "seed", "timestamp", "version"]
    assert manifest["command"][0] == "bound"
    assert manifest["config"]["nu"] == 1.0


def test_bound_cs_example_matches_library(capsys, report_schema):
    code, out, _ = run_cli(capsys, CS_EXAMPLE)
    assert code == 0
    report = json.loads(out)["report"]
    jsonschema.validate(report, report_schema)
    assert report["strong"]["eps_lower"] == pytest.approx(0.19909791813834565, rel=1e-15)
    assert report["ratio"] == pytest.approx(1.4461491418620422, rel=1e-15)
    cfg = CsConfig(
        n=1e6, k=128.0, sigma_sq=1.0, frob_norm_sq=1e6, lam=0.05, delta=0.05, beta=0.01
    )
    assert report == json.loads(json.dumps(compute_bounds(cfg).to_json_dict()))


def test_bound_active_non_finite_serializes_null(capsys, report_schema):
    code, out, _ = run_cli(
        capsys,
        ["bound", "active", "--n", "8", "--d", "2", "--alpha", "1", "--kappa", "2",
         "--L", "1", "--c", "0.5", "--H", "1", "--nu", "0.1"],
    )
    assert code == 0
    report = json.loads(out)["report"]
    jsonschema.validate(report, report_schema)
    assert report["strong"]["eps_raw"] is None  # -inf renders as null
    assert report["strong"]["eps_lower"] == 0.0


def test_bound_rerun_identical_modulo_timestamp(capsys, tmp_path):
    # identical command tokens both times, so the file bytes must match
    # apart from the manifest timestamp
    path = tmp_path / "report.json"
    argv = ["bound", "density", *DENSITY_ARGS, "--out", str(path)]
    assert main(argv) == 0
    first = path.read_text(encoding="utf-8")
    assert main(argv) == 0
    second = path.read_text(encoding="utf-8")
    capsys.readouterr()
    assert strip_timestamp(first) == strip_timestamp(second)
    assert not [p for p in os.listdir(tmp_path) if p.endswith(".tmp")]


def test_bound_out_file_equals_stdout(capsys, tmp_path):
    # the manifest records the actual argv (so it differs by --out), but the
    # report body must be identical
    path = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, ["bound", "density", *DENSITY_ARGS])
    assert code == 0
    assert main(["bound", "density", *DENSITY_ARGS, "--out", str(path)]) == 0
    capsys.readouterr()
    from_file = json.loads(path.read_text(encoding="utf-8"))
    from_stdout = json.loads(out)
    assert from_file["report"] == from_stdout["report"]
    assert from_file["manifest"]["config"] == from_stdout["manifest"]["config"]


# --- exit codes ---


def test_config_error_exits_2_and_names_constraint(capsys):
    code, out, err = run_cli(capsys, ["bound", "density", "--n", "0", "--nu", "1",
                                      "--c", "0.1", "--a", "0.5"])
    assert code == 2 and out == ""
    assert "error:" in err and "n > 0" in err

    code, _, err = run_cli(
        capsys,
        ["bound", "active", "--n", "1e6", "--d", "2", "--alpha", "1", "--kappa", "2",
         "--L", "1", "--c", "0.6", "--H", "1", "--nu", "0.5"],
    )
    assert code == 2
    assert "1/2" in err


def test_missing_required_flag_exits_2(capsys):
    code, _, err = run_cli(capsys, ["bound", "density", "--n", "1e11"])
    assert code == 2
    assert "--nu" in err and "--c" in err and "--a" in err


def test_io_error_exits_3(capsys, tmp_path):
    dest = tmp_path / "no" / "such" / "dir" / "out.json"
    code, _, err = run_cli(capsys, ["bound", "density", *DENSITY_ARGS, "--out", str(dest)])
    assert code == 3
    assert "i/o error:" in err


def test_unknown_sweep_parameter_exits_2(capsys):
    code, _, err = run_cli(
        capsys,
        ["sweep", "density", "--vary", "bandwidth", "--values", "1,2", *DENSITY_ARGS],
    )
    assert code == 2
    assert "bandwidth" in err


def test_log_spacing_rejects_nonpositive_endpoints(capsys):
    code, _, err = run_cli(
        capsys,
        ["sweep", "density", "--vary", "n", "--from", "0", "--to", "1e9",
         "--points", "3", "--nu", "1", "--c", "0.1", "--a", "0.5"],
    )
    assert code == 2
    assert "log spacing" in err


# --- sweep subcommand ---


def parse_sweep(out: str):
    lines = out.splitlines()
    assert lines[0].startswith("# manifest: ")
    manifest = json.loads(lines[0][len("# manifest: "):])
    assert lines[1] == ",".join(CSV_COLUMNS)
    rows = [line.split(",") for line in lines[2:]]
    return manifest, rows


def test_sweep_csv_shape_and_manifest(capsys):
    code, out, _ = run_cli(
        capsys,
        ["sweep", "density", "--vary", "n", "--from", "1e6", "--to", "1e14",
         "--points", "9", "--nu", "1", "--c", "0.1", "--a", "0.5"],
    )
    assert code == 0
    manifest, rows = parse_sweep(out)
    assert sorted(manifest) == ["command", "config", "seed", "timestamp", "version"]
    assert manifest["config"]["vary"] == "n"
    assert len(manifest["config"]["values"]) == 9
    assert len(rows) == 9
    eps = [float(r[1]) for r in rows]
    assert all(b >= a for a, b in zip(eps, eps[1:]))
    assert eps[-1] >= 0.99


def test_sweep_single_point_matches_bound(capsys):
    code, out, _ = run_cli(
        capsys,
        ["sweep", "density", "--vary", "n", "--values", "1e11",
         "--nu", "1", "--c", "0.1", "--a", "0.5"],
    )
    assert code == 0
    _, rows = parse_sweep(out)
    (row,) = rows
    rep = compute_bounds(DensityConfig(n=1e11, nu=1.0, c=0.1, a=0.5))
    assert row == [
        format_number(1e11),
        format_number(rep.strong.eps_lower),
        format_number(rep.fano.eps_lower),
        format_number(rep.strong.risk_lower),
        format_number(rep.fano.risk_lower),
        format_number(rep.ratio),
    ]


def test_sweep_rows_match_library_per_value(capsys):
    lams = [0.05, 0.2, 0.5, 1.0]
    code, out, _ = run_cli(
        capsys,
        ["sweep", "cs", "--vary", "lambda", "--values", ",".join(map(str, lams)),
         "--n", "1e6", "--k", "128", "--sigma2", "1", "--frob2", "1e6",
         "--delta", "0.05"],
    )
    assert code == 0
    _, rows = parse_sweep(out)
    for lam, row in zip(lams, rows):
        rep = compute_bounds(
            CsConfig(n=1e6, k=128.0, sigma_sq=1.0, frob_norm_sq=1e6, lam=lam, delta=0.05)
        )
        assert row[1] == format_number(rep.strong.eps_lower)
        assert row[5] == format_number(rep.ratio)


def test_sweep_empty_values_yields_header_only(capsys):
    code, out, _ = run_cli(
        capsys,
        ["sweep", "density", "--vary", "n", "--values", "", "--nu", "1",
         "--c", "0.1", "--a", "0.5"],
    )
    assert code == 0
    _, rows = parse_sweep(out)
    assert rows == []


def test_sweep_ratio_blank_when_undefined(capsys):
    # degenerate log M in (1, 2]: fano risk floors at zero, ratio column empty
    code, out, _ = run_cli(
        capsys,
        ["sweep", "cs", "--vary", "lambda", "--values", "0.5",
         "--n", "25", "--k", "4", "--sigma2", "1", "--frob2", "25", "--delta", "0.5"],
    )
    assert code == 0
    _, rows = parse_sweep(out)
    assert rows[0][5] == ""
    assert float(rows[0][4]) == 0.0


def test_thread_cap_does_not_change_output(capsys, monkeypatch):
    argv = ["sweep", "density", "--vary", "n", "--from", "1e6", "--to", "1e12",
            "--points", "7", "--nu", "1", "--c", "0.1", "--a", "0.5"]
    monkeypatch.delenv("CONVERSE_KIT_THREADS", raising=False)
    _, serial, _ = run_cli(capsys, argv)
    monkeypatch.setenv("CONVERSE_KIT_THREADS", "4")
    _, threaded, _ = run_cli(capsys, argv)
    assert strip_timestamp(serial) == strip_timestamp(threaded)


def test_thread_cap_rejects_garbage(capsys, monkeypatch):
    monkeypatch.setenv("CONVERSE_KIT_THREADS", "many")
    code, _, err = run_cli(
        capsys,
        ["sweep", "density", "--vary", "n", "--values", "1e8,1e9",
         "--nu", "1", "--c", "0.1", "--a", "0.5"],
    )
    assert code == 2
    assert "CONVERSE_KIT_THREADS" in err


# --- verify subcommand ---


def test_verify_packing_gv_case(capsys):
    code, out, _ = run_cli(capsys, ["verify", "packing", "--m", "12", "--dmin", "4"])
    assert code == 0
    assert "[ok]" in out
    assert "violation" not in out


def test_verify_divergence_small_run(capsys):
    code, out, _ = run_cli(capsys, ["verify", "divergence", "--count", "60", "--seed", "7"])
    assert code == 0
    assert "[ok]" in out and "0 failures" in out


def test_verify_soundness_small_run(capsys):
    code, out, _ = run_cli(capsys, ["verify", "soundness", "--count", "15", "--seed", "5"])
    assert code == 0
    assert "[ok]" in out and "0 failures" in out


def test_verify_packing_half_gv_flags_exits_2(capsys):
    code, _, err = run_cli(capsys, ["verify", "packing", "--m", "12"])
    assert code == 2
    assert "--dmin" in err


# --- formatting primitives ---


@pytest.mark.parametrize("x", [0.0, 1.0, -2.5, 0.1, 1e-300, 7.2388191917891245, 1e11])
def test_format_number_round_trips(x):
    assert float(format_number(x)) == x


@pytest.mark.parametrize("x", [math.inf, -math.inf, math.nan])
def test_format_number_non_finite(x):
    assert format_number(x) == "null"
