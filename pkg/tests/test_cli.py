"""Command-line behavior: outputs, round-trips, determinism, exit codes."""

import json
from pathlib import Path

from click.testing import CliRunner

from renorm import diagrams as dg
from renorm import tables
from renorm.cli import main

RUNNER = CliRunner()


def _write_config(tmp_path: Path, overrides: dict) -> Path:
    cfg = {
        "s_grid": {"min": 0.0, "max": 2.0, "count": 3},
        "lambda_grid": {"min": 1e2, "max": 1e4, "count": 3},
        "n_grid": {"min": 5, "max": 50, "count": 2},
        "theta_grid": {"min": 0.0, "max": 1.0, "count": 2},
        "mc": {"samples": 20000, "seed": 11},
        "out": str(tmp_path / "out"),
    }
    cfg.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return path


def test_spectrum_report_harmonic(tmp_path):
    cfg = _write_config(tmp_path, {})
    result = RUNNER.invoke(main, ["--config", str(cfg), "spectrum"])
    assert result.exit_code == 0, result.output
    assert "B1: no" in result.output
    assert "B2: yes" in result.output
    assert "b2: 1.644934" in result.output
    assert "kappa: 0.577215" in result.output
    assert (tmp_path / "out" / "spectrum_report.csv").exists()


def test_spectrum_report_summable_spectrum(tmp_path):
    cfg = _write_config(
        tmp_path, {"spectrum": {"family": "power_law", "c": 1.0, "p": 2.0}}
    )
    result = RUNNER.invoke(main, ["--config", str(cfg), "spectrum"])
    assert result.exit_code == 0, result.output
    assert "singular_part: 0 (reciprocal sum already converges)" in result.output
    assert "B1: yes" in result.output


def test_malformed_config_exits_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{ not json", encoding="utf-8")
    result = RUNNER.invoke(main, ["--config", str(path), "spectrum"])
    assert result.exit_code == 2
    assert "config parse error" in result.output


def test_unknown_config_key_exits_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"mystery_knob": 1}), encoding="utf-8")
    result = RUNNER.invoke(main, ["--config", str(path), "phi"])
    assert result.exit_code == 2
    assert "unknown config keys" in result.output


def test_invalid_grid_exits_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"s_grid": {"min": 0.0, "max": 1.0, "count": 0}}))
    result = RUNNER.invoke(main, ["--config", str(path), "phi"])
    assert result.exit_code == 2
    assert "count" in result.output


def test_nonpositive_coupling_exits_2(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"lambda": -1.0}))
    result = RUNNER.invoke(main, ["--config", str(path), "z"])
    assert result.exit_code == 2


def test_divergent_series_request_exits_2(tmp_path):
    # a spectrum outside every convergence class cannot feed the tables
    cfg = _write_config(
        tmp_path, {"spectrum": {"family": "power_law", "c": 1.0, "p": 0.2}}
    )
    result = RUNNER.invoke(main, ["--config", str(cfg), "z"])
    assert result.exit_code == 2


def test_oscillation_budget_exit_3(tmp_path):
    cfg = _write_config(
        tmp_path,
        {
            "n_grid": {"min": 2000, "max": 2000, "count": 1},
            "quadrature": {"max_nodes": 64},
        },
    )
    result = RUNNER.invoke(main, ["--config", str(cfg), "z"])
    assert result.exit_code == 3
    assert "nodes" in result.output


def test_phi_scan_structure(tmp_path):
    cfg = _write_config(tmp_path, {})
    result = RUNNER.invoke(main, ["--config", str(cfg), "phi"])
    assert result.exit_code == 0, result.output
    header, rows = tables.read_csv(tmp_path / "out" / "phi_scan.csv")
    assert header == ["variant", "n", "Lambda", "theta", "s", "re", "im", "modulus", "phase"]
    at_zero = [r for r in rows if r[4] == 0]
    assert at_zero and all(r[7] == 1 and r[8] == 0 for r in at_zero)
    variants = {r[0] for r in rows}
    assert variants == {"finite", "flow", "renormalized"}


def test_z_tables(tmp_path):
    cfg = _write_config(tmp_path, {})
    result = RUNNER.invoke(main, ["--config", str(cfg), "z"])
    assert result.exit_code == 0, result.output
    _, decay = tables.read_csv(tmp_path / "out" / "z_decay.csv")
    for _, z_n, bound in decay:
        assert abs(z_n) <= bound
    header, profile = tables.read_csv(tmp_path / "out" / "z_theta.csv")
    assert header == ["theta", "z_renormalized"]
    assert len(profile) == 2
    _, mc_rows = tables.read_csv(tmp_path / "out" / "z_mc.csv")
    assert all(row[2] > 0 for row in mc_rows)


def test_flow_tables_monotone(tmp_path):
    cfg = _write_config(tmp_path, {})
    result = RUNNER.invoke(main, ["--config", str(cfg), "flow"])
    assert result.exit_code == 0, result.output
    _, phi_rows = tables.read_csv(tmp_path / "out" / "flow_phi.csv")
    dists = [row[5] for row in phi_rows]
    assert all(b < a for a, b in zip(dists, dists[1:]))
    header, z_rows = tables.read_csv(tmp_path / "out" / "flow_z.csv")
    assert header == ["Lambda", "lambda", "theta", "z_flow", "z_renormalized", "abs_error", "z_regularized"]
    errs = [row[5] for row in z_rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_diagrams_outputs(tmp_path):
    cfg = _write_config(tmp_path, {"order": 3})
    result = RUNNER.invoke(main, ["--config", str(cfg), "diagrams"])
    assert result.exit_code == 0, result.output
    moments_path = tmp_path / "out" / "moments.json"
    moments = tables.read_json(moments_path)
    assert [m["k"] for m in moments] == [0, 1, 2, 3]
    assert moments[1]["moment"] == dg.wick_moment(1).to_json_obj()
    assert moments[3]["moment"] == dg.wick_moment(3).to_json_obj()
    tables.write_json(tmp_path / "again.json", moments)
    assert (tmp_path / "again.json").read_bytes() == moments_path.read_bytes()
    _, verdicts = tables.read_csv(tmp_path / "out" / "renorm_identity.csv")
    assert all(v is True for _, v in verdicts)
    # harmonic spectrum: plain series hit the divergent first loop value
    _, phi_series = tables.read_csv(tmp_path / "out" / "series_phi.csv")
    assert phi_series[0][1] == 1
    assert phi_series[1][1] == "infinite"
    _, renorm_series = tables.read_csv(tmp_path / "out" / "series_phi_renorm.csv")
    assert all(isinstance(v, (int, float)) for _, v in renorm_series)


def test_diagrams_order_flag_overrides(tmp_path):
    cfg = _write_config(tmp_path, {"order": 3})
    result = RUNNER.invoke(main, ["--config", str(cfg), "diagrams", "--order", "1"])
    assert result.exit_code == 0, result.output
    moments = tables.read_json(tmp_path / "out" / "moments.json")
    assert [m["k"] for m in moments] == [0, 1]


def test_emitted_files_round_trip(tmp_path):
    cfg = _write_config(tmp_path, {})
    result = RUNNER.invoke(main, ["--config", str(cfg), "z"])
    assert result.exit_code == 0, result.output
    for name in ("z_decay.csv", "z_theta.csv", "z_mc.csv"):
        path = tmp_path / "out" / name
        first = path.read_bytes()
        header, rows = tables.read_csv(path)
        again = tmp_path / ("again_" + name)
        tables.write_csv(again, header, rows)
        assert again.read_bytes() == first


def test_scan_outputs_deterministic(tmp_path):
    cfg = _write_config(tmp_path, {})
    out1 = tmp_path / "a"
    out2 = tmp_path / "b"
    out3 = tmp_path / "c"
    r1 = RUNNER.invoke(main, ["--config", str(cfg), "--out", str(out1), "--seed", "5", "phi"])
    r2 = RUNNER.invoke(main, ["--config", str(cfg), "--out", str(out2), "--seed", "5", "phi"])
    r3 = RUNNER.invoke(
        main,
        ["--config", str(cfg), "--out", str(out3), "--seed", "5", "--threads", "3", "phi"],
    )
    assert r1.exit_code == 0 and r2.exit_code == 0 and r3.exit_code == 0
    first = (out1 / "phi_scan.csv").read_bytes()
    assert (out2 / "phi_scan.csv").read_bytes() == first
    # worker threads must not change values or row order
    assert (out3 / "phi_scan.csv").read_bytes() == first


def test_json_format_option(tmp_path):
    cfg = _write_config(tmp_path, {"format": "json"})
    result = RUNNER.invoke(main, ["--config", str(cfg), "z"])
    assert result.exit_code == 0, result.output
    rows = tables.read_json(tmp_path / "out" / "z_decay.json")
    assert {"n", "z_n", "bound"} == set(rows[0])


def test_explicit_tail_spectrum_through_cli(tmp_path):
    cfg = _write_config(
        tmp_path,
        {
            "spectrum": {
                "family": "explicit_tail",
                "head": [4.0, 0.5],
                "tail_c": 1.0,
                "tail_p": 1.0,
            },
            "format": "json",
        },
    )
    result = RUNNER.invoke(main, ["--config", str(cfg), "flow"])
    assert result.exit_code == 0, result.output
    rows = tables.read_json(tmp_path / "out" / "flow_phi.json")
    dists = [row["distance_to_limit"] for row in rows]
    assert all(b < a for a, b in zip(dists, dists[1:]))


def test_verify_list():
    result = RUNNER.invoke(main, ["verify", "--list"])
    assert result.exit_code == 0
    lines = [ln for ln in result.output.splitlines() if ln.strip()]
    assert len(lines) == 12
    assert any("determinism" in ln for ln in lines)


def test_verify_runs_are_byte_identical(tmp_path):
    out1 = tmp_path / "v1"
    out2 = tmp_path / "v2"
    r1 = RUNNER.invoke(main, ["--out", str(out1), "--seed", "321", "verify"])
    r2 = RUNNER.invoke(main, ["--out", str(out2), "--seed", "321", "verify"])
    rep1 = (out1 / "verify_report.txt").read_bytes()
    rep2 = (out2 / "verify_report.txt").read_bytes()
    assert rep1 == rep2

    def report_lines(output):
        # everything except the output-path echo is seed-determined
        return [ln for ln in output.splitlines() if not ln.startswith("wrote ")]

    assert report_lines(r1.output) == report_lines(r2.output)
    # exit code follows the pass count in the report
    expected = 0 if b"result: 12/12" in rep1 else 1
    assert r1.exit_code == expected
    assert r2.exit_code == expected
