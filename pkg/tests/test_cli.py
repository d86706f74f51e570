"""Command-line surface: exit codes, file formats, and report contents."""

import csv
import json
import math

import pytest

from specquant.cli import (EXIT_BAD_FILE, EXIT_DOMAIN, EXIT_NO_CONVERGENCE,
                           EXIT_OK, EXIT_PARTIAL, EXIT_TOLERANCE, EXIT_USAGE,
                           load_spectrum, main, save_spectrum)
from specquant import ZeroTail


@pytest.fixture(scope="session")
def q4_path(tmp_path_factory):
    """Converged m=4 spectrum produced through the real command line."""
    path = str(tmp_path_factory.mktemp("spec") / "q4.json")
    code = main(["quantize", "--m", "4", "--levels", "24", "--tol", "1e-10",
                 "--mode", "ode", "--out", path])
    assert code == EXIT_OK
    return path


def test_quantize_writes_valid_file(q4_path):
    data = load_spectrum(q4_path)
    assert data["converged"] is True
    assert data["alpha"] == pytest.approx(math.pi / 3, rel=1e-15)
    assert data["phase_offset"] == pytest.approx(math.pi / 6, rel=1e-15)
    assert data["m"] == 4.0
    levels = data["levels"]
    assert len(levels) == 24
    assert all(b > a for a, b in zip(levels, levels[1:]))
    prov = data["provenance"]
    assert "command" in prov and "sign_convention" in prov
    assert "mode" in prov and "tolerance" in prov


def test_spectrum_roundtrip_bit_exact(q4_path, tmp_path):
    data = load_spectrum(q4_path)
    copy = str(tmp_path / "copy.json")
    tail = data["tail"]
    save_spectrum(copy, alpha=data["alpha"], phase_offset=data["phase_offset"],
                  levels=data["levels"],
                  tail=None if tail is None else ZeroTail(
                      amplitude=tail["amplitude"], exponent=tail["exponent"],
                      shift=tail["shift"], start_index=tail["start_index"]),
                  residual=data["residual"], iterations=data["iterations"],
                  converged=data["converged"], m=data.get("m"))
    again = load_spectrum(copy)
    assert again["alpha"] == data["alpha"]
    assert again["phase_offset"] == data["phase_offset"]
    assert again["levels"] == data["levels"]
    assert again["residual"] == data["residual"]
    assert again["tail"] == data["tail"]


def test_quantize_flag_validation(tmp_path):
    out = str(tmp_path / "x.json")
    # both selectors
    assert main(["quantize", "--m", "4", "--alpha", "1.0",
                 "--out", out]) == EXIT_USAGE
    # neither
    assert main(["quantize", "--out", out]) == EXIT_USAGE
    # alpha outside (0, pi/2)
    assert main(["quantize", "--alpha", "1.6", "--out", out]) == EXIT_DOMAIN
    # m below 2
    assert main(["quantize", "--m", "1.5", "--out", out]) == EXIT_DOMAIN


def test_quantize_nonconvergence_still_writes(tmp_path):
    out = str(tmp_path / "nc.json")
    code = main(["quantize", "--m", "4", "--levels", "8", "--tol", "1e-13",
                 "--max-iter", "3", "--out", out])
    assert code == EXIT_NO_CONVERGENCE
    data = load_spectrum(out)
    assert data["converged"] is False


def test_verify_passes_on_converged(q4_path, tmp_path):
    report_path = str(tmp_path / "report.json")
    assert main(["verify", "--in", q4_path, "--report", report_path]) == EXIT_OK
    with open(report_path) as fh:
        report = json.load(fh)
    assert report["verdict"] == "pass"
    assert "sign_convention" in report
    assert "command" in report["provenance"]
    for name in ("fixed_point_defect", "c_zeros_negative",
                 "d_zero_unit_modulus", "positive_axis_gap",
                 "identity_weighted", "origin_constants", "witness_rays"):
        assert name in report["clauses"], name
        assert report["clauses"][name]["status"] in ("passed", "skipped")


def test_verify_rejects_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema_version": 1, "alpha": 1.0')
    assert main(["verify", "--in", str(bad)]) == EXIT_BAD_FILE
    missing = tmp_path / "missing.json"
    missing.write_text('{"schema_version": 1, "alpha": 1.0}')
    assert main(["verify", "--in", str(missing)]) == EXIT_BAD_FILE
    assert main(["verify", "--in", str(tmp_path / "nope.json")]) == EXIT_BAD_FILE


def test_verify_catches_tampered_levels(q4_path, tmp_path):
    with open(q4_path) as fh:
        data = json.load(fh)
    data["levels"][0] *= 1.01
    tampered = str(tmp_path / "tampered.json")
    with open(tampered, "w") as fh:
        json.dump(data, fh)
    assert main(["verify", "--in", tampered]) == EXIT_TOLERANCE


def test_theorem1_csv(q4_path, tmp_path):
    out = str(tmp_path / "witness.csv")
    assert main(["theorem1", "--in", q4_path, "--out-csv", out]) == EXIT_OK
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["index", "re", "im", "method", "ray", "deviation"]
    assert len(rows) >= 3
    kinds = {row[3] for row in rows[1:]}
    assert kinds == {"witness-zero", "witness-one-point"}
    for row in rows[1:]:
        assert float(row[5]) < 1e-6
        assert int(row[4]) in (-1, 0, 1)


def test_theorem1_rejects_large_alpha(tmp_path):
    out = str(tmp_path / "a.json")
    code = main(["quantize", "--alpha", str(0.4 * math.pi), "--levels", "12",
                 "--tol", "1e-9", "--mode", "ode", "--out", out])
    assert code == EXIT_OK
    assert main(["theorem1", "--in", out]) == EXIT_DOMAIN


def test_oracle_spectrum_csv(capsys):
    assert main(["oracle", "--m", "2", "--ell", "1", "--count", "4",
                 "--what", "spectrum"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    header = lines[0].split(",")
    assert header == ["index", "re", "im", "method"]
    values = [float(line.split(",")[1]) for line in lines[1:]]
    assert values == pytest.approx([1.0, 3.0, 5.0, 7.0], rel=1e-7)
    for line in lines[1:]:
        assert line.split(",")[3] == "oracle"


def test_oracle_point_value(capsys):
    assert main(["oracle", "--m", "4", "--what", "C0",
                 "--lambda", "0"]) == EXIT_OK
    out = capsys.readouterr().out
    value = complex(out.strip().split()[-1])
    assert value == pytest.approx(math.sqrt(3.0), abs=1e-12)


def test_oracle_domain_checks():
    assert main(["oracle", "--m", "1.5", "--ell", "1", "--count", "2",
                 "--what", "spectrum"]) == EXIT_DOMAIN


def test_usage_errors_are_64():
    assert main(["oracle", "--what", "spectrum"]) == EXIT_USAGE  # no --m
    assert main(["nonsense"]) == EXIT_USAGE
    assert main(["quantize", "--m", "4", "--levels", "not-a-number",
                 "--out", "x.json"]) == EXIT_USAGE


def test_crosscheck_against_oracle(q4_path):
    assert main(["crosscheck", "--in", q4_path, "--count", "3",
                 "--rtol", "1e-3"]) == EXIT_OK


def test_crosscheck_partial_when_window_exhausted(q4_path, tmp_path):
    # a file with fewer levels than the requested comparison count can
    # only support a partial report
    with open(q4_path) as fh:
        data = json.load(fh)
    data["levels"] = data["levels"][:6]
    # the fitted power law is global, so the tail can be retargeted to
    # continue the shortened list
    data["tail"]["start_index"] = 7
    short = str(tmp_path / "short.json")
    with open(short, "w") as fh:
        json.dump(data, fh)
    code = main(["crosscheck", "--in", short, "--count", "8",
                 "--rtol", "0.05"])
    assert code == EXIT_PARTIAL


def test_crosscheck_m_mismatch(q4_path):
    assert main(["crosscheck", "--in", q4_path, "--m", "5",
                 "--count", "2", "--rtol", "1e-4"]) == EXIT_DOMAIN
