import csv
import math
import os

import pytest

from rissm.analytic import upep_cross_antenna
from rissm.channel import PhaseErrorSpec
from rissm.cli import (
    ANALYZE_HEADER,
    EXIT_DIVERGED,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    SIM_HEADER,
    VALIDATE_HEADER,
    analyze_rows,
    main,
    preset_curves,
    snr_grid,
)
from rissm.montecarlo import SimConfig

FAST = ["--max-trials", "20000", "--min-errors", "50", "--ris-elements", "16"]


def _read(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_snr_grid_inclusive():
    assert snr_grid(-10, 0, 2.5) == (-10.0, -7.5, -5.0, -2.5, 0.0)
    assert snr_grid(0, 1, 0.1)[-1] == 1.0
    assert snr_grid(5, 0, 1) == ()


def test_simulate_rows_and_header(tmp_path):
    out = tmp_path / "sim.csv"
    rc = main(["simulate", *FAST, "--snr-start", "-10", "--snr-stop", "0", "--snr-step", "5", "--out", str(out)])
    assert rc == EXIT_OK
    rows = _read(out)
    assert rows[0] == SIM_HEADER
    assert [r[0] for r in rows[1:]] == ["-10.00", "-5.00", "0.00"]
    for r in rows[1:]:
        assert float(r[1]) == pytest.approx(int(r[2]) / int(r[3]), rel=1e-6)
        assert r[4] == "0" and r[5] in ("", "insufficient_errors")
    raw = out.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")


def test_simulate_flags_unconverged_points(tmp_path):
    out = tmp_path / "sim.csv"
    main(["simulate", *FAST, "--snr-start", "100", "--snr-stop", "100", "--out", str(out)])
    assert _read(out)[1][5] == "insufficient_errors"


def test_simulate_byte_identical(tmp_path):
    args = ["simulate", *FAST, "--nt", "4", "--m", "4", "--seed", "99", "--snr-start", "-8", "--snr-stop", "0"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*args, "--out", str(a)]) == EXIT_OK
    assert main([*args, "--workers", "3", "--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_simulate_to_stdout(capsys):
    assert main(["simulate", *FAST, "--snr-start", "0", "--snr-stop", "0"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(SIM_HEADER) and len(lines) == 2


def test_analyze_ssk_is_cross_upep(tmp_path):
    out = tmp_path / "a.csv"
    rc = main(["analyze", "--m", "1", "--snr-start", "-40", "--snr-stop", "-20", "--snr-step", "10", "--out", str(out)])
    assert rc == EXIT_OK
    rows = _read(out)
    assert rows[0] == ANALYZE_HEADER
    for r in rows[1:]:
        expected = upep_cross_antenna(1, 1, 10 ** (float(r[0]) / 10), 100)
        assert float(r[1]) == pytest.approx(expected, rel=1e-6)
        assert r[2] == "64"


def test_analyze_honours_node_count(tmp_path):
    out = tmp_path / "a.csv"
    main(["analyze", "--gcq-nodes", "16", "--snr-start", "-30", "--snr-stop", "-30", "--out", str(out)])
    assert _read(out)[1][2] == "16"


def test_validate_passes_in_clt_regime(tmp_path):
    out = tmp_path / "v.csv"
    rc = main(
        ["validate", "--m", "1", "--ris-elements", "160", "--snr-start", "-45", "--snr-stop", "-39",
         "--snr-step", "3", "--out", str(out)]
    )
    rows = _read(out)
    assert rows[0] == VALIDATE_HEADER
    assert rc == EXIT_OK
    assert all(r[6] == "pass" for r in rows[1:])


def test_validate_flags_small_surfaces(tmp_path):
    out = tmp_path / "v.csv"
    rc = main(
        ["validate", "--m", "1", "--ris-elements", "10", "--snr-start", "0", "--snr-stop", "5",
         "--snr-step", "5", "--min-errors", "300", "--out", str(out)]
    )
    assert rc == EXIT_DIVERGED
    assert any(r[6] == "diverged" for r in _read(out)[1:])


def test_validate_empty_grid(tmp_path):
    out = tmp_path / "v.csv"
    rc = main(["validate", "--snr-start", "0", "--snr-stop", "-1", "--out", str(out)])
    assert rc == EXIT_OK
    assert _read(out) == [VALIDATE_HEADER]


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nnt = 4\nm = 4\nris_elements = 16\nsnr-start = -6\nsnr-stop = 0\nsnr-step = 3\n"
                   "max-trials = 1e4\nseed = 5\n")
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--config", str(cfg), "--seed", "6", "--out", str(out)]) == EXIT_OK
    rows = _read(out)
    assert [r[0] for r in rows[1:]] == ["-6.00", "-3.00", "0.00"]
    assert all(r[4] == "6" for r in rows[1:])
    # 4 antennas x QPSK = 4 bits per trial
    assert all(int(r[3]) % 4 == 0 for r in rows[1:])


@pytest.mark.parametrize(
    "args",
    [
        ["simulate", "--nt", "3"],
        ["simulate", "--mod", "qam", "--m", "8"],
        ["simulate", "--snr-step", "0"],
        ["simulate", "--phase-error", "gauss"],
        ["analyze", "--gcq-nodes", "0"],
        ["simulate", "--seed", "-4"],
    ],
)
def test_usage_errors(args, capsys):
    assert main(args) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["simulate", "--config", str(cfg)]) == EXIT_USAGE


def test_argparse_rejects_unknown_flag():
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--bogus"])
    assert info.value.code == EXIT_USAGE


def test_missing_config_is_io_error(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "none.cfg")]) == EXIT_IO


def test_unwritable_output_is_io_error(tmp_path):
    out = tmp_path / "missing" / "sim.csv"
    assert main(["simulate", *FAST, "--snr-start", "0", "--snr-stop", "0", "--out", str(out)]) == EXIT_IO


def _base():
    return SimConfig(N_t=2, M=2, L=100, snr_db=(-30.0,))


def test_preset_fig2_parameters():
    curves = preset_curves(2, _base())
    assert [c.L for _, c, _ in curves] == [10, 20, 40, 80, 160]
    assert all(c.N_t == 2 and c.M == 1 and a for _, c, a in curves)


def test_preset_fig3_bound_grows_with_order():
    curves = preset_curves(3, _base())
    assert [c.M for _, c, _ in curves] == [2, 4, 8]
    assert all(c.N_t == 2 and c.L == 100 for _, c, _ in curves)
    vals = [analyze_rows(c, 64)[0][0] for _, c, _ in curves]
    assert vals[0] < vals[1] < vals[2]


def test_preset_fig4_minimal_degradation():
    curves = preset_curves(4, _base())
    assert [c.N_t for _, c, _ in curves] == [4, 16]
    assert all(c.M == 2 and c.L == 100 for _, c, _ in curves)
    for snr in (-35.0, -25.0, -15.0):
        lo, hi = (analyze_rows(SimConfig(**{**c.__dict__, "snr_db": (snr,)}), 64)[0][0] for _, c, _ in curves)
        assert 1 <= hi / lo < 10


def test_preset_fig5_parameters():
    curves = preset_curves(5, _base())
    kinds = [c.phase_error for _, c, _ in curves]
    assert kinds == [PhaseErrorSpec.ideal()] + [PhaseErrorSpec.uniform(k) for k in (2, 4, 8)] + [PhaseErrorSpec.random()]
    assert all(c.N_t == 2 and c.M == 2 and c.L == 100 for _, c, _ in curves)
    assert [a for _, _, a in curves] == [True, False, False, False, False]


def test_reproduce_writes_one_file_per_curve(tmp_path):
    rc = main(
        ["reproduce", "--figure", "4", "--snr-start", "-20", "--snr-stop", "-20", "--max-trials", "2000",
         "--out", str(tmp_path)]
    )
    assert rc == EXIT_OK
    names = sorted(os.listdir(tmp_path))
    assert names == ["fig4_Nt16_analytic.csv", "fig4_Nt16_sim.csv", "fig4_Nt4_analytic.csv", "fig4_Nt4_sim.csv"]
    rows = _read(tmp_path / "fig4_Nt16_sim.csv")
    assert rows[0] == SIM_HEADER and len(rows) == 2
    # 16 antennas x BPSK
    assert int(rows[1][3]) == 2000 * 5


def test_reproduce_rejects_unknown_figure():
    with pytest.raises(SystemExit):
        main(["reproduce", "--figure", "7"])


def test_formatting_precision(tmp_path):
    out = tmp_path / "a.csv"
    main(["analyze", "--snr-start", "-30.125", "--snr-stop", "-30.125", "--out", str(out)])
    snr, bound, _ = _read(out)[1]
    assert snr == "-30.12"
    mantissa, exp = bound.split("e")
    assert len(mantissa.split(".")[1]) == 6 and math.isfinite(float(bound))
