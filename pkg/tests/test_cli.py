import subprocess
import sys

import pytest

from twirlsim.cli import build_parser, main, sweep_config_from_args
from twirlsim.protocol import SimMode
from twirlsim.report import read_csv


def test_check_command_passes(capsys):
    assert main(["check"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 7 and "FAIL" not in out


def test_twirl_command_prints_tables(capsys):
    assert main(["twirl", "--t1", "25e-6", "--t2", "25e-6", "--gate-error", "0.01", "--phi", "0.7"]) == 0
    out = capsys.readouterr().out
    assert "closed form" in out and "twirl" in out
    assert "XY" in out and "ZZ" in out


def test_sweep_flags_override_config_file(tmp_path):
    cfg_file = tmp_path / "s.cfg"
    cfg_file.write_text("t2_ratio = 2\ntrials = 500\nseed = 4\n")
    args = build_parser().parse_args([
        "sweep", "--config", str(cfg_file), "--seed", "11", "--mode", "exact", "--mode", "bound",
        "--p-steps", "1e-3,1e-2", "--no-wall-time",
    ])
    cfg = sweep_config_from_args(args)
    assert cfg.t2_ratio == 2 and cfg.trials == 500 and cfg.seed == 11
    assert cfg.modes == [SimMode.EXACT, SimMode.BOUND]
    assert cfg.p_steps == [1e-3, 1e-2] and not cfg.record_wall_time


def test_sweep_writes_csv_and_svg(tmp_path, capsys):
    csv_path, svg_path = tmp_path / "out.csv", tmp_path / "out.svg"
    code = main(["sweep", "--p-steps", "1e-3,1e-2", "--gate-errors", "0,1e-2", "--phi", "0.785",
                 "--no-wall-time", "--out-csv", str(csv_path), "--out-svg", str(svg_path)])
    assert code == 0
    res = read_csv(csv_path)
    assert len(res) == 8
    assert svg_path.read_text().lstrip().startswith("<?xml")


def test_unknown_mode_rejected():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["sweep", "--mode", "magic"])


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "twirlsim", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "sweep" in out.stdout
