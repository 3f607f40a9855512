import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twirlsim.protocol import SimMode
from twirlsim.report import emit_csv
from twirlsim.sweep import (
    SweepConfig,
    SweepPointError,
    default_pstep_grid,
    invert_pstep,
    load_config,
    p_step,
    parse_value,
    run_sweep,
)


def test_default_grid():
    grid = default_pstep_grid()
    assert len(grid) == 13
    assert grid[0] == pytest.approx(1e-4) and grid[-1] == pytest.approx(1e-1)


def test_invert_pstep_near_isotropic_estimate():
    T1 = invert_pstep(7.5e-4)
    # small-error estimate 3 t_step / (4 T1) gives 25 us
    assert T1 == pytest.approx(25e-6, rel=1e-3)
    assert p_step(T1) == pytest.approx(7.5e-4, abs=1e-12)


@pytest.mark.parametrize("ratio", [1.0, 2.0, 0.5])
@pytest.mark.parametrize("target", default_pstep_grid())
def test_invert_pstep_round_trip(target, ratio):
    T1 = invert_pstep(target, ratio)
    assert abs(p_step(T1, ratio) - target) <= 1e-12


def test_small_target_means_long_t1():
    assert invert_pstep(1e-9) > 1e3 * invert_pstep(1e-6)


@settings(max_examples=40, deadline=None)
@given(st.floats(-6, -0.7), st.floats(0.01, 0.99))
def test_invert_pstep_monotone(log_target, factor):
    lo, hi = 10**log_target * factor, 10**log_target
    assert invert_pstep(lo) > invert_pstep(hi)


def test_invert_pstep_unreachable():
    # p_step saturates at 3/4 when T1 -> 0 with T2 = T1
    with pytest.raises(ValueError):
        invert_pstep(0.8)
    with pytest.raises(ValueError):
        invert_pstep(0.0)


def small_config(**kw):
    base = dict(p_steps=[1e-3, 1e-2], gate_errors=[0.0, 1e-2], record_wall_time=False)
    base.update(kw)
    return SweepConfig(**base)


def test_zero_error_point_all_modes():
    cfg = small_config(p_steps=[0.0], gate_errors=[0.0], modes=list(SimMode), trials=200)
    res = run_sweep(cfg)
    assert [r.mode for r in res.rows] == [m.value for m in SimMode]
    assert all(r.P == pytest.approx(0, abs=1e-10) for r in res.rows)


def test_row_order_and_adjacency():
    cfg = small_config()
    res = run_sweep(cfg)
    assert len(res) == 2 * 2 * 2
    keys = [(r.E, r.p_step, r.mode) for r in res.rows]
    assert keys == [(E, p, m) for E in cfg.gate_errors for p in cfg.p_steps for m in ("exact", "pta")]
    for r in res.rows:
        assert 0 <= r.P <= 1 and r.err >= 0 and r.wall_s == 0.0
    assert len(res.select(mode="pta")) == 4


def test_decoherence_only_sweep_pta_tracks_exact():
    res = run_sweep(small_config(gate_errors=[0.0]))
    for ex, pt in zip(res.select(mode="exact"), res.select(mode="pta")):
        assert abs(pt.P - ex.P) / ex.P <= 0.05


def test_csv_identical_across_thread_counts(tmp_path):
    cfg = small_config(modes=[SimMode.EXACT, SimMode.MONTE_CARLO], trials=300, seed=5)
    emit_csv(run_sweep(cfg, threads=1), tmp_path / "a.csv")
    emit_csv(run_sweep(cfg, threads=4), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_point_errors_carry_context():
    cfg = small_config(p_steps=[0.9], gate_errors=[0.0])
    with pytest.raises(SweepPointError, match=r"p_step=0.9"):
        run_sweep(cfg)


def test_parse_value():
    assert parse_value("p_steps", "1e-3, 1e-2") == [1e-3, 1e-2]
    assert parse_value("modes", "exact,mc") == [SimMode.EXACT, SimMode.MONTE_CARLO]
    assert parse_value("phi", "0.785") == 0.785
    assert parse_value("record_wall_time", "no") is False
    with pytest.raises(KeyError):
        parse_value("bogus", "1")


def test_load_config(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text("# figure settings\nt2_ratio = 0.5\nphi = 0.7853981633974483  # pi/4\n"
                    "gate_errors = 0, 1e-3\nseed = 9\n\n")
    cfg = load_config(path)
    assert cfg.t2_ratio == 0.5 and cfg.phi == pytest.approx(math.pi / 4)
    assert cfg.gate_errors == [0.0, 1e-3] and cfg.seed == 9
    assert cfg.p_steps == default_pstep_grid()


def test_load_config_rejects_bad_lines(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("t2_ratio 0.5\n")
    with pytest.raises(ValueError, match="bad.cfg:1"):
        load_config(path)
    path.write_text("colour = red\n")
    with pytest.raises((KeyError, ValueError)):
        load_config(path)
