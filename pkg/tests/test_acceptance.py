"""Acceptance criteria 1-12, one test each.

Each test records a PASS/FAIL line (printed with ``-s`` and repeated in the
terminal summary) and then asserts the same condition.
"""

import math
import time

import numpy as np
import pytest

from twirlsim import qlin
from twirlsim.channels import (
    CZErrorParams,
    DecoherenceParams,
    avg_gate_fidelity,
    decoherence_channel,
    leading_order_gate_error,
    nonideal_cz,
    split_gate_error,
    tensor_channel,
)
from twirlsim.checks import random_cz, random_decoherence
from twirlsim.protocol import (
    ProtocolConfig,
    SimMode,
    run_enumeration,
    run_montecarlo_pta,
    run_trial,
    trial_rng,
)
from twirlsim.report import emit_csv
from twirlsim.sweep import SweepConfig, decoherence_for, default_pstep_grid, invert_pstep, run_sweep
from twirlsim.twirl import cz_error_channel, pta, pta_cz, pta_decoherence, tphi_crit, twirl_numeric

from helpers import random_kraus_channel

GRID_P = (1e-3, 1e-2)
GRID_E = (1e-3, 1e-2)


def config(pstep, E=0.0, phi=0.0, ratio=1.0, mode=SimMode.EXACT):
    dec = decoherence_for(invert_pstep(pstep, ratio), ratio, 0.0, 25e-9)
    return ProtocolConfig(dec=dec, cz=split_gate_error(E, phi), mode=mode)


def rel_gap(pstep, E=0.0, phi=0.0, ratio=1.0):
    ex = run_enumeration(config(pstep, E, phi, ratio, SimMode.EXACT)).P
    pt = run_enumeration(config(pstep, E, phi, ratio, SimMode.PTA)).P
    return ex, pt, abs(pt - ex) / ex


def test_criterion_01_closed_forms_match_literal_twirl(criterion):
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    dec_dev = max(np.abs(pta_decoherence(p).as_array()
                         - twirl_numeric(decoherence_channel(p)).as_array()).max()
                  for p in (random_decoherence(rng) for _ in range(100)))
    cz_dev = max(np.abs(pta_cz(p).as_array() - twirl_numeric(cz_error_channel(p)).as_array()).max()
                 for p in (random_cz(rng) for _ in range(100)))
    elapsed = time.perf_counter() - start
    ok = dec_dev <= 1e-12 and cz_dev <= 1e-12 and elapsed < 5
    criterion(1, ok, f"decoherence {dec_dev:.1e}, CZ {cz_dev:.1e} (tol 1e-12), {elapsed:.2f} s (< 5 s)")
    assert ok


def test_criterion_02_probability_conservation(criterion):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        d1 = decoherence_channel(random_decoherence(rng))
        d2 = decoherence_channel(random_decoherence(rng))
        for ch in (d1, tensor_channel([d1, d2]), cz_error_channel(random_cz(rng)),
                   random_kraus_channel(1, rng), random_kraus_channel(2, rng)):
            worst = max(worst, abs(pta(ch).total() - 1))
    ok = worst <= 1e-12
    criterion(2, ok, f"max |sum p_A - 1| = {worst:.1e} over 500 channels (tol 1e-12)")
    assert ok


def test_criterion_03_depolarizing_crossover(criterion):
    worst = 0.0
    for alpha in (0.0, 0.5, 1.0):
        for T1 in (1e-6, 25e-6, 1e-3):
            tc = tphi_crit(T1, alpha, 25e-9)
            pc = pta_decoherence(DecoherenceParams(T1=T1, t_step=25e-9, Tphi=tc, alpha=alpha))
            vals = (pc["X"], pc["Y"], pc["Z"])
            worst = max(worst, max(vals) - min(vals))
    markov = all(tphi_crit(T1, 0.0, 25e-9) == 2 * T1 for T1 in (1e-6, 25e-6, 1e-3))
    ok = worst <= 1e-12 and markov
    criterion(3, ok, f"max |p_a - p_b| = {worst:.1e} (tol 1e-12), alpha=0 gives 2 T1 exactly: {markov}")
    assert ok


def test_criterion_04_cz_model(criterion):
    worst_u = 0.0
    for E1 in np.linspace(0, 1, 10):
        for delta in np.linspace(-math.pi, math.pi, 10):
            for phi in np.linspace(0, 2 * math.pi, 10):
                u = nonideal_cz(CZErrorParams(E1, delta, phi))
                worst_u = max(worst_u, np.abs(u.conj().T @ u - np.eye(4)).max())
    ideal = avg_gate_fidelity(qlin.CZ, qlin.CZ)
    worst_rel = 0.0
    for E in np.logspace(-4, -2, 9):
        for phi in (0.0, math.pi / 4, math.pi / 2):
            p = split_gate_error(E, phi)
            err = 1 - avg_gate_fidelity(nonideal_cz(p), qlin.CZ)
            worst_rel = max(worst_rel, abs(err - leading_order_gate_error(p.E1, p.delta)) / err)
    ok = worst_u <= 1e-12 and ideal == 1.0 and worst_rel <= 0.02
    criterion(4, ok, f"unitarity {worst_u:.1e} on 10^3 grid, F(CZ,CZ) = {ideal!r}, "
                     f"leading-order gap {worst_rel:.2%} (tol 2%)")
    assert ok


def test_criterion_05_zero_error_protocol(criterion):
    start = time.perf_counter()
    Ps, histories = [], []
    for mode in SimMode:
        cfg = ProtocolConfig(mode=mode)
        if mode is SimMode.MONTE_CARLO:
            est = run_montecarlo_pta(cfg, 0, 100)
        else:
            est = run_enumeration(cfg)
        Ps.append(est.P)
        out = run_trial(cfg, trial_rng(0, 0))
        histories.append(out.syndrome_history == ((0, 0),) * 3 and est.cycles_mean == 3)
    elapsed = time.perf_counter() - start
    ok = max(Ps) <= 1e-10 and all(histories) and elapsed < 1
    criterion(5, ok, f"max P = {max(Ps):.1e} (tol 1e-10), 3 cycles of (0,0) in all 4 modes: "
                     f"{all(histories)}, {elapsed:.2f} s (< 1 s)")
    assert ok


def test_criterion_06_syndrome_table(criterion):
    expected = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
    bad = []
    for q in (0, 1):
        for letter, syn in expected.items():
            label = "".join(letter if i == q else "I" for i in range(4))
            out = run_trial(ProtocolConfig(), trial_rng(0, 0), injections={1: label})
            if out.final_syndrome != syn or abs(out.p_B - 1) > 1e-12:
                bad.append(label)
    ok = not bad
    criterion(6, ok, "six injected data Paulis map to the Bell table with p_B = 1"
              if ok else f"mismatch for {bad}")
    assert ok


def test_criterion_07_pta_decoherence_only(criterion):
    parts, ok = [], True
    for pstep in GRID_P:
        start = time.perf_counter()
        ex, pt, gap = rel_gap(pstep)
        elapsed = time.perf_counter() - start
        ok &= gap <= 0.05 and elapsed <= 120
        parts.append(f"p={pstep:g}: {gap:.2%} ({elapsed:.1f} s)")
    criterion(7, ok, "; ".join(parts) + " (tol 5%, <= 2 min/point)")
    assert ok


def test_criterion_08_pta_with_gate_errors(criterion):
    gaps = {(p, E): rel_gap(p, E)[2] for p in GRID_P for E in GRID_E}
    worst = max(gaps, key=gaps.get)
    ok = max(gaps.values()) <= 0.15
    criterion(8, ok, f"worst gap {gaps[worst]:.2%} at p={worst[0]:g}, E={worst[1]:g} (tol 15%)")
    assert ok


def test_criterion_09_pta_overestimates_at_quarter_pi(criterion):
    cfg = SweepConfig(gate_errors=list(GRID_E), phi=math.pi / 4, record_wall_time=False)
    res = run_sweep(cfg)
    exact, twirled = res.select(mode="exact"), res.select(mode="pta")
    misses = [(e.p_step, e.E) for e, t in zip(exact, twirled) if t.P < e.P]
    margin = min(t.P - e.P for e, t in zip(exact, twirled))
    ok = not misses and len(exact) == 2 * len(default_pstep_grid())
    criterion(9, ok, f"P_PTA >= P_exact at {len(exact) - len(misses)}/{len(exact)} points, "
                     f"smallest margin {margin:.2e}")
    assert ok


def test_criterion_10_t2_variants(criterion):
    parts, ok = [], True
    for ratio in (2.0, 0.5):
        dec_only = max(rel_gap(p, ratio=ratio)[2] for p in GRID_P)
        gates = max(rel_gap(p, E, ratio=ratio)[2] for p in GRID_P for E in GRID_E)
        ok &= dec_only <= 0.05 and gates <= 0.15
        parts.append(f"T2/T1={ratio:g}: decoherence-only {dec_only:.2%}, with gates {gates:.2%}")
    criterion(10, ok, "; ".join(parts) + " (tol 5% / 15%)")
    assert ok


@pytest.mark.slow
def test_criterion_11_monte_carlo_consistency(criterion, tmp_path):
    cases = [(1e-2, 0.0, 0.0), (1e-3, 0.0, 0.0), (1e-2, 1e-2, math.pi / 4)]
    parts, ok = [], True
    for k, (pstep, E, phi) in enumerate(cases):
        cfg = config(pstep, E, phi, mode=SimMode.PTA)
        mc = run_montecarlo_pta(cfg, seed=100 + k, n_trials=100_000)
        en = run_enumeration(cfg)
        z = abs(mc.P - en.P) / mc.std_error
        ok &= z <= 3
        parts.append(f"p={pstep:g},E={E:g}: {z:.2f} se")
    # determinism: same seed, different worker counts, byte-identical CSV
    sweep = SweepConfig(p_steps=[1e-2], gate_errors=[1e-2], modes=[SimMode.MONTE_CARLO],
                        trials=10_000, seed=3, record_wall_time=False)
    emit_csv(run_sweep(sweep, threads=1), tmp_path / "one.csv")
    a = run_montecarlo_pta(config(1e-2, 1e-2, mode=SimMode.PTA), 3, 10_000, threads=1)
    b = run_montecarlo_pta(config(1e-2, 1e-2, mode=SimMode.PTA), 3, 10_000, threads=4)
    emit_csv(run_sweep(sweep, threads=4), tmp_path / "four.csv")
    same = a == b and (tmp_path / "one.csv").read_bytes() == (tmp_path / "four.csv").read_bytes()
    ok &= same
    criterion(11, ok, "; ".join(parts) + f" (tol 3 se); identical across thread counts: {same}")
    assert ok


def test_criterion_12_bound_channel(criterion):
    points = [(p, 0.0) for p in GRID_P] + [(p, E) for p in GRID_P for E in GRID_E]
    below_pta, below_exact = [], []
    for pstep, E in points:
        bound = run_enumeration(config(pstep, E, mode=SimMode.BOUND)).P
        twirled = run_enumeration(config(pstep, E, mode=SimMode.PTA)).P
        exact = run_enumeration(config(pstep, E, mode=SimMode.EXACT)).P
        if bound < twirled:
            below_pta.append((pstep, E))
        if bound < exact:
            below_exact.append((pstep, E))
    ok = not below_pta
    finding = f"; finding: bound < exact at {below_exact}" if below_exact else "; bound >= exact too"
    criterion(12, ok, f"P_bound >= P_PTA at {len(points) - len(below_pta)}/{len(points)} points" + finding)
    assert ok
