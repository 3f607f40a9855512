"""Fast oracle and invariant checks behind ``twirlsim check``."""

from __future__ import annotations

import math

import numpy as np

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
from twirlsim.protocol import ProtocolConfig, SimMode, run_enumeration, run_trial, trial_rng
from twirlsim.twirl import cz_error_channel, pta, pta_cz, pta_decoherence, tphi_crit, twirl_numeric


def random_decoherence(rng: np.random.Generator) -> DecoherenceParams:
    T1 = 10 ** rng.uniform(-6, -3)
    return DecoherenceParams(T1=T1, t_step=25e-9, Tphi=T1 * 10 ** rng.uniform(-1, 2),
                             alpha=rng.uniform(0, 2))


def random_cz(rng: np.random.Generator) -> CZErrorParams:
    return CZErrorParams(E1=rng.uniform(0, 0.2), delta=rng.uniform(-1, 1),
                         phi=rng.uniform(0, 2 * math.pi))


def check_decoherence_twirl(n=100, seed=1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        p = random_decoherence(rng)
        oracle = twirl_numeric(decoherence_channel(p)).as_array()
        worst = max(worst, np.abs(pta_decoherence(p).as_array() - oracle).max())
    return worst <= 1e-12, f"max |closed form - literal twirl| = {worst:.2e}"


def check_cz_twirl(n=100, seed=2):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        p = random_cz(rng)
        oracle = twirl_numeric(cz_error_channel(p)).as_array()
        worst = max(worst, np.abs(pta_cz(p).as_array() - oracle).max())
    return worst <= 1e-12, f"max |closed form - literal twirl| = {worst:.2e}"


def check_conservation(n=50, seed=3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        d = decoherence_channel(random_decoherence(rng))
        for ch in (d, tensor_channel([d, decoherence_channel(random_decoherence(rng))]),
                   cz_error_channel(random_cz(rng))):
            worst = max(worst, abs(pta(ch).total() - 1))
    return worst <= 1e-12, f"max |sum p_A - 1| = {worst:.2e}"


def check_crossover():
    worst = 0.0
    for alpha in (0.0, 0.5, 1.0):
        T1 = 25e-6
        tc = tphi_crit(T1, alpha, 25e-9)
        pc = pta_decoherence(DecoherenceParams(T1=T1, t_step=25e-9, Tphi=tc, alpha=alpha))
        vals = [pc["X"], pc["Y"], pc["Z"]]
        worst = max(worst, max(vals) - min(vals))
    exact = tphi_crit(25e-6, 0.0, 25e-9) == 2 * 25e-6
    return worst <= 1e-12 and exact, f"max |p_a - p_b| = {worst:.2e}, alpha=0 gives 2 T1: {exact}"


def check_cz_model():
    worst_u = 0.0
    for E1 in np.linspace(0, 1, 10):
        for delta in np.linspace(-math.pi, math.pi, 10):
            for phi in np.linspace(0, 2 * math.pi, 10):
                u = nonideal_cz(CZErrorParams(E1, delta, phi))
                worst_u = max(worst_u, np.abs(u.conj().T @ u - np.eye(4)).max())
    ideal = avg_gate_fidelity(qlin.CZ, qlin.CZ)
    worst_rel = 0.0
    for E in (1e-4, 1e-3, 1e-2):
        p = split_gate_error(E)
        err = 1 - avg_gate_fidelity(nonideal_cz(p), qlin.CZ)
        worst_rel = max(worst_rel, abs(err - leading_order_gate_error(p.E1, p.delta)) / err)
    ok = worst_u <= 1e-12 and ideal == 1.0 and worst_rel <= 0.02
    return ok, f"unitarity {worst_u:.1e}, F(CZ,CZ) = {ideal}, leading-order gap {worst_rel:.2%}"


def check_zero_error():
    Ps = [run_enumeration(ProtocolConfig(mode=m)).P for m in (SimMode.EXACT, SimMode.PTA, SimMode.BOUND)]
    trial = run_trial(ProtocolConfig(mode=SimMode.MONTE_CARLO), trial_rng(0, 0))
    ok = max(Ps) <= 1e-10 and trial.syndrome_history == ((0, 0),) * 3 and trial.p_B >= 1 - 1e-10
    return ok, f"P = {max(Ps):.1e}, trial history {trial.syndrome_history}"


def check_syndrome_table():
    expected = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
    bad = []
    for q in (0, 1):
        for letter, syn in expected.items():
            label = "".join(letter if i == q else "I" for i in range(4))
            t = run_trial(ProtocolConfig(), trial_rng(0, 0), injections={1: label})
            if t.final_syndrome != syn or abs(t.p_B - 1) > 1e-10:
                bad.append(label)
    return not bad, "all six single-qubit data errors tracked" if not bad else f"failed: {bad}"


CHECKS = {
    "decoherence closed form vs twirl oracle": check_decoherence_twirl,
    "CZ closed form vs twirl oracle": check_cz_twirl,
    "probability conservation": check_conservation,
    "depolarizing crossover": check_crossover,
    "CZ unitarity and gate error": check_cz_model,
    "zero-error protocol": check_zero_error,
    "syndrome table": check_syndrome_table,
}


def run_checks(out=print) -> bool:
    all_ok = True
    for name, fn in CHECKS.items():
        ok, detail = fn()
        all_ok &= ok
        out(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return all_ok
