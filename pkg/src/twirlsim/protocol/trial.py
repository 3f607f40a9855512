"""Step-by-step cycle evolution and single Monte Carlo trials.

Random draws follow a fixed layout so that the batched Monte Carlo engine
reproduces these trials exactly: each cycle consumes one ``(9, 6)`` block of
uniforms, row ``s`` serving step ``s`` with columns

    0: CZ error sample, 1: measurement outcome, 2-5: idle Pauli on qubits 0-3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from twirlsim import qlin
from twirlsim.channels import KrausChannel
from twirlsim.protocol.schedule import (
    ANCILLAS,
    BELL_STATES,
    DATA,
    N_QUBITS,
    STEPS_PER_CYCLE,
    CycleSchedule,
    ProtocolConfig,
    SimMode,
    initial_state,
    predict_bell,
    syndrome_bits,
)
from twirlsim.twirl import PauliChannel

DRAW_COLUMNS = 6
COL_CZ, COL_MEASURE, COL_IDLE = 0, 1, 2

_RESET_KRAUS = (
    np.array([[1, 0], [0, 0]], dtype=complex),
    np.array([[0, 1], [0, 0]], dtype=complex),
)


def sample_index(probs, u: float) -> int:
    """Inverse-CDF sample; entries below the zero-probability floor never fire."""
    probs = np.where(np.asarray(probs) < qlin.ZERO_PROBABILITY, 0.0, probs)
    cum = np.cumsum(probs)
    return min(int(np.searchsorted(cum, u * cum[-1], side="right")), len(cum) - 1)


def _sample_pauli(pc: PauliChannel, u: float) -> str:
    labels = qlin.pauli_strings(pc.n_qubits)
    return labels[sample_index(pc.as_array(), u)]


def _apply_idle(rho, idle, draws_row):
    if isinstance(idle, PauliChannel):
        if draws_row is None:
            raise ValueError("Monte Carlo noise needs random draws")
        for q in range(N_QUBITS):
            a = _sample_pauli(idle, draws_row[COL_IDLE + q])
            if a != "I":
                rho = qlin.apply_unitary(rho, qlin.pauli_matrix(a), [q])
        return rho
    for q in range(N_QUBITS):
        rho = qlin.apply_kraus(rho, idle.kraus, [q])
    return rho


def _apply_gate(rho, gate, sched: CycleSchedule, draws_row):
    if gate.kind == "reset":
        for q in gate.targets:
            rho = qlin.apply_kraus(rho, _RESET_KRAUS, [q])
    elif gate.kind == "H":
        rho = qlin.apply_unitary(rho, qlin.H, gate.targets)
    elif gate.kind == "CZ":
        rho = qlin.apply_unitary(rho, sched.cz_gate, gate.targets)
        if sched.mode is SimMode.MONTE_CARLO:
            if draws_row is None:
                raise ValueError("Monte Carlo noise needs random draws")
            a = _sample_pauli(sched.cz_error, draws_row[COL_CZ])
            if a != "II":
                rho = qlin.apply_unitary(rho, qlin.pauli_matrix(a), gate.targets)
        elif sched.cz_error_kraus is not None:
            rho = qlin.apply_kraus(rho, sched.cz_error_kraus.kraus, gate.targets)
    else:
        raise ValueError(f"unknown gate kind {gate.kind!r}")
    return rho


def evolve_to_readout(rho: np.ndarray, sched: CycleSchedule,
                      idle: KrausChannel | PauliChannel, draws=None) -> np.ndarray:
    """Steps 1-8 (gates, then idle noise) and any gates of step 9 before readout."""
    for s, step in enumerate(sched.steps):
        row = None if draws is None else draws[s]
        for gate in step.gates:
            if gate.kind == "measure":
                return rho
            rho = _apply_gate(rho, gate, sched, row)
        rho = _apply_idle(rho, idle, row)
    raise AssertionError("schedule has no measurement")


def readout(rho: np.ndarray, syndrome: tuple[int, int], sched: CycleSchedule,
            idle: KrausChannel | PauliChannel, draws=None) -> np.ndarray:
    """Project the ancillas on ``syndrome``, reset them to |00>, then idle noise.

    The result is unnormalized; its trace is the outcome probability.
    """
    rho = qlin.project(rho, sched.measured, syndrome)
    for q, bit in zip(sched.measured, syndrome):
        if bit:
            rho = qlin.apply_unitary(rho, qlin.X, [q])
    row = None if draws is None else draws[STEPS_PER_CYCLE - 1]
    return _apply_idle(rho, idle, row)


def outcome_probabilities(rho: np.ndarray, measured=ANCILLAS) -> np.ndarray:
    """Probabilities of the four joint readouts, indexed by 2*x3 + x4."""
    return np.array([np.real(np.trace(qlin.project(rho, measured, syndrome_bits(s))))
                     for s in range(4)])


def run_cycle(rho: np.ndarray, sched: CycleSchedule, idle, draws=None, outcome=None):
    """One stabilizer cycle.

    Either branch on a given ``outcome`` or sample it from ``draws``.
    Returns ``(syndrome, normalized state, outcome probability)``.
    """
    pre = evolve_to_readout(rho, sched, idle, draws)
    probs = outcome_probabilities(pre, sched.measured)
    if outcome is None:
        if draws is None:
            raise ValueError("either an outcome or random draws are required")
        outcome = syndrome_bits(sample_index(probs, draws[STEPS_PER_CYCLE - 1, COL_MEASURE]))
    outcome = tuple(int(b) for b in outcome)
    p = probs[2 * outcome[0] + outcome[1]]
    if p < qlin.ZERO_PROBABILITY:
        raise qlin.ZeroProbabilityOutcome(f"syndrome {outcome} has probability {p:.3g}")
    post = readout(pre, outcome, sched, idle, draws)
    return outcome, post / p, float(p)


def bell_success(rho: np.ndarray, bell: int) -> float | np.ndarray:
    """Probability that a Bell-basis measurement of the data finds state ``bell``."""
    return qlin.fidelity_with_pure(qlin.partial_trace(rho, DATA), BELL_STATES[bell])


def is_stable(history) -> bool:
    return len(history) >= 3 and history[-1] == history[-2] == history[-3]


@dataclass(frozen=True)
class TrialOutcome:
    syndrome_history: tuple[tuple[int, int], ...]
    final_syndrome: tuple[int, int]
    predicted_bell: int
    p_B: float
    cycles_run: int
    truncated: bool


def run_trial(config: ProtocolConfig, rng: np.random.Generator, injections=None) -> TrialOutcome:
    """Simulate one experimental run, sampling ancilla readouts.

    ``injections`` maps a cycle number k (1-based) to a four-letter Pauli
    string applied to the register just before cycle k.
    """
    sched, idle = config.schedule, config.idle
    injections = injections or {}
    rho = initial_state()
    history = []
    while True:
        k = len(history) + 1
        if k in injections:
            rho = qlin.apply_unitary(rho, qlin.pauli_matrix(injections[k]), range(N_QUBITS))
        draws = rng.random((STEPS_PER_CYCLE, DRAW_COLUMNS))
        syndrome, rho, _ = run_cycle(rho, sched, idle, draws=draws)
        history.append(syndrome)
        if is_stable(history) or k >= config.max_cycles:
            break
    final = history[-1]
    bell = predict_bell(final)
    return TrialOutcome(
        syndrome_history=tuple(history),
        final_syndrome=final,
        predicted_bell=bell,
        p_B=float(bell_success(rho, bell)),
        cycles_run=len(history),
        truncated=not is_stable(history),
    )


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, derived from (master seed, trial index)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))
