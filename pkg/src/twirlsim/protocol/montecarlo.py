"""Monte Carlo PTA: stochastic Pauli errors tracked through density matrices.

Trials are advanced in fixed-size chunks, one density matrix per trial, with
every operation vectorized over the chunk. Trial ``i`` draws from its own
stream ``trial_rng(seed, i)`` in the same layout as ``run_trial``, so results
do not depend on chunking or on how many worker threads are used.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from twirlsim import qlin
from twirlsim.protocol.enumeration import FailureEstimate
from twirlsim.protocol.schedule import (
    BELL_STATES,
    N_QUBITS,
    STEPS_PER_CYCLE,
    ProtocolConfig,
    SimMode,
)
from twirlsim.protocol.trial import COL_CZ, COL_IDLE, COL_MEASURE, DRAW_COLUMNS, trial_rng

DIM = 1 << N_QUBITS
CHUNK = 2048

# single-qubit Pauli codes I=0, X=1, Y=2, Z=3 and their (x, z) bits
_BITS = np.array([[0, 0], [1, 0], [1, 1], [0, 1]])
_COMPOSE = np.array([[{(0, 0): 0, (1, 0): 1, (1, 1): 2, (0, 1): 3}[tuple(_BITS[a] ^ _BITS[b])]
                      for b in range(4)] for a in range(4)])


def _pauli_tables():
    """For every 4-qubit Pauli P: row gather g and phases with (P rho P^dag)[r, c] = ph[r] rho[g r, g c] ph[c]^*."""
    labels = qlin.pauli_strings(N_QUBITS)
    gather = np.empty((len(labels), DIM), dtype=np.intp)
    phase = np.empty((len(labels), DIM), dtype=complex)
    rows = np.arange(DIM)
    for k, a in enumerate(labels):
        m = qlin.pauli_matrix(a)
        gather[k] = np.argmax(np.abs(m), axis=1)
        phase[k] = m[rows, gather[k]]
    return gather, phase


_GATHER, _PHASE = _pauli_tables()


def worker_count() -> int:
    env = os.environ.get("TWIRL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


class _CompiledCycle:
    """Per-step ideal unitaries and sampling tables for one configuration."""

    def __init__(self, config: ProtocolConfig):
        sched = config.schedule
        self.steps = []
        for step in sched.steps:
            u = np.eye(DIM, dtype=complex)
            reset = measure = False
            cz_targets = None
            for gate in step.gates:
                if gate.kind == "reset":
                    if tuple(gate.targets) != (2, 3):
                        raise ValueError("batched engine resets the two ancillas only")
                    reset = True
                elif gate.kind == "measure":
                    measure = True
                elif gate.kind == "H":
                    u = qlin.embed(qlin.H, gate.targets, N_QUBITS) @ u
                elif gate.kind == "CZ":
                    u = qlin.embed(sched.cz_gate, gate.targets, N_QUBITS) @ u
                    cz_targets = gate.targets
            gate_u = None if np.allclose(u, np.eye(DIM), rtol=0, atol=0) else u
            self.steps.append((reset, gate_u, cz_targets, measure))
        self.cz_cum = np.cumsum(_floor(sched.cz_error.as_array()))
        self.idle_cum = np.cumsum(_floor(config.idle.as_array()))
        self.measured = sched.measured
        if tuple(self.measured) != (2, 3):
            raise ValueError("batched engine measures the two ancillas only")


def _floor(p):
    return np.where(p < qlin.ZERO_PROBABILITY, 0.0, p)


def _sample(cum, u):
    # matches trial.sample_index
    return np.minimum(np.searchsorted(cum, u * cum[-1], side="right"), len(cum) - 1)


def _conjugate_gates(rho, u):
    b = rho.shape[0]
    # U rho as one (16 x 16) @ (16 x 16B) product, then (. ) U^dag as (16B x 16) @ (16 x 16)
    left = (u @ rho.transpose(1, 0, 2).reshape(DIM, b * DIM)).reshape(DIM, b, DIM).transpose(1, 0, 2)
    return (left.reshape(b * DIM, DIM) @ u.conj().T).reshape(b, DIM, DIM)


def _conjugate_paulis(rho, idx):
    g = _GATHER[idx]
    ph = _PHASE[idx]
    b = np.arange(rho.shape[0])[:, None, None]
    out = rho[b, g[:, :, None], g[:, None, :]]
    return out * ph[:, :, None] * ph[:, None, :].conj()


def _ancilla_blocks(rho):
    # rho[(d, a), (d', a')] -> [b, d, a, d', a']
    return rho.reshape(-1, 4, 4, 4, 4)


def _place_in_ancilla_zero(data):
    out = np.zeros((data.shape[0], 4, 4, 4, 4), dtype=complex)
    out[:, :, 0, :, 0] = data
    return out.reshape(-1, DIM, DIM)


def _run_chunk(compiled: _CompiledCycle, config: ProtocolConfig, seed: int, start: int, n: int):
    rngs = [trial_rng(seed, start + i) for i in range(n)]
    rho0 = np.kron(BELL_STATES[1], qlin.basis_state((0, 0)))
    rho = np.broadcast_to(qlin.pure(rho0), (n, DIM, DIM)).copy()
    active = np.arange(n)
    history = np.full((n, config.max_cycles), -1, dtype=np.int64)
    p_fail = np.zeros(n)
    cycles = np.zeros(n, dtype=np.int64)
    stable = np.zeros(n, dtype=bool)
    for cycle in range(config.max_cycles):
        draws = np.stack([rngs[i].random((STEPS_PER_CYCLE, DRAW_COLUMNS)) for i in active])
        for s, (reset, gate_u, cz_targets, measure) in enumerate(compiled.steps):
            if reset:
                data = np.einsum("biaja->bij", _ancilla_blocks(rho))
                rho = _place_in_ancilla_zero(data)
            if gate_u is not None:
                rho = _conjugate_gates(rho, gate_u)
            if measure:
                blocks = _ancilla_blocks(rho)
                probs = np.real(np.einsum("bdada->ba", blocks))
                probs = _floor(probs)
                cum = np.cumsum(probs, axis=1)
                u = draws[:, s, COL_MEASURE] * cum[:, -1]
                outcome = np.minimum((cum <= u[:, None]).sum(axis=1), 3)
                history[active, cycle] = outcome
                picked = blocks[np.arange(len(active)), :, outcome, :, outcome]
                rho = _place_in_ancilla_zero(picked / probs[np.arange(len(active)), outcome][:, None, None])
            codes = np.stack([_sample(compiled.idle_cum, draws[:, s, COL_IDLE + q])
                              for q in range(N_QUBITS)], axis=1)
            if cz_targets is not None:
                cz = _sample(compiled.cz_cum, draws[:, s, COL_CZ])
                for j, q in enumerate(cz_targets):
                    letter = (cz >> (2 * (1 - j))) & 3
                    codes[:, q] = _COMPOSE[letter, codes[:, q]]
            idx = ((codes[:, 0] * 4 + codes[:, 1]) * 4 + codes[:, 2]) * 4 + codes[:, 3]
            hit = idx != 0
            if hit.any():
                rho[hit] = _conjugate_paulis(rho[hit], idx[hit])
        k = cycle + 1
        if k >= 3:
            h = history[active]
            done = (h[:, cycle] == h[:, cycle - 1]) & (h[:, cycle] == h[:, cycle - 2])
        else:
            done = np.zeros(len(active), dtype=bool)
        stable[active[done]] = True
        if k == config.max_cycles:
            done[:] = True
        if done.any():
            fin = active[done]
            final = history[fin, cycle]
            reduced = np.einsum("biaja->bij", _ancilla_blocks(rho[done]))
            bells = np.stack([BELL_STATES[f + 1] for f in final])
            p_b = np.real(np.einsum("bi,bij,bj->b", bells.conj(), reduced, bells))
            p_fail[fin] = 1 - np.clip(p_b, 0.0, 1.0)
            cycles[fin] = k
            keep = ~done
            active = active[keep]
            rho = rho[keep]
            if not len(active):
                break
    return p_fail, cycles, history, stable


def simulate_trials(config: ProtocolConfig, seed: int, n_trials: int, threads: int | None = None):
    """Per-trial failure (1 - p_B), cycle counts, syndrome histories (-1 padded) and stop flags."""
    config = replace(config, mode=SimMode.MONTE_CARLO)
    compiled = _CompiledCycle(config)
    starts = list(range(0, n_trials, CHUNK))
    threads = threads or worker_count()

    def work(start):
        return _run_chunk(compiled, config, seed, start, min(CHUNK, n_trials - start))

    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, starts))
    else:
        parts = [work(s) for s in starts]
    p_fail = np.concatenate([p[0] for p in parts])
    cycles = np.concatenate([p[1] for p in parts])
    history = np.concatenate([p[2] for p in parts])
    stable = np.concatenate([p[3] for p in parts])
    return p_fail, cycles, history, stable


def run_montecarlo_pta(config: ProtocolConfig, seed: int, n_trials: int,
                       threads: int | None = None) -> FailureEstimate:
    """Failure probability by sampling Pauli errors from the twirled channels."""
    if n_trials < 100:
        raise ValueError("run_montecarlo_pta needs at least 100 trials")
    p_fail, cycles, _, stable = simulate_trials(config, seed, n_trials, threads)
    return FailureEstimate(
        P=float(np.mean(p_fail)),
        std_error=float(np.std(p_fail, ddof=1) / np.sqrt(n_trials)),
        captured_mass=1.0,
        truncated_mass=float(np.mean(~stable)),
        trials_or_branches=n_trials,
        cycles_mean=float(np.mean(cycles)),
    )
