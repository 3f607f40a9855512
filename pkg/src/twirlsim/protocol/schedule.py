"""Bell-state preservation circuit: register layout, cycle schedule and noise."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from twirlsim import qlin
from twirlsim.channels import (
    CZErrorParams,
    DecoherenceParams,
    KrausChannel,
    decoherence_channel,
    identity_channel,
    nonideal_cz,
)
from twirlsim.twirl import (
    PauliChannel,
    identity_pauli_channel,
    pauli_channel_to_kraus,
    pta_cz,
    pta_decoherence,
    upper_bound_channel,
)

N_QUBITS = 4
DATA = (0, 1)
ANC_Z = 2  # reads ZZ into x3
ANC_X = 3  # reads XX into x4
ANCILLAS = (ANC_Z, ANC_X)
STEPS_PER_CYCLE = 9

_s = 1 / np.sqrt(2)
BELL_STATES = {
    1: np.array([_s, 0, 0, _s], dtype=complex),
    2: np.array([_s, 0, 0, -_s], dtype=complex),
    3: np.array([0, _s, _s, 0], dtype=complex),
    4: np.array([0, _s, -_s, 0], dtype=complex),
}


class SimMode(enum.Enum):
    EXACT = "exact"
    PTA = "pta"
    BOUND = "bound"
    MONTE_CARLO = "mc"

    @property
    def is_pauli(self) -> bool:
        return self is not SimMode.EXACT


@dataclass(frozen=True)
class Gate:
    kind: str  # "reset", "H", "CZ" or "measure"
    targets: tuple[int, ...]


@dataclass(frozen=True)
class Step:
    gates: tuple[Gate, ...]


def _step(*gates):
    return Step(tuple(Gate(kind, tuple(t)) for kind, t in gates))


# ZZ via H-CZ-CZ-H on ancilla 3; XX via CZs to ancilla 4 inside data Hadamards.
DEFAULT_LAYOUT = (
    _step(("reset", ANCILLAS)),
    _step(("H", (ANC_Z,)), ("H", (ANC_X,))),
    _step(("CZ", (ANC_Z, 0))),
    _step(("CZ", (ANC_Z, 1))),
    _step(("H", (0,)), ("H", (1,))),
    _step(("CZ", (ANC_X, 0))),
    _step(("CZ", (ANC_X, 1))),
    _step(("H", (0,)), ("H", (1,)), ("H", (ANC_Z,)), ("H", (ANC_X,))),
    _step(("measure", ANCILLAS)),
)


@dataclass(frozen=True, eq=False)
class CycleSchedule:
    steps: tuple[Step, ...]
    mode: SimMode
    cz_gate: np.ndarray
    cz_error: PauliChannel | None = None

    def __post_init__(self):
        if len(self.steps) != STEPS_PER_CYCLE:
            raise ValueError(f"a cycle has {STEPS_PER_CYCLE} steps, got {len(self.steps)}")
        kinds = [g.kind for s in self.steps for g in s.gates]
        if kinds.count("CZ") != 4:
            raise ValueError("a cycle must contain exactly four CZ gates")
        last = self.steps[-1].gates
        if not last or last[-1].kind != "measure" or kinds.count("measure") != 1:
            raise ValueError("the cycle must end with its single ancilla measurement")

    @cached_property
    def cz_error_kraus(self) -> KrausChannel | None:
        if self.cz_error is None or self.cz_error["II"] == 1.0:
            return None
        return pauli_channel_to_kraus(self.cz_error)

    @property
    def measured(self) -> tuple[int, ...]:
        return self.steps[-1].gates[-1].targets


def build_schedule(cz: CZErrorParams, mode: SimMode, layout=DEFAULT_LAYOUT) -> CycleSchedule:
    """Fix the gate layout and how CZ gates are realized in ``mode``.

    Exact mode applies the nonideal unitary; the Pauli modes apply the ideal
    CZ followed by the twirled (or bounded) error channel.
    """
    if mode is SimMode.EXACT:
        return CycleSchedule(tuple(layout), mode, nonideal_cz(cz))
    err = pta_cz(cz)
    if mode is SimMode.BOUND:
        err = upper_bound_channel(err)
    return CycleSchedule(tuple(layout), mode, qlin.CZ, err)


def idle_noise(dec: DecoherenceParams | None, mode: SimMode) -> KrausChannel | PauliChannel:
    """Per-qubit, per-step decoherence in the representation ``mode`` needs."""
    if dec is None:
        return identity_pauli_channel(1) if mode is SimMode.MONTE_CARLO else identity_channel(1)
    if mode is SimMode.EXACT:
        return decoherence_channel(dec)
    pc = pta_decoherence(dec)
    if mode is SimMode.BOUND:
        pc = upper_bound_channel(pc)
    if mode is SimMode.MONTE_CARLO:
        return pc
    return pauli_channel_to_kraus(pc)


def syndrome_index(syndrome: tuple[int, int]) -> int:
    x3, x4 = syndrome
    return 2 * x3 + x4


def syndrome_bits(index: int) -> tuple[int, int]:
    return index >> 1, index & 1


def predict_bell(syndrome: tuple[int, int]) -> int:
    """Bell state index 1-4 implied by the ancilla readout (x3, x4)."""
    return syndrome_index(syndrome) + 1


def initial_state() -> np.ndarray:
    """Data qubits in B1, ancillas in |00>."""
    return qlin.pure(np.kron(BELL_STATES[1], qlin.basis_state((0, 0))))


@dataclass(frozen=True)
class ProtocolConfig:
    """Physics and numerics of one protocol run."""

    dec: DecoherenceParams | None = None
    cz: CZErrorParams = CZErrorParams()
    mode: SimMode = SimMode.EXACT
    max_cycles: int = 100
    prune: float = 1e-12
    budget: float = 1e-6
    layout: tuple[Step, ...] = DEFAULT_LAYOUT

    def __post_init__(self):
        if self.max_cycles < 3:
            raise ValueError("max_cycles must be at least 3")
        if not self.prune > 0:
            raise ValueError("prune threshold must be positive")

    @cached_property
    def schedule(self) -> CycleSchedule:
        return build_schedule(self.cz, self.mode, self.layout)

    @cached_property
    def idle(self) -> KrausChannel | PauliChannel:
        return idle_noise(self.dec, self.mode)
