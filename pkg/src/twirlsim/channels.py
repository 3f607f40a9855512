"""Error-channel constructors: qubit decoherence and the nonideal CZ gate."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from twirlsim import qlin

KRAUS_PRUNE_NORM = 1e-15


@dataclass(frozen=True)
class KrausChannel:
    """Completely positive map rho -> sum_m E_m rho E_m^dagger."""

    kraus: tuple[np.ndarray, ...]
    label: str = ""
    n_qubits: int = field(init=False)

    def __post_init__(self):
        mats = tuple(np.asarray(e, dtype=complex) for e in self.kraus)
        if not mats:
            raise ValueError("a Kraus channel needs at least one Kraus matrix")
        dim = mats[0].shape[0]
        if any(e.shape != (dim, dim) for e in mats):
            raise ValueError("Kraus matrices must all be square with equal dimension")
        object.__setattr__(self, "kraus", mats)
        object.__setattr__(self, "n_qubits", qlin.n_qubits_of(dim))
        gap = np.eye(dim) - self.completeness()
        if np.linalg.eigvalsh(gap).min() < -qlin.ATOL:
            raise ValueError(f"channel {self.label!r} increases trace: sum E^dag E > I")

    def completeness(self) -> np.ndarray:
        """sum_m E_m^dagger E_m."""
        return sum(qlin.dagger(e) @ e for e in self.kraus)

    def is_trace_preserving(self, atol: float = qlin.ATOL) -> bool:
        return bool(np.allclose(self.completeness(), np.eye(1 << self.n_qubits), rtol=0, atol=atol))

    def apply(self, rho: np.ndarray, targets=None) -> np.ndarray:
        if targets is None:
            targets = range(self.n_qubits)
        return qlin.apply_kraus(rho, self.kraus, list(targets))


def identity_channel(n_qubits: int = 1) -> KrausChannel:
    return KrausChannel((np.eye(1 << n_qubits),), label="identity")


def unitary_channel(u: np.ndarray, label: str = "unitary") -> KrausChannel:
    return KrausChannel((u,), label=label)


@dataclass(frozen=True)
class DecoherenceParams:
    """Per-step decoherence: relaxation T1, pure dephasing Tphi with 1/f^alpha noise.

    Times share one unit (seconds throughout this package). ``Tphi`` or
    ``T1`` may be ``math.inf``.
    """

    T1: float
    t_step: float
    Tphi: float = math.inf
    alpha: float = 0.0

    def __post_init__(self):
        if not self.T1 > 0:
            raise ValueError(f"T1 must be positive, got {self.T1}")
        if not self.t_step > 0:
            raise ValueError(f"t_step must be positive, got {self.t_step}")
        if not self.Tphi > 0:
            raise ValueError(f"Tphi must be positive or infinite, got {self.Tphi}")
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")

    @property
    def dephasing_exponent(self) -> float:
        """(t_step/Tphi)^(1+alpha); zero for infinite Tphi."""
        return (self.t_step / self.Tphi) ** (1 + self.alpha)


@dataclass(frozen=True)
class CZErrorParams:
    """Nonideal CZ: switching probability E1, controlled-phase error delta, phase phi."""

    E1: float = 0.0
    delta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not 0 <= self.E1 <= 1:
            raise ValueError(f"E1 must lie in [0, 1], got {self.E1}")


def gamma_lambda(p: DecoherenceParams) -> tuple[float, float]:
    """Amplitude-damping and dephasing Kraus weights for one step."""
    tau = p.t_step / p.T1
    gamma = -math.expm1(-tau)
    lam = math.exp(-tau) * -math.expm1(-2 * p.dephasing_exponent)
    return gamma, lam


def decoherence_channel(p: DecoherenceParams) -> KrausChannel:
    gamma, lam = gamma_lambda(p)
    # sqrt(1 - gamma - lambda) in closed form; the subtraction cancels badly
    root = math.exp(-p.t_step / (2 * p.T1) - p.dephasing_exponent)
    e1 = np.diag([1, root]).astype(complex)
    e2 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    e3 = np.array([[0, 0], [0, math.sqrt(lam)]], dtype=complex)
    return KrausChannel((e1, e2, e3), label="decoherence")


def markovian_tphi(T1: float, T2: float, atol: float = qlin.ATOL) -> float:
    """Pure-dephasing time with 1/Tphi = 1/T2 - 1/(2 T1); infinite at T2 = 2 T1."""
    rate = 1 / T2 - 1 / (2 * T1)
    scale = 1 / T2
    if rate < -atol * scale:
        raise ValueError(f"T2 = {T2} exceeds 2*T1 = {2 * T1}")
    if rate <= atol * scale:
        return math.inf
    return 1 / rate


def nonideal_cz(p: CZErrorParams) -> np.ndarray:
    s = math.sqrt(p.E1)
    c = math.sqrt(1 - p.E1)
    return np.array([
        [1, 0, 0, 0],
        [0, c, s * np.exp(1j * p.phi), 0],
        [0, -s * np.exp(-1j * p.phi), c, 0],
        [0, 0, 0, -np.exp(1j * p.delta)],
    ], dtype=complex)


def cz_error_unitary(p: CZErrorParams) -> np.ndarray:
    """Error V with U = V @ CZ, i.e. the error acts after the ideal gate."""
    return nonideal_cz(p) @ qlin.CZ


def avg_gate_fidelity(u: np.ndarray, target: np.ndarray) -> float:
    """State-averaged fidelity of a two-qubit operator against a target."""
    if u.shape != (4, 4) or target.shape != (4, 4):
        raise ValueError("average gate fidelity is defined here for 4x4 operators")
    tr_uu = np.real(np.trace(qlin.dagger(u) @ u))
    overlap = abs(np.trace(qlin.dagger(target) @ u)) ** 2
    return float((tr_uu + overlap) / 20)


def leading_order_gate_error(E1: float, delta: float) -> float:
    return 0.4 * E1 + 0.15 * delta ** 2


def split_gate_error(E: float, phi: float = 0.0) -> CZErrorParams:
    """Share a total gate error equally between switching and phase error."""
    E1 = 5 * E / 4
    if E < 0 or E1 > 1:
        raise ValueError(f"gate error {E} gives E1 = {E1} outside [0, 1]")
    return CZErrorParams(E1=E1, delta=math.sqrt(10 * E / 3), phi=phi)


def tensor_channel(singles) -> KrausChannel:
    """Product channel with Kraus set {E_m1 (x) ... (x) E_mn}.

    Products with Frobenius norm below ``KRAUS_PRUNE_NORM`` are dropped.
    """
    singles = list(singles)
    if any(ch.n_qubits != 1 for ch in singles):
        raise ValueError("tensor_channel expects single-qubit channels")
    if len(singles) == 1:
        return singles[0]
    kraus = []
    for combo in itertools.product(*(ch.kraus for ch in singles)):
        k = qlin.kron(*combo)
        if np.linalg.norm(k) >= KRAUS_PRUNE_NORM:
            kraus.append(k)
    if not kraus:
        kraus.append(np.zeros((1 << len(singles),) * 2))
    label = " x ".join(ch.label for ch in singles)
    return KrausChannel(tuple(kraus), label=label)
