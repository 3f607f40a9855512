"""Pauli twirling: diagonal Pauli channels from Kraus channels.

Two independent routes compute the twirled probabilities. ``pta`` expands
each Kraus matrix in the Pauli basis and sums squared coefficients;
``twirl_numeric`` literally averages the conjugated channel over the Pauli
group and reads the diagonal of the resulting Choi matrix. The closed forms
for decoherence and the nonideal CZ are checked against both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from twirlsim import qlin
from twirlsim.channels import (
    CZErrorParams,
    DecoherenceParams,
    KrausChannel,
    cz_error_unitary,
    gamma_lambda,
)

NEGATIVE_CLIP = 1e-14


@dataclass(frozen=True)
class PauliChannel:
    """rho -> sum_A p_A A rho A, stored sparsely as {Pauli string: p_A}."""

    n_qubits: int
    probs: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for label, p in self.probs.items():
            label = qlin.validate_pauli(label)
            if len(label) != self.n_qubits:
                raise ValueError(f"{label!r} is not a {self.n_qubits}-qubit Pauli string")
            p = float(p)
            if p < -NEGATIVE_CLIP:
                raise ValueError(f"negative probability {p} for {label}: input is not CP")
            clean[label] = max(p, 0.0)
        if sum(clean.values()) > 1 + qlin.ATOL:
            raise ValueError(f"probabilities sum to {sum(clean.values())} > 1")
        object.__setattr__(self, "probs", clean)

    def __getitem__(self, label: str) -> float:
        return self.probs.get(qlin.validate_pauli(label), 0.0)

    def total(self) -> float:
        return math.fsum(self.probs.values())

    def error_probability(self) -> float:
        """Total probability of a non-identity Pauli."""
        return math.fsum(p for a, p in self.probs.items() if set(a) != {"I"})

    def as_array(self) -> np.ndarray:
        """Probabilities over all 4**n strings in ``qlin.pauli_strings`` order."""
        return np.array([self[a] for a in qlin.pauli_strings(self.n_qubits)])

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(p * (qlin.pauli_matrix(a) @ rho @ qlin.pauli_matrix(a))
                   for a, p in self.probs.items() if p > 0)


def identity_pauli_channel(n_qubits: int = 1) -> PauliChannel:
    return PauliChannel(n_qubits, {"I" * n_qubits: 1.0})


@dataclass(frozen=True)
class PauliExpansion:
    """Coefficients with E_m = sum_A coefficients[m, A] * A."""

    labels: tuple[str, ...]
    coefficients: np.ndarray

    def reconstruct(self) -> list[np.ndarray]:
        mats = [qlin.pauli_matrix(a) for a in self.labels]
        return [sum(c * m for c, m in zip(row, mats)) for row in self.coefficients]


def pauli_expand(ch: KrausChannel) -> PauliExpansion:
    labels = qlin.pauli_strings(ch.n_qubits)
    dim = 1 << ch.n_qubits
    # Tr(A E) for all A at once: sum_ij A_ji E_ij
    basis = np.stack([qlin.pauli_matrix(a) for a in labels])
    kraus = np.stack(ch.kraus)
    coeffs = np.einsum("aji,mij->ma", basis, kraus) / dim
    return PauliExpansion(tuple(labels), coeffs)


def pta(ch: KrausChannel) -> PauliChannel:
    """Pauli twirling approximation of a Kraus channel."""
    exp = pauli_expand(ch)
    p = np.sum(np.abs(exp.coefficients) ** 2, axis=0)
    return PauliChannel(ch.n_qubits, dict(zip(exp.labels, p)))


def _choi(apply, n_qubits: int) -> np.ndarray:
    """Choi matrix (channel (x) id)(|Omega><Omega|), |Omega> = sum_i |i>|i> / sqrt(d)."""
    d = 1 << n_qubits
    units = np.eye(d * d, dtype=complex).reshape(d * d, d, d)
    images = apply(units).reshape(d, d, d, d)
    # J[(a, i), (b, j)] = Lambda(|i><j|)[a, b] / d, system factor first
    return images.transpose(2, 0, 3, 1).reshape(d * d, d * d) / d


def twirl_apply(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """Twirled map: average over A of A^-1 Lambda(A rho A^-1) A."""
    labels = qlin.pauli_strings(ch.n_qubits)
    out = np.zeros_like(rho, dtype=complex)
    for a in labels:
        pa = qlin.pauli_matrix(a)
        out += pa @ ch.apply(pa @ rho @ pa) @ pa
    return out / len(labels)


def twirl_numeric(ch: KrausChannel) -> PauliChannel:
    """Twirl probabilities by direct averaging; independent of ``pauli_expand``.

    The twirled channel's Choi matrix is diagonal in the basis
    (A (x) I)|Omega>, and its diagonal entries are the probabilities.
    """
    n = ch.n_qubits
    d = 1 << n
    choi = _choi(lambda rho: twirl_apply(ch, rho), n)
    omega = np.eye(d).reshape(-1) / math.sqrt(d)
    probs = {}
    for a in qlin.pauli_strings(n):
        v = np.kron(qlin.pauli_matrix(a), np.eye(d)) @ omega
        probs[a] = float(np.real(v.conj() @ choi @ v))
    return PauliChannel(n, probs)


def pta_decoherence(p: DecoherenceParams) -> PauliChannel:
    """Closed-form twirl of the single-qubit decoherence channel (exact, not small-t)."""
    gamma, _ = gamma_lambda(p)
    # sqrt(1 - gamma - lambda) == exp(-t/2T1 - (t/Tphi)^(1+alpha))
    s = p.t_step / (2 * p.T1) + p.dephasing_exponent
    px = gamma / 4
    pz = -math.expm1(-s) / 2 - gamma / 4
    pi = 1 - 2 * px - pz
    return PauliChannel(1, {"I": pi, "X": px, "Y": px, "Z": pz})


def pta_cz(p: CZErrorParams) -> PauliChannel:
    """Closed-form twirl of the CZ error V = U @ CZ (eight-term channel)."""
    c = math.sqrt(1 - p.E1)
    eid = np.exp(1j * p.delta)
    pxx = math.sin(p.phi) ** 2 * p.E1 / 4
    pxy = math.cos(p.phi) ** 2 * p.E1 / 4
    pz = abs((1 - eid) / 4) ** 2
    return PauliChannel(2, {
        "II": abs((1 + 2 * c + eid) / 4) ** 2,
        "ZI": pz,
        "IZ": pz,
        "XX": pxx,
        "YY": pxx,
        "XY": pxy,
        "YX": pxy,
        "ZZ": abs((1 - 2 * c + eid) / 4) ** 2,
    })


def cz_error_channel(p: CZErrorParams) -> KrausChannel:
    return KrausChannel((cz_error_unitary(p),), label="cz-error")


def tphi_crit(T1: float, alpha: float, t_step: float) -> float:
    """Dephasing time at which the twirled decoherence channel is depolarizing."""
    return t_step ** (alpha / (1 + alpha)) * (2 * T1) ** (1 / (1 + alpha))


def product_pauli_channel(singles) -> PauliChannel:
    singles = list(singles)
    if any(pc.n_qubits != 1 for pc in singles):
        raise ValueError("product_pauli_channel expects single-qubit channels")
    probs = {"": 1.0}
    for pc in singles:
        probs = {a + b: pa * pb for a, pa in probs.items() for b, pb in pc.probs.items()}
    return PauliChannel(len(singles), probs)


def pauli_channel_to_kraus(pc: PauliChannel) -> KrausChannel:
    kraus = [math.sqrt(p) * qlin.pauli_matrix(a) for a, p in sorted(pc.probs.items()) if p > 0]
    if not kraus:
        kraus = [np.zeros((1 << pc.n_qubits,) * 2)]
    return KrausChannel(tuple(kraus), label="pauli")


def upper_bound_channel(pc: PauliChannel) -> PauliChannel:
    """Assign the largest error probability p0 to every non-identity string."""
    n = pc.n_qubits
    ident = "I" * n
    p0 = max((p for a, p in pc.probs.items() if a != ident), default=0.0)
    if p0 == 0.0:
        return identity_pauli_channel(n)
    n_errors = (1 << 2 * n) - 1
    if n_errors * p0 > 1 + qlin.ATOL:
        raise ValueError(f"bound channel invalid: {n_errors} * p0 = {n_errors * p0} > 1")
    probs = {a: p0 for a in qlin.pauli_strings(n) if a != ident}
    probs[ident] = max(1 - n_errors * p0, 0.0)
    return PauliChannel(n, probs)
