"""Dense complex linear algebra and Pauli strings for few-qubit density matrices.

Conventions: qubits are indexed from 0, and qubit 0 is the most significant
(leftmost) tensor factor, so the basis state |x0 x1 ... x_{n-1}> sits at
index x0*2^(n-1) + ... + x_{n-1}.

Every function accepting a density matrix also accepts a stack of them with
arbitrary leading batch dimensions, ``rho.shape == (..., 2**n, 2**n)``.
"""

from __future__ import annotations

import itertools
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

ATOL = 1e-12
EVOLUTION_ATOL = 1e-10
ZERO_PROBABILITY = 1e-15

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CZ = np.diag([1, 1, 1, -1]).astype(complex)

PAULI_LETTERS = "IXYZ"
PAULIS = {"I": I2, "X": X, "Y": Y, "Z": Z}


class ZeroProbabilityOutcome(ValueError):
    """A measurement outcome whose probability is below ``ZERO_PROBABILITY``."""


def n_qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of the arguments, leftmost factor most significant."""
    if not mats:
        return np.ones((1, 1), dtype=complex)
    return reduce(np.kron, mats)


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a: np.ndarray, atol: float = ATOL) -> bool:
    return bool(np.allclose(a, dagger(a), rtol=0, atol=atol))


def is_unitary(u: np.ndarray, atol: float = ATOL) -> bool:
    eye = np.eye(u.shape[-1])
    return bool(np.allclose(dagger(u) @ u, eye, rtol=0, atol=atol))


def is_density_matrix(rho: np.ndarray, atol: float = ATOL) -> bool:
    """Hermitian, unit trace and positive semidefinite (test-mode check)."""
    if not is_hermitian(rho, atol):
        return False
    if abs(np.trace(rho) - 1) > atol:
        return False
    return bool(np.linalg.eigvalsh(rho).min() >= -atol)


def validate_pauli(label: str) -> str:
    label = label.upper()
    if not label or any(c not in PAULI_LETTERS for c in label):
        raise ValueError(f"invalid Pauli string {label!r}")
    return label


@lru_cache(maxsize=None)
def _pauli_matrix_cached(label: str) -> np.ndarray:
    m = kron(*(PAULIS[c] for c in label))
    m.setflags(write=False)
    return m


def pauli_matrix(label: str) -> np.ndarray:
    """Matrix of a Pauli string such as ``"XZ"`` (qubit 0 first)."""
    return _pauli_matrix_cached(validate_pauli(label))


def pauli_strings(n: int) -> list[str]:
    """All 4**n Pauli strings in lexicographic IXYZ order."""
    return ["".join(p) for p in itertools.product(PAULI_LETTERS, repeat=n)]


_PAULI_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_PAULI = {v: k for k, v in _PAULI_BITS.items()}


def pauli_product(a: str, b: str) -> str:
    """Pauli string of ``a @ b`` with the global phase dropped."""
    out = []
    for p, q in zip(validate_pauli(a), validate_pauli(b)):
        bits = _PAULI_BITS[p][0] ^ _PAULI_BITS[q][0], _PAULI_BITS[p][1] ^ _PAULI_BITS[q][1]
        out.append(_BITS_PAULI[bits])
    return "".join(out)


def basis_state(bits: Sequence[int]) -> np.ndarray:
    """Computational basis ket |bits>."""
    psi = np.zeros(1 << len(bits), dtype=complex)
    psi[int("".join(str(int(b)) for b in bits), 2) if bits else 0] = 1
    return psi


def pure(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def embed(u: np.ndarray, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """Lift an operator on ``targets`` (in that order) to the full register."""
    targets = list(targets)
    k = len(targets)
    if u.shape != (1 << k, 1 << k):
        raise ValueError(f"operator of shape {u.shape} does not act on {k} qubit(s)")
    if len(set(targets)) != k or any(not 0 <= t < n_qubits for t in targets):
        raise ValueError(f"bad target qubits {targets} for a {n_qubits}-qubit register")
    if targets == list(range(n_qubits)):
        return np.asarray(u, dtype=complex)
    rest = [q for q in range(n_qubits) if q not in targets]
    full = np.kron(u, np.eye(1 << len(rest))).reshape([2] * (2 * n_qubits))
    # axes of `full` are currently ordered (targets..., rest...) on both sides
    order = targets + rest
    perm = [order.index(q) for q in range(n_qubits)]
    perm = perm + [n_qubits + p for p in perm]
    return full.transpose(perm).reshape(1 << n_qubits, 1 << n_qubits)


def apply_unitary(rho: np.ndarray, u: np.ndarray, targets: Sequence[int],
                  check: bool = False) -> np.ndarray:
    """Return U rho U^dagger with ``u`` embedded on ``targets``."""
    if check and not is_unitary(u):
        raise ValueError("operator is not unitary")
    full = embed(u, targets, n_qubits_of(rho.shape[-1]))
    return full @ rho @ dagger(full)


def apply_kraus(rho: np.ndarray, kraus: Sequence[np.ndarray],
                targets: Sequence[int]) -> np.ndarray:
    """Return sum_m E_m rho E_m^dagger with each E_m embedded on ``targets``."""
    n = n_qubits_of(rho.shape[-1])
    out = np.zeros_like(rho, dtype=complex)
    for e in kraus:
        full = embed(e, targets, n)
        out += full @ rho @ dagger(full)
    return out


def project(rho: np.ndarray, qubits: Sequence[int], bits: Sequence[int]) -> np.ndarray:
    """Unnormalized P rho P for the projector onto ``qubits`` reading ``bits``."""
    n = n_qubits_of(rho.shape[-1])
    mask = np.ones(1 << n, dtype=bool)
    idx = np.arange(1 << n)
    for q, b in zip(qubits, bits):
        mask &= ((idx >> (n - 1 - q)) & 1) == b
    return rho * (mask[:, None] & mask[None, :])


def measure_qubit(rho: np.ndarray, q: int, outcome: int) -> tuple[float, np.ndarray]:
    """Z-basis measurement of one qubit; returns (probability, normalized state)."""
    n = n_qubits_of(rho.shape[-1])
    if not 0 <= q < n:
        raise ValueError(f"qubit {q} out of range for {n} qubits")
    post = project(rho, [q], [outcome])
    p = float(np.real(np.trace(post)))
    if p < ZERO_PROBABILITY:
        raise ZeroProbabilityOutcome(f"outcome {outcome} on qubit {q} has probability {p:.3g}")
    return p, post / p


def partial_trace(rho: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Reduced state on ``keep`` (kept in ascending qubit order)."""
    n = n_qubits_of(rho.shape[-1])
    keep = sorted(keep)
    drop = [q for q in range(n) if q not in keep]
    batch = rho.shape[:-2]
    t = rho.reshape(batch + (2,) * (2 * n))
    nb = len(batch)
    # move to (..., keep, drop, keep', drop') then trace drop with drop'
    perm = list(range(nb)) + [nb + q for q in keep + drop] + [nb + n + q for q in keep + drop]
    t = t.transpose(perm)
    dk, dd = 1 << len(keep), 1 << len(drop)
    t = t.reshape(batch + (dk, dd, dk, dd))
    return np.einsum("...iaja->...ij", t)


def fidelity_with_pure(rho: np.ndarray, psi: np.ndarray) -> float | np.ndarray:
    """<psi|rho|psi>, clipped to [0, 1]."""
    psi = np.asarray(psi, dtype=complex)
    val = np.real(np.einsum("i,...ij,j->...", psi.conj(), rho, psi))
    return np.clip(val, 0.0, 1.0) if np.ndim(val) else float(np.clip(val, 0.0, 1.0))
