"""Random states and channels shared by the tests."""

import numpy as np

from twirlsim.channels import KrausChannel


def random_unitary(n_qubits, rng):
    d = 2**n_qubits
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density_matrix(n_qubits, rng):
    d = 2**n_qubits
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def random_kraus_channel(n_qubits, rng, n_kraus=3):
    """Trace-preserving channel cut from a random isometry."""
    d = 2**n_qubits
    g = rng.normal(size=(n_kraus * d, d)) + 1j * rng.normal(size=(n_kraus * d, d))
    q, _ = np.linalg.qr(g)
    return KrausChannel(tuple(q[k * d:(k + 1) * d] for k in range(n_kraus)), label="random")
