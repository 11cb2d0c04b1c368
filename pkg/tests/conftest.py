"""Shared fixtures and small independent oracles for the test suite."""
import functools
import math

import numpy as np
import pytest

from ncluster.ed import build_and_solve
from ncluster.model import ModelParams

# local single-site matrices in the (bit 0 = down, bit 1 = up) ordering used
# by the ED basis, where bit j of the state index is spin j
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, 1j], [-1j, 0]])
SZ = np.diag([-1.0, 1.0]).astype(complex)
PAULI = {"x": SX, "y": SY, "z": SZ}


def site_op(op, site, n_sites):
    """Full 2^N matrix of a single-site operator (site 0 is the lowest bit)."""
    out = np.eye(1, dtype=complex)
    for k in reversed(range(n_sites)):
        out = np.kron(out, op if k == site else np.eye(2))
    return out


def pauli_matrix(factors, n_sites):
    out = np.eye(1 << n_sites, dtype=complex)
    for site, axis in factors:
        out = out @ site_op(PAULI[axis], site, n_sites)
    return out


def dense_hamiltonian(n_sites, n, phi, j_scale=1.0, periodic=True):
    """Cluster Hamiltonian built term by term from Kronecker products."""
    h = np.zeros((1 << n_sites, 1 << n_sites), dtype=complex)
    for j in range(n_sites):
        h += j_scale * math.sin(phi) * site_op(SZ, j, n_sites)
        if not periodic and j + n + 1 >= n_sites:
            continue
        factors = [(j, "x")] + [((j + t) % n_sites, "z") for t in range(1, n + 1)]
        factors.append(((j + n + 1) % n_sites, "x"))
        h -= j_scale * math.cos(phi) * pauli_matrix(factors, n_sites)
    return h


def majorana_matrices(n_sites):
    """A_j = (prod_{k<j} Z_k) X_j and B_j = -i (prod_{k<j} Z_k) Y_j."""
    a, b = [], []
    string = np.eye(1 << n_sites, dtype=complex)
    for j in range(n_sites):
        a.append(string @ site_op(SX, j, n_sites))
        b.append(-1j * string @ site_op(SY, j, n_sites))
        string = string @ site_op(SZ, j, n_sites)
    return a, b


@functools.lru_cache(maxsize=None)
def ed_state(n_sites, n, phi, boundary="periodic"):
    return build_and_solve(n_sites, ModelParams(n, phi), boundary)


@pytest.fixture(scope="session")
def ed_n1_12_09():
    return ed_state(12, 1, 0.9)
