"""Numba and numpy kernel flavours must agree; the env flag selects the backend."""
import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.sparse as sp

from conftest import dense_hamiltonian, pauli_matrix
from ncluster import _accel
from ncluster.kernels import (
    AXIS_CODE,
    apply_pauli_numba,
    apply_pauli_numpy,
    hamiltonian_coo_numba,
    hamiltonian_coo_numpy,
    pfaffian_numba,
    pfaffian_numpy,
)

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def coo_to_dense(t, n_sites):
    dim = 1 << n_sites
    return sp.coo_matrix((t[2], (t[0], t[1])), shape=(dim, dim)).toarray()


@pytest.mark.parametrize("n_sites,n,periodic", [(6, 1, True), (7, 2, True), (6, 0, False), (8, 3, True)])
def test_hamiltonian_numpy_matches_kronecker(n_sites, n, periodic):
    phi = 0.37
    h = coo_to_dense(hamiltonian_coo_numpy(n_sites, n, -np.cos(phi), np.sin(phi), periodic), n_sites)
    assert np.allclose(h, dense_hamiltonian(n_sites, n, phi, periodic=periodic), atol=1e-13)


@needs_numba
@pytest.mark.parametrize("n_sites,n,periodic", [(6, 1, True), (7, 2, False), (8, 3, True)])
def test_hamiltonian_flavours_agree(n_sites, n, periodic):
    a = coo_to_dense(hamiltonian_coo_numpy(n_sites, n, -0.3, 0.8, periodic), n_sites)
    b = coo_to_dense(hamiltonian_coo_numba(n_sites, n, -0.3, 0.8, periodic), n_sites)
    assert np.array_equal(a, b)


def test_apply_pauli_numpy_matches_kronecker():
    rng = np.random.default_rng(0)
    n_sites = 5
    vec = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    factors = [(1, "y"), (3, "x"), (0, "z"), (1, "x")]
    sites = np.array([s for s, _ in factors])
    axes = np.array([AXIS_CODE[a] for _, a in factors])
    assert np.allclose(apply_pauli_numpy(vec, sites, axes), pauli_matrix(factors, n_sites) @ vec)


@needs_numba
def test_apply_pauli_flavours_agree():
    rng = np.random.default_rng(1)
    vec = rng.standard_normal(1 << 9) + 1j * rng.standard_normal(1 << 9)
    for _ in range(30):
        m = rng.integers(1, 7)
        sites = rng.integers(0, 9, m)
        axes = rng.integers(1, 4, m)
        assert np.allclose(apply_pauli_numpy(vec, sites, axes), apply_pauli_numba(vec, sites, axes), atol=1e-13)


@needs_numba
def test_pfaffian_flavours_agree():
    rng = np.random.default_rng(2)
    for dim in (0, 2, 4, 10, 30):
        a = rng.standard_normal((dim, dim))
        a = a - a.T
        assert pfaffian_numba(a) == pytest.approx(pfaffian_numpy(a), rel=1e-10, abs=1e-14)


def test_pfaffian_numpy_zero_pivot():
    a = np.zeros((4, 4))
    a[0, 1], a[1, 0] = 1.0, -1.0
    assert pfaffian_numpy(a) == 0.0


def _backend_in_subprocess(value):
    env = dict(os.environ)
    env["NCLUSTER_BACKEND"] = value
    out = subprocess.run(
        [sys.executable, "-c", "import ncluster; print(ncluster.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    return out.stdout.strip()


def test_env_flag_forces_numpy():
    assert _backend_in_subprocess("numpy") == "numpy"


@needs_numba
def test_default_backend_is_numba():
    assert _backend_in_subprocess("numba") == "numba"


def test_numpy_backend_gives_same_physics():
    code = (
        "import ncluster, math;"
        "from ncluster.ed import build_and_solve;"
        "from ncluster import ModelParams, PauliString, compile_pauli, build_table, expectation;"
        "p = ModelParams(1, 0.6);"
        "s = build_and_solve(8, p);"
        "t = build_table(p, 10);"
        "v = expectation(compile_pauli(PauliString.parse('X0 Z1 Z2 X3')), t);"
        "print(repr(s.energy), repr(v))"
    )
    results = []
    for value in ("numpy", "numba"):
        env = dict(os.environ, NCLUSTER_BACKEND=value)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        results.append([float(x) for x in out.stdout.split()])
    assert results[0] == pytest.approx(results[1], abs=1e-12)
