import math

import numpy as np
import pytest

from conftest import ed_state, pauli_matrix
from ncluster import ModelParams, build_table, energy_density
from ncluster.ed import ed_entropy, ed_expectation, hamiltonian, parity_sectors
from ncluster.finite import block_entropy_bits, cluster_terms, quadratic_form, solve_matched, solve_sector
from ncluster.oracle import fermion_value, random_balanced_strings
from ncluster.pauli import PauliString


def sector_lowest(n_sites, params):
    h = hamiltonian(n_sites, params).toarray()
    out = {}
    for parity, idx in parity_sectors(n_sites).items():
        out[parity] = np.linalg.eigvalsh(h[np.ix_(idx, idx)])[0]
    return out


CASES = [(8, 1, 0.3), (8, 1, 0.9), (9, 2, 0.6), (10, 0, 1.1), (10, 3, 0.5), (9, 1, 1.3)]


@pytest.mark.parametrize("n_sites,n,phi", CASES)
def test_sector_energies_match_ed(n_sites, n, phi):
    p = ModelParams(n, phi)
    want = sector_lowest(n_sites, p)
    for parity in (1, -1):
        got = solve_sector(n_sites, p, parity)
        assert got.energy == pytest.approx(want[parity], abs=1e-10)
        assert round(got.parity_value()) == parity


@pytest.mark.parametrize("n_sites,gapless", [(8, -1), (10, 1), (12, -1)])
def test_critical_zero_mode(n_sites, gapless):
    from ncluster.errors import NumericalError

    p = ModelParams(1, math.pi / 4)
    with pytest.raises(NumericalError, match="zero mode"):
        solve_sector(n_sites, p, gapless)
    want = sector_lowest(n_sites, p)[-gapless]
    assert solve_sector(n_sites, p, -gapless).energy == pytest.approx(want, abs=1e-10)


def test_flip_path_is_exercised():
    flips = []
    for n_sites, n, phi in CASES:
        for parity in (1, -1):
            flips.append(solve_sector(n_sites, ModelParams(n, phi), parity).flipped)
    assert any(flips) and not all(flips)


def test_quadratic_form_reproduces_hamiltonian():
    # H = (i/4) sum h_ab g_a g_b restricted to a parity sector equals the spin Hamiltonian there
    from conftest import majorana_matrices

    n_sites, p = 6, ModelParams(1, 0.7)
    a_ops, b_ops = majorana_matrices(n_sites)
    g = []
    for a, b in zip(a_ops, b_ops):
        g += [a, -1j * b]  # g_{2j+1} = -i B_j is Hermitian
    hspin = hamiltonian(n_sites, p).toarray()
    for parity in (1, -1):
        h = quadratic_form(n_sites, p, parity)
        hq = sum(0.25j * h[i, j] * g[i] @ g[j] for i in range(2 * n_sites) for j in range(2 * n_sites) if h[i, j])
        idx = parity_sectors(n_sites)[parity]
        assert np.allclose(hq[np.ix_(idx, idx)], hspin[np.ix_(idx, idx)], atol=1e-12)


def test_cluster_terms_wrap_flags():
    terms = cluster_terms(6, 1)
    assert [w for _, w in terms] == [False] * 4 + [True] * 2
    assert str(terms[5][0]) == "X5 Z0 X1"


@pytest.mark.parametrize("n_sites,n,phi", [(10, 1, 0.9), (10, 2, 0.4), (9, 0, 1.2)])
def test_random_strings_match_ed(n_sites, n, phi):
    s = ed_state(n_sites, n, phi)
    f = solve_matched(s)
    assert f.energy == pytest.approx(s.energy, abs=1e-9)
    rng = np.random.default_rng(7)
    worst = 0.0
    for p in random_balanced_strings(n_sites, 60, rng):
        worst = max(worst, abs(fermion_value(f, p) - ed_expectation(s, p)))
    assert worst < 1e-8


def test_fermion_value_against_matrix():
    s = ed_state(8, 1, 0.6)
    f = solve_matched(s)
    psi = s.amplitude_vector
    for factors in ([(6, "x"), (7, "z"), (0, "x")], [(1, "y"), (4, "x")], [(0, "z"), (5, "z")]):
        want = np.vdot(psi, pauli_matrix(factors, 8) @ psi).real
        assert fermion_value(f, PauliString(tuple(factors))) == pytest.approx(want, abs=1e-10)


def test_block_entropy_matches_ed():
    s = ed_state(10, 1, 0.8)
    f = solve_matched(s)
    for sites in ([0, 1], [2, 3, 4], [0, 1, 2, 3, 4]):
        assert block_entropy_bits(f, sites) == pytest.approx(ed_entropy(s, sites), abs=1e-9)


@pytest.mark.parametrize("n,phi", [(1, 0.5), (2, 1.0), (0, 0.3), (3, 0.6)])
def test_large_ring_approaches_thermodynamic_limit(n, phi):
    from ncluster.observables import pauli_expectation

    p = ModelParams(n, phi)
    t = build_table(p, 16)
    f = solve_sector(402, p, 1)
    assert f.energy_per_site == pytest.approx(energy_density(p), abs=1e-10)
    strings = ["Z10", "Z10 Z13", "X10 Z11 X12", "X10 X14", "Y10 Y14", "X10 Y11 X12 Y13", "X10 Z11 Z12 Z13 X14"]
    for text in strings:
        q = PauliString.parse(text)
        assert fermion_value(f, q) == pytest.approx(pauli_expectation(p, q, t), abs=1e-10), text


def test_errors():
    with pytest.raises(ValueError):
        solve_sector(3, ModelParams(1, 0.5), 1)
    with pytest.raises(ValueError):
        quadratic_form(8, ModelParams(1, 0.5), 0)
