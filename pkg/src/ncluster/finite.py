"""Free-fermion ground state of a finite periodic ring in a fixed parity sector.

The Jordan-Wigner Majoranas are built from the physical spins with the string
starting at site 0,

    A_j = (prod_{k<j} Z_k) X_j,    B_j = -i (prod_{k<j} Z_k) Y_j,

which is exactly the convention of :func:`ncluster.pauli.compile_pauli`.  So a
compiled monomial evaluated here is the physical expectation value with no
frame sign.  A cluster term that wraps around the ring is rewritten as
``p * (P T)`` with P the total parity; ``P T`` compiles to a quadratic
monomial and p is the sector eigenvalue.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError
from .pauli import PARITY_ODD, PauliString, compile_pauli
from .wick import canonical_det_from

# A Gaussian ground state needs a gapped quadratic form; below this the
# sector ground state is ambiguous.
ZERO_MODE_TOL = 1e-12


def _majorana_index(site, flavor):
    """Hermitian Majorana index and phase: A_j = g_{2j}, B_j = i g_{2j+1}."""
    if flavor == "A":
        return 2 * site, 1.0
    return 2 * site + 1, 1j


def cluster_terms(n_sites, n):
    """Pauli strings X_j Z...Z X_{j+n+1} on the ring, with a wrap flag."""
    out = []
    for j in range(n_sites):
        sites = [(j + t) % n_sites for t in range(n + 2)]
        axes = ["x"] + ["z"] * n + ["x"]
        out.append((PauliString(tuple(zip(sites, axes))), j + n + 1 >= n_sites))
    return out


def quadratic_form(n_sites, params, parity):
    """Real antisymmetric h with H = (i/4) sum_ab h_ab g_a g_b in the given sector."""
    if parity not in (1, -1):
        raise ValueError("parity must be +1 or -1")
    J, phi = params.j_scale, params.phi
    h = np.zeros((2 * n_sites, 2 * n_sites))
    total_parity = PauliString(tuple((k, "z") for k in range(n_sites)))

    def add(p, coef):
        mono = compile_pauli(p)
        if mono is PARITY_ODD or len(mono) != 2:
            raise NumericalError(f"term {p} did not compile to a quadratic monomial")
        (s0, f0), (s1, f1) = mono.ops
        a, pa = _majorana_index(s0, f0)
        b, pb = _majorana_index(s1, f1)
        c = coef * mono.prefactor * pa * pb
        # c g_a g_b = (i/2) h_ab g_a g_b with h antisymmetric
        hab = -2j * c
        if abs(hab.imag) > 1e-12:
            raise NumericalError("quadratic form is not real")
        h[a, b] += hab.real
        h[b, a] -= hab.real

    for k in range(n_sites):
        add(PauliString(((k, "z"),)), J * math.sin(phi))
    for term, wraps in cluster_terms(n_sites, params.n):
        coef = -J * math.cos(phi)
        if wraps:
            add(total_parity * term, coef * parity)
        else:
            add(term, coef)
    return h


@dataclass(frozen=True)
class FiniteFermionState:
    """Gaussian ground state of one parity sector of a finite ring.

    ``gamma`` is the real antisymmetric matrix with <g_a g_b> = delta_ab + i gamma_ab.
    """

    n_sites: int
    params: object
    parity: int
    energy: float
    gamma: np.ndarray = field(repr=False)
    flipped: bool = False

    @property
    def energy_per_site(self):
        return self.energy / self.n_sites

    def _two_point(self, ops):
        idx, ph = zip(*(_majorana_index(s, f) for s, f in ops))
        idx = np.array(idx)
        ph = np.array(ph)
        m = 1j * self.gamma[np.ix_(idx, idx)] + (idx[:, None] == idx[None, :])
        return m * ph[:, None] * ph[None, :]

    def contraction_matrix(self, mono):
        """Skew matrix of <op_a op_b> (a < b) for the monomial's operators."""
        m = self._two_point(mono.ops)
        if m.size and np.max(np.abs(m.imag)) > 1e-10:
            raise NumericalError("complex contraction in a real Gaussian state")
        upper = np.triu(m.real, 1)
        return upper - upper.T

    def canonical_det(self, mono):
        g = self.gamma
        # <A_i B_j> = <g_{2i} i g_{2j+1}> = i * i gamma = -gamma
        return canonical_det_from(mono, lambda sa, sb: -g[np.ix_(2 * sa, 2 * sb + 1)])

    def parity_value(self):
        from .wick import expectation

        return expectation(compile_pauli(PauliString(tuple((k, "z") for k in range(self.n_sites)))), self)


def solve_sector(n_sites, params, parity):
    """Ground state of the quadratic form of one sector, projected to that parity.

    h only couples A-type to B-type Majoranas, so with K = h[even, odd] and
    K = U S V^T the ground state has gamma[even, odd] = U V^T and mode
    energies S.  If that state carries the wrong parity the slowest mode is
    flipped (the standard finite-ring resolution).
    """
    if n_sites <= params.n + 2:
        raise ValueError("periodic chains need n_sites > n+2")
    h = quadratic_form(n_sites, params, parity)
    if np.abs(h[0::2, 0::2]).max() > 0 or np.abs(h[1::2, 1::2]).max() > 0:
        raise NumericalError("quadratic form couples like Majoranas")
    u, svals, vt = np.linalg.svd(h[0::2, 1::2])
    if svals.min() < ZERO_MODE_TOL:
        raise NumericalError(f"zero mode in sector {parity:+d} of the N={n_sites} ring")
    energy = -0.5 * float(svals.sum())

    def build(block, e, flipped):
        g = np.zeros_like(h)
        g[0::2, 1::2] = block
        g[1::2, 0::2] = -block.T
        return FiniteFermionState(n_sites, params, parity, e, g, flipped)

    state = build(u @ vt, energy, False)
    if round(state.parity_value()) == parity:
        return state
    slow = int(np.argmin(svals))
    block = u @ vt - 2 * np.outer(u[:, slow], vt[slow])
    state = build(block, energy + float(svals[slow]), True)
    if round(state.parity_value()) != parity:
        raise NumericalError("could not reach the requested parity sector")
    return state


def solve_matched(ed_state):
    """Fermionic state in the same parity sector as an ED ground state."""
    return solve_sector(ed_state.n_sites, ed_state.params, ed_state.parity)


def block_entropy_bits(state, sites):
    """Von Neumann entropy (bits) of the spins ``sites`` in a Gaussian state."""
    idx = np.sort(np.concatenate([2 * np.asarray(sites), 2 * np.asarray(sites) + 1]))
    w = np.linalg.eigvalsh(1j * state.gamma[np.ix_(idx, idx)])
    nu = np.clip(np.sort(np.abs(w))[::2], 0.0, 1.0)
    p = (1 + nu) / 2
    p = p[(p > 0) & (p < 1)]
    return float(-(p * np.log2(p) + (1 - p) * np.log2(1 - p)).sum())
