"""Two-spin density matrices, concurrence, and block entanglement entropy."""
import math
from dataclasses import dataclass, field

import numpy as np

from .correlators import build_table
from .errors import NumericalError
from .model import PHI_C, ModelParams
from .observables import _need, sigma_z, xx, yy, zz
from .quadrature import DEFAULT_QUAD

_I2 = np.eye(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.diag([1.0, -1.0]).astype(complex)
_YY = np.kron(_Y, _Y)

# Tolerances for physical sanity of assembled density matrices.
NEGATIVE_EIG_TOL = 1e-8
NU_TOL = 1e-8


@dataclass(frozen=True)
class TwoSpinRdm:
    """X-shaped two-spin reduced density matrix.

    Basis order is |up up>, |up down>, |down up>, |down down>, matching
    :func:`ncluster.ed.ed_rdm`.
    """

    entries: np.ndarray = field(repr=False)
    r: int = 0
    z: float = 0.0
    zz: float = 0.0
    xx: float = 0.0
    yy: float = 0.0

    @classmethod
    def from_correlators(cls, z, zz_, xx_, yy_, r=0):
        rho = (
            np.eye(4)
            + z * (np.kron(_Z, _I2) + np.kron(_I2, _Z))
            + xx_ * np.kron(_X, _X)
            + yy_ * _YY
            + zz_ * np.kron(_Z, _Z)
        ) / 4.0
        return cls(rho, r, z, zz_, xx_, yy_)

    @property
    def is_diagonal(self):
        off = self.entries - np.diag(np.diag(self.entries))
        return bool(np.all(off == 0))

    @property
    def eigenvalues(self):
        return np.linalg.eigvalsh(self.entries)


def two_spin_rdm(params, table, r, physical=True):
    """RDM of spins i and i+r, assembled from <Z>, <ZZ>, <XX>, <YY>.

    For r not a multiple of n+1 the coherences are exact zeros.
    """
    r = int(r)
    if r < 1:
        raise ValueError("two_spin_rdm needs r >= 1")
    table = _need(params, table, r + 1)
    z = sigma_z(params, table, physical)
    c_zz = zz(params, table, r, physical)
    if r % params.period:
        c_xx = c_yy = 0.0
    else:
        c_xx = xx(params, table, r, physical)
        c_yy = yy(params, table, r, physical)
    rdm = TwoSpinRdm.from_correlators(z, c_zz, c_xx, c_yy, r)
    low = rdm.eigenvalues.min()
    if low < -NEGATIVE_EIG_TOL:
        raise NumericalError(f"two-spin rdm has eigenvalue {low:.3g} for {params}, r={r}")
    return rdm


def _as_matrix(rdm):
    return rdm.entries if isinstance(rdm, TwoSpinRdm) else np.asarray(rdm)


def concurrence_xstate(rdm):
    """Closed form 2 max(0, |rho_14| - sqrt(rho_22 rho_33), |rho_23| - sqrt(rho_11 rho_44))."""
    m = _as_matrix(rdm)
    d = np.clip(np.real(np.diag(m)), 0.0, None)
    c1 = abs(m[0, 3]) - math.sqrt(d[1] * d[2])
    c2 = abs(m[1, 2]) - math.sqrt(d[0] * d[3])
    return max(0.0, 2.0 * max(c1, c2))


def concurrence_wootters(rdm):
    """General Wootters formula from the spectrum of rho (Y x Y) rho* (Y x Y)."""
    m = _as_matrix(rdm)
    r = m @ _YY @ m.conj() @ _YY
    lam = np.sqrt(np.clip(np.sort(np.real(np.linalg.eigvals(r)))[::-1], 0.0, None))
    return max(0.0, float(lam[0] - lam[1:].sum()))


def concurrence(rdm, cross_check=False, tol=1e-8):
    """Wootters concurrence of a two-qubit X state, in [0, 1].

    With ``cross_check`` the closed form is compared to the general spin-flip
    formula and a mismatch raises NumericalError.
    """
    c = concurrence_xstate(rdm)
    if cross_check:
        g = concurrence_wootters(rdm)
        if abs(g - c) > tol:
            raise NumericalError(f"concurrence mismatch: X-state {c:.12g} vs spin-flip {g:.12g}")
    return min(c, 1.0)


@dataclass(frozen=True)
class StructureReport:
    """Pass/fail of the structural premises behind the absence of genuine
    multipartite entanglement in a block of n+2 spins."""

    n: int
    phi: float
    inner_pairs_diagonal: bool
    endpoint_pair_x_state: bool
    no_single_spin_coherence: bool
    details: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self):
        return self.inner_pairs_diagonal and self.endpoint_pair_x_state and self.no_single_spin_coherence

    def lines(self):
        yield f"(a) inner pairs diagonal: {'pass' if self.inner_pairs_diagonal else 'FAIL'}"
        yield f"(b) endpoint pair is an X state: {'pass' if self.endpoint_pair_x_state else 'FAIL'}"
        yield f"(c) single-spin coherences vanish: {'pass' if self.no_single_spin_coherence else 'FAIL'}"


_X_MASK = np.array(
    [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1, 1, 0], [1, 0, 0, 1]], dtype=bool
)


def is_x_state(m, tol=0.0):
    m = np.asarray(m)
    return bool(np.all(np.abs(m[~_X_MASK]) <= tol))


def is_diagonal(m, tol=0.0):
    m = np.asarray(m)
    return bool(np.all(np.abs(m - np.diag(np.diag(m))) <= tol))


def multipartite_structure_report(params, table=None):
    """Check premises (a)-(c) on the block of n+2 contiguous spins."""
    from .observables import pauli_expectation
    from .pauli import PauliString

    n = params.n
    table = _need(params, table, n + 3)
    size = n + 2
    inner = {}
    for i in range(size):
        for j in range(i + 1, size):
            if (i, j) == (0, size - 1):
                continue
            inner[(i, j)] = two_spin_rdm(params, table, j - i).is_diagonal
    end = two_spin_rdm(params, table, size - 1)
    coh = [pauli_expectation(params, PauliString(((0, a),)), table) for a in ("x", "y")]
    return StructureReport(
        n=n,
        phi=params.phi,
        inner_pairs_diagonal=all(inner.values()),
        endpoint_pair_x_state=is_x_state(end.entries),
        no_single_spin_coherence=all(c == 0.0 for c in coh),
        details={"inner": inner, "endpoint": end, "coherences": coh},
    )


@dataclass(frozen=True)
class BlockGamma:
    """Majorana correlation matrix of a block of m spins.

    Built from 2x2 blocks, block (i, j) = Pi_{i-j} with
    Pi_r = [[0, G_r], [-G_{-r}, 0]].
    """

    m: int
    matrix: np.ndarray = field(repr=False)
    spectrum: np.ndarray = field(repr=False)


def block_gamma(params, table, m):
    m = int(m)
    if m < 1:
        raise ValueError("block size must be >= 1")
    table = _need(params, table, m)
    i = np.arange(m)
    d = i[:, None] - i[None, :]
    g = np.zeros((2 * m, 2 * m))
    g[0::2, 1::2] = table.lookup(d)
    g[1::2, 0::2] = -table.lookup(-d)
    # i*Gamma is Hermitian with spectrum +-nu
    w = np.linalg.eigvalsh(1j * g)
    nu = np.sort(np.abs(w))[::2]
    if nu.size and nu.max() > 1 + NU_TOL:
        raise NumericalError(f"Gamma spectrum {nu.max():.12g} exceeds 1 for {params}, m={m}")
    return BlockGamma(m, g, np.clip(nu, 0.0, 1.0))


def shannon_bits(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    ok = (x > 0) & (x < 1)
    xv = x[ok]
    out[ok] = -xv * np.log2(xv) - (1 - xv) * np.log2(1 - xv)
    return out


def block_entropy(params, table, m):
    """Von Neumann entropy (bits) of m contiguous spins."""
    bg = block_gamma(params, table, m)
    return float(shannon_bits((1 + bg.spectrum) / 2).sum())


@dataclass(frozen=True)
class CentralChargeFit:
    n: int
    m_range: tuple
    entropies: tuple
    slope: float
    intercept: float
    c_hat: float
    c_theory: float
    r_squared: float
    c_reference: float = math.nan


def central_charge_fit(n, m_range=range(8, 65), quad=DEFAULT_QUAD, j_scale=1.0):
    """Fit S(m) = slope log2(m) + const at phi = pi/4; c_hat = 3 slope.

    ``c_theory`` is (1+n)/2, one Ising Majorana per sublattice; ``c_reference``
    is the empirical 0.51 (1+n) against which fits are usually quoted.
    """
    ms = sorted({int(m) for m in m_range})
    if len(ms) < 6:
        raise ValueError("central charge fit needs at least 6 block sizes")
    if ms[-1] < 4 * ms[0]:
        raise ValueError("block sizes must span a factor of at least 4")
    params = ModelParams(n, PHI_C, j_scale)
    table = build_table(params, ms[-1], quad)
    s = np.array([block_entropy(params, table, m) for m in ms])
    x = np.log2(ms)
    slope, intercept = np.polyfit(x, s, 1)
    resid = s - (slope * x + intercept)
    ss_tot = float(((s - s.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return CentralChargeFit(
        n=n,
        m_range=tuple(ms),
        entropies=tuple(float(v) for v in s),
        slope=float(slope),
        intercept=float(intercept),
        c_hat=3.0 * float(slope),
        c_theory=0.5 * (1 + n),
        r_squared=r2,
        c_reference=0.51 * (1 + n),
    )
