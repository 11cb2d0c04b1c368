"""Model parameters, the momentum-mode solution and ground-state energetics.

The chain Hamiltonian is

    H = -J cos(phi) sum_j X_j Z_{j+1} ... Z_{j+n} X_{j+n+1} + J sin(phi) sum_j Z_j

and after the Jordan-Wigner map every pair of momenta (k, -k) decouples into
a two-level problem with gap ``2 J sqrt(1 + cos((n+1)k) sin(2 phi))``.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate

PHI_C = math.pi / 4


@dataclass(frozen=True)
class ModelParams:
    """One Hamiltonian instance: cluster extension ``n`` (cluster of n+2 spins),
    interaction angle ``phi`` in radians and energy unit ``j_scale``."""

    n: int
    phi: float
    j_scale: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"n must be a non-negative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "j_scale", float(self.j_scale))
        if not (0.0 <= self.phi <= math.pi / 2):
            raise ValueError(f"phi must lie in [0, pi/2], got {self.phi}")
        if not self.j_scale > 0:
            raise ValueError("j_scale must be positive")

    @property
    def period(self):
        """Fermionic hopping range n+1; the selection rule works modulo this."""
        return self.n + 1

    @property
    def coupling(self):
        """sin(2 phi), the only combination entering the dispersion."""
        return math.sin(2 * self.phi)


@dataclass(frozen=True)
class ModeSolution:
    k: float
    delta: float
    epsilon: float
    e_ground: float
    alpha: complex
    beta: complex


def mode_solution(params, k):
    """Ground state of the (k, -k) block.

    ``alpha`` and ``beta`` are the amplitudes on |1_k 1_-k> and |0_k 0_-k>,
    taken from the actual lowest eigenvector of the block matrix.
    """
    if not (0.0 < k <= math.pi):
        raise ValueError(f"k must lie in (0, pi], got {k}")
    J, n, phi = params.j_scale, params.n, params.phi
    delta = J * math.sin((n + 1) * k) * math.cos(phi)
    eps = J * (math.cos((n + 1) * k) * math.cos(phi) + math.sin(phi))
    half = math.hypot(eps, delta)
    e0 = -2.0 * half
    # eps - half without cancellation when eps > 0
    lower = -(delta * delta) / (eps + half) if eps > 0 else eps - half
    norm = math.hypot(delta, lower)
    if norm == 0.0:
        # delta == 0 and eps >= 0: the empty pair state is the ground state
        alpha, beta = 0j, 1.0 + 0j
    else:
        alpha = 1j * lower / norm
        beta = delta / norm + 0j
    return ModeSolution(k=k, delta=delta, epsilon=eps, e_ground=e0, alpha=alpha, beta=beta)


def mode_matrix(sol):
    """4x4 block Hamiltonian in the basis |11>, |00>, |10>, |01>."""
    m = np.zeros((4, 4), dtype=complex)
    m[0, 0] = 2 * sol.epsilon
    m[1, 1] = -2 * sol.epsilon
    m[0, 1] = 2j * sol.delta
    m[1, 0] = -2j * sol.delta
    return m


def _kinks(n):
    """Points k = j pi/(n+1) where the dispersion or the correlator kernel can kink."""
    return [j * math.pi / (n + 1) for j in range(n + 2)]


def _grading(params):
    s = abs(params.coupling)
    if s >= 1.0 or s == 0.0:
        return None
    return math.sqrt(2 * (1 - s) / s) / (params.n + 1)


def energy_density(params, quad=DEFAULT_QUAD):
    """Ground-state energy per spin in the thermodynamic limit.

    Normalised per spin, so the fully polarised point phi = pi/2 gives -J.
    """
    quad.check_for(params.n)
    J, n, s = params.j_scale, params.n, params.coupling

    def f(k):
        return np.sqrt(np.maximum(1.0 + np.cos((n + 1) * k) * s, 0.0))

    val = integrate(f, 0.0, math.pi, quad, _kinks(n), _grading(params))
    return -J * float(val) / math.pi


def mode_sum_energy(params, n_sites, sector="periodic"):
    """Finite-ring energy per spin from summing -J|f(k)| over all N momenta.

    ``sector`` picks k = 2 pi l / N ("periodic") or 2 pi (l + 1/2) / N
    ("antiperiodic"); which one is physical depends on the fermion parity.
    """
    shift = {"periodic": 0.0, "antiperiodic": 0.5}[sector]
    k = 2 * math.pi * (np.arange(n_sites) + shift) / n_sites
    band = np.sqrt(np.maximum(1.0 + params.coupling * np.cos((params.n + 1) * k), 0.0))
    return -params.j_scale * float(band.sum()) / n_sites


def spectral_gap(params):
    """Smallest single-mode gap 2J sqrt(1 - |sin 2phi|); zero only at phi = pi/4."""
    return 2.0 * params.j_scale * math.sqrt(max(0.0, 1.0 - abs(params.coupling)))


def gapless_momenta(n):
    """Momenta in (0, pi] where the dispersion touches zero at phi = pi/4."""
    return [(2 * m + 1) * math.pi / (n + 1) for m in range(n + 1) if (2 * m + 1) <= n + 1]


def d2_energy_scan(n, grid, h=1e-3, quad=DEFAULT_QUAD, j_scale=1.0):
    """Central second difference of the energy density over a phi grid.

    Returns ``(phi, d2)`` arrays.  A warning is issued when the quadrature
    tolerance, amplified by 4/h^2, is no longer negligible.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty phi grid")
    if h <= 0:
        raise ValueError("h must be positive")
    if np.any(grid - h < 0) or np.any(grid + h > math.pi / 2):
        raise ValueError("grid +/- h must stay inside [0, pi/2]")
    noise = 4 * quad.tol / h**2
    if noise > 1e-2:
        warnings.warn(
            f"finite-difference step {h:g} amplifies quadrature noise to ~{noise:.2g}",
            RuntimeWarning,
            stacklevel=2,
        )

    def e(phi):
        return energy_density(ModelParams(n, phi, j_scale), quad)

    d2 = np.array([(e(p + h) - 2 * e(p) + e(p - h)) / h**2 for p in grid])
    return grid, d2
