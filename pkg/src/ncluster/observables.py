"""Spin correlators, cluster-operator correlators and order parameters.

Every function takes ``physical=True`` by default: the returned value is the
expectation in the spin basis of the Hamiltonian as written (so <Z> = -1 at
phi = pi/2).  With ``physical=False`` the value is the one of the fermionic
frame in which G_r is tabulated, e.g. ``sigma_z = -G_0``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .correlators import build_table
from .errors import MissingOffsetError, NumericalError
from .model import PHI_C, ModelParams
from .pauli import PauliString, cluster_operator, compile_pauli, frame_sign
from .quadrature import DEFAULT_QUAD
from .wick import expectation

# For odd n the operator product O_j O_{j+1} built from the alternating
# Y X ... Y X pattern equals minus the cluster term.  A staggered sign (-1)^j
# on O_j restores O_j O_{j+1} = X Z...Z X, which makes the correlator positive
# in the cluster phase.  Pinned against exact diagonalisation.
ODD_N_STAGGER = True


def _need(params, table, max_offset, quad=DEFAULT_QUAD):
    """Return a table covering |r| <= max_offset, building one if none was given."""
    if table is None:
        return build_table(params, max_offset, quad)
    if table.params != params:
        raise ValueError("table was built for different parameters")
    if table.max_abs_offset < max_offset:
        raise MissingOffsetError(f"table covers |r| <= {table.max_abs_offset}, need {max_offset}")
    return table


def pauli_expectation(params, p, table=None, physical=True):
    """<p> in the thermodynamic-limit ground state via compile + Wick."""
    if not isinstance(p, PauliString):
        p = PauliString(tuple(p))
    if not p.factors:
        return 1.0
    sites = [s for s, _ in p.factors]
    table = _need(params, table, max(sites) - min(sites) + params.n + 1)
    val = expectation(compile_pauli(p), table)
    return frame_sign(p, params.n) * val if physical else val


def sigma_z(params, table=None, physical=True):
    """Magnetisation: -G_0 in the fermionic frame, G_0 physically."""
    table = _need(params, table, 0)
    val = -table[0]
    return -val if physical else val


def zz(params, table, r, physical=True):
    """<Z_i Z_{i+r}> = G_0^2 - G_r G_{-r}; identical in both frames."""
    r = int(r)
    if r == 0:
        return 1.0
    table = _need(params, table, abs(r))
    return table[0] ** 2 - table[r] * table[-r]


def _toeplitz(table, r, shift):
    i = np.arange(r)
    return table.lookup(i[None, :] - i[:, None] + shift)


def _xx_sign(params, r, axis):
    return frame_sign(PauliString(((0, axis), (r, axis))), params.n)


def xx(params, table, r, physical=True):
    """<X_i X_{i+r}> as the r x r Toeplitz determinant with entries G_{j-i-1}."""
    r = int(r)
    if r <= 0:
        raise ValueError("xx needs r >= 1")
    table = _need(params, table, r + 1)
    val = float(np.linalg.det(_toeplitz(table, r, -1)))
    return _xx_sign(params, r, "x") * val if physical else val


def yy(params, table, r, physical=True):
    """<Y_i Y_{i+r}> as the r x r Toeplitz determinant with entries G_{j-i+1}."""
    r = int(r)
    if r <= 0:
        raise ValueError("yy needs r >= 1")
    table = _need(params, table, r + 1)
    val = float(np.linalg.det(_toeplitz(table, r, 1)))
    return _xx_sign(params, r, "y") * val if physical else val


def cluster_pair(j, r, n):
    """Pauli string O_j O_{j+r} (strings of odd-n operators start at site 0)."""
    return cluster_operator(j, n) * cluster_operator(j + r, n)


def stagger_sign(n, r):
    """Sign turning <O_j O_{j+r}> of the alternating Y X ... Y X operators into the staggered convention."""
    return -1 if ODD_N_STAGGER and n % 2 and r % 2 else 1


def _cluster_at(params, table, j, r, physical):
    p = cluster_pair(j, r, params.n)
    val = expectation(compile_pauli(p), table)
    if physical:
        val *= frame_sign(p, params.n)
    return stagger_sign(params.n, r) * val


def cluster_correlator(params, table, r, physical=True, check_origins=True):
    """<O_j O_{j+r}> for the cluster operators of extension n.

    Evaluated at two origins; a mismatch beyond 1e-9 raises NumericalError.
    """
    r = int(r)
    if r < 1:
        raise ValueError("cluster_correlator needs r >= 1")
    n = params.n
    table = _need(params, table, r + n + 2)
    j0 = n if n % 2 else 0
    val = _cluster_at(params, table, j0, r, physical)
    if check_origins:
        other = _cluster_at(params, table, j0 + 1, r, physical)
        if abs(other - val) > 1e-9 * max(1.0, abs(val)):
            raise NumericalError(f"cluster correlator not translation invariant: {val} vs {other}")
    return val


def closed_form_order(n, phi):
    """(1 - tan^2 phi)^((n+1)/8) below the critical point, nan above it."""
    base = 1.0 - math.tan(phi) ** 2
    if base < 0:
        return math.nan
    return base ** ((n + 1) / 8)


def correlation_length(phi):
    """Decay length of the order correlations, in units of n+1 sites."""
    t = math.tan(phi)
    if t <= 0:
        return 0.0
    lt = abs(math.log(t))
    return math.inf if lt < 1e-12 else 1.0 / lt


@dataclass(frozen=True)
class OrderParameterResult:
    n: int
    phi: float
    kind: str
    samples: tuple
    extrapolated: float
    closed_form: float
    converged: bool
    spread: float


DEFAULT_MAX_SAMPLES = 32


def default_rmax(params, minimum_blocks=24, lengths=8.0, cap_blocks=5000):
    """r_max = (n+1) * max(minimum_blocks, lengths * xi), xi the decay length.

    Raises ValueError when that would exceed ``cap_blocks`` multiples of n+1,
    i.e. too close to the critical point for an automatic choice.
    """
    xi = correlation_length(params.phi)
    if lengths * xi > cap_blocks:
        raise ValueError(
            f"phi={params.phi} is too close to pi/4 for an automatic r_max (xi = {xi:.3g}); pass r_max"
        )
    blocks = max(minimum_blocks, int(math.ceil(lengths * xi)))
    return params.period * blocks


def sample_separations(params, r_max, max_samples=DEFAULT_MAX_SAMPLES):
    """Separations r that are multiples of n+1, up to r_max, at most max_samples of them."""
    p = params.period
    blocks = int(r_max) // p
    if blocks < 4:
        raise ValueError(f"r_max={r_max} leaves fewer than 4 multiples of n+1")
    if blocks <= max_samples:
        m = np.arange(1, blocks + 1)
    else:
        m = np.unique(np.round(np.linspace(1, blocks, max_samples)).astype(int))
    return [int(x) * p for x in m]


def order_parameter(params, r_max=None, quad=DEFAULT_QUAD, tol=1e-4, max_samples=DEFAULT_MAX_SAMPLES):
    """String (odd n) or block (even n) order parameter.

    Samples <O_j O_{j+r}> at multiples of n+1 up to ``r_max``, averages the
    last quarter of the samples and takes the square root.  ``converged`` is
    False when the plateau samples spread by more than ``tol``.
    """
    if r_max is None:
        r_max = default_rmax(params)
    rs = sample_separations(params, r_max, max_samples)
    table = build_table(params, rs[-1] + params.n + 2, quad)
    vals = [cluster_correlator(params, table, r, check_origins=False) for r in rs]
    tail = np.array(vals[-max(1, len(vals) // 4):])
    spread = float(tail.max() - tail.min()) if tail.size > 1 else math.inf
    plateau = float(tail.mean())
    if plateau < -1e-8:
        raise NumericalError(f"negative correlator plateau {plateau:.3g} for {params}")
    extrapolated = min(1.0, math.sqrt(max(plateau, 0.0)))
    return OrderParameterResult(
        n=params.n,
        phi=params.phi,
        kind="string" if params.n % 2 else "block",
        samples=tuple(zip(rs, vals)),
        extrapolated=extrapolated,
        closed_form=closed_form_order(params.n, params.phi),
        converged=spread < tol,
        spread=spread,
    )


@dataclass(frozen=True)
class BetaFit:
    n: int
    grid: tuple
    beta_hat: float
    beta_theory: float
    r_squared: float
    intercept: float
    used: tuple


def default_beta_grid(points=8, dmin=3e-3, dmax=3e-2):
    """phi values approaching pi/4 from below, log-spaced in pi/4 - phi."""
    return tuple(PHI_C - np.geomspace(dmax, dmin, points))


def fit_beta(n, grid=None, quad=DEFAULT_QUAD, j_scale=1.0):
    """Fit log(order parameter) against log(pi/4 - phi)."""
    grid = default_beta_grid() if grid is None else tuple(float(g) for g in grid)
    if any(g >= PHI_C for g in grid):
        raise ValueError("beta fit grid must lie strictly below pi/4")
    xs, ys, used = [], [], []
    for phi in grid:
        res = order_parameter(ModelParams(n, phi, j_scale), quad=quad)
        if not res.converged or res.extrapolated <= 0:
            continue
        xs.append(math.log(PHI_C - phi))
        ys.append(math.log(res.extrapolated))
        used.append(phi)
    if len(xs) < 4:
        raise NumericalError(f"only {len(xs)} converged points for the beta fit (need 4)")
    xs, ys = np.array(xs), np.array(ys)
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return BetaFit(n, grid, float(slope), (n + 1) / 8, r2, float(intercept), tuple(used))
