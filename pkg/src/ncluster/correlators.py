"""The fermionic two-point function G_r(n, phi) = <B_i A_{i-r}>.

G_r vanishes identically unless r is a multiple of n+1; those zeros are
stored exactly rather than integrated.  The kernel used here is

    G_r = (1/pi) int_0^pi [cos(phi) cos(k(n+1+r)) - sin(phi) cos(kr)]
                          / sqrt(1 - sin(2 phi) cos((n+1)k)) dk

whose numerator vanishes wherever the square root does at phi = pi/4, so the
integrand stays bounded at the critical point.
"""
import math
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .errors import MissingOffsetError, QuadratureError
from .model import ModelParams, _grading, _kinks
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate


def _kernel(params, rs):
    n, phi = params.n, params.phi
    c, s, s2 = math.cos(phi), math.sin(phi), params.coupling
    p = n + 1
    rs = np.asarray(rs, dtype=np.int64)
    on_support = rs.size > 1 and np.all(rs % p == 0)
    if on_support:
        # r = m p: both cosines come from one array cos(q m'), q = p k
        m = rs // p
        lo = int(m.min())
        grid = np.arange(lo, int(m.max()) + 2, dtype=float)[:, None]
        i0 = m - lo

        def f(k):
            q = p * k
            den = np.sqrt(np.maximum(1.0 - s2 * np.cos(q), 0.0))
            cs = np.cos(grid * q)
            return (c * cs[i0 + 1] - s * cs[i0]) / den

        return f
    rs = rs.astype(float)[:, None]

    def f(k):
        den = np.sqrt(np.maximum(1.0 - s2 * np.cos((n + 1) * k), 0.0))
        num = c * np.cos(k * (n + 1 + rs)) - s * np.cos(k * rs)
        return num / den

    return f


def _integrate_offsets(params, rs, quad):
    if len(rs) == 0:
        return np.zeros(0)
    quad.check_for(params.n)
    vals = integrate(_kernel(params, rs), 0.0, math.pi, quad, _kinks(params.n), _grading(params))
    return np.asarray(vals) / math.pi


def g_correlator(params, r, quad=DEFAULT_QUAD):
    """G_r(n, phi); exactly 0.0 when r is not a multiple of n+1."""
    r = int(r)
    if r % params.period:
        return 0.0
    return float(_integrate_offsets(params, [r], quad)[0])


def g_quadrature_raw(params, r, quad=DEFAULT_QUAD):
    """Integrate the kernel for any r, bypassing the selection-rule shortcut."""
    return float(_integrate_offsets(params, [int(r)], quad)[0])


@dataclass(frozen=True)
class CorrelatorTable:
    params: ModelParams
    quad: QuadratureSpec
    max_abs_offset: int
    dense: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        self.dense.setflags(write=False)

    @property
    def values(self):
        m = self.max_abs_offset
        return MappingProxyType({r: float(self.dense[r + m]) for r in range(-m, m + 1)})

    def __getitem__(self, r):
        r = int(r)
        if abs(r) > self.max_abs_offset:
            raise MissingOffsetError(f"offset {r} outside materialised range +/-{self.max_abs_offset}")
        return float(self.dense[r + self.max_abs_offset])

    def lookup(self, offsets):
        """Vectorised ``G[offsets]``; raises if any offset is out of range."""
        offsets = np.asarray(offsets, dtype=np.int64)
        if offsets.size and np.abs(offsets).max() > self.max_abs_offset:
            bad = int(offsets.flat[np.argmax(np.abs(offsets))])
            raise MissingOffsetError(f"offset {bad} outside materialised range +/-{self.max_abs_offset}")
        return self.dense[offsets + self.max_abs_offset]

    def restricted(self, max_abs_offset):
        if max_abs_offset > self.max_abs_offset:
            raise MissingOffsetError(f"cannot widen table from {self.max_abs_offset} to {max_abs_offset}")
        m, k = self.max_abs_offset, max_abs_offset
        return CorrelatorTable(self.params, self.quad, k, self.dense[m - k:m + k + 1].copy())


_CACHE = {}


def build_table(params, max_abs_offset, quad=DEFAULT_QUAD):
    """Materialise G_r for all |r| <= max_abs_offset (memoised per params/quad)."""
    max_abs_offset = int(max_abs_offset)
    if max_abs_offset < 0:
        raise ValueError("max_abs_offset must be >= 0")
    cached = _CACHE.get((params, quad))
    if cached is not None and cached.max_abs_offset >= max_abs_offset:
        if cached.max_abs_offset == max_abs_offset:
            return cached
        return cached.restricted(max_abs_offset)
    p = params.period
    rs = np.arange(-max_abs_offset, max_abs_offset + 1)
    support = rs[rs % p == 0]
    try:
        vals = _integrate_offsets(params, support, quad)
    except QuadratureError as exc:
        raise QuadratureError(f"G_r table for {params} up to |r|={max_abs_offset}: {exc}") from exc
    dense = np.zeros(rs.size)
    dense[support + max_abs_offset] = vals
    table = CorrelatorTable(params, quad, max_abs_offset, dense)
    _CACHE[(params, quad)] = table
    return table


def clear_cache():
    _CACHE.clear()
