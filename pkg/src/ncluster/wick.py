"""Ground-state expectations of Majorana monomials by Wick's theorem.

For a Gaussian state ``<g_1 g_2 ... g_2M> = Pf(M)`` with ``M_ab = <g_a g_b>``
(a < b).  After normal ordering no operator repeats, and distinct A-A or B-B
pairs contract to zero, so the Pfaffian collapses to a determinant of the
A x B block.  With a tabulated G_r that block also splits into independent
sublattice pieces along its exact zeros.
"""
import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .correlators import CorrelatorTable
from .errors import NumericalError
from .kernels import pfaffian_kernel
from .pauli import PARITY_ODD, MajoranaMonomial

# Monomials longer than this go through the determinant route under "auto".
AUTO_DET_THRESHOLD = 24


def pfaffian(m):
    """Pfaffian of a real skew-symmetric matrix."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("pfaffian needs a square matrix")
    if m.shape[0] % 2:
        raise ValueError("pfaffian needs an even dimension")
    if m.size and np.max(np.abs(m + m.T)) > 1e-12 * max(1.0, np.max(np.abs(m))):
        raise ValueError("matrix is not skew-symmetric")
    return float(pfaffian_kernel(m))


def pfaffian_matchings(m):
    """Pfaffian as the signed sum over perfect matchings (exponential; test oracle)."""
    m = np.asarray(m, dtype=float)
    size = m.shape[0]
    if size % 2:
        return 0.0

    def rec(idx):
        if not idx:
            return 1.0
        first, rest = idx[0], idx[1:]
        total = 0.0
        for pos, j in enumerate(rest):
            if m[first, j] == 0.0:
                continue
            total += (-1) ** pos * m[first, j] * rec(rest[:pos] + rest[pos + 1:])
        return total

    return rec(tuple(range(size)))


def contraction_matrix(mono, table):
    """Skew matrix of pair contractions for ``mono``'s operators in their given order.

    <A_i A_j> = delta_ij, <B_i B_j> = -delta_ij, <B_i A_j> = G_{i-j},
    <A_i B_j> = -G_{j-i}.
    """
    s = mono.sites
    b = mono.flavors.astype(bool)
    di = s[:, None] - s[None, :]
    same = di == 0
    m = np.zeros((len(s), len(s)))
    aa = ~b[:, None] & ~b[None, :]
    bb = b[:, None] & b[None, :]
    ba = b[:, None] & ~b[None, :]
    ab = ~b[:, None] & b[None, :]
    m[aa & same] = 1.0
    m[bb & same] = -1.0
    if ba.any():
        m[ba] = table.lookup(di[ba])
    if ab.any():
        m[ab] = -table.lookup(-di[ab])
    upper = np.triu(m, 1)
    return upper - upper.T


def _inversions(first, second):
    """Number of pairs (x in first, y in second) with y < x."""
    second = np.sort(second)
    return int(np.searchsorted(second, first).sum())


def _sign_of(order):
    order = np.asarray(order)
    inv = 0
    # O(n log n) via merge counting would be overkill here; sizes stay modest
    seen = np.zeros(len(order), dtype=bool)
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        inv += length - 1
    return -1 if inv % 2 else 1


def _det_split(c):
    """det(c) using the block structure of its exact nonzeros."""
    k = c.shape[0]
    if k == 0:
        return 1.0
    rows, cols = np.nonzero(c)
    graph = coo_matrix((np.ones(rows.size), (rows, cols + k)), shape=(2 * k, 2 * k))
    ncomp, labels = connected_components(graph, directed=False)
    rlab, clab = labels[:k], labels[k:]
    row_order = np.argsort(rlab, kind="stable")
    col_order = np.argsort(clab, kind="stable")
    value = float(_sign_of(row_order) * _sign_of(col_order))
    for comp in range(ncomp):
        r = np.flatnonzero(rlab == comp)
        q = np.flatnonzero(clab == comp)
        if r.size != q.size:
            return 0.0
        if r.size == 0:
            continue
        value *= np.linalg.det(c[np.ix_(r, q)])
    return value


def _det_by_labels(ab_block, sa, sb, ra, rb):
    """det of the matrix ab_block(sa, sb) whose entries vanish unless ra == rb."""
    row_order = np.argsort(ra, kind="stable")
    col_order = np.argsort(rb, kind="stable")
    value = float(_sign_of(row_order) * _sign_of(col_order))
    labels, counts = np.unique(ra, return_counts=True)
    lb, cb = np.unique(rb, return_counts=True)
    if not (np.array_equal(labels, lb) and np.array_equal(counts, cb)):
        return 0.0
    for lab in labels:
        value *= np.linalg.det(ab_block(sa[ra == lab], sb[rb == lab]))
        if value == 0.0:
            break
    return value


def canonical_det_from(mono, ab_block, period=None):
    """Pf of a canonical monomial's contraction matrix via a determinant.

    Valid whenever distinct A-A and B-B pairs contract to zero.
    ``ab_block(sa, sb)`` returns the matrix of <A_{sa} B_{sb}> values.  When
    ``period`` is given the matrix is known to vanish between sites of
    different residue mod ``period`` and is factorised along those classes;
    otherwise the split follows the exact zeros of the full matrix.
    """
    b = mono.flavors.astype(bool)
    pa = np.flatnonzero(~b)
    pb = np.flatnonzero(b)
    if pa.size != pb.size:
        return 0.0
    kk = pa.size
    sa, sb = mono.sites[pa], mono.sites[pb]
    sign = -1 if (_inversions(pa, pb) + kk * (kk - 1) // 2) % 2 else 1
    if period is not None and period > 1:
        return sign * _det_by_labels(ab_block, sa, sb, sa % period, sb % period)
    return sign * _det_split(ab_block(sa, sb))


def _canonical_det(mono, table):
    # <A_i B_j> = -G_{j-i}
    return canonical_det_from(
        mono, lambda sa, sb: -table.lookup(sb[None, :] - sa[:, None]), table.params.period
    )


def _is_canonical(mono):
    s, f = mono.sites, mono.flavors
    if len(s) < 2:
        return True
    key = s * 2 + f
    return bool(np.all(np.diff(key) > 0))


def expectation(mono, source, method="auto"):
    """Ground-state value of ``mono`` given a CorrelatorTable or finite covariance.

    ``method`` is "pfaffian", "det" or "auto".  PARITY_ODD gives exactly 0.
    """
    if mono is PARITY_ODD:
        return 0.0
    if not isinstance(mono, MajoranaMonomial):
        raise TypeError("expected a MajoranaMonomial")
    if len(mono) == 0:
        val = complex(mono.prefactor)
    elif len(mono) % 2:
        return 0.0
    else:
        tabulated = isinstance(source, CorrelatorTable)
        canonical = _is_canonical(mono)
        if method == "auto":
            method = "det" if canonical and len(mono) > AUTO_DET_THRESHOLD else "pfaffian"
        if tabulated and canonical and not mono.parity_balanced:
            return 0.0
        if method == "det":
            if not canonical:
                mono = mono.canonical()
            if tabulated:
                raw = _canonical_det(mono, source)
            else:
                raw = source.canonical_det(mono)
        elif method == "pfaffian":
            m = contraction_matrix(mono, source) if tabulated else source.contraction_matrix(mono)
            raw = pfaffian(m)
        else:
            raise ValueError(f"unknown method {method!r}")
        val = complex(mono.prefactor) * raw
    scale = max(1.0, abs(val))
    if abs(val.imag) > 1e-10 * scale:
        raise NumericalError(f"expectation has imaginary part {val.imag:.3g}")
    return float(val.real)
