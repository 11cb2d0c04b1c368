"""Hot numeric kernels, each in a numba flavour and a pure-numpy flavour.

The public names (``pfaffian_kernel``, ``hamiltonian_coo``, ``apply_pauli``)
dispatch on :data:`ncluster._accel.BACKEND`.  Both flavours are importable
under explicit names so the benchmark and the tests can compare them.
"""
import numpy as np

from ._accel import BACKEND, njit

# Pauli axis codes shared with the ED oracle: 1 = x, 2 = y, 3 = z.
AXIS_CODE = {"x": 1, "y": 2, "z": 3}


# --------------------------------------------------------------------------
# Pfaffian (Parlett-Reid tridiagonalisation with partial pivoting)
# --------------------------------------------------------------------------

def pfaffian_numpy(a):
    a = np.array(a, dtype=np.float64)
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n % 2:
        return 0.0
    pf = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0.0:
            return 0.0
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            col = a[k + 2:, k + 1].copy()
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return pf


@njit(cache=True)
def _pfaffian_numba_impl(a):
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n % 2 == 1:
        return 0.0
    pf = 1.0
    tau = np.empty(n)
    col = np.empty(n)
    for k in range(0, n - 1, 2):
        kp = k + 1
        best = abs(a[k + 1, k])
        for i in range(k + 2, n):
            v = abs(a[i, k])
            if v > best:
                best = v
                kp = i
        if kp != k + 1:
            for j in range(n):
                t = a[k + 1, j]
                a[k + 1, j] = a[kp, j]
                a[kp, j] = t
            for i in range(n):
                t = a[i, k + 1]
                a[i, k + 1] = a[i, kp]
                a[i, kp] = t
            pf = -pf
        if a[k + 1, k] == 0.0:
            return 0.0
        piv = a[k, k + 1]
        pf *= piv
        if k + 2 < n:
            for i in range(k + 2, n):
                tau[i] = a[k, i] / piv
                col[i] = a[i, k + 1]
            for i in range(k + 2, n):
                ti = tau[i]
                ci = col[i]
                for j in range(k + 2, n):
                    a[i, j] += ti * col[j] - ci * tau[j]
    return pf


def pfaffian_numba(a):
    return _pfaffian_numba_impl(np.array(a, dtype=np.float64))


# --------------------------------------------------------------------------
# Spin Hamiltonian on a ring or open chain, as COO triplets
# --------------------------------------------------------------------------
# Basis convention: bit j of the state index is 1 when spin j points up
# (sigma^z eigenvalue +1).

def hamiltonian_coo_numpy(n_sites, n, cluster_coef, field_coef, periodic=True):
    """COO triplets of ``cluster_coef * sum_j X_j Z...Z X_{j+n+1} + field_coef * sum_j Z_j``.

    With ``periodic=False`` cluster terms that would wrap around are dropped.
    """
    dim = 1 << n_sites
    states = np.arange(dim, dtype=np.int64)
    bits = (states[:, None] >> np.arange(n_sites, dtype=np.int64)) & 1
    zvals = 2 * bits - 1
    rows = [states]
    cols = [states]
    vals = [field_coef * zvals.sum(axis=1).astype(np.float64)]
    for j in range(n_sites if periodic else n_sites - n - 1):
        far = (j + n + 1) % n_sites
        mask = (1 << j) | (1 << far)
        sign = np.ones(dim, dtype=np.int64)
        for k in range(1, n + 1):
            sign *= zvals[:, (j + k) % n_sites]
        rows.append(states ^ mask)
        cols.append(states)
        vals.append(cluster_coef * sign.astype(np.float64))
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


@njit(cache=True)
def _hamiltonian_coo_numba_impl(n_sites, n, cluster_coef, field_coef, periodic):
    dim = 1 << n_sites
    nterms = n_sites if periodic else max(n_sites - n - 1, 0)
    nnz = dim * (nterms + 1)
    rows = np.empty(nnz, dtype=np.int64)
    cols = np.empty(nnz, dtype=np.int64)
    vals = np.empty(nnz, dtype=np.float64)
    p = 0
    for s in range(dim):
        diag = 0
        for j in range(n_sites):
            diag += 2 * ((s >> j) & 1) - 1
        rows[p] = s
        cols[p] = s
        vals[p] = field_coef * diag
        p += 1
        for j in range(nterms):
            far = (j + n + 1) % n_sites
            sign = 1
            for k in range(1, n + 1):
                sign *= 2 * ((s >> ((j + k) % n_sites)) & 1) - 1
            rows[p] = s ^ ((1 << j) | (1 << far))
            cols[p] = s
            vals[p] = cluster_coef * sign
            p += 1
    return rows, cols, vals


def hamiltonian_coo_numba(n_sites, n, cluster_coef, field_coef, periodic=True):
    return _hamiltonian_coo_numba_impl(
        int(n_sites), int(n), float(cluster_coef), float(field_coef), bool(periodic)
    )


# --------------------------------------------------------------------------
# Pauli string acting on a state vector
# --------------------------------------------------------------------------

def apply_pauli_numpy(vec, sites, axes):
    """Return ``P |vec>`` for ``P = prod_i sigma^{axes[i]}_{sites[i]}`` (leftmost factor acts last)."""
    out = np.asarray(vec, dtype=np.complex128).copy()
    idx = np.arange(out.shape[0], dtype=np.int64)
    for site, ax in zip(sites[::-1], axes[::-1]):
        bit = (idx >> site) & 1
        if ax == 3:
            out = out * (2 * bit - 1)
        elif ax == 1:
            out = out[idx ^ (1 << site)]
        else:
            # new[t] = sum_s <t|Y|s> old[s]; Y|up> = i|down>, Y|down> = -i|up>
            src = idx ^ (1 << site)
            src_bit = (src >> site) & 1
            phase = np.where(src_bit == 1, 1j, -1j)
            out = phase * out[src]
    return out


@njit(cache=True)
def _apply_pauli_numba_impl(vec, sites, axes):
    dim = vec.shape[0]
    out = np.zeros(dim, dtype=np.complex128)
    m = sites.shape[0]
    for s in range(dim):
        t = s
        ph = 1.0 + 0.0j
        for q in range(m - 1, -1, -1):
            site = sites[q]
            ax = axes[q]
            b = (t >> site) & 1
            if ax == 3:
                if b == 0:
                    ph = -ph
            elif ax == 1:
                t = t ^ (1 << site)
            else:
                if b == 1:
                    ph = ph * 1j
                else:
                    ph = ph * (-1j)
                t = t ^ (1 << site)
        out[t] += ph * vec[s]
    return out


def apply_pauli_numba(vec, sites, axes):
    return _apply_pauli_numba_impl(
        np.ascontiguousarray(vec, dtype=np.complex128),
        np.asarray(sites, dtype=np.int64),
        np.asarray(axes, dtype=np.int64),
    )


if BACKEND == "numba":
    pfaffian_kernel = pfaffian_numba
    hamiltonian_coo = hamiltonian_coo_numba
    apply_pauli = apply_pauli_numba
else:
    pfaffian_kernel = pfaffian_numpy
    hamiltonian_coo = hamiltonian_coo_numpy
    apply_pauli = apply_pauli_numpy
