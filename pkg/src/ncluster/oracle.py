"""Side-by-side comparison of exact diagonalisation with the fermionic routes.

Two references are compared with ED on the same ring: the thermodynamic-limit
values (differences are finite-size effects) and the finite-ring Gaussian
state in the ED parity sector (differences should be rounding only).
"""
import math

import numpy as np

from .correlators import build_table
from .ed import build_and_solve, ed_expectation
from .finite import solve_matched
from .model import energy_density
from .observables import cluster_pair, pauli_expectation, stagger_sign
from .pauli import PARITY_ODD, PauliString, compile_pauli
from .wick import expectation

AXES = ("x", "y", "z")


def random_balanced_strings(n_sites, count, rng, max_support=8):
    """Pauli strings on distinct sites inside a window of at most ``max_support``
    sites, with an even number of X/Y factors and at least one factor."""
    out = []
    window = min(max_support, n_sites)
    while len(out) < count:
        k = int(rng.integers(1, window + 1))
        start = int(rng.integers(0, n_sites - window + 1))
        sites = np.sort(rng.choice(np.arange(start, start + window), size=k, replace=False))
        axes = rng.choice(AXES, size=k)
        if sum(a != "z" for a in axes) % 2:
            continue
        out.append(PauliString(tuple(zip(sites.tolist(), axes.tolist()))))
    return out


def fermion_value(state, p):
    mono = compile_pauli(p)
    if mono is PARITY_ODD:
        return 0.0
    return expectation(mono, state)


def _record(report, cls, ed_val, thermo, fermion):
    dt, df, c = report.get(cls, (0.0, 0.0, 0))
    dt = max(dt, abs(ed_val - thermo)) if thermo is not None else math.nan
    report[cls] = (dt, max(df, abs(ed_val - fermion)), c + 1)


def compare(params, n_sites=12, random_strings=200, seed=0, state=None):
    """Map observable class -> (max |ED - thermodynamic|, max |ED - finite fermion|, count).

    Thermodynamic deviations are nan for the random strings, which are
    compared with the finite-ring state only.
    """
    state = state if state is not None else build_and_solve(n_sites, params)
    ferm = solve_matched(state)
    n = params.n
    half = n_sites // 2
    table = build_table(params, n_sites + n + 2)
    report = {}
    report["energy_per_site"] = (
        abs(state.energy_per_site - energy_density(params)),
        abs(state.energy_per_site - ferm.energy_per_site),
        1,
    )
    z = PauliString(((0, "z"),))
    _record(report, "sigma_z", ed_expectation(state, z), pauli_expectation(params, z, table), fermion_value(ferm, z))
    for axis in AXES:
        for r in range(1, half + 1):
            p = PauliString(((0, axis), (r, axis)))
            _record(
                report, axis * 2, ed_expectation(state, p), pauli_expectation(params, p, table), fermion_value(ferm, p)
            )
    j0 = n if n % 2 else 0
    for r in range(1, n_sites - j0 - n - 1):
        p = cluster_pair(j0, r, n)
        s = stagger_sign(n, r)
        _record(
            report,
            "cluster",
            s * ed_expectation(state, p),
            s * pauli_expectation(params, p, table),
            s * fermion_value(ferm, p),
        )
    rng = np.random.default_rng(seed)
    for p in random_balanced_strings(n_sites, random_strings, rng):
        _record(report, "random_pauli", ed_expectation(state, p), None, fermion_value(ferm, p))
    return report
