"""Jordan-Wigner compilation of Pauli products into Majorana monomials.

Conventions (sites are integers, the string runs from -infinity, i.e. it
cancels for every product with an even number of X/Y factors):

    Z_j = A_j B_j
    X_j = (prod_{k<j} A_k B_k) A_j
    Y_j = (prod_{k<j} A_k B_k) i B_j

with A = c + c^dagger, B = c - c^dagger, so A^2 = 1 and B^2 = -1.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

AXES = ("x", "y", "z")
FLAVORS = ("A", "B")

# sigma^a sigma^b = phase * sigma^c  (c = None for the identity)
_PRODUCT = {
    ("x", "x"): (1, None), ("y", "y"): (1, None), ("z", "z"): (1, None),
    ("x", "y"): (1j, "z"), ("y", "x"): (-1j, "z"),
    ("y", "z"): (1j, "x"), ("z", "y"): (-1j, "x"),
    ("z", "x"): (1j, "y"), ("x", "z"): (-1j, "y"),
}

# Physical spins relate to the frame in which G_r is tabulated by
# Z -> -Z, Y -> -Y, plus a sign (-1)^floor(j/(n+1)) on X and Y at site j
# when n is odd.  Both bits were pinned against exact diagonalisation.
Z_FRAME_SIGN = -1
Y_FRAME_SIGN = -1
ODD_N_SUBLATTICE_SIGN = True


@dataclass(frozen=True)
class PauliString:
    """Ordered product of single-site Pauli operators; empty means identity."""

    factors: tuple = ()

    def __post_init__(self):
        fixed = []
        for site, axis in self.factors:
            axis = str(axis).lower()
            if axis not in AXES:
                raise ValueError(f"unknown Pauli axis {axis!r}")
            fixed.append((int(site), axis))
        object.__setattr__(self, "factors", tuple(fixed))

    @classmethod
    def parse(cls, text):
        """``"X0 Z1 X2"`` -> PauliString(((0,'x'), (1,'z'), (2,'x')))."""
        return cls(tuple((int(tok[1:]), tok[0]) for tok in text.split()))

    def __mul__(self, other):
        return PauliString(self.factors + other.factors)

    def shifted(self, offset):
        return PauliString(tuple((s + offset, a) for s, a in self.factors))

    @property
    def sites(self):
        return sorted({s for s, _ in self.factors})

    def reduced(self):
        """Collapse to one Pauli per site: returns (phase, ((site, axis), ...)) sorted by site."""
        phase = 1 + 0j
        by_site = {}
        # operators on different sites commute, so only same-site order matters
        for site, axis in self.factors:
            cur = by_site.get(site)
            if cur is None:
                by_site[site] = axis
                continue
            ph, res = _PRODUCT[(cur, axis)]
            phase *= ph
            if res is None:
                del by_site[site]
            else:
                by_site[site] = res
        return phase, tuple(sorted(by_site.items()))

    def __str__(self):
        return " ".join(f"{a.upper()}{s}" for s, a in self.factors) or "I"


@dataclass(frozen=True)
class MajoranaMonomial:
    """``prefactor * op_1 op_2 ...`` with ops given as (site, 'A'|'B')."""

    prefactor: complex
    ops: tuple

    @cached_property
    def sites(self):
        return np.array([s for s, _ in self.ops], dtype=np.int64)

    @cached_property
    def flavors(self):
        """0 for A, 1 for B."""
        return np.array([f == "B" for _, f in self.ops], dtype=np.int8)

    @property
    def parity_balanced(self):
        nb = int(self.flavors.sum())
        return 2 * nb == len(self.ops)

    def __len__(self):
        return len(self.ops)

    def canonical(self):
        """Normal-order: sort by (site, A<B), tracking transposition signs, and
        cancel repeated operators with A^2 = 1, B^2 = -1."""
        ops = list(self.ops)
        key = [(s, 0 if f == "A" else 1) for s, f in ops]
        order = sorted(range(len(ops)), key=lambda i: key[i])
        sign = _permutation_sign(order)
        out = []
        for i in order:
            op = ops[i]
            if out and out[-1] == op:
                out.pop()
                if op[1] == "B":
                    sign = -sign
            else:
                out.append(op)
        return MajoranaMonomial(self.prefactor * sign, tuple(out))

    def __str__(self):
        body = " ".join(f"{f}{s}" for s, f in self.ops) or "1"
        return f"({self.prefactor}) {body}"


class _ParityOdd:
    """Marker for products with an odd number of Majoranas: expectation is 0."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "PARITY_ODD"

    def __bool__(self):
        return False


PARITY_ODD = _ParityOdd()


def _permutation_sign(order):
    order = list(order)
    seen = [False] * len(order)
    sign = 1
    for i in range(len(order)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def compile_pauli(p):
    """Map a Pauli product to its canonical Majorana monomial, or PARITY_ODD."""
    if not isinstance(p, PauliString):
        p = PauliString(tuple(p))
    phase, factors = p.reduced()
    if not factors:
        return MajoranaMonomial(phase, ())
    odd = [site for site, axis in factors if axis != "z"]
    n_odd = len(odd)
    if n_odd % 2:
        return PARITY_ODD
    if n_odd * (n_odd - 1) // 2 % 2:
        phase = -phase
    axis_at = dict(factors)
    lo, hi = factors[0][0], factors[-1][0]
    ops = []
    # string parity at site k = number of X/Y factors strictly to the right, mod 2
    remaining = n_odd
    for k in range(lo, hi + 1):
        axis = axis_at.get(k)
        if axis in ("x", "y"):
            remaining -= 1
        covered = remaining % 2 == 1
        if axis is None:
            if covered:
                ops += [(k, "A"), (k, "B")]
        elif axis == "z":
            if not covered:
                ops += [(k, "A"), (k, "B")]
        elif axis == "x":
            if covered:
                phase = -phase
                ops.append((k, "B"))
            else:
                ops.append((k, "A"))
        else:
            if covered:
                phase *= -1j
                ops.append((k, "A"))
            else:
                phase *= 1j
                ops.append((k, "B"))
    return MajoranaMonomial(complex(phase), tuple(ops))


def sublattice_sign(site, n):
    return -1 if (site // (n + 1)) % 2 else 1


def frame_sign(p, n):
    """Sign relating <p> in the physical spin frame to the tabulated-G frame."""
    sign = 1
    for site, axis in p.factors:
        if axis == "z":
            sign *= Z_FRAME_SIGN
            continue
        if axis == "y":
            sign *= Y_FRAME_SIGN
        if ODD_N_SUBLATTICE_SIGN and n % 2:
            sign *= sublattice_sign(site, n)
    return sign


def cluster_operator(j, n, origin=0):
    """Cluster operator O_j^{(n)} as a Pauli string.

    Even n: X_j Y_{j+1} X_{j+2} ... X_{j+n} (finite support).
    Odd n: Z string from ``origin`` up to j-n-1, then Y_{j-n} X_{j-n+1} ... Y_{j-1} X_j.
    Products O_j O_{j+r} do not depend on ``origin`` as long as it lies left of
    both strings.
    """
    if n % 2 == 0:
        return PauliString(tuple((j + t, "x" if t % 2 == 0 else "y") for t in range(n + 1)))
    start = j - n
    if origin > start:
        raise ValueError("origin must lie left of the cluster operator's support")
    string = tuple((k, "z") for k in range(origin, start))
    body = tuple((start + t, "y" if t % 2 == 0 else "x") for t in range(n + 1))
    return PauliString(string + body)
