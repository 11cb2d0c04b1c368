"""Command-line entry point: every sweep writes a CSV file.

Each file starts with one ``#`` line holding the fully explicit command that
reproduces it, then a header row.  Floats carry 12 significant digits.

Exit codes: 0 on success, 1 for bad arguments, 2 for a numerical failure.
"""
import argparse
import csv
import io
import math
import shlex
import sys
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .model import PHI_C, ModelParams
from .quadrature import QuadratureSpec

PROG = "ncluster"


class UsageError(Exception):
    pass


class PointFailure(Exception):
    """A numerical failure tagged with the sweep point that caused it."""

    def __init__(self, where, cause):
        super().__init__(f"{where}: {cause}")
        self.where = where
        self.cause = cause


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Grid(list):
    """Parsed grid values that remember the text they came from."""

    def __init__(self, values, text):
        super().__init__(values)
        self.text = text


def parse_grid(text):
    """``"a:b:count"`` -> count evenly spaced values, ``"x"`` -> [x], ``"pi/4"`` allowed."""

    def num(tok):
        tok = tok.strip().lower()
        if tok in ("pi/4", "phic"):
            return PHI_C
        if tok == "pi/2":
            return math.pi / 2
        return float(tok)

    parts = text.split(":")
    try:
        if len(parts) == 1:
            return Grid([num(parts[0])], text)
        if len(parts) == 3:
            count = int(parts[2])
            if count < 1:
                raise ValueError
            return Grid(np.linspace(num(parts[0]), num(parts[1]), count).tolist(), text)
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"bad grid {text!r}; expected start:stop:count or a single value")


def fmt(x):
    if isinstance(x, Grid):
        return x.text
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    out = f"{x:.12g}"
    return "0" if out == "-0" else out


@dataclass(frozen=True)
class SweepConfig:
    """A parsed command line; ``comment`` renders it back to reproducible form."""

    command: str
    options: tuple

    @classmethod
    def from_namespace(cls, ns, parser):
        sub = parser._subparsers._group_actions[0].choices[ns.command]
        opts = []
        for action in sub._actions:
            if action.dest in ("help", "output") or not action.option_strings:
                continue
            val = getattr(ns, action.dest)
            if val is None or val is False:
                continue
            opts.append((action.option_strings[-1], val, action))
        return cls(ns.command, tuple((o, v) for o, v, _ in opts))

    def argv(self):
        out = [self.command]
        for opt, val in self.options:
            if val is True:
                out.append(opt)
            elif isinstance(val, (list, tuple)):
                out.append(opt)
                out.extend(fmt(v) for v in val)
            else:
                out.extend([opt, fmt(val)])
        return out

    def comment(self):
        return "# " + " ".join([PROG] + [shlex.quote(a) for a in self.argv()])

    @classmethod
    def from_comment(cls, line):
        tokens = shlex.split(line.lstrip("#").strip())
        if not tokens or tokens[0] != PROG:
            raise ValueError("not an ncluster config line")
        parser = build_parser()
        ns = parser.parse_args(tokens[1:])
        return cls.from_namespace(ns, parser)


def _grid_list(values):
    """Flatten a list of parsed grids, preserving order."""
    out = []
    for g in values:
        out.extend(g)
    return out


def _params(n, phi, j):
    try:
        return ModelParams(n, phi, j)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _quad(ns):
    try:
        return QuadratureSpec(panels=ns.panels, nodes_per_panel=ns.nodes, tol=ns.tol)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _guard(where, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (NumericalError, np.linalg.LinAlgError) as exc:
        raise PointFailure(where, exc) from exc


# --------------------------------------------------------------------------
# subcommands; each returns (header, rows, trailing comment lines)
# --------------------------------------------------------------------------

def cmd_energy_scan(ns):
    from .model import d2_energy_scan

    quad = _quad(ns)
    grid = _grid_list(ns.phi)
    for n in ns.n:
        for phi in grid:
            _params(n, phi, ns.j)
            if phi - ns.h < 0 or phi + ns.h > math.pi / 2:
                raise UsageError(f"phi={phi} +/- h leaves [0, pi/2]")
    multi = len(ns.n) > 1
    rows = []
    for n in ns.n:
        phis, d2 = _guard(f"n={n}", d2_energy_scan, n, grid, ns.h, quad, ns.j)
        rows += [([n] if multi else []) + [p, v] for p, v in zip(phis, d2)]
    return (["n"] if multi else []) + ["phi", "d2E"], rows, []


def cmd_correlators(ns):
    from .correlators import build_table
    from .observables import sigma_z, xx, yy, zz

    quad = _quad(ns)
    physical = not ns.fermionic
    rows = []
    for n in ns.n:
        for phi in _grid_list(ns.phi):
            params = _params(n, phi, ns.j)
            table = _guard(f"n={n} phi={phi}", build_table, params, max(ns.r) + 1, quad)
            for r in ns.r:
                where = f"n={n} phi={phi} r={r}"
                rows.append([
                    n, phi, r, table[r],
                    _guard(where, sigma_z, params, table, physical),
                    _guard(where, zz, params, table, r, physical),
                    _guard(where, xx, params, table, r, physical),
                    _guard(where, yy, params, table, r, physical),
                ])
    return ["n", "phi", "r", "G_r", "sigma_z", "zz", "xx", "yy"], rows, []


def cmd_cluster_corr(ns):
    from .correlators import build_table
    from .observables import cluster_correlator

    quad = _quad(ns)
    rlist = ns.r
    rows = []
    for n in ns.n:
        for phi in _grid_list(ns.phi):
            params = _params(n, phi, ns.j)
            table = _guard(f"n={n} phi={phi}", build_table, params, max(rlist) + n + 2, quad)
            for r in rlist:
                rows.append([n, phi, r, _guard(f"n={n} phi={phi} r={r}", cluster_correlator, params, table, r)])
    return ["n", "phi", "r", "cluster"], rows, []


def cmd_order_param(ns):
    from .observables import order_parameter

    quad = _quad(ns)
    multi = len(ns.n) > 1
    rows = []
    for n in ns.n:
        if ns.rmax is not None and ns.rmax // (n + 1) < 4:
            raise UsageError(f"--rmax {ns.rmax} leaves fewer than 4 multiples of n+1={n + 1}")
        for phi in _grid_list(ns.phi):
            params = _params(n, phi, ns.j)
            where = f"n={n} phi={phi} rmax={ns.rmax}"
            try:
                res = order_parameter(params, ns.rmax, quad)
            except (NumericalError, ValueError) as exc:
                raise PointFailure(where, exc) from exc
            if not res.converged:
                print(f"warning: {where}: order parameter not converged (spread {res.spread:.3g})", file=sys.stderr)
            rows.append(([n] if multi else []) + [phi, res.extrapolated, res.closed_form, res.converged])
    return (["n"] if multi else []) + ["phi", "numeric", "closed_form", "converged"], rows, []


def cmd_concurrence(ns):
    from .correlators import build_table
    from .entanglement import concurrence, two_spin_rdm

    quad = _quad(ns)
    rows = []
    for n in ns.n:
        r = ns.r if ns.r is not None else n + 1
        for phi in _grid_list(ns.phi):
            params = _params(n, phi, ns.j)
            where = f"n={n} phi={phi} r={r}"
            table = _guard(where, build_table, params, r + 1, quad)
            rdm = _guard(where, two_spin_rdm, params, table, r)
            rows.append([n, phi, r, _guard(where, concurrence, rdm, cross_check=True)])
    return ["n", "phi", "r", "concurrence"], rows, []


def cmd_entropy(ns):
    from .correlators import build_table
    from .entanglement import block_entropy, central_charge_fit

    quad = _quad(ns)
    ms = sorted(set(_grid_ints(ns.m)))
    rows, tail = [], []
    for n in ns.n:
        for phi in _grid_list(ns.phi):
            params = _params(n, phi, ns.j)
            table = _guard(f"n={n} phi={phi}", build_table, params, max(ms), quad)
            for m in ms:
                rows.append([n, phi, m, _guard(f"n={n} phi={phi} m={m}", block_entropy, params, table, m)])
        if ns.fit:
            if len(ms) < 6 or ms[-1] < 4 * ms[0]:
                raise UsageError("--fit needs at least 6 block sizes spanning a factor of 4")
            f = _guard(f"n={n} fit", central_charge_fit, n, ms, quad, ns.j)
            tail.append(
                f"# fit n={n}: slope={fmt(f.slope)} intercept={fmt(f.intercept)} "
                f"c_hat={fmt(f.c_hat)} c_theory={fmt(f.c_theory)} c_reference={fmt(f.c_reference)} r_squared={fmt(f.r_squared)}"
            )
    return ["n", "phi", "m", "S_bits"], rows, tail


def _grid_ints(specs):
    out = []
    for g in specs:
        out.extend(int(round(v)) for v in g)
    if any(m < 1 for m in out):
        raise UsageError("block sizes must be >= 1")
    return out


def cmd_beta_fit(ns):
    from .observables import default_beta_grid, fit_beta

    if not 0 < ns.dmin < ns.dmax < PHI_C:
        raise UsageError("need 0 < --dmin < --dmax < pi/4")
    if ns.points < 4:
        raise UsageError("--points must be >= 4")
    quad = _quad(ns)
    grid = default_beta_grid(ns.points, ns.dmin, ns.dmax)
    rows = []
    for n in ns.n:
        f = _guard(f"n={n}", fit_beta, n, grid, quad, ns.j)
        rows.append([n, f.beta_hat, f.beta_theory, f.r_squared, len(f.used)])
    return ["n", "beta_hat", "beta_theory", "r_squared", "points"], rows, []


def cmd_oracle_compare(ns):
    from .oracle import compare

    rows = []
    for n in ns.n:
        for phi in _grid_list(ns.phi):
            params = _params(n, phi, ns.j)
            try:
                report = compare(params, ns.sites, random_strings=ns.random, seed=ns.seed)
            except ValueError as exc:
                raise UsageError(str(exc)) from exc
            except NumericalError as exc:
                raise PointFailure(f"n={n} phi={phi} N={ns.sites}", exc) from exc
            for cls, (dev_thermo, dev_fermion, count) in report.items():
                rows.append([n, phi, ns.sites, cls, count, dev_thermo, dev_fermion])
    return ["n", "phi", "sites", "class", "count", "max_dev_thermo", "max_dev_finite_fermion"], rows, []


COMMANDS = {
    "energy-scan": cmd_energy_scan,
    "correlators": cmd_correlators,
    "cluster-corr": cmd_cluster_corr,
    "order-param": cmd_order_param,
    "concurrence": cmd_concurrence,
    "entropy": cmd_entropy,
    "beta-fit": cmd_beta_fit,
    "oracle-compare": cmd_oracle_compare,
}


def _nonneg_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _pos_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser():
    p = _Parser(prog=PROG, description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, phi_default=None):
        sp.add_argument("--n", type=_nonneg_int, nargs="+", required=True, help="cluster extension(s)")
        if phi_default is None:
            sp.add_argument("--phi", type=parse_grid, nargs="+", required=True, help="start:stop:count")
        else:
            sp.add_argument("--phi", type=parse_grid, nargs="+", default=[phi_default])
        sp.add_argument("--j", type=float, default=1.0, help="energy unit J")
        sp.add_argument("--panels", type=_pos_int, default=32)
        sp.add_argument("--nodes", type=_pos_int, default=8)
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("-o", "--output", default="-", help="CSV path, '-' for stdout")

    sp = sub.add_parser("energy-scan", help="second derivative of the energy density")
    common(sp)
    sp.add_argument("--h", type=float, default=1e-3)

    sp = sub.add_parser("correlators", help="G_r and two-point spin correlators")
    common(sp)
    sp.add_argument("--r", type=_pos_int, nargs="+", required=True)
    sp.add_argument("--fermionic", action="store_true", help="report fermionic-frame signs")

    sp = sub.add_parser("cluster-corr", help="<O_j O_{j+r}>")
    common(sp)
    sp.add_argument("--r", type=_pos_int, nargs="+", default=[3, 6, 9, 12, 15])

    sp = sub.add_parser("order-param", help="string/block order parameter")
    common(sp)
    sp.add_argument("--rmax", type=_pos_int, default=None)

    sp = sub.add_parser("concurrence", help="concurrence of spins i, i+r")
    common(sp)
    sp.add_argument("--r", type=_pos_int, default=None, help="default n+1")

    sp = sub.add_parser("entropy", help="block entropy and central-charge fit")
    common(sp, phi_default=parse_grid("pi/4"))
    sp.add_argument("--m", type=parse_grid, nargs="+", default=[parse_grid("8:64:57")])
    sp.add_argument("--fit", action="store_true")

    sp = sub.add_parser("beta-fit", help="critical exponent of the order parameter")
    sp.add_argument("--n", type=_nonneg_int, nargs="+", required=True)
    sp.add_argument("--points", type=int, default=8)
    sp.add_argument("--dmin", type=float, default=3e-3)
    sp.add_argument("--dmax", type=float, default=3e-2)
    sp.add_argument("--j", type=float, default=1.0)
    sp.add_argument("--panels", type=_pos_int, default=32)
    sp.add_argument("--nodes", type=_pos_int, default=8)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("-o", "--output", default="-")

    sp = sub.add_parser("oracle-compare", help="exact diagonalisation cross-check")
    common(sp)
    sp.add_argument("--sites", type=_pos_int, default=12)
    sp.add_argument("--random", type=_nonneg_int, default=200, help="random Pauli strings")
    sp.add_argument("--seed", type=int, default=0)
    return p


def render(config, header, rows, tail=()):
    buf = io.StringIO()
    buf.write(config.comment() + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    for line in tail:
        buf.write(line + "\n")
    return buf.getvalue()


def run(argv=None):
    """Run one subcommand; returns the process exit code."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        config = SweepConfig.from_namespace(ns, parser)
        header, rows, tail = COMMANDS[ns.command](ns)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    except PointFailure as exc:
        print(f"{PROG}: numerical failure at {exc.where}: {exc.cause}", file=sys.stderr)
        return 2
    text = render(config, header, rows, tail)
    if ns.output == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(ns.output, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"{PROG}: error: cannot write {ns.output}: {exc}", file=sys.stderr)
            return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
