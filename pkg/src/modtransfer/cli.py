"""Command-line workbench: ``modtransfer <subcommand> [options]``.

Subcommands
-----------
lengths    primitive length spectrum (optionally cross-checked by brute force)
zeta       Selberg Euler product, or the torus zeta with ``--torus``
scan       determinant dips along s = 1/2 + iR
resonance  scan and refine, with period-function residual checks
periodfn   write eigenvector nodes and psi samples for one R
verify     re-check a periodfn file

Configuration precedence: command-line flags, then a ``key = value`` file given
by ``--config``, then environment variables ``MODTRANSFER_<KEY>`` (for example
``MODTRANSFER_N`` or ``MODTRANSFER_CACHE_DIR``), then built-in defaults.

Exit codes: 0 success, 1 domain or validation error, 2 I/O error,
3 non-convergence.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConvergenceError, DomainError, OracleIncompleteError
from .io import SchemaError, parse_complex, read_table, write_table
from .lengths import (conjugacy_oracle, default_cache_dir, length_spectrum,
                      selberg_zeta_euler, torus_zeta)
from .spectral import (PeriodFunction, Tolerances, VERIFY_PARAMS, _abs2_det, _minimize,
                       boundary_residual, cocycle_residuals, period_function,
                       psi_scale, reconstruct_psi, refine_resonance, scan_critical_line,
                       three_term_residual)
from .transfer import SpectralParameter, fredholm_det, gauss_matrix

EXIT_OK, EXIT_DOMAIN, EXIT_IO, EXIT_CONVERGENCE = 0, 1, 2, 3

# key: (type, default, check, message)
_PARAMS = {
    "max_trace": (int, None, lambda v: 0 <= v <= 20000, "max_trace must lie in [0, 20000]"),
    "k_max": (int, 30, lambda v: 1 <= v <= 1000, "k_max must lie in [1, 1000]"),
    "word_bound": (int, 16, lambda v: 2 <= v <= 16, "word_bound must lie in [2, 16]"),
    "s": (str, None, None, None),
    "r": (str, None, None, None),
    "N": (int, 24, lambda v: 4 <= v <= 256, "N must lie in [4, 256]"),
    "n_max": (int, 50, lambda v: 10 <= v <= 100000, "n_max must lie in [10, 100000]"),
    "K": (int, 4, lambda v: 0 <= v <= 12, "K must lie in [0, 12]"),
    "verify_N": (int, VERIFY_PARAMS[0], lambda v: 4 <= v <= 256, "verify_N must lie in [4, 256]"),
    "verify_n_max": (int, VERIFY_PARAMS[1], lambda v: 10 <= v <= 100000,
                     "verify_n_max must lie in [10, 100000]"),
    "verify_K": (int, VERIFY_PARAMS[2], lambda v: 0 <= v <= 12, "verify_K must lie in [0, 12]"),
    "threshold": (float, 0.05, lambda v: 0 < v <= 1, "threshold must lie in (0, 1]"),
    "threads": (int, 1, lambda v: 1 <= v <= 256, "threads must lie in [1, 256]"),
    "R": (float, None, lambda v: v > 0, "R must be positive"),
    "parity": (int, 0, lambda v: v in (-1, 0, 1), "parity must be -1, 1 or 0 (automatic)"),
    "grid": (str, "0.05:10:200", None, None),
    "format": (str, "csv", lambda v: v in ("csv", "json"), "format must be csv or json"),
    "out": (str, None, None, None),
    "cache_dir": (str, None, None, None),
    "tol_three_term": (float, 1e-6, lambda v: v > 0, "tolerances must be positive"),
    "tol_boundary": (float, 1e-3, lambda v: v > 0, "tolerances must be positive"),
    "tol_cocycle": (float, 1e-5, lambda v: v > 0, "tolerances must be positive"),
}


@dataclass
class RunConfig:
    """Resolved, validated parameters for one subcommand run."""

    command: str
    values: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.__dict__["values"][name]
        except KeyError:
            raise AttributeError(name) from None

    @property
    def tolerances(self) -> Tolerances:
        return Tolerances(self.tol_three_term, self.tol_boundary, self.tol_cocycle)


def _read_config_file(path) -> dict:
    out = {}
    for ln in Path(path).read_text().splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        if "=" not in ln:
            raise DomainError(f"config line without '=': {ln!r}")
        k, v = ln.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def resolve_config(command: str, cli_values: dict, config_path=None, environ=None) -> RunConfig:
    """Merge flags, config file, environment and defaults, then validate.

    Raises
    ------
    DomainError
        On unparsable or out-of-range values.
    """
    environ = os.environ if environ is None else environ
    file_values = _read_config_file(config_path) if config_path else {}
    values = {}
    for key, (typ, default, check, msg) in _PARAMS.items():
        raw = cli_values.get(key)
        if raw is None:
            raw = file_values.get(key)
        if raw is None:
            raw = environ.get(f"MODTRANSFER_{key.upper()}")
        if raw is None:
            values[key] = default
            continue
        try:
            v = typ(raw)
        except (TypeError, ValueError):
            raise DomainError(f"bad value for {key}: {raw!r}") from None
        if check is not None and not check(v):
            raise DomainError(msg)
        values[key] = v
    if values["cache_dir"] is None:
        values["cache_dir"] = str(default_cache_dir())
    return RunConfig(command, values)


def _parse_range(text: str):
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise DomainError(f"range must be lo:hi:step, got {text!r}") from None
    if not (0 < lo < hi) or step <= 0:
        raise DomainError("range needs 0 < lo < hi and step > 0")
    return lo, hi, step


def _parse_s(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise DomainError(f"cannot parse s = {text!r}") from None


def _base_header(cfg: RunConfig, **extra) -> dict:
    h = {"program": "modtransfer", "version": __version__, "command": cfg.command}
    h.update(extra)
    return h


def _emit(cfg, header, columns, rows):
    if cfg.out:
        write_table(cfg.out, header, columns, rows, cfg.format)
    else:
        write_table(sys.stdout, header, columns, rows, cfg.format)


def _say(msg):
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------- subcommands

def cmd_lengths(cfg: RunConfig) -> int:
    """Length spectrum table; with ``--verify-oracle`` also the brute-force check."""
    mt = cfg.max_trace if cfg.max_trace is not None else 12
    cache = None if cfg.flags.get("no_cache") else cfg.cache_dir
    entries = length_spectrum(mt, cache_dir=cache)
    header = _base_header(cfg, max_trace=mt, multiplicity="oriented primitive geodesics")
    rows = [(e.trace, e.length, e.multiplicity, " ".join(str(n) for n in e.necklaces))
            for e in entries]
    _emit(cfg, header, ["trace", "length", "multiplicity", "necklaces"], rows)
    if entries:
        _say(f"{len(entries)} traces, {sum(e.multiplicity for e in entries)} geodesics, "
             f"smallest length {entries[0].length:.17g}")
    else:
        _say("no hyperbolic classes below this trace bound")
    if cfg.flags.get("verify_oracle"):
        try:
            oracle = conjugacy_oracle(mt, cfg.word_bound)
        except OracleIncompleteError as e:
            _say(f"oracle unresolved for traces {e.unresolved}")
            return EXIT_DOMAIN
        mine = {e.trace: e.multiplicity for e in entries}
        if mine != oracle:
            _say(f"necklace counts {mine} differ from oracle {oracle}")
            return EXIT_DOMAIN
        _say("necklace counts agree with the conjugacy oracle")
    return EXIT_OK


def cmd_zeta(cfg: RunConfig) -> int:
    """Selberg Euler product at s, or the torus zeta."""
    if cfg.s is None:
        raise DomainError("zeta needs --s")
    s = _parse_s(cfg.s)
    if cfg.flags.get("torus"):
        val = complex(torus_zeta(s))
        header = _base_header(cfg, s=s, function="torus zeta (1 - e^-s)^2")
    else:
        mt = cfg.max_trace if cfg.max_trace is not None else 400
        val = selberg_zeta_euler(s, mt, cfg.k_max)
        header = _base_header(cfg, s=s, max_trace=mt, k_max=cfg.k_max,
                              function="Selberg Euler product")
    _emit(cfg, header, ["s", "value"], [(s, val)])
    return EXIT_OK


def cmd_scan(cfg: RunConfig) -> int:
    """Dip candidates of |det(I -+ M)| on the critical line."""
    lo, hi, step = _parse_range(cfg.r or "9:14:0.01")
    cands = scan_critical_line(lo, hi, step, cfg.N, cfg.n_max, cfg.K,
                               threshold=cfg.threshold, threads=cfg.threads)
    header = _base_header(cfg, R_lo=lo, R_hi=hi, step=step, N=cfg.N, n_max=cfg.n_max,
                          K=cfg.K, threshold=cfg.threshold)
    _emit(cfg, header, ["R", "parity", "det_abs"], [(c.R, c.parity, c.det_abs) for c in cands])
    _say(f"{len(cands)} dip candidates")
    return EXIT_OK


RESONANCE_COLUMNS = ["R", "lambda", "parity", "det_abs_min", "three_term_residual",
                     "boundary_residual", "cocycle_r1", "cocycle_r2", "N", "n_max", "K",
                     "R_verified", "accepted"]


def cmd_resonance(cfg: RunConfig) -> int:
    """Scan, refine each dip and report residual checks."""
    lo, hi, step = _parse_range(cfg.r or "9:14:0.01")
    verify = (cfg.verify_N, cfg.verify_n_max, cfg.verify_K)
    cands = scan_critical_line(lo, hi, step, cfg.N, cfg.n_max, cfg.K,
                               threshold=cfg.threshold, threads=cfg.threads)
    rows, failed = [], 0
    for c in cands:
        try:
            r = refine_resonance(c.R, c.parity, cfg.N, cfg.n_max, cfg.K, step,
                                 verify_params=verify, tolerances=cfg.tolerances)
        except ConvergenceError as e:
            failed += 1
            _say(f"R ~ {c.R}: {e}")
            continue
        rows.append((r.R, r.lam, r.parity, r.det_abs_min, r.three_term_residual,
                     r.boundary_residual, r.cocycle_residuals[0], r.cocycle_residuals[1],
                     r.N, r.n_max, r.K, r.R_verified, r.accepted))
    header = _base_header(cfg, R_lo=lo, R_hi=hi, step=step, N=cfg.N, n_max=cfg.n_max, K=cfg.K,
                          verify_N=verify[0], verify_n_max=verify[1], verify_K=verify[2],
                          threshold=cfg.threshold, tol_three_term=cfg.tol_three_term,
                          tol_boundary=cfg.tol_boundary, tol_cocycle=cfg.tol_cocycle)
    _emit(cfg, header, RESONANCE_COLUMNS, rows)
    _say(f"{len(rows)} resonances, {sum(1 for r in rows if r[-1])} accepted, "
         f"{failed} refinements failed")
    return EXIT_CONVERGENCE if failed else EXIT_OK


def _parse_grid(text):
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise DomainError(f"grid must be lo:hi:count, got {text!r}") from None
    if not (0 < lo < hi) or n < 1:
        raise DomainError("grid needs 0 < lo < hi and count >= 1")
    return np.linspace(lo, hi, n)


def cmd_periodfn(cfg: RunConfig) -> int:
    """Write eigenvector nodes and psi samples for one spectral parameter.

    The period function is built at the verification discretization. Unless
    ``--no-polish`` is given, R is first moved to the nearby minimum of
    ``|det|`` at that discretization.
    """
    if cfg.R is None:
        raise DomainError("periodfn needs --R")
    N, n_max, K = cfg.verify_N, cfg.verify_n_max, cfg.verify_K
    parity = cfg.parity
    if parity == 0:
        M = gauss_matrix(complex(0.5, cfg.R), N, n_max, K)
        parity = 1 if abs(fredholm_det(M, 1)) <= abs(fredholm_det(M, -1)) else -1
    R = cfg.R
    if not cfg.flags.get("no_polish"):
        R = _minimize(_abs2_det(parity, N, n_max, K), cfg.R, 1e-3, 1e-13)
    pf = period_function(complex(0.5, R), parity, N, n_max, K)
    psi = reconstruct_psi(pf)
    t = _parse_grid(cfg.grid)
    vals = psi(t)
    s = pf.s.s
    scale = psi_scale(psi)
    tt = three_term_residual(psi, s)
    bd = boundary_residual(psi, s, scale=scale)
    r1, r2 = cocycle_residuals(psi, s, scale=scale)
    header = _base_header(cfg, R_input=cfg.R, R=R, sigma=0.5, parity=parity, N=N, n_max=n_max,
                          K=K, interval_lo=pf.interval[0], interval_hi=pf.interval[1],
                          three_term_residual=tt, boundary_residual=bd,
                          cocycle_r1=r1, cocycle_r2=r2, eig_residual=pf.eig_residual,
                          tol_three_term=cfg.tol_three_term, tol_boundary=cfg.tol_boundary,
                          tol_cocycle=cfg.tol_cocycle)
    rows = [("node", float(x), complex(h)) for x, h in zip(pf.grid.nodes, pf.node_values)]
    rows += [("psi", float(x), complex(v)) for x, v in zip(t, vals)]
    _emit(cfg, header, ["kind", "x", "value"], rows)
    _say(f"R = {R:.17g}, parity {parity:+d}: three-term {tt:.2e}, boundary {bd:.2e}, "
         f"cocycle {max(r1, r2):.2e}")
    ok = tt < cfg.tol_three_term and bd < cfg.tol_boundary and max(r1, r2) < cfg.tol_cocycle
    return EXIT_OK if ok else EXIT_CONVERGENCE


def _as_complex(v) -> complex:
    if isinstance(v, dict):
        return complex(float(v["real"]), float(v["imag"]))
    return parse_complex(str(v))


def load_period_function(path):
    """Read a periodfn file.

    Returns
    -------
    pf : PeriodFunction
    samples : (ndarray, ndarray)
        Sample abscissae and stored psi values.
    header : dict
    tolerances : Tolerances
        Acceptance thresholds recorded in the header.

    Raises
    ------
    SchemaError
        On missing fields, malformed numbers or node count mismatches.
    """
    header, columns, rows = read_table(path)
    if columns != ["kind", "x", "value"]:
        raise SchemaError(f"unexpected columns {columns}")
    try:
        R = float(header["R"])
        sigma = float(header["sigma"])
        parity = int(header["parity"])
        N, n_max, K = int(header["N"]), int(header["n_max"]), int(header["K"])
        interval = (float(header["interval_lo"]), float(header["interval_hi"]))
        tols = Tolerances(float(header["tol_three_term"]), float(header["tol_boundary"]),
                          float(header["tol_cocycle"]))
    except (KeyError, ValueError, TypeError) as e:
        raise SchemaError(f"bad or missing header field: {e}") from None
    nodes, hv, xs, pv = [], [], [], []
    try:
        for kind, x, v in rows:
            if kind == "node":
                nodes.append(float(x))
                hv.append(_as_complex(v))
            elif kind == "psi":
                xs.append(float(x))
                pv.append(_as_complex(v))
            else:
                raise SchemaError(f"unknown row kind {kind!r}")
    except (ValueError, TypeError, KeyError) as e:
        raise SchemaError(f"malformed row: {e}") from None
    if len(nodes) != N:
        raise SchemaError(f"expected {N} node rows, found {len(nodes)}")
    if parity not in (1, -1):
        raise SchemaError("parity must be +1 or -1")
    pf = PeriodFunction(SpectralParameter(sigma, R), parity, np.array(hv), n_max, K, interval)
    if np.abs(pf.grid.nodes - np.array(nodes)).max() > 1e-12 * max(1.0, abs(interval[1])):
        raise SchemaError("node abscissae do not match the header grid")
    return pf, (np.array(xs), np.array(pv)), header, tols


def cmd_verify(cfg: RunConfig) -> int:
    """Recompute psi and its residuals from a periodfn file."""
    path = cfg.flags.get("path")
    pf, (xs, pv), _, tols = load_period_function(path)
    psi = reconstruct_psi(pf)
    s = pf.s.s
    scale = psi_scale(psi)
    tt = three_term_residual(psi, s)
    bd = boundary_residual(psi, s, scale=scale)
    r1, r2 = cocycle_residuals(psi, s, scale=scale)
    mismatch = float(np.abs(psi(xs) - pv).max() / scale) if len(xs) else 0.0
    _say(f"three-term {tt:.2e} (tol {tols.three_term:.0e}), boundary {bd:.2e} "
         f"(tol {tols.boundary:.0e}), cocycle {max(r1, r2):.2e} (tol {tols.cocycle:.0e}), "
         f"sample mismatch {mismatch:.2e}")
    ok = (tt < tols.three_term and bd < tols.boundary and max(r1, r2) < tols.cocycle
          and mismatch < 1e-9)
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_DOMAIN


COMMANDS = {"lengths": cmd_lengths, "zeta": cmd_zeta, "scan": cmd_scan,
            "resonance": cmd_resonance, "periodfn": cmd_periodfn, "verify": cmd_verify}


# ---------------------------------------------------------------- argument parsing

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modtransfer", description=__doc__.split("\n\n")[0],
                                epilog=__doc__.split("\n\n", 2)[2],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"modtransfer {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, disc=False, out=True):
        sp.add_argument("--config", help="key = value file (below flags, above environment)")
        if out:
            sp.add_argument("--out", help="output file (default stdout)")
            sp.add_argument("--format", choices=("csv", "json"))
        if disc:
            sp.add_argument("--N", type=int, help="collocation nodes (default 24)")
            sp.add_argument("--n-max", dest="n_max", type=int, help="sum cutoff (default 50)")
            sp.add_argument("--K", type=int, help="tail Taylor order (default 4)")
            sp.add_argument("--threshold", type=float, help="dip threshold relative to median")
            sp.add_argument("--threads", type=int, help="worker threads for the scan")

    sp = sub.add_parser("lengths", help="length spectrum")
    common(sp)
    sp.add_argument("--max-trace", dest="max_trace", type=int)
    sp.add_argument("--verify-oracle", dest="verify_oracle", action="store_true")
    sp.add_argument("--word-bound", dest="word_bound", type=int)
    sp.add_argument("--cache-dir", dest="cache_dir")
    sp.add_argument("--no-cache", dest="no_cache", action="store_true")

    sp = sub.add_parser("zeta", help="Selberg or torus zeta")
    common(sp)
    sp.add_argument("--s")
    sp.add_argument("--torus", action="store_true")
    sp.add_argument("--max-trace", dest="max_trace", type=int)
    sp.add_argument("--k-max", dest="k_max", type=int)

    for name in ("scan", "resonance"):
        sp = sub.add_parser(name, help="determinant dips" if name == "scan"
                            else "refined resonances with residual checks")
        common(sp, disc=True)
        sp.add_argument("--r", help="R range lo:hi:step (default 9:14:0.01)")
        if name == "resonance":
            _verify_opts(sp)

    sp = sub.add_parser("periodfn", help="period function samples for one R")
    common(sp)
    sp.add_argument("--R", type=float)
    sp.add_argument("--parity", type=int, help="+1, -1, or 0 for automatic")
    sp.add_argument("--grid", help="sample grid lo:hi:count (default 0.05:10:200)")
    sp.add_argument("--no-polish", dest="no_polish", action="store_true")
    _verify_opts(sp)

    sp = sub.add_parser("verify", help="re-check a periodfn file")
    sp.add_argument("path")
    return p


def _verify_opts(sp):
    sp.add_argument("--verify-N", dest="verify_N", type=int)
    sp.add_argument("--verify-n-max", dest="verify_n_max", type=int)
    sp.add_argument("--verify-K", dest="verify_K", type=int)
    sp.add_argument("--tol-three-term", dest="tol_three_term", type=float)
    sp.add_argument("--tol-boundary", dest="tol_boundary", type=float)
    sp.add_argument("--tol-cocycle", dest="tol_cocycle", type=float)


_FLAG_KEYS = ("verify_oracle", "no_cache", "torus", "no_polish", "path")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    ns = vars(args)
    try:
        cfg = resolve_config(args.command, {k: v for k, v in ns.items() if k in _PARAMS},
                             ns.get("config"))
        cfg.flags = {k: ns[k] for k in _FLAG_KEYS if k in ns}
        return COMMANDS[args.command](cfg)
    except (DomainError, SchemaError) as e:
        _say(f"error: {e}")
        return EXIT_DOMAIN
    except OSError as e:
        _say(f"I/O error: {e}")
        return EXIT_IO
    except ConvergenceError as e:
        _say(f"no convergence: {e}")
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
