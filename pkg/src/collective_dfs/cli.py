"""Command-line front end.

    collective-dfs decompose --n 4
    collective-dfs cdfs --model model.json --k 1
    collective-dfs evolve --model model.json --state u --t 10 --dt 0.01 --out traj.csv
    collective-dfs metrics --fig 1b --out fig1b.csv
    collective-dfs encode4 --b b.json --out enc.json
    collective-dfs reproduce-figures --outdir figures/

Exit codes: 0 success, 2 bad input, 3 degenerate result.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _linalg, metrics
from .dynamics import StepTooLargeError, evolve, system_hamiltonian, tau2
from .encodings import (
    encoding_to_dict,
    four_qubit_basis,
    named_state,
    omega_encoding,
)
from .modelspec import ModelSpec, ModelSpecError, expand_b, load_json_arg, load_model, matrix_from_json
from .qubit_space import StateVector, index_to_bits, ket
from .structure import MAX_DECOMPOSE_QUBITS, cdfs, df_dimension, df_subspace, irrep_decompose, spin_multiplicities

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE = 0, 2, 3
DIGITS = 12


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    t_final: float
    dt: float
    output_path: str = "-"
    format: str = "csv"

    def __post_init__(self):
        if not self.t_final > 0 or not self.dt > 0:
            raise InputError("--t and --dt must be positive")
        if self.format not in ("csv", "json"):
            raise InputError(f"unknown output format {self.format!r}")


def fmt(x: float) -> str:
    x = float(x)
    return f"{0.0 if x == 0 else x:.{DIGITS}g}"


def _clean(z: complex, tol: float = 1e-13) -> tuple[float, float]:
    re, im = float(z.real), float(z.imag)
    return (0.0 if abs(re) < tol else re, 0.0 if abs(im) < tol else im)


def _spin_label(s) -> str:
    return str(s.numerator) if s.denominator == 1 else f"{s.numerator}/{s.denominator}"


def _open_out(path: str):
    if path == "-":
        return _NoClose(sys.stdout)
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return open(p, "w", newline="")


class _NoClose:
    def __init__(self, fh):
        self.fh = fh

    def __enter__(self):
        return self.fh

    def __exit__(self, *exc):
        self.fh.flush()


def _report(path: str, line: str) -> None:
    # Keep stdout clean for data when the data itself goes to stdout.
    print(line, file=sys.stderr if path == "-" else sys.stdout)


# ---------------------------------------------------------------- decompose

def cmd_decompose(args) -> int:
    n = args.n
    if n < 1:
        raise InputError("--n must be at least 1")
    if n > MAX_DECOMPOSE_QUBITS:
        raise InputError(f"--n {n} exceeds the limit of {MAX_DECOMPOSE_QUBITS} qubits")
    towers = irrep_decompose(n)
    print(f"n={n}: {len(towers)} irreducible towers, {sum(len(t) for t in towers)} states")
    for spin, count in spin_multiplicities(towers).items():
        print(f"J={_spin_label(spin)} x{count}")
    for k in range(n // 2 + 1):
        print(f"dim V({k}) = {df_dimension(n, k)}")
    return EXIT_OK


# --------------------------------------------------------------------- cdfs

def _format_state(v: np.ndarray, n: int) -> list[str]:
    lines = []
    for idx in np.flatnonzero(np.abs(v) > 1e-12):
        re, im = _clean(v[idx])
        lines.append(f"    |{index_to_bits(int(idx), n)}>  {fmt(re)}  {fmt(im)}")
    return lines


def cdfs_report(spec: ModelSpec, k: int) -> dict:
    n = spec.n
    if not 0 <= k <= n:
        raise InputError(f"--k must lie in 0..{n}")
    h = system_hamiltonian(spec.model)
    result = cdfs(n, k, h)
    df = df_subspace(n, k)
    rest = _linalg.complement(result.basis.vectors, within=df.vectors) if df.dim else df.vectors
    if rest.shape[1] != df.dim - result.dim:
        raise RuntimeError("remainder dimension mismatch")
    if rest.shape[1]:
        rest = _linalg.canonical_basis(rest)
    return {
        "n": n,
        "k": k,
        "df_dimension": df.dim,
        "cdfs_dimension": result.dim,
        "cdfs_basis": [result.basis.vectors[:, j] for j in range(result.dim)],
        "remainder": [(rest[:, j], tau2(rest[:, j], h)) for j in range(rest.shape[1])],
    }


def cmd_cdfs(args) -> int:
    rep = cdfs_report(load_model(args.model), args.k)
    n = rep["n"]
    if args.json:
        out = {
            "n": n, "k": rep["k"],
            "df_dimension": rep["df_dimension"],
            "cdfs_dimension": rep["cdfs_dimension"],
            "cdfs_basis": [[list(_clean(z)) for z in v] for v in rep["cdfs_basis"]],
            "remainder": [{"amplitudes": [list(_clean(z)) for z in v],
                           "tau2": None if np.isinf(t) else t} for v, t in rep["remainder"]],
        }
        print(json.dumps(out, indent=2))
        return EXIT_OK
    print(f"n={n} k={rep['k']} dim V(k)={rep['df_dimension']} cdfs dimension={rep['cdfs_dimension']}")
    for j, v in enumerate(rep["cdfs_basis"]):
        print(f"cdfs[{j}]:")
        print("\n".join(_format_state(v, n)))
    for j, (v, t) in enumerate(rep["remainder"]):
        print(f"remainder[{j}]: tau2={'inf' if np.isinf(t) else fmt(t)}")
        print("\n".join(_format_state(v, n)))
    return EXIT_OK


# ------------------------------------------------------------------- evolve

OMEGA_STATES = ("omega-zero", "omega-one-plus", "omega-one-minus")


def resolve_state(name: str, spec: ModelSpec) -> np.ndarray:
    n = spec.n
    if name == "ground":
        return ket((1.0, "0" * n))
    if name == "singlet":
        if n != 2:
            raise InputError("state 'singlet' needs n=2")
        return ket((1 / np.sqrt(2), "01"), (-1 / np.sqrt(2), "10"))
    if name in OMEGA_STATES:
        if n != 4:
            raise InputError(f"state {name!r} needs n=4")
        enc = omega_encoding(spec.b)
        picks = {"omega-zero": enc.zero_L, "omega-one-plus": enc.one_L[0],
                 "omega-one-minus": enc.one_L[1]}
        return picks[name].amplitudes
    if n in (3, 4) and len(name) == 1:
        try:
            return named_state(n, name).amplitudes
        except ValueError:
            pass
    if name.lstrip().startswith("{") or Path(name).is_file():
        data = load_json_arg(name)
        if "amplitudes" in data:
            v = np.array([complex(re, im) for re, im in data["amplitudes"]])
        else:
            re = np.asarray(data["re"], dtype=float)
            v = re + 1j * np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        if v.shape != (2**n,):
            raise InputError(f"state file has {v.size} amplitudes, model needs {2**n}")
        return StateVector(v).amplitudes
    raise InputError(f"unknown state {name!r} for n={n}")


def cmd_evolve(args) -> int:
    spec = load_model(args.model)
    cfg = RunConfig(args.t, args.dt, args.out, args.format)
    psi = resolve_state(args.state, spec)
    traj = evolve(psi, spec.model, cfg.t_final, cfg.dt,
                  include_dissipator=not args.no_dissipator,
                  record_every=args.record_every, backend=args.backend)
    leak = None
    if args.state in OMEGA_STATES:
        p = four_qubit_basis().matrix("fgh")
        inside = np.real(np.einsum("ia,tij,ja->t", p.conj(), traj.states, p))
        leak = float(np.max(traj.trace - inside))
    with _open_out(cfg.output_path) as fh:
        if cfg.format == "csv":
            traj.write_csv(fh)
        else:
            rows = [dict(zip(("t", "fidelity", "trace", "purity"), map(float, r))) for r in traj.rows()]
            json.dump({"state": args.state, "rows": rows}, fh, indent=1)
            fh.write("\n")
    _report(cfg.output_path, f"final fidelity = {fmt(traj.fidelity[-1])} at t = {fmt(traj.times[-1])}")
    if leak is not None:
        _report(cfg.output_path, f"max leakage outside span(f,g,h) = {leak:.3e}")
    return EXIT_OK


# ------------------------------------------------------------------ metrics

FIGURES = ("1a", "1b", "2", "2-series")


def figure_rows(fig: str, n: int = 500) -> tuple[list[str], list[list[str]]]:
    if fig in ("1a", "1b"):
        header = ["r", "d_df", "p_df"] if fig == "1a" else ["r", "d_df", "p_df", "product"]
        rows = []
        for pt in metrics.fig1_table():
            row = [pt.r, pt.d_df, pt.p_df] + ([pt.product] if fig == "1b" else [])
            rows.append([fmt(x) for x in row])
        return header, rows
    if fig == "2":
        return ["j_tot", "p_df_jtot"], [[str(j), fmt(p)] for j, p in metrics.fig2_table(n)]
    if fig == "2-series":
        return (["n", "p_jtot_1", "p_jtot_2", "p_jtot_half"],
                [[str(m)] + [fmt(x) for x in ps] for m, *ps in metrics.fig2_series(n)])
    raise InputError(f"unknown figure {fig!r}")


def write_figure(fig: str, path: str, n: int = 500) -> None:
    header, rows = figure_rows(fig, n)
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_metrics(args) -> int:
    if args.n < 4 or args.n % 2:
        raise InputError("--n must be even and at least 4")
    write_figure(args.fig, args.out, args.n)
    if args.fig == "1b":
        r = metrics.product_optimum()
        _report(args.out, f"maximum of d_df*p_df at r = {r:.6f} (value {metrics.product_asymptotic(r):.6f})")
    return EXIT_OK


# ------------------------------------------------------------------ encode4

def read_couplings(text: str) -> np.ndarray:
    data = load_json_arg(text)
    if isinstance(data, dict) and "n" in data:
        return load_model(text).b
    if isinstance(data, dict) and "preset" in data:
        return expand_b(data, 4)
    return matrix_from_json(data, 4)


def cmd_encode4(args) -> int:
    b = read_couplings(args.b)
    if b.shape != (4, 4):
        raise InputError(f"encode4 needs a 4x4 coupling matrix, got {b.shape}")
    enc = omega_encoding(b)
    with _open_out(args.out) as fh:
        json.dump(encoding_to_dict(enc, b), fh, indent=2)
        fh.write("\n")
    if enc.degenerate:
        print("warning: Omega1 = Omega2 = 0, the logical direction is undefined", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


# ------------------------------------------------------- reproduce-figures

def worker_count() -> int:
    raw = os.environ.get("COLLECTIVE_DFS_THREADS", "")
    try:
        cap = int(raw) if raw else os.cpu_count() or 1
    except ValueError:
        raise InputError(f"COLLECTIVE_DFS_THREADS must be an integer, got {raw!r}") from None
    return max(1, cap)


def cmd_reproduce(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = {fig: str(outdir / f"fig{fig.replace('-', '_')}.csv") for fig in FIGURES}
    with ThreadPoolExecutor(max_workers=min(worker_count(), len(jobs))) as pool:
        futures = [pool.submit(write_figure, fig, path, args.n) for fig, path in jobs.items()]
        for f in futures:
            f.result()
    for path in jobs.values():
        print(path)
    return EXIT_OK


# -------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="collective-dfs", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("decompose", help="irrep towers and dim V(k) for n qubits")
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("cdfs", help="completely decoherence-free subspace of a sector")
    s.add_argument("--model", required=True, help="model JSON file or inline JSON")
    s.add_argument("--k", type=int, required=True, help="excitation number")
    s.add_argument("--json", action="store_true", help="emit JSON instead of text")
    s.set_defaults(func=cmd_cdfs)

    s = sub.add_parser("evolve", help="integrate the master equation from a named state")
    s.add_argument("--model", required=True)
    s.add_argument("--state", required=True, help="state name (ground, singlet, a..j, u, v, omega-*) or JSON file")
    s.add_argument("--t", type=float, required=True, help="final time")
    s.add_argument("--dt", type=float, required=True, help="step size")
    s.add_argument("--out", default="-", help="output path ('-' for stdout)")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--record-every", type=int, default=1)
    s.add_argument("--no-dissipator", action="store_true", help="Hamiltonian part only")
    s.add_argument("--backend", choices=("cython", "python"), default=None)
    s.set_defaults(func=cmd_evolve)

    s = sub.add_parser("metrics", help="figure data for encoding efficiency and DF fraction")
    s.add_argument("--fig", choices=FIGURES, required=True)
    s.add_argument("--out", default="-")
    s.add_argument("--n", type=int, default=500, help="register size for figure 2")
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("encode4", help="four-qubit Omega encoding for a coupling matrix")
    s.add_argument("--b", required=True, help="4x4 coupling matrix, preset or model (JSON)")
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_encode4)

    s = sub.add_parser("reproduce-figures", help="write all figure data into a directory")
    s.add_argument("--outdir", required=True)
    s.add_argument("--n", type=int, default=500)
    s.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ModelSpecError, StepTooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError, TypeError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
