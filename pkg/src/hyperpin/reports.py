"""Delimited-output writers shared by the CLI harness.

Every float is written with 17 significant digits so that reruns with the
same config and seed produce byte-identical files (wall-clock columns are
the one documented exception).
"""

from __future__ import annotations

import csv
from typing import Iterable

import numpy as np


def fmt(x) -> str:
    """Canonical text form: floats at 17 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def write_csv(path, header: Iterable[str], rows: Iterable[Iterable]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(list(header))
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_matrix_csv(path, A: np.ndarray) -> None:
    """Dense matrix, row-major, header names the columns."""
    A = np.asarray(A)
    header = [f"c{j}" for j in range(A.shape[1])]
    write_csv(path, header, A)


def write_spectrum_csv(path, eigenvalues) -> None:
    ev = np.asarray(eigenvalues, dtype=complex).ravel()
    write_csv(path, ["re", "im"], [(z.real, z.imag) for z in ev])


def write_msf_grid_csv(path, grid) -> None:
    rows = []
    for r, imv in enumerate(grid.im):
        for c, rev in enumerate(grid.re):
            rows.append((rev, imv, grid.values[r, c]))
    write_csv(path, ["re", "im", "lambda"], rows)


def write_verdict_csv(path, verdict) -> None:
    rows = [
        (ev.real, ev.imag, lam, lam < -verdict.margin)
        for ev, lam in verdict.lambda_values
    ]
    write_csv(path, ["eig_re", "eig_im", "msf", "feasible"], rows)


def format_sets(sets) -> str:
    """Head-sets as `0+1;2+3` (CSV-safe)."""
    return ";".join("+".join(str(v) for v in hs) for hs in sets)


def write_selection_csv(path, entries) -> None:
    """entries: iterables of (method, cost, feasible, chosen_sets, wall_time_ms)."""
    rows = [
        (method, cost, feasible, format_sets(sets), wall_ms)
        for method, cost, feasible, sets, wall_ms in entries
    ]
    write_csv(path, ["method", "cost", "feasible", "chosen_sets", "wall_time_ms"], rows)


def write_sweep_csv(path, report) -> None:
    rows = [
        (r.partition_id, r.feasible,
         "" if r.min_cost is None else r.min_cost,
         "" if r.greedy_cost is None else r.greedy_cost)
        for r in report.rows
    ]
    write_csv(path, ["partition_id", "feasible", "min_cost", "greedy_cost"], rows)


def write_trajectory_csv(path, traj) -> None:
    rows = []
    T, N, n = traj.states.shape
    for k in range(T):
        for i in range(N):
            for c in range(n):
                rows.append((traj.times[k], i, c, traj.states[k, i, c]))
    write_csv(path, ["t", "node", "component", "value"], rows)


def write_error_csv(path, traj) -> None:
    write_csv(path, ["t", "error_norm"], zip(traj.times, traj.error_norm))


def write_degrees_csv(path, report) -> None:
    rows = [
        (v, report.d_in[v], report.d_out[v], report.delta[v])
        for v in range(len(report.d_in))
    ]
    write_csv(path, ["node", "d_in", "d_out", "delta_d"], rows)
