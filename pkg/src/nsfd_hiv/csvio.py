"""CSV emission and reading of trajectories and sweep results.

Trajectory files have header ``n,t,X,Y,V,Z`` optionally followed by
``omega`` and by ``lyapunov`` with ``lyapunov_delta`` (``L_n - L_{n-1}``).
There is one row per step ``n = 1 .. steps``. Reals are written with 17 significant digits (binary64 round trip); undefined monitor
values are empty fields. Lines end in ``\\n``; encoding is UTF-8.
"""
import csv
import io
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Tuple

import numpy as np

from .errors import ParseError, SinkError

BASE_COLUMNS = ("n", "t", "X", "Y", "V", "Z")
INT_COLUMNS = {"n"}


def format_real(value):
    if value != value:
        return ""
    return "%.17g" % value


@dataclass(frozen=True)
class CsvTable:
    columns: Tuple[str, ...]
    data: np.ndarray  # shape (rows, len(columns)), NaN for empty fields

    def column(self, name):
        return self.data[:, self.columns.index(name)]


def trajectory_table(traj) -> CsvTable:
    """Tabulate steps ``1 .. steps`` of a :class:`~nsfd_hiv.simulate.TrajectoryRecord`."""
    steps = traj.steps
    n = np.arange(1, steps + 1, dtype=np.float64)
    cols = [n, n * traj.params.h] + [traj.states[1:, j] for j in range(4)]
    names = list(BASE_COLUMNS)
    if traj.monitors is not None:
        omega = np.full(steps + 1, np.nan)
        omega[: traj.monitors.omega.size] = traj.monitors.omega
        cols.append(omega[1:])
        names.append("omega")
    if traj.lyapunov is not None:
        cols += [traj.lyapunov.values[1:], traj.lyapunov.deltas]
        names += ["lyapunov", "lyapunov_delta"]
    return CsvTable(tuple(names), np.column_stack(cols))


def _format_rows(table):
    int_idx = [i for i, name in enumerate(table.columns) if name in INT_COLUMNS]
    for row in table.data:
        fields = [format_real(v) for v in row]
        for i in int_idx:
            fields[i] = "%d" % row[i]
        yield ",".join(fields) + "\n"


def _open_sink(dest):
    if dest == "-":
        return sys.stdout, False
    if hasattr(dest, "write"):
        return dest, False
    try:
        return open(Path(dest), "w", encoding="utf-8", newline=""), True
    except OSError as exc:
        raise SinkError(f"cannot open {dest}: {exc}") from exc


def write_lines(lines, dest) -> int:
    """Write an iterable of ``\\n``-terminated lines; return the UTF-8 byte count."""
    sink, owned = _open_sink(dest)
    count = 0
    try:
        buf = []
        for line in lines:
            buf.append(line)
            if len(buf) >= 4096:
                chunk = "".join(buf)
                sink.write(chunk)
                count += len(chunk.encode("utf-8"))
                buf = []
        chunk = "".join(buf)
        sink.write(chunk)
        count += len(chunk.encode("utf-8"))
        sink.flush()
    except OSError as exc:
        raise SinkError(f"write failed: {exc}") from exc
    finally:
        if owned:
            sink.close()
    return count


def emit_table(table: CsvTable, dest) -> int:
    def lines():
        yield ",".join(table.columns) + "\n"
        yield from _format_rows(table)
    return write_lines(lines(), dest)


def emit_csv(traj, dest) -> int:
    """Write a trajectory to ``dest`` (path, ``"-"`` or text stream)."""
    return emit_table(trajectory_table(traj), dest)


def emit_csv_text(traj) -> str:
    out = io.StringIO()
    emit_csv(traj, out)
    return out.getvalue()


def _read_text(src):
    if hasattr(src, "read"):
        return src.read()
    return Path(src).read_text(encoding="utf-8")


def read_csv(src) -> CsvTable:
    """Parse numeric CSV from a path or text stream. Empty fields become NaN."""
    text = _read_text(src)
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ParseError("empty CSV", 1, 1)
    header = tuple(name.strip() for name in rows[0])
    data = np.empty((len(rows) - 1, len(header)))
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", i, 1)
        for j, field in enumerate(row):
            try:
                data[i - 2, j] = float(field) if field.strip() else np.nan
            except ValueError:
                raise ParseError(f"not a number: {field!r}", i, j + 1) from None
    return CsvTable(header, data)


def read_history(src) -> np.ndarray:
    """History rows (oldest first) from a CSV with columns X, Y, V, Z."""
    table = read_csv(src)
    missing = [c for c in ("X", "Y", "V", "Z") if c not in table.columns]
    if missing:
        raise ParseError(f"history CSV lacks columns {missing}", 1, 1)
    return np.column_stack([table.column(c) for c in ("X", "Y", "V", "Z")])


SWEEP_COLUMNS = ("beta", "c", "tau", "r0", "r1", "predicted", "observed", "agree",
                 "near_threshold", "converged", "steps", "sup_error", "error")


def emit_sweep_csv(cells: Sequence, dest) -> int:
    def lines():
        yield ",".join(SWEEP_COLUMNS) + "\n"
        for cell in cells:
            out = io.StringIO()
            csv.writer(out, lineterminator="\n").writerow([
                format_real(cell.beta), format_real(cell.c), format_real(cell.tau),
                format_real(cell.r0), format_real(cell.r1),
                cell.predicted or "", cell.observed,
                str(cell.agree).lower(), str(cell.near_threshold).lower(),
                str(cell.converged).lower(), cell.steps,
                format_real(cell.sup_error), cell.error or "",
            ])
            yield out.getvalue()
    return write_lines(lines(), dest)
