"""Versioned CSV text: a `# schema=1` line, optional comments, header, %.17g rows."""

from __future__ import annotations

import io

import numpy as np

SCHEMA = 1


def csv_text(header, columns, comments=()) -> str:
    cols = [np.asarray(c, dtype=float).ravel() for c in columns]
    if len({c.size for c in cols}) > 1:
        raise ValueError("columns must have equal length")
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA}\n")
    for c in comments:
        buf.write(f"# {c}\n")
    buf.write(",".join(header) + "\n")
    if cols:
        np.savetxt(buf, np.column_stack(cols), fmt="%.17g", delimiter=",")
    return buf.getvalue()


def read_csv(text: str) -> tuple[list[str], np.ndarray]:
    """Inverse of csv_text: (header, 2-D data)."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    if len(lines) == 1:
        return header, np.empty((0, len(header)))
    data = np.loadtxt(io.StringIO("\n".join(lines[1:])), delimiter=",", ndmin=2)
    return header, data
