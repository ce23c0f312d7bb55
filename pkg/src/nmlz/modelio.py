"""Model JSON format and CSV export.

Model documents carry the strict upper triangle of the coupling only; the
lower triangle is regenerated from the hermiticity flag.  Indices in files
are 1-based (level numbering convention of the physics literature); the
Python API stays 0-based.

Every CSV starts with '#'-prefixed metadata lines recording the parameter
set and the package version, then a header row.
"""

import csv
import io
import json

import numpy as np

from . import __version__
from .errors import ParseError
from .model import ANTIHERMITIAN, HERMITIAN, NmlzModel, validate_model


def model_to_dict(model: NmlzModel) -> dict:
    coupling = []
    for i in range(model.dim):
        for j in range(i + 1, model.dim):
            g = model.coupling[i, j]
            if g != 0.0:
                coupling.append([i + 1, j + 1, g.real, g.imag])
    return {
        "dim": model.dim,
        "slopes": [float(v) for v in model.slopes],
        "statics": [float(v) for v in model.statics],
        "coupling": coupling,
        "hermiticity": model.hermiticity,
    }


def model_from_dict(doc: dict) -> NmlzModel:
    try:
        dim = int(doc["dim"])
        slopes = doc["slopes"]
        statics = doc["statics"]
        entries = doc["coupling"]
        hermiticity = doc["hermiticity"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"model document missing field: {exc}") from exc
    known = {"dim", "slopes", "statics", "coupling", "hermiticity"}
    unknown = set(doc) - known
    if unknown:
        raise ParseError(f"unknown model fields: {sorted(unknown)}")
    if hermiticity not in (ANTIHERMITIAN, HERMITIAN):
        raise ParseError(f"hermiticity must be '{ANTIHERMITIAN}' or "
                         f"'{HERMITIAN}', got {hermiticity!r}")
    coupling = np.zeros((dim, dim), dtype=complex)
    sign = -1.0 if hermiticity == ANTIHERMITIAN else 1.0
    for entry in entries:
        try:
            row, col, re, im = entry
        except (TypeError, ValueError) as exc:
            raise ParseError(
                f"coupling entries are [row, col, re, im], got {entry!r}") from exc
        i, j = int(row) - 1, int(col) - 1
        if not (0 <= i < dim and 0 <= j < dim and i < j):
            raise ParseError(
                f"coupling entry ({row}, {col}) outside the strict upper "
                f"triangle of a {dim}-level model")
        coupling[i, j] = complex(re, im)
        coupling[j, i] = sign * np.conj(coupling[i, j])
    return validate_model(dim, slopes, statics, coupling, hermiticity)


def write_model(path, model: NmlzModel):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")


def read_model(path) -> NmlzModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: model document must be a JSON object")
    return model_from_dict(doc)


def write_csv(path, header, rows, metadata=None):
    """CSV with '#'-prefixed metadata (parameters + version) then a header."""
    meta = dict(metadata or {})
    meta.setdefault("version", __version__)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for key in meta:
            fh.write(f"# {key} = {meta[key]}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def read_csv(path):
    """(header, rows as list of string lists); metadata lines skipped."""
    with open(path, encoding="utf-8") as fh:
        content = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(io.StringIO("".join(content)))
    rows = list(reader)
    if not rows:
        raise ParseError(f"{path}: empty table")
    return rows[0], rows[1:]


def table_rows(table) -> list:
    """Long-format rows (from, to, p_tilde, p_normalized, log_p_tilde).

    1-based level labels; p_tilde falls back to inf past the double range
    while the log column stays exact.
    """
    log_p = table.log_unnormalized
    norm = table.normalized
    rows = []
    for n in range(table.dim):          # initial level
        for m in range(table.dim):      # final level
            lp = log_p[m, n]
            p = float(np.exp(lp)) if lp <= 700.0 else float("inf")
            rows.append([n + 1, m + 1, repr(p), repr(float(norm[m, n])),
                         repr(float(lp))])
    return rows


def write_table(path, table, metadata=None):
    write_csv(path, ["from", "to", "p_tilde", "p_normalized", "log_p_tilde"],
              table_rows(table), metadata)


def read_table_column(path, column_1based: int) -> np.ndarray:
    """P-tilde column for one initial level from a table CSV."""
    header, rows = read_csv(path)
    try:
        i_from = header.index("from")
        i_to = header.index("to")
        i_p = header.index("p_tilde")
    except ValueError as exc:
        raise ParseError(f"{path}: not a transition table ({exc})") from exc
    values = {}
    for row in rows:
        if int(row[i_from]) == column_1based:
            values[int(row[i_to])] = float(row[i_p])
    if not values:
        raise ParseError(f"{path}: no rows for initial level {column_1based}")
    return np.array([values[k] for k in sorted(values)])


def write_trace(path, trace, metadata=None):
    """Eigenvalue trace CSV: t, re_1, im_1, ..., re_N, im_N."""
    n = trace.eigenvalues.shape[1]
    header = ["t"]
    for k in range(1, n + 1):
        header += [f"re_{k}", f"im_{k}"]
    rows = []
    for i, t in enumerate(trace.times):
        row = [repr(float(t))]
        for k in range(n):
            ev = trace.eigenvalues[i, k]
            row += [repr(float(ev.real)), repr(float(ev.imag))]
        rows.append(row)
    write_csv(path, header, rows, metadata)
