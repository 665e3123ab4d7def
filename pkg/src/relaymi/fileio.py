"""File formats: key-value configs, text precoder matrices, CSV, JSON.

All writers are deterministic: floats are serialized with repr (shortest
round-trip form) and newlines are always "\n", so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = [
    "PrecoderFormatError",
    "parse_config_file",
    "parse_complex",
    "read_precoder_matrix",
    "format_precoder_matrix",
    "write_precoder_matrix",
    "write_csv",
    "write_json",
]


class PrecoderFormatError(ValueError):
    """Malformed precoder matrix file; message carries the offending line."""


def parse_complex(text: str) -> complex:
    """Parse a complex scalar written like 0.4, -0.9j, or 1.2+0.5j."""
    token = text.strip().replace(" ", "")
    if not token:
        raise ValueError("empty complex literal")
    try:
        return complex(token)
    except ValueError as exc:
        raise ValueError(f"cannot parse complex number from {text!r}") from exc


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a `key = value` config file into a raw string mapping.

    Blank lines and `#` comments (full-line or trailing) are ignored.
    Duplicate keys and lines without `=` raise with a line number.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if not key or not value:
            raise ValueError(f"{path}: line {lineno}: empty key or value in {raw!r}")
        if key in values:
            raise ValueError(f"{path}: line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def read_precoder_matrix(path: str | Path) -> np.ndarray:
    """Read a complex matrix from the text interchange format.

    Line 1: `rows cols`.  Each following non-comment line holds one matrix
    row as whitespace-separated `re im` pairs (2*cols numbers).
    """
    lines = Path(path).read_text().splitlines()
    body: list[tuple[int, str]] = []
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            body.append((lineno, stripped))
    if not body:
        raise PrecoderFormatError(f"{path}: file holds no matrix data")

    lineno, header = body[0]
    fields = header.split()
    if len(fields) != 2:
        raise PrecoderFormatError(
            f"{path}: line {lineno}: header must be 'rows cols', got {header!r}"
        )
    try:
        rows, cols = int(fields[0]), int(fields[1])
    except ValueError as exc:
        raise PrecoderFormatError(
            f"{path}: line {lineno}: non-integer dimensions in {header!r}"
        ) from exc
    if rows < 1 or cols < 1:
        raise PrecoderFormatError(f"{path}: line {lineno}: dimensions must be positive")
    if len(body) - 1 != rows:
        raise PrecoderFormatError(
            f"{path}: expected {rows} matrix rows, found {len(body) - 1}"
        )

    out = np.empty((rows, cols), dtype=np.complex128)
    for r, (lineno, line) in enumerate(body[1:]):
        parts = line.split()
        if len(parts) != 2 * cols:
            raise PrecoderFormatError(
                f"{path}: line {lineno}: expected {2 * cols} numbers (re im pairs), "
                f"found {len(parts)}"
            )
        try:
            nums = [float(p) for p in parts]
        except ValueError as exc:
            raise PrecoderFormatError(f"{path}: line {lineno}: non-numeric entry") from exc
        values = np.asarray(nums).reshape(cols, 2)
        out[r] = values[:, 0] + 1j * values[:, 1]
    if not np.all(np.isfinite(out.view(np.float64))):
        raise PrecoderFormatError(f"{path}: matrix entries must be finite")
    return out


def format_precoder_matrix(matrix: np.ndarray) -> str:
    """Render a complex matrix in the text interchange format (row-major re/im pairs)."""
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {matrix.shape}")
    rows, cols = matrix.shape
    lines = [f"{rows} {cols}"]
    for r in range(rows):
        pairs = [f"{matrix[r, c].real!r} {matrix[r, c].imag!r}" for c in range(cols)]
        lines.append("  ".join(pairs))
    return "\n".join(lines) + "\n"


def write_precoder_matrix(path: str | Path, matrix: np.ndarray) -> None:
    """Write a complex matrix in the text interchange format."""
    Path(path).write_text(format_precoder_matrix(matrix))


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(
    path: str | Path,
    columns: list[str],
    rows: list[tuple],
    header_comments: list[str] | None = None,
) -> None:
    """Write a deterministic CSV: `# key=value` comment lines, header, rows."""
    lines = [f"# {comment}" for comment in (header_comments or [])]
    lines.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row width {len(row)} does not match {len(columns)} columns")
        lines.append(",".join(_format_cell(cell) for cell in row))
    with open(path, "w", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


def write_json(path: str | Path, payload: dict) -> None:
    """Write a JSON report with sorted keys and stable layout."""
    with open(path, "w", newline="\n") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
