"""Plain-text formats for matrices and unitary-mixing maps.

Matrix format: first line ``n m``, then n rows of m whitespace-separated
entries written ``re,im`` (shortest round-trip decimals), e.g. ``1.5,-0.25``.
Round-trips are exact.

Mixing format: first line ``k n``, then k sections each holding a weight
line followed by n rows of n entries in the same entry syntax.
"""
from __future__ import annotations

import os

import numpy as np

from .linalg import as_matrix


def _format_entry(z: complex) -> str:
    return f"{float(z.real)!r},{float(z.imag)!r}"


def _parse_entry(token: str) -> complex:
    parts = token.split(",")
    if len(parts) != 2:
        raise ValueError(f"bad matrix entry {token!r} (expected 're,im')")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ValueError(f"bad matrix entry {token!r}: {exc}") from exc


def dumps_matrix(M) -> str:
    A = as_matrix(M)
    n, m = A.shape
    lines = [f"{n} {m}"]
    for row in A:
        lines.append(" ".join(_format_entry(z) for z in row))
    return "\n".join(lines) + "\n"


def loads_matrix(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"bad matrix header {lines[0]!r}")
    n, m = int(header[0]), int(header[1])
    if n < 1 or m < 1:
        raise ValueError(f"bad matrix shape {n}x{m}")
    if len(lines) != n + 1:
        raise ValueError(f"expected {n} rows, found {len(lines) - 1}")
    out = np.empty((n, m), dtype=np.complex128)
    for i, line in enumerate(lines[1:]):
        tokens = line.split()
        if len(tokens) != m:
            raise ValueError(f"row {i}: expected {m} entries, found {len(tokens)}")
        out[i] = [_parse_entry(t) for t in tokens]
    return out


def write_matrix(path: str | os.PathLike, M) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_matrix(M))


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    with open(path) as fh:
        return loads_matrix(fh.read())


def dumps_mixing(pairs: list[tuple[np.ndarray, float]]) -> str:
    if not pairs:
        raise ValueError("mixing must contain at least one unitary")
    n = as_matrix(pairs[0][0]).shape[0]
    lines = [f"{len(pairs)} {n}"]
    for U, w in pairs:
        A = as_matrix(U)
        if A.shape != (n, n):
            raise ValueError("all mixing unitaries must share one dimension")
        lines.append(f"{float(w)!r}")
        for row in A:
            lines.append(" ".join(_format_entry(z) for z in row))
    return "\n".join(lines) + "\n"


def loads_mixing(text: str) -> list[tuple[np.ndarray, float]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty mixing text")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"bad mixing header {lines[0]!r}")
    k, n = int(header[0]), int(header[1])
    expected = 1 + k * (n + 1)
    if len(lines) != expected:
        raise ValueError(f"expected {expected} lines, found {len(lines)}")
    pairs = []
    pos = 1
    for _ in range(k):
        w = float(lines[pos])
        pos += 1
        U = np.empty((n, n), dtype=np.complex128)
        for i in range(n):
            tokens = lines[pos + i].split()
            if len(tokens) != n:
                raise ValueError(f"mixing row has {len(tokens)} entries, wanted {n}")
            U[i] = [_parse_entry(t) for t in tokens]
        pos += n
        pairs.append((U, w))
    return pairs


def write_mixing(path: str | os.PathLike, pairs) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_mixing(pairs))


def read_mixing(path: str | os.PathLike) -> list[tuple[np.ndarray, float]]:
    with open(path) as fh:
        return loads_mixing(fh.read())
