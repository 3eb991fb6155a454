"""Exact sparse linear algebra over a cyclotomic field."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Iterable, Sequence

from .exact import Scalar, field

__all__ = ["SparseMatrix", "rank_kernel"]


@dataclass(frozen=True)
class SparseMatrix:
    rows: int
    cols: int
    entries: dict[tuple[int, int], Scalar] = dc_field(default_factory=dict)
    order: int = 4

    def __post_init__(self) -> None:
        clean = {}
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise IndexError(f"entry ({r}, {c}) outside {self.rows}x{self.cols}")
            if not isinstance(v, Scalar):
                v = field(self.order).from_rational(v)
            if v:
                clean[(r, c)] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]], order: int = 4) -> SparseMatrix:
        ncols = len(rows[0]) if rows else 0
        entries = {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row) if v != 0}
        return cls(len(rows), ncols, entries, order)

    @classmethod
    def identity(cls, n: int, order: int = 4) -> SparseMatrix:
        return cls(n, n, {(i, i): 1 for i in range(n)}, order)

    def apply(self, vector: Sequence[Scalar]) -> list[Scalar]:
        zero = field(self.order).zero
        out = [zero] * self.rows
        for (r, c), v in self.entries.items():
            out[r] = out[r] + v * vector[c]
        return out


def rank_kernel(matrix: SparseMatrix) -> tuple[int, list[list[Scalar]]]:
    """Rank and a kernel basis, by Gauss-Jordan elimination on sparse rows."""
    fld = field(matrix.order)
    rows: list[dict[int, Scalar]] = [dict() for _ in range(matrix.rows)]
    for (r, c), v in matrix.entries.items():
        rows[r][c] = v
    pivots: list[tuple[int, dict[int, Scalar]]] = []
    remaining = [row for row in rows if row]
    for col in range(matrix.cols):
        idx = next((i for i, row in enumerate(remaining) if col in row), None)
        if idx is None:
            continue
        prow = remaining.pop(idx)
        scale = prow[col].inv()
        prow = {c: v * scale for c, v in prow.items()}
        for other in remaining + [p for _, p in pivots]:
            factor = other.get(col)
            if factor is None:
                continue
            for c, v in prow.items():
                nv = other.get(c, fld.zero) - factor * v
                if nv:
                    other[c] = nv
                else:
                    other.pop(c, None)
        remaining = [row for row in remaining if row]
        pivots.append((col, prow))
    pivot_cols = {c for c, _ in pivots}
    kernel = []
    for free in range(matrix.cols):
        if free in pivot_cols:
            continue
        vec = [fld.zero] * matrix.cols
        vec[free] = fld.one
        for col, prow in pivots:
            v = prow.get(free)
            if v is not None:
                vec[col] = -v
        kernel.append(vec)
    return len(pivots), kernel
