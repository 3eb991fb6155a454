"""Simplicial and cyclic combinatorics: Delta morphisms, nerve faces, projections."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, TypeVar

__all__ = [
    "DeltaMorphism",
    "compose",
    "cyclic_tau",
    "degeneracy",
    "face",
    "identity",
    "nerve_degeneracy",
    "nerve_face",
    "varpi",
]

G = TypeVar("G")
X = TypeVar("X")


@dataclass(frozen=True)
class DeltaMorphism:
    """A nondecreasing map [source] -> [target]."""

    source: int
    target: int
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.values) != self.source + 1:
            raise ValueError(f"need {self.source + 1} values, got {len(self.values)}")
        if any(not 0 <= v <= self.target for v in self.values):
            raise ValueError(f"values {self.values} leave [0, {self.target}]")
        if any(a > b for a, b in zip(self.values, self.values[1:])):
            raise ValueError(f"values {self.values} are not nondecreasing")

    def __call__(self, i: int) -> int:
        return self.values[i]

    def epi_mono(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Canonical factorization: degeneracy indices then face indices.

        The map equals d_{i_1} ... d_{i_s} s_{j_1} ... s_{j_t} with
        i_1 > ... > i_s and j_1 < ... < j_t.
        """
        image = sorted(set(self.values))
        faces = tuple(sorted((i for i in range(self.target + 1) if i not in image), reverse=True))
        degens = tuple(j for j in range(self.source) if self.values[j] == self.values[j + 1])
        return degens, faces


def identity(n: int) -> DeltaMorphism:
    return DeltaMorphism(n, n, tuple(range(n + 1)))


def face(n: int, i: int) -> DeltaMorphism:
    """delta_i : [n-1] -> [n], the injection skipping i."""
    if n < 1 or not 0 <= i <= n:
        raise IndexError(f"face index {i} out of range for [{n}]")
    return DeltaMorphism(n - 1, n, tuple(v if v < i else v + 1 for v in range(n)))


def degeneracy(n: int, j: int) -> DeltaMorphism:
    """sigma_j : [n+1] -> [n], the surjection hitting j twice."""
    if not 0 <= j <= n:
        raise IndexError(f"degeneracy index {j} out of range for [{n}]")
    return DeltaMorphism(n + 1, n, tuple(v if v <= j else v - 1 for v in range(n + 2)))


def compose(f: DeltaMorphism, g: DeltaMorphism) -> DeltaMorphism:
    """The composite f o g (apply g first)."""
    if g.target != f.source:
        raise ValueError(f"cannot compose [{g.source}]->[{g.target}] with [{f.source}]->[{f.target}]")
    return DeltaMorphism(g.source, f.target, tuple(f.values[v] for v in g.values))


def nerve_face(
    k: int,
    i: int,
    point: X,
    elements: Sequence[G],
    multiply: Callable[[G, G], G],
    act: Callable[[X, G], X],
) -> tuple[X, tuple[G, ...]]:
    """Face map of the nerve of a translation groupoid on (x, g_1, ..., g_k)."""
    if len(elements) != k or k < 1:
        raise ValueError(f"need a tuple of length {k} >= 1")
    if not 0 <= i <= k:
        raise IndexError(f"face index {i} out of range for level {k}")
    g = tuple(elements)
    if i == 0:
        return act(point, g[0]), g[1:]
    if i == k:
        return point, g[:-1]
    return point, g[: i - 1] + (multiply(g[i - 1], g[i]),) + g[i + 1 :]


def nerve_degeneracy(k: int, j: int, point: X, elements: Sequence[G], unit: G) -> tuple[X, tuple[G, ...]]:
    """Insert the identity arrow in slot j of (x, g_1, ..., g_k)."""
    if len(elements) != k:
        raise ValueError(f"need a tuple of length {k}")
    if not 0 <= j <= k:
        raise IndexError(f"degeneracy index {j} out of range for level {k}")
    g = tuple(elements)
    return point, g[:j] + (unit,) + g[j:]


def varpi(
    n: int,
    indices: Sequence[int],
    elements: Sequence[G],
    multiply: Callable[[G, G], G],
    unit: G,
    inverse: Callable[[G], G] | None = None,
) -> tuple[G, ...]:
    """Projection of an n-tuple of arrows onto the vertices i_0, ..., i_m.

    Consecutive entries multiply the arrows strictly between the two vertices;
    equal vertices give the identity.  A decreasing pair returns the inverse of
    the product running the other way, which needs ``inverse``.
    """
    if len(elements) != n:
        raise ValueError(f"need a tuple of length {n}")
    if not indices or any(not 0 <= i <= n for i in indices):
        raise ValueError(f"malformed index list {list(indices)} for level {n}")
    out = []
    for lo, hi in zip(indices, indices[1:]):
        if lo <= hi:
            prod = unit
            for g in elements[lo:hi]:
                prod = multiply(prod, g)
            out.append(prod)
        else:
            if inverse is None:
                raise ValueError("decreasing index pair needs an inverse")
            prod = unit
            for g in elements[hi:lo]:
                prod = multiply(prod, g)
            out.append(inverse(prod))
    return tuple(out)


def cyclic_tau(arguments: Sequence[X]) -> tuple[X, ...]:
    """The cyclic operator (a_0, ..., a_n) -> (a_n, a_0, ..., a_{n-1})."""
    args = tuple(arguments)
    if not args:
        return args
    return (args[-1],) + args[:-1]
