"""Finitely generated abelian groups acting on a torus by affine lattice maps."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Iterator, Sequence

__all__ = ["AbelianGroup", "AffineMap", "Element"]

Element = tuple[int, ...]
Matrix = tuple[tuple[int, ...], ...]


def _identity_matrix(m: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(m)) for i in range(m))


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    m = len(a)
    return tuple(tuple(sum(a[i][l] * b[l][j] for l in range(m)) for j in range(m)) for i in range(m))


def _matvec(a: Matrix, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(sum((a[i][j] * v[j] for j in range(len(v))), Fraction(0)) for i in range(len(a)))


def _det(a: Matrix) -> int:
    m = len(a)
    if m == 0:
        return 1
    rows = [[Fraction(x) for x in row] for row in a]
    det = Fraction(1)
    for c in range(m):
        p = next((r for r in range(c, m) if rows[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            rows[c], rows[p] = rows[p], rows[c]
            det = -det
        det *= rows[c][c]
        for r in range(c + 1, m):
            f = rows[r][c] / rows[c][c]
            rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return int(det)


def _inverse_unimodular(a: Matrix) -> Matrix:
    m = len(a)
    rows = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(m)] for i, row in enumerate(a)]
    for c in range(m):
        p = next(r for r in range(c, m) if rows[r][c] != 0)
        rows[c], rows[p] = rows[p], rows[c]
        pv = rows[c][c]
        rows[c] = [x / pv for x in rows[c]]
        for r in range(m):
            if r != c and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[c])]
    return tuple(tuple(int(x) for x in row[m:]) for row in rows)


@dataclass(frozen=True)
class AffineMap:
    """x -> matrix @ x + shift on R^m / Z^m; shifts are kept modulo Z^m."""

    matrix: Matrix
    shift: tuple[Fraction, ...]

    @classmethod
    def identity(cls, m: int) -> AffineMap:
        return cls(_identity_matrix(m), (Fraction(0),) * m)

    def then(self, other: AffineMap) -> AffineMap:
        """Apply self first, then other."""
        moved = _matvec(other.matrix, self.shift)
        shift = tuple((a + b) % 1 for a, b in zip(moved, other.shift))
        return AffineMap(_matmul(other.matrix, self.matrix), shift)

    def inverse(self) -> AffineMap:
        inv = _inverse_unimodular(self.matrix)
        return AffineMap(inv, tuple((-x) % 1 for x in _matvec(inv, self.shift)))

    def is_identity(self) -> bool:
        m = len(self.matrix)
        return self.matrix == _identity_matrix(m) and all(x % 1 == 0 for x in self.shift)


@dataclass(frozen=True)
class AbelianGroup:
    """Z^free_rank x prod Z/torsion_i with commuting affine generator actions.

    The right action on the torus is x.g = A_g x + v_g, so that functions pull
    back as f^g(x) = f(x.g) and (f^h)^g = f^(gh).
    """

    free_rank: int
    torsion: tuple[int, ...]
    dimension: int
    generator_maps: tuple[AffineMap, ...] = dc_field(default=())

    def __post_init__(self) -> None:
        if self.free_rank < 0 or any(n < 1 for n in self.torsion):
            raise ValueError("invalid group presentation")
        maps = self.generator_maps or tuple(AffineMap.identity(self.dimension) for _ in range(self.rank))
        if len(maps) != self.rank:
            raise ValueError(f"need {self.rank} generator actions, got {len(maps)}")
        object.__setattr__(self, "generator_maps", maps)

    @property
    def rank(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def identity(self) -> Element:
        return (0,) * self.rank

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def reduce(self, coords: Sequence[int]) -> Element:
        if len(coords) != self.rank:
            raise ValueError(f"group element needs {self.rank} coordinates, got {len(coords)}")
        free = tuple(int(c) for c in coords[: self.free_rank])
        tors = tuple(int(c) % n for c, n in zip(coords[self.free_rank :], self.torsion))
        return free + tors

    def multiply(self, g: Element, h: Element) -> Element:
        return self.reduce(tuple(a + b for a, b in zip(g, h)))

    def inverse(self, g: Element) -> Element:
        return self.reduce(tuple(-a for a in g))

    def power(self, g: Element, n: int) -> Element:
        return self.reduce(tuple(a * n for a in g))

    def product(self, elements: Sequence[Element]) -> Element:
        out = self.identity
        for g in elements:
            out = self.multiply(out, g)
        return out

    def elements(self, radius: int = 1) -> Iterator[Element]:
        """All elements, with free coordinates restricted to [-radius, radius]."""
        ranges = [range(-radius, radius + 1)] * self.free_rank + [range(n) for n in self.torsion]
        return (tuple(c) for c in product(*ranges))

    @cached_property
    def _map_cache(self) -> dict[Element, AffineMap]:
        return {}

    def action(self, g: Element) -> AffineMap:
        cache = self._map_cache
        if g in cache:
            return cache[g]
        out = AffineMap.identity(self.dimension)
        for gen, power in zip(self.generator_maps, g):
            step = gen if power >= 0 else gen.inverse()
            for _ in range(abs(power)):
                out = out.then(step)
        cache[g] = out
        return out

    def validate_action(self, order: int) -> None:
        """Raise ValueError unless the generator maps define an admissible action."""
        m = self.dimension
        for i, gen in enumerate(self.generator_maps):
            if len(gen.matrix) != m or any(len(r) != m for r in gen.matrix) or len(gen.shift) != m:
                raise ValueError(f"generator {i + 1}: action has wrong dimension")
            det = _det(gen.matrix)
            if det != 1:
                raise ValueError(f"generator {i + 1}: matrix determinant {det}; need an orientation-preserving lattice automorphism")
            for x in gen.shift:
                if (x * order).denominator != 1:
                    raise ValueError(f"generator {i + 1}: translation {x} not in (1/{order})Z")
        for i, a in enumerate(self.generator_maps):
            for j, b in enumerate(self.generator_maps[i + 1 :], start=i + 1):
                if a.then(b) != b.then(a):
                    raise ValueError(f"generators {i + 1} and {j + 1} act by non-commuting maps")
        for i, n in enumerate(self.torsion):
            gen = self.generator_maps[self.free_rank + i]
            out = AffineMap.identity(m)
            for _ in range(n):
                out = out.then(gen)
            if not out.is_identity():
                raise ValueError(f"generator {self.free_rank + i + 1} has order {n} but its action does not")
