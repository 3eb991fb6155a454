"""Polynomial differential forms on T^m x Delta^k with Laurent coefficients in u.

One sparse type covers functions and forms on the torus, polynomial forms on a
simplex in Cartesian coordinates t_1..t_k, and their tensor products.  A term is
keyed by (u-exponent, Fourier vector, t-exponents, generator mask).  Bit j < m of
the mask is dx_{j+1} and bit m + i is dt_{i+1}; monomials are always written with
every dx to the left of every dt, so a term is (function) dx_S dt_T.  The exterior
derivative is the honest one, d = d_M + d_t, and satisfies the graded Leibniz rule.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .exact import Scalar, ULaurent, field
from .groups import AffineMap

__all__ = [
    "Form",
    "popcount",
    "simplex_monomial_integral",
    "wedge_sign",
]

Key = tuple[int, tuple[int, ...], tuple[int, ...], int]


def popcount(x: int) -> int:
    return bin(x).count("1")


@lru_cache(maxsize=1 << 16)
def wedge_sign(left: int, right: int) -> int:
    """Sign of reordering generators(left) ^ generators(right) into increasing order."""
    swaps = 0
    r = right
    while r:
        low = r & -r
        j = low.bit_length() - 1
        swaps += popcount(left >> (j + 1))
        r ^= low
    return -1 if swaps & 1 else 1


@lru_cache(maxsize=None)
def simplex_monomial_integral(exponents: tuple[int, ...]) -> Fraction:
    """Integral of t_1^a_1 ... t_k^a_k dt_1...dt_k over the standard k-simplex."""
    num = 1
    for a in exponents:
        num *= factorial(a)
    return Fraction(num, factorial(len(exponents) + sum(exponents)))


def _add_vec(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(x + y for x, y in zip(a, b))


class Form:
    """Immutable sparse form on T^m x Delta^k over Q(zeta_N)[u, 1/u]."""

    __slots__ = ("m", "k", "order", "terms")

    def __init__(self, m: int, k: int, order: int, terms: Mapping[Key, Scalar] | None = None) -> None:
        self.m = m
        self.k = k
        self.order = order
        self.terms: dict[Key, Scalar] = {key: v for key, v in (terms or {}).items() if v}

    # -- constructors ----------------------------------------------------------
    @classmethod
    def _trusted(cls, m: int, k: int, order: int, terms: dict[Key, Scalar]) -> Form:
        obj = object.__new__(cls)
        obj.m, obj.k, obj.order, obj.terms = m, k, order, terms
        return obj

    @classmethod
    def zero(cls, m: int, k: int = 0, order: int = 4) -> Form:
        return cls._trusted(m, k, order, {})

    @classmethod
    def monomial(
        cls,
        m: int,
        k: int = 0,
        order: int = 4,
        coefficient: Scalar | int | Fraction = 1,
        fourier: Sequence[int] | None = None,
        t_exponents: Sequence[int] | None = None,
        dx: Iterable[int] = (),
        dt: Iterable[int] = (),
        u: int = 0,
    ) -> Form:
        """coefficient * u^u * e_fourier * t^t_exponents * dx_{i..} * dt_{j..} (1-based, in given order)."""
        fld = field(order)
        coeff = coefficient if isinstance(coefficient, Scalar) else fld.from_rational(coefficient)
        four = tuple(fourier) if fourier is not None else (0,) * m
        texp = tuple(t_exponents) if t_exponents is not None else (0,) * k
        if len(four) != m or len(texp) != k:
            raise ValueError("Fourier or t-exponent vector has the wrong length")
        mask, sign = 0, 1
        for j in dx:
            if not 1 <= j <= m:
                raise IndexError(f"dx_{j} outside dimension {m}")
            bit = 1 << (j - 1)
            if mask & bit:
                return cls.zero(m, k, order)
            sign *= wedge_sign(mask, bit)
            mask |= bit
        for i in dt:
            if not 1 <= i <= k:
                raise IndexError(f"dt_{i} outside level {k}")
            bit = 1 << (m + i - 1)
            if mask & bit:
                return cls.zero(m, k, order)
            sign *= wedge_sign(mask, bit)
            mask |= bit
        return cls(m, k, order, {(u, four, texp, mask): coeff * sign})

    @classmethod
    def constant(cls, value: Scalar | int | Fraction, m: int, k: int = 0, order: int = 4) -> Form:
        return cls.monomial(m, k, order, value)

    def like(self, terms: dict[Key, Scalar]) -> Form:
        return Form._trusted(self.m, self.k, self.order, terms)

    # -- structure -------------------------------------------------------------
    def __iter__(self) -> Iterator[tuple[Key, Scalar]]:
        return iter(self.terms.items())

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def _check(self, other: Form) -> None:
        if (self.m, self.k, self.order) != (other.m, other.k, other.order):
            raise ValueError(f"incompatible forms: (m,k,N)={(self.m, self.k, self.order)} vs {(other.m, other.k, other.order)}")

    @property
    def manifold_mask(self) -> int:
        return (1 << self.m) - 1

    def bidegree_of(self, mask: int) -> tuple[int, int]:
        low = mask & self.manifold_mask
        return popcount(low), popcount(mask >> self.m)

    def bidegrees(self) -> set[tuple[int, int]]:
        return {self.bidegree_of(key[3]) for key in self.terms}

    def u_powers(self) -> set[int]:
        return {key[0] for key in self.terms}

    def component(self, manifold_degree: int | None = None, simplex_degree: int | None = None, u: int | None = None) -> Form:
        out = {}
        for key, v in self.terms.items():
            p, s = self.bidegree_of(key[3])
            if manifold_degree is not None and p != manifold_degree:
                continue
            if simplex_degree is not None and s != simplex_degree:
                continue
            if u is not None and key[0] != u:
                continue
            out[key] = v
        return self.like(out)

    def map_terms(self, fn: Callable[[Key, Scalar], Scalar | int]) -> Form:
        """Multiply each term by a key-dependent factor."""
        out = {}
        for key, v in self.terms.items():
            f = fn(key, v)
            if f:
                out[key] = f if isinstance(f, Scalar) else v * f
        return self.like(out)

    def is_scalar_function(self) -> bool:
        return all(key[3] == 0 for key in self.terms)

    # -- linear structure --------------------------------------------------------
    def __add__(self, other: Form) -> Form:
        if not isinstance(other, Form):
            return NotImplemented
        self._check(other)
        if len(other.terms) > len(self.terms):
            self, other = other, self
        out = dict(self.terms)
        for key, v in other.terms.items():
            if key in out:
                s = out[key] + v
                if s:
                    out[key] = s
                else:
                    del out[key]
            else:
                out[key] = v
        return self.like(out)

    def __neg__(self) -> Form:
        return self.like({key: -v for key, v in self.terms.items()})

    def __sub__(self, other: Form) -> Form:
        return self + (-other)

    def scale(self, c: Scalar | int | Fraction) -> Form:
        if not isinstance(c, Scalar):
            c = field(self.order).from_rational(c)
        if not c:
            return self.like({})
        return self.like({key: v * c for key, v in self.terms.items()})

    def __mul__(self, other: object) -> Form:
        if isinstance(other, Form):
            return self.wedge(other)
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other: object) -> Form:
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def shift_u(self, power: int) -> Form:
        if not power:
            return self
        return self.like({(key[0] + power,) + key[1:]: v for key, v in self.terms.items()})

    # -- products ----------------------------------------------------------------
    def wedge(self, other: Form) -> Form:
        self._check(other)
        out: dict[Key, Scalar] = {}
        for (u1, f1, t1, m1), v1 in self.terms.items():
            for (u2, f2, t2, m2), v2 in other.terms.items():
                if m1 & m2:
                    continue
                key = (u1 + u2, _add_vec(f1, f2), _add_vec(t1, t2), m1 | m2)
                val = v1 * v2
                if wedge_sign(m1, m2) < 0:
                    val = -val
                if key in out:
                    s = out[key] + val
                    if s:
                        out[key] = s
                    else:
                        del out[key]
                else:
                    out[key] = val
        return self.like(out)

    def power(self, n: int) -> Form:
        out = Form.constant(1, self.m, self.k, self.order)
        for _ in range(n):
            out = out.wedge(self)
        return out

    def commutes_with_everything(self) -> bool:
        """True when every term has even total degree."""
        return all(popcount(key[3]) % 2 == 0 for key in self.terms)

    # -- derivatives ----------------------------------------------------------------
    def d_manifold(self) -> Form:
        out: dict[Key, Scalar] = {}
        for (u, four, texp, mask), v in self.terms.items():
            for j, kj in enumerate(four):
                if not kj:
                    continue
                bit = 1 << j
                if mask & bit:
                    continue
                val = v * kj
                if wedge_sign(bit, mask) < 0:
                    val = -val
                key = (u, four, texp, mask | bit)
                out[key] = out[key] + val if key in out else val
        return self.like({k_: v for k_, v in out.items() if v})

    def d_simplex(self) -> Form:
        out: dict[Key, Scalar] = {}
        for (u, four, texp, mask), v in self.terms.items():
            for i, a in enumerate(texp):
                if not a:
                    continue
                bit = 1 << (self.m + i)
                if mask & bit:
                    continue
                val = v * a
                if wedge_sign(bit, mask) < 0:
                    val = -val
                lowered = texp[:i] + (a - 1,) + texp[i + 1 :]
                key = (u, four, lowered, mask | bit)
                out[key] = out[key] + val if key in out else val
        return self.like({k_: v for k_, v in out.items() if v})

    def d(self) -> Form:
        return self.d_manifold() + self.d_simplex()

    # -- group action -----------------------------------------------------------------
    def pullback(self, action: AffineMap) -> Form:
        """The pullback along x -> A x + v of the torus factor."""
        fld = field(self.order)
        matrix = action.matrix
        m = self.m
        is_translation = all(matrix[i][j] == (i == j) for i in range(m) for j in range(m))
        out: dict[Key, Scalar] = {}
        for (u, four, texp, mask), v in self.terms.items():
            phase = sum((Fraction(kj) * vj for kj, vj in zip(four, action.shift)), Fraction(0)) * self.order
            if phase.denominator != 1:
                raise ValueError(f"translation {action.shift} not in (1/{self.order})Z^{m}")
            coeff = v * fld.zeta_power(int(phase))
            new_four = tuple(sum(matrix[j][i] * four[j] for j in range(m)) for i in range(m))
            if is_translation:
                key = (u, new_four, texp, mask)
                out[key] = out[key] + coeff if key in out else coeff
                continue
            for image_mask, minor in _exterior_power(matrix, mask & ((1 << m) - 1)):
                key = (u, new_four, texp, image_mask | (mask >> m << m))
                val = coeff * minor
                out[key] = out[key] + val if key in out else val
        return self.like({k_: v for k_, v in out.items() if v})

    # -- simplex maps -------------------------------------------------------------------
    def substitute_simplex(self, new_k: int, t_images: Sequence[Form], dt_images: Sequence[Form] | None = None) -> Form:
        """Pull back along an affine map Delta^new_k -> Delta^k given by images of t_i.

        ``t_images`` are degree-zero forms at level new_k; the images of dt_i
        default to their exterior derivatives.
        """
        if len(t_images) != self.k:
            raise ValueError(f"need {self.k} images")
        if dt_images is None:
            dt_images = [t.d_simplex() for t in t_images]
        one = Form.constant(1, self.m, new_k, self.order)
        power_cache: dict[tuple[int, int], Form] = {}

        def t_power(i: int, a: int) -> Form:
            if (i, a) not in power_cache:
                power_cache[(i, a)] = one if a == 0 else t_power(i, a - 1).wedge(t_images[i])
            return power_cache[(i, a)]

        result = Form.zero(self.m, new_k, self.order)
        manifold_bits = self.manifold_mask
        for (u, four, texp, mask), v in self.terms.items():
            piece = Form._trusted(self.m, new_k, self.order, {(u, four, (0,) * new_k, mask & manifold_bits): v})
            for i, a in enumerate(texp):
                if a:
                    piece = piece.wedge(t_power(i, a))
            for i in range(self.k):
                if mask >> (self.m + i) & 1:
                    piece = piece.wedge(dt_images[i])
            result = result + piece
        return result

    def simplex_face(self, i: int) -> Form:
        """Restriction to the i-th face of Delta^k, parametrized by Delta^(k-1).

        Face 0 is the hyperplane sum t = 1 with t_1 = 1 - s_1 - ... - s_(k-1)
        and t_(j+1) = s_j; face i >= 1 is t_i = 0.
        """
        k = self.k
        if not 0 <= i <= k or k < 1:
            raise IndexError(f"face {i} out of range for level {k}")
        s = [Form.monomial(self.m, k - 1, self.order, 1, t_exponents=_unit(k - 1, j)) for j in range(k - 1)]
        zero = Form.zero(self.m, k - 1, self.order)
        if i == 0:
            first = Form.constant(1, self.m, k - 1, self.order)
            for x in s:
                first = first - x
            images = [first] + s
        else:
            images = s[: i - 1] + [zero] + s[i - 1 :]
        return self.substitute_simplex(k - 1, images)

    def simplex_degeneracy(self, j: int) -> Form:
        """Pull back along the degeneracy Delta^(k+1) -> Delta^k collapsing vertices j, j+1."""
        k = self.k
        if not 0 <= j <= k:
            raise IndexError(f"degeneracy {j} out of range for level {k}")
        t = [Form.monomial(self.m, k + 1, self.order, 1, t_exponents=_unit(k + 1, i)) for i in range(k + 1)]
        # vertex v_i = e_i with v_0 = origin; sigma_j sends v_i to v_i for i <= j, v_(i-1) otherwise
        images = []
        for i in range(1, k + 1):
            if i < j:
                images.append(t[i - 1])
            elif i == j:
                images.append(t[j - 1] + t[j])
            else:
                images.append(t[i])
        if j == 0:
            images = [t[i] for i in range(1, k + 1)]
        return self.substitute_simplex(k + 1, images)

    def extend_level(self, new_k: int) -> Form:
        """Regard a form at level k <= new_k as one on Delta^new_k (extra t's unused)."""
        if new_k < self.k:
            raise ValueError("cannot shrink level")
        extra = new_k - self.k
        out = {}
        for (u, four, texp, mask), v in self.terms.items():
            man = mask & self.manifold_mask
            simp = mask >> self.m
            out[(u, four, texp + (0,) * extra, man | (simp << self.m))] = v
        return Form._trusted(self.m, new_k, self.order, out)

    # -- integration ------------------------------------------------------------------
    def integrate_manifold(self) -> Form:
        """Integrate the torus factor: the constant top-degree Fourier coefficient."""
        top = self.manifold_mask
        zero = (0,) * self.m
        out: dict[Key, Scalar] = {}
        for (u, four, texp, mask), v in self.terms.items():
            if four == zero and mask & top == top:
                key = (u, (), texp, mask >> self.m)
                out[key] = out[key] + v if key in out else v
        return Form(0, self.k, self.order, out)

    def integrate_simplex(self) -> Form:
        """Integrate the simplex factor over Delta^k (top dt-degree terms only)."""
        top = ((1 << self.k) - 1) << self.m
        fld = field(self.order)
        out: dict[Key, Scalar] = {}
        for (u, four, texp, mask), v in self.terms.items():
            if mask & top == top:
                key = (u, four, (), mask & self.manifold_mask)
                val = v * fld.from_rational(simplex_monomial_integral(texp))
                out[key] = out[key] + val if key in out else val
        return Form(self.m, 0, self.order, out)

    def integrate_boundary(self) -> Form:
        """Integral over the oriented boundary: sum_i (-1)^i over the i-th face."""
        total = Form.zero(self.m, 0, self.order)
        for i in range(self.k + 1):
            piece = self.simplex_face(i).integrate_simplex()
            total = total + piece if i % 2 == 0 else total - piece
        return total

    def integrate(self) -> ULaurent[Scalar]:
        """Integral over T^m x Delta^k, as a Laurent polynomial in u."""
        reduced = self.integrate_manifold().integrate_simplex()
        out: dict[int, Scalar] = {}
        for (u, _, _, _), v in reduced.terms.items():
            out[u] = out[u] + v if u in out else v
        return ULaurent(out)

    def as_scalar(self) -> Scalar:
        """The value of a constant form with no generators and no u."""
        if not self.terms:
            return field(self.order).zero
        if len(self.terms) != 1:
            raise ValueError("form is not a constant")
        (key, v), = self.terms.items()
        if key[0] or key[3] or any(key[1]) or any(key[2]):
            raise ValueError("form is not a constant")
        return v

    # -- comparison / display ----------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, Form):
            return (self.m, self.k, self.order) == (other.m, other.k, other.order) and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.m, self.k, self.order, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return f"Form(0; m={self.m}, k={self.k})"
        parts = []
        for (u, four, texp, mask), v in sorted(self.terms.items(), key=lambda kv: repr(kv[0])):
            bits = []
            if u:
                bits.append(f"u^{u}")
            if any(four):
                bits.append(f"e{list(four)}")
            bits += [f"t{i + 1}^{a}" if a > 1 else f"t{i + 1}" for i, a in enumerate(texp) if a]
            bits += [f"dx{j + 1}" for j in range(self.m) if mask >> j & 1]
            bits += [f"dt{i + 1}" for i in range(self.k) if mask >> (self.m + i) & 1]
            parts.append(f"({v})" + ("*" + "*".join(bits) if bits else ""))
        return "Form(" + " + ".join(parts) + ")"


def _unit(k: int, i: int) -> tuple[int, ...]:
    return tuple(int(j == i) for j in range(k))


@lru_cache(maxsize=None)
def _exterior_power(matrix: tuple[tuple[int, ...], ...], mask: int) -> tuple[tuple[int, int], ...]:
    """Pullback of dx_S under x -> A x as a list of (mask, coefficient)."""
    m = len(matrix)
    terms = {0: 1}
    for j in range(m):
        if not mask >> j & 1:
            continue
        new_terms: dict[int, int] = {}
        for cur, c in terms.items():
            for l in range(m):
                a = matrix[j][l]
                bit = 1 << l
                if not a or cur & bit:
                    continue
                val = c * a * wedge_sign(cur, bit)
                new_terms[cur | bit] = new_terms.get(cur | bit, 0) + val
        terms = {k_: v for k_, v in new_terms.items() if v}
    return tuple(terms.items())
