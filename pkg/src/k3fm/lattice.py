r"""
Exact arithmetic on Picard lattices of K3 surfaces and on Mukai vectors.

A Mukai vector lives in `H^0 \oplus NS \oplus H^4` and is written ``(r, c1, s)``
with ``s = chi - r``.  The Mukai pairing is

    (r, c, s) . (r', c', s') = -r s' + c.c' - s r'.

Everything here is integer arithmetic; the only division is ``d^2 / 2``,
which is exact because the lattice is even.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence


class LatticeError(ValueError):
    """Base class for malformed lattice data."""


class LatticeMismatchError(LatticeError):
    """Two classes that should share a lattice do not."""


class SignatureError(LatticeError):
    """A Gram matrix has the wrong signature."""


def _as_int(x, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise LatticeError(f"{what} must be an integer, got {x!r}")
    return x


def congruence_signature(gram: Sequence[Sequence]) -> tuple[int, int, int]:
    """
    Return ``(n_plus, n_minus, n_zero)`` of a symmetric rational matrix.

    Symmetric Gaussian elimination over the rationals (Sylvester's law of
    inertia); no floating point is involved.
    """
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    pos = neg = zero = 0
    for k in range(n):
        if a[k][k] == 0:
            # bring a nonzero pivot to position k
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                a[k], a[j] = a[j], a[k]
                for row in a:
                    row[k], row[j] = row[j], row[k]
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is None:
                    zero += 1
                    continue
                # e_k <- e_k + e_j makes the pivot 2 a_kj != 0
                for i in range(n):
                    a[k][i] += a[j][i]
                for i in range(n):
                    a[i][k] += a[i][j]
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
        for i in range(k + 1, n):
            a[k][i] = Fraction(0)
    return pos, neg, zero


class PicardLattice:
    """
    Even integral lattice of signature ``(1, rank - 1)``.

    Instances compare by identity: classes from two different
    ``PicardLattice`` objects never mix, even if the Gram matrices agree.
    """

    __slots__ = ("gram", "labels")

    def __init__(self, gram: Iterable[Iterable[int]], labels: Sequence[str] | None = None):
        rows = tuple(tuple(_as_int(x, "Gram entry") for x in row) for row in gram)
        n = len(rows)
        if n == 0:
            raise LatticeError("Gram matrix is empty")
        if any(len(row) != n for row in rows):
            raise LatticeError("Gram matrix is not square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise LatticeError(f"Gram matrix is not symmetric at ({i}, {j})")
            if rows[i][i] % 2:
                raise LatticeError(f"lattice is not even: diagonal entry {i} is {rows[i][i]}")
        sig = congruence_signature(rows)
        if sig != (1, n - 1, 0):
            raise SignatureError(f"signature {sig[:2]} (degenerate: {sig[2]}), expected (1, {n - 1})")
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != n:
                raise LatticeError("number of labels does not match the rank")
        self.gram = rows
        self.labels = labels

    @property
    def rank(self) -> int:
        return len(self.gram)

    def __repr__(self):
        return f"PicardLattice({[list(r) for r in self.gram]})"

    def pair(self, x: Sequence, y: Sequence):
        g = self.gram
        return sum(x[i] * g[i][j] * y[j] for i in range(len(g)) for j in range(len(g)) if x[i] and y[j])

    def cls(self, *coords: int) -> DivisorClass:
        """Shorthand: ``L.cls(1, 0)`` is the first basis vector."""
        if len(coords) == 1 and not isinstance(coords[0], int):
            coords = tuple(coords[0])
        return DivisorClass(tuple(coords), self)

    def zero(self) -> DivisorClass:
        return DivisorClass((0,) * self.rank, self)

    def basis(self) -> list[DivisorClass]:
        n = self.rank
        return [DivisorClass(tuple(int(i == j) for j in range(n)), self) for i in range(n)]


@dataclass(frozen=True, eq=False)
class DivisorClass:
    coords: tuple[int, ...]
    lattice: PicardLattice

    def __post_init__(self):
        coords = tuple(_as_int(x, "coordinate") for x in self.coords)
        if len(coords) != self.lattice.rank:
            raise LatticeError(f"{len(coords)} coordinates for a rank {self.lattice.rank} lattice")
        object.__setattr__(self, "coords", coords)

    def _check(self, other: DivisorClass):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        if other.lattice is not self.lattice:
            raise LatticeMismatchError("divisor classes belong to different lattices")
        return None

    def __eq__(self, other):
        if not isinstance(other, DivisorClass):
            return NotImplemented
        return self.lattice is other.lattice and self.coords == other.coords

    def __hash__(self):
        return hash((id(self.lattice), self.coords))

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return DivisorClass(tuple(a + b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return DivisorClass(tuple(a - b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __neg__(self):
        return DivisorClass(tuple(-a for a in self.coords), self.lattice)

    def __mul__(self, k):
        if isinstance(k, bool) or not isinstance(k, int):
            return NotImplemented
        return DivisorClass(tuple(k * a for a in self.coords), self.lattice)

    __rmul__ = __mul__

    def __bool__(self):
        return any(self.coords)

    def __repr__(self):
        return f"DivisorClass{self.coords}"

    def dot(self, other: DivisorClass) -> int:
        return intersect(self, other)

    def square(self) -> int:
        return self.lattice.pair(self.coords, self.coords)


def intersect(d1: DivisorClass, d2: DivisorClass) -> int:
    """Intersection number ``d1 . d2`` from the Gram matrix."""
    if d1.lattice is not d2.lattice:
        raise LatticeMismatchError("divisor classes belong to different lattices")
    return d1.lattice.pair(d1.coords, d2.coords)


@dataclass(frozen=True)
class MukaiVector:
    """``(r, c1, s)`` with ``r`` the rank and ``s = r + ch_2 = chi - r``."""

    r: int
    c1: DivisorClass
    s: int

    def __post_init__(self):
        _as_int(self.r, "rank component")
        _as_int(self.s, "H^4 component")
        if not isinstance(self.c1, DivisorClass):
            raise TypeError("c1 must be a DivisorClass")

    @property
    def lattice(self) -> PicardLattice:
        return self.c1.lattice

    def __add__(self, other):
        if not isinstance(other, MukaiVector):
            return NotImplemented
        return MukaiVector(self.r + other.r, self.c1 + other.c1, self.s + other.s)

    def __sub__(self, other):
        if not isinstance(other, MukaiVector):
            return NotImplemented
        return MukaiVector(self.r - other.r, self.c1 - other.c1, self.s - other.s)

    def __neg__(self):
        return MukaiVector(-self.r, -self.c1, -self.s)

    def __mul__(self, k):
        if isinstance(k, bool) or not isinstance(k, int):
            return NotImplemented
        return MukaiVector(k * self.r, k * self.c1, k * self.s)

    __rmul__ = __mul__

    def __iter__(self):
        yield self.r
        yield self.c1
        yield self.s

    def __repr__(self):
        return f"MukaiVector({self.r}, {self.c1.coords}, {self.s})"

    def as_tuple(self) -> tuple[int, tuple[int, ...], int]:
        return self.r, self.c1.coords, self.s


class WitIndex(int):
    """Cohomological degree ``i`` in which a WIT_i transform is concentrated."""

    def __new__(cls, i):
        i = _as_int(i, "WIT index")
        if i not in (0, 1, 2):
            raise ValueError(f"WIT index must be 0, 1 or 2, got {i}")
        return super().__new__(cls, i)

    def flipped(self) -> WitIndex:
        return WitIndex(2 - self)


def mukai_pair(u: MukaiVector, v: MukaiVector) -> int:
    return -u.r * v.s + intersect(u.c1, v.c1) - u.s * v.r


def euler_char(u: MukaiVector) -> int:
    return u.r + u.s


def euler_pairing(u: MukaiVector, v: MukaiVector) -> int:
    """``chi(E, F) = -<v(E), v(F)>``."""
    return -mukai_pair(u, v)


def twist(u: MukaiVector, d: DivisorClass) -> MukaiVector:
    """Multiply by ``exp(d)``: the Mukai vector of ``E(d)``."""
    d2 = d.square()
    return MukaiVector(u.r, u.c1 + u.r * d, u.s + intersect(u.c1, d) + u.r * (d2 // 2))


def dual_vector(u: MukaiVector) -> MukaiVector:
    return MukaiVector(u.r, -u.c1, u.s)


def is_isotropic(u: MukaiVector) -> bool:
    return mukai_pair(u, u) == 0


def is_primitive(u: MukaiVector) -> bool:
    return gcd(u.r, u.s, *u.c1.coords) == 1


def vector_from_parts(r: int, c1: DivisorClass | Sequence[int], s: int, lattice: PicardLattice | None = None) -> MukaiVector:
    if not isinstance(c1, DivisorClass):
        if lattice is None:
            raise LatticeError("a lattice is required to build c1 from coordinates")
        c1 = DivisorClass(tuple(c1), lattice)
    return MukaiVector(r, c1, s)
