r"""
Reflexive K3 surfaces and the lattice-level hypotheses attached to them.

A K3 surface is *reflexive* when it carries a polarization ``H`` and a class
``ell`` with

    H^2 = 2,   H.ell = 0,   ell^2 = -12,

so that ``v = (2, ell, -3)`` is a primitive isotropic Mukai vector.  The
moduli space of stable sheaves with vector ``v`` is again a reflexive K3
surface, identified with ``X`` itself; under that identification its
polarization and distinguished class are

    Hhat = 2 ell + 5 H,     ellhat = -5 ell - 12 H.

Nodal classes (``D^2 = -2``) of low degree are found by exhaustive
Fincke--Pohst enumeration of a positive definite form attached to ``H``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Sequence

from .lattice import (
    DivisorClass,
    LatticeError,
    LatticeMismatchError,
    MukaiVector,
    PicardLattice,
    SignatureError,
    congruence_signature,
    euler_char,
    intersect,
    is_isotropic,
    is_primitive,
    mukai_pair,
    twist,
)


class NotReflexiveError(LatticeError):
    pass


@dataclass(frozen=True)
class ReflexivityCheck:
    ok: bool
    failures: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


def is_reflexive(lattice: PicardLattice, H: DivisorClass, ell: DivisorClass) -> ReflexivityCheck:
    if H.lattice is not lattice or ell.lattice is not lattice:
        raise LatticeMismatchError("H and ell must live in the given lattice")
    if lattice.rank < 2:
        return ReflexivityCheck(False, (f"Picard rank {lattice.rank} < 2: no room for ell orthogonal to H",))
    failures = []
    h2, hl, l2 = H.square(), intersect(H, ell), ell.square()
    if h2 != 2:
        failures.append(f"H^2 = {h2}, expected 2")
    if hl != 0:
        failures.append(f"H.ell = {hl}, expected 0")
    if l2 != -12:
        failures.append(f"ell^2 = {l2}, expected -12")
    if math.gcd(*H.coords) != 1:
        failures.append("H is not primitive")
    return ReflexivityCheck(not failures, tuple(failures))


@dataclass(frozen=True)
class ReflexiveSurface:
    lattice: PicardLattice
    H: DivisorClass
    ell: DivisorClass

    def __post_init__(self):
        check = is_reflexive(self.lattice, self.H, self.ell)
        if not check:
            raise NotReflexiveError("; ".join(check.failures))

    @classmethod
    def from_gram(cls, gram, H: Sequence[int], ell: Sequence[int], labels=None) -> ReflexiveSurface:
        L = PicardLattice(gram, labels)
        return cls(L, L.cls(H), L.cls(ell))

    @cached_property
    def Hhat(self) -> DivisorClass:
        """Natural polarization of the dual surface, in the shared basis."""
        return 2 * self.ell + 5 * self.H

    @cached_property
    def ellhat(self) -> DivisorClass:
        return -5 * self.ell - 12 * self.H

    @cached_property
    def v(self) -> MukaiVector:
        """The isotropic vector ``(2, ell, -3)``."""
        return MukaiVector(2, self.ell, -3)

    def dual(self) -> ReflexiveSurface:
        # dual of the dual is the original surface: 2 ellhat + 5 Hhat = H
        return ReflexiveSurface(self.lattice, self.Hhat, self.ellhat)

    def mukai(self, r: int, c1, s: int) -> MukaiVector:
        if not isinstance(c1, DivisorClass):
            c1 = self.lattice.cls(c1) if c1 else self.lattice.zero()
        return MukaiVector(r, c1, s)


def generic_surface() -> ReflexiveSurface:
    """Rank two reflexive lattice ``<2> + <-12>`` spanned by ``H`` and ``ell``."""
    return ReflexiveSurface.from_gram([[2, 0], [0, -12]], (1, 0), (0, 1), labels=("H", "ell"))


def check_A1(v: MukaiVector, H: DivisorClass) -> bool:
    """Primitive, isotropic, and ``gcd(r, deg c1, s) = 1``."""
    return is_primitive(v) and is_isotropic(v) and math.gcd(v.r, intersect(v.c1, H), v.s) == 1


def check_A2(v: MukaiVector, H: DivisorClass) -> bool:
    """Degree zero and rank at least two."""
    return intersect(v.c1, H) == 0 and v.r > 1


def line_bundle_chi(d: DivisorClass) -> int:
    """Riemann--Roch on a K3: ``chi(O(D)) = 2 + D^2/2``."""
    return 2 + d.square() // 2


def moduli_dim(v: MukaiVector) -> int:
    return mukai_pair(v, v) + 2


# --- nodal classes -----------------------------------------------------------


@dataclass(frozen=True)
class NodalReport:
    """
    All classes ``D`` with ``D^2 = -2`` and ``1 <= D.H <= dmax``.

    ``norm_bound`` bounds ``2 (D.H)^2 - H^2 D^2`` over every candidate, and
    ``box`` holds the per-coordinate bounds implied by it; both certify that
    the search was exhaustive.
    """

    classes: tuple[DivisorClass, ...]
    dmax: int
    exhaustive: bool
    norm_bound: int
    box: tuple[int, ...]

    def degrees(self, H: DivisorClass) -> list[int]:
        return [intersect(D, H) for D in self.classes]


def _definite_form(H: DivisorClass) -> list[list[int]]:
    # P(x) = 2 (x.H)^2 - H^2 x^2 is positive definite iff H^perp is negative definite
    L = H.lattice
    g = [sum(L.gram[i][j] * H.coords[j] for j in range(L.rank)) for i in range(L.rank)]
    h = H.square()
    return [[2 * g[i] * g[j] - h * L.gram[i][j] for j in range(L.rank)] for i in range(L.rank)]


def _ldl(P: Sequence[Sequence[int]]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """``P(x) = sum_i d_i (x_i + sum_{j>i} m_ij x_j)^2`` for positive definite ``P``."""
    n = len(P)
    a = [[Fraction(x) for x in row] for row in P]
    d = [Fraction(0)] * n
    m = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        for j in range(i + 1, n):
            m[i][j] = a[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                a[j][k] -= m[i][j] * a[i][k]
    return d, m


def _inverse_diagonal(P: Sequence[Sequence[int]]) -> list[Fraction]:
    n = len(P)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(P)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [a[i][n + i] for i in range(n)]


def _floor_sqrt(q: Fraction) -> int:
    """Largest integer ``k >= 0`` with ``k^2 <= q``."""
    if q < 0:
        return -1
    return math.isqrt(q.numerator // q.denominator)


def short_vectors(P: Sequence[Sequence[int]], bound: int) -> list[tuple[int, ...]]:
    """All integer ``x`` with ``x^T P x <= bound`` for positive definite integral ``P``."""
    n = len(P)
    d, m = _ldl(P)
    out: list[tuple[int, ...]] = []
    x = [0] * n

    def rec(i: int, remaining: Fraction):
        if i < 0:
            out.append(tuple(x))
            return
        c = sum((m[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        t = remaining / d[i]
        r = _floor_sqrt(t) + 1
        lo, hi = math.floor(-c) - r, math.ceil(-c) + r
        for xi in range(lo, hi + 1):
            y = (xi + c) ** 2
            if y <= t:
                x[i] = xi
                rec(i - 1, remaining - d[i] * y)
        x[i] = 0

    rec(n - 1, Fraction(bound))
    return out


def nodal_classes(H: DivisorClass | ReflexiveSurface, dmax: int) -> NodalReport:
    """
    Enumerate every ``D`` with ``D^2 = -2`` and ``1 <= D.H <= dmax``.

    Such a ``D`` satisfies ``P(D) = 2 (D.H)^2 + 2 H^2 <= 2 dmax^2 + 2 H^2``,
    and the sublevel sets of the positive definite form ``P`` are finite.
    Output is sorted by degree, then coordinates.
    """
    if isinstance(H, ReflexiveSurface):
        H = H.H
    if isinstance(dmax, bool) or not isinstance(dmax, int) or dmax < 1:
        raise ValueError(f"dmax must be a positive integer, got {dmax!r}")
    h = H.square()
    if h <= 0:
        raise SignatureError(f"H^2 = {h} is not positive; the orthogonal complement is not negative definite")
    P = _definite_form(H)
    n = len(P)
    if congruence_signature(P) != (n, 0, 0):
        raise SignatureError("orthogonal complement of H is not negative definite")
    bound = 2 * dmax * dmax + 2 * h
    inv = _inverse_diagonal(P)
    box = tuple(_floor_sqrt(bound * q) for q in inv)
    L = H.lattice
    found = []
    for x in short_vectors(P, bound):
        D = DivisorClass(x, L)
        deg = intersect(D, H)
        if 1 <= deg <= dmax and D.square() == -2:
            found.append((deg, x, D))
    found.sort(key=lambda t: (t[0], t[1]))
    return NodalReport(tuple(D for _, _, D in found), dmax, True, bound, box)


def nodal_classes_box_scan(H: DivisorClass, dmax: int, box: Sequence[int]) -> list[DivisorClass]:
    """Brute force over ``|x_i| <= box[i]``; independent check of :func:`nodal_classes`."""
    L = H.lattice
    found = []
    for x in product(*(range(-b, b + 1) for b in box)):
        D = DivisorClass(x, L)
        deg = intersect(D, H)
        if 1 <= deg <= dmax and D.square() == -2:
            found.append((deg, x, D))
    found.sort(key=lambda t: (t[0], t[1]))
    return [D for _, _, D in found]


# --- non-effectivity of E = ell + 2H ------------------------------------------


@dataclass(frozen=True)
class NonEffectivityCertificate:
    """
    Outcome of the nodal case analysis for ``E = ell + 2H``.

    ``holds`` means the sufficient criterion applies, so ``E`` is not
    effective and ``h^i(O(E)) = 0``.  Otherwise ``blocking`` is a nodal
    class that defeats the argument; this never means ``E`` is effective.
    """

    holds: bool
    E: DivisorClass
    E_squared: int
    chi_E: int
    blocking: DivisorClass | None = None
    reason: str = ""


def certify_non_effective(surface: ReflexiveSurface, nodal: NodalReport) -> NonEffectivityCertificate:
    if not nodal.exhaustive:
        raise ValueError("nodal report is not exhaustive")
    if nodal.dmax < 3:
        raise ValueError(f"nodal report must reach degree 3, got dmax={nodal.dmax}")
    H = surface.H
    E = surface.ell + 2 * H
    e2, chi = E.square(), line_bundle_chi(E)
    assert e2 == -4 and chi == 0, (e2, chi)
    by_degree: dict[int, list[DivisorClass]] = {}
    for D in nodal.classes:
        by_degree.setdefault(intersect(D, H), []).append(D)
    for deg in (1, 2):
        if by_degree.get(deg):
            return NonEffectivityCertificate(
                False, E, e2, chi, by_degree[deg][0], f"nodal class of degree {deg}"
            )
    # E = D + F with D nodal of degree 3 forces F nodal of degree 1
    for D in by_degree.get(3, []):
        F = E - D
        if F.square() == -2 and intersect(F, H) == 1:
            return NonEffectivityCertificate(
                False, E, e2, chi, D, "degree 3 nodal class with nodal residual of degree 1"
            )
    return NonEffectivityCertificate(True, E, e2, chi)


def assumption_A3(surface: ReflexiveSurface, certificate: NonEffectivityCertificate) -> str:
    """
    Status of nonemptiness and mu-stability of the moduli space.

    Never computed: it is granted by the nonemptiness theorem for reflexive
    surfaces on which ``ell + 2H`` is not effective.
    """
    if certificate.holds:
        return "granted"
    return "not established"


# --- Mukai vector of the extension 0 -> O -> E(H) -> I_p(ell + 2H) -> 0 ---------


@dataclass(frozen=True)
class ExtensionAccounting:
    v_O: MukaiVector
    v_Ip: MukaiVector
    v_Ip_E: MukaiVector
    v_EH: MukaiVector
    chi_EH: int
    v_E: MukaiVector


def extension_accounting(surface: ReflexiveSurface) -> ExtensionAccounting:
    L = surface.lattice
    zero = L.zero()
    v_O = MukaiVector(1, zero, 1)
    # I_p has rank 1, trivial c1 and chi = 1
    v_Ip = MukaiVector(1, zero, 0)
    v_Ip_E = twist(v_Ip, surface.ell + 2 * surface.H)
    v_EH = v_O + v_Ip_E
    return ExtensionAccounting(v_O, v_Ip, v_Ip_E, v_EH, euler_char(v_EH), twist(v_EH, -surface.H))


def extension_vector(surface: ReflexiveSurface) -> MukaiVector:
    """Mukai vector of ``E`` in ``0 -> O -> E(H) -> I_p(ell + 2H) -> 0``: always ``(2, ell, -3)``."""
    return extension_accounting(surface).v_E
