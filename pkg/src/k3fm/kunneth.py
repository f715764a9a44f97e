r"""
Algebraic cohomology of ``X x Xhat`` in Kunneth form, and a
Grothendieck--Riemann--Roch evaluation of the transform.

Both factors are the same reflexive K3 surface, identified through the
isomorphism ``Psi``, so every divisor block uses the shared Picard basis.
A class is stored by bidegree ``(p, q)`` with ``p, q in {0, 2, 4}``:

    (0,0)  scalar               (4,0)  [pt] x 1         (0,4)  1 x [pt]
    (2,0)  D x 1                (0,2)  1 x D
    (2,2)  sum M_ij e_i x e_j  +  iota * (graph class of Psi in H^2 x H^2)
    (4,2)  [pt] x D             (2,4)  D x [pt]         (4,4)  [pt] x [pt]

``iota`` also involves the transcendental lattice, which is never
enumerated; the only products that stay inside the algebraic part are

    iota . (D x 1) = [pt] x D,    iota . (1 x D) = D x [pt],
    iota . (a x b) = (a.b) [pt x pt],

and ``iota . iota`` (which would need the full rank 22 lattice) raises.
Coefficients are ints, or ``Fraction`` with denominator 2 where ``c1^2/2``
appears; results that must be integral are checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .lattice import DivisorClass, MukaiVector, PicardLattice
from .reflexive import ReflexiveSurface


class UnsupportedProductError(ArithmeticError):
    """The product needs ``iota . iota``, which the algebraic model cannot express."""


class IntegralityError(ArithmeticError):
    pass


def _half(x):
    return x // 2 if isinstance(x, int) and x % 2 == 0 else Fraction(x) / 2


def _norm(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


def _vadd(*vs):
    return tuple(_norm(sum(c)) for c in zip(*vs))


def _vscale(k, v):
    return tuple(_norm(k * a) for a in v)


def _bilinear(gram, x, y):
    n = len(gram)
    return _norm(sum(x[i] * gram[i][j] * y[j] for i in range(n) if x[i] for j in range(n) if y[j]))


@dataclass(frozen=True)
class SurfaceClass:
    """Even cohomology class ``(h0, h2, h4)`` on one K3 factor, ``h2`` algebraic."""

    h0: object
    h2: tuple
    h4: object
    lattice: PicardLattice = field(compare=False, repr=False)

    def __add__(self, other):
        return SurfaceClass(_norm(self.h0 + other.h0), _vadd(self.h2, other.h2), _norm(self.h4 + other.h4), self.lattice)

    def __neg__(self):
        return SurfaceClass(-self.h0, _vscale(-1, self.h2), -self.h4, self.lattice)

    def cup(self, other: SurfaceClass) -> SurfaceClass:
        g = self.lattice.gram
        return SurfaceClass(
            _norm(self.h0 * other.h0),
            _vadd(_vscale(self.h0, other.h2), _vscale(other.h0, self.h2)),
            _norm(self.h0 * other.h4 + self.h4 * other.h0 + _bilinear(g, self.h2, other.h2)),
            self.lattice,
        )

    def dual(self) -> SurfaceClass:
        return SurfaceClass(self.h0, _vscale(-1, self.h2), self.h4, self.lattice)

    @classmethod
    def of(cls, u: MukaiVector) -> SurfaceClass:
        return cls(u.r, u.c1.coords, u.s, u.lattice)

    def to_mukai(self) -> MukaiVector:
        parts = (self.h0, *self.h2, self.h4)
        if any(isinstance(x, Fraction) and x.denominator != 1 for x in parts):
            raise IntegralityError(f"non-integral Mukai vector {self!r}")
        return MukaiVector(int(self.h0), DivisorClass(tuple(int(x) for x in self.h2), self.lattice), int(self.h4))


def exp_class(d: DivisorClass) -> SurfaceClass:
    """``ch(O(d)) = (1, d, d^2/2)``."""
    return SurfaceClass(1, d.coords, _half(d.square()), d.lattice)


def sqrt_td(lattice: PicardLattice) -> SurfaceClass:
    """Square root of the Todd class of a K3, ``(1, 0, 1)``; its square is ``td = (1, 0, 2)``."""
    return SurfaceClass(1, (0,) * lattice.rank, 1, lattice)


@dataclass(frozen=True)
class ProductClass:
    lattice: PicardLattice = field(compare=False, repr=False)
    b00: object = 0
    b20: tuple = ()
    b02: tuple = ()
    b22: tuple = ()
    iota: object = 0
    b40: object = 0
    b04: object = 0
    b42: tuple = ()
    b24: tuple = ()
    b44: object = 0

    def __post_init__(self):
        n = self.lattice.rank
        z = (0,) * n
        for name in ("b20", "b02", "b42", "b24"):
            if not getattr(self, name):
                object.__setattr__(self, name, z)
        if not self.b22:
            object.__setattr__(self, "b22", tuple(z for _ in range(n)))

    @classmethod
    def zero(cls, lattice: PicardLattice) -> ProductClass:
        return cls(lattice)

    @classmethod
    def unit(cls, lattice: PicardLattice) -> ProductClass:
        return cls(lattice, b00=1)

    @classmethod
    def iota_class(cls, lattice: PicardLattice, coeff=1) -> ProductClass:
        return cls(lattice, iota=coeff)

    def block(self, p: int, q: int):
        """Kunneth component of bidegree ``(p, q)``; ``(2, 2)`` is ``(matrix, iota)``."""
        if (p, q) == (2, 2):
            return self.b22, self.iota
        try:
            return getattr(self, f"b{p}{q}")
        except AttributeError:
            raise KeyError((p, q)) from None

    def blocks(self) -> dict:
        return {
            (0, 0): self.b00, (2, 0): self.b20, (0, 2): self.b02,
            (2, 2): (self.b22, self.iota), (4, 0): self.b40, (0, 4): self.b04,
            (4, 2): self.b42, (2, 4): self.b24, (4, 4): self.b44,
        }

    def __add__(self, other: ProductClass) -> ProductClass:
        return ProductClass(
            self.lattice,
            _norm(self.b00 + other.b00),
            _vadd(self.b20, other.b20),
            _vadd(self.b02, other.b02),
            tuple(_vadd(r, s) for r, s in zip(self.b22, other.b22)),
            _norm(self.iota + other.iota),
            _norm(self.b40 + other.b40),
            _norm(self.b04 + other.b04),
            _vadd(self.b42, other.b42),
            _vadd(self.b24, other.b24),
            _norm(self.b44 + other.b44),
        )

    def scale(self, k) -> ProductClass:
        return ProductClass(
            self.lattice,
            _norm(k * self.b00),
            _vscale(k, self.b20),
            _vscale(k, self.b02),
            tuple(_vscale(k, r) for r in self.b22),
            _norm(k * self.iota),
            _norm(k * self.b40),
            _norm(k * self.b04),
            _vscale(k, self.b42),
            _vscale(k, self.b24),
            _norm(k * self.b44),
        )

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + other.scale(-1)

    def dual(self) -> ProductClass:
        """Chern character of the dual: ``ch_k`` picks up ``(-1)^k``, ``k = (p + q)/2``."""
        return ProductClass(
            self.lattice, self.b00, _vscale(-1, self.b20), _vscale(-1, self.b02),
            self.b22, self.iota, self.b40, self.b04,
            _vscale(-1, self.b42), _vscale(-1, self.b24), self.b44,
        )

    def swap(self) -> ProductClass:
        """Exchange the two factors (transpose every block)."""
        return ProductClass(
            self.lattice, self.b00, self.b02, self.b20,
            tuple(zip(*self.b22)) if self.b22 else (), self.iota,
            self.b04, self.b40, self.b24, self.b42, self.b44,
        )

    def __mul__(self, other):
        if isinstance(other, ProductClass):
            return cup(self, other)
        return NotImplemented


def cup(a: ProductClass, b: ProductClass) -> ProductClass:
    if a.lattice is not b.lattice:
        raise ValueError("product classes over different lattices")
    if a.iota and b.iota:
        raise UnsupportedProductError("iota . iota needs the transcendental lattice")
    g = a.lattice.gram
    n = len(g)
    rng = range(n)

    def outer(x, y):
        return tuple(tuple(_norm(x[i] * y[j]) for j in rng) for i in rng)

    def row_action(x, M):
        # sum_ij M_ij (x.e_i) e_j
        gx = [sum(x[k] * g[k][i] for k in rng) for i in rng]
        return tuple(_norm(sum(gx[i] * M[i][j] for i in rng)) for j in rng)

    def col_action(M, y):
        # sum_ij M_ij (e_j.y) e_i
        gy = [sum(g[j][k] * y[k] for k in rng) for j in rng]
        return tuple(_norm(sum(M[i][j] * gy[j] for j in rng)) for i in rng)

    def mat_pair(M, N):
        # (sum M_ij e_i x e_j) . (sum N_kl e_k x e_l) = sum M_ij N_kl g_ik g_jl
        gng = [[sum(g[i][k] * N[k][l] * g[l][j] for k in rng for l in rng if N[k][l]) for j in rng] for i in rng]
        return _norm(sum(M[i][j] * gng[i][j] for i in rng for j in rng if M[i][j]))

    def mat_iota(M):
        return _norm(sum(M[i][j] * g[i][j] for i in rng for j in rng if M[i][j]))

    a00, b00 = a.b00, b.b00
    c00 = _norm(a00 * b00)
    c20 = _vadd(_vscale(a00, b.b20), _vscale(b00, a.b20))
    c02 = _vadd(_vscale(a00, b.b02), _vscale(b00, a.b02))
    c40 = _norm(a00 * b.b40 + a.b40 * b00 + _bilinear(g, a.b20, b.b20))
    c04 = _norm(a00 * b.b04 + a.b04 * b00 + _bilinear(g, a.b02, b.b02))
    c22 = tuple(
        _vadd(_vscale(a00, rb), _vscale(b00, ra), xy, yx)
        for ra, rb, xy, yx in zip(a.b22, b.b22, outer(a.b20, b.b02), outer(b.b20, a.b02))
    )
    ciota = _norm(a00 * b.iota + a.iota * b00)
    c42 = _vadd(
        _vscale(a00, b.b42), _vscale(b00, a.b42),
        _vscale(a.b40, b.b02), _vscale(b.b40, a.b02),
        row_action(a.b20, b.b22), row_action(b.b20, a.b22),
        _vscale(b.iota, a.b20), _vscale(a.iota, b.b20),
    )
    c24 = _vadd(
        _vscale(a00, b.b24), _vscale(b00, a.b24),
        _vscale(a.b04, b.b20), _vscale(b.b04, a.b20),
        col_action(b.b22, a.b02), col_action(a.b22, b.b02),
        _vscale(b.iota, a.b02), _vscale(a.iota, b.b02),
    )
    c44 = _norm(
        a00 * b.b44 + a.b44 * b00
        + a.b40 * b.b04 + a.b04 * b.b40
        + _bilinear(g, a.b20, b.b24) + _bilinear(g, b.b20, a.b24)
        + _bilinear(g, a.b02, b.b42) + _bilinear(g, b.b02, a.b42)
        + mat_pair(a.b22, b.b22)
        + b.iota * mat_iota(a.b22) + a.iota * mat_iota(b.b22)
    )
    return ProductClass(a.lattice, c00, c20, c02, c22, ciota, c40, c04, c42, c24, c44)


def pullback_x(c: SurfaceClass | MukaiVector) -> ProductClass:
    if isinstance(c, MukaiVector):
        c = SurfaceClass.of(c)
    return ProductClass(c.lattice, b00=c.h0, b20=c.h2, b40=c.h4)


def pullback_xhat(c: SurfaceClass | MukaiVector) -> ProductClass:
    if isinstance(c, MukaiVector):
        c = SurfaceClass.of(c)
    return ProductClass(c.lattice, b00=c.h0, b02=c.h2, b04=c.h4)


def pushforward_xhat(a: ProductClass) -> SurfaceClass:
    """Integrate over the ``X`` factor: keep the ``(4, q)`` blocks."""
    return SurfaceClass(a.b40, a.b42, a.b44, a.lattice)


def pushforward_x(a: ProductClass) -> SurfaceClass:
    """Integrate over the ``Xhat`` factor: keep the ``(p, 4)`` blocks."""
    return SurfaceClass(a.b04, a.b24, a.b44, a.lattice)


def ch_graph(lattice: PicardLattice) -> ProductClass:
    """
    ``ch(O_Gamma)`` for the graph of ``Psi``.

    GRR for the embedding gives ``Gamma_*(td^{-1}) = [Gamma] - 2 [pt x pt]``.
    """
    return ProductClass(lattice, iota=1, b40=1, b04=1, b44=-2)


@dataclass(frozen=True)
class KernelReport:
    gamma: ProductClass

    @property
    def gamma00(self):
        return self.gamma.b00

    @property
    def gamma20(self) -> DivisorClass:
        return DivisorClass(self.gamma.b20, self.gamma.lattice)

    @property
    def gamma02(self) -> DivisorClass:
        return DivisorClass(self.gamma.b02, self.gamma.lattice)

    @property
    def gamma22(self):
        return self.gamma.b22, self.gamma.iota

    def blocks(self) -> dict:
        return self.gamma.blocks()


def _tensor(x: DivisorClass, y: DivisorClass) -> tuple:
    return tuple(tuple(a * b for b in y.coords) for a in x.coords)


def expected_gamma22(surface: ReflexiveSurface) -> tuple[tuple, int]:
    """``(ell + 2H) x Hhat + H x ellhat - iota`` as (matrix, iota coefficient)."""
    m1 = _tensor(surface.ell + 2 * surface.H, surface.Hhat)
    m2 = _tensor(surface.H, surface.ellhat)
    return tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(m1, m2)), -1


@lru_cache(maxsize=64)
def ch_kernel_Q(surface: ReflexiveSurface) -> KernelReport:
    r"""
    Chern character of the normalized universal sheaf ``Q`` on ``X x Xhat``.

    From the exact sequence

        0 -> O(-ellhat - 2Hhat) -> Q(-Hhat, H) -> I_Gamma (ell + 2H) -> 0

    one gets ``ch(Q) = [ch O(-ellhat-2Hhat) + (1 - ch O_Gamma) ch O(ell+2H)]
    . ch O(Hhat) . ch O(-H)``, with pullbacks from the relevant factor.
    """
    L, H, ell = surface.lattice, surface.H, surface.ell
    Hh, lh = surface.Hhat, surface.ellhat
    one = ProductClass.unit(L)
    bracket = pullback_xhat(exp_class(-lh - 2 * Hh)) + cup(one - ch_graph(L), pullback_x(exp_class(ell + 2 * H)))
    gamma = cup(cup(bracket, pullback_xhat(exp_class(Hh))), pullback_x(exp_class(-H)))
    return KernelReport(gamma)


def grr_transform(surface: ReflexiveSurface, u: MukaiVector) -> MukaiVector:
    """
    Mukai vector of the transform computed by GRR.

    ``v(S(F)) = pi_hat_*(pi^*(v(F) sqrt td_X) . ch Q) . sqrt td_Xhat``.
    """
    L = surface.lattice
    gamma = ch_kernel_Q(surface).gamma
    rt = sqrt_td(L)
    integrand = cup(pullback_x(SurfaceClass.of(u).cup(rt)), gamma)
    return pushforward_xhat(integrand).cup(rt).to_mukai()


def grr_inverse_transform(surface: ReflexiveSurface, w: MukaiVector) -> MukaiVector:
    """
    Backward transform with kernel ``Q^*``:
    ``pi_*(pi_hat^*(w sqrt td_Xhat) . ch Q^*) . sqrt td_X``.
    """
    L = surface.lattice
    gamma = ch_kernel_Q(surface).gamma.dual()
    rt = sqrt_td(L)
    integrand = cup(pullback_xhat(SurfaceClass.of(w).cup(rt)), gamma)
    return pushforward_x(integrand).cup(rt).to_mukai()


def hhat_from_kernel(surface: ReflexiveSurface) -> DivisorClass:
    """``Hhat = -pi_hat_*(gamma^{2,2} . pi^* H)``, recomputed from the kernel."""
    gamma = ch_kernel_Q(surface).gamma
    g22 = ProductClass(surface.lattice, b22=gamma.b22, iota=gamma.iota)
    c = pushforward_xhat(cup(g22, pullback_x(SurfaceClass(0, surface.H.coords, 0, surface.lattice))))
    return DivisorClass(tuple(-int(x) for x in c.h2), surface.lattice)
