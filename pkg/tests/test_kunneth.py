import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3fm.kunneth import (
    ProductClass,
    SurfaceClass,
    UnsupportedProductError,
    ch_graph,
    ch_kernel_Q,
    cup,
    exp_class,
    expected_gamma22,
    grr_inverse_transform,
    grr_transform,
    hhat_from_kernel,
    pullback_x,
    pullback_xhat,
    pushforward_x,
    pushforward_xhat,
    sqrt_td,
)
from k3fm.lattice import MukaiVector
from k3fm.reflexive import generic_surface
from k3fm.transform import fm_vector, inverse_fm_vector

S = generic_surface()
L, H, ell, Hh, lh = S.lattice, S.H, S.ell, S.Hhat, S.ellhat
ZERO = L.zero()


def SC(h0, c, h4):
    return SurfaceClass(h0, tuple(c), h4, L)


def product_classes(with_iota=False):
    small = st.integers(-4, 4)
    vec = st.tuples(small, small)
    return st.builds(
        lambda *a: ProductClass(L, *a),
        small, vec, vec, st.tuples(vec, vec), small if with_iota else st.just(0),
        small, small, vec, vec, small,
    )


class TestPullPush:
    def test_pullbacks(self):
        a = pullback_x(MukaiVector(1, ZERO, 1))
        assert a.b00 == 1 and a.b40 == 1 and a.b04 == 0
        assert pullback_x(SC(0, H.coords, 0)).b20 == H.coords
        assert pullback_xhat(SC(0, Hh.coords, 0)).b02 == Hh.coords

    def test_pushforward(self):
        assert pushforward_xhat(pullback_x(SC(0, (0, 0), 1))) == SC(1, (0, 0), 0)
        iota = ProductClass.iota_class(L)
        assert pushforward_xhat(cup(iota, pullback_x(SC(0, H.coords, 0)))) == SC(0, H.coords, 0)
        assert pushforward_xhat(pullback_xhat(SC(3, (1, 2), 5))) == SC(0, (0, 0), 0)

    @settings(max_examples=60, deadline=None)
    @given(product_classes(with_iota=True), st.integers(-3, 3), st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.integers(-3, 3))
    def test_projection_formula(self, a, b0, b2, b4):
        b = SC(b0, b2, b4)
        assert pushforward_xhat(cup(a, pullback_xhat(b))) == pushforward_xhat(a).cup(b)
        assert pushforward_x(cup(a, pullback_x(b))) == pushforward_x(a).cup(b)


class TestCup:
    def test_iota_rules(self):
        iota = ProductClass.iota_class(L)
        assert cup(iota, pullback_x(SC(0, H.coords, 0))).b42 == H.coords
        assert cup(iota, pullback_xhat(SC(0, Hh.coords, 0))).b24 == Hh.coords
        assert cup(iota, pullback_x(SC(0, (0, 0), 1))) == ProductClass.zero(L)
        assert cup(iota, pullback_xhat(SC(0, (0, 0), 1))) == ProductClass.zero(L)

    def test_pure_tensor(self):
        c = cup(pullback_x(SC(0, H.coords, 0)), pullback_xhat(SC(0, Hh.coords, 0)))
        assert c.b22 == ((5, 2), (0, 0))

    def test_point_squared(self):
        p = pullback_x(SC(0, (0, 0), 1))
        assert cup(p, p) == ProductClass.zero(L)

    def test_iota_squared_unsupported(self):
        iota = ProductClass.iota_class(L)
        with pytest.raises(UnsupportedProductError):
            cup(iota, iota)

    def test_iota_against_tensor(self):
        # (a x b) . iota = (a . b) [pt x pt]
        iota = ProductClass.iota_class(L)
        t = cup(pullback_x(SC(0, (1, 1), 0)), pullback_xhat(SC(0, (2, -1), 0)))
        assert cup(t, iota).b44 == L.cls(1, 1).dot(L.cls(2, -1))
        assert cup(cup(pullback_x(SC(0, (1, 1), 0)), iota), pullback_xhat(SC(0, (2, -1), 0))).b44 == cup(t, iota).b44

    @settings(max_examples=80, deadline=None)
    @given(product_classes(True), product_classes())
    def test_commutative(self, a, b):
        assert cup(a, b) == cup(b, a)

    @settings(max_examples=80, deadline=None)
    @given(product_classes(True), product_classes(), product_classes())
    def test_associative(self, a, b, c):
        assert cup(cup(a, b), c) == cup(a, cup(b, c))
        assert cup(cup(b, a), c) == cup(b, cup(a, c))

    def test_sqrt_td(self):
        rt = sqrt_td(L)
        assert rt.cup(rt) == SC(1, (0, 0), 2)
        assert rt.to_mukai() == MukaiVector(1, ZERO, 1)


class TestKernel:
    def test_graph(self):
        g = ch_graph(L)
        assert (g.iota, g.b44, g.b04, g.b40) == (1, -2, 1, 1)

    def test_blocks(self):
        k = ch_kernel_Q(S)
        assert k.gamma00 == 2
        assert k.gamma20 == ell
        assert k.gamma02 == -lh
        assert k.gamma22 == expected_gamma22(S)
        assert k.gamma22[1] == -1

    def test_hhat_recovered(self):
        assert hhat_from_kernel(S) == Hh

    def test_fibre_over_point(self):
        # ch(Q) restricted to {p} x Xhat, times sqrt td, is v(Q_p) = (2, -ellhat, -3)
        k = ch_kernel_Q(S).gamma
        fibre = SC(k.b00, k.b02, k.b04).cup(sqrt_td(L))
        assert fibre.to_mukai() == MukaiVector(2, -lh, -3)


class TestGRR:
    @pytest.mark.parametrize(
        "u,want",
        [
            (MukaiVector(1, ZERO, 1), MukaiVector(-1, ZERO, -1)),
            (MukaiVector(1, H, 2), MukaiVector(1, -lh - Hh, -4)),
            (MukaiVector(0, ZERO, 1), MukaiVector(2, -lh, -3)),
        ],
    )
    def test_examples(self, u, want):
        assert grr_transform(S, u) == want

    def test_box_agreement(self):
        for r, a, b, s in itertools.product(range(-2, 3), repeat=4):
            u = MukaiVector(r, L.cls(a, b), s)
            assert grr_transform(S, u) == fm_vector(S, u)

    def test_backward_oracle_matches_closed_form_inverse(self):
        rng = random.Random(11)
        for _ in range(300):
            r, a, b, s = (rng.randint(-50, 50) for _ in range(4))
            w = MukaiVector(r, L.cls(a, b), s)
            assert grr_inverse_transform(S, w) == inverse_fm_vector(S, w)
            assert grr_inverse_transform(S, grr_transform(S, w)) == w

    def test_rank_three(self, nodal_surface):
        Ln = nodal_surface.lattice
        rng = random.Random(5)
        for _ in range(200):
            u = MukaiVector(rng.randint(-9, 9), Ln.cls(*(rng.randint(-9, 9) for _ in range(3))), rng.randint(-9, 9))
            assert grr_transform(nodal_surface, u) == fm_vector(nodal_surface, u)
            assert grr_inverse_transform(nodal_surface, u) == inverse_fm_vector(nodal_surface, u)

    def test_exp_class(self):
        c = exp_class(L.cls(1, 1))
        assert c.h4 == -5
