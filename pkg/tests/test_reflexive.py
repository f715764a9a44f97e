import itertools

import pytest
from hypothesis import given

from k3fm.lattice import LatticeMismatchError, MukaiVector, PicardLattice, SignatureError, intersect
from k3fm.reflexive import (
    NodalReport,
    NotReflexiveError,
    ReflexiveSurface,
    assumption_A3,
    certify_non_effective,
    check_A1,
    check_A2,
    extension_accounting,
    extension_vector,
    generic_surface,
    is_reflexive,
    line_bundle_chi,
    moduli_dim,
    nodal_classes,
    nodal_classes_box_scan,
    short_vectors,
)

from conftest import mukai_vectors

S = generic_surface()
L, H, ell = S.lattice, S.H, S.ell
ZERO = L.zero()


def brute_nodal(H, dmax, B):
    """Nodal classes in the box |x_i| <= B, independent of any derived bound."""
    lat = H.lattice
    out = []
    for x in itertools.product(range(-B, B + 1), repeat=lat.rank):
        D = lat.cls(x)
        if D.square() == -2 and 1 <= intersect(D, H) <= dmax:
            out.append(x)
    return sorted(out, key=lambda x: (intersect(lat.cls(x), H), x))


class TestIsReflexive:
    def test_generic(self):
        assert is_reflexive(L, H, ell)

    def test_scaled_ell(self):
        check = is_reflexive(L, H, L.cls(0, 2))
        assert not check
        assert any("-48" in f for f in check.failures)

    def test_h_squared_four(self):
        L4 = PicardLattice([[4, 0], [0, -12]])
        check = is_reflexive(L4, L4.cls(1, 0), L4.cls(0, 1))
        assert not check and "H^2 = 4" in check.failures[0]

    def test_rank_one(self):
        L1 = PicardLattice([[2]])
        check = is_reflexive(L1, L1.cls(1), L1.cls(0))
        assert not check and "rank 1" in check.failures[0]

    def test_mismatch(self):
        other = PicardLattice([[2, 0], [0, -12]])
        with pytest.raises(LatticeMismatchError):
            is_reflexive(L, other.cls(1, 0), ell)

    def test_constructor_validates(self):
        with pytest.raises(NotReflexiveError):
            ReflexiveSurface(L, H, L.cls(0, 2))


class TestDualSurface:
    def test_dual_classes(self):
        assert S.Hhat == 2 * ell + 5 * H
        assert S.ellhat == -5 * ell - 12 * H
        assert (S.Hhat.square(), intersect(S.Hhat, S.ellhat), S.ellhat.square()) == (2, 0, -12)

    def test_dual_of_dual(self, nodal_surface):
        for s in (S, nodal_surface):
            d = s.dual()
            assert d.dual().H == s.H and d.dual().ell == s.ell

    def test_rank_three(self, nodal_surface):
        Hh, lh = nodal_surface.Hhat, nodal_surface.ellhat
        assert (Hh.square(), intersect(Hh, lh), lh.square()) == (2, 0, -12)


class TestAssumptions:
    def test_A1(self):
        assert check_A1(MukaiVector(2, ell, -3), H)
        assert not check_A1(MukaiVector(2, ZERO, -4), H)
        v = MukaiVector(2, H, -3)
        assert v.c1.square() - 2 * 2 * (-3) == 14
        assert not check_A1(v, H)

    def test_A2(self):
        assert check_A2(MukaiVector(2, ell, -3), H)
        assert not check_A2(MukaiVector(1, ell, -3), H)
        assert not check_A2(MukaiVector(2, H, -3), H)

    @given(mukai_vectors(L, 30))
    def test_A1_sign_invariant(self, v):
        assert check_A1(v, H) == check_A1(-v, H)


class TestNumerics:
    def test_line_bundle_chi(self):
        E = ell + 2 * H
        assert E.square() == -4
        assert line_bundle_chi(E) == 0
        assert line_bundle_chi(ZERO) == 2
        assert line_bundle_chi(H) == 3

    def test_moduli_dim(self):
        assert moduli_dim(MukaiVector(2, ell, -3)) == 2
        assert moduli_dim(MukaiVector(1, ZERO, 1)) == 0
        for n in range(1, 8):
            assert moduli_dim(MukaiVector(1, ZERO, 1 - n)) == 2 * n

    @given(mukai_vectors(L))
    def test_moduli_dim_even(self, v):
        assert moduli_dim(v) % 2 == 0


class TestNodal:
    def test_generic_empty(self):
        rep = nodal_classes(S, 3)
        assert rep.classes == () and rep.exhaustive
        assert brute_nodal(H, 3, 12) == []

    def test_negative_pell_six_unsolvable(self):
        # a^2 - 6 b^2 = -1 has no solutions mod 3: a^2 = 2 (mod 3) is impossible
        assert all((a * a) % 3 != 2 for a in range(3))

    def test_fixture(self):
        Lf = PicardLattice([[2, 1], [1, -2]])
        Hf = Lf.cls(1, 0)
        rep = nodal_classes(Hf, 2)
        coords = [D.coords for D in rep.classes]
        assert (0, 1) in coords
        assert coords == brute_nodal(Hf, 2, 10) == [(0, 1), (1, -1)]

    def test_dmax_zero(self):
        with pytest.raises(ValueError):
            nodal_classes(S, 0)

    def test_non_positive_polarization(self):
        Lf = PicardLattice([[2, 1], [1, -2]])
        with pytest.raises(SignatureError):
            nodal_classes(Lf.cls(0, 1), 3)

    @pytest.mark.parametrize(
        "gram,Hc,dmax",
        [
            ([[2, 0, 1], [0, -12, 0], [1, 0, -2]], (1, 0, 0), 4),
            ([[2, 1], [1, -2]], (1, 0), 6),
            ([[2, 0, 0], [0, -2, 1], [0, 1, -2]], (1, 0, 0), 3),
            ([[4, 0, 0], [0, -2, 0], [0, 0, -6]], (1, 0, 0), 5),
            ([[2, 3], [3, -2]], (1, 0), 5),
        ],
    )
    def test_matches_brute_force(self, gram, Hc, dmax):
        lat = PicardLattice(gram)
        Hx = lat.cls(Hc)
        rep = nodal_classes(Hx, dmax)
        got = [D.coords for D in rep.classes]
        assert got == brute_nodal(Hx, dmax, 9)
        assert got == [D.coords for D in nodal_classes_box_scan(Hx, dmax, rep.box)]
        for D in rep.classes:
            assert D.square() == -2 and 1 <= intersect(D, Hx) <= dmax

    def test_short_vectors_brute_force(self):
        P = [[4, 1, 0], [1, 3, 1], [0, 1, 5]]
        got = sorted(short_vectors(P, 20))
        want = sorted(
            x for x in itertools.product(range(-5, 6), repeat=3)
            if sum(x[i] * P[i][j] * x[j] for i in range(3) for j in range(3)) <= 20
        )
        assert got == want


class TestNonEffectivity:
    def test_generic_holds(self):
        cert = certify_non_effective(S, nodal_classes(S, 3))
        assert cert.holds and cert.blocking is None
        assert (cert.E_squared, cert.chi_E) == (-4, 0)
        assert assumption_A3(S, cert) == "granted"

    def test_blocked(self, nodal_surface):
        cert = certify_non_effective(nodal_surface, nodal_classes(nodal_surface, 3))
        assert not cert.holds
        assert cert.blocking.square() == -2 and intersect(cert.blocking, nodal_surface.H) == 1
        assert assumption_A3(nodal_surface, cert) != "granted"

    def test_requires_degree_three(self):
        with pytest.raises(ValueError):
            certify_non_effective(S, nodal_classes(S, 1))

    def test_requires_exhaustive(self):
        rep = NodalReport((), 3, False, 0, ())
        with pytest.raises(ValueError):
            certify_non_effective(S, rep)


class TestExtension:
    def test_vector(self):
        assert extension_vector(S) == MukaiVector(2, ell, -3)

    def test_intermediates(self):
        acc = extension_accounting(S)
        assert acc.v_Ip == MukaiVector(1, ZERO, 0)
        assert acc.v_Ip_E == MukaiVector(1, ell + 2 * H, -2)
        assert acc.v_EH == MukaiVector(2, ell + 2 * H, -1)
        assert acc.chi_EH == 1

    def test_rank_three(self, nodal_surface):
        assert extension_vector(nodal_surface) == nodal_surface.v
