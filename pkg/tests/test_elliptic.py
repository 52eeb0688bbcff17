"""Elliptic kernel tests.

Frozen reference values were produced by adaptive quadrature of the
defining integrals (scipy.integrate.quad, epsrel 1e-14):

    K(0.5)        = 1.6857503548125963
    K(0.99999)    = 6.796214984435867
    E(0.5)        = 1.4674622093394272
    F(pi/4, 0.5)  = 0.8043661012320654
    dK/dk(0.5)    = 0.5417318486132803   (centered difference of quad K)
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doublewell import elliptic as el
from doublewell.errors import DomainError

MODULI = st.floats(min_value=0.0, max_value=0.95)
ARGS = st.floats(min_value=-40.0, max_value=40.0, allow_nan=False)


class TestCompleteK:
    def test_k_zero_exact(self):
        assert el.complete_K(0.0) == pytest.approx(math.pi / 2, abs=1e-14)

    def test_quadrature_value(self):
        assert el.complete_K(0.5) == pytest.approx(1.6857503548125963, rel=1e-13)

    def test_near_separatrix(self):
        val = el.complete_K(0.99999)
        assert val > 6.0
        assert val == pytest.approx(6.796214984435867, rel=1e-12)

    def test_strictly_increasing(self):
        ks = np.linspace(0.0, 0.999, 200)
        vals = [el.complete_K(k) for k in ks]
        assert np.all(np.diff(vals) > 0)

    @pytest.mark.parametrize("k", [1.0, 1.5, -0.1])
    def test_domain(self, k):
        with pytest.raises(DomainError):
            el.complete_K(k)


class TestCompleteE:
    def test_endpoints(self):
        assert el.complete_E(0.0) == pytest.approx(math.pi / 2, abs=1e-14)
        assert el.complete_E(1.0) == 1.0

    def test_quadrature_value(self):
        assert el.complete_E(0.5) == pytest.approx(1.4674622093394272, rel=1e-13)

    @pytest.mark.parametrize("k", [1.0000001, -1e-9])
    def test_domain(self, k):
        with pytest.raises(DomainError):
            el.complete_E(k)


class TestDKdk:
    def test_fd_oracle(self):
        assert el.dK_dk(0.5) == pytest.approx(0.5417318486132803, rel=1e-12)

    def test_matches_centered_difference(self):
        h = 1e-6
        for k in (0.2, 0.5, 0.8):
            fd = (el.complete_K(k + h) - el.complete_K(k - h)) / (2 * h)
            assert el.dK_dk(k) == pytest.approx(fd, rel=1e-6)

    def test_monotone_small_k(self):
        assert el.dK_dk(0.2) > el.dK_dk(0.1) > 0

    def test_small_k_asymptote(self):
        k = 1e-3
        assert el.dK_dk(k) == pytest.approx(math.pi * k / 4, rel=0.05)

    @pytest.mark.parametrize("k", [0.0, 1.0])
    def test_singular_endpoints(self, k):
        with pytest.raises(DomainError):
            el.dK_dk(k)


class TestIncompleteF:
    def test_zero_modulus_is_identity(self):
        for phi in (-2.0, 0.3, 1.5, 4.0):
            assert el.incomplete_F(phi, 0.0) == pytest.approx(phi, abs=1e-14)

    @given(k=MODULI)
    @settings(max_examples=40)
    def test_quarter_period_is_K(self, k):
        assert el.incomplete_F(math.pi / 2, k) == pytest.approx(
            el.complete_K(k), rel=1e-13, abs=1e-13
        )

    def test_quadrature_value(self):
        assert el.incomplete_F(math.pi / 4, 0.5) == pytest.approx(
            0.8043661012320654, rel=1e-12
        )

    def test_rejects_bad_modulus(self):
        with pytest.raises(DomainError):
            el.incomplete_F(2.0, 1.0)


class TestJacobi:
    def test_origin(self):
        for k in (0.0, 0.5, 0.9):
            sn, cn, dn = el.jacobi(0.0, k)
            assert (sn, cn, dn) == (0.0, 1.0, 1.0)

    @given(z=ARGS)
    @settings(max_examples=60)
    def test_degenerate_modulus(self, z):
        sn, cn, dn = el.jacobi(z, 0.0)
        assert sn == pytest.approx(math.sin(z), abs=1e-12)
        assert cn == pytest.approx(math.cos(z), abs=1e-12)
        assert dn == pytest.approx(1.0, abs=1e-14)

    @given(z=ARGS, k=MODULI)
    @settings(max_examples=200)
    def test_identities(self, z, k):
        sn, cn, dn = el.jacobi(z, k)
        assert abs(sn * sn + cn * cn - 1.0) < 1e-12
        assert abs(dn * dn + (k * sn) ** 2 - 1.0) < 1e-12

    @given(k=MODULI)
    @settings(max_examples=40)
    def test_quarter_period_zero_of_cn(self, k):
        K = el.complete_K(k)
        assert abs(el.jacobi(K, k).cn) < 1e-10

    @given(z=ARGS, k=MODULI)
    @settings(max_examples=100)
    def test_periodicity(self, z, k):
        K = el.complete_K(k)
        a = el.jacobi(z, k)
        b = el.jacobi(z + 4 * K, k)
        assert abs(a.sn - b.sn) < 1e-10
        assert abs(a.cn - b.cn) < 1e-10

    @given(phi=st.floats(min_value=-1.4, max_value=1.4), k=MODULI)
    @settings(max_examples=100)
    def test_inversion_of_incomplete_F(self, phi, k):
        z = el.incomplete_F(phi, k)
        assert el.jacobi(z, k).sn == pytest.approx(math.sin(phi), abs=1e-10)

    def test_derivative_of_sn(self):
        # d/dz sn = cn * dn, centered differences on a (z, k) grid
        h = 1e-6
        zg = np.linspace(-8.0, 8.0, 33)
        for k in (0.1, 0.5, 0.875):
            plus = el.jacobi(zg + h, k).sn
            minus = el.jacobi(zg - h, k).sn
            _, cn, dn = el.jacobi(zg, k)
            assert np.max(np.abs((plus - minus) / (2 * h) - cn * dn)) < 1e-8

    def test_array_evaluation(self):
        z = np.linspace(-5, 5, 11)
        sn, cn, dn = el.jacobi(z, 0.6)
        assert sn.shape == z.shape
        assert np.max(np.abs(sn**2 + cn**2 - 1)) < 1e-12


def test_identity_grid_10k():
    # 1e4-point (z, k) grid sweep of both identities
    zs = np.linspace(-25.0, 25.0, 100)
    ks = np.linspace(0.0, 0.97, 100)
    worst = 0.0
    for k in ks:
        sn, cn, dn = el.jacobi(zs, k)
        worst = max(
            worst,
            np.max(np.abs(sn**2 + cn**2 - 1.0)),
            np.max(np.abs(dn**2 + (k * sn) ** 2 - 1.0)),
        )
    assert worst < 1e-12
