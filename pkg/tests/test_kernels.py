import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gamma as Gamma

from fracgreen.errors import DomainError
from fracgreen.kernels import (
    KernelParams,
    KernelQuery,
    _fourier,
    _subordination,
    eval_G,
    eval_S,
    eval_grad,
    l1_norm,
    mwright,
    radial_integral,
)
from fracgreen.stable import OneSidedParams, SymStableParams, g_sym, w_onesided

P_STD = KernelParams(beta=0.5, alpha=1.5, a=1.0, dim=1)


class TestMassIdentities:
    @pytest.mark.parametrize("beta", [0.3, 0.5, 0.8])
    @pytest.mark.parametrize("alpha", [1.2, 1.5, 2.0])
    @pytest.mark.parametrize("t", [0.1, 1.0])
    def test_mass_S_and_G(self, beta, alpha, t):
        p = KernelParams(beta=beta, alpha=alpha, a=1.0, dim=1)
        mS = radial_integral(p, t, "S", absolute=False)
        mG = radial_integral(p, t, "G", absolute=False)
        assert mS == pytest.approx(1.0, rel=1e-6)
        assert mG == pytest.approx(t ** (beta - 1.0) / Gamma(beta), rel=1e-6)


class TestMutualOracle:
    YS = np.array([0.0, 0.3, 1.0, 3.0])

    @pytest.mark.parametrize("which", ["S", "G", "gradS", "gradG"])
    def test_fourier_vs_subordination_standard_point(self, which):
        a = _fourier(P_STD, 0.5, self.YS, which, 1e-9)
        b = _subordination(P_STD, 0.5, self.YS, which, 1e-9)
        scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-12)
        assert np.max(np.abs(a - b) / scale) <= 1e-5

    @pytest.mark.parametrize("beta,alpha", [(0.3, 1.2), (0.8, 2.0), (0.3, 2.0),
                                            (0.8, 1.2)])
    @pytest.mark.parametrize("t", [0.1, 1.0])
    def test_fourier_vs_subordination_corners(self, beta, alpha, t):
        p = KernelParams(beta=beta, alpha=alpha, a=1.0, dim=1)
        for which in ("S", "G", "gradS", "gradG"):
            a = _fourier(p, t, self.YS, which, 1e-9)
            b = _subordination(p, t, self.YS, which, 1e-9)
            scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-12)
            assert np.max(np.abs(a - b) / scale) <= 1e-5, (which, beta, alpha, t)

    def test_d2_mutual(self):
        p = KernelParams(beta=0.5, alpha=1.5, a=1.0, dim=2)
        ys = np.array([0.4, 1.0, 2.5])
        a = _fourier(p, 0.5, ys, "G", 1e-9)
        b = _subordination(p, 0.5, ys, "G", 1e-9)
        scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-12)
        assert np.max(np.abs(a - b) / scale) <= 1e-4


class TestBetaToOneLimit:
    def test_S_approaches_heat_kernel(self):
        # beta -> 1: S must collapse onto the Gaussian evolution kernel
        p = KernelParams(beta=0.999, alpha=2.0, a=1.0, dim=1)
        t = 0.7
        gs = SymStableParams(alpha=2.0, sigma=t, a=1.0, dim=1)
        ys = np.linspace(0.0, 4.0, 9)
        vals = _fourier(p, t, ys, "S", 1e-9)
        ref = np.array([g_sym(gs, y) for y in ys])
        assert np.max(np.abs(vals - ref)) <= 1e-2

    def test_G_approaches_S(self):
        p = KernelParams(beta=0.999, alpha=2.0, a=1.0, dim=1)
        t = 0.7
        ys = np.linspace(0.0, 4.0, 9)
        vs = _fourier(p, t, ys, "S", 1e-9)
        vg = _fourier(p, t, ys, "G", 1e-9)
        assert np.max(np.abs(vs - vg)) <= 2e-2


class TestAlpha2ClosedForm:
    @staticmethod
    def _mixture_reference(beta, a, t, y, which):
        """Gaussian-mixture reference with the raw one-sided weight."""
        params = OneSidedParams(beta)
        tb = t ** beta

        def rho_w(s):
            return s ** (-1.0 - 1.0 / beta) * w_onesided(params, s ** (-1.0 / beta)) / beta

        if which == "S":
            f = lambda s: rho_w(s) * (4 * math.pi * a * tb * s) ** -0.5 * math.exp(
                -y * y / (4 * a * tb * s))
            val, _ = quad(f, 1e-12, 60.0, limit=400, epsabs=1e-14)
            return val
        f = lambda s: beta * s * rho_w(s) * (4 * math.pi * a * tb * s) ** -0.5 * math.exp(
            -y * y / (4 * a * tb * s))
        val, _ = quad(f, 1e-12, 60.0, limit=400, epsabs=1e-14)
        return t ** (beta - 1.0) * val

    def test_twenty_points(self):
        p = KernelParams(beta=0.6, alpha=2.0, a=1.3, dim=1)
        pts = [(t, y) for t in (0.1, 0.35, 0.8, 1.5, 2.0) for y in (0.0, 0.4, 1.1, 2.7)]
        assert len(pts) == 20
        for t, y in pts:
            ref_s = self._mixture_reference(0.6, 1.3, t, y, "S")
            ref_g = self._mixture_reference(0.6, 1.3, t, y, "G")
            assert eval_S(p, t, y, method="subordination", tol=1e-11) == pytest.approx(
                ref_s, rel=1e-8)
            assert eval_G(p, t, y, method="subordination", tol=1e-11) == pytest.approx(
                ref_g, rel=1e-8)


class TestGradients:
    def test_zero_at_origin(self):
        assert np.all(eval_grad(P_STD, 0.25, 0.0, "S") == 0.0)
        p2 = KernelParams(beta=0.5, alpha=1.5, a=1.0, dim=2)
        assert np.all(eval_grad(p2, 0.25, (0.0, 0.0), "G") == 0.0)

    def test_finite_difference_cross_check(self):
        t, y, h = 0.25, 0.5, 1e-4
        grad = eval_grad(P_STD, t, y, "S", method="fourier", tol=1e-10)[0]
        fd = (eval_S(P_STD, t, y + h, method="fourier", tol=1e-10)
              - eval_S(P_STD, t, y - h, method="fourier", tol=1e-10)) / (2 * h)
        assert grad == pytest.approx(fd, abs=1e-5)

    def test_finite_difference_G(self):
        t, y, h = 0.4, 0.8, 1e-4
        grad = eval_grad(P_STD, t, y, "G", method="subordination", tol=1e-10)[0]
        fd = (eval_G(P_STD, t, y + h, method="subordination", tol=1e-10)
              - eval_G(P_STD, t, y - h, method="subordination", tol=1e-10)) / (2 * h)
        assert grad == pytest.approx(fd, abs=1e-5)

    def test_antisymmetry(self, rng):
        for y in rng.uniform(0.1, 4.0, size=10):
            gp = eval_grad(P_STD, 0.5, float(y), "S")[0]
            gm = eval_grad(P_STD, 0.5, -float(y), "S")[0]
            assert gp == pytest.approx(-gm, rel=1e-10)


class TestL1Norms:
    @pytest.mark.parametrize("beta,alpha", [(0.3, 1.5), (0.5, 1.2), (0.8, 2.0)])
    def test_G_l1_dominates_mass(self, beta, alpha):
        p = KernelParams(beta=beta, alpha=alpha, a=1.0, dim=1)
        for t in (0.1, 1.0):
            assert l1_norm(p, t, "G") >= t ** (beta - 1.0) / Gamma(beta) * (1 - 1e-9)

    def test_S_l1_between_one_and_three_halves(self):
        for t in (0.1, 1.0):
            v = l1_norm(P_STD, t, "S")
            assert 1.0 - 1e-9 <= v <= 1.5

    def test_S_negative_mass_is_measured(self):
        # alpha < 2 allows small negative lobes; the excess of the L1 norm
        # over the (signed) unit mass quantifies them
        for t in (0.1, 1.0):
            excess = l1_norm(P_STD, t, "S") - radial_integral(P_STD, t, "S", absolute=False)
            assert 0.0 <= excess <= 0.5

    def test_alpha2_l1_finite(self):
        p = KernelParams(beta=0.5, alpha=2.0, a=1.0, dim=1)
        assert np.isfinite(l1_norm(p, 1.0, "G"))

    def test_d2_mass(self):
        p = KernelParams(beta=0.5, alpha=1.5, a=1.0, dim=2)
        assert radial_integral(p, 0.5, "S", absolute=False) == pytest.approx(1.0, rel=1e-5)


class TestTailLaw:
    def test_G_tail_exponent(self):
        # log|G| vs log|y| slope -> -(d + alpha) in the far field
        t = 0.5
        scale = t ** (P_STD.beta / P_STD.alpha)
        ys = np.geomspace(10.0, 100.0, 7) * scale
        vals = np.abs(_subordination(P_STD, t, ys, "G", 1e-10))
        slope = np.polyfit(np.log(ys), np.log(vals), 1)[0]
        assert slope == pytest.approx(-(1 + P_STD.alpha), abs=0.1)


class TestSubordinationJacobian:
    def test_raw_x_space_form_matches(self):
        # unsubstituted form: t^{b-1} Int x^{-1/b} w(x^{-1/b}) g(-y; alpha, t^b x) dx
        beta, alpha, a, t, y = 0.5, 1.5, 1.0, 0.7, 0.9
        params = OneSidedParams(beta)

        def raw(x):
            z = x ** (-1.0 / beta)
            gs = SymStableParams(alpha=alpha, sigma=t ** beta * x, a=a, dim=1)
            return z * w_onesided(params, z) * g_sym(gs, -y)

        val, _ = quad(raw, 1e-9, 2000.0, limit=500)
        ref = t ** (beta - 1.0) * val
        got = eval_G(P_STD, t, y, method="subordination", tol=1e-10)
        assert got == pytest.approx(ref, rel=1e-5)


class TestValidation:
    def test_params(self):
        with pytest.raises(DomainError):
            KernelParams(beta=1.0, alpha=1.5)
        with pytest.raises(DomainError):
            KernelParams(beta=0.5, alpha=1.0)
        with pytest.raises(DomainError):
            KernelParams(beta=0.5, alpha=2.5)
        with pytest.raises(DomainError):
            KernelParams(beta=0.5, alpha=1.5, a=0.0)

    def test_query(self):
        with pytest.raises(DomainError):
            KernelQuery(which="Q", t=1.0, y=0.0)
        with pytest.raises(DomainError):
            KernelQuery(which="S", t=0.0, y=0.0)
        with pytest.raises(DomainError):
            KernelQuery(which="S", t=1.0, y=0.0, method="magic")
        q = KernelQuery(which="S", t=1.0, y=0.0)
        assert q.tolerance == 1e-8

    def test_t_must_be_positive(self):
        with pytest.raises(DomainError):
            eval_S(P_STD, 0.0, 1.0)
        with pytest.raises(DomainError):
            eval_S(P_STD, -1.0, 1.0)

    def test_d2_S_origin_diverges(self):
        p = KernelParams(beta=0.5, alpha=1.5, a=1.0, dim=2)
        with pytest.raises(DomainError):
            eval_S(p, 1.0, (0.0, 0.0), method="subordination")


class TestMWright:
    def test_closed_form_half(self):
        s = np.linspace(0.0, 5.5, 23)
        got = mwright(0.5, s)
        ref = np.exp(-s * s / 4.0) / math.sqrt(math.pi)
        assert np.max(np.abs(got - ref) / ref) <= 1e-9

    @pytest.mark.parametrize("beta", [0.3, 0.5, 0.8])
    def test_moments(self, beta):
        for k in (0, 1, 2):
            val, _ = quad(lambda s: s ** k * mwright(beta, s)[0], 0.0, 200.0,
                          limit=400)
            exact = math.gamma(k + 1.0) / Gamma(1.0 + beta * k)
            assert val == pytest.approx(exact, rel=1e-7)

    def test_matches_w_representation(self):
        # rho(s) = (1/b) s^{-1-1/b} w(s^{-1/b}): independent of the series
        beta = 0.4
        params = OneSidedParams(beta)
        for s in (0.3, 0.9, 1.7, 3.0):
            direct = s ** (-1.0 - 1.0 / beta) * w_onesided(params, s ** (-1.0 / beta)) / beta
            assert mwright(beta, s)[0] == pytest.approx(direct, rel=1e-7)
