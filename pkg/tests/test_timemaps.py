import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.special import ellipkinc, ellipkm1

from twistmap.quadrature import DEFAULT_CONFIG, DomainError
from twistmap.timemaps import (
    SQRT2,
    CellParams,
    OrbitParam,
    Regime,
    alpha_of_beta,
    beta_of_alpha,
    d_quarter_period,
    d_time_to_line_dalpha,
    quarter_period,
    quarter_period_mderiv,
    time_above,
    time_to_line,
    time_to_line_mderiv,
)

PI = math.pi
CAP = DEFAULT_CONFIG.alpha_cap

# reference values from the raw-integrand quadrature oracle (frozen)
T_PI4 = 1.3110287771460598
T_PI6 = 1.192005507275615
T1_PI4_PI6 = 0.5840828416771516
T1_PI3_PI6 = 0.45691259827890435
T2_2_PI4 = 0.4130089381246226
T2_SEP_PI4 = 0.6232252401402304


def central(f, x, h=1e-5):
    return (f(x + h) - f(x - h)) / (2 * h)


class TestCellParams:
    def test_flags(self):
        c = CellParams(0.3, 0.5)
        assert c.ordering == -1 and c.canonical and not c.symmetric
        assert (c.phi_min, c.phi_max) == (0.3, 0.5)
        m = CellParams(0.5, 0.3)
        assert m.ordering == 1 and not m.canonical
        s = CellParams(0.4, 0.4)
        assert s.ordering == 0 and s.symmetric and s.canonical

    @pytest.mark.parametrize("phi0,phi1", [(0.0, 0.3), (0.3, PI / 2), (-0.1, 0.2), (0.2, 2.0)])
    def test_rejects_out_of_range(self, phi0, phi1):
        with pytest.raises(DomainError):
            CellParams(phi0, phi1)


class TestOrbitParam:
    def test_closed_energy(self):
        p = OrbitParam.closed(PI / 6)
        assert p.regime is Regime.CLOSED
        assert p.energy == pytest.approx(-0.5)
        assert -1 < p.energy < 1

    def test_open_energy(self):
        p = OrbitParam.open(2.0)
        assert p.energy == 3.0
        assert p.modulus == 1.0

    def test_from_energy_roundtrip(self):
        for e in (-0.9, -0.1, 0.0, 0.5, 0.999):
            p = OrbitParam.from_energy(e)
            assert p.is_closed
            assert p.energy == pytest.approx(e, abs=1e-14)
        p = OrbitParam.from_energy(1.0)
        assert not p.is_closed and p.value == pytest.approx(SQRT2)
        with pytest.raises(DomainError):
            OrbitParam.from_energy(-1.0)

    def test_invalid(self):
        with pytest.raises(DomainError):
            OrbitParam.closed(PI / 2)
        with pytest.raises(DomainError):
            OrbitParam.open(1.0)
        with pytest.raises(DomainError):
            OrbitParam.open(2.0).alpha

    def test_gap_is_y_squared(self):
        p = OrbitParam.closed(1.0)
        for phi in (0.2, 0.7, 1.0):
            assert p.gap(phi) == pytest.approx(p.energy + math.cos(2 * phi), abs=1e-15)
        q = OrbitParam.open(2.0)
        assert q.gap(PI / 6) == pytest.approx(3.5)


class TestLevelSets:
    def test_beta_of_alpha(self):
        assert beta_of_alpha(PI / 6) == pytest.approx(SQRT2 / 2)
        assert beta_of_alpha(PI / 2 - 1e-9) == pytest.approx(SQRT2)

    @pytest.mark.parametrize("a", [0.3, 0.7, 1.2])
    def test_roundtrip(self, a):
        assert abs(alpha_of_beta(beta_of_alpha(a)) - a) < 1e-12

    def test_alpha_of_beta(self):
        assert alpha_of_beta(1.0) == pytest.approx(PI / 4, abs=1e-15)
        assert abs(alpha_of_beta(SQRT2 * math.sin(0.2)) - 0.2) < 1e-12
        assert alpha_of_beta(SQRT2 * (1 - 1e-12)) > 1.5

    @pytest.mark.parametrize("b", [0.0, -1.0, SQRT2, 2.0])
    def test_alpha_of_beta_domain(self, b):
        with pytest.raises(DomainError):
            alpha_of_beta(b)

    @pytest.mark.parametrize("a", [0.0, PI / 2, 2.0])
    def test_beta_of_alpha_domain(self, a):
        with pytest.raises(DomainError):
            beta_of_alpha(a)


class TestQuarterPeriod:
    def test_reference_values(self):
        assert_allclose(quarter_period(PI / 4), T_PI4, rtol=1e-13)
        assert_allclose(quarter_period(PI / 6), T_PI6, rtol=1e-13)
        # loose values quoted for the problem
        assert abs(quarter_period(PI / 4) - 1.31103) < 1e-3
        assert abs(quarter_period(PI / 6) - 1.19203) < 1e-3

    def test_complete_elliptic_cross_check(self):
        for a in (1e-4, 0.3, 0.9, 1.4, 1.57):
            # K(m) through the complementary parameter keeps digits near m = 1
            assert_allclose(quarter_period(a), ellipkm1(math.cos(a) ** 2) / SQRT2, rtol=1e-13)

    def test_small_amplitude_limit(self):
        assert abs(quarter_period(1e-6) - PI / (2 * SQRT2)) < 1e-5
        assert quarter_period(1e-9) == pytest.approx(PI / (2 * SQRT2), abs=1e-12)

    def test_diverges_toward_separatrix(self):
        assert quarter_period(PI / 2 - 1e-6) > 5
        assert quarter_period(CAP) > quarter_period(PI / 2 - 1e-6)

    @pytest.mark.parametrize("a", [0.0, -0.1, CAP + 1e-10, PI / 2])
    def test_domain(self, a):
        with pytest.raises(DomainError):
            quarter_period(a)


class TestTimeToLine:
    def test_reference(self):
        assert_allclose(time_to_line(PI / 4, PI / 6), T1_PI4_PI6, rtol=1e-13)
        assert_allclose(time_to_line(PI / 3, PI / 6), T1_PI3_PI6, rtol=1e-13)
        assert abs(time_to_line(PI / 4, PI / 6) - 0.5834) < 1e-3

    def test_coincident_arguments(self):
        assert_allclose(time_to_line(PI / 4, PI / 4), quarter_period(PI / 4), rtol=1e-9)

    def test_continuous_at_turning_point(self):
        phi = PI / 4
        for d in (1e-8, 1e-11, 1e-13):
            assert abs(time_to_line(phi + d, phi) - quarter_period(phi)) < 10 * math.sqrt(d)

    def test_incomplete_elliptic_cross_check(self):
        for a, phi in ((0.5, 0.2), (1.2, 1.0), (1.5, 0.3)):
            m = math.sin(a) ** 2
            theta = math.asin(math.sin(phi) / math.sin(a))
            assert_allclose(time_to_line(a, phi), ellipkinc(theta, m) / SQRT2, rtol=1e-12)

    def test_small_phi(self):
        assert time_to_line(1.0, 1e-9) == pytest.approx(1e-9 / math.sqrt(1 - math.cos(2.0)), rel=1e-6)

    def test_domain(self):
        with pytest.raises(DomainError):
            time_to_line(0.5, 0.6)
        with pytest.raises(DomainError):
            time_to_line(0.5, 0.0)


class TestTimeAbove:
    def test_separatrix_closed_form(self):
        closed = math.log(math.tan(3 * PI / 8)) / SQRT2
        assert_allclose(time_above(SQRT2, PI / 4), closed, rtol=1e-13)
        assert_allclose(closed, T2_SEP_PI4, rtol=1e-14)

    def test_reference(self):
        assert_allclose(time_above(2.0, PI / 4), T2_2_PI4, rtol=1e-13)

    def test_limits(self):
        assert time_above(2.0, 1e-10) == pytest.approx(1e-10 / 2.0, rel=1e-6)
        b = 1e6
        assert b * time_above(b, 0.7) == pytest.approx(0.7, rel=1e-9)
        assert math.isinf(time_above(SQRT2, PI / 2))

    def test_continuity_across_separatrix(self):
        phi = 0.6
        gaps = []
        for eps in (1e-4, 1e-8, 1e-12):
            above = time_above(SQRT2 + eps, phi)
            below = time_to_line(alpha_of_beta(SQRT2 - eps), phi)
            gaps.append(abs(above - below))
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[-1] < 1e-9

    def test_domain(self):
        with pytest.raises(DomainError):
            time_above(1.0, 0.5)
        with pytest.raises(DomainError):
            time_above(2.0, 0.0)
        with pytest.raises(DomainError):
            time_above(2.0, 1.6)


class TestDerivatives:
    def test_quarter_period_fd(self):
        a = PI / 4
        assert_allclose(d_quarter_period(a), central(quarter_period, a), rtol=1e-6)

    def test_quarter_period_small_alpha(self):
        a = 1e-3
        fd = central(quarter_period, a, 1e-4)
        assert d_quarter_period(a) == pytest.approx(fd, rel=1e-4)
        assert 0 < d_quarter_period(a) < 1e-3

    def test_quarter_period_positive_near_cap(self):
        assert d_quarter_period(CAP) > 0
        assert d_quarter_period(1.5) > 0

    def test_time_to_line_fd(self):
        a, phi = PI / 3, PI / 6
        d = d_time_to_line_dalpha(a, phi)
        assert d < 0
        assert_allclose(d, central(lambda x: time_to_line(x, phi), a), rtol=1e-6)

    def test_ordering_in_phi(self):
        a = PI / 3
        assert d_time_to_line_dalpha(a, 0.5) > d_time_to_line_dalpha(a, 0.7)

    @pytest.mark.parametrize("a", [0.4, 0.9, 1.3])
    def test_second_mderiv_fd(self, a):
        m = math.sin(a) ** 2
        h = 1e-5

        def first(mm):
            return quarter_period_mderiv(math.asin(math.sqrt(mm)), 1)

        assert_allclose(quarter_period_mderiv(a, 2), (first(m + h) - first(m - h)) / (2 * h), rtol=1e-5)

        def first_line(mm):
            return time_to_line_mderiv(math.asin(math.sqrt(mm)), 0.3, 1)

        assert_allclose(
            time_to_line_mderiv(a, 0.3, 2), (first_line(m + h) - first_line(m - h)) / (2 * h), rtol=1e-5
        )

    def test_mderiv_near_turning_point(self):
        # close to the turning point the slope blows up like gap**(-1/2)
        phi = PI / 4
        vals = [time_to_line_mderiv(phi + g, phi, 1) for g in (1e-6, 1e-9, 1e-12)]
        assert vals[0] > vals[1] > vals[2]
        assert np.all(np.isfinite(vals))

    def test_mderiv_orders(self):
        with pytest.raises(ValueError):
            quarter_period_mderiv(0.5, 3)
        with pytest.raises(ValueError):
            time_to_line_mderiv(0.5, 0.2, 3)
        assert time_to_line_mderiv(0.5, 0.2, 0) == time_to_line(0.5, 0.2)
        with pytest.raises(DomainError):
            time_to_line_mderiv(0.5, 0.5, 1)
