import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from twistmap.branches import (
    BranchId,
    BranchKind,
    Stability,
    branch_domain,
    branch_time,
    branch_time_dalpha,
    critical_point,
    critical_time,
    critical_times,
    endpoint_ordinates,
    is_folded,
    L_of_lambda,
    lambda_of_L,
    make_point,
    meets_upper_critical,
    mirror,
    mirror_branch,
    mirror_point,
)
from twistmap.quadrature import DEFAULT_CONFIG, DomainError
from twistmap.timemaps import CellParams, OrbitParam, quarter_period, time_to_line

PI = math.pi
CAP = DEFAULT_CONFIG.alpha_cap
KINDS = list(BranchKind)

# frozen from the raw-integrand quadrature oracle
T_STAR_REF = 1.8951116188232113
T_UPPER_REF = 3.349003489761028
A0_AT_09 = 1.420029552331775


class TestBranchId:
    def test_parse_and_order(self):
        b = BranchId("cl", 2)
        assert b.kind is BranchKind.CL and b.k == 2
        assert b.label == "Cl2"
        ids = sorted([BranchId("D", 0), BranchId("A", 1), BranchId("Cr", 0), BranchId("A", 0)])
        assert [i.label for i in ids] == ["A0", "A1", "Cr0", "D0"]

    def test_invalid(self):
        with pytest.raises(ValueError):
            BranchId("B", 0)
        with pytest.raises(ValueError):
            BranchId("A", -1)
        with pytest.raises(ValueError):
            BranchId("A", 1.5)

    def test_coefficients(self):
        assert BranchId("A", 0).coefficients == (0, 1, 1)
        assert BranchId("Cr", 1).coefficients == (6, 1, -1)
        assert BranchId("Cl", 2).coefficients == (10, -1, 1)
        assert BranchId("D", 0).coefficients == (4, -1, -1)

    def test_hashable(self):
        assert len({BranchId("A", 0), BranchId(BranchKind.A, 0)}) == 1


class TestBranchTime:
    def test_a0_reference(self, ref_cell):
        p = OrbitParam.closed(0.9)
        assert_allclose(branch_time(ref_cell, BranchId("A", 0), p), A0_AT_09, rtol=1e-8)

    def test_formulas(self, ref_cell):
        a = 1.1
        T = quarter_period(a)
        t0, t1 = time_to_line(a, ref_cell.phi0), time_to_line(a, ref_cell.phi1)
        p = OrbitParam.closed(a)
        for k in (0, 1, 3):
            assert_allclose(branch_time(ref_cell, BranchId("A", k), p), 4 * k * T + t0 + t1, rtol=1e-14)
            assert_allclose(branch_time(ref_cell, BranchId("Cr", k), p), (4 * k + 2) * T + t0 - t1, rtol=1e-14)
            assert_allclose(branch_time(ref_cell, BranchId("Cl", k), p), (4 * k + 2) * T - t0 + t1, rtol=1e-14)
            assert_allclose(branch_time(ref_cell, BranchId("D", k), p), 4 * (k + 1) * T - t0 - t1, rtol=1e-14)

    def test_open_regime_only_for_a0(self, ref_cell):
        p = OrbitParam.open(2.0)
        assert branch_time(ref_cell, BranchId("A", 0), p) > 0
        for b in (BranchId("A", 1), BranchId("Cr", 0), BranchId("D", 0)):
            with pytest.raises(DomainError):
                branch_time(ref_cell, b, p)

    def test_domain_error_below_phi_max(self, ref_cell):
        for kind in KINDS:
            with pytest.raises(DomainError):
                branch_time(ref_cell, BranchId(kind, 0), OrbitParam.closed(ref_cell.phi_max))
            with pytest.raises(DomainError):
                branch_time(ref_cell, BranchId(kind, 0), OrbitParam.closed(0.6))

    def test_connection_at_critical_orbits(self, ref_cell):
        p = OrbitParam.closed(ref_cell.phi_max + 1e-12)
        for k in (0, 1, 2):
            c = critical_times(ref_cell, k)
            assert abs(branch_time(ref_cell, BranchId("A", k), p) - c.T_star) < 1e-5
            assert abs(branch_time(ref_cell, BranchId("Cr", k), p) - c.T_star) < 1e-5
            assert abs(branch_time(ref_cell, BranchId("Cl", k), p) - c.T_upper) < 1e-5
            assert abs(branch_time(ref_cell, BranchId("D", k), p) - c.T_upper) < 1e-5

    def test_cr_at_phi1_equals_t_star(self, ref_cell):
        # the transit time at the critical amplitude itself is T(phi1) + T1(phi1, phi0)
        c = critical_times(ref_cell, 0)
        assert_allclose(c.T_star, quarter_period(PI / 4) + time_to_line(PI / 4, PI / 6), rtol=1e-14)
        assert_allclose(c.T_upper, 3 * quarter_period(PI / 4) - time_to_line(PI / 4, PI / 6), rtol=1e-14)

    def test_a0_glued_across_separatrix(self, ref_cell):
        b = BranchId("A", 0)
        below = branch_time(ref_cell, b, OrbitParam.from_energy(1.0 - 1e-12))
        above = branch_time(ref_cell, b, OrbitParam.from_energy(1.0 + 1e-12))
        assert abs(below - above) < 1e-5

    def test_dalpha_matches_fd(self, ref_cell):
        for kind in KINDS:
            b = BranchId(kind, 1)
            a, h = 1.0, 1e-6
            fd = (branch_time(ref_cell, b, OrbitParam.closed(a + h)) - branch_time(ref_cell, b, OrbitParam.closed(a - h))) / (2 * h)
            assert_allclose(branch_time_dalpha(ref_cell, b, OrbitParam.closed(a)), fd, rtol=1e-6)


class TestCriticalTimes:
    def test_reference_values(self, ref_cell):
        c = critical_times(ref_cell, 0)
        assert_allclose([c.T_star, c.T_upper], [T_STAR_REF, T_UPPER_REF], rtol=1e-12)
        assert abs(c.T_star - 1.8944) < 2e-3 and abs(c.T_upper - 3.3497) < 2e-3
        assert c.T_star < 2 * quarter_period(PI / 4) < c.T_upper
        assert_allclose(c.y_abs, math.sqrt(0.5), rtol=1e-15)

    def test_symmetric(self, sym_cell):
        c = critical_times(sym_cell, 0)
        assert c.T_star == pytest.approx(c.T_upper, abs=1e-12)
        assert abs(c.T_star - 2.62206) < 2e-3
        assert c.y_abs == 0.0

    def test_interleaving(self, ref_cell):
        for k in range(4):
            c, n = critical_times(ref_cell, k), critical_times(ref_cell, k + 1)
            assert c.T_star < c.T_upper < n.T_star

    def test_invariant_under_mirror(self, ref_cell, mirror_cell):
        for k in range(3):
            assert critical_times(ref_cell, k) == critical_times(mirror_cell, k)

    def test_ordinates(self, ref_cell, mirror_cell):
        c = critical_times(ref_cell, 0)
        assert c.ordinates("star", ref_cell) == (c.y_abs, 0.0)
        assert c.ordinates("upper", ref_cell) == (-c.y_abs, 0.0)
        assert c.ordinates("star", mirror_cell) == (0.0, c.y_abs)


class TestDomainAndOrdinates:
    def test_domain(self):
        cell = CellParams(0.5, 0.7)
        d = branch_domain(cell, BranchId("Cr", 0))
        assert (d.alpha_lo, d.alpha_hi, d.includes_open) == (0.7, CAP, False)
        assert branch_domain(cell, BranchId("A", 0)).includes_open
        assert not branch_domain(cell, BranchId("A", 1)).includes_open
        assert not d.contains(OrbitParam.closed(0.7))
        assert d.contains(OrbitParam.closed(0.70001))
        assert d.energy_lo == pytest.approx(-math.cos(1.4))

    def test_signs(self, ref_cell):
        p = OrbitParam.closed(1.0)
        signs = {k.value: tuple(np.sign(endpoint_ordinates(ref_cell, BranchId(k, 0), p))) for k in KINDS}
        assert signs == {"A": (1, 1), "Cr": (1, -1), "Cl": (-1, 1), "D": (-1, -1)}

    def test_energy_relation(self, ref_cell):
        p = OrbitParam.closed(1.2)
        ym, yp = endpoint_ordinates(ref_cell, BranchId("D", 1), p)
        assert ym ** 2 == pytest.approx(p.energy + math.cos(2 * ref_cell.phi0), rel=1e-14)
        assert yp ** 2 == pytest.approx(p.energy + math.cos(2 * ref_cell.phi1), rel=1e-14)

    def test_critical_point(self, ref_cell):
        pt = critical_point(ref_cell, BranchId("Cr", 0))
        assert pt.y_plus == 0.0
        assert pt.y_minus == pytest.approx(math.sqrt(0.5), rel=1e-15)
        assert 2 * pt.L == pytest.approx(T_STAR_REF, rel=1e-12)
        up = critical_point(ref_cell, BranchId("D", 0))
        assert up.y_minus == pytest.approx(-math.sqrt(0.5)) and up.y_plus == 0.0

    def test_open_ordinate(self, ref_cell):
        ym, _ = endpoint_ordinates(ref_cell, BranchId("A", 0), OrbitParam.open(2.0))
        assert ym == pytest.approx(math.sqrt(3.5), rel=1e-15)

    def test_make_point(self, ref_cell):
        p = make_point(ref_cell, BranchId("Cl", 0), OrbitParam.closed(1.0))
        assert p.lam == pytest.approx(8 * p.L ** 2)
        assert p.stability is Stability.UNDETERMINED


class TestFoldsAndCriticalRoles:
    def test_meets_upper(self, ref_cell, mirror_cell):
        assert meets_upper_critical(ref_cell, BranchId("Cl", 0))
        assert not meets_upper_critical(ref_cell, BranchId("Cr", 0))
        assert meets_upper_critical(mirror_cell, BranchId("Cr", 0))
        assert meets_upper_critical(ref_cell, BranchId("D", 2))
        assert not meets_upper_critical(ref_cell, BranchId("A", 2))
        assert critical_time(ref_cell, BranchId("Cl", 1)) == critical_times(ref_cell, 1).T_upper

    def test_is_folded(self, ref_cell, sym_cell):
        assert is_folded(ref_cell, BranchId("Cl", 0))
        assert is_folded(ref_cell, BranchId("A", 1))
        assert not is_folded(ref_cell, BranchId("A", 0))
        assert not is_folded(ref_cell, BranchId("Cr", 1))
        assert not is_folded(ref_cell, BranchId("D", 0))
        assert not is_folded(sym_cell, BranchId("Cl", 0))


class TestMirror:
    def test_involution(self, ref_cell):
        assert mirror(mirror(ref_cell)) == ref_cell
        for kind in KINDS:
            b = BranchId(kind, 1)
            assert mirror_branch(mirror_branch(b)) == b

    def test_point_transform_matches_direct_formulas(self, ref_cell, mirror_cell):
        for kind in KINDS:
            b = BranchId(kind, 0)
            p = make_point(ref_cell, b, OrbitParam.closed(1.0))
            m = mirror_point(p)
            direct = make_point(mirror_cell, m.branch, m.param)
            assert_allclose([m.L, m.y_minus, m.y_plus], [direct.L, direct.y_minus, direct.y_plus], rtol=1e-13)
            assert mirror_point(m) == p

    def test_ordinate_swap(self, ref_cell):
        p = make_point(ref_cell, BranchId("Cr", 0), OrbitParam.closed(1.0))
        m = mirror_point(p)
        assert m.branch.kind is BranchKind.CL
        assert (m.y_minus, m.y_plus) == (p.y_plus, p.y_minus)


class TestLambda:
    def test_pair(self):
        assert lambda_of_L(1.0) == 8.0
        Lc = PI / (2 * math.sqrt(2))
        assert lambda_of_L(Lc) == pytest.approx(PI ** 2, rel=1e-15)
        for x in (0.1, 1.7, 9.0):
            assert abs(L_of_lambda(lambda_of_L(x)) - x) < 1e-15 * max(1.0, x)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            lambda_of_L(bad)
        with pytest.raises(DomainError):
            L_of_lambda(bad)
