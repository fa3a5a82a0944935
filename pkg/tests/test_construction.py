import math

import numpy as np
import pytest

import holo_interp as hi
from holo_interp import construction, geometry, pointset, weights
from holo_interp.errors import DomainError, SpaceMismatchError

MINUS_INV_E = -0.36787944117144233
LOG_QUARTER = -1.3862943611198906


def bump(u):
    return math.exp(-1.0 / u) if u > 0 else 0.0


def lattice_with_values(spacing=1.5, half_extent=3.0, seed=5):
    lat = pointset.square_lattice(spacing, half_extent=half_extent)
    rng = np.random.default_rng(seed)
    vals = rng.normal(size=len(lat)) + 1j * rng.normal(size=len(lat))
    return lat.with_values(vals)


class TestCutoff:
    def test_plateau_and_tail(self):
        assert hi.cutoff(0.1) == 1.0
        assert hi.cutoff(0.25) == 1.0
        assert hi.cutoff(1.0) == 0.0
        assert hi.cutoff(2.0) == 0.0

    def test_interior_formula(self):
        for t in (0.4, 5.0 / 8.0, 0.8):
            a = bump((1.0 - t) / 0.75)
            b = bump((t - 0.25) / 0.75)
            assert hi.cutoff(t) == pytest.approx(a / (a + b), rel=1e-15)
        assert hi.cutoff(5.0 / 8.0) == pytest.approx(0.5, abs=1e-15)

    def test_monotone_and_bounded(self):
        ts = np.linspace(0.0, 1.5, 400)
        vals = hi.cutoff(ts)
        assert np.all(vals >= 0.0) and np.all(vals <= 1.0)
        assert np.all(np.diff(vals) <= 1e-15)

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            hi.cutoff(-0.1)


class TestLocalSection:
    def test_center_value(self, fock1, flat1):
        assert hi.local_section(fock1, flat1, 0.0, 2.0 - 1.0j, 0.0, 0.5) == 2.0 - 1.0j

    def test_fock_at_origin_is_constant(self, fock1, flat1):
        for z in (0.1, 0.2j, -0.3 + 0.3j):
            assert hi.local_section(fock1, flat1, 0.0, 1.5 + 0j, z, 0.5) == 1.5 + 0j

    def test_fock_off_origin_exponential(self, fock1, flat1):
        a = 0.7 + 0.2j
        for z in (1.2, 1.0 + 0.3j):
            expect = a * np.exp(z - 1.0)
            assert hi.local_section(fock1, flat1, 1.0, a, z, 0.5) == pytest.approx(expect)

    def test_norm_inequality_sample_sweep(self, fock1, flat1, rng):
        # ||f_p(z)||_h^2 <= ||a||_h^2 for the pure-sigma weight (C = 1)
        p, a = 1.0 + 0j, 1.0 + 0j
        lhs_bound = weights.h_norm_sq(fock1, p, a)
        for _ in range(200):
            z = p + complex(*rng.uniform(-0.3, 0.3, 2))
            f = hi.local_section(fock1, flat1, p, a, z, 0.5)
            assert weights.h_norm_sq(fock1, z, f) <= lhs_bound * (1 + 1e-12)

    def test_outside_ball_rejected(self, fock1, flat1):
        with pytest.raises(DomainError):
            hi.local_section(fock1, flat1, 0.0, 1.0, 2.0, 0.5)


class TestGluedExtension:
    def test_guard_refuses_wide_delta0(self, fock1, flat1):
        pts = lattice_with_values(spacing=1.0)
        with pytest.raises(DomainError):
            hi.glued_extension(flat1, fock1, pts, delta0=0.6)

    def test_default_delta0(self, fock1, flat1):
        pts = lattice_with_values(spacing=1.5)
        ext = hi.glued_extension(flat1, fock1, pts)
        assert ext.delta0 == 0.5  # min(1.5, r0=1)/2

    def test_reproduces_values_exactly(self, fock1, flat1):
        pts = lattice_with_values()
        ext = hi.glued_extension(flat1, fock1, pts)
        for i in range(len(pts)):
            assert hi.evaluate_extension(ext, pts.points[i]) == pts.values[i]

    def test_vanishes_far_from_nodes(self, fock1, flat1):
        pts = lattice_with_values()
        ext = hi.glued_extension(flat1, fock1, pts)
        assert hi.evaluate_extension(ext, 0.75 + 0.75j) == 0.0

    def test_annulus_composition(self, fock1, flat1):
        pts = lattice_with_values()
        ext = hi.glued_extension(flat1, fock1, pts)
        p = complex(pts.points[0, 0])
        z = p + 0.4 + 0.1j  # delta0/2 < d < delta0
        d = abs(z - p)
        assert ext.delta0 / 2 < d < ext.delta0
        expect = hi.local_section(fock1, flat1, p, pts.values[0], z, ext.delta0) \
            * hi.cutoff(d ** 2 / ext.delta0 ** 2)
        assert hi.evaluate_extension(ext, z) == pytest.approx(expect, rel=1e-14)

    def test_dbar_vanishes_on_plateau(self, fock1, flat1):
        pts = lattice_with_values()
        ext = hi.glued_extension(flat1, fock1, pts)
        p = complex(pts.points[7, 0])
        for off in (0.1, 0.15j, -0.2 + 0.05j):
            z = np.array([p + off])
            assert abs(z[0] - p) <= 0.9 * ext.delta0 / 2
            g = geometry.dbar_fd(lambda t: hi.evaluate_extension(ext, complex(t[0])), z)
            f_val = hi.evaluate_extension(ext, complex(z[0]))
            assert abs(g[0]) <= 1e-8 * abs(f_val)

    def test_values_required(self, fock1, flat1):
        lat = pointset.square_lattice(2.0, half_extent=4.0)
        with pytest.raises(DomainError):
            hi.glued_extension(flat1, fock1, lat)

    def test_hyperbolic_nodes(self, fock1, disk):
        pts = pointset.PointSet(np.array([[0.0 + 0j], [0.5 + 0j]]),
                                np.array([1.0 + 0j, 2.0 + 0j]))
        w = hi.bergman_weight(3.0)
        ext = hi.glued_extension(disk, w, pts)
        assert hi.evaluate_extension(ext, 0.5 + 0j) == 2.0 + 0j


class TestAuxiliaryWeight:
    def test_boundary_zero(self, flat1):
        aux = construction.AuxiliaryWeight(flat1, pointset.PointSet(np.array([[0j]])), 1.0)
        assert aux.value(1.0 + 0j) == 0.0

    def test_closed_form_interior_value(self, flat1):
        rho = 1.0
        aux = construction.AuxiliaryWeight(flat1, pointset.PointSet(np.array([[0j]])), rho)
        z = complex(math.sqrt(rho ** 2 / math.e))
        assert aux.value(z) == pytest.approx(MINUS_INV_E, abs=1e-14)

    def test_pole_sentinel(self, flat1):
        aux = construction.AuxiliaryWeight(flat1, pointset.PointSet(np.array([[0.5 + 0j]])), 1.0)
        assert aux.value(0.5 + 0j) == -math.inf

    def test_nonpositive_everywhere(self, flat1, rng):
        pts = lattice_with_values()
        aux = construction.AuxiliaryWeight(flat1, pts, 2.0)
        zs = rng.uniform(-4, 4, (1000, 1)) + 1j * rng.uniform(-4, 4, (1000, 1))
        vals = aux.value_grid(zs)
        assert np.all(vals <= 0.0)

    def test_boundary_c1_taylor_behavior(self, flat1):
        # v(rho(1-e)) = -2n e^2 + O(e^3): quadratic vanishing of the value
        # and linear vanishing of the gradient as the shell is approached
        rho = 1.0
        aux = construction.AuxiliaryWeight(flat1, pointset.PointSet(np.array([[0j]])), rho)
        for e in (1e-2, 1e-3, 1e-4):
            v = aux.value(complex(rho * (1.0 - e)))
            assert v == pytest.approx(-2.0 * e ** 2, rel=2e-2 + 2 * e)
        g = geometry.dbar_fd(lambda t: aux.value(complex(t[0])),
                             np.array([complex(rho * (1 - 1e-3))]), step=1e-7)
        assert 2.0 * abs(g[0]) == pytest.approx(4e-3, rel=1e-2)

    def test_n2_pole_order(self):
        sp = hi.flat_space(2)
        pts = pointset.PointSet(np.array([[0j, 0j]]))
        aux = construction.AuxiliaryWeight(sp, pts, 1.0)
        v1 = aux.value(np.array([1e-3 + 0j, 0j]))
        v2 = aux.value(np.array([1e-4 + 0j, 0j]))
        # log-pole slope: n * log(d^2) gives 2n = 4 per decade in log10
        assert (v1 - v2) / math.log(10) == pytest.approx(4.0, rel=1e-2)


class TestSeipWeight:
    def test_single_node_value(self, disk):
        pts = pointset.PointSet(np.array([[0.5 + 0j]]))
        assert hi.seip_weight_value(disk, pts, 0.0) == pytest.approx(LOG_QUARTER, abs=1e-12)

    def test_pole_and_empty(self, disk):
        pts = pointset.PointSet(np.array([[0.5 + 0j]]))
        assert hi.seip_weight_value(disk, pts, 0.5 + 0j) == -math.inf
        empty = pointset.PointSet(np.zeros((0, 1), complex))
        assert hi.seip_weight_value(disk, empty, 0.1) == 0.0

    def test_flat_rejected(self, flat1):
        with pytest.raises(SpaceMismatchError):
            hi.seip_weight_value(flat1, pointset.PointSet(np.array([[0j]])), 1.0)

    def test_decomposes_into_density_and_near_terms(self, disk):
        pts = pointset.PointSet(np.array([[0.5 + 0j], [0.1 + 0.1j], [-0.6j]]))
        x = 0.02 - 0.03j
        d = geometry.distances_from(disk, pts.points, x)
        near = d[d < 1.0]
        near_sum = float(np.sum(2.0 * np.log(np.tanh(near / 2.0))))
        v = hi.seip_weight_value(disk, pts, x)
        assert v == pytest.approx(-hi.seip_density(disk, pts, x) + near_sum, rel=1e-12)


class TestDbarEnergy:
    def test_empty_set(self, fock1, flat1):
        ext = hi.glued_extension(flat1, fock1, pointset.PointSet(np.zeros((0, 1), complex)))
        aux = construction.AuxiliaryWeight(flat1, ext.points, 1.0)
        assert hi.dbar_energy(ext, aux) == 0.0

    def test_single_node_finite_and_stable(self, fock1, flat1):
        pts = pointset.PointSet(np.array([[0j]]), np.array([1.0 + 0j]))
        ext = hi.glued_extension(flat1, fock1, pts)
        aux = construction.AuxiliaryWeight(flat1, pts, 1.0)
        rep = construction.dbar_energy_report(ext, aux, nr=16, ntheta=32)
        assert rep.energy > 0.0 and math.isfinite(rep.energy)
        assert rep.drift <= 0.05

    def test_quadratic_homogeneity_exact(self, fock1, flat1):
        pts = lattice_with_values()
        ext = hi.glued_extension(flat1, fock1, pts)
        aux = construction.AuxiliaryWeight(flat1, pts, 2.0)
        e1 = hi.dbar_energy(ext, aux, nr=8, ntheta=16)
        doubled = pts.with_values(2.0 * pts.values)
        ext2 = hi.glued_extension(flat1, fock1, doubled)
        e2 = hi.dbar_energy(ext2, aux, nr=8, ntheta=16)
        assert e2 == 4.0 * e1

    def test_hyperbolic_energy_finite(self, disk):
        w = hi.bergman_weight(3.0)
        pts = pointset.PointSet(np.array([[0j], [0.4 + 0j]]), np.array([1.0 + 0j, 1j]))
        ext = hi.glued_extension(disk, w, pts)
        aux = construction.AuxiliaryWeight(disk, pts, 0.5)
        rep = construction.dbar_energy_report(ext, aux, nr=16, ntheta=32)
        assert math.isfinite(rep.energy) and rep.energy > 0.0
        assert rep.drift <= 0.05

    def test_exp_minus_v_bounded_on_annuli(self, fock1, flat1, rng):
        # the annulus lower bound v >= count * log(delta0^2 / (4 rho^2))
        pts = lattice_with_values()
        ext = hi.glued_extension(flat1, fock1, pts)
        rho = 2.0
        aux = construction.AuxiliaryWeight(flat1, pts, rho)
        floor = math.log(ext.delta0 ** 2 / (4.0 * rho ** 2))
        for i in range(len(pts)):
            p = complex(pts.points[i, 0])
            for _ in range(50):
                d = ext.delta0 * (0.5 + 0.5 * rng.random())
                th = 2 * math.pi * rng.random()
                z = p + d * complex(math.cos(th), math.sin(th))
                count = hi.count_in_ball(flat1, pts, z, rho)
                assert aux.value(z) >= count * floor - 1e-9


class TestExtensionNorm:
    def test_dominated_by_data_norm_under_permutation(self, fock1, flat1, rng):
        pts = lattice_with_values()
        c_frame = fock1.frame_bound_constant(0.5)
        vol = hi.ball_volume_bound(0.0, 0.5, 2)
        for perm_seed in range(3):
            perm = np.random.default_rng(perm_seed).permutation(len(pts))
            permuted = pts.with_values(pts.values[perm])
            ext = hi.glued_extension(flat1, fock1, permuted)
            lhs = construction.extension_norm_sq(ext, nr=24, ntheta=48)
            data = sum(weights.h_norm_sq(fock1, permuted.points[i], permuted.values[i])
                       for i in range(len(permuted)))
            assert lhs <= c_frame * vol * data * (1 + 1e-6)


class TestAuxiliaryCurvature:
    def test_flat_single_node_exact(self, flat1):
        rho = 1.0
        pts = pointset.PointSet(np.array([[0j]]))
        aux = construction.AuxiliaryWeight(flat1, pts, rho)
        grid = [0.2 + 0j, 0.3 + 0.3j, 0.1j, 0.6 + 0.2j]
        rep = hi.auxiliary_curvature_check(aux, flat1, grid, tol=1e-4)
        assert rep.passed
        for e in rep.entries:
            assert e.bound == pytest.approx(-2.0 / rho ** 2, abs=0)
            assert e.eigen_min == pytest.approx(-2.0 / rho ** 2, abs=1e-6)

    def test_outside_all_balls_flat_zero(self, flat1):
        pts = pointset.PointSet(np.array([[0j]]))
        aux = construction.AuxiliaryWeight(flat1, pts, 1.0)
        rep = hi.auxiliary_curvature_check(aux, flat1, [3.0 + 3.0j], tol=1e-4)
        assert rep.entries[0].eigen_min == 0.0
        assert rep.entries[0].bound == 0.0

    def test_hyperbolic_single_node(self, disk):
        pts = pointset.PointSet(np.array([[0j]]))
        aux = construction.AuxiliaryWeight(disk, pts, 0.8)
        grid = [0.05 + 0j, 0.1 + 0.1j, 0.2j, 0.3 + 0.05j]
        rep = hi.auxiliary_curvature_check(aux, disk, grid, tol=1e-4)
        assert rep.passed

    def test_grid_too_close_rejected(self, flat1):
        pts = pointset.PointSet(np.array([[0j]]))
        aux = construction.AuxiliaryWeight(flat1, pts, 1.0)
        with pytest.raises(DomainError):
            hi.auxiliary_curvature_check(aux, flat1, [0.01 + 0j])
