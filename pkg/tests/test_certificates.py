import math

import numpy as np
import pytest

import holo_interp as hi
from holo_interp import pointset
from holo_interp.errors import DomainError, SpaceMismatchError

EMPTY = pointset.PointSet(np.zeros((0, 1), complex))


def small_grid(extent=3.0, m=13):
    return pointset.grid_points(-extent, extent, m, -extent, extent, m)


class TestBos:
    def test_empty_set_margin_one_everywhere(self, fock1):
        rep = hi.bos_certificate(fock1, EMPTY, rho=1.0, eps=3.0, grid=small_grid())
        assert rep.passed
        assert all(s.margin == 1.0 for s in rep.per_sample)
        assert rep.worst_margin == 1.0

    def test_dense_lattice_fails(self, fock1, flat1):
        lat = pointset.square_lattice(0.1, half_extent=2.0)
        grid = [0.0 + 0j, 0.05 + 0.05j]
        rep = hi.bos_certificate(fock1, lat, rho=1.0, eps=0.5, grid=grid)
        assert not rep.passed
        # enumeration oracle: the requirement dwarfs Delta Phi = 4
        counts = [sum(1 for p in lat.points if abs(p[0] - z) < 1.0) for z in grid]
        assert min(counts) / 1.0 ** 2 > 100

    def test_sparse_lattice_passes(self, fock1, flat1):
        lat = pointset.square_lattice(5.0, half_extent=10.0)
        grid = small_grid()
        rep = hi.bos_certificate(fock1, lat, rho=2.0, eps=3.0, grid=grid)
        assert rep.passed
        # worst grid point sits on a node: count 1, requirement 3.25, margin 0.75
        counts = [sum(1 for p in lat.points if abs(p[0] - z) < 2.0) for z in grid]
        assert max(counts) == 1
        assert rep.worst_margin == pytest.approx(0.75, abs=0)

    def test_wrong_space_rejected(self, fock1, disk):
        with pytest.raises(SpaceMismatchError):
            hi.bos_certificate(fock1, EMPTY, 1.0, 1.0, [0.0], space=disk)
        with pytest.raises(SpaceMismatchError):
            hi.bos_certificate(fock1, EMPTY, 1.0, 1.0, [np.zeros(2)], space=hi.flat_space(2))

    def test_parameter_domain(self, fock1):
        with pytest.raises(DomainError):
            hi.bos_certificate(fock1, EMPTY, -1.0, 1.0, [0.0])
        with pytest.raises(DomainError):
            hi.bos_certificate(fock1, EMPTY, 1.0, 1.0, [])


class TestTheorem1:
    def test_empty_set_reduces_to_epsilon_clause(self, fock1, flat1):
        rep = hi.theorem1_certificate(fock1, flat1, EMPTY, rho=1.0, eps=2.0, grid=small_grid())
        assert rep.passed  # eps <= 2 alpha holds with equality
        rep2 = hi.theorem1_certificate(fock1, flat1, EMPTY, rho=1.0, eps=2.1, grid=small_grid())
        assert not rep2.passed

    def test_sparse_lattice_margin(self, fock1, flat1):
        lat = pointset.square_lattice(5.0, half_extent=10.0)
        rep = hi.theorem1_certificate(fock1, flat1, lat, rho=2.0, eps=1.0, grid=small_grid())
        assert rep.passed
        # count 1 at nodes: requirement 1 * (1/4) * 2 + 1 = 1.5 against 2
        assert rep.worst_margin == pytest.approx(0.5, abs=0)

    def test_curvature_lower_bound_degrades_requirement(self):
        # same counting data under k = 1: the factor evaluation gives a
        # tighter requirement which still passes, with smaller margin
        count_term = 1.0 / 4.0
        req_k0 = count_term * hi.hessian_comparison_factor(0.0, 2.0) + 1.0
        req_k1 = count_term * hi.hessian_comparison_factor(1.0, 2.0) + 1.0
        assert req_k0 == pytest.approx(1.5, abs=0)
        assert req_k1 == pytest.approx(1.7686573603637741, abs=1e-12)
        assert 2.0 - req_k1 > 0
        assert 2.0 - req_k1 < 2.0 - req_k0
        # monotone degradation in k
        reqs = [count_term * hi.hessian_comparison_factor(k, 2.0) + 1.0
                for k in np.linspace(0.0, 3.0, 20)]
        assert all(b > a for a, b in zip(reqs, reqs[1:]))

    def test_separation_warning_on_near_coincident(self, fock1, flat1):
        pts = pointset.PointSet(np.array([[0j], [1e-300 + 0j]]))
        rep = hi.theorem1_certificate(fock1, flat1, pts, rho=1.0, eps=0.1, grid=[5.0 + 5.0j])
        assert any("separation" in w for w in rep.warnings)


class TestTheorem2:
    def test_empty_set_passes_with_zero_density(self, disk):
        w = hi.bergman_weight(4.0)  # curvature eigen (4-2)/2 = 1
        rep = hi.theorem2_certificate(w, disk, EMPTY, eps=0.5,
                                      grid=[0.0 + 0j, 0.3 + 0.3j])
        assert rep.passed
        assert rep.extras["density_grid_sup"] == 0.0

    def test_low_curvature_fails_epsilon_clause(self, disk):
        w = hi.bergman_weight(1.5)  # curvature eigen (1.5-2)/2 < 0
        rep = hi.theorem2_certificate(w, disk, EMPTY, eps=0.25, grid=[0.0 + 0j])
        assert not rep.passed
        assert rep.worst_margin == pytest.approx((1.5 - 2.0) / 2.0 - 0.25, abs=1e-12)

    def test_density_threshold_clause(self, disk):
        w = hi.bergman_weight(4.0)
        pts = pointset.PointSet(np.array([[0.5 + 0j]]))
        rep = hi.theorem2_certificate(w, disk, pts, eps=0.5, grid=[0.0 + 0j],
                                      density_threshold=0.1)
        assert not rep.passed  # density log 4 > 0.1
        rep2 = hi.theorem2_certificate(w, disk, pts, eps=0.5, grid=[0.0 + 0j],
                                       density_threshold=10.0)
        assert rep2.passed
        assert any("user-set" in w_ for w_ in rep2.warnings)

    def test_flat_rejected(self, flat1):
        with pytest.raises(SpaceMismatchError):
            hi.theorem2_certificate(hi.fock_weight(1.0), flat1, EMPTY, 0.5, [0.0])

    def test_kappa_halving_term_behavior(self):
        # with coordinates fixed, halving kappa lengthens every geodesic
        # distance, so the cutoff set can only grow, while each individual
        # far-node term decreases (the tanh argument grows toward 1)
        big = hi.hyperbolic_ball(1.0)
        small = hi.hyperbolic_ball(0.5)
        nodes = [0.35 + 0j, 0.2 + 0.3j, -0.1 - 0.4j]
        x = 0.02 + 0.01j
        for p in nodes:
            d_big = hi.distance(big, x, p)
            d_small = hi.distance(small, x, p)
            assert d_small > d_big
            term_big = -math.log(math.tanh(d_big / 2.0) ** 2)
            term_small = -math.log(math.tanh(d_small / 1.0) ** 2)
            assert term_small < term_big
        cut_big = {i for i, p in enumerate(nodes) if hi.distance(big, x, p) >= 1.0}
        cut_small = {i for i, p in enumerate(nodes) if hi.distance(small, x, p) >= 1.0}
        assert cut_big <= cut_small


class TestCrossCriterionConsistency:
    def test_bos_matches_theorem1_on_count_free_configurations(self, fock1, flat1):
        # where no node falls in any sample ball the two criteria agree
        # exactly under eps_bos = 2 eps_t1, with margins in ratio 2
        lat = pointset.square_lattice(5.0, half_extent=10.0)
        grid = [2.5 + 2.5j, 2.4 + 2.3j]  # cell centers, no node within rho = 1
        for eps_t1 in (0.3, 1.0, 1.9):
            rep_t1 = hi.theorem1_certificate(fock1, flat1, lat, 1.0, eps_t1, grid)
            rep_bos = hi.bos_certificate(fock1, lat, 1.0, 2.0 * eps_t1, grid)
            assert rep_bos.passed == rep_t1.passed
            for s_bos, s_t1 in zip(rep_bos.per_sample, rep_t1.per_sample):
                assert s_bos.margin == pytest.approx(2.0 * s_t1.margin, abs=1e-14)

    def test_enlarging_set_never_flips_fail_to_pass(self, fock1, flat1):
        grid = small_grid(2.0, 9)
        small = pointset.square_lattice(3.0, half_extent=6.0)
        big = pointset.square_lattice(1.5, half_extent=6.0)  # superset of small
        for eps in (0.2, 0.8, 1.6):
            rep_small = hi.theorem1_certificate(fock1, flat1, small, 2.0, eps, grid)
            rep_big = hi.theorem1_certificate(fock1, flat1, big, 2.0, eps, grid)
            assert rep_big.worst_margin <= rep_small.worst_margin
            if not rep_small.passed:
                assert not rep_big.passed

    def test_raising_eps_never_flips_fail_to_pass(self, fock1, flat1):
        lat = pointset.square_lattice(3.0, half_extent=6.0)
        grid = small_grid(2.0, 9)
        margins = []
        for eps in (0.1, 0.5, 1.0, 1.5, 2.0):
            rep = hi.theorem1_certificate(fock1, flat1, lat, 2.0, eps, grid)
            margins.append(rep.worst_margin)
        assert all(b < a for a, b in zip(margins, margins[1:]))


class TestReportShape:
    def test_passed_iff_worst_margin_nonneg(self, fock1, flat1):
        lat = pointset.square_lattice(5.0, half_extent=10.0)
        for eps in (0.5, 1.4, 1.6):
            rep = hi.theorem1_certificate(fock1, flat1, lat, 2.0, eps, small_grid())
            assert rep.passed == (rep.worst_margin >= 0.0)
            assert len(rep.per_sample) > 0

    def test_serialization(self, fock1):
        rep = hi.bos_certificate(fock1, EMPTY, 1.0, 3.0, [0.0 + 0j, 1.0 + 1.0j])
        d = rep.to_dict()
        assert d["schema_version"] == 1
        assert "conventions" in d and "delta_phi_factor" in d["conventions"]
        header, rows = rep.csv_rows()
        assert header == ["index", "re", "im", "required", "available", "margin"]
        assert len(rows) == 2
        assert rows[1][0] == 1
