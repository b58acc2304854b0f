"""Inspection sphere: lattice layout, visibility/illumination gating,
monotone bookkeeping, and the uninspected-cluster direction."""

import math

import numpy as np
import pytest

from cwinspect.inspection import (SPHERE_POINT_COUNT, SPHERE_RADIUS,
                                  generate_points, inspected_count,
                                  nearest_uninspected_cluster,
                                  update_inspected)


class TestLattice:
    def test_count_and_radius(self):
        sph = generate_points()
        assert len(sph.points) == SPHERE_POINT_COUNT == 99
        norms = np.linalg.norm(sph.points, axis=1)
        assert np.all(np.abs(norms - SPHERE_RADIUS) < 1e-9)

    def test_near_uniform_centroid(self):
        sph = generate_points()
        assert np.linalg.norm(sph.points.mean(axis=0)) < 0.5

    def test_minimum_angular_separation(self):
        sph = generate_points()
        unit = sph.points / SPHERE_RADIUS
        cos = unit @ unit.T
        np.fill_diagonal(cos, -1.0)
        min_angle = np.arccos(np.clip(cos.max(), -1, 1))
        assert min_angle > 0.1

    def test_regeneration_bit_identical(self):
        a = generate_points()
        b = generate_points()
        assert np.array_equal(a.points, b.points)

    def test_invalid_radius(self):
        with pytest.raises(ValueError):
            generate_points(radius=0.0)


class TestVisibility:
    def test_hemisphere_count_from_positive_x(self):
        sph = generate_points()
        newly = update_inspected(sph, [100.0, 0, 0], 0.0, False)
        # oracle: strict half-space test on the generated lattice
        expected = int(np.count_nonzero(sph.points[:, 0] > 0.0))
        assert newly == expected == 50
        marked = set(np.nonzero(sph.inspected)[0])
        assert marked == set(np.nonzero(sph.points[:, 0] > 0.0)[0])

    def test_contradictory_half_spaces_mark_nothing(self):
        sph = generate_points()
        # sun at (-1, 0, 0) while the deputy looks from (+100, 0, 0)
        newly = update_inspected(sph, [100.0, 0, 0], math.pi, True)
        assert newly == 0
        assert inspected_count(sph) == 0

    def test_second_identical_call_marks_nothing(self):
        sph = generate_points()
        first = update_inspected(sph, [100.0, 0, 0], 0.0, False)
        assert first > 0
        assert update_inspected(sph, [100.0, 0, 0], 0.0, False) == 0

    def test_deputy_inside_sphere_marks_nothing(self):
        sph = generate_points()
        assert update_inspected(sph, [5.0, 0, 0], 0.0, False) == 0
        assert inspected_count(sph) == 0

    def test_illumination_gates_to_co_lit_hemisphere(self):
        free = generate_points()
        update_inspected(free, [100.0, 0, 0], 1.0, False)
        gated = generate_points()
        update_inspected(gated, [100.0, 0, 0], 1.0, True)
        lit = gated.points @ np.array([math.cos(1.0), math.sin(1.0), 0.0]) > 0
        seen = gated.points[:, 0] > 0
        assert inspected_count(gated) == int(np.count_nonzero(lit & seen))
        assert inspected_count(gated) <= inspected_count(free)

    def test_fov_cone_parameter_restricts(self):
        wide = generate_points()
        update_inspected(wide, [100.0, 0, 0], 0.0, False)
        narrow = generate_points()
        update_inspected(narrow, [100.0, 0, 0], 0.0, False,
                         fov_half_angle=math.radians(30.0))
        assert 0 < inspected_count(narrow) < inspected_count(wide)

    def test_monotone_count(self):
        sph = generate_points()
        rng = np.random.default_rng(2)
        last = 0
        for _ in range(50):
            pos = rng.normal(0, 60, 3)
            update_inspected(sph, pos, rng.uniform(0, 2 * math.pi), True)
            cur = inspected_count(sph)
            assert cur >= last
            last = cur

    def test_circumnavigation_inspects_everything(self):
        sph = generate_points()
        for az in np.linspace(0.0, 2 * math.pi, 36, endpoint=False):
            pos = 30.0 * np.array([math.cos(az), 0.0, math.sin(az)])
            update_inspected(sph, pos, 0.0, False)
        assert inspected_count(sph) == 99


class TestCounting:
    def test_fresh_sphere_zero(self):
        assert inspected_count(generate_points()) == 0

    def test_all_marked(self):
        sph = generate_points()
        sph.inspected[:] = True
        assert inspected_count(sph) == 99

    def test_equals_true_flags(self):
        sph = generate_points()
        sph.inspected[::3] = True
        assert inspected_count(sph) == int(np.count_nonzero(sph.inspected))


class TestClusterDirection:
    def test_all_inspected_gives_zero_vector(self):
        sph = generate_points()
        sph.inspected[:] = True
        res = nearest_uninspected_cluster(sph, [100.0, 0, 0])
        assert np.array_equal(res.direction, np.zeros(3))
        assert res.cluster_size == 0

    def test_single_point_left(self):
        sph = generate_points()
        sph.inspected[:] = True
        sph.inspected[42] = False
        res = nearest_uninspected_cluster(sph, [100.0, 0, 0])
        q = sph.points[42]
        assert np.allclose(res.direction, q / np.linalg.norm(q))
        assert res.cluster_size == 1

    def test_two_antipodal_groups(self):
        sph = generate_points()
        # leave only the caps around +x and -x uninspected
        unit_x = sph.points[:, 0] / SPHERE_RADIUS
        sph.inspected[:] = np.abs(unit_x) < 0.75
        group_a = sph.points[unit_x >= 0.75]
        centroid_a = group_a.mean(axis=0)
        res = nearest_uninspected_cluster(sph, [50.0, 0, 0], k=2)
        cos = np.dot(res.direction, centroid_a / np.linalg.norm(centroid_a))
        assert math.acos(np.clip(cos, -1, 1)) < 0.2

    def test_unit_norm_or_zero(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            sph = generate_points()
            sph.inspected[:] = rng.random(99) < rng.uniform(0, 1.05)
            res = nearest_uninspected_cluster(sph, rng.normal(0, 40, 3))
            norm = np.linalg.norm(res.direction)
            assert norm == 0.0 or abs(norm - 1.0) < 1e-12

    def test_deterministic_for_fixed_seed(self):
        sph = generate_points()
        sph.inspected[:40] = True
        a = nearest_uninspected_cluster(sph, [10.0, 20.0, 5.0], k=6, seed=3)
        b = nearest_uninspected_cluster(sph, [10.0, 20.0, 5.0], k=6, seed=3)
        assert np.array_equal(a.direction, b.direction)
        assert a.cluster_size == b.cluster_size
        assert a.converged == b.converged

    def test_k_validated(self):
        with pytest.raises(ValueError):
            nearest_uninspected_cluster(generate_points(), [50, 0, 0], k=0)
