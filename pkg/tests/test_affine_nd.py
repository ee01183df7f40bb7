import pytest
from fractions import Fraction

import numpy as np

from core.affine_nd import (
    AffineConfig, AffineSubspace, candidate_hyperplanes, check_translate, choose_direction, direct_shatters, find_good_translate,
    hyperplane_classes, hyperplane_trace, intersect_flats, lift_config, rank, reduce_dimension, reduce_to_plane,
    reduction_chain, structure_of, translate_bound, vc_equal_check,
)
from core.errors import DimensionMismatchError, MalformedInputError, PreconditionError, SizeLimitError
from core.generators import random_lifted_instance
from core.geometry import Point
from core.incidence import PointConfig
from core.isomorphism import shatter_structure
from core.representatives import example_config
from core.settings import Settings


def flat(offset, *basis):
    return AffineSubspace.spanned(offset, list(basis))


def parabola(n):
    return PointConfig([Point(i, i * i) for i in range(n)])


class TestAffineSubspace:
    def test_canonical_form(self):
        """Test different descriptions of one line compare equal"""
        assert flat((1, 1, 0), (2, 0, 0)) == flat((5, 1, 0), (1, 0, 0))
        assert flat((0, 0), (1, 1)) == flat((3, 3), (-2, -2))

    def test_dependent_basis(self):
        """Test constructors refuse dependent bases"""
        with pytest.raises(DimensionMismatchError):
            AffineSubspace((0, 0, 0), ((1, 0, 0), (2, 0, 0)))
        assert flat((0, 0, 0), (1, 0, 0), (2, 0, 0)).dim == 1

    def test_mismatched_lengths(self):
        """Test offset and basis lengths must agree"""
        with pytest.raises(DimensionMismatchError):
            AffineSubspace((0, 0), ((1, 0, 0),))

    def test_equation(self):
        """Test hyperplanes report a normalized equation"""
        plane = AffineSubspace.from_equation((2, 4, 0), 6)
        assert plane.dim == 2
        assert plane.equation() == ((1, 2, 0), Fraction(3))
        assert plane.contains_point((Fraction(3), Fraction(0), Fraction(7)))

    def test_zero_normal(self):
        """Test a zero normal is not a hyperplane"""
        with pytest.raises(DimensionMismatchError):
            AffineSubspace.from_equation((0, 0, 0), 1)

    def test_normal_needs_hyperplane(self):
        """Test lines in R^3 have no single normal"""
        with pytest.raises(DimensionMismatchError):
            flat((0, 0, 0), (1, 0, 0)).normal()

    def test_containment(self):
        """Test flats contain their sub-flats"""
        plane = AffineSubspace.from_equation((0, 0, 1), 2)
        assert plane.contains(flat((1, 1, 2), (1, -1, 0)))
        assert not plane.contains(flat((1, 1, 2), (0, 0, 1)))
        with pytest.raises(DimensionMismatchError):
            plane.contains(flat((0, 0), (1, 0)))

    def test_join(self):
        """Test the span of two parallel lines is their plane"""
        first = flat((0, 0, 0), (1, 0, 0))
        second = flat((0, 1, 0), (1, 0, 0))
        assert first.join(second) == AffineSubspace.from_equation((0, 0, 1), 0)

    def test_intersections(self):
        """Test meeting, disjoint and coincident flats"""
        axis = flat((0, 0, 0), (1, 0, 0))
        assert intersect_flats(axis, AffineSubspace.from_equation((1, 0, 0), 3)) == AffineSubspace((3, 0, 0))
        assert intersect_flats(axis, AffineSubspace.from_equation((0, 1, 0), 1)) is None
        assert intersect_flats(axis, AffineSubspace.from_equation((0, 0, 1), 0)) == axis

    def test_mapped_and_dropped(self):
        """Test images under a linear map and coordinate charts"""
        line = flat((1, 0, 0), (0, 0, 1))
        swapped = line.mapped([[0, 1, 0], [1, 0, 0], [0, 0, 1]], (0, 0, 0))
        assert swapped == flat((0, 1, 0), (0, 0, 1))
        assert line.drop_coordinate(2) == AffineSubspace((1, 0))

    def test_dict_round_trip(self):
        """Test flats survive serialization with rational strings"""
        line = flat(("1/2", 0, 3), (0, 1, "2/3"))
        assert AffineSubspace.from_dict(line.to_dict()) == line

    @pytest.mark.parametrize("data", [[], {'basis': []}, {'offset': "0", 'basis': []}, {'offset': [0], 'basis': [1]}])
    def test_malformed(self, data):
        """Test malformed flat documents"""
        with pytest.raises(MalformedInputError):
            AffineSubspace.from_dict(data)

    def test_rank(self):
        """Test exact rank"""
        assert rank([[1, 2, 3], [2, 4, 6], [0, 1, 1]]) == 2


class TestAffineConfig:
    def test_dimension_checks(self):
        """Test elements must have codimension two"""
        with pytest.raises(DimensionMismatchError):
            AffineConfig(1, [])
        with pytest.raises(DimensionMismatchError):
            AffineConfig(3, [AffineSubspace.from_equation((0, 0, 1), 0)])

    def test_duplicates(self):
        """Test repeated elements are refused"""
        line = flat((0, 0, 0), (1, 0, 0))
        with pytest.raises(PreconditionError):
            AffineConfig(3, [line, flat((4, 0, 0), (3, 0, 0))])

    def test_round_trip(self):
        """Test configurations survive serialization"""
        cfg = lift_config(example_config("F2-I"), 3, "cone")
        again = AffineConfig.from_dict(cfg.to_dict())
        assert again.elements == cfg.elements

    @pytest.mark.parametrize("data", [{}, {'n': "3", 'elements': []}, {'n': 3, 'elements': {}}])
    def test_malformed(self, data):
        """Test malformed configuration documents"""
        with pytest.raises(MalformedInputError):
            AffineConfig.from_dict(data)

    def test_point_config_bridge(self):
        """Test planar configurations convert both ways"""
        cfg = example_config("F2-II")
        assert AffineConfig.from_point_config(cfg).to_point_config().points == cfg.points
        with pytest.raises(DimensionMismatchError):
            lift_config(cfg).to_point_config()


class TestHyperplanes:
    def setup_method(self):
        self.cfg = AffineConfig(3, [
            flat((0, 0, 0), (1, 0, 0)),
            flat((0, 1, 0), (1, 0, 0)),
            flat((0, 0, 0), (0, 0, 1)),
        ])

    def test_trace(self):
        """Test traces count contained elements only"""
        assert hyperplane_trace(self.cfg, AffineSubspace.from_equation((0, 0, 1), 0)) == (0, 1)

    def test_trace_needs_hyperplane(self):
        """Test traces are taken on hyperplanes"""
        with pytest.raises(DimensionMismatchError):
            hyperplane_trace(self.cfg, self.cfg.elements[0])

    def test_candidates(self):
        """Test candidates are the hyperplanes spanned by two elements"""
        traces = [hyperplane_trace(self.cfg, V) for V in candidate_hyperplanes(self.cfg)]
        assert traces == [(0, 1), (0, 2)]

    def test_skew_pairs(self):
        """Test skew elements span no hyperplane"""
        skew = AffineConfig(3, [flat((0, 0, 0), (1, 0, 0)), flat((0, 0, 1), (0, 1, 0))])
        assert hyperplane_classes(skew) == []
        assert structure_of(skew).classes == ()

    @pytest.mark.parametrize("mode", ["parallel", "cone"])
    def test_lift_keeps_structure(self, mode):
        """Test lifts have the hyperplane traces of the planar lines"""
        for name in ("F2-I", "F3-Ia", "x-configuration"):
            planar = example_config(name)
            lifted = lift_config(planar, 3, mode, np.random.default_rng(5))
            assert structure_of(lifted) == shatter_structure(planar)

    def test_lift_arguments(self):
        """Test lift targets and modes"""
        with pytest.raises(DimensionMismatchError):
            lift_config(parabola(3), 2)
        with pytest.raises(ValueError):
            lift_config(parabola(3), 3, "sideways")


class TestTranslates:
    def setup_method(self):
        self.cfg = AffineConfig(3, [
            flat((0, 0, 0), (1, 0, 1)),
            flat((1, 0, 0), (0, 1, 1)),
            flat((0, 1, 0), (1, 1, 1)),
        ])
        self.U = AffineSubspace.from_equation((0, 0, 1), 0)

    def test_good_translate(self):
        """Test the accepted translate passes the independent check"""
        U_prime = find_good_translate(self.cfg, self.U)
        normal, _ = U_prime.equation()
        assert normal == (0, 0, 1)
        assert check_translate(self.cfg, U_prime)

    def test_bad_translate(self):
        """Test a level where two pieces coincide is rejected"""
        assert not check_translate(self.cfg, AffineSubspace.from_equation((0, 0, 1), -1))

    def test_not_a_hyperplane(self):
        """Test the checker wants a hyperplane"""
        assert not check_translate(self.cfg, self.cfg.elements[0])

    def test_direction_inside_u(self):
        """Test elements parallel to U are refused"""
        cfg = AffineConfig(3, [flat((0, 0, 5), (1, 0, 0))])
        with pytest.raises(PreconditionError):
            find_good_translate(cfg, self.U)

    def test_single_element(self):
        """Test one element is cut at level 0"""
        cfg = AffineConfig(3, [flat((0, 0, 0), (1, 2, 3))])
        assert translate_bound(cfg) == 1
        assert check_translate(cfg, find_good_translate(cfg, self.U))

    def test_direction_choice(self):
        """Test the chosen normal is transverse to every element"""
        normal = choose_direction(self.cfg)
        for e in self.cfg.elements:
            assert any(sum(a * b for a, b in zip(normal, v)) != 0 for v in e.basis)


class TestReduction:
    def test_parallel_lift_returns_points(self):
        """Test reducing a parallel lift gives back the planar points"""
        planar = example_config("F2-I")
        result = reduce_dimension(lift_config(planar, 3, "parallel"))
        assert result.target.n == 2
        assert result.structure_preserved
        assert result.target.to_point_config().points == planar.points
        assert result.to_dict()['dropped_coordinate'] == 2

    def test_plane_refused(self):
        """Test planar configurations cannot be reduced"""
        with pytest.raises(DimensionMismatchError):
            reduce_dimension(AffineConfig.from_point_config(parabola(3)))

    def test_chain_from_r4(self):
        """Test R^4 reduces in two structure-preserving steps"""
        planar = example_config("F3-IIb")
        steps = reduction_chain(lift_config(planar, 4, "parallel"))
        assert [step.target.n for step in steps] == [3, 2]
        assert all(step.structure_preserved for step in steps)
        assert shatter_structure(reduce_to_plane(lift_config(planar, 4, "cone"))) == shatter_structure(planar)

    def test_chain_bounds(self):
        """Test chain targets"""
        with pytest.raises(DimensionMismatchError):
            reduction_chain(lift_config(parabola(3)), 4)

    def test_skew_pair(self):
        """Test skew lines gain a planar class and the verdicts split"""
        skew = AffineConfig(3, [flat((0, 0, 0), (1, 0, 0)), flat((0, 0, 1), (0, 1, 0))])
        result = reduce_dimension(skew)
        assert not result.structure_preserved
        assert direct_shatters(skew, 1) == (False, (0, 1))
        report = vc_equal_check(skew, 1)
        assert report.planar_shattered
        assert not report.agree


class TestVcEquality:
    @pytest.mark.parametrize("name,k", [("F2-I", 2), ("F3-Ia", 3), ("F3-III", 3)])
    def test_shattered_lifts(self, name, k):
        """Test lifts of shattered sets are shattered in both settings"""
        cfg = lift_config(example_config(name), 3, "cone", np.random.default_rng(11))
        report = vc_equal_check(cfg, k)
        assert report.direct_shattered and report.planar_shattered
        assert report.structure_preserved
        assert report.to_dict()['agree']

    def test_unshattered_lift(self):
        """Test seven generic points fail in both settings"""
        report = vc_equal_check(lift_config(parabola(7), 3, "parallel", np.random.default_rng(2)), 2)
        assert not report.direct_shattered and not report.planar_shattered
        assert report.failing_subset is not None

    def test_single_element(self):
        """Test one element is shattered by one hyperplane"""
        report = vc_equal_check(AffineConfig(3, [flat((1, 2, 3), (0, 1, 1))]), 1)
        assert report.direct_shattered and report.agree

    def test_limits(self):
        """Test element limits and k"""
        cfg = lift_config(parabola(4))
        with pytest.raises(SizeLimitError):
            vc_equal_check(cfg, 2, settings=Settings(affine_element_limit=3))
        with pytest.raises(ValueError):
            vc_equal_check(cfg, 0)

    @pytest.mark.parametrize("seed", range(10))
    def test_random_lifts(self, seed):
        """Test random lifted instances agree for one to three hyperplanes"""
        rng = np.random.default_rng(seed)
        cfg = random_lifted_instance(rng, int(rng.integers(3, 8)))
        for k in (1, 2, 3):
            report = vc_equal_check(cfg, k, seed=seed)
            assert report.structure_preserved
            assert report.agree

    @pytest.mark.slow
    def test_fifty_lifts(self):
        """Test fifty seeded lifts to R^3 agree for one to three hyperplanes"""
        for seed in range(1000, 1050):
            rng = np.random.default_rng(seed)
            cfg = random_lifted_instance(rng, int(rng.integers(3, 8)))
            for k in (1, 2, 3):
                report = vc_equal_check(cfg, k, seed=seed)
                assert report.structure_preserved
                assert report.agree
