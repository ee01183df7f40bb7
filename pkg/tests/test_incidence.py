import pytest
from itertools import combinations, permutations

import numpy as np

from core.errors import DuplicatePointError, OverlappingSetsError, PointIndexError, PreconditionError
from core.generators import matching_instance
from core.geometry import Line, Point
from core.incidence import (
    LineClass, PointConfig, all_classes, all_covers, bad_pairs, bad_quadruples, build_config, collin, cross_lines,
    find_matching, indices_of, is_valid_matching, is_valid_pairing_cover, lines_at_least, mask_of, min_line_cover,
    n_lines, node_degree, ordinary_lines, pairing_cover, pairs_inside,
)
from core.representatives import example_config


def config(*pairs):
    return PointConfig([Point(x, y) for x, y in pairs])


class TestPointConfig:
    def setup_method(self):
        self.cfg = example_config("case-a")

    def test_duplicates_rejected(self):
        """Test duplicate points are reported by index"""
        with pytest.raises(DuplicatePointError) as info:
            config((0, 0), (1, 2), ("2/2", "4/2"))
        assert info.value.indices == (1, 2)

    def test_build_config(self):
        """Test configurations keep the input order"""
        points = [Point(2, 1), Point(0, 0), Point("1/2", 3)]
        cfg = build_config(points)
        assert cfg.n == 3
        assert list(cfg.points) == points

    def test_classes_sorted(self):
        """Test classes come out in trace order and cover every pair once"""
        traces = [c.trace for c in self.cfg.classes]
        assert traces == sorted(traces)
        pairs = [pair for trace in traces for pair in combinations(trace, 2)]
        assert len(pairs) == len(set(pairs)) == 36

    def test_size_multiset(self):
        """Test the lines through three or more points"""
        sizes = sorted((len(c) for c in lines_at_least(self.cfg, 3)), reverse=True)
        assert sizes == [4, 3, 3, 3, 3, 3]

    def test_index_checks(self):
        """Test out-of-range indices raise"""
        with pytest.raises(PointIndexError):
            self.cfg.check_index(9)
        with pytest.raises(PreconditionError):
            self.cfg.line_of_pair(2, 2)

    def test_trace_of_foreign_line(self):
        """Test traces of lines outside S^2_P"""
        assert self.cfg.trace(Line(1, 0, 100)) == ()
        assert self.cfg.trace(Line(1, 0, 2)) == (0,)
        assert self.cfg.as_class(Line(1, 0, 2)).is_singleton

    def test_dict_round_trip(self):
        """Test configurations survive serialization"""
        again = PointConfig.from_dict(self.cfg.to_dict())
        assert again.points == self.cfg.points

    def test_masks(self):
        """Test bitmask helpers"""
        assert mask_of((0, 2, 5)) == 0b100101
        assert indices_of(0b100101) == (0, 2, 5)


class TestLineCounts:
    def test_four_line(self):
        """Test the only 4-line of the Case A figure is y = 2"""
        assert n_lines(example_config("case-a"), 4) == {Line(0, 1, 2)}

    def test_x_configuration_triples(self):
        """Test the X-configuration has nine 3-lines and no longer lines"""
        cfg = example_config("x-configuration")
        assert len(n_lines(cfg, 3)) == 9
        assert collin(cfg) == 3

    def test_triangle(self):
        """Test three non-collinear points"""
        cfg = config((0, 0), (1, 0), (0, 1))
        assert len(cfg.classes) == 3
        assert all(len(c) == 2 for c in cfg.classes)

    def test_n_must_be_at_least_two(self):
        """Test n-lines below two points are refused"""
        with pytest.raises(ValueError):
            n_lines(config((0, 0), (1, 1)), 1)

    def test_collin_small(self):
        """Test collin on tiny configurations"""
        assert collin(config()) == 0
        assert collin(config((3, 3))) == 1
        assert collin(config((3, 3), (4, 4))) == 2


class TestCovers:
    def test_case_a_cover(self):
        """Test the minimum cover of the Case A figure"""
        m, cover = min_line_cover(example_config("case-a"))
        assert m == 3
        assert [c.trace for c in cover] == [(0, 1, 2, 3), (4, 5, 6), (7, 8)]

    def test_collinear_cover(self):
        """Test five collinear points need one line"""
        m, _ = min_line_cover(config(*[(i, 2 * i) for i in range(5)]))
        assert m == 1

    def test_generic_cover(self):
        """Test points on a parabola pair up"""
        m, _ = min_line_cover(config(*[(i, i * i) for i in range(7)]))
        assert m == 4

    def test_degenerate_covers(self):
        """Test the empty and one-point configurations"""
        assert min_line_cover(config()) == (0, [])
        m, cover = min_line_cover(config((1, 1)))
        assert m == 1 and cover[0].is_singleton

    @pytest.mark.parametrize("name", ["case-a", "case-b"])
    def test_unique_three_cover(self, name):
        """Test nine-point examples have exactly one 3-cover"""
        covers = all_covers(example_config(name), 3)
        assert len(covers) == 1

    def test_case_b_cover_lines(self):
        """Test the Case B cover is y = 0, y = 3 and 4x + y = 18"""
        (cover,) = all_covers(example_config("case-b"), 3)
        assert {c.line for c in cover} == {Line(0, 1, 0), Line(0, 1, 3), Line(4, 1, 18)}

    def test_x_configuration_covers(self):
        """Test the X-configuration has three covers by disjoint triples"""
        covers = all_covers(example_config("x-configuration"), 3)
        assert len(covers) == 3
        for cover in covers:
            assert sorted(i for c in cover for i in c.trace) == list(range(9))

    def test_too_few_lines(self):
        """Test no cover exists below m_P"""
        assert all_covers(example_config("case-a"), 2) == []

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_covers_match_brute_force(self, k):
        """Test all_covers against enumeration of every k-set of classes"""
        cfg = config((0, 0), (1, 0), (0, 1), (2, 0))
        classes = all_classes(cfg)
        expected = sorted(
            tuple(sorted(chosen)) for chosen in combinations(classes, k)
            if set(i for c in chosen for i in c.trace) == set(range(cfg.n))
        )
        assert all_covers(cfg, k) == expected

    def test_triangle_three_covers(self):
        """Test 3-covers of three non-collinear points"""
        cfg = config((0, 0), (1, 0), (0, 1))
        covers = all_covers(cfg, 3)
        assert covers
        assert (cfg.singleton(0), cfg.singleton(1), cfg.singleton(2)) in covers
        for cover in covers:
            assert set(i for c in cover for i in c.trace) == {0, 1, 2}


class TestPairsAndOrdinaryLines:
    def setup_method(self):
        self.cfg = example_config("case-a")

    def test_pairs_inside(self):
        """Test pairing inside a collinear set and inside P"""
        assert pairs_inside(self.cfg, (0, 1, 2, 3), 0, 1)
        assert pairs_inside(self.cfg, range(9), 4, 8)
        assert not pairs_inside(self.cfg, (0, 4, 5), 0, 4)

    def test_x_configuration_blocked_pair(self):
        """Test a1 and b1 cannot pair inside {a1, a2, b1, b2}"""
        cfg = example_config("x-configuration")
        assert not pairs_inside(cfg, (0, 1, 3, 4), 0, 3)

    def test_pairs_inside_requires_members(self):
        """Test both points must lie in A"""
        with pytest.raises(PreconditionError):
            pairs_inside(self.cfg, (0, 1), 0, 5)

    def test_ordinary_three_lines(self):
        """Test O_3 of the 4-line has one line through each of its points"""
        lines = ordinary_lines(self.cfg, Line(0, 1, 2), 3)
        assert len(lines) == 4
        feet = sorted(next(i for i in self.cfg.trace(line) if i < 4) for line in lines)
        assert feet == [0, 1, 2, 3]

    def test_ordinary_lines_too_long(self):
        """Test n above |P| gives no lines"""
        assert ordinary_lines(self.cfg, Line(0, 1, 2), 10) == set()


class TestCrossLines:
    def test_case_b(self):
        """Test six cross-lines and 2-nodes everywhere"""
        cfg = example_config("case-b")
        (cover,) = all_covers(cfg, 3)
        assert len(cross_lines(cfg, cover)) == 6
        assert all(node_degree(cfg, cover, p) == 2 for p in range(9))

    def test_cover_order_irrelevant(self):
        """Test cross-lines do not depend on the order of the cover"""
        cfg = example_config("x-configuration")
        rows = [Line(0, 1, 0), Line(0, 1, 1), Line(0, 1, 2)]
        assert cross_lines(cfg, rows) == cross_lines(cfg, list(reversed(rows)))
        assert len(cross_lines(cfg, rows)) == 6
        assert all(node_degree(cfg, rows, p) == 2 for p in range(9))

    def test_single_line(self):
        """Test a line is not its own cross-line"""
        cfg = config((0, 0), (1, 1), (2, 2))
        assert cross_lines(cfg, [Line(1, -1, 0)]) == set()


class TestBadPairs:
    def test_generic(self):
        """Test A and B exhausting P leave no bad pairs"""
        cfg = config(*[(i, i * i) for i in range(6)])
        assert bad_pairs(cfg, (0, 1, 2), (3, 4, 5)) == set()

    def test_overlap(self):
        """Test A and B must be disjoint"""
        cfg = config((0, 0), (1, 0), (0, 1))
        with pytest.raises(OverlappingSetsError):
            bad_pairs(cfg, (0, 1), (1, 2))

    def test_case_a_no_bad_quadruples(self):
        """Test the 4-line against every triple of the other points"""
        cfg = example_config("case-a")
        for B in combinations(range(4, 9), 3):
            assert bad_quadruples(cfg, (0, 1, 2, 3), B) == set()

    def test_obstructed_pair(self):
        """Test a third point on l_{a,b} makes the pair bad"""
        cfg = config((0, 0), (2, 0), (1, 0))
        assert bad_pairs(cfg, (0,), (1,)) == {(0, 1)}
        assert pairing_cover(cfg, (0,), (1,)) is None
        assert len(find_matching(cfg, (0,), (1,)).lines) == 2


def most_clean_pairs(cfg, A, B):
    """Largest number of disjoint (a, b) pairs joined by 2-lines, by brute force"""
    small, large = (A, B) if len(A) <= len(B) else (B, A)
    for size in range(len(small), 0, -1):
        for chosen in combinations(small, size):
            for image in permutations(large, size):
                if all(len(cfg.class_of_pair(s, t)) == 2 for s, t in zip(chosen, image)):
                    return size
    return 0


class TestMatching:
    def setup_method(self):
        # a1 meets b4, b5 on x = 0 and b6, q1 on y = x
        self.cfg = config((0, 0), (1, 0), (2, 0), (0, 1), (0, 2), (1, 1), (2, 2), (5, 7))
        self.A = (0, 1, 2)
        self.B = (3, 4, 5)

    def test_empty_sides(self):
        """Test empty A and B give the empty matching"""
        matching = find_matching(self.cfg, (), ())
        assert matching.lines == [] and matching.assignment == {}

    def test_lines_respect_sides(self):
        """Test no matching line carries two points of one side or a point outside"""
        matching = find_matching(self.cfg, self.A, self.B)
        assert is_valid_matching(self.cfg, self.A, self.B, matching)
        for c in matching.lines:
            trace = set(c.trace)
            assert trace <= set(self.A) | set(self.B)
            assert len(trace & set(self.A)) <= 1
            assert len(trace & set(self.B)) <= 1

    def test_unpairable_point_gets_singleton(self):
        """Test a1 is served alone and the matching uses four lines"""
        matching = find_matching(self.cfg, self.A, self.B)
        assert len(matching.lines) == 4
        assert matching.assignment[0].is_singleton
        assert matching.assignment[2] == self.cfg.class_of_pair(2, 3)
        singles = [c.trace for c in matching.lines if c.is_singleton]
        assert len(singles) == 2 and (0,) in singles

    def test_line_budget(self):
        """Test a budget below the fewest lines gives None"""
        assert find_matching(self.cfg, self.A, self.B, max_lines=3) is None
        assert len(find_matching(self.cfg, self.A, self.B, max_lines=4).lines) == 4

    def test_pairing_cover_differs(self):
        """Test the three-line pairing cover reuses points of B and is not a matching"""
        cover = pairing_cover(self.cfg, self.A, self.B)
        assert cover is not None
        assert [c.trace for c in cover.lines] == [(0, 3, 4), (1, 4), (2, 4, 5)]
        assert is_valid_pairing_cover(self.cfg, self.A, self.B, cover)
        assert not is_valid_matching(self.cfg, self.A, self.B, cover)

    def test_unequal_sides(self):
        """Test leftover points of the larger side get singleton lines"""
        cfg = config((0, 0), (1, 2), (3, 1), (4, 4))
        matching = find_matching(cfg, (0,), (1, 2, 3))
        assert len(matching.lines) == 3
        assert sum(1 for c in matching.lines if c.is_singleton) == 2
        assert is_valid_matching(cfg, (0,), (1, 2, 3), matching)

    def test_tampered_matching(self):
        """Test the checker rejects a matching with a missing line"""
        matching = find_matching(self.cfg, self.A, self.B)
        matching.lines = matching.lines[:-1]
        assert not is_valid_matching(self.cfg, self.A, self.B, matching)

    def test_overlap(self):
        """Test matchings need disjoint sides"""
        with pytest.raises(OverlappingSetsError):
            find_matching(self.cfg, (0, 1), (1, 3))

    @pytest.mark.parametrize("seed", range(30))
    def test_random_instances(self, seed):
        """Test matchings are valid and use the fewest lines on random collinear triples"""
        cfg, A, B = matching_instance(np.random.default_rng(seed))
        assert collin(cfg) < 4
        assert bad_quadruples(cfg, A, B) == set()
        matching = find_matching(cfg, A, B)
        assert is_valid_matching(cfg, A, B, matching)
        assert len(matching.lines) == len(A) + len(B) - most_clean_pairs(cfg, A, B)
        cover = pairing_cover(cfg, A, B)
        assert cover is not None
        assert is_valid_pairing_cover(cfg, A, B, cover)

    @pytest.mark.slow
    def test_five_hundred_instances(self):
        """Test five hundred seeded instances get valid matchings and pairing covers"""
        rng = np.random.default_rng(300)
        for _ in range(500):
            cfg, A, B = matching_instance(rng)
            matching = find_matching(cfg, A, B)
            assert is_valid_matching(cfg, A, B, matching)
            assert len(matching.lines) == len(A) + len(B) - most_clean_pairs(cfg, A, B)
            cover = pairing_cover(cfg, A, B)
            assert cover is not None and is_valid_pairing_cover(cfg, A, B, cover)

    def test_line_class_serialization(self):
        """Test singleton classes serialize without coefficients"""
        assert LineClass((3,), None).to_dict() == {'trace': [3], 'coeffs': None}
