"""
Axiom checkers for PyShatter
Conditions characterizing the sets shattered by two and by three lines
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, permutations
from typing import Dict, List, Optional, Sequence, Tuple

from core.errors import PreconditionError, SizeLimitError, WrongSizeError
from core.incidence import (
    LineClass, PointConfig, all_covers, bad_quadruples, collin, cross_lines, lines_at_least, min_line_cover,
    ordinary_lines, ordinary_lines_at_least, pairs_inside,
)
from core.settings import Settings, get_settings
from core.shatter import isolate

logger = logging.getLogger(__name__)


class Condition(Enum):
    """Labels of the checked conditions"""
    O = "O"
    F2_COVER = "F2-cover"
    F2_NO_4_COLLINEAR = "F2-no4collinear"
    A1 = "A1"
    A2 = "A2"
    B1 = "B1"
    B2 = "B2"


class B2Reading(Enum):
    """How "l meets l_y" is read in condition B2"""
    POINT_SET = "point-set"  # the two lines share a point of P
    PLANE = "plane"          # the two lines are not parallel


@dataclass
class AxiomVerdict:
    """Result of checking one condition"""
    condition: Condition
    holds: bool
    counterexample: Optional[Dict[str, object]] = None
    witness: Optional[Dict[str, object]] = None

    def __post_init__(self):
        if self.holds != (self.counterexample is None):
            raise ValueError("A counterexample is present exactly when the condition fails")

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> dict:
        return {
            'condition': self.condition.value,
            'holds': self.holds,
            'counterexample': self.counterexample,
            'witness': self.witness,
        }


def _classes_dicts(classes: Sequence[LineClass]) -> List[dict]:
    return [c.to_dict() for c in classes]


def check_O(cfg: PointConfig) -> AxiomVerdict:
    """P is covered by at most three lines"""
    m, cover = min_line_cover(cfg)
    if m <= 3:
        return AxiomVerdict(Condition.O, True, witness={'cover': _classes_dicts(cover)})
    return AxiomVerdict(Condition.O, False, counterexample={'min_cover_size': m, 'cover': _classes_dicts(cover)})


def check_F2(cfg: PointConfig) -> Tuple[AxiomVerdict, AxiomVerdict]:
    """Two-line cover and no four collinear points, for five points"""
    if cfg.n != 5:
        raise WrongSizeError(f"The two-line conditions concern 5 points, got {cfg.n}")
    m, cover = min_line_cover(cfg)
    if m <= 2:
        covered = AxiomVerdict(Condition.F2_COVER, True, witness={'cover': _classes_dicts(cover)})
    else:
        covered = AxiomVerdict(Condition.F2_COVER, False, counterexample={'min_cover_size': m})
    heavy = lines_at_least(cfg, 4)
    if heavy:
        spread = AxiomVerdict(Condition.F2_NO_4_COLLINEAR, False, counterexample={'line': heavy[0].to_dict()})
    else:
        spread = AxiomVerdict(Condition.F2_NO_4_COLLINEAR, True)
    return covered, spread


def is_pairing_four(cfg: PointConfig, four: Sequence[int]) -> bool:
    return any(pairs_inside(cfg, four, i, j) for i, j in combinations(four, 2))


def check_A1(cfg: PointConfig) -> AxiomVerdict:
    """Every four points contain two that pair inside them"""
    for four in combinations(range(cfg.n), 4):
        if not is_pairing_four(cfg, four):
            return AxiomVerdict(Condition.A1, False, counterexample={'subset': list(four)})
    return AxiomVerdict(Condition.A1, True)


def check_A2(cfg: PointConfig) -> AxiomVerdict:
    """Every point of a line with >= 4 points lies on another line with >= 3 points"""
    heavy_lines = lines_at_least(cfg, 3)
    for line in lines_at_least(cfg, 4):
        for x in line.trace:
            if not any(x in other.trace for other in heavy_lines if other != line):
                return AxiomVerdict(Condition.A2, False,
                                    counterexample={'line': line.to_dict(), 'point': x})
    return AxiomVerdict(Condition.A2, True)


def _require_no_four_collinear(cfg: PointConfig, label: str):
    if collin(cfg) > 3:
        raise PreconditionError(f"{label} is stated for configurations without four collinear points")


def _minimum_covers(cfg: PointConfig) -> List[Tuple[LineClass, ...]]:
    m, _ = min_line_cover(cfg)
    return all_covers(cfg, m)


def check_B1(cfg: PointConfig) -> AxiomVerdict:
    """For every minimum cover, every point lies on exactly two cross-lines"""
    _require_no_four_collinear(cfg, "B1")
    for cover in _minimum_covers(cfg):
        crossing = cross_lines(cfg, cover)
        for x in range(cfg.n):
            degree = sum(1 for line in crossing if x in cfg.incidence_cache[line])
            if degree != 2:
                return AxiomVerdict(Condition.B1, False, counterexample={
                    'cover': _classes_dicts(cover), 'point': x, 'degree': degree,
                })
    return AxiomVerdict(Condition.B1, True)


def _meets(cfg: PointConfig, first, second, reading: B2Reading) -> bool:
    if reading is B2Reading.POINT_SET:
        return bool(set(cfg.incidence_cache[first]) & set(cfg.incidence_cache[second]))
    return first == second or not first.is_parallel(second)


def b2_witness(cfg: PointConfig, cover: Sequence[LineClass],
               reading: B2Reading = B2Reading.POINT_SET) -> Optional[Dict[str, object]]:
    """y, two y-cross-lines and a cross-line avoiding y that meets both, for one cover"""
    crossing = sorted(cross_lines(cfg, cover), key=lambda line: cfg.incidence_cache[line])
    for y in range(cfg.n):
        through = [line for line in crossing if y in cfg.incidence_cache[line]]
        avoiding = [line for line in crossing if y not in cfg.incidence_cache[line]]
        for first, second in combinations(through, 2):
            for line in avoiding:
                if _meets(cfg, line, first, reading) and _meets(cfg, line, second, reading):
                    return {
                        'y': y,
                        'y_cross_lines': [list(cfg.incidence_cache[first]), list(cfg.incidence_cache[second])],
                        'cross_line': list(cfg.incidence_cache[line]),
                    }
    return None


def check_B2(cfg: PointConfig, reading: B2Reading = B2Reading.POINT_SET) -> AxiomVerdict:
    """For every minimum cover some y has two cross-lines both met by a cross-line avoiding y"""
    _require_no_four_collinear(cfg, "B2")
    witnesses = []
    for cover in _minimum_covers(cfg):
        found = b2_witness(cfg, cover, reading)
        if found is None:
            return AxiomVerdict(Condition.B2, False, counterexample={
                'cover': _classes_dicts(cover), 'reading': reading.value,
            })
        witnesses.append(found)
    return AxiomVerdict(Condition.B2, True, witness={'reading': reading.value, 'per_cover': witnesses})


X_LABELS = ('a1', 'a2', 'a3', 'b1', 'b2', 'b3', 'c1', 'c2', 'c3')

X_TRIPLES = (
    ('a1', 'a2', 'a3'), ('b1', 'b2', 'b3'), ('c1', 'c2', 'c3'),
    ('a1', 'b1', 'c2'), ('a1', 'b2', 'c3'), ('a2', 'b1', 'c1'),
    ('a2', 'b3', 'c3'), ('a3', 'b2', 'c1'), ('a3', 'b3', 'c2'),
)


def is_x_configuration(cfg: PointConfig) -> Tuple[bool, Optional[Dict[str, int]]]:
    """Detect the nine-triple pattern; returns a witnessing labeling when present"""
    if cfg.n != 9:
        raise WrongSizeError(f"X-configurations have 9 points, got {cfg.n}")
    if collin(cfg) > 3:
        return False, None
    triples = {frozenset(line.trace) for line in lines_at_least(cfg, 3)}
    if len(triples) != len(X_TRIPLES):
        return False, None

    wanted = [tuple(X_LABELS.index(name) for name in triple) for triple in X_TRIPLES]
    rows = sorted(triples, key=sorted)
    for a_row, b_row, c_row in permutations(rows, 3):
        if a_row & b_row or a_row & c_row or b_row & c_row:
            continue
        for a in permutations(sorted(a_row)):
            for b in permutations(sorted(b_row)):
                for c in permutations(sorted(c_row)):
                    labeling = a + b + c
                    image = {frozenset(labeling[i] for i in triple) for triple in wanted}
                    if image == triples:
                        return True, {name: labeling[i] for i, name in enumerate(X_LABELS)}
    return False, None


def has_triple_ordinary_fan(cfg: PointConfig, line: LineClass, x: int) -> bool:
    """Three lines through x, each with >= 3 points and meeting the line in one point of P"""
    fan = [other for other in ordinary_lines_at_least(cfg, line, 3) if x in cfg.incidence_cache[other]]
    return len(fan) >= 3


def four_lines_intersect(cfg: PointConfig) -> bool:
    """Any two sets of four collinear points intersect"""
    fours = [set(c.trace) for c in lines_at_least(cfg, 4)]
    for first, second in combinations(fours, 2):
        for a in combinations(sorted(first), 4):
            for b in combinations(sorted(second), 4):
                if not set(a) & set(b):
                    return False
    return True


def all_fours_pairing(cfg: PointConfig) -> bool:
    return all(is_pairing_four(cfg, four) for four in combinations(range(cfg.n), 4))


def _collin_within(cfg: PointConfig, subset: Sequence[int]) -> int:
    if len(subset) <= 2:
        return len(subset)
    inside = set(subset)
    return max(len(inside.intersection(c.trace)) for c in cfg.classes)


def triples_off_line(cfg: PointConfig, line: LineClass) -> List[Tuple[int, ...]]:
    """Collinear triples of P avoiding the line, taken from every line with three points off it"""
    rest = set(range(cfg.n)) - set(line.trace)
    found = {
        t for c in lines_at_least(cfg, 3) for t in combinations(sorted(set(c.trace) & rest), 3)
    }
    return sorted(found)


def case_a_properties(cfg: PointConfig) -> Dict[str, bool]:
    """Structural facts every nine-point set with a 4-line satisfying O, A1 and A2 has

    Each entry is decided by direct enumeration, so a False value points
    at a configuration where the consequence breaks.
    """
    if cfg.n != 9:
        raise WrongSizeError(f"These facts concern 9 points, got {cfg.n}")
    fours = lines_at_least(cfg, 4)
    if not fours:
        raise PreconditionError("These facts concern configurations with four collinear points")
    everything = set(range(cfg.n))
    facts: Dict[str, bool] = {
        'collin_is_four': collin(cfg) == 4,
        'four_sets_intersect': four_lines_intersect(cfg),
        'unique_three_cover': len(all_covers(cfg, 3)) == 1,
        'no_triple_ordinary_fan': not any(
            has_triple_ordinary_fan(cfg, line, x) for line in fours for x in everything - set(line.trace)
        ),
    }

    meets_triples = True
    for line in fours:
        triples = [set(t) for t in triples_off_line(cfg, line)]
        for k in ordinary_lines(cfg, line, 3):
            if any(not triple.intersection(cfg.incidence_cache[k]) for triple in triples):
                meets_triples = False
    facts['ordinary_three_lines_meet_triples'] = meets_triples

    no_bad = True
    for line in fours:
        rest = sorted(everything - set(line.trace))
        for B in combinations(rest, 3):
            if bad_quadruples(cfg, line.trace, B):
                no_bad = False
    facts['no_bad_quadruples'] = no_bad

    ordinary_three = [set(cfg.incidence_cache[k]) for line in fours for k in ordinary_lines(cfg, line, 3)]
    four_collinear_ok = spread_ok = mixed_ok = True
    for size in range(1, cfg.n + 1):
        for subset in combinations(range(cfg.n), size):
            c = _collin_within(cfg, subset)
            if c == 4:
                four_collinear_ok &= isolate(cfg, subset, 3) is not None
            elif size in (5, 6) and c <= 2:
                spread_ok &= isolate(cfg, subset, 3) is not None
            elif size in (5, 6) and c == 3 and not any(k <= set(subset) for k in ordinary_three):
                mixed_ok &= isolate(cfg, subset, 3) is not None
    facts['four_collinear_subsets_isolated'] = four_collinear_ok
    facts['spread_subsets_isolated'] = spread_ok
    facts['three_collinear_subsets_isolated'] = mixed_ok
    return facts


@dataclass
class F3Characterization:
    """Which axiom family applies and what it predicts for three lines"""
    has_four_collinear: bool
    verdicts: List[AxiomVerdict] = field(default_factory=list)
    predicted_shattered: bool = False

    def verdict(self, condition: Condition) -> Optional[AxiomVerdict]:
        for v in self.verdicts:
            if v.condition is condition:
                return v
        return None

    def to_dict(self) -> dict:
        return {
            'has_four_collinear': self.has_four_collinear,
            'verdicts': [v.to_dict() for v in self.verdicts],
            'predicted_shattered': self.predicted_shattered,
        }


def characterize_F3(cfg: PointConfig, reading: B2Reading = B2Reading.POINT_SET) -> F3Characterization:
    """Predict shattering of nine points by three lines from the axioms"""
    if cfg.n != 9:
        raise WrongSizeError(f"The three-line characterization concerns 9 points, got {cfg.n}")
    has_four = collin(cfg) >= 4
    o = check_O(cfg)
    verdicts = [o]
    if has_four:
        verdicts += [check_A1(cfg), check_A2(cfg)]
    elif o.holds:
        verdicts += [check_B1(cfg), check_B2(cfg, reading)]
    # without a 3-cover B1/B2 are not evaluated; O alone decides
    predicted = all(v.holds for v in verdicts)
    logger.debug("Three-line prediction %s (four collinear: %s)", predicted, has_four)
    return F3Characterization(has_four, verdicts, predicted)


def characterize_F2(cfg: PointConfig) -> Tuple[AxiomVerdict, AxiomVerdict, bool]:
    cover, spread = check_F2(cfg)
    return cover, spread, cover.holds and spread.holds


def axiom_report(cfg: PointConfig, reading: B2Reading = B2Reading.POINT_SET,
                 settings: Optional[Settings] = None) -> Dict[str, object]:
    """Every condition that applies to the configuration

    B1 and B2 enumerate subsets of P, so the configuration is held to the
    shatter size limit before anything is checked.
    """
    settings = settings or get_settings()
    if cfg.n > settings.shatter_size_limit:
        raise SizeLimitError(cfg.n, settings.shatter_size_limit)
    verdicts = [check_O(cfg), check_A1(cfg), check_A2(cfg)]
    if cfg.n == 5:
        verdicts += list(check_F2(cfg))
    report: Dict[str, object] = {'n': cfg.n, 'collin': collin(cfg)}
    if collin(cfg) <= 3:
        verdicts += [check_B1(cfg), check_B2(cfg, reading)]
    if cfg.n == 9:
        is_x, labeling = is_x_configuration(cfg)
        report['x_configuration'] = {'holds': is_x, 'labeling': labeling}
        report['predicted_shattered_by_3'] = characterize_F3(cfg, reading).predicted_shattered
    report['verdicts'] = [v.to_dict() for v in verdicts]
    return report
