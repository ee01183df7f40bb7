"""
Shatter-isomorphism for PyShatter
Trace-class structures, isomorphism certificates and the small-case classifier
"""

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms import isomorphism as nx_iso

from core.errors import NotShatteredError, PreconditionError, WrongSizeError
from core.incidence import IndexSet, PointConfig, lines_at_least, ordinary_lines_at_least
from core.shatter import shatters

logger = logging.getLogger(__name__)


class CaseLabel(Enum):
    """Isomorphism types of maximum sets shattered by two and three lines"""
    F2_I = "F2-I"
    F2_II = "F2-II"
    F3_IA = "F3-Ia"
    F3_IB = "F3-Ib"
    F3_IIA = "F3-IIa"
    F3_IIB = "F3-IIb"
    F3_III = "F3-III"

    @property
    def k(self) -> int:
        return 2 if self.value.startswith("F2") else 3


@dataclass(frozen=True)
class ShatterStructure:
    """Points 0..n-1 and the trace classes a family induces on them

    Planar structures keep the classes of S^2_P (size >= 2); the singleton
    and empty classes exist for every configuration and are left implicit.
    Abstract structures keep every distinct trace.
    """
    n: int
    classes: Tuple[IndexSet, ...]

    def __post_init__(self):
        normalized = tuple(sorted({tuple(sorted(c)) for c in self.classes}, key=lambda c: (len(c), c)))
        for c in normalized:
            if any(not 0 <= i < self.n for i in c):
                raise ValueError(f"Class {c} mentions points outside 0..{self.n - 1}")
        object.__setattr__(self, 'classes', normalized)

    def size_multiset(self) -> Tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.classes), reverse=True))

    def point_profiles(self) -> List[Tuple[int, ...]]:
        profiles: List[List[int]] = [[] for _ in range(self.n)]
        for c in self.classes:
            for i in c:
                profiles[i].append(len(c))
        return [tuple(sorted(p, reverse=True)) for p in profiles]

    def invariant(self) -> Tuple:
        return (self.n, len(self.classes), self.size_multiset(), tuple(sorted(self.point_profiles())))

    def is_linear_space(self) -> bool:
        """Every pair of points lies in exactly one class"""
        seen: Counter = Counter()
        for c in self.classes:
            for position, i in enumerate(c):
                for j in c[position + 1:]:
                    seen[(i, j)] += 1
        return all(seen[(i, j)] == 1 for i in range(self.n) for j in range(i + 1, self.n))

    def relabeled(self, bijection: Sequence[int]) -> 'ShatterStructure':
        return ShatterStructure(self.n, tuple(tuple(bijection[i] for i in c) for c in self.classes))

    def to_graph(self) -> nx.Graph:
        graph = nx.Graph()
        for i in range(self.n):
            graph.add_node(('p', i), kind='point')
        for j, c in enumerate(self.classes):
            graph.add_node(('c', j), kind='class', size=len(c))
            for i in c:
                graph.add_edge(('p', i), ('c', j))
        return graph

    def to_dict(self) -> dict:
        return {'n': self.n, 'classes': [list(c) for c in self.classes]}


@dataclass(frozen=True)
class IsoCertificate:
    """Point bijection and the class relabeling it induces"""
    bijection: Tuple[int, ...]
    class_relabeling: Tuple[int, ...]

    def verify(self, source: ShatterStructure, target: ShatterStructure) -> bool:
        if source.n != target.n or len(source.classes) != len(target.classes):
            return False
        if sorted(self.bijection) != list(range(source.n)):
            return False
        if sorted(self.class_relabeling) != list(range(len(source.classes))):
            return False
        for j, c in enumerate(source.classes):
            image = tuple(sorted(self.bijection[i] for i in c))
            if image != target.classes[self.class_relabeling[j]]:
                return False
        return True

    def inverse(self) -> 'IsoCertificate':
        points = [0] * len(self.bijection)
        for i, image in enumerate(self.bijection):
            points[image] = i
        classes = [0] * len(self.class_relabeling)
        for j, image in enumerate(self.class_relabeling):
            classes[image] = j
        return IsoCertificate(tuple(points), tuple(classes))

    def compose(self, then: 'IsoCertificate') -> 'IsoCertificate':
        """Apply self first, then the other certificate"""
        return IsoCertificate(
            tuple(then.bijection[image] for image in self.bijection),
            tuple(then.class_relabeling[image] for image in self.class_relabeling),
        )

    def to_dict(self) -> dict:
        return {'bijection': list(self.bijection), 'class_relabeling': list(self.class_relabeling)}


def shatter_structure(cfg: PointConfig) -> ShatterStructure:
    """The ~_P quotient of the lines through at least two points"""
    return ShatterStructure(cfg.n, tuple(c.trace for c in cfg.classes))


def _node_match(first: dict, second: dict) -> bool:
    return first['kind'] == second['kind'] and first.get('size') == second.get('size')


def shatter_isomorphic(source: ShatterStructure, target: ShatterStructure) -> Optional[IsoCertificate]:
    """A certificate that the structures agree up to relabeling, or None"""
    if source.invariant() != target.invariant():
        return None
    matcher = nx_iso.GraphMatcher(source.to_graph(), target.to_graph(), node_match=_node_match)
    if not matcher.is_isomorphic():
        return None
    points = [0] * source.n
    classes = [0] * len(source.classes)
    for node, image in matcher.mapping.items():
        if node[0] == 'p':
            points[node[1]] = image[1]
        else:
            classes[node[1]] = image[1]
    certificate = IsoCertificate(tuple(points), tuple(classes))
    if not certificate.verify(source, target):
        raise AssertionError("graph isomorphism did not induce a structure isomorphism")
    return certificate


def isomorphism_types(structures: Iterable[ShatterStructure]) -> List[List[int]]:
    """Group structures into isomorphism classes; returns index lists in first-seen order"""
    groups: List[List[int]] = []
    representatives: List[ShatterStructure] = []
    for index, structure in enumerate(structures):
        for group, rep in zip(groups, representatives):
            if shatter_isomorphic(rep, structure) is not None:
                group.append(index)
                break
        else:
            groups.append([index])
            representatives.append(structure)
    return groups


def _classify_two(cfg: PointConfig) -> CaseLabel:
    triples = lines_at_least(cfg, 3)
    if len(triples) == 1:
        return CaseLabel.F2_I
    if len(triples) == 2:
        return CaseLabel.F2_II
    raise PreconditionError(f"A shattered 5-set has one or two collinear triples, found {len(triples)}")


def _classify_three(cfg: PointConfig) -> CaseLabel:
    fours = lines_at_least(cfg, 4)
    if not fours:
        return CaseLabel.F3_III
    if len(fours) == 1:
        l_a = fours[0]
        rest = set(range(cfg.n)) - set(l_a.trace)
        l_b = [c for c in lines_at_least(cfg, 3) if set(c.trace) <= rest]
        if len(l_b) != 1:
            raise PreconditionError(f"Expected one collinear triple off the 4-line, found {len(l_b)}")
        fan = ordinary_lines_at_least(cfg, l_a, 3)
        counts = tuple(sorted(
            sum(1 for line in fan if b in cfg.incidence_cache[line]) for b in l_b[0].trace
        ))
        if counts == (0, 2, 2):
            return CaseLabel.F3_IA
        if counts == (1, 1, 2):
            return CaseLabel.F3_IB
        raise PreconditionError(f"Unexpected ordinary-line pattern {counts} on the collinear triple")
    # A second 4-line meets the first; a third exists exactly when some
    # ordinary line through the 4-line carries both remaining points.
    return CaseLabel.F3_IIB if len(fours) >= 3 else CaseLabel.F3_IIA


def classify_case(cfg: PointConfig, k: int, verify: bool = True) -> CaseLabel:
    """Isomorphism type of a maximum set shattered by k lines, k in {2, 3}"""
    sizes = {2: 5, 3: 9}
    if k not in sizes:
        raise ValueError(f"Classification is available for k = 2 or 3, got {k}")
    if cfg.n != sizes[k]:
        raise WrongSizeError(f"Classification for k={k} needs {sizes[k]} points, got {cfg.n}")
    if verify:
        report = shatters(cfg, k)
        if not report.shattered:
            raise NotShatteredError(f"Configuration is not shattered by {k} lines", report.failing_subset)
    label = _classify_two(cfg) if k == 2 else _classify_three(cfg)
    logger.debug("Classified %d points as %s", cfg.n, label.value)
    return label
