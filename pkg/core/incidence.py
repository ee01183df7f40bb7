"""
Incidence structures for PyShatter
Lines through a finite point configuration, covers, cross-lines, nodes and matchings
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx
from networkx.algorithms import bipartite

from core.errors import DuplicatePointError, OverlappingSetsError, PointIndexError, PreconditionError
from core.geometry import AffineMap2D, Line, Point, line_through

logger = logging.getLogger(__name__)

IndexSet = Tuple[int, ...]


def mask_of(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def indices_of(mask: int) -> IndexSet:
    result = []
    i = 0
    while mask:
        if mask & 1:
            result.append(i)
        mask >>= 1
        i += 1
    return tuple(result)


@dataclass(frozen=True, order=True)
class LineClass:
    """A class of lines with equal trace on P

    Classes with two or more points carry their concrete line. A singleton
    class stands for every line meeting P in exactly one point and has no
    coordinates.
    """
    trace: IndexSet
    line: Optional[Line] = field(default=None, compare=False)

    @property
    def is_singleton(self) -> bool:
        return self.line is None

    @cached_property
    def mask(self) -> int:
        return mask_of(self.trace)

    def __len__(self) -> int:
        return len(self.trace)

    def to_dict(self) -> dict:
        data = {'trace': list(self.trace)}
        if self.line is not None:
            data.update(self.line.to_dict())
        else:
            data['coeffs'] = None
        return data


LineLike = Union[Line, LineClass]


class PointConfig:
    """A finite labeled point set with its cached incidence structure"""

    def __init__(self, points: Sequence[Point]):
        self.points: Tuple[Point, ...] = tuple(points)
        seen: Dict[Point, int] = {}
        for index, p in enumerate(self.points):
            if p in seen:
                raise DuplicatePointError(seen[p], index)
            seen[p] = index

        buckets: Dict[Line, Set[int]] = {}
        for i, j in combinations(range(len(self.points)), 2):
            line = line_through(self.points[i], self.points[j])
            bucket = buckets.setdefault(line, set())
            bucket.add(i)
            bucket.add(j)
        self.incidence_cache: Dict[Line, IndexSet] = {
            line: tuple(sorted(bucket)) for line, bucket in buckets.items()
        }
        self._pair_lines: Dict[Tuple[int, int], Line] = {}
        for line, trace in self.incidence_cache.items():
            for i, j in combinations(trace, 2):
                self._pair_lines[(i, j)] = line

    @property
    def n(self) -> int:
        return len(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"PointConfig({list(self.points)!r})"

    @cached_property
    def classes(self) -> Tuple[LineClass, ...]:
        """Classes of S^2_P sorted by trace"""
        return tuple(sorted(LineClass(trace, line) for line, trace in self.incidence_cache.items()))

    @cached_property
    def class_masks(self) -> Tuple[int, ...]:
        return tuple(c.mask for c in self.classes)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def singleton(self, i: int) -> LineClass:
        self.check_index(i)
        return LineClass((i,), None)

    def check_index(self, i: int):
        if not 0 <= i < self.n:
            raise PointIndexError(f"Point index {i} out of range for {self.n} points")

    def check_indices(self, indices: Iterable[int]):
        for i in indices:
            self.check_index(i)

    def line_of_pair(self, i: int, j: int) -> Line:
        """l_{a,b} for two distinct indices"""
        self.check_index(i)
        self.check_index(j)
        if i == j:
            raise PreconditionError(f"Pair needs two distinct indices, got {i} twice")
        return self._pair_lines[(min(i, j), max(i, j))]

    def class_of_pair(self, i: int, j: int) -> LineClass:
        line = self.line_of_pair(i, j)
        return LineClass(self.incidence_cache[line], line)

    def trace(self, line: LineLike) -> IndexSet:
        """Indices of the configuration points on a line or line class"""
        if isinstance(line, LineClass):
            return line.trace
        cached = self.incidence_cache.get(line)
        if cached is not None:
            return cached
        return tuple(i for i, p in enumerate(self.points) if line.contains(p))

    def as_class(self, line: LineLike) -> LineClass:
        if isinstance(line, LineClass):
            return line
        trace = self.trace(line)
        if len(trace) >= 2:
            return LineClass(trace, line)
        if len(trace) == 1:
            return LineClass(trace, None)
        return LineClass((), None)

    def subconfig(self, indices: Iterable[int]) -> 'PointConfig':
        indices = sorted(indices)
        self.check_indices(indices)
        return PointConfig([self.points[i] for i in indices])

    def transformed(self, affine: AffineMap2D) -> 'PointConfig':
        return PointConfig([affine.apply(p) for p in self.points])

    def to_dict(self) -> dict:
        return {'points': [p.to_list() for p in self.points]}

    @classmethod
    def from_dict(cls, data: dict) -> 'PointConfig':
        return cls([Point.from_list(item) for item in data['points']])

    def incidence_report(self) -> dict:
        return {
            'n': self.n,
            'lines': [c.to_dict() for c in self.classes],
        }


@dataclass
class Matching:
    """Lines covering A and B with at most one point of each side per line"""
    lines: List[LineClass]
    assignment: Dict[int, LineClass]

    def to_dict(self) -> dict:
        return {
            'lines': [c.to_dict() for c in self.lines],
            'assignment': {str(i): list(c.trace) for i, c in sorted(self.assignment.items())},
        }


class PairingCover(Matching):
    """max(|A|, |B|) lines pairing the smaller side into the larger"""


def build_config(points: Sequence[Point]) -> PointConfig:
    return PointConfig(points)


def n_lines(cfg: PointConfig, n: int) -> Set[Line]:
    """Lines meeting P in exactly n points"""
    if n < 2:
        raise ValueError(f"n-lines are defined for n >= 2, got {n}")
    return {line for line, trace in cfg.incidence_cache.items() if len(trace) == n}


def lines_at_least(cfg: PointConfig, n: int) -> List[LineClass]:
    return [c for c in cfg.classes if len(c) >= n]


def collin(cfg: PointConfig) -> int:
    """Maximum number of collinear points"""
    if cfg.n <= 1:
        return cfg.n
    return max(len(trace) for trace in cfg.incidence_cache.values())


def _cover_search(cfg: PointConfig, candidates: Sequence[LineClass], budget: int) -> Optional[List[LineClass]]:
    """Depth-first cover of P by at most budget candidates, branching on the lowest uncovered point"""
    by_point: List[List[LineClass]] = [[] for _ in range(cfg.n)]
    for c in candidates:
        for i in c.trace:
            by_point[i].append(c)
    widest = max((len(c) for c in candidates), default=1)

    def search(uncovered: int, remaining: int, chosen: List[LineClass]) -> Optional[List[LineClass]]:
        if uncovered == 0:
            return list(chosen)
        if remaining == 0 or bin(uncovered).count('1') > remaining * widest:
            return None
        lowest = (uncovered & -uncovered).bit_length() - 1
        for c in by_point[lowest]:
            chosen.append(c)
            found = search(uncovered & ~c.mask, remaining - 1, chosen)
            chosen.pop()
            if found is not None:
                return found
        return None

    return search(cfg.full_mask, budget, [])


def min_line_cover(cfg: PointConfig) -> Tuple[int, List[LineClass]]:
    """m_P and the first minimum cover in trace order"""
    if cfg.n == 0:
        return 0, []
    if cfg.n == 1:
        return 1, [cfg.singleton(0)]
    for size in range(1, cfg.n + 1):
        cover = _cover_search(cfg, cfg.classes, size)
        if cover is not None:
            logger.debug("Minimum cover of %d points uses %d lines", cfg.n, size)
            return size, sorted(cover)
    raise AssertionError("pairs of points always cover P")


def all_classes(cfg: PointConfig) -> List[LineClass]:
    """S^2_P together with one singleton class per point, in trace order"""
    return sorted(list(cfg.classes) + [cfg.singleton(i) for i in range(cfg.n)])


def all_covers(cfg: PointConfig, k: int) -> List[Tuple[LineClass, ...]]:
    """Every k-set of distinct classes whose union contains P"""
    candidates = all_classes(cfg)
    by_point: List[List[LineClass]] = [[] for _ in range(cfg.n)]
    for c in candidates:
        for i in c.trace:
            by_point[i].append(c)

    # Every k-cover contains a cover found by branching on the lowest
    # uncovered point; the rest of it is arbitrary padding.
    cores: Set[FrozenSet[LineClass]] = set()

    def search(uncovered: int, chosen: List[LineClass]):
        if uncovered == 0:
            cores.add(frozenset(chosen))
            return
        if len(chosen) == k:
            return
        lowest = (uncovered & -uncovered).bit_length() - 1
        for c in by_point[lowest]:
            if c in chosen:
                continue
            chosen.append(c)
            search(uncovered & ~c.mask, chosen)
            chosen.pop()

    if k >= 0:
        search(cfg.full_mask, [])

    covers: Set[Tuple[LineClass, ...]] = set()
    for core in cores:
        rest = [c for c in candidates if c not in core]
        for padding in combinations(rest, k - len(core)):
            covers.add(tuple(sorted(core.union(padding))))
    return sorted(covers)


def pairs_inside(cfg: PointConfig, A: Iterable[int], i: int, j: int) -> bool:
    """True if the line through i and j meets P only inside A"""
    A = set(A)
    cfg.check_indices(A)
    cfg.check_index(i)
    cfg.check_index(j)
    if i == j:
        raise PreconditionError(f"Pairing needs two distinct points, got {i} twice")
    if i not in A or j not in A:
        raise PreconditionError(f"Points {i} and {j} must both lie in A")
    return set(cfg.incidence_cache[cfg.line_of_pair(i, j)]) <= A


def ordinary_lines(cfg: PointConfig, line: LineLike, n: int) -> Set[Line]:
    """O_n(l): n-lines meeting l in exactly one point of P"""
    base = set(cfg.trace(line))
    if not base:
        raise PreconditionError("Ordinary lines are taken relative to a line meeting P")
    return {
        other for other, trace in cfg.incidence_cache.items()
        if len(trace) == n and len(base.intersection(trace)) == 1
    }


def ordinary_lines_at_least(cfg: PointConfig, line: LineLike, n: int) -> Set[Line]:
    """O_{>=n}(l)"""
    base = set(cfg.trace(line))
    if not base:
        raise PreconditionError("Ordinary lines are taken relative to a line meeting P")
    return {
        other for other, trace in cfg.incidence_cache.items()
        if len(trace) >= n and len(base.intersection(trace)) == 1
    }


def cross_lines(cfg: PointConfig, cover: Sequence[LineLike]) -> Set[Line]:
    """Lines of S^2_P meeting every cover line in exactly one point of P"""
    cover_traces = [set(cfg.trace(item)) for item in cover]
    return {
        line for line, trace in cfg.incidence_cache.items()
        if all(len(ct.intersection(trace)) == 1 for ct in cover_traces)
    }


def node_degree(cfg: PointConfig, cover: Sequence[LineLike], p: int) -> int:
    """Number of cross-lines through p"""
    cfg.check_index(p)
    return sum(1 for line in cross_lines(cfg, cover) if p in cfg.incidence_cache[line])


def _check_disjoint(cfg: PointConfig, A: Iterable[int], B: Iterable[int]) -> Tuple[Set[int], Set[int]]:
    A, B = set(A), set(B)
    cfg.check_indices(A | B)
    overlap = A & B
    if overlap:
        raise OverlappingSetsError(f"A and B share points {sorted(overlap)}")
    return A, B


def _is_bad(cfg: PointConfig, union: Set[int], a: int, b: int) -> bool:
    return any(i not in union for i in cfg.incidence_cache[cfg.line_of_pair(a, b)])


def bad_pairs(cfg: PointConfig, A: Iterable[int], B: Iterable[int]) -> Set[Tuple[int, int]]:
    """Pairs (a, b) whose line meets P outside A and B"""
    A, B = _check_disjoint(cfg, A, B)
    union = A | B
    return {(a, b) for a in sorted(A) for b in sorted(B) if _is_bad(cfg, union, a, b)}


def bad_quadruples(cfg: PointConfig, A: Iterable[int], B: Iterable[int]) -> Set[Tuple[int, int, int, int]]:
    """Quadruples (a, a', b, b') with a < a', b < b' and all four cross pairs bad"""
    A, B = _check_disjoint(cfg, A, B)
    bad = bad_pairs(cfg, A, B)
    return {
        (a1, a2, b1, b2)
        for a1, a2 in combinations(sorted(A), 2)
        for b1, b2 in combinations(sorted(B), 2)
        if {(a1, b1), (a1, b2), (a2, b1), (a2, b2)} <= bad
    }


def _pairs_cleanly(cfg: PointConfig, a: int, b: int) -> bool:
    """True if l_{a,b} is a 2-line, the only way to serve one point of each side and nothing else"""
    return len(cfg.incidence_cache[cfg.line_of_pair(a, b)]) == 2


def find_matching(cfg: PointConfig, A: Iterable[int], B: Iterable[int],
                  max_lines: Optional[int] = None) -> Optional[Matching]:
    """A matching of A and B in P with the fewest lines, or None if that exceeds max_lines

    Each line carries at most one point of A, at most one point of B and no
    other point of P. Points that cannot be paired get singleton lines, so a
    matching always exists; it uses |A| + |B| - m lines where m is the size
    of a maximum bipartite matching over the 2-lines joining A to B.
    """
    A, B = _check_disjoint(cfg, A, B)
    graph = nx.Graph()
    graph.add_nodes_from(sorted(A), bipartite=0)
    graph.add_nodes_from(sorted(B), bipartite=1)
    graph.add_edges_from(
        (a, b) for a in sorted(A) for b in sorted(B) if _pairs_cleanly(cfg, a, b)
    )
    partner: Dict[int, int] = {}
    if graph.number_of_edges():
        pairs = bipartite.hopcroft_karp_matching(graph, top_nodes=sorted(A))
        partner = {a: pairs[a] for a in sorted(A) if a in pairs}

    assignment: Dict[int, LineClass] = {}
    lines: List[LineClass] = []
    for a, b in sorted(partner.items()):
        c = cfg.class_of_pair(a, b)
        lines.append(c)
        assignment[a] = c
        assignment[b] = c
    for i in sorted(A | B):
        if i not in assignment:
            c = cfg.singleton(i)
            lines.append(c)
            assignment[i] = c
    logger.debug("Matching of %s and %s pairs %d points and uses %d lines",
                 sorted(A), sorted(B), len(partner), len(lines))
    if max_lines is not None and len(lines) > max_lines:
        return None
    return Matching(lines, assignment)


def is_valid_matching(cfg: PointConfig, A: Iterable[int], B: Iterable[int], matching: Matching) -> bool:
    """Independent re-check of a matching against the definition"""
    A, B = set(A), set(B)
    union = A | B
    covered: Set[int] = set()
    for c in matching.lines:
        trace = set(cfg.trace(c.line)) if c.line is not None else set(c.trace)
        if not trace <= union:
            return False
        if len(trace & A) > 1 or len(trace & B) > 1:
            return False
        covered |= trace
    if not union <= covered:
        return False
    for i in union:
        c = matching.assignment.get(i)
        if c is None or c not in matching.lines or i not in c.trace:
            return False
    return True


def pairing_cover(cfg: PointConfig, A: Iterable[int], B: Iterable[int]) -> Optional[PairingCover]:
    """Exactly max(|A|, |B|) distinct lines covering A and B, or None

    The smaller side is paired injectively into the larger by lines l_{a,b}
    that avoid P outside A and B. A pairing line may carry further points of
    A or B, so the result is in general not a matching; leftover points of
    the larger side get singleton lines.
    """
    A, B = _check_disjoint(cfg, A, B)
    small, large = (A, B) if len(A) <= len(B) else (B, A)
    small_sorted, large_sorted = sorted(small), sorted(large)
    union = A | B

    usable = {
        (s, t): not _is_bad(cfg, union, s, t)
        for s in small_sorted for t in large_sorted
    }
    for image in permutations(large_sorted, len(small_sorted)):
        if not all(usable[(s, t)] for s, t in zip(small_sorted, image)):
            continue
        pair_lines = [cfg.line_of_pair(s, t) for s, t in zip(small_sorted, image)]
        if len(set(pair_lines)) < len(pair_lines):
            continue
        assignment: Dict[int, LineClass] = {}
        lines: List[LineClass] = []
        for s, t in zip(small_sorted, image):
            c = cfg.class_of_pair(s, t)
            lines.append(c)
            assignment[s] = c
            assignment[t] = c
        for t in large_sorted:
            if t not in assignment:
                c = cfg.singleton(t)
                lines.append(c)
                assignment[t] = c
        return PairingCover(lines, assignment)
    logger.debug("No pairing cover of %s and %s", sorted(A), sorted(B))
    return None


def is_valid_pairing_cover(cfg: PointConfig, A: Iterable[int], B: Iterable[int], cover: PairingCover) -> bool:
    """Re-check of a pairing cover: line count, coverage, and one pair per line"""
    A, B = set(A), set(B)
    union = A | B
    if len(cover.lines) != max(len(A), len(B)) or len(set(cover.lines)) != len(cover.lines):
        return False
    covered: Set[int] = set()
    for c in cover.lines:
        trace = set(cfg.trace(c.line)) if c.line is not None else set(c.trace)
        if not trace <= union:
            return False
        covered |= trace
    if not union <= covered:
        return False
    for i in union:
        c = cover.assignment.get(i)
        if c is None or c not in cover.lines or i not in c.trace:
            return False
    for c in cover.lines:
        served = [i for i, assigned in cover.assignment.items() if assigned == c]
        if len([i for i in served if i in A]) > 1 or len([i for i in served if i in B]) > 1:
            return False
    return True
