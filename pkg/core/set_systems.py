"""
Finite set systems for PyShatter
k-fold unions, VC-dimension, S-hulls and counting isomorphism types of maximum shattered sets
"""

import logging
from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple

from core.errors import ClosureViolationError, MalformedInputError, NoContainingSetError, SizeLimitError
from core.incidence import IndexSet, PointConfig, indices_of, mask_of
from core.isomorphism import ShatterStructure, isomorphism_types
from core.settings import Settings, get_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiniteSetSystem:
    """A ground set 0..n-1 and a deduplicated family of subsets stored as bitmasks"""
    n: int
    family: Tuple[int, ...]
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"Ground set size must be non-negative, got {self.n}")
        full = (1 << self.n) - 1
        masks = tuple(sorted(set(self.family)))
        for m in masks:
            if m < 0 or m & ~full:
                raise ValueError(f"Family member {indices_of(m)} is not a subset of the ground set")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError(f"Expected {self.n} labels, got {len(self.labels)}")
        object.__setattr__(self, 'family', masks)

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]], labels: Optional[Sequence[str]] = None) -> 'FiniteSetSystem':
        return cls(n, tuple(mask_of(s) for s in sets), tuple(labels) if labels is not None else None)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def members(self) -> List[IndexSet]:
        return [indices_of(m) for m in self.family]

    def __len__(self) -> int:
        return len(self.family)

    def __contains__(self, subset) -> bool:
        return mask_of(subset) in set(self.family)

    def traces(self, subset_mask: int) -> set:
        return {m & subset_mask for m in self.family}

    def restricted(self, subset: Sequence[int]) -> 'FiniteSetSystem':
        """Trace system on a subset, relabeled 0..len(subset)-1 in sorted order"""
        subset = sorted(subset)
        position = {element: index for index, element in enumerate(subset)}
        restricted = {mask_of(position[i] for i in indices_of(m) if i in position) for m in self.family}
        return FiniteSetSystem(len(subset), tuple(restricted))

    def to_dict(self) -> dict:
        ground = list(self.labels) if self.labels is not None else self.n
        return {'ground': ground, 'family': [list(member) for member in self.members()]}

    @classmethod
    def from_dict(cls, data: dict) -> 'FiniteSetSystem':
        if not isinstance(data, dict) or 'ground' not in data or 'family' not in data:
            raise MalformedInputError("A set system needs 'ground' and 'family' keys")
        ground = data['ground']
        if isinstance(ground, bool) or not isinstance(ground, (int, list)):
            raise MalformedInputError("'ground' must be a size or a list of labels")
        labels = [str(label) for label in ground] if isinstance(ground, list) else None
        n = len(ground) if isinstance(ground, list) else ground
        if n < 0:
            raise MalformedInputError(f"Ground set size must be non-negative, got {n}")
        family = data['family']
        if not isinstance(family, list):
            raise MalformedInputError("'family' must be a list of index lists")
        sets = []
        for member in family:
            if not isinstance(member, list) or any(isinstance(i, bool) or not isinstance(i, int) for i in member):
                raise MalformedInputError(f"Family member {member!r} is not a list of indices")
            if any(not 0 <= i < n for i in member):
                raise MalformedInputError(f"Family member {member!r} leaves the ground set 0..{n - 1}")
            sets.append(member)
        return cls.from_sets(n, sets, labels)


def _popcount(mask: int) -> int:
    return bin(mask).count('1')


def k_fold_union(system: FiniteSetSystem, k: int) -> FiniteSetSystem:
    """Unions of k members, repetition allowed"""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    base = set(system.family)
    current = set(base)
    for _ in range(k - 1):
        current = {a | b for a in current for b in base}
    return FiniteSetSystem(system.n, tuple(current), system.labels)


def is_shattered(system: FiniteSetSystem, subset: Iterable[int]) -> bool:
    subset_mask = mask_of(subset)
    return len(system.traces(subset_mask)) == 1 << _popcount(subset_mask)


def _guard(system: FiniteSetSystem, settings: Optional[Settings]):
    settings = settings or get_settings()
    if system.n > settings.abstract_size_limit:
        raise SizeLimitError(system.n, settings.abstract_size_limit, "ground elements")


def shattered_subsets(system: FiniteSetSystem, size: int) -> List[IndexSet]:
    """Every shattered subset of the given size, in lexicographic order"""
    if 1 << size > len(system.family):
        return []
    return [subset for subset in combinations(range(system.n), size) if is_shattered(system, subset)]


def max_shattered_subsets(system: FiniteSetSystem, settings: Optional[Settings] = None) -> Tuple[int, List[IndexSet]]:
    """VC-dimension together with every shattered subset of that size"""
    _guard(system, settings)
    if not system.family:
        return 0, []
    best: List[IndexSet] = [()]
    for size in range(1, system.n + 1):
        found = shattered_subsets(system, size)
        # subsets of shattered sets are shattered, so sizes stop at the first gap
        if not found:
            break
        best = found
    return len(best[0]), best


def vc_dim(system: FiniteSetSystem, settings: Optional[Settings] = None) -> int:
    """Largest size of a shattered subset; 0 when nothing non-empty is shattered"""
    d, _ = max_shattered_subsets(system, settings)
    return d


def is_intersection_closed(system: FiniteSetSystem) -> Optional[Tuple[IndexSet, IndexSet]]:
    """None when closed under pairwise intersection, else a violating pair"""
    members = set(system.family)
    for a, b in combinations(system.family, 2):
        if a & b not in members:
            return indices_of(a), indices_of(b)
    return None


def s_hull(system: FiniteSetSystem, Y: Iterable[int]) -> IndexSet:
    """Intersection of every member containing Y"""
    violation = is_intersection_closed(system)
    if violation is not None:
        raise ClosureViolationError(
            f"Family is not closed under intersection: {list(violation[0])} and {list(violation[1])}"
        )
    target = mask_of(Y)
    if target & ~system.full_mask:
        raise ValueError(f"{indices_of(target)} is not a subset of the ground set")
    containing = [m for m in system.family if m & target == target]
    if not containing:
        raise NoContainingSetError(f"No member contains {list(indices_of(target))}")
    return indices_of(reduce(lambda a, b: a & b, containing))


def trace_structure(system: FiniteSetSystem, subset: Sequence[int]) -> ShatterStructure:
    """Every distinct trace of the family on the subset, points relabeled in sorted order"""
    restricted = system.restricted(subset)
    return ShatterStructure(restricted.n, tuple(indices_of(m) for m in restricted.family))


@dataclass
class ShatterTypes:
    """Maximum shattered sets of a k-fold union grouped by isomorphism type"""
    k: int
    vc_dim: int
    shattered_sets: List[IndexSet] = field(default_factory=list)
    groups: List[List[int]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.groups)

    def to_dict(self) -> dict:
        return {
            'k': self.k,
            'vc_dim': self.vc_dim,
            's_k': self.count,
            'representatives': [list(self.shattered_sets[group[0]]) for group in self.groups],
            'maximum_shattered_sets': len(self.shattered_sets),
        }


def maximal_shattering_types(system: FiniteSetSystem, k: int, settings: Optional[Settings] = None) -> ShatterTypes:
    union = k_fold_union(system, k)
    d, subsets = max_shattered_subsets(union, settings)
    structures = [trace_structure(system, subset) for subset in subsets]
    groups = isomorphism_types(structures)
    logger.debug("k=%d: %d maximum shattered sets of size %d in %d types", k, len(subsets), d, len(groups))
    return ShatterTypes(k, d, subsets, groups)


def s_k_count(system: FiniteSetSystem, k: int, settings: Optional[Settings] = None) -> int:
    """Number of isomorphism types among maximum subsets shattered by k-fold unions"""
    return maximal_shattering_types(system, k, settings).count


def vc_profile(system: FiniteSetSystem, max_k: int, settings: Optional[Settings] = None) -> List[int]:
    """d_1, ..., d_max_k; a finite sample of the sequence, not a statement about all k"""
    if max_k < 1:
        raise ValueError(f"max_k must be at least 1, got {max_k}")
    return [vc_dim(k_fold_union(system, k), settings) for k in range(1, max_k + 1)]


def intersection_closure(system: FiniteSetSystem) -> FiniteSetSystem:
    """Smallest intersection-closed family containing the given one"""
    closed = set(system.family)
    frontier = set(closed)
    while frontier:
        fresh = {a & b for a in frontier for b in closed} - closed
        closed |= fresh
        frontier = fresh
    return FiniteSetSystem(system.n, tuple(closed), system.labels)


def intervals_system(length: int) -> FiniteSetSystem:
    """Traces of open intervals on a chain of the given length, the empty trace included"""
    if length < 0:
        raise ValueError(f"Chain length must be non-negative, got {length}")
    runs = [range(start, stop) for start in range(length) for stop in range(start + 1, length + 1)]
    return FiniteSetSystem.from_sets(length, [()] + runs)


def powerset_system(n: int) -> FiniteSetSystem:
    return FiniteSetSystem(n, tuple(range(1 << n)))


def planar_system(cfg: PointConfig) -> FiniteSetSystem:
    """Traces of all lines on a configuration: S^2_P, one singleton per point and the empty trace"""
    traces = [c.trace for c in cfg.classes] + [(i,) for i in range(cfg.n)] + [()]
    return FiniteSetSystem.from_sets(cfg.n, traces)
