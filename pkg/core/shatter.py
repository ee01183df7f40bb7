"""
Shattering oracle for PyShatter
Decides isolation of subsets by unions of k lines and searches for shattered sets
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from core.errors import SizeLimitError
from core.incidence import IndexSet, LineClass, PointConfig, collin, indices_of, mask_of, min_line_cover
from core.settings import Settings, get_settings

logger = logging.getLogger(__name__)


def _popcount(mask: int) -> int:
    return bin(mask).count('1')


def isolate_mask(target: int, class_masks: Sequence[int], k: int) -> Optional[List[int]]:
    """Cover target exactly with at most k usable traces

    A trace is usable when it lies inside target; every single point is
    usable on its own. Returns the chosen masks or None.
    """
    if target == 0:
        return []
    if k <= 0:
        return None
    usable = sorted((m for m in class_masks if m & ~target == 0),
                    key=lambda m: (-_popcount(m), indices_of(m)))
    if _popcount(target) <= k:
        return [1 << i for i in indices_of(target)]
    widest = _popcount(usable[0]) if usable else 1
    by_bit: Dict[int, List[int]] = {}
    for m in usable:
        for i in indices_of(m):
            by_bit.setdefault(i, []).append(m)

    def search(uncovered: int, remaining: int, chosen: List[int]) -> Optional[List[int]]:
        if uncovered == 0:
            return list(chosen)
        if remaining == 0 or _popcount(uncovered) > remaining * widest:
            return None
        bit = (uncovered & -uncovered).bit_length() - 1
        for m in by_bit.get(bit, []) + [1 << bit]:
            chosen.append(m)
            found = search(uncovered & ~m, remaining - 1, chosen)
            chosen.pop()
            if found is not None:
                return found
        return None

    return search(target, k, [])


def first_unisolated_mask(n: int, class_masks: Sequence[int], k: int) -> Optional[int]:
    """Least subset mask of an n-element ground set not isolated by k-fold unions, or None"""
    for target in range(1 << n):
        if isolate_mask(target, class_masks, k) is None:
            return target
    return None


@dataclass
class IsolationWitness:
    """At most k line classes whose union meets P exactly in target"""
    lines: List[LineClass]
    target: IndexSet

    def is_valid(self, cfg: PointConfig, k: Optional[int] = None) -> bool:
        if k is not None and len(self.lines) > k:
            return False
        target = set(self.target)
        covered = set()
        for c in self.lines:
            trace = set(cfg.trace(c.line)) if c.line is not None else set(c.trace)
            if not trace <= target:
                return False
            covered |= trace
        return covered == target

    def to_dict(self) -> dict:
        return {'target': list(self.target), 'lines': [c.to_dict() for c in self.lines]}


@dataclass
class ShatterReport:
    """Outcome of a full shattering check"""
    k: int
    n: int
    shattered: bool
    failing_subset: Optional[IndexSet] = None
    witnesses: Optional[Dict[IndexSet, IsolationWitness]] = None

    def to_dict(self) -> dict:
        data = {
            'k': self.k,
            'n': self.n,
            'shattered': self.shattered,
            'failing_subset': list(self.failing_subset) if self.failing_subset is not None else None,
        }
        if self.witnesses is not None:
            data['witnesses'] = [self.witnesses[key].to_dict() for key in sorted(self.witnesses, key=mask_of)]
        return data


def _witness_from_masks(cfg: PointConfig, target: IndexSet, masks: List[int]) -> IsolationWitness:
    by_mask = {c.mask: c for c in cfg.classes}
    lines = []
    for m in masks:
        c = by_mask.get(m)
        lines.append(c if c is not None and len(c) >= 2 else LineClass(indices_of(m), None))
    return IsolationWitness(lines, target)


def isolate(cfg: PointConfig, A: Iterable[int], k: int) -> Optional[IsolationWitness]:
    """Witness that at most k lines meet P exactly in A, or None"""
    target = tuple(sorted(set(A)))
    cfg.check_indices(target)
    masks = isolate_mask(mask_of(target), cfg.class_masks, k)
    if masks is None:
        return None
    return _witness_from_masks(cfg, target, masks)


def _guard(n: int, settings: Optional[Settings]) -> Settings:
    settings = settings or get_settings()
    if n > settings.shatter_size_limit:
        raise SizeLimitError(n, settings.shatter_size_limit)
    return settings


def shatters(cfg: PointConfig, k: int, want_witnesses: bool = False,
             settings: Optional[Settings] = None) -> ShatterReport:
    """Check that every subset of P is isolated by a union of k lines"""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    _guard(cfg.n, settings)
    witnesses: Optional[Dict[IndexSet, IsolationWitness]] = {} if want_witnesses else None
    for target in range(1 << cfg.n):
        masks = isolate_mask(target, cfg.class_masks, k)
        subset = indices_of(target)
        if masks is None:
            logger.debug("Subset %s of %d points is not isolated by %d lines", subset, cfg.n, k)
            return ShatterReport(k, cfg.n, False, subset, None)
        if witnesses is not None:
            witnesses[subset] = _witness_from_masks(cfg, subset, masks)
    return ShatterReport(k, cfg.n, True, None, witnesses)


def shatters_within(cfg: PointConfig, Y: Iterable[int], k: int) -> ShatterReport:
    """Check that every subset of Y is isolated by k lines avoiding P outside Y as well"""
    Y = tuple(sorted(set(Y)))
    cfg.check_indices(Y)
    _guard(len(Y), None)
    for bits in range(1 << len(Y)):
        subset = tuple(Y[i] for i in range(len(Y)) if bits >> i & 1)
        if isolate_mask(mask_of(subset), cfg.class_masks, k) is None:
            return ShatterReport(k, len(Y), False, subset, None)
    return ShatterReport(k, len(Y), True, None, None)


def max_shattered_subset(cfg: PointConfig, k: int, settings: Optional[Settings] = None) -> Tuple[int, IndexSet]:
    """Largest subset of P shattered by k-fold unions of lines, first in lexicographic order"""
    _guard(cfg.n, settings)
    heavy = [c.mask for c in cfg.classes if len(c) >= k + 2]
    for size in range(cfg.n, 0, -1):
        for subset in combinations(range(cfg.n), size):
            subset_mask = mask_of(subset)
            if any(_popcount(m & subset_mask) >= k + 2 for m in heavy):
                continue
            if shatters(cfg.subconfig(subset), k, settings=settings).shattered:
                logger.info("Largest subset shattered by %d lines has %d of %d points", k, size, cfg.n)
                return size, subset
    return 0, ()


@dataclass
class Obstructions:
    """Necessary conditions for shattering that fail for a configuration"""
    too_many_collinear: bool = False
    cover_too_large: bool = False
    disjoint_collinear_sets: bool = False
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def any(self) -> bool:
        return self.too_many_collinear or self.cover_too_large or self.disjoint_collinear_sets


def basic_obstruction(cfg: PointConfig, k: int) -> Obstructions:
    """Cheap necessary conditions: collin <= k+1, m_P <= k, no two disjoint (k+1)-collinear sets"""
    result = Obstructions()
    c = collin(cfg)
    if c >= k + 2:
        result.too_many_collinear = True
        result.details['collin'] = c
    m, _ = min_line_cover(cfg)
    if m > k:
        result.cover_too_large = True
        result.details['min_cover'] = m
    big = [cls for cls in cfg.classes if len(cls) >= k + 1]
    for first, second in combinations(big, 2):
        overlap = len(set(first.trace) & set(second.trace))
        if len(first) - overlap >= k + 1 or len(second) - overlap >= k + 1:
            result.disjoint_collinear_sets = True
            result.details['disjoint_lines'] = [list(first.trace), list(second.trace)]
            break
    return result
