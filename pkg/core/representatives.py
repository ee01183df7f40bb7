"""
Representative configurations for PyShatter
Coordinates of every isomorphism type of maximum shattered sets, plus named example figures
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from core.geometry import Point
from core.incidence import PointConfig
from core.isomorphism import CaseLabel, classify_case
from core.shatter import shatters

logger = logging.getLogger(__name__)


@dataclass
class CorpusEntry:
    """A named configuration with the facts it is known to satisfy"""
    name: str
    description: str
    coordinates: Tuple[Tuple[str, str], ...]
    k: int
    label: Optional[CaseLabel] = None
    shattered: bool = True

    def config(self) -> PointConfig:
        return PointConfig([Point.from_list(pair) for pair in self.coordinates])

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'description': self.description,
            'k': self.k,
            'label': self.label.value if self.label is not None else None,
            'shattered': self.shattered,
            'points': [list(pair) for pair in self.coordinates],
        }


def _coords(*pairs) -> Tuple[Tuple[str, str], ...]:
    return tuple((str(x), str(y)) for x, y in pairs)


class RepresentativeCorpus:
    """Built-in configurations keyed by name"""

    def __init__(self):
        self.entries: Dict[str, CorpusEntry] = {}
        self.load_default_entries()

    def add_entry(self, entry: CorpusEntry):
        self.entries[entry.name] = entry

    def load_default_entries(self):
        """Load the seven representatives and the named figures"""
        self.add_entry(CorpusEntry(
            name="F2-I",
            description="Three collinear points and two points off their line",
            coordinates=_coords((0, 0), (2, 0), (4, 0), (1, 2), (3, 2)),
            k=2, label=CaseLabel.F2_I,
        ))
        self.add_entry(CorpusEntry(
            name="F2-II",
            description="Two collinear triples sharing one point",
            coordinates=_coords((0, 0), (2, 0), (4, 0), (0, 2), (0, 4)),
            k=2, label=CaseLabel.F2_II,
        ))
        self.add_entry(CorpusEntry(
            name="F3-Ia",
            description="One 4-line; the ordinary lines hit the off-line triple twice, twice, never",
            coordinates=_coords((2, 2), (4, 2), (6, 2), (8, 2), (4, 3), (6, 3), (8, 3), (4, 4), (6, 4)),
            k=3, label=CaseLabel.F3_IA,
        ))
        self.add_entry(CorpusEntry(
            name="F3-Ib",
            description="One 4-line; the ordinary lines hit the off-line triple once, twice, once",
            coordinates=_coords((2, 2), (4, 2), (6, 2), (8, 2), (3, 3), (5, 3), (7, 3), (4, 4), (6, 4)),
            k=3, label=CaseLabel.F3_IB,
        ))
        self.add_entry(CorpusEntry(
            name="F3-IIa",
            description="Two intersecting 4-lines",
            coordinates=_coords((2, 4), (6, 4), (5, 5), (8, 6), (11, 7), (5, 3), (8, 2), (11, 1), (11, 5)),
            k=3, label=CaseLabel.F3_IIA,
        ))
        self.add_entry(CorpusEntry(
            name="F3-IIb",
            description="Three pairwise intersecting 4-lines",
            coordinates=_coords((2, 1), (2, 3), (2, 5), (2, 7), (4, 1), (6, 1), (8, 1), (3, 4), (5, 2)),
            k=3, label=CaseLabel.F3_IIB,
        ))
        self.add_entry(CorpusEntry(
            name="F3-III",
            description="Three disjoint triples and six cross-lines, every point a 2-node",
            coordinates=_coords((0, 0), (3, 0), (6, 0), ("3/2", 3), (3, 3), (6, 3), (3, 6), (6, -6), (4, 2)),
            k=3, label=CaseLabel.F3_III,
        ))
        self.add_entry(CorpusEntry(
            name="case-a",
            description="Nine points with a 4-line satisfying O, A1 and A2",
            coordinates=self.entries["F3-Ib"].coordinates,
            k=3, label=CaseLabel.F3_IB,
        ))
        self.add_entry(CorpusEntry(
            name="case-b",
            description="Nine points without four collinear satisfying O, B1 and B2",
            coordinates=self.entries["F3-III"].coordinates,
            k=3, label=CaseLabel.F3_III,
        ))
        self.add_entry(CorpusEntry(
            name="x-configuration",
            description="Nine points with exactly nine collinear triples; fails B2",
            coordinates=_coords((0, 0), (2, 0), (6, 0), (1, 1), (3, 1), (4, 1), (0, 2), (2, 2), (6, 2)),
            k=3, label=None, shattered=False,
        ))

    def get(self, name: str) -> CorpusEntry:
        if name not in self.entries:
            raise KeyError(f"Unknown corpus entry: {name}")
        return self.entries[name]

    def representatives(self, k: int) -> List[CorpusEntry]:
        return [e for e in self.entries.values() if e.k == k and e.name.startswith(f"F{k}-")]


_CORPUS = RepresentativeCorpus()


def representatives(k: int) -> List[Tuple[CaseLabel, PointConfig]]:
    """Coordinates of every isomorphism type for k = 2 (two types) or k = 3 (five types)"""
    if k not in (2, 3):
        raise ValueError(f"Representatives exist for k = 2 or 3, got {k}")
    return [(entry.label, entry.config()) for entry in _CORPUS.representatives(k)]


def example_config(name: str) -> PointConfig:
    """A named configuration: a representative label, "case-a", "case-b" or "x-configuration" """
    return _CORPUS.get(name).config()


def corpus() -> RepresentativeCorpus:
    return _CORPUS


def verify_corpus() -> Dict[str, bool]:
    """Re-run the oracle and the classifier on every entry"""
    results: Dict[str, bool] = {}
    for name, entry in _CORPUS.entries.items():
        cfg = entry.config()
        ok = shatters(cfg, entry.k).shattered == entry.shattered
        if ok and entry.label is not None:
            ok = classify_case(cfg, entry.k, verify=False) is entry.label
        if not ok:
            logger.warning("Corpus entry %s does not match its recorded facts", name)
        results[name] = ok
    return results
