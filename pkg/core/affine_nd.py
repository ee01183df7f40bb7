"""
Higher-dimensional reduction for PyShatter
Codimension-2 flats under unions of hyperplanes, reduced to points under unions of lines
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import (
    DimensionMismatchError, MalformedInputError, PreconditionError, SearchBoundExceededError, SizeLimitError,
)
from core.geometry import Point, RationalLike, format_rational, parse_rational
from core.incidence import IndexSet, PointConfig, indices_of
from core.isomorphism import ShatterStructure
from core.settings import Settings, get_settings
from core.shatter import first_unisolated_mask, shatters

logger = logging.getLogger(__name__)

Vector = Tuple[Fraction, ...]

RANDOM_NORMAL_ATTEMPTS = 1000


def _vector(values: Sequence[RationalLike]) -> Vector:
    return tuple(parse_rational(v) for v in values)


def _dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def _rref(rows: Sequence[Sequence[Fraction]]) -> Tuple[List[List[Fraction]], List[int]]:
    """Reduced row echelon form by exact Gauss-Jordan; zero rows dropped"""
    matrix = [list(r) for r in rows]
    if not matrix:
        return [], []
    width = len(matrix[0])
    pivots: List[int] = []
    r = 0
    for col in range(width):
        if r == len(matrix):
            break
        pivot = next((i for i in range(r, len(matrix)) if matrix[i][col] != 0), None)
        if pivot is None:
            continue
        matrix[r], matrix[pivot] = matrix[pivot], matrix[r]
        lead = matrix[r][col]
        matrix[r] = [value / lead for value in matrix[r]]
        for i in range(len(matrix)):
            if i != r and matrix[i][col] != 0:
                factor = matrix[i][col]
                matrix[i] = [a - factor * b for a, b in zip(matrix[i], matrix[r])]
        pivots.append(col)
        r += 1
    return matrix[:r], pivots


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    return len(_rref([_vector(r) for r in rows])[1])


def _pivot(row: Sequence[Fraction]) -> int:
    return next(i for i, value in enumerate(row) if value != 0)


@dataclass(frozen=True)
class AffineSubspace:
    """offset + span(basis), kept canonical

    The basis is in reduced row-echelon form and the offset is zero at
    every pivot column, so equal flats compare equal.
    """
    offset: Vector
    basis: Tuple[Vector, ...] = ()

    def __post_init__(self):
        offset = _vector(self.offset)
        basis = [_vector(b) for b in self.basis]
        if any(len(b) != len(offset) for b in basis):
            raise DimensionMismatchError("Basis vectors and offset have different lengths")
        rows, pivots = _rref(basis)
        if len(rows) != len(basis):
            raise DimensionMismatchError("Basis vectors are linearly dependent")
        for row, col in zip(rows, pivots):
            if offset[col] != 0:
                offset = _sub(offset, [offset[col] * value for value in row])
        object.__setattr__(self, 'offset', tuple(offset))
        object.__setattr__(self, 'basis', tuple(tuple(row) for row in rows))

    @classmethod
    def spanned(cls, offset: Sequence[RationalLike], vectors: Sequence[Sequence[RationalLike]]) -> 'AffineSubspace':
        """offset + span(vectors) for possibly dependent vectors"""
        rows, _ = _rref([_vector(v) for v in vectors])
        return cls(_vector(offset), tuple(tuple(r) for r in rows))

    @classmethod
    def from_equation(cls, normal: Sequence[RationalLike], level: RationalLike) -> 'AffineSubspace':
        """The hyperplane normal . x = level"""
        normal = _vector(normal)
        level = parse_rational(level)
        if all(value == 0 for value in normal):
            raise DimensionMismatchError("A hyperplane needs a non-zero normal")
        n = len(normal)
        j = _pivot(normal)
        offset = [Fraction(0)] * n
        offset[j] = level / normal[j]
        basis = []
        for i in range(n):
            if i == j:
                continue
            v = [Fraction(0)] * n
            v[i] = Fraction(1)
            v[j] = -normal[i] / normal[j]
            basis.append(v)
        return cls.spanned(offset, basis)

    @property
    def ambient(self) -> int:
        return len(self.offset)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _residual(self, v: Sequence[Fraction]) -> Vector:
        v = tuple(v)
        for row in self.basis:
            col = _pivot(row)
            if v[col] != 0:
                v = _sub(v, [v[col] * value for value in row])
        return v

    def _check_ambient(self, other_ambient: int):
        if other_ambient != self.ambient:
            raise DimensionMismatchError(f"Cannot compare flats in R^{self.ambient} and R^{other_ambient}")

    def contains_direction(self, v: Sequence[Fraction]) -> bool:
        self._check_ambient(len(v))
        return all(value == 0 for value in self._residual(v))

    def contains_point(self, p: Sequence[Fraction]) -> bool:
        self._check_ambient(len(p))
        return self.contains_direction(_sub(p, self.offset))

    def contains(self, other: 'AffineSubspace') -> bool:
        self._check_ambient(other.ambient)
        return self.contains_point(other.offset) and all(self.contains_direction(b) for b in other.basis)

    def join(self, other: 'AffineSubspace') -> 'AffineSubspace':
        """Affine span of two flats"""
        self._check_ambient(other.ambient)
        return AffineSubspace.spanned(self.offset, list(self.basis) + list(other.basis) + [_sub(other.offset, self.offset)])

    def normal(self) -> Vector:
        """Normal of a hyperplane, scaled so its first non-zero entry is 1"""
        if self.dim != self.ambient - 1:
            raise DimensionMismatchError(f"A normal needs a hyperplane, got a {self.dim}-flat in R^{self.ambient}")
        pivots = [_pivot(row) for row in self.basis]
        free = next(i for i in range(self.ambient) if i not in pivots)
        v = [Fraction(0)] * self.ambient
        v[free] = Fraction(1)
        for row, col in zip(self.basis, pivots):
            v[col] = -row[free]
        lead = v[_pivot(v)]
        return tuple(value / lead for value in v)

    def equation(self) -> Tuple[Vector, Fraction]:
        normal = self.normal()
        return normal, _dot(normal, self.offset)

    def mapped(self, matrix: Sequence[Sequence[Fraction]], translation: Sequence[Fraction]) -> 'AffineSubspace':
        """Image under x -> M x + t"""
        def apply(v):
            return tuple(_dot(row, v) for row in matrix)
        image_offset = tuple(a + b for a, b in zip(apply(self.offset), translation))
        return AffineSubspace.spanned(image_offset, [apply(b) for b in self.basis])

    def drop_coordinate(self, j: int) -> 'AffineSubspace':
        keep = [i for i in range(self.ambient) if i != j]
        return AffineSubspace.spanned(
            [self.offset[i] for i in keep], [[b[i] for i in keep] for b in self.basis]
        )

    def to_dict(self) -> dict:
        return {
            'offset': [format_rational(v) for v in self.offset],
            'basis': [[format_rational(v) for v in b] for b in self.basis],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'AffineSubspace':
        if not isinstance(data, dict) or not isinstance(data.get('offset'), list):
            raise MalformedInputError("A flat needs an 'offset' list and a 'basis'")
        if not all(isinstance(b, list) for b in data.get('basis', [])):
            raise MalformedInputError("A flat's 'basis' must be a list of vectors")
        return cls(_vector(data['offset']), tuple(_vector(b) for b in data.get('basis', [])))


def intersect_flats(first: AffineSubspace, second: AffineSubspace) -> Optional[AffineSubspace]:
    """Solve p + B x = q + C y exactly; None when the flats are disjoint"""
    first._check_ambient(second.ambient)
    n = first.ambient
    a, b = first.dim, second.dim
    rhs = _sub(second.offset, first.offset)
    augmented = [
        [first.basis[j][i] for j in range(a)] + [-second.basis[j][i] for j in range(b)] + [rhs[i]]
        for i in range(n)
    ]
    rows, pivots = _rref(augmented)
    if a + b in pivots:
        return None
    solution = [Fraction(0)] * (a + b)
    for row, col in zip(rows, pivots):
        solution[col] = row[-1]
    free = [col for col in range(a + b) if col not in pivots]
    kernel = []
    for f in free:
        v = [Fraction(0)] * (a + b)
        v[f] = Fraction(1)
        for row, col in zip(rows, pivots):
            v[col] = -row[f]
        kernel.append(v)

    def along_first(coefficients):
        return tuple(sum((coefficients[j] * first.basis[j][i] for j in range(a)), Fraction(0)) for i in range(n))

    point = tuple(p + d for p, d in zip(first.offset, along_first(solution)))
    return AffineSubspace.spanned(point, [along_first(v) for v in kernel])


class AffineConfig:
    """Finitely many (n-2)-flats of R^n"""

    def __init__(self, n: int, elements: Sequence[AffineSubspace]):
        if n < 2:
            raise DimensionMismatchError(f"Ambient dimension must be at least 2, got {n}")
        self.n = n
        self.elements: Tuple[AffineSubspace, ...] = tuple(elements)
        for index, e in enumerate(self.elements):
            if e.ambient != n or e.dim != n - 2:
                raise DimensionMismatchError(
                    f"Element {index} is a {e.dim}-flat in R^{e.ambient}, expected a {n - 2}-flat in R^{n}"
                )
        seen: Dict[AffineSubspace, int] = {}
        for index, e in enumerate(self.elements):
            if e in seen:
                raise PreconditionError(f"Elements {seen[e]} and {index} are the same flat")
            seen[e] = index

    @property
    def m(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def to_dict(self) -> dict:
        return {'n': self.n, 'elements': [e.to_dict() for e in self.elements]}

    @classmethod
    def from_dict(cls, data: dict) -> 'AffineConfig':
        if not isinstance(data, dict) or 'n' not in data or 'elements' not in data:
            raise MalformedInputError("An affine configuration needs 'n' and 'elements'")
        if isinstance(data['n'], bool) or not isinstance(data['n'], int):
            raise MalformedInputError(f"'n' must be an integer, got {data['n']!r}")
        if not isinstance(data['elements'], list):
            raise MalformedInputError("'elements' must be a list of flats")
        return cls(data['n'], [AffineSubspace.from_dict(item) for item in data['elements']])

    def to_point_config(self) -> PointConfig:
        if self.n != 2:
            raise DimensionMismatchError(f"Only planar configurations are point sets, got R^{self.n}")
        return PointConfig([Point(e.offset[0], e.offset[1]) for e in self.elements])

    @classmethod
    def from_point_config(cls, cfg: PointConfig) -> 'AffineConfig':
        return cls(2, [AffineSubspace((p.x, p.y)) for p in cfg.points])


def hyperplane_trace(cfg: AffineConfig, V: AffineSubspace) -> IndexSet:
    """Indices of the elements contained in the hyperplane V"""
    if V.ambient != cfg.n or V.dim != cfg.n - 1:
        raise DimensionMismatchError(f"Expected a hyperplane of R^{cfg.n}, got a {V.dim}-flat in R^{V.ambient}")
    return tuple(i for i, e in enumerate(cfg.elements) if V.contains(e))


def hyperplane_classes(cfg: AffineConfig) -> List[Tuple[IndexSet, AffineSubspace]]:
    """Hyperplanes containing at least two elements, with their traces, in trace order"""
    found: Dict[AffineSubspace, IndexSet] = {}
    for i, j in combinations(range(cfg.m), 2):
        span = cfg.elements[i].join(cfg.elements[j])
        if span.dim == cfg.n - 1 and span not in found:
            found[span] = hyperplane_trace(cfg, span)
    return sorted(((trace, V) for V, trace in found.items()), key=lambda item: item[0])


def candidate_hyperplanes(cfg: AffineConfig) -> List[AffineSubspace]:
    return [V for _, V in hyperplane_classes(cfg)]


def structure_of(cfg: AffineConfig) -> ShatterStructure:
    return ShatterStructure(cfg.m, tuple(trace for trace, _ in hyperplane_classes(cfg)))


def _transverse(normal: Vector, element: AffineSubspace) -> bool:
    return any(_dot(normal, b) != 0 for b in element.basis)


def choose_direction(cfg: AffineConfig, seed: int = 0) -> Vector:
    """A hyperplane normal whose direction space contains no element's direction space"""
    for i in range(cfg.n):
        normal = tuple(Fraction(1 if j == i else 0) for j in range(cfg.n))
        if all(_transverse(normal, e) for e in cfg.elements):
            return normal
    rng = np.random.default_rng(seed)
    for _ in range(RANDOM_NORMAL_ATTEMPTS):
        normal = tuple(Fraction(int(v)) for v in rng.integers(-5, 6, size=cfg.n))
        if any(normal) and all(_transverse(normal, e) for e in cfg.elements):
            return normal
    raise SearchBoundExceededError(f"No transverse hyperplane direction after {RANDOM_NORMAL_ATTEMPTS} random normals")


def _slice(element: AffineSubspace, normal: Vector, level: Fraction) -> AffineSubspace:
    """element meets {normal . x = level}; the element must be transverse to the normal"""
    pivot = next(i for i, b in enumerate(element.basis) if _dot(normal, b) != 0)
    b0 = element.basis[pivot]
    scale = _dot(normal, b0)
    step = (level - _dot(normal, element.offset)) / scale
    point = tuple(p + step * v for p, v in zip(element.offset, b0))
    rest = [
        _sub(b, [(_dot(normal, b) / scale) * v for v in b0])
        for i, b in enumerate(element.basis) if i != pivot
    ]
    return AffineSubspace.spanned(point, rest)


def translate_bound(cfg: AffineConfig) -> int:
    """Translates that can fail: one per pair of elements and one per (hyperplane, outside element)"""
    outside = sum(cfg.m - len(trace) for trace, _ in hyperplane_classes(cfg))
    return comb(cfg.m, 2) + outside + 1


def _slices_are_good(cfg: AffineConfig, slices: Sequence[AffineSubspace],
                     classes: Sequence[Tuple[IndexSet, AffineSubspace]]) -> bool:
    if len(set(slices)) != len(slices):
        return False
    for trace, V in classes:
        if tuple(i for i, s in enumerate(slices) if V.contains(s)) != trace:
            return False
    return True


def find_good_translate(cfg: AffineConfig, U: AffineSubspace) -> AffineSubspace:
    """The first level j = 0, 1, 2, ... at which the translate of U cuts the elements faithfully

    Faithful means: each element meets it in a proper non-empty flat, the
    pieces are pairwise distinct, and every hyperplane containing two or
    more elements contains exactly the pieces of the elements it contains.
    """
    normal = U.normal()
    for index, e in enumerate(cfg.elements):
        if not _transverse(normal, e):
            raise PreconditionError(f"Element {index} has its direction space inside the direction of U")
    classes = hyperplane_classes(cfg)
    bound = translate_bound(cfg)
    for j in range(bound):
        level = Fraction(j)
        slices = [_slice(e, normal, level) for e in cfg.elements]
        if _slices_are_good(cfg, slices, classes):
            logger.debug("Translate level %d accepted after %d rejections (bound %d)", j, j, bound)
            return AffineSubspace.from_equation(normal, level)
    raise SearchBoundExceededError(f"No faithful translate among the first {bound} levels")


def check_translate(cfg: AffineConfig, U_prime: AffineSubspace) -> bool:
    """Re-check a translate by generic intersection and mutual containment"""
    if U_prime.ambient != cfg.n or U_prime.dim != cfg.n - 1:
        return False
    pieces = []
    for e in cfg.elements:
        piece = intersect_flats(e, U_prime)
        if piece is None or piece.dim != e.dim - 1:
            return False
        pieces.append(piece)
    for first, second in combinations(pieces, 2):
        if first.contains(second) and second.contains(first):
            return False
    for trace, V in hyperplane_classes(cfg):
        if tuple(i for i, piece in enumerate(pieces) if V.contains(piece)) != trace:
            return False
    return True


@dataclass
class ReductionResult:
    """One step R^n -> R^(n-1) and the chart used for the translate"""
    source: AffineConfig
    target: AffineConfig
    normal: Vector
    level: Fraction
    dropped_coordinate: int
    structure_preserved: bool

    def to_dict(self) -> dict:
        return {
            'from_dim': self.source.n,
            'to_dim': self.target.n,
            'normal': [format_rational(v) for v in self.normal],
            'level': format_rational(self.level),
            'dropped_coordinate': self.dropped_coordinate,
            'structure_preserved': self.structure_preserved,
            'elements': self.target.to_dict()['elements'],
        }


def reduce_dimension(cfg: AffineConfig, seed: int = 0) -> ReductionResult:
    """Cut every element with a faithful translate and chart it as R^(n-1)

    The chart drops the first coordinate on which the translate's normal is
    non-zero. Hyperplane traces of the source survive unchanged; pairs of
    elements lying in no common hyperplane may gain one.
    """
    if cfg.n < 3:
        raise DimensionMismatchError(f"Reduction needs R^n with n >= 3, got R^{cfg.n}")
    normal = choose_direction(cfg, seed)
    U = AffineSubspace.from_equation(normal, 0)
    U_prime = find_good_translate(cfg, U)
    # equation() rescales the normal, so the level is read back with it
    _, level = U_prime.equation()
    if not check_translate(cfg, U_prime):
        raise SearchBoundExceededError("Accepted translate fails the independent check")
    dropped = _pivot(normal)
    pieces = [intersect_flats(e, U_prime) for e in cfg.elements]
    target = AffineConfig(cfg.n - 1, [piece.drop_coordinate(dropped) for piece in pieces])
    preserved = structure_of(cfg) == structure_of(target)
    if not preserved:
        logger.info("Reduction of %d elements from R^%d added hyperplane classes", cfg.m, cfg.n)
    return ReductionResult(cfg, target, U_prime.normal(), level, dropped, preserved)


def reduction_chain(cfg: AffineConfig, to_dim: int = 2, seed: int = 0) -> List[ReductionResult]:
    if to_dim < 2 or to_dim > cfg.n:
        raise DimensionMismatchError(f"Cannot reduce R^{cfg.n} to R^{to_dim}")
    steps: List[ReductionResult] = []
    current = cfg
    while current.n > to_dim:
        step = reduce_dimension(current, seed)
        steps.append(step)
        current = step.target
    return steps


def reduce_to_plane(cfg: AffineConfig, seed: int = 0) -> PointConfig:
    """Iterate the reduction down to R^2 and read off the points"""
    steps = reduction_chain(cfg, 2, seed)
    planar = steps[-1].target if steps else cfg
    return planar.to_point_config()


def direct_shatters(cfg: AffineConfig, k: int) -> Tuple[bool, Optional[IndexSet]]:
    """Shattering by k-fold unions of hyperplanes, decided over the hyperplane classes"""
    masks = [sum(1 << i for i in trace) for trace, _ in hyperplane_classes(cfg)]
    failing = first_unisolated_mask(cfg.m, masks, k)
    return failing is None, indices_of(failing) if failing is not None else None


@dataclass
class VcEqualityReport:
    """Shattering decided in R^n and after reduction to the plane"""
    k: int
    n: int
    m: int
    direct_shattered: bool
    planar_shattered: bool
    structure_preserved: bool
    failing_subset: Optional[IndexSet] = None
    planar_points: List[List[str]] = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return self.direct_shattered == self.planar_shattered

    def to_dict(self) -> dict:
        return {
            'k': self.k,
            'n': self.n,
            'm': self.m,
            'direct_shattered': self.direct_shattered,
            'planar_shattered': self.planar_shattered,
            'agree': self.agree,
            'structure_preserved': self.structure_preserved,
            'failing_subset': list(self.failing_subset) if self.failing_subset is not None else None,
            'planar_points': self.planar_points,
        }


def vc_equal_check(cfg: AffineConfig, k: int, seed: int = 0, settings: Optional[Settings] = None) -> VcEqualityReport:
    settings = settings or get_settings()
    if cfg.m > settings.affine_element_limit:
        raise SizeLimitError(cfg.m, settings.affine_element_limit, "elements")
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    direct, failing = direct_shatters(cfg, k)
    steps = reduction_chain(cfg, 2, seed)
    planar_cfg = (steps[-1].target if steps else cfg).to_point_config()
    planar = shatters(planar_cfg, k, settings=settings).shattered
    preserved = all(step.structure_preserved for step in steps)
    if direct != planar:
        logger.warning("R^%d and planar verdicts differ for k=%d (structure preserved: %s)", cfg.n, k, preserved)
    return VcEqualityReport(k, cfg.n, cfg.m, direct, planar, preserved, failing,
                            [p.to_list() for p in planar_cfg.points])


def _identity(n: int) -> List[List[Fraction]]:
    return [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]


def random_affine_map_nd(rng: np.random.Generator, n: int, spread: int = 3) -> Tuple[List[List[Fraction]], Vector]:
    """Invertible integer matrix and translation drawn from rng"""
    while True:
        matrix = [[Fraction(int(v)) for v in row] for row in rng.integers(-spread, spread + 1, size=(n, n))]
        if rank(matrix) == n:
            break
    translation = tuple(Fraction(int(v)) for v in rng.integers(-spread, spread + 1, size=n))
    return matrix, translation


def lift_config(cfg: PointConfig, n: int = 3, mode: str = "parallel",
                rng: Optional[np.random.Generator] = None) -> AffineConfig:
    """Codimension-2 flats of R^n with the same hyperplane traces as the lines on P

    parallel: (p, 0, ..., 0) + span(e_3, ..., e_n)
    cone:     flats through (p, 0, ..., 0) and the apex e_3, plus span(e_4, ..., e_n)
    With rng given, the result is moved by a random invertible affine map.
    """
    if n < 3:
        raise DimensionMismatchError(f"Lifting targets R^n with n >= 3, got {n}")
    if mode not in ("parallel", "cone"):
        raise ValueError(f"Unknown lift mode {mode!r}")
    unit = _identity(n)
    elements = []
    for p in cfg.points:
        base = [p.x, p.y] + [Fraction(0)] * (n - 2)
        if mode == "parallel":
            directions = unit[2:]
        else:
            apex_direction = [-p.x, -p.y, Fraction(1)] + [Fraction(0)] * (n - 3)
            directions = [apex_direction] + unit[3:]
        elements.append(AffineSubspace.spanned(base, directions))
    if rng is not None:
        matrix, translation = random_affine_map_nd(rng, n)
        elements = [e.mapped(matrix, translation) for e in elements]
    return AffineConfig(n, elements)
