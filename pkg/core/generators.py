"""
Seeded configuration generators for PyShatter
Random rational affine images, points on few lines and constrained instances for fuzzing
"""

import logging
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.affine_nd import AffineConfig, lift_config
from core.axioms import check_A1, check_A2, check_O
from core.errors import DuplicatePointError, SearchBoundExceededError
from core.geometry import AffineMap2D, Line, Point, line_through
from core.incidence import IndexSet, PointConfig, bad_quadruples, collin, min_line_cover
from core.representatives import representatives
from core.set_systems import FiniteSetSystem, intersection_closure

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 10000


def _small_rational(rng: np.random.Generator, spread: int) -> Fraction:
    return Fraction(int(rng.integers(-spread, spread + 1)), int(rng.integers(1, 4)))


def random_affine_map(rng: np.random.Generator, spread: int = 4) -> AffineMap2D:
    """Invertible map with small rational entries"""
    while True:
        affine = AffineMap2D(*(_small_rational(rng, spread) for _ in range(6)))
        if affine.is_invertible():
            return affine


def random_image(cfg: PointConfig, rng: np.random.Generator) -> PointConfig:
    return cfg.transformed(random_affine_map(rng))


def _random_lattice_point(rng: np.random.Generator, height: int) -> Point:
    x, y = rng.integers(0, height + 1, size=2)
    return Point(int(x), int(y))


def _check_height(n: int, height: int):
    if height <= 0 or (height + 1) ** 2 < n:
        raise ValueError(f"A grid of height {height} has fewer than {n} points")


def random_points(rng: np.random.Generator, n: int, height: int) -> PointConfig:
    """n distinct lattice points of [0, height]^2"""
    _check_height(n, height)
    chosen: List[Point] = []
    while len(chosen) < n:
        p = _random_lattice_point(rng, height)
        if p not in chosen:
            chosen.append(p)
    return PointConfig(chosen)


def _random_line(rng: np.random.Generator, height: int) -> Tuple[Point, Tuple[int, int]]:
    base = _random_lattice_point(rng, height)
    while True:
        dx, dy = (int(v) for v in rng.integers(-3, 4, size=2))
        if (dx, dy) != (0, 0):
            return base, (dx, dy)


def _meet(first: Line, second: Line) -> Optional[Point]:
    det = first.a * second.b - first.b * second.a
    if det == 0:
        return None
    return Point(Fraction(first.c * second.b - first.b * second.c, det),
                 Fraction(first.a * second.c - first.c * second.a, det))


def _in_box(p: Point, height: int) -> bool:
    return 0 <= p.x <= height and 0 <= p.y <= height


def points_on_lines(rng: np.random.Generator, n: int, lines: int, height: int, reach: int = 3) -> PointConfig:
    """n distinct points of [0, height]^2 drawn from a few random lines and their crossings"""
    _check_height(n, height)
    for _ in range(MAX_ATTEMPTS):
        carriers = [_random_line(rng, height) for _ in range(lines)]
        pool: List[Point] = []
        equations = []
        for base, (dx, dy) in carriers:
            on_line = [Point(base.x + t * dx, base.y + t * dy) for t in range(-reach, reach + 1)]
            equations.append(line_through(on_line[0], on_line[1]))
            pool.extend(on_line)
        for first, second in combinations(equations, 2):
            crossing = _meet(first, second)
            if crossing is not None:
                pool.append(crossing)
        pool = sorted(p for p in set(pool) if _in_box(p, height))
        if len(pool) < n:
            continue
        picks = rng.choice(len(pool), size=n, replace=False)
        return PointConfig([pool[int(i)] for i in picks])
    raise SearchBoundExceededError(f"Could not place {n} points on {lines} lines")


def perturbed(cfg: PointConfig, rng: np.random.Generator, reach: int = 4) -> PointConfig:
    """Move one point to another spot on a line of a minimum cover"""
    _, cover = min_line_cover(cfg)
    for _ in range(MAX_ATTEMPTS):
        victim = int(rng.integers(0, cfg.n))
        carrier = cover[int(rng.integers(0, len(cover)))]
        if len(carrier) < 2:
            continue
        p, q = (cfg.points[i] for i in carrier.trace[:2])
        t = Fraction(int(rng.integers(-2 * reach, 2 * reach + 1)), 2)
        moved = Point(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))
        points = list(cfg.points)
        points[victim] = moved
        try:
            return PointConfig(points)
        except DuplicatePointError:
            continue
    raise SearchBoundExceededError("Could not perturb the configuration")


def f3_equivalence_sample(rng: np.random.Generator, height: int = 64) -> Tuple[str, PointConfig]:
    """Nine points covered by three lines, mixing shattered and non-shattered shapes"""
    _check_height(9, height)
    reps = representatives(3)
    roll = rng.random()
    if roll < 0.35:
        _, rep = reps[int(rng.integers(0, len(reps)))]
        return "image", random_image(rep, rng)
    if roll < 0.7:
        _, rep = reps[int(rng.integers(0, len(reps)))]
        return "perturbed", random_image(perturbed(rep, rng), rng)
    return "lines", points_on_lines(rng, 9, 3, height)


def f2_equivalence_sample(rng: np.random.Generator, height: int = 64) -> Tuple[str, PointConfig]:
    _check_height(5, height)
    reps = representatives(2)
    roll = rng.random()
    if roll < 0.3:
        _, rep = reps[int(rng.integers(0, len(reps)))]
        return "image", random_image(rep, rng)
    if roll < 0.65:
        return "grid", random_points(rng, 5, height)
    return "lines", points_on_lines(rng, 5, 2, height)


def six_point_sample(rng: np.random.Generator, height: int = 64) -> PointConfig:
    _check_height(6, height)
    if rng.random() < 0.5:
        return random_points(rng, 6, height)
    return points_on_lines(rng, 6, 2, height)


def ten_point_sample(rng: np.random.Generator, height: int = 64) -> PointConfig:
    return points_on_lines(rng, 10, 3, height)


def matching_instance(rng: np.random.Generator, height: int = 6) -> Tuple[PointConfig, IndexSet, IndexSet]:
    """Eight points: a collinear A, any B, two extra points; collin < 4 and no bad quadruple"""
    for _ in range(MAX_ATTEMPTS):
        base, (dx, dy) = _random_line(rng, height)
        steps = rng.choice(np.arange(-3, 4), size=3, replace=False)
        points = [Point(base.x + int(t) * dx, base.y + int(t) * dy) for t in steps]
        points += [_random_lattice_point(rng, height) for _ in range(5)]
        try:
            cfg = PointConfig(points)
        except DuplicatePointError:
            continue
        A, B = (0, 1, 2), (3, 4, 5)
        if collin(cfg) >= 4 or bad_quadruples(cfg, A, B):
            continue
        return cfg, A, B
    raise SearchBoundExceededError("No matching instance satisfied the constraints")


def satisfies_case_a(cfg: PointConfig) -> bool:
    return cfg.n == 9 and collin(cfg) >= 4 and bool(check_O(cfg)) and bool(check_A1(cfg)) and bool(check_A2(cfg))


def _pick(rng: np.random.Generator, candidates: List[Point], count: int) -> List[Point]:
    picks = rng.choice(len(candidates), size=min(count, len(candidates)), replace=False)
    return [candidates[int(i)] for i in picks]


def _parallel_lines(rng: np.random.Generator) -> List[Point]:
    # rows v = o carrying unit-spaced runs, some shifted by half a step
    offsets = sorted(int(o) for o in rng.choice(4, size=3, replace=False))
    counts = [int(c) for c in rng.permutation([4, 3, 2])]
    points: List[Point] = []
    for offset, count in zip(offsets, counts):
        shift = Fraction(int(rng.integers(0, 2)), 2)
        points += _pick(rng, [Point(shift + u, offset) for u in range(4)], count)
    return points


def _triangle_lines(rng: np.random.Generator) -> List[Point]:
    # v = 0, u = 0 and u + v = s
    s = int(rng.integers(3, 7))
    span = range(-1, s + 3)
    carriers = [
        [Point(u, 0) for u in span],
        [Point(0, v) for v in span],
        [Point(u, s - u) for u in span],
    ]
    points: List[Point] = []
    for candidates in carriers:
        points += _pick(rng, candidates, int(rng.integers(3, 5)))
    return points


def _pencil_lines(rng: np.random.Generator) -> List[Point]:
    # v = 0 and u = 0 through the origin, third line a u + b v = s
    a, b = [(1, 1), (1, -1), (1, 2), (2, 1)][int(rng.integers(0, 4))]
    s = int(rng.integers(1, 5))
    span = range(-3, 5)
    carriers = [
        [Point(u, 0) for u in span],
        [Point(0, v) for v in span],
        [Point(u, Fraction(s - a * u, b)) for u in span],
    ]
    points: List[Point] = []
    for candidates in carriers:
        points += _pick(rng, candidates, int(rng.integers(2, 5)))
    return points


LINE_ARRANGEMENTS = {
    "parallel": _parallel_lines,
    "triangle": _triangle_lines,
    "pencil": _pencil_lines,
}


def three_line_sample(rng: np.random.Generator, n: int = 9) -> Tuple[str, PointConfig]:
    """n points placed 2 to 4 at a time on three random rational lines, moved by a random affine map

    The lines are parallel, form a triangle or share a point; points at
    crossings count for both lines they lie on.
    """
    names = sorted(LINE_ARRANGEMENTS)
    for _ in range(MAX_ATTEMPTS):
        name = names[int(rng.integers(0, len(names)))]
        points = sorted(set(LINE_ARRANGEMENTS[name](rng)))
        if len(points) != n:
            continue
        order = rng.permutation(n)
        return name, random_image(PointConfig([points[int(i)] for i in order]), rng)
    raise SearchBoundExceededError(f"Could not place {n} points on three lines")


def case_a_corpus(rng: np.random.Generator, size: int) -> List[PointConfig]:
    """Nine-point sets on three random lines with four collinear points satisfying O, A1 and A2"""
    corpus: List[PointConfig] = []
    attempts = total = 0
    kinds: Dict[str, int] = {}
    while len(corpus) < size:
        attempts += 1
        total += 1
        if attempts > MAX_ATTEMPTS:
            raise SearchBoundExceededError(f"Only {len(corpus)} of {size} Case A configurations found")
        name, candidate = three_line_sample(rng)
        if satisfies_case_a(candidate):
            corpus.append(candidate)
            kinds[name] = kinds.get(name, 0) + 1
            attempts = 0
    logger.debug("Case A corpus of %d built in %d attempts (%s)", size, total, kinds)
    return corpus


def random_intersection_closed(rng: np.random.Generator, n: int, members: int) -> FiniteSetSystem:
    """Closure of random subsets together with the ground set"""
    masks = [int(m) for m in rng.integers(0, 1 << n, size=members)] + [(1 << n) - 1]
    return intersection_closure(FiniteSetSystem(n, tuple(masks)))


def random_family(rng: np.random.Generator, n: int, members: int) -> FiniteSetSystem:
    return FiniteSetSystem(n, tuple(int(m) for m in rng.integers(0, 1 << n, size=members)))


def random_lifted_instance(rng: np.random.Generator, m: int, n: int = 3, height: int = 6) -> AffineConfig:
    """A lift of a random planar configuration, moved by a random affine map of R^n"""
    planar = points_on_lines(rng, m, 3, height) if rng.random() < 0.5 else random_points(rng, m, height)
    mode = "cone" if rng.random() < 0.5 else "parallel"
    return lift_config(planar, n, mode, rng)
