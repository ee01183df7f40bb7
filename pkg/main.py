#!/usr/bin/env python3
"""
PyShatter - exact VC-dimension tooling for unions of lines
Command-line entry point
"""

import argparse
import logging
import os
import sys
from typing import Callable, Dict, Optional, Sequence, Tuple

# Add the current directory to Python path so we can import our modules
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np

from core.affine_nd import AffineConfig, reduction_chain, vc_equal_check
from core.axioms import B2Reading, axiom_report, characterize_F2, characterize_F3, is_x_configuration
from core.errors import NotShatteredError, PyShatterError, SearchBoundExceededError
from core.generators import f2_equivalence_sample, f3_equivalence_sample
from core.incidence import PointConfig
from core.isomorphism import classify_case, shatter_isomorphic, shatter_structure
from core.performance_optimizer import ParallelRunner, TraceCache
from core.plotting import save_svg
from core.representatives import corpus, representatives, verify_corpus
from core.set_systems import FiniteSetSystem, k_fold_union, maximal_shattering_types, vc_dim, vc_profile
from core.settings import RunConfig
from core.shatter import shatters
from utils import dump_report, export_report, load_json_document, load_point_config

logger = logging.getLogger("pyshatter")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_FALSE = 3

Outcome = Tuple[dict, int]


def _verdict_code(holds: bool) -> int:
    return EXIT_OK if holds else EXIT_FALSE


def cmd_check_shatter(args: argparse.Namespace, run: RunConfig) -> Outcome:
    cfg = load_point_config(args.input)
    report = shatters(cfg, args.k, want_witnesses=args.witnesses, settings=run.settings)
    if report.witnesses is not None:
        invalid = [subset for subset, w in report.witnesses.items() if not w.is_valid(cfg, args.k)]
        if invalid:
            raise AssertionError(f"Witnesses for {len(invalid)} subsets failed re-validation")
    if args.svg:
        save_svg(cfg, args.svg, title=f"{cfg.n} points, k = {args.k}")
    return report.to_dict(), _verdict_code(report.shattered)


def cmd_axioms(args: argparse.Namespace, run: RunConfig) -> Outcome:
    cfg = load_point_config(args.input)
    reading = B2Reading(args.b2_reading)
    if args.k is None:
        return axiom_report(cfg, reading, settings=run.settings), EXIT_OK
    if args.k == 2:
        cover, spread, predicted = characterize_F2(cfg)
        result = {'k': 2, 'verdicts': [cover.to_dict(), spread.to_dict()], 'predicted_shattered': predicted}
        return result, _verdict_code(predicted)
    characterization = characterize_F3(cfg, reading)
    result = {'k': 3, **characterization.to_dict()}
    if cfg.n == 9:
        is_x, labeling = is_x_configuration(cfg)
        result['x_configuration'] = {'holds': is_x, 'labeling': labeling}
    return result, _verdict_code(characterization.predicted_shattered)


def cmd_classify(args: argparse.Namespace, run: RunConfig) -> Outcome:
    cfg = load_point_config(args.input)
    try:
        label = classify_case(cfg, args.k)
    except NotShatteredError as e:
        return {
            'k': args.k,
            'shattered': False,
            'error': 'not shattered',
            'failing_subset': list(e.failing_subset) if e.failing_subset is not None else None,
        }, EXIT_FALSE
    return {'k': args.k, 'shattered': True, 'label': label.value}, EXIT_OK


def cmd_iso(args: argparse.Namespace, run: RunConfig) -> Outcome:
    source = shatter_structure(load_point_config(args.a))
    target = shatter_structure(load_point_config(args.b))
    certificate = shatter_isomorphic(source, target)
    if certificate is None:
        return {'isomorphic': False, 'certificate': None}, EXIT_FALSE
    return {'isomorphic': True, 'certificate': certificate.to_dict()}, EXIT_OK


def cmd_reps(args: argparse.Namespace, run: RunConfig) -> Outcome:
    entries = [corpus().get(label.value) for label, _ in representatives(args.k)]
    written = []
    for entry in entries:
        document = {**entry.config().to_dict(), 'label': entry.label.value, 'k': entry.k}
        if args.out:
            path = os.path.join(args.out, f"{entry.name}.json")
            export_report(document, path)
            written.append(path)
    result: Dict[str, object] = {'k': args.k, 'representatives': [e.to_dict() for e in entries]}
    if args.out:
        result['written'] = written
    if args.verify:
        checks = verify_corpus()
        result['verification'] = checks
        return result, _verdict_code(all(checks.values()))
    return result, EXIT_OK


def cmd_reduce_dim(args: argparse.Namespace, run: RunConfig) -> Outcome:
    cfg = AffineConfig.from_dict(load_json_document(args.input))
    steps = reduction_chain(cfg, args.to_dim, run.seed)
    result: Dict[str, object] = {
        'from_dim': cfg.n,
        'to_dim': args.to_dim,
        'steps': [step.to_dict() for step in steps],
        'structure_preserved': all(step.structure_preserved for step in steps),
    }
    if args.k is not None:
        report = vc_equal_check(cfg, args.k, run.seed, run.settings)
        result['vc_check'] = report.to_dict()
        return result, _verdict_code(report.agree)
    return result, EXIT_OK


def cmd_abstract(args: argparse.Namespace, run: RunConfig) -> Outcome:
    system = FiniteSetSystem.from_dict(load_json_document(args.input))
    if args.abstract_command == 'vc':
        d = vc_dim(k_fold_union(system, args.k), run.settings)
        return {'k': args.k, 'ground': system.n, 'vc_dim': d}, EXIT_OK
    if args.abstract_command == 'sk':
        return maximal_shattering_types(system, args.k, run.settings).to_dict(), EXIT_OK
    profile = vc_profile(system, args.k, run.settings)
    non_decreasing = all(a <= b for a, b in zip(profile, profile[1:]))
    return {
        'max_k': args.k,
        'd_k': profile,
        'non_decreasing': non_decreasing,
        'note': 'finite evidence for k up to max_k only',
    }, _verdict_code(non_decreasing)


def _fuzz_evaluator(k: int, cache: TraceCache) -> Callable[[Tuple[str, PointConfig]], dict]:
    def evaluate(sample: Tuple[str, PointConfig]) -> dict:
        kind, cfg = sample
        if k == 2:
            predicted = characterize_F2(cfg)[2]
        else:
            predicted = characterize_F3(cfg).predicted_shattered
        oracle = cache.get_or_compute((cfg.n, cfg.class_masks, k), lambda: shatters(cfg, k).shattered)
        return {
            'kind': kind,
            'predicted': predicted,
            'oracle': oracle,
            'agree': predicted == oracle,
            'points': cfg.to_dict()['points'],
        }
    return evaluate


def cmd_fuzz(args: argparse.Namespace, run: RunConfig) -> Outcome:
    rng = np.random.default_rng(run.seed)
    draw = f2_equivalence_sample if args.k == 2 else f3_equivalence_sample
    samples = [draw(rng, run.height) for _ in range(run.samples)]
    cache = TraceCache()
    outcomes = ParallelRunner(run.workers).map_ordered(_fuzz_evaluator(args.k, cache), samples)

    mismatches = [o for o in outcomes if not o['agree']]
    kinds: Dict[str, int] = {}
    for o in outcomes:
        kinds[o['kind']] = kinds.get(o['kind'], 0) + 1
    if args.dump:
        for index, o in enumerate(mismatches):
            export_report(o, os.path.join(args.dump, f"mismatch-{index:04d}.json"))
    if mismatches:
        logger.warning("%d of %d samples disagree with the oracle", len(mismatches), len(outcomes))
    result = {
        'k': args.k,
        'samples': len(outcomes),
        'agreements': len(outcomes) - len(mismatches),
        'mismatches': len(mismatches),
        'shattered': sum(1 for o in outcomes if o['oracle']),
        'not_shattered': sum(1 for o in outcomes if not o['oracle']),
        'kinds': dict(sorted(kinds.items())),
        'first_mismatches': mismatches[:10],
    }
    return result, _verdict_code(not mismatches)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=0, help='64-bit seed echoed into the output (default 0)')
    common.add_argument('--verbose', action='store_true', help='log search progress to stderr')

    parser = argparse.ArgumentParser(
        prog='pyshatter',
        description='Exact shattering checks for unions of lines, with axiom checkers and classification.',
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('check-shatter', parents=[common], help='decide whether k lines shatter a configuration')
    p.add_argument('--k', type=int, required=True, help='number of lines')
    p.add_argument('--input', required=True, help='configuration JSON {"points": [["x", "y"], ...]}')
    p.add_argument('--witnesses', action='store_true', help='emit one isolating set of lines per subset')
    p.add_argument('--svg', help='also write an SVG drawing of the configuration')
    p.add_argument('--out', help='write the JSON report here instead of stdout')
    p.set_defaults(handler=cmd_check_shatter)

    p = sub.add_parser('axioms', parents=[common], help='evaluate the characterizing conditions')
    p.add_argument('--input', required=True)
    p.add_argument('--k', type=int, choices=(2, 3), help='predict shattering by k lines; exit 3 when predicted false')
    p.add_argument('--b2-reading', choices=[r.value for r in B2Reading], default=B2Reading.POINT_SET.value,
                   help='"point-set": lines meet in a point of P (default); "plane": lines are not parallel')
    p.add_argument('--out')
    p.set_defaults(handler=cmd_axioms)

    p = sub.add_parser('classify', parents=[common], help='isomorphism type of a maximum shattered set')
    p.add_argument('--k', type=int, choices=(2, 3), required=True)
    p.add_argument('--input', required=True)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser('iso', parents=[common], help='shatter-isomorphism of two configurations')
    p.add_argument('--a', required=True)
    p.add_argument('--b', required=True)
    p.add_argument('--out')
    p.set_defaults(handler=cmd_iso)

    p = sub.add_parser('reps', parents=[common], help='emit the representative configurations')
    p.add_argument('--k', type=int, choices=(2, 3), required=True)
    p.add_argument('--out', help='directory receiving one JSON file per representative')
    p.add_argument('--verify', action='store_true', help='re-run the oracle and classifier on the whole corpus')
    p.set_defaults(handler=cmd_reps, out_is_directory=True)

    p = sub.add_parser('reduce-dim', parents=[common], help='reduce codimension-2 flats of R^n to a lower dimension')
    p.add_argument('--input', required=True, help='{"n": 3, "elements": [{"offset": [...], "basis": [[...]]}]}')
    p.add_argument('--to-dim', type=int, default=2)
    p.add_argument('--k', type=int, help='also compare shattering in R^n and in the plane')
    p.add_argument('--out')
    p.set_defaults(handler=cmd_reduce_dim)

    p = sub.add_parser('abstract', parents=[common], help='finite abstract set systems')
    p.add_argument('abstract_command', choices=('vc', 'sk', 'profile'),
                   help='vc: VC-dimension of the k-fold union; sk: isomorphism types; profile: d_1..d_k')
    p.add_argument('--k', type=int, default=1)
    p.add_argument('--input', required=True, help='{"ground": n, "family": [[indices], ...]}')
    p.add_argument('--out')
    p.set_defaults(handler=cmd_abstract)

    p = sub.add_parser('fuzz-equivalence', parents=[common],
                       help='compare the axiom prediction with the oracle on seeded random samples')
    p.add_argument('--k', type=int, choices=(2, 3), required=True)
    p.add_argument('--samples', type=int, default=1000)
    p.add_argument('--workers', type=int, default=0, help='worker threads (0 = from the CPU count)')
    p.add_argument('--height', type=int, default=64, help='coordinate height bound for the generators')
    p.add_argument('--dump', help='directory receiving every mismatching sample')
    p.add_argument('--out')
    p.set_defaults(handler=cmd_fuzz)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    flags = {
        name: value for name, value in vars(args).items()
        if name in ('witnesses', 'b2_reading', 'verify', 'to_dim', 'abstract_command', 'svg', 'dump')
        and value is not None
    }
    return RunConfig(
        command=args.command,
        input_path=getattr(args, 'input', None),
        output_path=getattr(args, 'out', None),
        k=getattr(args, 'k', None),
        seed=args.seed,
        samples=getattr(args, 'samples', 0),
        workers=getattr(args, 'workers', 0),
        height=getattr(args, 'height', 64),
        flags=flags,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main application entry point"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    try:
        run = _run_config(args)
        result, code = args.handler(args, run)
    except NotShatteredError as e:
        logger.error("%s", e)
        return EXIT_FALSE
    except SearchBoundExceededError:
        logger.exception("Search bound exceeded")
        return EXIT_INTERNAL
    except (PyShatterError, ValueError) as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        logger.exception("Internal error")
        return EXIT_INTERNAL

    document = {**result, 'command': args.command, 'seed': run.seed, 'run': run.to_dict()}
    if args.out and not getattr(args, 'out_is_directory', False):
        export_report(document, args.out)
    else:
        sys.stdout.write(dump_report(document))
    return code


if __name__ == '__main__':
    sys.exit(main())
