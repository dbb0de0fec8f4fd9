"""gradcheck: finite-difference verification of every analytic gradient"""

import argparse
import logging

from ..config.run_config import RunConfig
from ..config.settings import Settings
from ..errors import EXIT_NUMERICAL, EXIT_OK
from ..nn.gradcheck import run_gradcheck
from .common import add_config_argument, seed_value

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("gradcheck", help="Compare analytic gradients with central differences")
    add_config_argument(parser)
    parser.add_argument("--seed", type=seed_value, default=0)
    parser.add_argument("--tolerance", type=float, default=1e-4, help="Max relative error per group")
    parser.set_defaults(handler=cmd_gradcheck)
    return parser


def cmd_gradcheck(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    report = run_gradcheck(seed=args.seed, tolerance=args.tolerance)
    worst = {}
    for result in report.results:
        key = (result.suite, result.group.split(".")[-1])
        if key not in worst or result.max_rel_error > worst[key].max_rel_error:
            worst[key] = result
    for (suite, group), result in worst.items():
        status = "ok" if result.passed else "FAIL"
        print(f"{suite:<22} {group:<8} max_rel_error={result.max_rel_error:.3e} tol={result.tolerance:.0e} {status}")
    if not report.passed:
        failed = sum(not r.passed for r in report.results)
        logger.error("gradcheck failed for %d of %d parameter groups", failed, len(report.results))
        return EXIT_NUMERICAL
    print(f"all {len(report.results)} parameter groups pass")
    return EXIT_OK
