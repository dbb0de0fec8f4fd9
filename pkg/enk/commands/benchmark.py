"""benchmark: naive vs decomposed EnK vs standard conv at the preset shapes"""

import argparse
import logging

from ..benchmark import run_benchmark
from ..config.run_config import RunConfig
from ..config.settings import Settings
from ..errors import EXIT_OK, ConfigError
from ..metrics import write_csv
from ..presets import get_preset, preset_names
from .common import add_config_argument, parse_shape, seed_value

logger = logging.getLogger(__name__)


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("benchmark", help="Time the convolution paths at the dataset preset shapes")
    add_config_argument(parser)
    parser.add_argument("--repeats", type=int, default=9, help="Timed runs per (shape, impl); the median is kept")
    parser.add_argument("--presets", nargs="+", default=preset_names(), choices=preset_names())
    parser.add_argument("--filters", type=int, default=8)
    parser.add_argument("--kernel", type=parse_shape, default=(3, 7), metavar="ROWSxCOLS")
    parser.add_argument("--seed", type=seed_value, default=0)
    parser.set_defaults(handler=cmd_benchmark)
    return parser


def cmd_benchmark(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    if args.repeats < 1 or args.filters < 1:
        raise ConfigError("--repeats and --filters must be >= 1")
    out = config.output_dir()
    rows = run_benchmark([get_preset(name) for name in args.presets], repeats=args.repeats, filters=args.filters,
                         kernel=args.kernel, seed=args.seed, dtype=settings.numpy_dtype)
    write_csv(rows, out / "benchmark.csv")
    for row in rows:
        print(f"{row.preset:<5} {row.impl:<15} {row.median_seconds * 1e3:10.3f} ms")
    return EXIT_OK
