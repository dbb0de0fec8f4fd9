"""census: trainable-parameter table for every family, preset and variant"""

import argparse
import logging
from typing import List

from pydantic import BaseModel

from ..config.run_config import RunConfig
from ..config.settings import Settings
from ..errors import EXIT_NUMERICAL, EXIT_OK
from ..metrics import write_csv
from ..models.zoo import VARIANTS, build_model, list_presets
from .common import add_config_argument

logger = logging.getLogger(__name__)


class CensusRow(BaseModel):
    preset: str
    family: str
    org: int
    enk: int
    gauss: int

    @property
    def enk_delta(self) -> int:
        return self.enk - self.org


def parameter_census() -> List[CensusRow]:
    rows = []
    for spec in list_presets():
        counts = {variant: build_model(spec.model_copy(update={"variant": variant})).param_count()
                  for variant in VARIANTS}
        preset, _ = spec.name.split("/")
        rows.append(CensusRow(preset=preset, family=spec.family, **counts))
    return rows


def register(subparsers) -> argparse.ArgumentParser:
    parser = subparsers.add_parser("census", help="Tabulate trainable parameters with and without EnK")
    add_config_argument(parser)
    parser.set_defaults(handler=cmd_census)
    return parser


def cmd_census(args: argparse.Namespace, config: RunConfig, settings: Settings) -> int:
    """Exit code 2 if any enk variant is not exactly one parameter larger than org."""
    out = config.output_dir()
    rows = parameter_census()
    write_csv([{**row.model_dump(), "enk_delta": row.enk_delta} for row in rows], out / "census.csv")
    print(f"{'preset':<6} {'family':<12} {'org':>10} {'enk':>10} {'gauss':>10}")
    for row in rows:
        print(f"{row.preset:<6} {row.family:<12} {row.org:>10} {row.enk:>10} {row.gauss:>10}")
    broken = [row for row in rows if row.enk_delta != 1 or row.gauss != row.org]
    if broken:
        logger.error("parameter census violated for %s", ", ".join(f"{r.preset}/{r.family}" for r in broken))
        return EXIT_NUMERICAL
    return EXIT_OK
