"""Command modules; each exposes ``register(subparsers)`` and one ``cmd_*`` handler"""

from . import benchmark, census, compare, evaluate, gen_data, gradcam, gradcheck, train

COMMANDS = [gen_data, train, evaluate, gradcheck, benchmark, gradcam, census, compare]

__all__ = ["COMMANDS"]
