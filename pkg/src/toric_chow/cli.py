import logging
import sys
from argparse import ArgumentParser
from importlib.metadata import version
from pathlib import Path

from .check_instances import check_results
from .config import get_run_config
from .instance import COMMANDS, Instance, render
from .repository import InstanceRepository

parser = ArgumentParser(prog="toric-chow")
parser.add_argument("-v", "--verbose", action="store_true", help="Enable debug logging.")
parser.add_argument("--version", action="version", version=version("toric-chow"), help="Print the version.")
mode = parser.add_mutually_exclusive_group()
mode.add_argument("-c", "--check", action="store_const", const="check", dest="mode", help="Check and report mismatches (default).")
mode.add_argument(
    "-i",
    "--interactive",
    action="store_const",
    const="interactive",
    dest="mode",
    help="Prompt user to replace, skip in future, or leave as is.",
)
mode.add_argument("-f", "--fix", action="store_const", const="fix", dest="mode", help="Write the computed results.")
parser.set_defaults(mode="check")
parser.add_argument("--degree-cap", type=int, help="Highest degree to present before giving up (default 64).")
parser.add_argument("--order", type=int, help="Order r of the inertia stack for 'inertia' (default 1).")
parser.add_argument("--multifan", action="store_const", const=True, help="Use the multi-fan box for 'box'.")
parser.add_argument("--hypertoric", action="store_const", const=True, help="Use the hypertoric ring for 'betti' and 'multiply'.")
parser.add_argument("command", choices=list(COMMANDS), help="Command to run.")
parser.add_argument("target", help="Instance file, or directory of golden instances.")


def app() -> int:
    args = parser.parse_args()

    logging.basicConfig(format="%(message)s")
    logger = logging.getLogger("toric_chow")
    level = logging.DEBUG if args.verbose else logging.INFO
    logger.setLevel(level)

    target = Path(args.target)
    config = get_run_config(target).override(
        degree_cap=args.degree_cap,
        order=args.order,
        multifan=args.multifan,
        hypertoric=args.hypertoric,
    )

    if target.is_dir():
        repository = InstanceRepository(config, target)
        return check_results(repository, args.command, args.mode)

    try:
        text = target.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        reason = e.strerror if isinstance(e, OSError) else f"not UTF-8 ({e.reason} at byte {e.start})"
        print(render({"error": "invalid_instance", "message": f"cannot read {target}: {reason}"}), end="")
        logger.error("cannot read %s: %s", target, reason)
        return 2

    result = Instance(target, text, config).result(args.command)
    print(result.text, end="")
    if result.exit_code:
        message = result.document.get("message") if isinstance(result.document, dict) else None
        logger.error(message or f"{args.command} failed on {target}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(app())
