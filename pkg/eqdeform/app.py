import argparse
import logging
import sys
from typing import List, Optional

from eqdeform.api.routes import run
from eqdeform.config import settings
from eqdeform.models.problem import load
from eqdeform.services.ambient import AMBIENT_PATHS
from eqdeform.utils.error_handler import EXIT_INPUT, ErrorHandler, InputError, setup_logging

logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """参数错误按输入错误处理 (退出码 3)"""

    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog='eqdeform', description='equivariant deformations of complete intersections')
    parser.add_argument('--json', action='store_true', help='machine-readable report')
    parser.add_argument('--log-level', default=None)
    parser.add_argument('--log-file', default=None)

    common = ArgumentParser(add_help=False)
    common.add_argument('--truncate', type=int, default=None)
    common.add_argument('--ambient', choices=AMBIENT_PATHS, default=None)
    common.add_argument('--group-bound', dest='group_bound', type=int, default=None)
    common.add_argument('--slack', type=int, default=None)

    sub = parser.add_subparsers(dest='command', required=True)
    for name in ('check', 'tangent', 'obstruction'):
        cmd = sub.add_parser(name, parents=[common])
        cmd.add_argument('problem')
    cmd = sub.add_parser('lift', parents=[common])
    cmd.add_argument('problem')
    cmd.add_argument('--order', type=int, default=1)
    cmd.add_argument('--enumerate', action='store_true')
    cmd = sub.add_parser('iso', parents=[common])
    cmd.add_argument('problem')
    cmd.add_argument('other')
    cmd = sub.add_parser('ramify')
    cmd.add_argument('--d', type=int, required=True)
    cmd.add_argument('--m', type=int, required=True)
    cmd.add_argument('--p', type=int, default=None)
    return parser


def main(argv: Optional[List[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as error:
        print(f"error: {error.message}", file=stderr if stderr is not None else sys.stderr)
        return EXIT_INPUT

    config = settings.override(log_level=args.log_level, log_file=args.log_file)
    setup_logging(config.log_level, config.log_file)

    def body() -> int:
        logger.info(f"command {args.command}")
        paths = [getattr(args, 'problem', None), getattr(args, 'other', None)]
        problems = [load(path) for path in paths if path is not None]
        flags = {k: v for k, v in vars(args).items()
                 if k not in ('command', 'problem', 'other', 'json', 'log_level', 'log_file')}
        report = run(args.command, problems, flags, config)
        stdout.write(report.to_json() if args.json else report.to_text())
        return report.exit_code

    return ErrorHandler(stderr).run(body)


if __name__ == '__main__':
    sys.exit(main())
