#  Copyright 2021 The misep Authors
#
#  Licensed under the Apache License, Version 2.0 (the "License");
#  you may not use this file except in compliance with the License.
#  You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
#  Unless required by applicable law or agreed to in writing, software
#  distributed under the License is distributed on an "AS IS" BASIS,
#  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#  See the License for the specific language governing permissions and
#  limitations under the License.

import argparse
import sys
import traceback
from typing import List, Optional

from misep.network import KINDS
from ._config import load_config
from ._pipeline import cmd_align, cmd_evaluate, cmd_pipeline, cmd_separate, cmd_simulate

COMMANDS = ('simulate', 'align', 'separate', 'evaluate', 'pipeline')


def build_parser() -> 'argparse.ArgumentParser':
    parser = argparse.ArgumentParser(prog='misep', description='Separate nonlinear show-through image mixtures.')
    subparsers = parser.add_subparsers(dest='command', required=True)

    for command in COMMANDS:
        subparser = subparsers.add_parser(command)
        subparser.add_argument('--config', metavar='PATH', help='flat key-value configuration file')
        subparser.add_argument('--seed', type=int, help='master seed')
        subparser.add_argument('--runs', type=int, help='number of training runs per mode')
        subparser.add_argument('--mode', choices=KINDS, help='separator kind')
        subparser.add_argument('--out', metavar='DIR', help='output directory')
        subparser.add_argument('--workers', type=int, help='training runs executed concurrently')
        subparser.add_argument('--debug', action='store_true', help='print the traceback of a failure')

        if command == 'pipeline':
            subparser.add_argument('--resume', action='store_true', help='skip stages completed in the manifest')

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command of the command-line interface.

    :param argv:            - Arguments without the program name, `sys.argv[1:]` if None.
    :return:                - Exit status.
    """
    args = build_parser().parse_args(argv)

    try:
        config = load_config(args.config).with_overrides(seed=args.seed, runs=args.runs, mode=args.mode,
                                                         out=args.out, workers=args.workers)
        config.validate_paths()

        if args.command == 'simulate':
            files = cmd_simulate(config)
        elif args.command == 'align':
            files = cmd_align(config)
        elif args.command == 'separate':
            files = cmd_separate(config)
        elif args.command == 'evaluate':
            files = cmd_evaluate(config)
        else:
            files = cmd_pipeline(config, args.resume)
    except Exception as error:
        print(f'misep {args.command}: {error}', file=sys.stderr)

        if args.debug:
            traceback.print_tb(error.__traceback__)

        return 1

    print(f'misep {args.command}: wrote {len(files)} files to {config.out}')
    return 0
