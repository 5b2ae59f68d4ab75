"""Command line entry point: ``run``, ``stats`` and ``size``."""

import argparse
import sys

from .dataset import DatasetError
from .experiment import (ConfigError, load_config, read_records,
                         run_experiment, stats_command, summarize_size)

EXIT_CONFIG = 2
EXIT_DATA = 3


def _parser():
    parser = argparse.ArgumentParser(
        prog='gpensemble',
        description='Pruned GP ensembles for symbolic regression.')
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help='run the experiment protocol')
    run.add_argument('--config', required=True,
                     help='key = value configuration file')
    run.add_argument('--dataset', help='CSV file, last column is the target')
    run.add_argument('--method', action='append', dest='methods',
                     help='pruning method (repeatable)')
    run.add_argument('--seed', type=int, help='master seed')
    run.add_argument('--out', help='output directory')
    run.add_argument('--preset', choices=['desk'],
                     help='reduced desk-scale settings')
    run.add_argument('--jobs', type=int, help='worker processes')
    run.add_argument('--set', action='append', default=[], metavar='KEY=VALUE',
                     help='override any configuration key')

    stats = sub.add_parser('stats', help='all-pairs Mann-Whitney p-values')
    stats.add_argument('--summary', action='append', required=True,
                       help='summary CSV (repeatable)')
    stats.add_argument('--out', required=True, help='matrix CSV to write')

    size = sub.add_parser('size', help='mean ensemble size per method')
    size.add_argument('--records', required=True, help='generations CSV')
    return parser


def _run(args):
    overrides = {}
    for item in args.set:
        if '=' not in item:
            raise ConfigError('--set expects KEY=VALUE, got %r' % item)
        key, value = item.split('=', 1)
        overrides[key.strip()] = value
    overrides.update(dataset=args.dataset, master_seed=args.seed,
                     out=args.out, jobs=args.jobs, preset=args.preset)
    if args.methods:
        overrides['methods'] = tuple(args.methods)
    cfg = load_config(args.config, **overrides)
    gen_path, summary_path = run_experiment(cfg)
    print('wrote %s and %s' % (gen_path, summary_path))


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == 'run':
            _run(args)
        elif args.command == 'stats':
            matrix = stats_command(args.summary, args.out)
            print(matrix.format())
        else:
            for method, mean in summarize_size(read_records(args.records)).items():
                print('%-18s %.3f' % (method, mean))
    except ConfigError as exc:
        print('config error: %s' % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (DatasetError, OSError, ValueError) as exc:
        print('data error: %s' % exc, file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == '__main__':
    sys.exit(main())
