#!/usr/bin/env python3
"""
Main script of the crossbar design-technology exploration toolkit.

Each sub-command runs one experiment (current map, endurance map, disparity
sweep, cost sweep, placement optimization, ...) and writes CSV/JSON data
plus a manifest into the output directory.
"""

import argparse
import logging
import sys

from src.config import settings
from src.config.technology import load_config
from src.errors import CrossbarError, SolverError
from src.tasks import (
    cmd_cost_sweep,
    cmd_current_map,
    cmd_disparity_sweep,
    cmd_endurance_map,
    cmd_generate_workload,
    cmd_optimize,
    cmd_tradeoff,
)
from src.utils.helpers import check_config_availability

# Set up logging
logging.basicConfig(
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_IO = 4

STATES = ['hrs', 'lrs1', 'lrs2', 'lrs3']


def _number_list(cast):
    def parse(text):
        try:
            return [cast(item) for item in text.split(',') if item.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a comma-separated list, got {text!r}")
    return parse


def _positive(cast):
    def parse(text):
        value = cast(text)
        if value <= 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {text}")
        return value
    return parse


def build_parser():
    """Build the argument parser with one sub-command per experiment."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--config',
        type=str,
        default=settings.DEFAULT_CONFIG_PATH,
        help='Technology profile in TOML (default: $XBAR_CONFIG or %(default)s)'
    )
    common.add_argument(
        '--out',
        type=str,
        default=settings.DEFAULT_OUTPUT_DIR,
        help='Output directory (default: %(default)s)'
    )
    common.add_argument(
        '--verbose',
        action='store_true',
        help='Enable verbose output'
    )

    crossbar = argparse.ArgumentParser(add_help=False)
    crossbar.add_argument('--size', type=_positive(int), default=None,
                          help='Crossbar dimension N (default: [crossbar] size)')
    crossbar.add_argument('--node', type=float, default=None,
                          help='Technology node in nm, e.g. 90, 65, 45 or 32 (default: reference node)')

    stress = argparse.ArgumentParser(add_help=False)
    stress.add_argument('--state', choices=STATES, default='hrs',
                        help='Programmed state of every cell (default: %(default)s)')
    stress.add_argument('--pulse-width', type=_positive(float), default=None,
                        help='Spike pulse width in seconds (default: [endurance] pulse_width)')
    stress.add_argument('--v-spike', type=_positive(float), default=None,
                        help='Spike voltage in volts (default: [endurance] spike_voltage)')

    jobs = argparse.ArgumentParser(add_help=False)
    jobs.add_argument('--jobs', type=_positive(int), default=settings.DEFAULT_JOBS,
                      help='Sweep points run in parallel (default: $XBAR_JOBS or %(default)s)')

    parser = argparse.ArgumentParser(
        description='Explore parasitic currents, read endurance, cost-per-bit and synapse placement '
                    'of NVM crossbars for neuromorphic inference.'
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('current-map', parents=[common, crossbar],
                       help='Per-cell current of a crossbar with every wordline spiking')
    p.add_argument('--state', choices=STATES, default=None,
                   help='Programmed state of every cell (default: [cells] default_state)')
    p.add_argument('--v-spike', type=_positive(float), default=None,
                   help='Spike voltage in volts (default: calibrated read voltage)')

    sub.add_parser('endurance-map', parents=[common, crossbar, stress],
                   help='Read endurance of every cell of a crossbar')

    p = sub.add_parser('disparity-sweep', parents=[common, jobs],
                       help='Shortest/longest path current disparity over crossbar sizes')
    p.add_argument('--sizes', type=_number_list(int), default=[32, 64, 128, 256],
                   help='Comma-separated crossbar sizes (default: 32,64,128,256)')
    p.add_argument('--nodes', type=_number_list(float), default=None,
                   help='Comma-separated technology nodes (default: reference node)')

    p = sub.add_parser('cost-sweep', parents=[common],
                       help='Normalized cost-per-bit over crossbar sizes per node')
    p.add_argument('--sizes', type=_number_list(int), default=list(range(16, 257, 16)),
                   help='Comma-separated crossbar sizes (default: 16,32,...,256)')
    p.add_argument('--nodes', type=_number_list(float), default=None,
                   help='Comma-separated technology nodes (default: every configured node)')

    p = sub.add_parser('optimize', parents=[common, crossbar, stress],
                       help='Endurance-aware synapse placement against the row-major baseline')
    p.add_argument('--workload', type=str, default=None, help='Workload JSON file')
    p.add_argument('--distribution', type=str, default=None,
                   help='Spike-count distribution of a generated workload, e.g. zipf:1.2 (default)')
    p.add_argument('--seed', type=int, default=0, help='Seed of generated workloads (default: %(default)s)')
    p.add_argument('--refine', action='store_true', help='Run the local swap pass after the greedy placement')
    p.add_argument('--skews', type=_number_list(float), default=None,
                   help='Comma-separated zipf exponents of a skew study, e.g. 1.0,1.2,1.5')
    p.add_argument('--replicates', type=_positive(int), default=50,
                   help='Workloads per skew in the skew study (default: %(default)s)')

    p = sub.add_parser('generate-workload', parents=[common],
                       help='Write a seeded synthetic workload')
    p.add_argument('--distribution', type=str, default='zipf:1.2',
                   help='uniform:LO,HI | lognormal:MU,SIGMA | zipf:S (default: %(default)s)')
    p.add_argument('--synapses', type=_positive(int), default=None,
                   help='Number of synapses (default: [workload] n_synapses)')
    p.add_argument('--seed', type=int, default=0, help='Random seed (default: %(default)s)')
    p.add_argument('--trains', action='store_true', help='Also draw spike trains and ISI statistics')

    p = sub.add_parser('tradeoff', parents=[common, jobs],
                       help='Cost-per-bit against endurance variation over crossbar sizes')
    p.add_argument('--sizes', type=_number_list(int), default=[32, 64, 128, 256],
                   help='Comma-separated crossbar sizes (default: 32,64,128,256)')
    p.add_argument('--node', type=float, default=None,
                   help='Technology node in nm (default: reference node)')

    return parser


def parse_args(argv=None):
    """Parse command line arguments."""
    return build_parser().parse_args(argv)


def run_command(args, config):
    """Dispatch parsed arguments to the command body."""
    node = getattr(args, 'node', None)
    if node is None:
        node = config.technology.reference_node
    size = getattr(args, 'size', None) or config.crossbar.size

    if args.command == 'current-map':
        return cmd_current_map(config, args.config, args.out, size, node,
                               v_spike=args.v_spike, state=args.state)
    if args.command == 'endurance-map':
        return cmd_endurance_map(config, args.config, args.out, size, node, state=args.state,
                                 pulse_width=args.pulse_width, v_spike=args.v_spike)
    if args.command == 'disparity-sweep':
        return cmd_disparity_sweep(config, args.config, args.out, sizes=args.sizes,
                                   nodes=args.nodes, jobs=args.jobs)
    if args.command == 'cost-sweep':
        return cmd_cost_sweep(config, args.config, args.out, nodes=args.nodes, sizes=args.sizes)
    if args.command == 'optimize':
        return cmd_optimize(config, args.config, args.out, size, node, seed=args.seed,
                            workload_path=args.workload, distribution=args.distribution,
                            state=args.state, pulse_width=args.pulse_width, v_spike=args.v_spike,
                            refine=args.refine, skews=args.skews, replicates=args.replicates)
    if args.command == 'generate-workload':
        return cmd_generate_workload(config, args.config, args.out, args.distribution, args.seed,
                                     n_synapses=args.synapses, with_trains=args.trains)
    if args.command == 'tradeoff':
        return cmd_tradeoff(config, args.config, args.out, sizes=args.sizes, node=args.node, jobs=args.jobs)
    raise ValueError(f"unknown command {args.command}")


def main(argv=None):
    """Run one experiment and return the process exit code."""
    args = parse_args(argv)

    # Set logging level based on verbose flag
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    if not check_config_availability(args.config):
        build_parser().print_usage(sys.stderr)
        return EXIT_USAGE

    try:
        config = load_config(args.config)
        logger.info(f"Running {args.command} with {args.config}")
        written = run_command(args, config)
        logger.info(f"{args.command} completed, {len(written)} files written to {args.out}")
        return EXIT_OK

    except SolverError as e:
        logger.error(f"Solver failed: {e}")
        return EXIT_SOLVER
    except (CrossbarError, ValueError) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
