# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Command-line entry point: `cascademf <subcommand>`

Exit codes: 0 on success or pass, 2 when a model is rejected or a scenario misses a threshold, 1 on
any error.
"""
import argparse
import json
import logging
import os
import sys

from cascademf.analytic_spectrum import spectrum_curve
from cascademf.cascade import (composed_samples, estimate_moments, evaluate_grid, export_binary,
                               export_grid_csv, replica_seed, sample_tree)
from cascademf.config import RunConfig, expand_q_grid, load_config
from cascademf.empirical_spectrum import empirical_tau
from cascademf.exceptions import CascadeError
from cascademf.oscillation import pointwise_exponent
from cascademf.plot_data import csv_bytes
from cascademf.runner import ExperimentRunner, plain
from cascademf.scenarios import SCENARIO_DEFINITIONS
from cascademf.version import __version__
from cascademf.weights import WeightModel, validate

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2


def parse_q_grid(text):
    """`start:stop:step` or a comma-separated list"""
    if ':' in text:
        start, stop, step = (float(part) for part in text.split(':'))
        return expand_q_grid({'start': start, 'stop': stop, 'step': step})
    return tuple(float(part) for part in text.split(','))


def parse_int_list(text):
    """`first:last` (inclusive) or a comma-separated list"""
    if ':' in text:
        first, last = (int(part) for part in text.split(':'))
        return tuple(range(first, last + 1))
    return tuple(int(part) for part in text.split(','))


def resolve_model(value):
    """A preset name, inline JSON, or the path of a JSON model file"""
    if os.path.isfile(value):
        with open(value, encoding='utf-8') as stream:
            return WeightModel.from_json(stream.read())
    return RunConfig(model=value).resolve_model()


def emit(payload, output):
    """Write bytes to `output`, or to stdout when no path is given"""
    if output:
        with open(output, 'wb') as stream:
            stream.write(payload)
    else:
        sys.stdout.write(payload.decode('utf-8'))


def json_bytes(document):
    return (json.dumps(plain(document), sort_keys=True, indent=2) + '\n').encode('utf-8')


def command_validate(args):
    report = validate(resolve_model(args.model), seed=args.seed)
    emit(json_bytes(report.to_dict()), args.output)
    return EXIT_OK if report.is_valid else EXIT_FAILED


def command_simulate(args):
    model = resolve_model(args.model)
    real = sample_tree(model, args.depth, args.seed)
    level = args.level or args.depth

    if args.composed:
        samples = composed_samples(real, level)
        rows = [[x, value.real, value.imag] for x, value in zip(samples.x, samples.y)]
        emit(csv_bytes(['t', 're', 'im'], rows), args.output)
    elif args.output:
        with open(args.output, 'w', encoding='utf-8', newline='') as stream:
            export_grid_csv(evaluate_grid(real, 'W', level), stream)
    else:
        export_grid_csv(evaluate_grid(real, 'W', level), sys.stdout)

    if args.binary:
        with open(args.binary, 'wb') as stream:
            export_binary(real, stream)
    return EXIT_OK


def command_tau(args):
    curve = spectrum_curve(resolve_model(args.model), parse_q_grid(args.q_grid))
    emit(csv_bytes(['q', 'tau', 'tau_prime', 'in_J'], curve.rows()), args.output)
    return EXIT_OK


def command_spectrum(args):
    model = resolve_model(args.model)
    reals = [sample_tree(model, args.depth, replica_seed(args.seed, replica)) for replica in range(args.replicas)]
    curve = empirical_tau(reals, args.m, parse_q_grid(args.q_grid), parse_int_list(args.levels), args.sub_depth)
    rows = [
        [q, t_hat, stderr, used]
        for q, t_hat, stderr, used in zip(curve.q, curve.tau, curve.stderr, curve.levels_used)
    ]
    emit(csv_bytes(['q', 't_hat', 'stderr', 'n_levels'], rows), args.output)
    return EXIT_OK


def command_pointwise(args):
    model = resolve_model(args.model)
    samples = composed_samples(sample_tree(model, args.depth, args.seed), args.depth)
    rows = [pointwise_exponent(samples, x, args.m).to_row() for x in args.x]
    emit(csv_bytes(['x', 'm', 'slope', 'residual', 'nonzero'], rows), args.output)
    return EXIT_OK


def command_moments(args):
    report = estimate_moments(resolve_model(args.model), args.m, args.q, args.t, args.replicas, args.depth, args.seed)
    emit(json_bytes(report.to_dict()), args.output)
    return EXIT_OK


def command_experiment(args):
    overrides = {
        'scenario': args.scenario,
        'seed': args.seed,
        'out': args.out,
        'model': args.model,
        'depth': args.depth,
        'replicas': args.replicas,
    }
    config = load_config(args.config, args.scenario, overrides)
    runner = ExperimentRunner(config)
    report = runner.run()
    location = runner.write(report)
    LOGGER.info("Run stored at %s", location)
    return EXIT_OK if report.passed else EXIT_FAILED


def build_parser():
    parser = argparse.ArgumentParser(prog='cascademf', description="Complex random cascades and their spectra")
    parser.add_argument('--version', action='version', version=__version__)
    parser.add_argument('--verbose', action='store_true', help="Debug logging")
    commands = parser.add_subparsers(dest='command', required=True)

    def add_command(name, handler, help_text, model=True, output=True):
        command = commands.add_parser(name, help=help_text)
        command.set_defaults(handler=handler)
        if model:
            command.add_argument('--model', default='binomial', help="Preset name, inline JSON or JSON file")
        if output:
            command.add_argument('--output', help="Output file, stdout when omitted")
        command.add_argument('--seed', type=int, default=0)
        return command

    add_command('validate', command_validate, "Classify a weight model")

    simulate = add_command('simulate', command_simulate, "Sample a cascade and write its grid values")
    simulate.add_argument('--depth', type=int, default=10)
    simulate.add_argument('--level', type=int)
    simulate.add_argument('--composed', action='store_true', help="Write F = F_W o F_L^-1 instead of F_W")
    simulate.add_argument('--binary', help="Also dump the weight tree to this file")

    tau_command = add_command('tau', command_tau, "Analytic tau curve")
    tau_command.add_argument('--q-grid', default='-4:4:0.1')

    spectrum = add_command('spectrum', command_spectrum, "Empirical tau curve")
    spectrum.add_argument('--q-grid', default='0:3:0.25')
    spectrum.add_argument('--depth', type=int, default=12)
    spectrum.add_argument('--levels', default='5:9')
    spectrum.add_argument('--sub-depth', type=int, default=3)
    spectrum.add_argument('--replicas', type=int, default=16)
    spectrum.add_argument('--m', type=int, default=1)

    pointwise = add_command('pointwise', command_pointwise, "Pointwise oscillation exponents")
    pointwise.add_argument('--x', type=float, nargs='+', required=True)
    pointwise.add_argument('--depth', type=int, default=12)
    pointwise.add_argument('--m', type=int, default=1)

    moments = add_command('moments', command_moments, "Moments and Laplace transform of Osc over [0, 1]")
    moments.add_argument('--q', type=float, default=2.0)
    moments.add_argument('--t', type=float, nargs='*', default=[10.0, 100.0, 1000.0, 10000.0])
    moments.add_argument('--depth', type=int, default=10)
    moments.add_argument('--replicas', type=int, default=256)
    moments.add_argument('--m', type=int, default=1)

    experiment = commands.add_parser('experiment', help="Run a full scenario and write its report")
    experiment.set_defaults(handler=command_experiment)
    experiment.add_argument('--scenario', choices=sorted(SCENARIO_DEFINITIONS))
    experiment.add_argument('--config', help="JSON configuration document")
    experiment.add_argument('--seed', type=int)
    experiment.add_argument('--out')
    experiment.add_argument('--model')
    experiment.add_argument('--depth', type=int)
    experiment.add_argument('--replicas', type=int)
    return parser


def main(argv=None):
    """Primary entry point"""
    args = build_parser().parse_args(argv)
    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    try:
        return args.handler(args)
    except (CascadeError, ValueError, OSError) as error:
        LOGGER.error("%s: %s", type(error).__name__, error)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
