# This file is part of incres.
#
# incres is free software: you can redistribute it and/or modify it under
# the terms of the GNU General Public License as published by the Free Software
# Foundation, either version 2 of the License, or (at your option) any later
# version.
#
# incres is distributed in the hope that it will be useful, but WITHOUT ANY
# WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR
# A PARTICULAR PURPOSE. See the GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License along with
# incres. If not, see <https://www.gnu.org/licenses/>.

'''
Command line front end. Angles are read in degrees; data goes to stdout
(or --output), diagnostics to stderr.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
'''

import argparse
import logging
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import (
    DEFAULT_K_WINDOW,
    DEFAULT_TOL,
    IncresException,
    load_model,
)
from .core import AnomalyKind, KeplerianElements, PolarNodalState, TrajectorySamples, keplerian_to_polar_nodal
from .intermediary import closure_cycles, rosette, state_at_time
from .intermediary import hamiltonian as intermediary_hamiltonian
from .mainproblem import hamiltonian_polar, propagate_numeric
from .parallax import propagate_semianalytic
from .resonance import (
    K_SIGMA_COLUMNS,
    RATIO_COLUMNS,
    RESONANCE_COLUMNS,
    RationalRatio,
    apsidal_diagram,
    critical_cos2i,
    critical_inclination_series,
    k_sigma_diagram,
    latitude_diagram,
    scan_resonances,
)
from .utils.file_io import open_output
from .utils.serialization import write_table
from .validate import CHECKS, RESULT_COLUMNS, run_checks

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2

CRITICAL_COLUMNS = ('method', 'cos2i', 'i_deg', 'difference_deg')
DEFAULT_INCLINATIONS = (0.0, 30.0, 50.0, 63.44, 70.0, 90.0)


class UsageParser(argparse.ArgumentParser):
    '''argparse with usage errors mapped to exit code 1.'''
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '{}: error: {}\n'.format(self.prog, message))


@dataclass(frozen=True)
class RunConfig:
    model: object
    tol: float
    output: str
    format: str


def float_list(count=None):
    def parse(text):
        try:
            values = [float(item) for item in text.split(',') if item.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError('expected comma separated numbers, got {!r}'.format(text))
        if count is not None and len(values) != count:
            raise argparse.ArgumentTypeError('expected {} numbers, got {}'.format(count, len(values)))
        return values
    return parse


def rational(text):
    try:
        return RationalRatio.parse(text)
    except IncresException as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _common_options():
    # SUPPRESS lets the same flags sit before or after the subcommand
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument('--config', help='physical model json (default: $INCRES_CONFIG, then canonical units)')
    common.add_argument('--mu', type=float, help='gravitational parameter')
    common.add_argument('--alpha', type=float, help='equatorial radius')
    common.add_argument('--j2', type=float, help='second zonal harmonic')
    common.add_argument('--format', choices=('csv', 'json'), help='output format (default csv)')
    common.add_argument('--output', help='output file (default stdout)')
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='debug diagnostics')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='warnings only')
    return common


def build_parser():
    common = _common_options()
    parser = UsageParser(prog='incres', parents=[common],
                         description='Inclination resonances of the J2 main problem.')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    critical = commands.add_parser('critical', parents=[common], help='critical inclination, exact and series')
    param = critical.add_mutually_exclusive_group(required=True)
    param.add_argument('--sigma', type=float, help='oblateness parameter J2 (alpha/p)^2')
    param.add_argument('--p', type=float, help='semi-latus rectum; sigma is formed with the model J2 and alpha')
    critical.set_defaults(handler=cmd_critical)

    resonances = commands.add_parser('resonances', parents=[common], help='rational resonances and their inclinations')
    resonances.add_argument('--sigma', type=float, required=True)
    resonances.add_argument('--max-den', type=int, default=25)
    resonances.add_argument('--window', type=float_list(2), default=list(DEFAULT_K_WINDOW),
                            help='k window as LO,HI (default %(default)s)')
    resonances.add_argument('--jobs', type=int, default=1)
    resonances.set_defaults(handler=cmd_resonances)

    rosette = commands.add_parser('rosette', parents=[common], help='orbital-plane curve for a frequency ratio')
    rosette.add_argument('--ratio', type=rational, default=RationalRatio(1, 1), help='Q/P as N/D')
    rosette.add_argument('--e', type=float, default=0.8)
    rosette.add_argument('--theta0', type=float, default=135.0, help='perigee latitude in degrees')
    rosette.add_argument('--revs', type=int, help='latitude cycles (default: until the curve closes)')
    rosette.add_argument('--samples', type=int, default=360, help='samples per latitude cycle')
    rosette.set_defaults(handler=cmd_rosette)

    diagram = commands.add_parser('diagram', parents=[common], help='plot-ready resonance diagrams')
    diagram.add_argument('--kind', choices=('apsidal', 'latitude', 'k-sigma'), required=True)
    diagram.add_argument('--sigma', type=float, default=0.1)
    diagram.add_argument('--steps', type=int, default=20, help='grid steps per sigma (apsidal, latitude)')
    diagram.add_argument('--inclinations', type=float_list(), default=list(DEFAULT_INCLINATIONS),
                         help='k-sigma curves, degrees')
    diagram.add_argument('--sigma-max', type=float, default=0.1)
    diagram.add_argument('--points', type=int, default=101)
    diagram.set_defaults(handler=cmd_diagram)

    propagate = commands.add_parser('propagate', parents=[common], help='propagate a state')
    propagate.add_argument('--method', choices=('numeric', 'intermediary', 'semianalytic'), default='numeric')
    state = propagate.add_mutually_exclusive_group(required=True)
    state.add_argument('--elements', type=float_list(6), help='a,e,i,raan,argp,anomaly (degrees)')
    state.add_argument('--polar', type=float_list(6), help='r,theta,nu,R,Theta,N (degrees)')
    propagate.add_argument('--anomaly-kind', choices=[kind.value for kind in AnomalyKind], default='true')
    propagate.add_argument('--time', type=float, required=True)
    propagate.add_argument('--step', type=float, help='sampling interval (default time/100)')
    propagate.add_argument('--tol', type=float, default=DEFAULT_TOL)
    propagate.add_argument('--fixed-step', type=float, help='fixed integration step, reproducible mode')
    propagate.set_defaults(handler=cmd_propagate)

    validate = commands.add_parser('validate', parents=[common], help='run the acceptance checks')
    validate.add_argument('--only', type=lambda text: [name.strip() for name in text.split(',') if name.strip()],
                          help='comma separated subset of: {}'.format(', '.join(CHECKS)))
    validate.add_argument('--jobs', type=int, default=1)
    validate.add_argument('--tol', type=float, default=DEFAULT_TOL)
    validate.set_defaults(handler=cmd_validate)
    return parser


def _parse_args(argv=None):
    parser = build_parser()
    return parser, parser.parse_args(argv)


def _configure_logging(args):
    if getattr(args, 'verbose', False):
        level = logging.DEBUG
    elif getattr(args, 'quiet', False):
        level = logging.WARNING
    else:
        level = logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')


def run_config(args):
    model = load_model(getattr(args, 'config', None)).replace(
        mu=getattr(args, 'mu', None),
        alpha=getattr(args, 'alpha', None),
        j2=getattr(args, 'j2', None),
    )
    return RunConfig(
        model=model,
        tol=getattr(args, 'tol', DEFAULT_TOL),
        output=getattr(args, 'output', None),
        format=getattr(args, 'format', 'csv'),
    )


def emit(config, columns, rows):
    with open_output(config.output) as stream:
        write_table(stream, columns, rows, format=config.format)


def _degrees_of_cos2i(cos2i):
    return math.degrees(math.acos(math.sqrt(min(1.0, max(0.0, cos2i)))))


def cmd_critical(parser, args, config):
    if args.sigma is not None:
        sigma = args.sigma
    else:
        if not args.p > 0:
            parser.error('--p must be positive')
        sigma = config.model.j2 * (config.model.alpha / args.p) ** 2
    if not sigma >= 0:
        parser.error('sigma must not be negative')
    exact = critical_cos2i(sigma)
    i_exact = _degrees_of_cos2i(exact)
    rows = [('exact', exact, i_exact, 0.0)]
    for order in (0, 1, 2):
        series = critical_inclination_series(sigma, order)
        i_series = _degrees_of_cos2i(series)
        rows.append(('series{}'.format(order), series, i_series, i_series - i_exact))
    logger.info('sigma = %r: critical inclination %.6f deg (retrograde %.6f deg)', sigma, i_exact, 180.0 - i_exact)
    emit(config, CRITICAL_COLUMNS, rows)
    return EXIT_OK


def cmd_resonances(parser, args, config):
    if not args.sigma >= 0:
        parser.error('sigma must not be negative')
    if not 1 <= args.max_den:
        parser.error('--max-den must be positive')
    lo, hi = args.window
    if not 0 < lo <= hi:
        parser.error('--window must be a positive interval LO,HI')
    found = scan_resonances(args.sigma, args.max_den, (lo, hi), n_jobs=args.jobs)
    logger.info('%d resonances for sigma = %r, denominators up to %d', len(found), args.sigma, args.max_den)
    emit(config, RESONANCE_COLUMNS, [item.row() for item in found])
    return EXIT_OK


def cmd_rosette(parser, args, config):
    if not 0.0 <= args.e < 1.0:
        parser.error('--e must be within [0, 1)')
    if args.samples <= 0 or (args.revs is not None and args.revs <= 0):
        parser.error('--revs and --samples must be positive')
    revs = args.revs if args.revs is not None else closure_cycles(args.ratio.fraction)
    rows = rosette(args.ratio.fraction, args.e, math.radians(args.theta0), revs, args.samples)
    emit(config, ('theta', 'r', 'x', 'y'), rows)
    return EXIT_OK


def cmd_diagram(parser, args, config):
    if args.kind == 'k-sigma':
        if not args.sigma_max > 0 or args.points < 2:
            parser.error('k-sigma needs --sigma-max > 0 and --points >= 2')
        emit(config, K_SIGMA_COLUMNS, k_sigma_diagram(args.inclinations, args.sigma_max, args.points))
        return EXIT_OK
    if not args.sigma > 0:
        parser.error('--sigma must be positive')
    if args.steps <= 0 or args.steps % 4:
        parser.error('--steps must be a positive multiple of 4')
    diagram = apsidal_diagram if args.kind == 'apsidal' else latitude_diagram
    emit(config, RATIO_COLUMNS, diagram(args.sigma, args.steps))
    return EXIT_OK


def initial_state(args, model):
    if args.polar is not None:
        r, theta, nu, R, Theta, N = args.polar
        return PolarNodalState(r=r, theta=math.radians(theta), nu=math.radians(nu), R=R, Theta=Theta, N=N)
    a, e, i, raan, argp, anomaly = args.elements
    elements = KeplerianElements(a=a, e=e, i=math.radians(i), raan=math.radians(raan),
                                 argp=math.radians(argp), anomaly=math.radians(anomaly),
                                 kind=AnomalyKind(args.anomaly_kind))
    return keplerian_to_polar_nodal(model, elements)


def sample_times(duration, step):
    count = int(math.ceil(duration / step - 1e-9))
    times = [min(j * step, duration) for j in range(count + 1)]
    if times[-1] != duration:
        times.append(duration)
    return np.array(times)


def cmd_propagate(parser, args, config):
    if not args.time > 0:
        parser.error('--time must be positive')
    step = args.step if args.step is not None else args.time / 100.0
    if not step > 0:
        parser.error('--step must be positive')
    if args.fixed_step is not None and not args.fixed_step > 0:
        parser.error('--fixed-step must be positive')

    model = config.model
    state0 = initial_state(args, model)
    times = sample_times(args.time, step)
    if args.method == 'numeric':
        result = propagate_numeric(model, state0, (0.0, args.time), tol=args.tol,
                                   t_eval=times, fixed_step=args.fixed_step)
        samples = result.samples
    else:
        if args.method == 'intermediary':
            states = [state_at_time(model, state0, t) for t in times]
            energy = intermediary_hamiltonian
        else:
            states = [propagate_semianalytic(model, state0, t) for t in times]
            energy = hamiltonian_polar
        samples = TrajectorySamples.from_states(times, states, [energy(model, state) for state in states])
    with open_output(config.output) as stream:
        if config.format == 'json':
            samples.tojson(stream)
        else:
            samples.tocsv(stream)
    return EXIT_OK


def cmd_validate(parser, args, config):
    unknown = [name for name in args.only or () if name not in CHECKS]
    if unknown:
        parser.error('unknown checks: {}'.format(', '.join(unknown)))
    results = run_checks(config.model, only=args.only, tol=args.tol, n_jobs=args.jobs)
    emit(config, RESULT_COLUMNS, [result.row() for result in results])
    failed = [result.name for result in results if not result.passed]
    if failed:
        logger.warning('%d of %d checks failed: %s', len(failed), len(results), ', '.join(failed))
        return EXIT_NUMERICAL
    logger.info('all %d checks passed', len(results))
    return EXIT_OK


def main(argv=None):
    parser, args = _parse_args(argv)
    _configure_logging(args)
    try:
        config = run_config(args)
    except IncresException as exc:
        parser.error(str(exc))
    try:
        return args.handler(parser, args, config)
    except IncresException as exc:
        logger.error('%s: %s', type(exc).__name__, exc)
        return EXIT_NUMERICAL


if __name__ == '__main__':
    sys.exit(main())
