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
The acceptance suite: closed-form resonance results, oracle quality of the
numeric propagator and the agreement of the intermediary, the parallax map
and the semi-analytic propagator with it.

Each check returns a short detail string on success and raises
CheckFailed otherwise.
'''

import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from pqdm.threads import pqdm

from . import DEFAULT_TOL, KEPLER_TOL, IncresException
from .core import (
    KeplerianElements,
    PhysicalModel,
    PolarNodalState,
    keplerian_to_polar_nodal,
    polar_nodal_to_cartesian,
)
from .intermediary import (
    IntermediaryFlow,
    QuasiKeplerElements,
    constants,
    elements_from_state,
    periods,
    radius_at_theta,
    rosette,
    solve_kepler_array,
    state_at_time,
)
from .mainproblem import hamiltonian_cartesian, hamiltonian_polar, propagate_numeric
from .parallax import parallax_direct, parallax_inverse, propagate_semianalytic
from .resonance import (
    critical_cos2i,
    critical_inclination,
    inclination_from_frequency_ratio,
    scan_resonances,
)
from .utils import angle_difference

logger = logging.getLogger(__name__)

SEED = 8675309

# sigma = 0.1 resonances and their inclinations in degrees
RESONANCE_TABLE = (
    (Fraction(19, 25), (3.75,)),
    (Fraction(4, 5), (23.66,)),
    (Fraction(1, 1), (63.43, 63.44)),
    (Fraction(14, 13), (86.34,)),
)


class CheckFailed(IncresException):
    pass


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def row(self):
        return (self.name, 'pass' if self.passed else 'FAIL', self.seconds, self.detail)


RESULT_COLUMNS = ('check', 'status', 'seconds', 'detail')


@dataclass(frozen=True)
class ValidationContext:
    model: PhysicalModel
    tol: float = DEFAULT_TOL


CHECKS = {}
KEPLER_CHECKS = []


def check(name, kepler=False):
    def register(function):
        CHECKS[name] = function
        if kepler:
            KEPLER_CHECKS.append(name)
        return function
    return register


def expect(condition, message, *args):
    if not condition:
        raise CheckFailed(message.format(*args))


def _reference_state(model, a=1.5, e=0.1, i_deg=50.0):
    elements = KeplerianElements(a=a, e=e, i=math.radians(i_deg), raan=0.3, argp=0.5, anomaly=0.2)
    return keplerian_to_polar_nodal(model, elements)


def _orbit_period(model, a):
    return 2.0 * math.pi * math.sqrt(a ** 3 / model.mu)


def _random_states(rng, count, model):
    states = []
    for _ in range(count):
        Theta = rng.uniform(0.8, 1.5) * math.sqrt(model.mu * model.alpha)
        states.append(PolarNodalState(
            r=rng.uniform(1.05, 3.0) * model.alpha,
            theta=rng.uniform(0.0, 2.0 * math.pi),
            nu=rng.uniform(0.0, 2.0 * math.pi),
            R=rng.uniform(-0.3, 0.3) * math.sqrt(model.mu / model.alpha),
            Theta=Theta,
            N=Theta * math.cos(rng.uniform(0.0, math.pi)),
        ))
    return states


def _state_gap(a, b):
    '''Componentwise gap, angles wrapped, momenta relative to Theta.'''
    return max(
        abs(a.r - b.r) / b.r,
        abs(angle_difference(a.theta, b.theta)),
        abs(angle_difference(a.nu, b.nu)),
        abs(a.R - b.R) * b.r / b.Theta,
        abs(a.Theta - b.Theta) / b.Theta,
        abs(a.N - b.N) / b.Theta,
    )


@check('resonance_table')
def check_resonance_table(ctx):
    start = time.perf_counter()
    found = {item.k.fraction: item for item in scan_resonances(0.1, 25, (0.7, 1.1))}
    elapsed = time.perf_counter() - start
    for k, accepted in RESONANCE_TABLE:
        expect(k in found, 'k = {} missing from the sigma = 0.1 scan', k)
        i_deg = found[k].i_deg
        expect(any(abs(i_deg - value) <= 0.01 for value in accepted),
               'k = {} gives {:.4f} deg, expected {}', k, i_deg, accepted)
    expect(elapsed < 1.0, 'scan took {:.3f} s', elapsed)
    return '{} resonances, scan {:.3f} s'.format(len(found), elapsed)


@check('critical_limit', kepler=True)
def check_critical_limit(ctx):
    i_deg = math.degrees(critical_inclination(0.0))
    expect(abs(i_deg - 63.434949) <= 1e-6, 'critical inclination at sigma = 0 is {!r} deg', i_deg)
    expect(critical_cos2i(0.0) == 0.2, 'cos^2 i_c(0) = {!r} is not 1/5', critical_cos2i(0.0))
    return 'i_c(0) = {:.7f} deg'.format(i_deg)


@check('series_coefficients')
def check_series_coefficients(ctx):
    h = 1e-4
    plus, zero, minus = critical_cos2i(h), critical_cos2i(0.0), critical_cos2i(-h)
    first = (plus - minus) / (2.0 * h)
    second = (plus - 2.0 * zero + minus) / (2.0 * h * h)
    expect(abs(first + 1.0 / 750.0) <= 1e-9, 'first coefficient {!r}', first)
    expect(abs(second - 1.0 / 9375.0) <= 1e-6, 'second coefficient {!r}', second)
    return 'c1 = {:.12g}, c2 = {:.9g}'.format(first, second)


@check('consistency_identity')
def check_consistency_identity(ctx):
    worst = 0.0
    for sigma in np.logspace(-6.0, math.log10(0.2), 100):
        gap = abs(inclination_from_frequency_ratio(sigma, 1.0).cos2i - critical_cos2i(sigma))
        worst = max(worst, gap)
    expect(worst <= 1e-12, 'cos^2 i gap {!r}', worst)
    return 'max gap {:.3e}'.format(worst)


@check('hamiltonian_equivalence', kepler=True)
def check_hamiltonian_equivalence(ctx):
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for state in _random_states(rng, 1000, ctx.model):
        polar = hamiltonian_polar(ctx.model, state)
        cartesian = hamiltonian_cartesian(ctx.model, polar_nodal_to_cartesian(state))
        worst = max(worst, abs(polar - cartesian) / max(abs(polar), 1e-300))
    expect(worst <= 1e-12, 'relative gap {!r}', worst)
    return 'max relative gap {:.3e}'.format(worst)


@check('oracle_quality')
def check_oracle_quality(ctx):
    model = ctx.model.replace(j2=1e-3)
    state0 = _reference_state(model)
    span = 100.0 * _orbit_period(model, 1.5)
    result = propagate_numeric(model, state0, span, tol=ctx.tol, t_eval=[0.0, span])
    expect(result.energy_drift <= 1e-10, 'energy drift {!r}', result.energy_drift)
    expect(result.n_drift <= 1e-13 * state0.Theta, 'N drift {!r}', result.n_drift)
    return 'energy drift {:.3e}, {} steps'.format(result.energy_drift, result.steps_taken)


@check('intermediary_closed_form', kepler=True)
def check_intermediary_closed_form(ctx):
    model = ctx.model
    state0 = _reference_state(model)
    T_r, _ = periods(model, state0)
    times = np.linspace(0.0, 10.0 * T_r, 41)
    flow = IntermediaryFlow.through(model, state0)
    numeric = propagate_numeric(model, state0, (0.0, times[-1]), tol=ctx.tol, t_eval=times, flow=flow)
    worst_r = worst_angle = 0.0
    for t, sample in zip(numeric.samples.t, numeric.samples):
        closed = state_at_time(model, state0, t)
        worst_r = max(worst_r, abs(closed.r - sample.r))
        worst_angle = max(worst_angle, abs(angle_difference(closed.theta, sample.theta)),
                          abs(angle_difference(closed.nu, sample.nu)))
    expect(worst_r <= 1e-9, 'radius gap {!r}', worst_r)
    expect(worst_angle <= 1e-9, 'angle gap {!r}', worst_angle)
    return 'max |dr| {:.3e}, max |dangle| {:.3e}'.format(worst_r, worst_angle)


@check('rosette_closure', kepler=True)
def check_rosette_closure(ctx):
    rows = rosette(Fraction(4, 5), 0.8, 0.75 * math.pi, revs=5)
    gap = math.hypot(rows[-1][2] - rows[0][2], rows[-1][3] - rows[0][3])
    expect(gap <= 1e-12, '4/5 rosette gap {!r}', gap)

    elems = QuasiKeplerElements.for_rosette(1, 0.8, 0.75 * math.pi)
    worst = 0.0
    for theta, r, _, _ in rosette(1, 0.8, 0.75 * math.pi, revs=3):
        ellipse = elems.semi_latus / (1.0 + elems.e * math.cos(theta - elems.theta0))
        worst = max(worst, abs(r - ellipse), abs(radius_at_theta(elems, theta) - r))
    expect(worst <= 1e-12, 'ratio 1 curve leaves the fixed ellipse by {!r}', worst)
    return 'closure gap {:.3e}'.format(gap)


@check('kepler_identity', kepler=True)
def check_kepler_identity(ctx):
    model = ctx.model.replace(j2=0.0)
    state0 = _reference_state(model)
    span = _orbit_period(model, 1.5)
    times = np.linspace(0.0, span, 21)
    numeric = propagate_numeric(model, state0, span, tol=ctx.tol, t_eval=times)
    worst_closed = worst_numeric = 0.0
    for t, sample in zip(numeric.samples.t, numeric.samples):
        closed = state_at_time(model, state0, t)
        worst_closed = max(worst_closed, _state_gap(propagate_semianalytic(model, state0, t), closed))
        worst_numeric = max(worst_numeric, _state_gap(sample, closed))
    expect(worst_closed <= 1e-12, 'semi-analytic and closed form differ by {!r}', worst_closed)
    expect(worst_numeric <= 1e-9, 'numeric and closed form differ by {!r}', worst_numeric)
    return 'closed form gap {:.3e}, numeric gap {:.3e}'.format(worst_closed, worst_numeric)


def _semianalytic_error(model, state0, span, tol):
    times = np.linspace(0.0, span, 21)
    numeric = propagate_numeric(model, state0, span, tol=tol, t_eval=times)
    worst = 0.0
    for t, sample in zip(numeric.samples.t, numeric.samples):
        approx = propagate_semianalytic(model, state0, t)
        gap = polar_nodal_to_cartesian(approx).position - polar_nodal_to_cartesian(sample).position
        worst = max(worst, float(np.linalg.norm(gap)))
    return worst


@check('parallax_order')
def check_parallax_order(ctx):
    model = ctx.model.replace(j2=1e-3)
    state0 = _reference_state(model)
    span = _orbit_period(model, 1.5)
    full = _semianalytic_error(model, state0, span, ctx.tol)
    half = _semianalytic_error(model.replace(j2=5e-4), state0, span, ctx.tol)
    ratio = full / half
    expect(3.4 <= ratio <= 4.6, 'error ratio {!r} under J2 halving ({!r} / {!r})', ratio, full, half)

    rng = np.random.default_rng(SEED)
    worst = 0.0
    for state in _random_states(rng, 50, model):
        worst = max(worst, _state_gap(parallax_direct(model, parallax_inverse(model, state)), state))
    expect(worst <= 1e-13, 'roundtrip gap {!r}', worst)
    return 'error ratio {:.3f}, roundtrip gap {:.3e}'.format(ratio, worst)


def _critical_prime_state(model, e=0.1, f0=0.3):
    '''A unit-Theta prime state at the critical inclination of its sigma.'''
    Theta = 1.0
    i_c = critical_inclination(model.j2 * model.alpha ** 2 * model.mu ** 2 / Theta ** 4)
    N = Theta * math.cos(i_c)
    consts = constants(model, Theta, N)
    Q = consts.Q
    return PolarNodalState(
        r=Q * Q / model.mu / (1.0 + e * math.cos(f0)),
        theta=0.4 + consts.P / Q * f0,
        nu=0.2,
        R=model.mu * e * math.sin(f0) / Q,
        Theta=Theta,
        N=N,
    )


def _mean_perigee_drift(model, tol):
    prime0 = _critical_prime_state(model)
    original0 = parallax_direct(model, prime0)
    theta0 = elements_from_state(model, prime0).theta0
    T_r, _ = periods(model, prime0)
    times = np.linspace(0.0, 10.0 * T_r, 11)
    numeric = propagate_numeric(model, original0, times[-1], tol=tol, t_eval=times)
    return max(abs(angle_difference(elements_from_state(model, parallax_inverse(model, sample)).theta0, theta0))
               for sample in numeric.samples)


@check('frozen_perigee')
def check_frozen_perigee(ctx):
    model = PhysicalModel(mu=1.0, alpha=1.0, j2=1e-2)
    prime0 = _critical_prime_state(model)
    elems0 = elements_from_state(model, prime0)
    T_r, _ = periods(model, prime0)
    frozen = 0.0
    for t in np.linspace(0.0, 10.0 * T_r, 41):
        elems = elements_from_state(model, state_at_time(model, prime0, t))
        frozen = max(frozen, abs(angle_difference(elems.theta0, elems0.theta0)))
    expect(frozen <= 1e-12, 'intermediary perigee moved by {!r}', frozen)

    full = _mean_perigee_drift(model, ctx.tol)
    half = _mean_perigee_drift(model.replace(j2=5e-3), ctx.tol)
    ratio = full / half
    expect(3.0 <= ratio <= 5.0, 'perigee drift ratio {!r} ({!r} / {!r})', ratio, full, half)
    return 'intermediary drift {:.3e}, main problem drift ratio {:.3f}'.format(frozen, ratio)


@check('kepler_performance', kepler=True)
def check_kepler_performance(ctx):
    rng = np.random.default_rng(SEED)
    M = rng.uniform(-50.0, 50.0, 1000000)
    e = rng.uniform(0.0, 0.9, M.size)
    start = time.perf_counter()
    E = solve_kepler_array(M, e)
    elapsed = time.perf_counter() - start
    residual = float(np.max(np.abs(E - e * np.sin(E) - M)))
    expect(residual <= KEPLER_TOL, 'residual {!r}', residual)
    expect(elapsed < 1.0, '10^6 solves took {:.3f} s', elapsed)
    return '10^6 solves in {:.3f} s'.format(elapsed)


def run_check(name, ctx):
    function = CHECKS[name]
    start = time.perf_counter()
    try:
        detail = function(ctx)
        passed = True
    except IncresException as exc:
        detail = '{}: {}'.format(type(exc).__name__, exc)
        passed = False
    result = CheckResult(name, passed, detail, time.perf_counter() - start)
    if passed:
        logger.info('%s passed (%.2f s): %s', name, result.seconds, detail)
    else:
        logger.warning('%s FAILED (%.2f s): %s', name, result.seconds, detail)
    return result


def select_checks(model, only=None):
    names = KEPLER_CHECKS if model.is_kepler else list(CHECKS)
    if only:
        unknown = [name for name in only if name not in CHECKS]
        if unknown:
            raise KeyError('unknown checks: {}'.format(', '.join(unknown)))
        names = [name for name in names if name in only]
    return names


def run_checks(model, only=None, tol=DEFAULT_TOL, n_jobs=1):
    '''Runs the selected checks, in registration order, and returns their results.'''
    ctx = ValidationContext(model, tol)
    names = select_checks(model, only)
    if n_jobs > 1:
        return pqdm([(name, ctx) for name in names], run_check, argument_type='args',
                    n_jobs=n_jobs, exception_behaviour='immediate', unit='check', desc='validating',
                    leave=False)
    return [run_check(name, ctx) for name in names]
