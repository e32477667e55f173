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
The J2-only geopotential ("main problem"): its Hamiltonian in Cartesian and
polar-nodal variables, Hamilton's equations, and the numeric propagator every
closed-form result is checked against.
'''

import math
from dataclasses import dataclass

import numpy as np

from . import (
    DEFAULT_TOL,
    R_MIN,
    TOL_MAX,
    TOL_MIN,
    InvariantViolation,
    PropagationException,
    SingularityException,
    logger,
)
from .core import TrajectorySamples
from .utils.integrator import DormandPrince54


class EnergyValue(float):
    '''Specific energy; a float that refuses to be anything but finite.'''
    def __new__(cls, h):
        h = float.__new__(cls, h)
        if not math.isfinite(h):
            raise InvariantViolation('energy is not finite: {}'.format(float(h)))
        return h

    @property
    def h(self):
        return float(self)


@dataclass(frozen=True)
class StateDerivative:
    dr: float
    dtheta: float
    dnu: float
    dR: float
    dTheta: float
    dN: float = 0.0

    @property
    def array(self):
        return np.array([self.dr, self.dtheta, self.dnu, self.dR, self.dTheta, self.dN])


def _check_radius(r, r_min):
    if not r >= r_min:
        raise SingularityException('radius {} is below the singularity floor {}'.format(r, r_min))


def legendre_p2(s):
    return 0.5 * (3.0 * s * s - 1.0)


def hamiltonian_cartesian(model, cart, r_min=R_MIN):
    r = cart.radius
    _check_radius(r, r_min)
    v2 = float(cart.velocity @ cart.velocity)
    sin_lat = cart.position[2] / r
    mu_r = model.mu / r
    return EnergyValue(
        0.5 * v2 - mu_r + model.j2 * mu_r * (model.alpha / r) ** 2 * legendre_p2(sin_lat)
    )


class MainProblemFlow:
    '''Hamilton's equations of the main problem over raw (r, theta, nu, R, Theta, N) arrays.'''

    # angles get an absolute error weight in the step control
    relative = (True, False, False, True, True, True)

    def __init__(self, model, r_min=R_MIN):
        self.model = model
        self.mu = model.mu
        self.r_min = r_min
        self.W = model.mu * model.j2 * model.alpha ** 2

    def energy(self, y):
        r, theta, nu, R, Theta, N = y
        _check_radius(r, self.r_min)
        s2 = max(0.0, 1.0 - (N / Theta) ** 2)
        bracket = 0.5 - 0.75 * s2 + 0.75 * s2 * math.cos(2.0 * theta)
        return (0.5 * (R * R + Theta * Theta / (r * r))
                - self.mu / r * (1.0 + self.model.j2 * self.model.alpha ** 2 / (r * r) * bracket))

    def partials(self, y):
        '''(dH/dr, dH/dtheta, dH/dnu, dH/dR, dH/dTheta, dH/dN)'''
        r, theta, nu, R, Theta, N = y
        _check_radius(r, self.r_min)
        W = self.W
        c2 = (N / Theta) ** 2
        s2 = max(0.0, 1.0 - c2)
        sin_theta = math.sin(theta)
        sin2 = sin_theta * sin_theta
        r2 = r * r
        r3 = r2 * r
        # the J2 term is -W B / r^3 with B = 1/2 - (3/2) s^2 sin^2(theta)
        B = 0.5 - 1.5 * s2 * sin2
        return (
            -Theta * Theta / r3 + self.mu / r2 + 3.0 * W * B / (r3 * r),
            1.5 * W * s2 * math.sin(2.0 * theta) / r3,
            0.0,
            R,
            Theta / r2 + 3.0 * W * sin2 * c2 / (Theta * r3),
            -3.0 * W * sin2 * N / (Theta * Theta * r3),
        )

    def rhs(self, t, y):
        Hr, Htheta, Hnu, HR, HTheta, HN = self.partials(y)
        return np.array([HR, HTheta, HN, -Hr, -Htheta, -Hnu])


def hamiltonian_polar(model, state, r_min=R_MIN):
    return EnergyValue(MainProblemFlow(model, r_min).energy(state.array))


def vector_field(model, state, r_min=R_MIN):
    return StateDerivative(*MainProblemFlow(model, r_min).rhs(0.0, state.array))


class PropagationResult:
    def __init__(self, samples, energy_drift, n_drift, steps_taken, steps_rejected):
        self.samples = samples
        self.energy_drift = energy_drift
        self.n_drift = n_drift
        self.steps_taken = steps_taken
        self.steps_rejected = steps_rejected

    @property
    def final(self):
        return self.samples.final


class _DriftMonitor:
    def __init__(self, flow, y0):
        self.flow = flow
        self.H0 = flow.energy(y0)
        self.N0 = y0[5]
        self.energy_drift = 0.0
        self.n_drift = 0.0

    def __call__(self, t, y):
        H = self.flow.energy(y)
        if self.H0 != 0.0:
            drift = abs(H - self.H0) / abs(self.H0)
        else:
            drift = abs(H - self.H0)
        self.energy_drift = max(self.energy_drift, drift)
        self.n_drift = max(self.n_drift, abs(y[5] - self.N0))


def _span(t_span):
    if np.ndim(t_span) == 0:
        return 0.0, float(t_span)
    t0, t1 = (float(value) for value in t_span)
    return t0, t1


def propagate_numeric(model, state0, t_span, tol=DEFAULT_TOL, t_eval=None, dense=False,
                      fixed_step=None, flow=None, max_step=math.inf):
    '''
    Integrates Hamilton's equations from state0 over t_span with the
    Dormand-Prince pair at relative and absolute tolerance tol.

    t_span is (t0, t1) or a duration from 0. `flow` defaults to the main
    problem; pass an intermediary flow to integrate the radial intermediary.
    '''
    t0, t1 = _span(t_span)
    if not (math.isfinite(t0) and math.isfinite(t1)):
        raise PropagationException('time span must be finite, got ({}, {})'.format(t0, t1))
    if t1 < t0:
        raise PropagationException('time span must not run backwards, got ({}, {})'.format(t0, t1))
    if fixed_step is None and not TOL_MIN <= tol <= TOL_MAX:
        raise PropagationException('tolerance {} outside [{}, {}]'.format(tol, TOL_MIN, TOL_MAX))
    if flow is None:
        flow = MainProblemFlow(model)

    y0 = state0.array
    monitor = _DriftMonitor(flow, y0)
    integrator = DormandPrince54(flow.rhs, rtol=tol, atol=tol, relative=flow.relative, max_step=max_step)
    solution = integrator.integrate(t0, y0, t1, t_eval=t_eval, dense=dense,
                                    fixed_step=fixed_step, observer=monitor)

    energies = [flow.energy(row) for row in solution.y]
    samples = TrajectorySamples(solution.t, solution.y, energies)
    logger.info('propagated %s over [%g, %g]: %d steps (%d rejected), energy drift %.3e, N drift %.3e',
                type(flow).__name__, t0, t1, solution.steps_taken, solution.steps_rejected,
                monitor.energy_drift, monitor.n_drift)
    return PropagationResult(samples, monitor.energy_drift, monitor.n_drift,
                             solution.steps_taken, solution.steps_rejected)
