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
First order elimination of the parallax: the canonical map from prime
(intermediary) polar-nodal variables to the original main-problem ones,
its fixed-point inverse, and the semi-analytic propagator built on both.
'''

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import (
    INVERSE_MAX_ITER,
    INVERSE_TOL,
    KAPPA_MAX,
    IncresException,
    InversionException,
)
from .core import PolarNodalState
from .intermediary import hamiltonian as intermediary_hamiltonian
from .intermediary import state_at_time

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ParallaxContext:
    kappa: float
    p_prime: float
    s: float
    c: float
    Theta: float

    @classmethod
    def from_momenta(cls, model, Theta, N):
        p_prime = Theta * Theta / model.mu
        c = max(-1.0, min(1.0, N / Theta))
        return cls(
            kappa=-0.5 * model.j2 * model.alpha ** 2 / p_prime ** 2,
            p_prime=p_prime,
            s=math.sqrt(max(0.0, 1.0 - c * c)),
            c=c,
            Theta=Theta,
        )

    @classmethod
    def from_state(cls, model, prime):
        return cls.from_momenta(model, prime.Theta, prime.N)


def _corrections(ctx, y):
    r, theta, _, R, Theta, _ = y
    kappa, p = ctx.kappa, ctx.p_prime
    c2 = ctx.c * ctx.c
    s2 = ctx.s * ctx.s
    sin2 = math.sin(2.0 * theta)
    cos2 = math.cos(2.0 * theta)
    pr = p / r
    pRT = p * R / Theta
    return np.array([
        p * kappa * (1.0 - 1.5 * s2 - 0.5 * s2 * cos2),
        kappa * ((0.75 - 1.25 * c2 - (1.0 - 3.0 * c2) * pr) * sin2
                 + pRT * (1.0 - 6.0 * c2 + (1.0 - 2.0 * c2) * cos2)),
        # the radial velocity term is scaled by the prime momentum like its neighbours
        kappa * ctx.c * ((0.5 - 2.0 * pr) * sin2 + pRT * (3.0 + cos2)),
        Theta / p * kappa * pr * pr * s2 * sin2,
        Theta * kappa * s2 * ((0.5 - 2.0 * pr) * cos2 - pRT * sin2),
        0.0,
    ])


def corrections(ctx, prime):
    '''(r - r', theta - theta', nu - nu', R - R', Theta - Theta', 0) at a prime state.'''
    return _corrections(ctx, prime.array)


def parallax_direct(model, prime):
    '''Original (main problem) state of a prime state.'''
    if model.j2 == 0.0:
        return prime
    y = prime.array + corrections(ParallaxContext.from_state(model, prime), prime)
    # N is not touched by the map, not even by a rounding
    y[5] = prime.N
    return PolarNodalState.from_array(y)


def _scale(y):
    r, Theta = abs(y[0]), abs(y[4])
    return np.array([r, 1.0, 1.0, Theta / r, Theta, Theta])


def parallax_inverse(model, original, return_iterations=False):
    '''
    Prime state mapped onto `original` by parallax_direct, found by the
    fixed-point iteration prime = original - corrections(prime).
    '''
    if model.j2 == 0.0:
        return (original, 0) if return_iterations else original

    target = original.array
    ctx = ParallaxContext.from_momenta(model, original.Theta, original.N)
    if abs(ctx.kappa) >= KAPPA_MAX:
        raise InversionException('|kappa| = {} is too large for the inverse to contract'.format(abs(ctx.kappa)))

    y = target.copy()
    last_change = math.inf
    for iteration in range(1, INVERSE_MAX_ITER + 1):
        if not (y[0] > 0.0 and y[4] > 0.0):
            raise InversionException('inverse left the physical domain at iteration {}: r = {}, Theta = {}'
                                     .format(iteration, y[0], y[4]))
        ctx = ParallaxContext.from_momenta(model, y[4], target[5])
        y_new = target - _corrections(ctx, y)
        y_new[5] = target[5]
        change = float(np.max(np.abs(y_new - y) / _scale(y_new)))
        y = y_new
        if not math.isfinite(change) or (change > last_change and iteration > 2):
            raise InversionException('inverse diverged at iteration {}: change {}'.format(iteration, change))
        if change < INVERSE_TOL:
            break
        last_change = change
    else:
        raise InversionException('inverse did not converge in {} iterations, last change {}'
                                 .format(INVERSE_MAX_ITER, change))

    logger.debug('parallax inverse converged in %d iterations', iteration)
    try:
        prime = PolarNodalState.from_array(y)
    except IncresException as exc:
        raise InversionException('inverse produced an invalid state: {}'.format(exc)) from exc
    return (prime, iteration) if return_iterations else prime


def propagate_semianalytic(model, state0, dt):
    '''Main-problem state after dt through the radial intermediary.'''
    prime0 = parallax_inverse(model, state0)
    return parallax_direct(model, state_at_time(model, prime0, dt))


def intermediary_energy_of(model, original):
    '''The intermediary Hamiltonian at the prime image of an original state.'''
    return intermediary_hamiltonian(model, parallax_inverse(model, original))
