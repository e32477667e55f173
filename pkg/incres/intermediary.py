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
Deprit's radial intermediary

    H = (R^2 + Q^2/r^2)/2 - mu/r,   Q = Q(Theta, N),

a quasi-Keplerian problem in the radius whose latitude advances with the
constant P/Q times the true anomaly. All states handled here are prime
(intermediary) states.
'''

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import (
    CIRCULAR_E,
    KEPLER_BISECTION_ITER,
    KEPLER_ITER_TOL,
    KEPLER_MAX_ITER,
    InvariantViolation,
    KeplerSolverException,
    UnboundOrbitException,
)
from .core import (
    PolarNodalState,
    _unwrap_like,
    eccentric_from_true,
    inclination_cos,
    sigma_of,
    true_from_eccentric,
)
from .mainproblem import EnergyValue, _check_radius
from .resonance import FrequencyRatio, RatioKind
from .utils import TWO_PI, normalize_angle, signum

logger = logging.getLogger(__name__)

# Newton seed offset for the Kepler equation
KEPLER_SEED = 0.85


@dataclass(frozen=True)
class IntermediaryConstants:
    Q: float
    P: float
    dQdN: float

    @property
    def ratio(self):
        '''Q/P: the radial (anomalistic) to draconitic frequency ratio.'''
        return self.Q / self.P


def constants(model, Theta, N):
    sigma = sigma_of(model, Theta).value
    c = N / Theta
    if abs(c) > 1.0:
        c = math.copysign(1.0, c)
    q2 = 1.0 + sigma * (0.5 - 1.5 * c * c)
    P = Theta * (1.0 - sigma * (0.5 - 3.0 * c * c))
    if q2 <= 0.0 or P <= 0.0:
        raise InvariantViolation('sigma = {} is too large for the intermediary (Q^2/Theta^2 = {}, P = {})'
                                 .format(sigma, q2, P))
    root = math.sqrt(q2)
    return IntermediaryConstants(Q=Theta * root, P=P, dQdN=-1.5 * sigma * c / root)


def frequency_ratio(consts):
    return FrequencyRatio(consts.Q / consts.P, RatioKind.RADIAL)


def node_rate_per_radial_period(consts):
    '''Node change over one anomalistic period; tends to -3 pi sigma cos i.'''
    return TWO_PI * consts.dQdN


@dataclass(frozen=True)
class QuasiKeplerElements:
    h: float
    e: float
    a_eff: float
    r_min: float
    theta0: float
    constants: IntermediaryConstants
    Theta: float
    N: float
    mu: float = 1.0
    # true anomaly (in (-pi, pi]) and node at the epoch the elements were taken
    f0: float = 0.0
    nu0: float = 0.0

    @property
    def semi_latus(self):
        '''Q^2/mu, the parameter of the quasi-Keplerian conic.'''
        return self.constants.Q ** 2 / self.mu

    @property
    def mean_motion(self):
        return math.sqrt(self.mu / self.a_eff ** 3)

    @property
    def radial_period(self):
        return TWO_PI / self.mean_motion

    @property
    def perigee(self):
        '''Argument of latitude of the perigee at the epoch.'''
        return self.theta0

    @classmethod
    def for_rosette(cls, ratio, e, theta0, mu=1.0):
        '''Elements of the planar curve with Q^2 = mu and the given Q/P.'''
        if not 0.0 <= e < 1.0:
            raise UnboundOrbitException('rosette eccentricity must be in [0, 1), got {}'.format(e))
        ratio = float(ratio)
        if ratio <= 0.0:
            raise InvariantViolation('Q/P must be positive, got {}'.format(ratio))
        Q = math.sqrt(mu)
        h = (e * e - 1.0) * mu * mu / (2.0 * Q * Q)
        consts = IntermediaryConstants(Q=Q, P=Q / ratio, dQdN=0.0)
        return cls(h=h, e=e, a_eff=-mu / (2.0 * h), r_min=(Q * Q / mu) / (1.0 + e),
                   theta0=normalize_angle(theta0), constants=consts, Theta=Q, N=0.0, mu=mu)


def hamiltonian(model, state):
    _check_radius(state.r, 0.0)
    Q = constants(model, state.Theta, state.N).Q
    return EnergyValue(0.5 * (state.R ** 2 + Q * Q / state.r ** 2) - model.mu / state.r)


def elements_from_state(model, state):
    consts = constants(model, state.Theta, state.N)
    Q, P = consts.Q, consts.P
    mu = model.mu
    h = 0.5 * (state.R ** 2 + Q * Q / state.r ** 2) - mu / state.r
    if h >= 0.0:
        raise UnboundOrbitException('intermediary energy {} is not negative'.format(h))
    # e cos f and e sin f straight from the conic keep small eccentricities accurate
    e_cos_f = Q * Q / (mu * state.r) - 1.0
    e_sin_f = state.R * Q / mu
    e = math.hypot(e_cos_f, e_sin_f)
    if e >= 1.0:
        raise UnboundOrbitException('intermediary eccentricity {} is not elliptic'.format(e))
    if e < CIRCULAR_E:
        f = 0.0
        theta0 = state.theta
    else:
        f = math.atan2(e_sin_f, e_cos_f)
        theta0 = normalize_angle(state.theta - (P / Q) * f)
    return QuasiKeplerElements(
        h=h, e=e, a_eff=-mu / (2.0 * h), r_min=(Q * Q / mu) / (1.0 + e), theta0=theta0,
        constants=consts, Theta=state.Theta, N=state.N, mu=mu, f0=f, nu0=state.nu,
    )


def radius_at_theta(elems, theta):
    consts = elems.constants
    return elems.semi_latus / (1.0 + elems.e * math.cos(consts.Q / consts.P * (theta - elems.theta0)))


def theta_of_radius(elems, r):
    '''Latitude reached on the way out from perigee (0 <= f <= pi) at radius r.'''
    if elems.e < CIRCULAR_E:
        return elems.theta0
    cos_f = (elems.semi_latus / r - 1.0) / elems.e
    f = math.acos(max(-1.0, min(1.0, cos_f)))
    return elems.theta0 + elems.constants.P / elems.constants.Q * f


def _check_eccentricity(e):
    if not 0.0 <= e < 1.0:
        raise InvariantViolation('Kepler equation needs 0 <= e < 1, got {}'.format(e))


def solve_kepler(M, e):
    '''Solves E - e sin E = M; E lies in the same revolution as M.'''
    _check_eccentricity(e)
    M = float(M)
    if not math.isfinite(M):
        raise InvariantViolation('mean anomaly must be finite, got {}'.format(M))
    if e == 0.0:
        return M
    reduced = math.remainder(M, TWO_PI)
    base = M - reduced

    E = reduced + e * signum(math.sin(reduced)) * KEPLER_SEED
    for _ in range(KEPLER_MAX_ITER):
        residual = E - e * math.sin(E) - reduced
        if abs(residual) <= KEPLER_ITER_TOL:
            return base + E
        E -= residual / (1.0 - e * math.cos(E))

    logger.debug('Newton stalled for M=%r e=%r, falling back to bisection', M, e)
    # |E - M| = e |sin E| <= e brackets the root
    lo, hi = reduced - e, reduced + e
    for _ in range(KEPLER_BISECTION_ITER):
        E = 0.5 * (lo + hi)
        residual = E - e * math.sin(E) - reduced
        if abs(residual) <= KEPLER_ITER_TOL:
            return base + E
        if residual > 0:
            hi = E
        else:
            lo = E
    raise KeplerSolverException('Kepler equation did not converge for M={} e={}, residual {}'
                                .format(M, e, residual))


def solve_kepler_array(M, e):
    '''Vectorised solve_kepler over numpy arrays (e may be a scalar).'''
    M = np.asarray(M, dtype=float)
    e = np.broadcast_to(np.asarray(e, dtype=float), M.shape)
    if np.any((e < 0.0) | (e >= 1.0)):
        raise InvariantViolation('Kepler equation needs 0 <= e < 1')
    reduced = np.remainder(M + math.pi, TWO_PI) - math.pi
    base = M - reduced

    E = reduced + e * np.sign(np.sin(reduced)) * KEPLER_SEED
    for _ in range(KEPLER_MAX_ITER):
        residual = E - e * np.sin(E) - reduced
        active = np.abs(residual) > KEPLER_ITER_TOL
        if not np.any(active):
            break
        E = np.where(active, E - residual / (1.0 - e * np.cos(E)), E)
    else:
        residual = E - e * np.sin(E) - reduced
        active = np.abs(residual) > KEPLER_ITER_TOL
        if np.any(active):
            logger.debug('Newton stalled for %d of %d entries, bisecting', int(active.sum()), M.size)
            red, ecc = reduced[active], e[active]
            lo, hi = red - ecc, red + ecc
            for _ in range(KEPLER_BISECTION_ITER):
                mid = 0.5 * (lo + hi)
                res = mid - ecc * np.sin(mid) - red
                lo = np.where(res > 0, lo, mid)
                hi = np.where(res > 0, mid, hi)
            mid = 0.5 * (lo + hi)
            if np.any(np.abs(mid - ecc * np.sin(mid) - red) > KEPLER_ITER_TOL):
                raise KeplerSolverException('Kepler equation did not converge')
            E = E.copy()
            E[active] = mid
    return base + E


def state_at_time(model, state0, dt):
    '''Closed-form intermediary flow from prime state state0 over dt.'''
    return propagate_elements(elements_from_state(model, state0), dt)


def propagate_elements(elems, dt):
    e = elems.e
    consts = elems.constants
    n = elems.mean_motion
    E0 = eccentric_from_true(elems.f0, e)
    M = E0 - e * math.sin(E0) + n * dt
    E = solve_kepler(M, e)
    f = _unwrap_like(true_from_eccentric(E, e), E)
    a = elems.a_eff
    r = a * (1.0 - e * math.cos(E))
    R = math.sqrt(elems.mu * a) * e * math.sin(E) / r
    return PolarNodalState(
        r=r,
        theta=elems.theta0 + consts.P / consts.Q * f,
        # d(nu)/dt = (Q/r^2) dQ/dN and df/dt = Q/r^2
        nu=elems.nu0 + consts.dQdN * (f - elems.f0),
        R=R,
        Theta=elems.Theta,
        N=elems.N,
    )


def periods(model, state):
    '''(anomalistic, draconitic) periods of the intermediary through state.'''
    elems = elements_from_state(model, state)
    T_r = elems.radial_period
    return T_r, T_r * elems.constants.ratio


class IntermediaryFlow:
    '''Hamilton's equations of the radial intermediary over raw arrays.'''

    relative = (True, False, False, True, True, True)

    def __init__(self, model, Theta, N):
        self.model = model
        self.mu = model.mu
        self.consts = constants(model, Theta, N)
        self.Q2 = self.consts.Q ** 2
        # Q dQ/dN = -(3/2) sigma N
        self.QdQdN = self.consts.Q * self.consts.dQdN

    @classmethod
    def through(cls, model, state):
        return cls(model, state.Theta, state.N)

    def energy(self, y):
        r, R = y[0], y[3]
        return 0.5 * (R * R + self.Q2 / (r * r)) - self.mu / r

    def rhs(self, t, y):
        r, R = y[0], y[3]
        _check_radius(r, 0.0)
        r2 = r * r
        return np.array([
            R,
            self.consts.P / r2,
            self.QdQdN / r2,
            self.Q2 / (r2 * r) - self.mu / r2,
            0.0,
            0.0,
        ])


def rosette(ratio, e, theta0, revs, samples_per_rev=360, mu=1.0):
    '''Rows (theta, r, x, y) of the orbital-plane curve over `revs` latitude cycles.'''
    if revs <= 0 or samples_per_rev <= 0:
        raise InvariantViolation('revs and samples_per_rev must be positive')
    elems = QuasiKeplerElements.for_rosette(ratio, e, theta0, mu)
    rows = []
    for j in range(int(round(revs * samples_per_rev)) + 1):
        theta = theta0 + TWO_PI * j / samples_per_rev
        r = radius_at_theta(elems, theta)
        rows.append((theta, r, r * math.cos(theta), r * math.sin(theta)))
    return rows


def closure_cycles(ratio):
    '''Latitude cycles after which a rational Q/P closes: the numerator of P/Q.'''
    ratio = Fraction(ratio).limit_denominator() if not isinstance(ratio, Fraction) else ratio
    return ratio.denominator
