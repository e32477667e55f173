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
Shared value types and the exact two-body conversions between element sets.

Everything in here is immutable; angles are radians and are normalized to
[0, 2pi) when a state is built.
'''

import dataclasses
import enum
import math
import os
from dataclasses import dataclass

import numpy as np

from . import (
    CIRCULAR_E,
    CONFIG_ENV_VAR,
    DEFAULT_ALPHA,
    DEFAULT_J2,
    DEFAULT_MU,
    ECCENTRICITY_CLAMP,
    INVARIANT_TOL,
    InvariantViolation,
    UnboundOrbitException,
    logger,
)
from .utils import TWO_PI, normalize_angle, normalize_angles
from .utils.file_io import read_json_file
from .utils.serialization import write_table


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise InvariantViolation('{} must be finite, got {}'.format(name, value))
    return value


@dataclass(frozen=True)
class PhysicalModel:
    mu: float = DEFAULT_MU
    alpha: float = DEFAULT_ALPHA
    j2: float = DEFAULT_J2

    KEYS = ('mu', 'alpha', 'j2')

    def __post_init__(self):
        for key in self.KEYS:
            object.__setattr__(self, key, _finite(key, getattr(self, key)))
        if self.mu <= 0:
            raise InvariantViolation('mu must be positive, got {}'.format(self.mu))
        if self.alpha <= 0:
            raise InvariantViolation('alpha must be positive, got {}'.format(self.alpha))
        if self.j2 < 0:
            raise InvariantViolation('j2 must not be negative, got {}'.format(self.j2))

    @property
    def is_kepler(self):
        return self.j2 == 0.0

    @classmethod
    def from_data(cls, data):
        unknown = set(data) - set(cls.KEYS)
        if unknown:
            raise InvariantViolation('unknown model keys: {}'.format(', '.join(sorted(unknown))))
        return cls(**data)

    @classmethod
    def from_file(cls, path):
        return cls.from_data(read_json_file(path))

    def replace(self, **changes):
        changes = {key: value for key, value in changes.items() if value is not None}
        return dataclasses.replace(self, **changes)

    def tojson(self):
        return {key: getattr(self, key) for key in self.KEYS}


def load_model(path=None):
    '''The model from an explicit file, else $INCRES_CONFIG, else canonical units.'''
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    if path is None:
        return PhysicalModel()
    logger.debug('loading physical model from %s', path)
    return PhysicalModel.from_file(path)


@dataclass(frozen=True)
class SigmaParameter:
    value: float

    def __post_init__(self):
        object.__setattr__(self, 'value', _finite('sigma', self.value))
        if self.value < 0:
            raise InvariantViolation('sigma must not be negative, got {}'.format(self.value))

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class PolarNodalState:
    r: float
    theta: float
    nu: float
    R: float
    Theta: float
    N: float

    FIELDS = ('r', 'theta', 'nu', 'R', 'Theta', 'N')

    def __post_init__(self):
        for key in self.FIELDS:
            object.__setattr__(self, key, _finite(key, getattr(self, key)))
        if self.r <= 0:
            raise InvariantViolation('radius must be positive, got {}'.format(self.r))
        if self.Theta <= 0:
            raise InvariantViolation('angular momentum must be positive, got {}'.format(self.Theta))
        if abs(self.N) > self.Theta * (1.0 + INVARIANT_TOL):
            raise InvariantViolation('|N| = {} exceeds Theta = {}'.format(abs(self.N), self.Theta))
        object.__setattr__(self, 'theta', normalize_angle(self.theta))
        object.__setattr__(self, 'nu', normalize_angle(self.nu))

    @property
    def cos_i(self):
        return max(-1.0, min(1.0, self.N / self.Theta))

    @property
    def array(self):
        return np.array([self.r, self.theta, self.nu, self.R, self.Theta, self.N])

    @classmethod
    def from_array(cls, values):
        return cls(*(float(value) for value in values))

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def tojson(self):
        return {key: getattr(self, key) for key in self.FIELDS}

    @classmethod
    def fromjson(cls, data):
        return cls(**{key: data[key] for key in cls.FIELDS})


@dataclass(frozen=True, eq=False)
class CartesianState:
    position: np.ndarray
    velocity: np.ndarray

    def __post_init__(self):
        for key in ('position', 'velocity'):
            vector = np.array(getattr(self, key), dtype=float).reshape(3)
            if not np.all(np.isfinite(vector)):
                raise InvariantViolation('{} must be finite'.format(key))
            vector.flags.writeable = False
            object.__setattr__(self, key, vector)
        if not np.any(self.position):
            raise InvariantViolation('position must not be the origin')

    @property
    def radius(self):
        return float(np.linalg.norm(self.position))

    @property
    def angular_momentum(self):
        return np.cross(self.position, self.velocity)

    def tojson(self):
        return {'position': self.position.tolist(), 'velocity': self.velocity.tolist()}


class AnomalyKind(enum.Enum):
    TRUE = 'true'
    ECCENTRIC = 'eccentric'
    MEAN = 'mean'


def true_from_eccentric(E, e):
    return math.atan2(math.sqrt(1.0 - e * e) * math.sin(E), math.cos(E) - e)


def eccentric_from_true(f, e):
    return math.atan2(math.sqrt(1.0 - e * e) * math.sin(f), e + math.cos(f))


def _unwrap_like(angle, reference):
    '''Shifts an angle in (-pi, pi] by the whole revolutions contained in reference.'''
    turns = math.floor((reference + math.pi) / TWO_PI)
    return angle + turns * TWO_PI


@dataclass(frozen=True)
class KeplerianElements:
    a: float
    e: float
    i: float
    raan: float
    argp: float
    anomaly: float
    kind: AnomalyKind = AnomalyKind.TRUE

    def __post_init__(self):
        for key in ('a', 'e', 'i', 'raan', 'argp', 'anomaly'):
            object.__setattr__(self, key, _finite(key, getattr(self, key)))
        object.__setattr__(self, 'kind', AnomalyKind(self.kind))
        if -ECCENTRICITY_CLAMP <= self.e < 0.0:
            object.__setattr__(self, 'e', 0.0)
        if self.e < 0:
            raise InvariantViolation('eccentricity must not be negative, got {}'.format(self.e))
        if self.e >= 1:
            raise UnboundOrbitException('only elliptic states are supported, got e = {}'.format(self.e))
        if self.a <= 0:
            raise UnboundOrbitException('semi-major axis must be positive, got {}'.format(self.a))
        if not 0.0 <= self.i <= math.pi:
            raise InvariantViolation('inclination must be within [0, pi], got {}'.format(self.i))

    @property
    def p(self):
        return self.a * (1.0 - self.e * self.e)

    def true_anomaly(self):
        if self.kind is AnomalyKind.TRUE:
            return self.anomaly
        E = self.eccentric_anomaly()
        return _unwrap_like(true_from_eccentric(E, self.e), E)

    def eccentric_anomaly(self):
        if self.kind is AnomalyKind.ECCENTRIC:
            return self.anomaly
        if self.kind is AnomalyKind.TRUE:
            return _unwrap_like(eccentric_from_true(self.anomaly, self.e), self.anomaly)
        from .intermediary import solve_kepler
        return solve_kepler(self.anomaly, self.e)

    def mean_anomaly(self):
        if self.kind is AnomalyKind.MEAN:
            return self.anomaly
        E = self.eccentric_anomaly()
        return E - self.e * math.sin(E)

    def with_anomaly(self, kind):
        kind = AnomalyKind(kind)
        converters = {
            AnomalyKind.TRUE: self.true_anomaly,
            AnomalyKind.ECCENTRIC: self.eccentric_anomaly,
            AnomalyKind.MEAN: self.mean_anomaly,
        }
        return dataclasses.replace(self, anomaly=converters[kind](), kind=kind)


def keplerian_to_polar_nodal(model, el):
    f = el.true_anomaly()
    p = el.p
    Theta = math.sqrt(model.mu * p)
    return PolarNodalState(
        r=p / (1.0 + el.e * math.cos(f)),
        theta=el.argp + f,
        nu=el.raan,
        R=math.sqrt(model.mu / p) * el.e * math.sin(f),
        Theta=Theta,
        N=Theta * math.cos(el.i),
    )


def polar_nodal_to_keplerian(model, state):
    p = state.Theta * state.Theta / model.mu
    e_cos_f = p / state.r - 1.0
    e_sin_f = state.R * state.Theta / model.mu
    e = math.hypot(e_cos_f, e_sin_f)
    if e >= 1.0:
        raise UnboundOrbitException('state is not elliptic, e = {}'.format(e))
    if e < CIRCULAR_E:
        f = 0.0
    else:
        f = math.atan2(e_sin_f, e_cos_f)
    return KeplerianElements(
        a=p / (1.0 - e * e),
        e=e,
        i=inclination_of(state),
        raan=state.nu,
        argp=normalize_angle(state.theta - f),
        anomaly=normalize_angle(f),
        kind=AnomalyKind.TRUE,
    )


def _orbital_frame(theta, nu, cos_i):
    sin_i = math.sqrt(max(0.0, 1.0 - cos_i * cos_i))
    ct, st = math.cos(theta), math.sin(theta)
    cn, sn = math.cos(nu), math.sin(nu)
    radial = np.array([
        cn * ct - sn * st * cos_i,
        sn * ct + cn * st * cos_i,
        st * sin_i,
    ])
    transverse = np.array([
        -cn * st - sn * ct * cos_i,
        -sn * st + cn * ct * cos_i,
        ct * sin_i,
    ])
    return radial, transverse


def polar_nodal_to_cartesian(state):
    '''Rz(-nu) Rx(-i) Rz(-theta) applied to the radial/transverse frame.'''
    radial, transverse = _orbital_frame(state.theta, state.nu, inclination_cos(state))
    return CartesianState(
        position=state.r * radial,
        velocity=state.R * radial + (state.Theta / state.r) * transverse,
    )


def cartesian_to_polar_nodal(cart):
    position, velocity = cart.position, cart.velocity
    r = cart.radius
    h = np.cross(position, velocity)
    Theta = float(np.linalg.norm(h))
    if Theta == 0.0:
        raise InvariantViolation('rectilinear state has no orbital plane')
    if math.hypot(h[0], h[1]) <= INVARIANT_TOL * Theta:
        # equatorial: node fixed at nu = 0, theta is the longitude in the direction of motion
        nu = 0.0
        theta = math.atan2(math.copysign(1.0, h[2]) * position[1], position[0])
    else:
        normal = h / Theta
        nu = math.atan2(normal[0], -normal[1])
        node = np.array([math.cos(nu), math.sin(nu), 0.0])
        # normal x node points along the direction of motion at theta = pi/2
        ascending = np.cross(normal, node)
        theta = math.atan2(float(position @ ascending), float(position @ node))
    return PolarNodalState(
        r=r,
        theta=theta,
        nu=nu,
        R=float(position @ velocity) / r,
        Theta=Theta,
        N=float(h[2]),
    )


def inclination_cos(state):
    c = state.N / state.Theta
    if abs(c) > 1.0 + INVARIANT_TOL:
        raise InvariantViolation('|N|/Theta = {} is above one'.format(abs(c)))
    if abs(c) > 1.0:
        logger.debug('clamping N/Theta = %r to unit modulus', c)
        c = math.copysign(1.0, c)
    return c


def inclination_of(state):
    return math.acos(inclination_cos(state))


def sigma_of(model, Theta):
    if Theta <= 0:
        raise InvariantViolation('angular momentum must be positive, got {}'.format(Theta))
    return SigmaParameter(model.j2 * model.alpha ** 2 * model.mu ** 2 / Theta ** 4)


class TrajectorySamples:
    '''Time-indexed polar-nodal states with the energy at each sample.

    Rows are kept with their angles unwrapped; normalization only happens on
    the way out (indexing and serialization).
    '''
    COLUMNS = ('t', 'r', 'theta', 'nu', 'R', 'Theta', 'N', 'H')

    def __init__(self, t, y, energy):
        self.t = np.asarray(t, dtype=float).reshape(-1)
        self.y = np.asarray(y, dtype=float).reshape(len(self.t), 6)
        self.energy = np.asarray(energy, dtype=float).reshape(len(self.t))
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise InvariantViolation('sample times must be strictly increasing')

    @classmethod
    def from_states(cls, times, states, energies):
        return cls(times, [state.array for state in states], energies)

    def __len__(self):
        return len(self.t)

    def __getitem__(self, idx):
        return PolarNodalState.from_array(self.y[idx])

    def __iter__(self):
        for idx in range(len(self)):
            yield self[idx]

    @property
    def final(self):
        return self[-1]

    def positions(self):
        return np.array([polar_nodal_to_cartesian(state).position for state in self])

    def rows(self):
        angles = normalize_angles(self.y[:, 1:3]) if len(self) else self.y[:, 1:3]
        for idx in range(len(self)):
            row = self.y[idx]
            yield (self.t[idx], row[0], angles[idx, 0], angles[idx, 1],
                   row[3], row[4], row[5], self.energy[idx])

    def tocsv(self, stream):
        write_table(stream, self.COLUMNS, self.rows(), format='csv')

    def tojson(self, stream):
        write_table(stream, self.COLUMNS, self.rows(), format='json')
