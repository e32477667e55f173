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
Closed-form resonance algebra of the main problem in terms of the oblateness
parameter sigma = J2 (alpha/p)^2: mean apsidal and latitude rates, the
radial to draconitic frequency ratio k, the critical inclination and the
search for rational (periodic) resonances.

Angles are radians except in ResonantInclination and the diagram rows,
which carry degrees.
'''

import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from pqdm.threads import pqdm

from . import (
    COS2I_CLAMP,
    DEFAULT_K_WINDOW,
    MAX_DENOMINATOR,
    SIGMA_SERIES,
    InvariantViolation,
    NoRealInclination,
)
from .utils.farey import farey_walk

logger = logging.getLogger(__name__)

RESONANCE_COLUMNS = ('num', 'den', 'k', 'i_deg', 'i_retro_deg')
RATIO_COLUMNS = ('ratio', 'i_deg')
K_SIGMA_COLUMNS = ('sigma', 'i_deg', 'k')

# coefficients of cos^2 i_c in powers of sigma
CRITICAL_SERIES = (Fraction(1, 5), Fraction(-1, 750), Fraction(1, 9375))


class RatioKind(enum.Enum):
    APSIDAL = 'apsidal'    # n_omega / n
    LATITUDE = 'latitude'  # n_theta / n_f
    RADIAL = 'radial'      # n_r / n_theta


@dataclass(frozen=True)
class FrequencyRatio:
    value: float
    kind: RatioKind

    def __post_init__(self):
        object.__setattr__(self, 'kind', RatioKind(self.kind))
        if not math.isfinite(self.value):
            raise InvariantViolation('frequency ratio must be finite, got {}'.format(self.value))
        if self.kind is RatioKind.RADIAL and self.value <= 0.0:
            raise InvariantViolation('radial frequency ratio must be positive, got {}'.format(self.value))

    def __float__(self):
        return float(self.value)


@dataclass(frozen=True)
class RationalRatio:
    num: int
    den: int

    def __post_init__(self):
        if self.num <= 0 or self.den <= 0:
            raise InvariantViolation('ratio {}/{} must have positive terms'.format(self.num, self.den))
        if math.gcd(self.num, self.den) != 1:
            raise InvariantViolation('ratio {}/{} is not in lowest terms'.format(self.num, self.den))

    @classmethod
    def from_fraction(cls, fraction):
        fraction = Fraction(fraction)
        return cls(fraction.numerator, fraction.denominator)

    @classmethod
    def parse(cls, text):
        '''Reads "N/D" or "N", reducing to lowest terms.'''
        try:
            fraction = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvariantViolation('cannot read a ratio from {!r}'.format(text)) from exc
        if fraction <= 0:
            raise InvariantViolation('ratio must be positive, got {}'.format(text))
        return cls.from_fraction(fraction)

    @property
    def fraction(self):
        return Fraction(self.num, self.den)

    @property
    def value(self):
        return self.num / self.den

    def __float__(self):
        return self.value

    def __str__(self):
        return '{}/{}'.format(self.num, self.den)


@dataclass(frozen=True)
class ResonantInclination:
    # a RationalRatio, or the plain float the inclination was asked for
    k: object
    cos2i: float
    i_deg: float
    i_retro_deg: float

    @classmethod
    def of(cls, k, cos2i):
        i_deg = math.degrees(math.acos(math.sqrt(cos2i)))
        return cls(k=k, cos2i=cos2i, i_deg=i_deg, i_retro_deg=180.0 - i_deg)

    @property
    def inclination(self):
        return math.radians(self.i_deg)

    def row(self):
        if isinstance(self.k, RationalRatio):
            num, den = self.k.num, self.k.den
        else:
            num, den = '', ''
        return (num, den, float(self.k), self.i_deg, self.i_retro_deg)

    def todict(self):
        return dict(zip(RESONANCE_COLUMNS, self.row()), cos2i=self.cos2i)


def _check_sigma(sigma, strict=False):
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma < 0.0 or (strict and sigma == 0.0):
        raise InvariantViolation('sigma must be {}, got {}'.format('positive' if strict else 'non-negative', sigma))
    return sigma


def _clamp_cos2i(cos2i):
    if 0.0 <= cos2i <= 1.0:
        return cos2i
    if -COS2I_CLAMP <= cos2i < 0.0:
        logger.debug('clamping cos^2 i = %r to 0', cos2i)
        return 0.0
    if 1.0 < cos2i <= 1.0 + COS2I_CLAMP:
        logger.debug('clamping cos^2 i = %r to 1', cos2i)
        return 1.0
    raise NoRealInclination('cos^2 i = {} has no real inclination'.format(cos2i))


def _arccos_root(cos2i):
    return math.acos(math.sqrt(_clamp_cos2i(cos2i)))


def apsidal_rate_ratio(sigma, i):
    '''Mean rotation rate of the line of apsides over the mean motion.'''
    sigma = _check_sigma(sigma)
    c2 = math.cos(i) ** 2
    return FrequencyRatio(0.75 * sigma * (5.0 * c2 - 1.0), RatioKind.APSIDAL)


def inclination_from_apsidal_ratio(sigma, ratio):
    sigma = _check_sigma(sigma, strict=True)
    return _arccos_root((1.0 + 4.0 / 3.0 * float(ratio) / sigma) / 5.0)


def inclination_from_latitude_ratio(sigma, ratio):
    '''Same curve as the apsidal map, shifted right by one.'''
    return inclination_from_apsidal_ratio(sigma, float(ratio) - 1.0)


def _ratio_of_cos2i(sigma, c2):
    return math.sqrt(1.0 + sigma * (0.5 - 1.5 * c2)) / (1.0 - sigma * (0.5 - 3.0 * c2))


def frequency_ratio_of_inclination(sigma, i):
    '''k = n_r/n_theta, decreasing in cos^2 i for sigma > 0.'''
    sigma = _check_sigma(sigma)
    return FrequencyRatio(_ratio_of_cos2i(sigma, math.cos(i) ** 2), RatioKind.RADIAL)


def cos2i_of_frequency_ratio(sigma, k):
    '''
    cos^2 i giving the radial to draconitic ratio k, unclamped.

    The textbook root [sqrt(1 + 4(6+sigma)k^2) - 1 - 2(2-sigma)k^2]/(12 sigma k^2)
    cancels catastrophically for small sigma, so the difference of the two
    terms is rationalised.
    '''
    sigma = _check_sigma(sigma)
    k = float(k)
    if k <= 0.0:
        raise InvariantViolation('frequency ratio must be positive, got {}'.format(k))
    if sigma == 0.0:
        if k == 1.0:
            return 0.2
        raise NoRealInclination('no inclination gives k = {} without oblateness'.format(k))
    k2 = k * k
    a = math.sqrt(1.0 + 4.0 * (6.0 + sigma) * k2)
    b = 1.0 + 2.0 * (2.0 - sigma) * k2
    numerator = 4.0 * (1.0 - k) * (1.0 + k) + sigma * (2.0 + 4.0 * k2) - sigma * sigma * k2
    return numerator / (3.0 * sigma * (a + b))


def inclination_from_frequency_ratio(sigma, k):
    cos2i = _clamp_cos2i(cos2i_of_frequency_ratio(sigma, k))
    return ResonantInclination.of(k, cos2i)


def series_coefficient_check(k):
    '''
    Coefficient g(k) of 1/sigma in the expansion of cos^2 i in sigma;
    k = 1 is its only positive root.
    '''
    k = float(k)
    if k <= 0.0:
        raise InvariantViolation('frequency ratio must be positive, got {}'.format(k))
    k2 = k * k
    return 4.0 * (1.0 - k) * (1.0 + k) / (3.0 * (math.sqrt(1.0 + 24.0 * k2) + 1.0 + 4.0 * k2))


def cos2i_series(sigma, k):
    '''Three-term expansion g/sigma + g0 + g1 sigma of cos^2 i(sigma, k).'''
    sigma = _check_sigma(sigma, strict=True)
    k = float(k)
    root = math.sqrt(1.0 + 24.0 * k * k)
    return (series_coefficient_check(k) / sigma
            + (1.0 + 1.0 / root) / 6.0
            - k * k * sigma / (6.0 * root ** 3))


def critical_inclination_series(sigma, order=2):
    if order not in (0, 1, 2):
        raise InvariantViolation('series order must be 0, 1 or 2, got {}'.format(order))
    sigma = float(sigma)
    return sum(float(coefficient) * sigma ** power
               for power, coefficient in enumerate(CRITICAL_SERIES[:order + 1]))


def critical_cos2i(sigma):
    '''
    cos^2 of the critical inclination. Accepts sigma > -25/4 so that the
    curve can be differentiated across sigma = 0.
    '''
    sigma = float(sigma)
    if not sigma > -6.25:
        raise InvariantViolation('critical inclination is undefined for sigma = {}'.format(sigma))
    if abs(sigma) < SIGMA_SERIES:
        return critical_inclination_series(sigma, 2)
    return 1.0 / 6.0 + (1.0 / 15.0) / (1.0 + math.sqrt(1.0 + 0.16 * sigma))


def critical_inclination(sigma):
    '''Inclination of the 1:1 radial-draconitic resonance (radians, prograde).'''
    return _arccos_root(critical_cos2i(_check_sigma(sigma)))


def feasible_ratio_interval(sigma):
    '''(k at i = 0, k at i = 90 deg): the range of k any inclination reaches.'''
    sigma = _check_sigma(sigma)
    return _ratio_of_cos2i(sigma, 1.0), _ratio_of_cos2i(sigma, 0.0)


def _resonance_or_none(sigma, fraction):
    try:
        return inclination_from_frequency_ratio(sigma, RationalRatio.from_fraction(fraction))
    except NoRealInclination:
        return None


def scan_resonances(sigma, max_denominator=25, k_window=DEFAULT_K_WINDOW, n_jobs=1):
    '''
    Every rational k = num/den with den <= max_denominator inside k_window
    that some inclination reaches, sorted by inclination.
    '''
    sigma = _check_sigma(sigma)
    if not 1 <= max_denominator <= MAX_DENOMINATOR:
        raise InvariantViolation('max_denominator must be within [1, {}], got {}'
                                 .format(MAX_DENOMINATOR, max_denominator))
    lo, hi = (float(bound) for bound in k_window)
    if not 0.0 < lo <= hi:
        raise InvariantViolation('k window ({}, {}) is not a positive interval'.format(lo, hi))

    if sigma == 0.0:
        # Kepler limit: only k = 1 is reachable, at any inclination
        if lo <= 1.0 <= hi:
            return [ResonantInclination.of(RationalRatio(1, 1), 0.2)]
        return []

    k_min, k_max = feasible_ratio_interval(sigma)
    candidates = list(farey_walk(max(lo, k_min), min(hi, k_max), max_denominator))
    logger.debug('sigma=%r: %d candidate ratios in [%r, %r]', sigma, len(candidates),
                 max(lo, k_min), min(hi, k_max))
    if n_jobs > 1:
        found = pqdm([(sigma, fraction) for fraction in candidates], _resonance_or_none,
                     argument_type='args', n_jobs=n_jobs, exception_behaviour='immediate', disable=True)
    else:
        found = [_resonance_or_none(sigma, fraction) for fraction in candidates]
    resonances = [item for item in found if item is not None]
    resonances.sort(key=lambda item: (item.i_deg, item.k.value))
    return resonances


def _diagram_ratios(sigma, steps_per_sigma):
    if steps_per_sigma <= 0 or steps_per_sigma % 4:
        raise InvariantViolation('steps_per_sigma must be a positive multiple of 4, got {}'
                                 .format(steps_per_sigma))
    # from -3/4 sigma (i = 90 deg) to 3 sigma (i = 0) with 0 on the grid
    steps = np.arange(-(3 * steps_per_sigma) // 4, 3 * steps_per_sigma + 1)
    return sigma * steps / steps_per_sigma


def apsidal_diagram(sigma, steps_per_sigma=20):
    '''Rows (n_omega/n, i_deg).'''
    sigma = _check_sigma(sigma, strict=True)
    return [(float(ratio), math.degrees(inclination_from_apsidal_ratio(sigma, ratio)))
            for ratio in _diagram_ratios(sigma, steps_per_sigma)]


def latitude_diagram(sigma, steps_per_sigma=20):
    '''Rows (n_theta/n_f, i_deg).'''
    sigma = _check_sigma(sigma, strict=True)
    return [(1.0 + float(ratio), math.degrees(inclination_from_apsidal_ratio(sigma, ratio)))
            for ratio in _diagram_ratios(sigma, steps_per_sigma)]


def k_sigma_diagram(inclinations, sigma_max=0.1, points=101):
    '''Rows (sigma, i_deg, k) tracing k(sigma) for each inclination in degrees.'''
    sigma_max = _check_sigma(sigma_max, strict=True)
    if points < 2:
        raise InvariantViolation('need at least two sigma points, got {}'.format(points))
    rows = []
    for i_deg in inclinations:
        c2 = math.cos(math.radians(i_deg)) ** 2
        for sigma in np.linspace(0.0, sigma_max, points):
            rows.append((float(sigma), float(i_deg), _ratio_of_cos2i(float(sigma), c2)))
    return rows
