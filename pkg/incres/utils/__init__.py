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

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def normalize_angle(angle):
    '''Reduces an angle to [0, 2pi).'''
    reduced = math.fmod(angle, TWO_PI)
    if reduced < 0.0:
        reduced += TWO_PI
    # fmod of a tiny negative angle lands on 2pi after the shift
    if reduced >= TWO_PI:
        reduced = 0.0
    return reduced


def normalize_angles(angles):
    reduced = np.mod(np.asarray(angles, dtype=float), TWO_PI)
    reduced[reduced >= TWO_PI] = 0.0
    return reduced


def angle_difference(a, b):
    '''Signed difference a - b wrapped to (-pi, pi].'''
    diff = math.remainder(a - b, TWO_PI)
    if diff == -math.pi:
        diff = math.pi
    return diff


def angle_differences(a, b):
    diff = np.remainder(np.asarray(a, dtype=float) - np.asarray(b, dtype=float) + math.pi, TWO_PI) - math.pi
    diff[diff == -math.pi] = math.pi
    return diff


def signum(value):
    return math.copysign(1.0, value) if value != 0.0 else 0.0


from .serialization import *
