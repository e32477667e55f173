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

import contextlib
import json
import sys

from .. import InvariantViolation


def read_json_file(path):
    '''Loads a json document, reporting a missing or broken file as a config error.'''
    try:
        with open(path, 'r') as json_file:
            return json.loads(json_file.read())
    except OSError as exc:
        raise InvariantViolation('cannot read config file {}: {}'.format(path, exc)) from exc
    except ValueError as exc:
        raise InvariantViolation('config file {} is not valid json: {}'.format(path, exc)) from exc


@contextlib.contextmanager
def open_output(path=None):
    '''Yields stdout when no path is given, otherwise a freshly written text file.'''
    if path is None or path == '-':
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, 'w', newline='') as out_file:
            yield out_file
