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

import csv
import io
import json
import math
import os

import pytest

import incres
from incres.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main, sample_times

MODEL_FILE = os.path.join(os.path.dirname(__file__), 'test_model.json')


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def table(text):
    return list(csv.DictReader(io.StringIO(text)))


def usage_error(capsys, *argv):
    with pytest.raises(SystemExit) as exc:
        main(list(argv))
    capsys.readouterr()
    return exc.value.code


def test_critical(capsys):
    code, out = run(capsys, 'critical', '--sigma', '0.1')
    assert code == EXIT_OK
    rows = table(out)
    assert [row['method'] for row in rows] == ['exact', 'series0', 'series1', 'series2']
    assert float(rows[0]['i_deg']) == pytest.approx(63.444, abs=1e-3)
    assert float(rows[0]['difference_deg']) == 0.0
    # each added order tightens the series
    gaps = [abs(float(row['difference_deg'])) for row in rows[1:]]
    assert gaps[0] > gaps[1] > gaps[2]


def test_critical_kepler_limit(capsys):
    code, out = run(capsys, 'critical', '--sigma', '0')
    assert code == EXIT_OK
    exact = table(out)[0]
    assert float(exact['cos2i']) == 0.2
    assert float(exact['i_deg']) == pytest.approx(63.434949, abs=1e-6)


def test_critical_from_semi_latus(capsys):
    # sigma = J2 (alpha/p)^2 = 0.1
    _, by_p = run(capsys, '--j2', '0.4', 'critical', '--p', '2')
    _, by_sigma = run(capsys, 'critical', '--sigma', '0.1')
    assert table(by_p)[0]['cos2i'] == table(by_sigma)[0]['cos2i']


def test_resonances(capsys):
    code, out = run(capsys, 'resonances', '--sigma', '0.1', '--max-den', '25', '--window', '0.7,1.1')
    assert code == EXIT_OK
    rows = table(out)
    assert list(rows[0]) == ['num', 'den', 'k', 'i_deg', 'i_retro_deg']
    found = {(row['num'], row['den']): float(row['i_deg']) for row in rows}
    assert found[('19', '25')] == pytest.approx(3.75, abs=0.01)
    assert found[('4', '5')] == pytest.approx(23.66, abs=0.01)
    assert found[('14', '13')] == pytest.approx(86.34, abs=0.01)
    inclinations = [float(row['i_deg']) for row in rows]
    assert inclinations == sorted(inclinations)


def test_resonances_json(capsys):
    code, out = run(capsys, 'resonances', '--sigma', '0.1', '--max-den', '5', '--format', 'json')
    assert code == EXIT_OK
    data = json.loads(out)
    assert set(data) == {'num', 'den', 'k', 'i_deg', 'i_retro_deg'}
    assert len(data['num']) == len(data['i_deg']) > 0


def test_rosette_closes(capsys):
    code, out = run(capsys, 'rosette', '--ratio', '4/5', '--samples', '90')
    assert code == EXIT_OK
    rows = table(out)
    # five latitude cycles by default
    assert len(rows) == 5 * 90 + 1
    first, last = rows[0], rows[-1]
    assert float(first['theta']) == pytest.approx(math.radians(135.0))
    assert math.hypot(float(last['x']) - float(first['x']), float(last['y']) - float(first['y'])) <= 1e-11


def test_rosette_output_file(capsys, tmp_path):
    target = tmp_path / 'rosette.csv'
    code, out = run(capsys, 'rosette', '--ratio', '1', '--revs', '2', '--output', str(target))
    assert code == EXIT_OK
    assert out == ''
    assert len(table(target.read_text())) == 2 * 360 + 1


def test_diagrams(capsys):
    _, out = run(capsys, 'diagram', '--kind', 'apsidal', '--sigma', '0.1', '--steps', '20')
    rows = table(out)
    assert list(rows[0]) == ['ratio', 'i_deg']
    assert float(rows[0]['i_deg']) == pytest.approx(90.0)

    _, out = run(capsys, 'diagram', '--kind', 'latitude', '--sigma', '0.1')
    assert table(out)

    _, out = run(capsys, 'diagram', '--kind', 'k-sigma', '--inclinations', '0,63.44', '--points', '11')
    rows = table(out)
    assert list(rows[0]) == ['sigma', 'i_deg', 'k']
    assert len(rows) == 22
    assert all(float(row['k']) == 1.0 for row in rows if float(row['sigma']) == 0.0)


def test_propagate_methods_agree(capsys):
    common = ('propagate', '--elements', '1.5,0.1,50,17,29,11', '--time', '2', '--step', '0.5')
    radii = {}
    for method in ('numeric', 'intermediary', 'semianalytic'):
        code, out = run(capsys, '--j2', '1e-4', *common, '--method', method)
        assert code == EXIT_OK
        rows = table(out)
        assert [float(row['t']) for row in rows] == [0.0, 0.5, 1.0, 1.5, 2.0]
        radii[method] = [float(row['r']) for row in rows]
    gap = {}
    for method in ('intermediary', 'semianalytic'):
        assert radii[method] == pytest.approx(radii['numeric'], rel=1e-3)
        gap[method] = max(abs(a - b) for a, b in zip(radii[method], radii['numeric']))
    # the parallax corrections remove the short-period error
    assert gap['semianalytic'] < gap['intermediary']


def test_propagate_kepler_methods_coincide(capsys):
    common = ('--j2', '0', 'propagate', '--elements', '1.5,0.1,50,17,29,11', '--time', '3', '--step', '1')
    outputs = {method: run(capsys, *common, '--method', method)[1]
               for method in ('numeric', 'intermediary', 'semianalytic')}
    numeric, closed = table(outputs['numeric']), table(outputs['intermediary'])
    # the parallax map is the identity without J2; energies come from different Hamiltonians
    for a, b in zip(table(outputs['semianalytic']), closed):
        assert {key: a[key] for key in a if key != 'H'} == {key: b[key] for key in b if key != 'H'}
    for a, b in zip(numeric, closed):
        assert float(a['r']) == pytest.approx(float(b['r']), abs=1e-10)


def test_propagate_polar_json(capsys):
    code, out = run(capsys, 'propagate', '--polar', '1.2,30,10,0.05,1.05,0.5', '--time', '1',
                    '--fixed-step', '0.01', '--format', 'json')
    assert code == EXIT_OK
    data = json.loads(out)
    assert len(data['t']) == 101
    assert data['N'][-1] == data['N'][0]


def test_config_file(capsys):
    code, out = run(capsys, '--config', MODEL_FILE, 'critical', '--p', '7000')
    assert code == EXIT_OK
    sigma = 0.00108263 * (6378.137 / 7000.0) ** 2
    _, expected = run(capsys, 'critical', '--sigma', repr(sigma))
    assert table(out)[0]['cos2i'] == table(expected)[0]['cos2i']


def test_validate_subset(capsys):
    code, out = run(capsys, 'validate', '--only', 'critical_limit,series_coefficients,consistency_identity')
    assert code == EXIT_OK
    rows = table(out)
    assert [row['check'] for row in rows] == ['critical_limit', 'series_coefficients', 'consistency_identity']
    assert all(row['status'] == 'pass' for row in rows)


def test_validate_kepler_subset(capsys):
    code, out = run(capsys, '--j2', '0', 'validate', '--only', 'critical_limit,resonance_table')
    assert code == EXIT_OK
    # resonance checks need an oblate model
    assert [row['check'] for row in table(out)] == ['critical_limit']


def test_validate_failure_exit_code(capsys):
    code, out = run(capsys, 'validate', '--only', 'critical_limit,oracle_quality', '--tol', '1')
    assert code == EXIT_NUMERICAL
    status = {row['check']: row['status'] for row in table(out)}
    assert status == {'critical_limit': 'pass', 'oracle_quality': 'FAIL'}


def test_numerical_failure_exit_code(capsys):
    # the integrator refuses the tolerance
    code, _ = run(capsys, 'propagate', '--polar', '1.2,30,10,0.05,1.05,0.5', '--time', '1', '--tol', '1')
    assert code == EXIT_NUMERICAL


def test_usage_errors(capsys):
    assert usage_error(capsys) == EXIT_USAGE
    assert usage_error(capsys, 'bogus') == EXIT_USAGE
    assert usage_error(capsys, 'critical') == EXIT_USAGE
    assert usage_error(capsys, 'critical', '--sigma', '0.1', '--p', '2') == EXIT_USAGE
    assert usage_error(capsys, 'critical', '--sigma', '-0.1') == EXIT_USAGE
    assert usage_error(capsys, 'resonances', '--sigma', '0.1', '--window', '1.1') == EXIT_USAGE
    assert usage_error(capsys, 'rosette', '--ratio', '0/1') == EXIT_USAGE
    assert usage_error(capsys, 'rosette', '--e', '1.0') == EXIT_USAGE
    assert usage_error(capsys, 'diagram', '--kind', 'apsidal', '--steps', '6') == EXIT_USAGE
    assert usage_error(capsys, 'propagate', '--elements', '1,2,3', '--time', '1') == EXIT_USAGE
    assert usage_error(capsys, 'propagate', '--elements', '1.5,0.1,50,0,0,0', '--time', '-1') == EXIT_USAGE
    assert usage_error(capsys, 'validate', '--only', 'nonsense') == EXIT_USAGE
    assert usage_error(capsys, '--config', 'missing.json', 'critical', '--sigma', '0') == EXIT_USAGE
    assert usage_error(capsys, '--j2', '-1', 'critical', '--sigma', '0') == EXIT_USAGE


def test_sample_times():
    assert list(sample_times(2.0, 0.5)) == [0.0, 0.5, 1.0, 1.5, 2.0]
    assert list(sample_times(1.0, 0.4)) == pytest.approx([0.0, 0.4, 0.8, 1.0])
    assert sample_times(1.0, 2.0).tolist() == [0.0, 1.0]


def test_model_environment(capsys, monkeypatch):
    monkeypatch.setenv(incres.CONFIG_ENV_VAR, MODEL_FILE)
    _, from_env = run(capsys, 'critical', '--p', '7000')
    monkeypatch.delenv(incres.CONFIG_ENV_VAR)
    _, from_flag = run(capsys, 'critical', '--p', '7000', '--config', MODEL_FILE)
    assert from_env == from_flag


if __name__ == '__main__':
    test_sample_times()
