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
import time
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

import incres
from incres import KeplerianElements, PhysicalModel, PolarNodalState, keplerian_to_polar_nodal
from incres.intermediary import (
    IntermediaryFlow,
    QuasiKeplerElements,
    closure_cycles,
    constants,
    elements_from_state,
    frequency_ratio,
    hamiltonian,
    node_rate_per_radial_period,
    periods,
    radius_at_theta,
    rosette,
    solve_kepler,
    solve_kepler_array,
    state_at_time,
    theta_of_radius,
)
from incres.mainproblem import propagate_numeric
from incres.resonance import RatioKind, critical_inclination, frequency_ratio_of_inclination
from incres.utils import angle_difference

model = PhysicalModel(j2=1e-3)
# sigma = 0.01 at Theta = 1
strong = PhysicalModel(j2=1e-2)


def reference_state(m=model, e=0.1, i_deg=50.0):
    elements = KeplerianElements(a=1.5, e=e, i=math.radians(i_deg), raan=0.3, argp=0.5, anomaly=0.2)
    return keplerian_to_polar_nodal(m, elements)


def test_constants():
    consts = constants(strong, 1.0, math.sqrt(0.2))
    assert consts.Q == pytest.approx(math.sqrt(1.002), rel=1e-15)
    assert consts.P == pytest.approx(1.001, rel=1e-15)
    # Q dQ/dN = -(3/2) sigma N
    assert consts.Q * consts.dQdN == pytest.approx(-1.5 * 0.01 * math.sqrt(0.2), rel=1e-14)

    kepler = constants(model.replace(j2=0.0), 1.3, 0.4)
    assert (kepler.Q, kepler.P, kepler.dQdN) == (1.3, 1.3, 0.0)


def test_constants_derivatives():
    Theta, N, h = 1.2, 0.5, 1e-6
    consts = constants(strong, Theta, N)
    dQ_dTheta = (constants(strong, Theta + h, N).Q - constants(strong, Theta - h, N).Q) / (2 * h)
    dQ_dN = (constants(strong, Theta, N + h).Q - constants(strong, Theta, N - h).Q) / (2 * h)
    assert consts.Q * dQ_dTheta == pytest.approx(consts.P, rel=1e-8)
    assert consts.dQdN == pytest.approx(dQ_dN, rel=1e-7)


def test_constants_reject_strong_oblateness():
    with pytest.raises(incres.InvariantViolation):
        constants(PhysicalModel(j2=5.0), 1.0, 0.0)


def test_elements():
    state = reference_state()
    elems = elements_from_state(model, state)
    consts = elems.constants
    assert elems.h == pytest.approx(hamiltonian(model, state))
    assert elems.a_eff == pytest.approx(-1.0 / (2 * elems.h))
    assert elems.r_min == pytest.approx(consts.Q ** 2 / (1 + elems.e))
    assert radius_at_theta(elems, elems.theta0) == pytest.approx(elems.r_min, rel=1e-14)
    # latitude runs continuously from the perigee at theta0
    theta = elems.theta0 + consts.P / consts.Q * elems.f0
    assert radius_at_theta(elems, theta) == pytest.approx(state.r, rel=1e-13)
    assert angle_difference(theta, state.theta) == pytest.approx(0.0, abs=1e-14)
    # the eccentricity is that of the conic with parameter Q^2/mu
    assert elems.e ** 2 == pytest.approx(1 + 2 * elems.h * consts.Q ** 2, rel=1e-12)


def test_circular_elements():
    Q = constants(model, 1.0, 0.5).Q
    state = PolarNodalState(r=Q * Q, theta=1.0, nu=0.0, R=0.0, Theta=1.0, N=0.5)
    elems = elements_from_state(model, state)
    assert elems.e < 1e-12
    assert elems.theta0 == 1.0
    assert elems.f0 == 0.0


def test_unbound_state():
    state = PolarNodalState(r=1.0, theta=0.0, nu=0.0, R=2.0, Theta=1.0, N=0.5)
    with pytest.raises(incres.UnboundOrbitException):
        elements_from_state(model, state)


def test_theta_of_radius_against_quadrature():
    elems = elements_from_state(model, reference_state(e=0.3))
    Q, P, mu = elems.constants.Q, elems.constants.P, 1.0

    def latitude_rate(r):
        return P / (r * r * math.sqrt(2 * elems.h + 2 * mu / r - Q * Q / (r * r)))

    r_max = elems.semi_latus / (1 - elems.e)
    for r in np.linspace(elems.r_min, r_max, 7)[1:-1]:
        integral, _ = quad(latitude_rate, elems.r_min, r, limit=200)
        assert theta_of_radius(elems, r) - elems.theta0 == pytest.approx(integral, rel=1e-7)
        assert radius_at_theta(elems, theta_of_radius(elems, r)) == pytest.approx(r, rel=1e-12)


def test_solve_kepler():
    assert solve_kepler(math.pi, 0.5) == pytest.approx(math.pi, abs=1e-13)
    assert solve_kepler(0.7, 0.0) == 0.7
    assert solve_kepler(0.0, 0.9) == 0.0
    for e in (0.0, 0.1, 0.5, 0.9, 0.99):
        for M in np.linspace(-math.pi, math.pi, 37):
            E = solve_kepler(M, e)
            assert abs(E - e * math.sin(E) - M) <= 1e-13
            expected = brentq(lambda x: x - e * math.sin(x) - M, M - 1.0, M + 1.0, xtol=1e-15)
            assert E == pytest.approx(expected, abs=1e-11)


def test_solve_kepler_keeps_the_revolution():
    E = solve_kepler(10.0, 0.3)
    assert E - 0.3 * math.sin(E) == pytest.approx(10.0, abs=1e-13)
    assert math.floor((E + math.pi) / (2 * math.pi)) == math.floor((10.0 + math.pi) / (2 * math.pi))


def test_solve_kepler_rejects_bad_eccentricity():
    with pytest.raises(incres.InvariantViolation):
        solve_kepler(1.0, 1.0)
    with pytest.raises(incres.InvariantViolation):
        solve_kepler_array([1.0], -0.1)


def test_solve_kepler_array_matches_scalar():
    rng = np.random.default_rng(3)
    M = rng.uniform(-20.0, 20.0, 500)
    e = rng.uniform(0.0, 0.95, 500)
    E = solve_kepler_array(M, e)
    assert E == pytest.approx([solve_kepler(m, ecc) for m, ecc in zip(M, e)], abs=1e-10)
    assert solve_kepler_array(M, 0.0) == pytest.approx(M, abs=1e-14)


def test_kepler_residual_across_revolutions():
    for M in np.linspace(-10.0, 10.0, 2001):
        E = solve_kepler(M, 0.99)
        assert abs(E - 0.99 * math.sin(E) - M) <= incres.KEPLER_TOL
    rng = np.random.default_rng(8)
    M = rng.uniform(-50.0, 50.0, 200000)
    e = rng.uniform(0.0, 0.9, M.size)
    E = solve_kepler_array(M, e)
    assert np.max(np.abs(E - e * np.sin(E) - M)) <= incres.KEPLER_TOL


@pytest.mark.slow
def test_solve_kepler_array_performance():
    rng = np.random.default_rng(5)
    M = rng.uniform(-50.0, 50.0, 1000000)
    e = rng.uniform(0.0, 0.9, M.size)
    start = time.perf_counter()
    E = solve_kepler_array(M, e)
    elapsed = time.perf_counter() - start
    assert np.max(np.abs(E - e * np.sin(E) - M)) <= 1e-13
    assert elapsed < 1.0


def test_state_at_time_epoch():
    state = reference_state()
    same = state_at_time(model, state, 0.0)
    assert same.r == pytest.approx(state.r, rel=1e-14)
    assert angle_difference(same.theta, state.theta) == pytest.approx(0.0, abs=1e-14)
    assert same.nu == pytest.approx(state.nu, abs=1e-15)
    assert same.R == pytest.approx(state.R, abs=1e-14)
    assert (same.Theta, same.N) == (state.Theta, state.N)


def test_state_at_time_matches_numeric_flow():
    state0 = reference_state()
    T_r, _ = periods(model, state0)
    times = np.linspace(0.0, 10 * T_r, 21)
    flow = IntermediaryFlow.through(model, state0)
    numeric = propagate_numeric(model, state0, (0.0, times[-1]), tol=1e-12, t_eval=times, flow=flow)
    assert numeric.energy_drift < 1e-10
    for t, sample in zip(numeric.samples.t, numeric.samples):
        closed = state_at_time(model, state0, t)
        assert closed.r == pytest.approx(sample.r, abs=1e-9)
        assert angle_difference(closed.theta, sample.theta) == pytest.approx(0.0, abs=1e-9)
        assert angle_difference(closed.nu, sample.nu) == pytest.approx(0.0, abs=1e-9)
        assert closed.R == pytest.approx(sample.R, abs=1e-9)


def test_kepler_limit():
    kepler = model.replace(j2=0.0)
    state0 = reference_state(kepler)
    T_r, T_theta = periods(kepler, state0)
    assert T_r == pytest.approx(2 * math.pi * 1.5 ** 1.5, rel=1e-13)
    assert T_theta == T_r
    back = state_at_time(kepler, state0, T_r)
    assert back.r == pytest.approx(state0.r, rel=1e-12)
    assert angle_difference(back.theta, state0.theta) == pytest.approx(0.0, abs=1e-12)
    assert back.nu == state0.nu


def test_periods_and_frequency_ratio():
    state = reference_state()
    consts = constants(model, state.Theta, state.N)
    T_r, T_theta = periods(model, state)
    assert T_theta / T_r == pytest.approx(consts.Q / consts.P)

    ratio = frequency_ratio(consts)
    assert ratio.kind is RatioKind.RADIAL
    sigma = model.j2 / state.Theta ** 4
    expected = frequency_ratio_of_inclination(sigma, math.acos(state.N / state.Theta))
    assert ratio.value == pytest.approx(expected.value, rel=1e-14)


def test_node_rate():
    sigma, cos_i = 1e-3, 0.6
    consts = constants(model, 1.0, cos_i)
    assert node_rate_per_radial_period(consts) == pytest.approx(-3 * math.pi * sigma * cos_i, rel=1e-3)


def test_frozen_perigee_at_critical_inclination():
    N = math.cos(critical_inclination(0.01))
    consts = constants(strong, 1.0, N)
    assert consts.P == pytest.approx(consts.Q, rel=1e-14)
    f0 = 0.3
    state0 = PolarNodalState(r=consts.Q ** 2 / (1 + 0.1 * math.cos(f0)), theta=0.4 + f0, nu=0.2,
                             R=0.1 * math.sin(f0) / consts.Q, Theta=1.0, N=N)
    theta0 = elements_from_state(strong, state0).theta0
    T_r, _ = periods(strong, state0)
    for t in np.linspace(0.0, 10 * T_r, 31):
        elems = elements_from_state(strong, state_at_time(strong, state0, t))
        assert angle_difference(elems.theta0, theta0) == pytest.approx(0.0, abs=1e-12)


def test_rosette_closure():
    assert closure_cycles(Fraction(4, 5)) == 5
    assert closure_cycles(Fraction(14, 13)) == 13
    assert closure_cycles(1) == 1

    rows = rosette(Fraction(4, 5), 0.8, 0.75 * math.pi, revs=5)
    assert len(rows) == 5 * 360 + 1
    assert rows[-1][0] - rows[0][0] == pytest.approx(10 * math.pi)
    assert math.hypot(rows[-1][2] - rows[0][2], rows[-1][3] - rows[0][3]) <= 1e-12
    # the first perigee sits at theta0
    assert rows[0][1] == pytest.approx(1 / 1.8)

    half = rosette(Fraction(4, 5), 0.8, 0.75 * math.pi, revs=2)
    assert math.hypot(half[-1][2] - half[0][2], half[-1][3] - half[0][3]) > 1e-3


def test_irrational_ratio_never_closes():
    elems = QuasiKeplerElements.for_rosette(math.sqrt(2.0) / 1.3, 0.8, 0.75 * math.pi)
    r0 = radius_at_theta(elems, elems.theta0)
    gaps = [abs(radius_at_theta(elems, elems.theta0 + 2 * math.pi * n) - r0) for n in range(1, 51)]
    assert min(gaps) > 1e-4

    rational = QuasiKeplerElements.for_rosette(Fraction(4, 5), 0.8, 0.75 * math.pi)
    assert radius_at_theta(rational, rational.theta0 + 10 * math.pi) == pytest.approx(
        radius_at_theta(rational, rational.theta0), abs=1e-12)


def test_rosette_ratio_one_is_an_ellipse():
    elems = QuasiKeplerElements.for_rosette(1, 0.8, 0.75 * math.pi)
    for theta, r, x, y in rosette(1, 0.8, 0.75 * math.pi, revs=2, samples_per_rev=90):
        assert r == pytest.approx(elems.semi_latus / (1 + 0.8 * math.cos(theta - 0.75 * math.pi)), abs=1e-12)
        assert math.hypot(x, y) == pytest.approx(r)
    with pytest.raises(incres.UnboundOrbitException):
        QuasiKeplerElements.for_rosette(1, 1.0, 0.0)


if __name__ == '__main__':
    test_constants()
    test_elements()
    test_solve_kepler()
    test_solve_kepler_array_matches_scalar()
    test_state_at_time_epoch()
    test_state_at_time_matches_numeric_flow()
    test_kepler_limit()
    test_rosette_closure()
