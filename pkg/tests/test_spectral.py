import math

import numpy as np
import pytest

from gpwave.core import Constant, Modulated, PhysicsParams
from gpwave.fields import Grid, WaveField
from gpwave.madelung import decompose
from gpwave.spectral import (SpectralFailure, evolve, high_k_fraction, initial_field_from_state,
                             observables, split_step)
from gpwave.variational import VariationalState, propagate, states, synthesize

GRID = Grid(-16, 16, 512)
UNIT = PhysicsParams(g=0.0, trap=Constant(1.0))


def coherent(params=UNIT, x0=1.0, sigma0=1.0, grid=GRID):
    return initial_field_from_state(VariationalState.initial(params, x0=x0, sigma0=sigma0), params, grid)


def dominant_angular_frequency(t, y):
    y = y - y.mean()
    power = np.abs(np.fft.rfft(y)) ** 2
    freqs = 2 * np.pi * np.fft.rfftfreq(len(y), d=t[1] - t[0])
    i = int(np.argmax(power[1:])) + 1
    return freqs[i], freqs[1] - freqs[0]


class TestSplitStep:
    def test_single_step_norm(self):
        field = coherent(PhysicsParams(g=3.0, trap=Constant(1.0)))
        after = split_step(field, PhysicsParams(g=3.0, trap=Constant(1.0)), dt=1e-2)
        assert abs(after.norm() - field.norm()) < 1e-14
        assert after.t == pytest.approx(1e-2)

    def test_double_precision_option(self):
        after = split_step(coherent(), UNIT, dt=1e-2, precision="double")
        assert abs(after.norm() - 1.0) < 1e-14
        with pytest.raises(ValueError):
            split_step(coherent(), UNIT, dt=1e-2, precision="quad")

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            split_step(coherent(), UNIT, dt=0.0)

    def test_coherent_orbit(self):
        ev = evolve(coherent(), UNIT, t_final=2 * math.pi, dt=2 * math.pi / 6284, snapshot_every=100)
        assert abs(ev.series["mean_x"][-1] - 1.0) < 1e-6
        assert np.max(np.abs(ev.series["mean_x"] - np.cos(ev.series.t))) < 1e-6

    def test_second_order_in_time(self):
        # at g=0 the synthesized Gaussian is the exact solution
        params = PhysicsParams(g=0.0, trap=Modulated(1.0, 0.3, 1.5))
        init = VariationalState.initial(params, x0=1.0, v0=0.3, sigma0=1.6)
        T = 1.0
        exact = synthesize(states(propagate(init, params, t_final=T, dt=1e-4))[-1], params, GRID)
        field = initial_field_from_state(init, params, GRID)
        errs = []
        for dt in (0.02, 0.01, 0.005):
            final = evolve(field, params, t_final=T, dt=dt, snapshot_every=1000).final
            errs.append(math.sqrt(np.sum(np.abs(final.values - exact.values) ** 2) * GRID.dx))
        ratios = [a / b for a, b in zip(errs, errs[1:])]
        assert all(3.5 <= r <= 4.5 for r in ratios), ratios

    def test_non_finite_step_reported(self):
        # a user schedule that blows up after t = 5e-3
        params = PhysicsParams(trap=lambda t: math.inf if t > 5e-3 else 1.0)
        with pytest.raises(SpectralFailure) as info:
            evolve(coherent(), params, t_final=0.01, dt=1e-3)
        assert info.value.step_index == 6


class TestEvolve:
    def test_ground_state_variance_constant(self):
        # Strang splitting makes the variance of the exact ground state ripple by ~dt^2/8
        grid = Grid(-12, 12, 256)
        ev = evolve(coherent(x0=0.0, grid=grid), UNIT, t_final=10.0, dt=2.5e-4,
                    snapshot_every=400, precision="double")
        var = ev.series["var_x"]
        assert np.max(np.abs(var - var[0])) < 1e-8

    def test_ground_state_variance_ripple_scales_with_dt_squared(self):
        grid = Grid(-12, 12, 256)
        ripple = []
        for dt in (2e-3, 1e-3):
            var = evolve(coherent(x0=0.0, grid=grid), UNIT, t_final=4.0, dt=dt, snapshot_every=10).series["var_x"]
            ripple.append(np.max(np.abs(var - var[0])))
        assert 3.5 <= ripple[0] / ripple[1] <= 4.5

    def test_breathing_at_twice_trap_frequency(self):
        ev = evolve(coherent(x0=0.0, sigma0=2.0), UNIT, t_final=8 * math.pi, dt=8 * math.pi / 2500,
                    snapshot_every=5)
        w, bin_width = dominant_angular_frequency(ev.series.t, ev.series["var_x"])
        assert abs(w - 2.0) <= bin_width

    def test_interaction_does_not_move_centre(self):
        T, dt = 2 * math.pi, 2 * math.pi / 6284
        free = evolve(coherent(), UNIT, t_final=T, dt=dt, snapshot_every=50).series
        params = PhysicsParams(g=1.0, trap=Constant(1.0))
        inter = evolve(coherent(params), params, t_final=T, dt=dt, snapshot_every=50).series
        assert np.max(np.abs(free["mean_x"] - inter["mean_x"])) < 1e-5

    def test_recording_and_observer(self):
        seen = []
        ev = evolve(coherent(), UNIT, t_final=0.1, dt=0.01, snapshot_every=4,
                    observer=lambda i, f: seen.append(i), keep_snapshots=True)
        assert seen == [0, 4, 8, 10]
        assert len(ev.snapshots) == 4
        assert np.allclose(ev.series.t, [0.0, 0.04, 0.08, 0.1])

    def test_deterministic(self):
        params = PhysicsParams(g=2.0, trap=Constant(1.0))
        a = evolve(coherent(params), params, t_final=0.5, dt=1e-2).final.values
        b = evolve(coherent(params), params, t_final=0.5, dt=1e-2).final.values
        assert np.array_equal(a, b)

    def test_window_must_be_multiple_of_dt(self):
        with pytest.raises(ValueError):
            evolve(coherent(), UNIT, t_final=0.105, dt=0.01)

    def test_energy_conserved(self):
        params = PhysicsParams(g=1.0, trap=Constant(1.0))
        ev = evolve(coherent(params, x0=0.5), params, t_final=10.0, dt=1e-3, snapshot_every=100)
        e = ev.series["energy"]
        assert np.max(np.abs(e - e[0])) / abs(e[0]) < 1e-6


class TestObservables:
    def test_symmetric_mean(self):
        field = synthesize(VariationalState(0, 0.0, 0, 1.3, 0, 0), UNIT, GRID)
        assert abs(observables(field, UNIT).mean_x) < 1e-10

    def test_variance_is_half_sigma(self):
        field = synthesize(VariationalState(0, 0.0, 0, 1.0, 0, 0), UNIT, GRID)
        assert observables(field, UNIT).var_x == pytest.approx(0.5, abs=1e-10)

    def test_ground_state_energy(self):
        assert observables(coherent(x0=0.0), UNIT).energy == pytest.approx(0.5, abs=1e-8)

    def test_mean_field_energy(self):
        # (g/2) int rho^2 = g / (2 sqrt(2 pi sigma)) for the Gaussian density
        params = PhysicsParams(g=2.0, trap=Constant(0.0))
        field = coherent(params, x0=0.0, sigma0=1.0)
        kinetic = 0.25  # hbar^2 / (4 m sigma)
        assert observables(field, params).energy == pytest.approx(kinetic + 1 / math.sqrt(2 * math.pi), abs=1e-10)


class TestInitialField:
    state = VariationalState(0.0, 0.7, 0.4, 1.4, 0.3, 0.2)

    def test_norm(self):
        assert abs(initial_field_from_state(self.state, UNIT, GRID).norm() - 1) < 1e-12

    def test_density_peak(self):
        f = decompose(initial_field_from_state(self.state, UNIT, GRID), UNIT)
        assert abs(GRID.x[np.argmax(f.rho)] - self.state.q) <= GRID.dx

    def test_variance(self):
        o = observables(initial_field_from_state(self.state, UNIT, GRID), UNIT)
        assert o.var_x == pytest.approx(self.state.sigma / 2, abs=1e-8)

    def test_same_as_synthesized(self):
        a = initial_field_from_state(self.state, UNIT, GRID).values
        b = synthesize(self.state, UNIT, GRID).values
        assert np.max(np.abs(a - b)) < 1e-13


def test_high_k_fraction_detects_aliasing():
    assert high_k_fraction(coherent()) < 1e-10
    noisy = WaveField(GRID, coherent().values + 1e-3 * (-1.0) ** np.arange(GRID.n))
    assert high_k_fraction(noisy) > 1e-7
