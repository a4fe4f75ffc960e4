import math

import numpy as np
import pytest

import fputw
from fputw import diatomic, dispersion, lattice, monatomic


def small(opts_type, intervals=128):
    o = opts_type()
    o.intervals = intervals
    return o


def test_jost_frequency_near_unit_speed():
    assert abs(dispersion.jost_frequency(1.0 + 1e-10) - 1.478170266) < 1e-6


def test_sound_speed():
    m = 0.4
    assert dispersion.sound_speed(1.0 / m - 1.0) == pytest.approx(math.sqrt(2.0 / (1.0 + m)), rel=1e-14)


def test_monatomic_speed_law():
    kappa = 0.5
    w = monatomic.solve_profile(kappa, small(monatomic.SolverOptions, 256))
    assert (w.sigma - 1.0) * 24.0 / kappa**2 == pytest.approx(1.0, rel=0.05)
    t = np.linspace(0.0, 32.0, 65)
    phi = w.phi.sample(0, t)
    assert phi[0] == pytest.approx(0.125, rel=1e-10)
    assert abs(phi[-1]) < 1e-10


def test_equal_mass_wave_has_no_ripple():
    opts = small(diatomic.Options)
    mono = monatomic.solve_profile(1.0, small(monatomic.SolverOptions))
    w = diatomic.solve_wave(1.0, diatomic.FixedParam.Mu, 0.0, diatomic.seed_from_monatomic(mono, opts), opts)
    assert w.system.sup_norm(2) < 1e-8
    assert w.scalars.m == pytest.approx(1.0)


def test_errors_are_python_exceptions():
    with pytest.raises(fputw.ContractViolation):
        dispersion.jost_frequency(1.0)
    with pytest.raises(fputw.Error):
        dispersion.critical_frequency(0.5, 0.0)


def test_lattice_energy_and_window():
    s = lattice.LatticeState(1, 1.0)
    s.r = [1.0]
    assert lattice.energy(s) == pytest.approx(5.0 / 6.0)
    assert lattice.window_factor(350) == pytest.approx(math.exp(-1.0 / 3.0))
    assert lattice.window_factor(400) == 0.0


def test_short_simulation():
    mono = monatomic.solve_profile(1.0, small(monatomic.SolverOptions))
    state = lattice.sample_monatomic(mono)
    cfg = lattice.SimConfig()
    cfg.horizon = 5.0
    series = lattice.run_simulation(state, cfg)
    assert series.alarms == 0
    assert len(series.rows) >= 5
    e0 = lattice.energy(state)
    assert abs(series.rows[-1].energy_full - e0) < 1e-8 * e0
