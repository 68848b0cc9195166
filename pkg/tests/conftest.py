import math

import numpy as np
import pytest

import fluxreadout as fr

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def params():
    return fr.FluxoniumParams()


@pytest.fixture(scope="session")
def fpa_table(params):
    """Dispersive table spanning the reference flux excursion."""
    return fr.DispersiveTable.build(params, 0.5, 0.6567)


def reference_trajectories(params, table, duration=500e-9, dt=0.5e-9,
                       n_bar=75.0, omega_ro=TWO_PI * 5.1747e9):
    """(FPA trajectory, sweet-spot trajectory) of the reference readout."""
    pulse_f = fr.make_flux_pulse(0.5, 0.1567, 50e-9, duration - 50e-9, dt)
    drive_f = fr.drive_for_pulse(params, pulse_f, n_bar, omega_ro, table)
    traj_f = fr.integrate_cavity(params, pulse_f, drive_f, duration, dt,
                                 table=table)
    pulse_s = fr.make_flux_pulse(0.5, 0.0, 0.0, duration, dt)
    drive_s = fr.drive_for_pulse(params, pulse_s, n_bar, omega_ro, table)
    traj_s = fr.integrate_cavity(params, pulse_s, drive_s, duration, dt,
                                 table=table)
    return traj_f, traj_s


@pytest.fixture(scope="session")
def reference_trajs(params, fpa_table):
    return reference_trajectories(params, fpa_table)
