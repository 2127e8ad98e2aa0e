import math
import pathlib

import pytest

import nearfield as nf

SCENARIOS = pathlib.Path(__file__).resolve().parents[2] / "scenarios"


def c70():
    return nf.library_species("C70")


def c70_tli(interaction=nf.WallInteraction.none, spread=0.2):
    g = nf.MaterialGrating(991e-9, 0.475, 500e-9, interaction)
    return nf.InterferometerConfig(g, g, g, c70(), nf.BeamState(100.0, spread), separation=0.22)


def test_units_and_scales():
    assert nf.parse_quantity("991 nm") == pytest.approx(991e-9)
    lam = nf.de_broglie_wavelength(840 * nf.AMU, 100.0)
    assert lam == pytest.approx(4.75e-12, rel=1e-2)
    assert nf.talbot_length(991e-9, lam) == pytest.approx(991e-9**2 / lam)
    with pytest.raises(nf.ConfigError):
        nf.parse_quantity("3 furlong")


def test_binary_grating_coefficients():
    b = nf.fourier_coefficients(nf.MaterialGrating(1e-6, 0.5), c70(), 100.0, j_max=4)
    assert len(b) == 9
    assert b[4].real == pytest.approx(0.5)
    assert b[5].real == pytest.approx(1 / math.pi, rel=1e-6)


def test_quantum_and_classical_visibility():
    cfg = c70_tli()
    q = nf.visibility(cfg, n_velocities=32)
    c = nf.classical_visibility(cfg, n_velocities=32)
    assert 0.0 < c < q < 1.0
    assert c == pytest.approx(0.0468, abs=2e-3)


def test_monte_carlo_is_reproducible():
    cfg = c70_tli()
    a = nf.classical_monte_carlo(cfg, 100.0, rays=20000, seed=7)
    b = nf.classical_monte_carlo(cfg, 100.0, rays=20000, seed=7)
    assert a == b
    assert len(a[2]) == 256


def test_time_domain_and_csl():
    mass = 1e6 * nf.AMU
    g = nf.IonizingGrating(78.5e-9, 8.0)
    cfg = nf.InterferometerConfig(g, g, g, nf.Species("Au", mass), nf.BeamState(100.0),
                                  pulse_delay=nf.talbot_time(mass, 78.5e-9),
                                  mode=nf.InterferometerMode.time_domain)
    assert nf.time_domain_visibility(cfg, cfg.pulse_delay) > 0.1
    m = nf.critical_mass(1e-10, 100e-9, cfg) / nf.AMU
    assert 1e5 < m < 1e9


def test_metrology():
    alpha = nf.total_polarizability_vol(61e-30, 2.5 * nf.DEBYE, 500.0)
    assert alpha - 61e-30 == pytest.approx(30.2e-30, rel=1e-2)
    assert nf.stark_fringe_shift(1.0, 1e15, 61e-30, 1600 * nf.AMU, 100.0) > 0


def test_invalid_input_raises():
    with pytest.raises(nf.DomainError):
        nf.Species("x", -1.0)


def test_scenario_file():
    table = nf.run_scenario(SCENARIOS / "azobenzene_deflection.scn")
    assert table["command"] == "deflect"
    assert len(table["rows"]) >= 1
    assert len(table["columns"]) == len(table["rows"][0])


def test_scenario_text_and_errors():
    text = """
name = t
species = C70
beam.velocity = 100 m/s
gratings.type = material
gratings.period = 991 nm
gratings.open_fraction = 0.475
gratings.thickness = 500 nm
separation = 0.22 m
"""
    table, csv = nf.run_scenario_text(text, "visibility")
    assert table["columns"][0] == "quantum_visibility"
    assert csv.splitlines()[-1].split(",")[0] == repr(table["rows"][0][0])
    with pytest.raises(nf.ConfigError, match="unknown key"):
        nf.run_scenario_text(text + "bogus = 1\n", "visibility")
