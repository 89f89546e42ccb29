import math

import numpy as np
import pytest

import slowshift as ss


def test_eq5_matches_closed_form():
    assert ss.eq5_loss(1.0, 5.0) == pytest.approx(1.0 - math.exp(-2 * math.pi * 0.005), rel=1e-12)
    assert ss.eq5_loss(3.0, 0.0) == 0.0


def test_shifter_profile_and_oracle():
    e = ss.frequency_shifter()
    assert e.optical_depth == pytest.approx(20.0)
    a, b = e.profiles()
    det = e.detuning_mhz
    assert len(a) == len(det) == len(b)
    # Only the positive group around the window; the window itself is empty.
    centre = np.argmin(np.abs(det))
    assert a[centre] < 1e-3 and b[centre] < 1e-3
    assert a[np.argmin(np.abs(det - 4.0))] > 0.99
    assert b[np.argmin(np.abs(det - 4.0))] < 1e-6
    loss = ss.intensity_loss_at(e, 0.0)
    assert 0.01 <= loss <= 0.04
    h, phase, delay = ss.linear_transfer(e, np.linspace(-2, 2, 81))
    assert np.all(np.abs(h) <= 1.0)
    assert delay[40] > 0.0


def test_spectrum_of_tone():
    dt = 0.002
    t = np.arange(4096) * dt
    f, p, peak = ss.spectrum(np.exp(2j * np.pi * 3.8 * t), dt)
    assert abs(peak - 3.8) < f[1] - f[0]
    assert p.max() == pytest.approx(1.0)


def test_instantaneous_frequency_of_tone():
    dt = 0.002
    t = np.arange(2000) * dt
    _, freq, valid = ss.instantaneous_frequency(np.exp(2j * np.pi * 2.0 * t), dt)
    assert valid.sum() > 1900
    assert np.max(np.abs(freq[valid] - 2.0)) < 1e-9


def test_scenarios_and_config_round_trip():
    names = [n for n, _ in ss.list_scenarios()]
    assert "fig3b" in names and "fig6-sweep" in names
    text = ss.builtin_config("fig5")
    assert ss.resolve_config(text) == text


def test_errors_carry_category():
    with pytest.raises(ss.SlowshiftError, match="parse"):
        ss.resolve_config("")
    with pytest.raises(ss.SlowshiftError, match="line|:2:"):
        ss.resolve_config("[drive]\nvoltage = 1\n")


def test_weak_probe_run_is_passive():
    med = ss.MediumParameters()
    med.alpha0_per_mm = 0.05
    e = ss.hole(half_span_mhz=6.0, spacing_mhz=0.05, medium=med)
    r = ss.propagate(e, dt_us=0.005, dz_mm=0.5)
    ein = np.sum(np.abs(r["input_mhz"]) ** 2)
    eout = np.sum(np.abs(r["transmitted_mhz"]) ** 2)
    assert 0.0 < eout <= ein


def test_readout_scenario_bundle(tmp_path):
    out = tmp_path / "fig3a"
    summary = ss.run_scenario("fig3a", str(out))
    assert float(summary["shift_r_squared"]) > 0.999
    for name in ("config.resolved.ini", "summary.txt", "profiles.csv", "transfer_p11V.csv"):
        assert (out / name).exists()
    header = (out / "transfer_p11V.csv").read_text().splitlines()[0]
    assert header == "frequency_mhz,power,phase_rad,group_delay_us"
