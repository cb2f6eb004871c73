import json
import math

import numpy as np
import pytest
from scipy.linalg import expm

from nmrswitch.acquisition import (
    AcquisitionParams,
    FIDRecord,
    Spectrum,
    derive_timing,
    fid_csv,
    peak_pick,
    peaks_json,
    simulate_fid,
    spectrum,
    spectrum_csv,
)
from nmrswitch.qcore import DensityOperator, StateVector

SX = np.array([[0, 1], [1, 0]]) / 2
SY = np.array([[0, -1j], [1j, 0]]) / 2
SZ = np.diag([0.5, -0.5])
E2 = np.eye(2)


def brute_force_fid(rho, j_hz, times, ns):
    """Two spins, spin 0 observed: explicit (pi/2)_y pulse then expm evolution."""
    ry = expm(-1j * (np.pi / 2) * np.kron(SY, E2))
    rho = ry @ rho @ ry.conj().T
    h = 2 * np.pi * j_hz * np.kron(SZ, E2) @ np.kron(E2, SZ)
    obs = np.kron(SX + 1j * SY, E2)
    out = []
    for t in times:
        u = expm(-1j * h * t)
        out.append(ns * np.trace(u @ rho @ u.conj().T @ obs))
    return np.array(out)


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    m = a @ a.conj().T
    return DensityOperator(m / np.trace(m))


def test_derive_timing_paper_values():
    t = derive_timing(AcquisitionParams(td=32768, sw_hz=10000))
    assert abs(t.fidres_hz - 0.305176) < 1e-6
    assert abs(t.aq_s - 1.63845) / 1.63845 < 1e-3
    assert t.aq_s == 1.6384
    assert t.dwell_s == 5e-5


def test_derive_timing_unit_case():
    t = derive_timing(AcquisitionParams(td=2, sw_hz=1))
    assert t.aq_s == 1.0 and t.fidres_hz == 0.5


@pytest.mark.parametrize("td,sw", [(32768, 10000.0), (4096, 3125.0), (2, 1.0), (1024, 512.0)])
def test_derive_timing_exact(td, sw):
    t = derive_timing(AcquisitionParams(td=td, sw_hz=sw))
    assert t.fidres_hz * td == sw
    assert t.aq_s * 2 * sw == td


def test_params_validation():
    with pytest.raises(ValueError):
        AcquisitionParams(td=3)
    with pytest.raises(ValueError):
        AcquisitionParams(sw_hz=0)


def test_maximally_mixed_is_silent(chloroform):
    fid = simulate_fid(chloroform, DensityOperator.maximally_mixed(2), AcquisitionParams(td=512))
    assert np.abs(fid.samples).max() < 1e-12


@pytest.mark.parametrize("bits,freq", [((0, 0), 107.5), ((0, 1), -107.5)])
def test_single_line_fid(chloroform, bits, freq):
    p = AcquisitionParams(td=1024, sw_hz=10000, ns=8)
    rho = StateVector.basis(bits).density()
    fid = simulate_fid(chloroform, rho, p)
    k = np.arange(512)
    closed_form = 8 * 0.5 * np.exp(2j * np.pi * freq * k / 10000)
    assert np.abs(fid.samples - closed_form).max() < 1e-10
    pick = [0, 1, 37, 300, 511]
    brute = brute_force_fid(rho.matrix, 215.0, k[pick] / 10000, 8)
    assert np.abs(fid.samples[pick] - brute).max() < 1e-10
    assert fid.dwell_s == 1e-4


def test_fid_matches_brute_force_for_mixture(chloroform, rng):
    rho = random_density(rng, 4)
    p = AcquisitionParams(td=256, sw_hz=2000, ns=3)
    fid = simulate_fid(chloroform, rho, p)
    pick = np.array([0, 5, 77, 127])
    assert np.abs(fid.samples[pick] - brute_force_fid(rho.matrix, 215.0, pick / 2000, 3)).max() < 1e-10


def test_fid_linear_in_rho(chloroform, rng):
    p = AcquisitionParams(td=512)
    r1, r2 = random_density(rng, 4), random_density(rng, 4)
    for w in (0.0, 0.3, 0.71, 1.0):
        mix = DensityOperator(w * r1.matrix + (1 - w) * r2.matrix)
        lhs = simulate_fid(chloroform, mix, p).samples
        rhs = w * simulate_fid(chloroform, r1, p).samples + (1 - w) * simulate_fid(chloroform, r2, p).samples
        assert np.abs(lhs - rhs).max() < 1e-10


def test_ns_scales_exactly(chloroform, rng):
    rho = random_density(rng, 4)
    a = simulate_fid(chloroform, rho, AcquisitionParams(td=256, ns=4)).samples
    b = simulate_fid(chloroform, rho, AcquisitionParams(td=256, ns=8)).samples
    assert np.array_equal(2 * a, b)
    c = simulate_fid(chloroform, rho, AcquisitionParams(td=256, ns=4, ds=8)).samples
    assert np.array_equal(a, c)


def test_observed_spin_checked(chloroform):
    with pytest.raises(IndexError):
        simulate_fid(chloroform, StateVector.basis([0, 0]).density(), AcquisitionParams(observed_spin=2))


def test_zero_fid_zero_spectrum():
    s = spectrum(FIDRecord(np.zeros(64, complex), 1e-4))
    assert np.array_equal(s.amplitudes, np.zeros(128))
    assert peak_pick(s) == []


def test_spectrum_axis():
    fid = FIDRecord(np.ones(8, complex), 1 / 1000)
    s = spectrum(fid)
    assert s.freqs_hz.size == 16
    assert math.isclose(s.fidres_hz, 1000 / 16)
    assert s.freqs_hz[0] > -500 and s.freqs_hz[-1] == 500
    assert np.all(np.diff(s.freqs_hz) > 0)


def test_spectrum_matches_direct_dft(rng):
    x = rng.normal(size=32) + 1j * rng.normal(size=32)
    dwell = 1 / 640
    s = spectrum(FIDRecord(x, dwell))
    n = np.arange(32)
    for f, amp in zip(s.freqs_hz, s.amplitudes):
        direct = np.sum(x * np.exp(-2j * np.pi * f * n * dwell))
        assert abs(amp - direct) < 1e-10


def test_parseval(rng):
    x = rng.normal(size=2048) + 1j * rng.normal(size=2048)
    s = spectrum(FIDRecord(x, 1e-4))
    lhs = np.sum(np.abs(s.amplitudes) ** 2)
    rhs = s.amplitudes.size * np.sum(np.abs(x) ** 2)
    assert abs(lhs - rhs) / rhs < 1e-9


def test_pure_exponential_dominant_bin():
    td, sw, f0 = 4096, 10000.0, 107.5
    k = np.arange(td // 2)
    s = spectrum(FIDRecord(np.exp(2j * np.pi * f0 * k / sw), 1 / sw))
    i = int(np.argmax(np.abs(s.amplitudes)))
    assert abs(s.freqs_hz[i] - f0) <= sw / td
    assert len(peak_pick(s)) == 1


def test_peak_pick_threshold():
    k = np.arange(2048)
    x = np.exp(2j * np.pi * 100 * k / 8000) + 0.6 * np.exp(-2j * np.pi * 900 * k / 8000)
    s = spectrum(FIDRecord(x, 1 / 8000))
    assert len(peak_pick(s, 0.5)) == 2
    assert len(peak_pick(s, 0.999)) == 1
    with pytest.raises(ValueError):
        peak_pick(s, 1.0)
    with pytest.raises(ValueError):
        peak_pick(Spectrum(np.array([]), np.array([])), 0.5)


def test_doublet_from_carbon_superposition(chloroform):
    p = AcquisitionParams(td=32768, sw_hz=10000)
    fidres = derive_timing(p).fidres_hz
    single = peak_pick(spectrum(simulate_fid(chloroform, StateVector.basis([0, 0]).density(), p)))
    assert len(single) == 1
    sup = StateVector.normalized([1, 1, 0, 0])
    peaks = peak_pick(spectrum(simulate_fid(chloroform, sup.density(), p)))
    assert len(peaks) == 2
    assert abs((peaks[1][0] - peaks[0][0]) - 215.0) <= 2 * fidres
    assert abs(peaks[1][0] - 107.5) <= 2 * fidres and abs(peaks[0][0] + 107.5) <= 2 * fidres


def test_csv_and_json_export():
    fid = FIDRecord(np.array([1 + 2j, 0.5 - 0.25j]), 1e-4)
    text = fid_csv(fid)
    assert text.splitlines()[0] == "index,time_s,re,im"
    assert text.splitlines()[2] == "1,0.0001,0.5,-0.25"
    s = spectrum(fid)
    assert spectrum_csv(s).splitlines()[0] == "index,freq_hz,re,im"
    assert len(spectrum_csv(s).splitlines()) == 5
    data = json.loads(peaks_json([(107.421875, 63783.99096770067)]))
    assert data == [{"freq_hz": 107.421875, "magnitude": 63783.991}]
