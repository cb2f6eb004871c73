"""Synthetic FID, spectrum and peak list for the observed channel.

Bruker conventions: ``td`` counts real points, so a record holds ``td/2``
complex quadrature samples spaced ``1/sw`` apart.  The spectrum is zero
filled to ``td`` points, which puts bins ``sw/td`` (FIDRES) apart.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qcore import IX, IY, DensityOperator, SpinAxis, embed, evolve, rotation
from .spinsim import SpinSystem, free_energies


@dataclass(frozen=True)
class AcquisitionParams:
    td: int = 32768
    sw_hz: float = 10000.0
    ns: int = 8
    ds: int = 0
    observed_spin: int = 0

    def __post_init__(self):
        if self.td < 2 or self.td % 2:
            raise ValueError(f"td must be even and >= 2, got {self.td}")
        if not self.sw_hz > 0:
            raise ValueError(f"sw_hz must be positive, got {self.sw_hz}")
        if self.ns < 1 or self.ds < 0:
            raise ValueError("ns must be >= 1 and ds >= 0")
        if self.observed_spin < 0:
            raise ValueError("observed_spin must be nonnegative")


class Timing(NamedTuple):
    fidres_hz: float
    aq_s: float
    dwell_s: float


def derive_timing(p: AcquisitionParams) -> Timing:
    """FIDRES, acquisition time and real-point dwell time."""
    dwell = 1.0 / (2.0 * p.sw_hz)
    return Timing(p.sw_hz / p.td, p.td * dwell, dwell)


@dataclass(frozen=True, eq=False)
class FIDRecord:
    samples: np.ndarray
    dwell_s: float

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples.size) * self.dwell_s


@dataclass(frozen=True, eq=False)
class Spectrum:
    freqs_hz: np.ndarray
    amplitudes: np.ndarray

    @property
    def fidres_hz(self) -> float:
        return float(self.freqs_hz[1] - self.freqs_hz[0])


def simulate_fid(system: SpinSystem, rho: DensityOperator, p: AcquisitionParams,
                 *, readout: bool = True) -> FIDRecord:
    """Quadrature signal ``ns * tr(rho(t) (Ix + i Iy))`` of the observed spin.

    A ``(pi/2)_y`` readout pulse on the observed spin precedes acquisition.
    Free evolution is diagonal (offsets plus secular J terms), so each
    coherence ``rho_jk`` simply oscillates at ``E_j - E_k``.
    """
    n = rho.nspins
    if not 0 <= p.observed_spin < n:
        raise IndexError(f"observed spin {p.observed_spin} not in a {n}-spin state")
    if readout:
        rho = evolve(embed(rotation(SpinAxis.PY, math.pi / 2), p.observed_spin, n), rho)
    energies = free_energies(system, n)
    observable = embed(IX + 1j * IY, p.observed_spin, n)

    # tr(rho O) = sum_jk rho_jk O_kj
    weights = rho.matrix * observable.T
    j, k = np.nonzero(np.abs(weights) > 0)
    amps = weights[j, k]
    omegas = energies[j] - energies[k]

    dwell = 1.0 / p.sw_hz
    t = np.arange(p.td // 2) * dwell
    samples = np.exp(-1j * np.outer(t, omegas)) @ amps if amps.size else np.zeros(t.size, complex)
    return FIDRecord(p.ns * samples, dwell)


def spectrum(fid: FIDRecord) -> Spectrum:
    """Unnormalized DFT of the zero-filled FID on an ascending axis.

    With ``N = 2 * len(samples)`` bins, the axis runs over ``(-sw/2, sw/2]``
    and ``sum |S|^2 == N * sum |fid|^2``.
    """
    m = fid.samples.size
    if m == 0:
        raise ValueError("empty FID")
    n = 2 * m
    raw = np.fft.fft(fid.samples, n=n)
    k = np.arange(n) - n // 2 + 1
    df = 1.0 / (n * fid.dwell_s)
    return Spectrum(k * df, raw[k % n])


def peak_pick(s: Spectrum, threshold: float = 0.5) -> list[tuple[float, float]]:
    """Local maxima of ``|S|`` above ``threshold * max|S|``, by frequency."""
    if not 0 < threshold < 1:
        raise ValueError("threshold must be in (0, 1)")
    mag = np.abs(s.amplitudes)
    if mag.size == 0:
        raise ValueError("empty spectrum")
    top = mag.max()
    if top == 0:
        return []
    left = np.concatenate(([-np.inf], mag[:-1]))
    right = np.concatenate((mag[1:], [-np.inf]))
    hits = np.nonzero((mag > left) & (mag >= right) & (mag >= threshold * top))[0]
    return [(float(s.freqs_hz[i]), float(mag[i])) for i in hits]


# -- export -----------------------------------------------------------------

def _g(x: float) -> str:
    return f"{x:.9g}"


def fid_csv(fid: FIDRecord) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "time_s", "re", "im"])
    for i, (t, z) in enumerate(zip(fid.times, fid.samples)):
        w.writerow([i, _g(t), _g(z.real), _g(z.imag)])
    return buf.getvalue()


def spectrum_csv(s: Spectrum) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "freq_hz", "re", "im"])
    for i, (f, z) in enumerate(zip(s.freqs_hz, s.amplitudes)):
        w.writerow([i, _g(f), _g(z.real), _g(z.imag)])
    return buf.getvalue()


def peaks_json(peaks) -> str:
    return json.dumps([{"freq_hz": float(_g(f)), "magnitude": float(_g(m))} for f, m in peaks])
