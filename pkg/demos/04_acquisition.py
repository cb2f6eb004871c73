"""
FID and spectrum of the proton channel
======================================

Acquisition arithmetic for TD = 32768 and SW = 10000 Hz, and the proton
doublet split by the 215 Hz coupling to 13C.  Writes a PNG when matplotlib
is installed.
"""

import numpy as np

from nmrswitch import AcquisitionParams, StateVector, derive_timing, peak_pick, simulate_fid, spectrum
from nmrswitch.spinsim import standard_chloroform

system = standard_chloroform()
params = AcquisitionParams(td=32768, sw_hz=10000, ns=8, ds=0)
timing = derive_timing(params)
print(f"FIDRES {timing.fidres_hz:.6f} Hz, AQ {timing.aq_s:.5f} s, dwell {timing.dwell_s * 1e6:.1f} us")

# %%
preparations = {
    "C in |0>": StateVector.basis([0, 0]),
    "C in |1>": StateVector.basis([0, 1]),
    "C in (|0>+|1>)/sqrt2": StateVector.normalized([1, 1, 0, 0]),
}
spectra = {}
for label, state in preparations.items():
    s = spectrum(simulate_fid(system, state.density(), params))
    spectra[label] = s
    print(label, [(round(f, 3), round(m)) for f, m in peak_pick(s)])

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(7, 3))
    for label, s in spectra.items():
        window = np.abs(s.freqs_hz) < 300
        ax.plot(s.freqs_hz[window], s.amplitudes.real[window], label=label)
    ax.set_xlabel("offset (Hz)")
    ax.legend()
    fig.tight_layout()
    fig.savefig("proton_doublet.png", dpi=120)
    print("wrote proton_doublet.png")
