"""
A 2x2 switch in bypass and cross mode
=====================================

Classical bits are loaded into the 1H and 13C spins, permuted with three CN
gates (the middle one reversed) compiled to pulses, and read back.  The
proton spectrum after routing shows which state the carbon ended in.
"""

from nmrswitch import (
    AcquisitionParams,
    SwitchConfig,
    bypass_circuit_2x2,
    cross_circuit_2x2,
    peak_pick,
    route_frames,
    simulate_fid,
    spectrum,
)
from nmrswitch.gatecomp import dumps_circuit
from nmrswitch.qcore import apply
from nmrswitch.qswitch import c2q, switch_unitary
from nmrswitch.spinsim import standard_chloroform

system = standard_chloroform()
inputs = [[0, 0], [1, 0], [0, 1], [1, 1]]

print("bypass circuit has", len(bypass_circuit_2x2().gates), "gates")
print("cross circuit:\n" + dumps_circuit(cross_circuit_2x2()))

# %%
# Route every input frame in both modes.
for name, cfg in [("bypass", SwitchConfig.bypass()), ("cross", SwitchConfig.cross())]:
    for mode in ("ideal", "pulse"):
        out = route_frames(cfg, inputs, mode, system=system)
        print(f"{name:6s} {mode:5s}", [f"{''.join(map(str, i))}->{o}" for i, o in zip(inputs, out)])

# %%
# Proton spectra after cross-mode routing, one per input.  The line sits at
# +J/2 when the carbon ends in |0> and at -J/2 when it ends in |1>.
u = switch_unitary(SwitchConfig.cross(), "pulse", system=system)
params = AcquisitionParams(td=32768, sw_hz=10000)
for bits in inputs:
    state = apply(u, c2q(bits))
    peaks = peak_pick(spectrum(simulate_fid(system, state.density(), params)))
    print("input", "".join(map(str, bits)), "proton lines (Hz):", [round(f, 2) for f, _ in peaks])
