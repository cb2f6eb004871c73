"""
Lowering gates to NMR pulses
============================

Z rotations, Hadamard and CN gates compiled to hard pulses and a
J-coupling delay on 13C-chloroform, then checked against their ideal
matrices up to a global phase.
"""

import math

from nmrswitch import CN, Hadamard, RotZ, compile_cn, compile_h, compile_rz, ideal_unitary, verify
from nmrswitch.spinsim import dumps_sequence, standard_chloroform

system = standard_chloroform()

# %%
# A z rotation is three pulses: (pi/2)_-x, (theta)_y, (pi/2)_x
seq = compile_rz(0, math.pi / 3)
print(dumps_sequence(seq))
print("Rz distance:", verify(seq, ideal_unitary(RotZ(0, math.pi / 3))).distance)

# %%
# Hadamard: (pi/4)_y, (pi)_x, (pi/4)_-y
print("H distance:", verify(compile_h(0), ideal_unitary(Hadamard(0))).distance)

# %%
# CN = H(target) . controlled-phase(pi) . H(target); 12 pulses and one 1/(2J) delay
cn = compile_cn(0, 1, system=system)
print(dumps_sequence(cn))
report = verify(cn, ideal_unitary(CN(0, 1)), 1e-9, system=system)
print(f"CN distance {report.distance:.3g}, global phase {report.phase:.4f} rad, passed={report.passed}")
print(f"wall time of the sequence: {cn.duration(system) * 1e3:.4f} ms")
