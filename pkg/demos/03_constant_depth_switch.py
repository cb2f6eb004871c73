"""
An 8x8 switch in at most six CN layers
======================================

Any routing permutation splits into two involutions.  Each involution is a
set of disjoint swaps that run in parallel as three CN layers, so the depth
never exceeds six, whatever the port count.
"""

import itertools

import numpy as np

from nmrswitch import SwitchConfig, build_switch_circuit, permutation_to_involutions, route_frames
from nmrswitch.gatecomp import dumps_circuit
from nmrswitch.qswitch import cycles

p = (3, 7, 0, 5, 1, 2, 6, 4)
print("cycles:", cycles(p))
pair = permutation_to_involutions(p)
print("sigma2 (first):", pair.sigma2)
print("sigma1 (second):", pair.sigma1)

circuit = build_switch_circuit(p)
print(f"{circuit.depth} layers, {len(circuit.gates)} CN gates")
print(dumps_circuit(circuit))

# %%
rng = np.random.default_rng(0)
frames = [list(rng.integers(0, 2, 8)) for _ in range(4)]
for f, out in zip(frames, route_frames(SwitchConfig.from_permutation(p), frames)):
    print("".join(map(str, f)), "->", out)

# %%
# Depth over every permutation of up to 6 ports.
for n in range(1, 7):
    depth = max(build_switch_circuit(q).depth for q in itertools.permutations(range(n)))
    print(f"n={n}: max depth {depth}")
