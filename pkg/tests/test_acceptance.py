"""Exit criteria.  Each test records one PASS/FAIL line in the terminal summary."""
import itertools
import math
import time

import numpy as np
from scipy.linalg import expm

from nmrswitch.acquisition import (
    AcquisitionParams,
    FIDRecord,
    derive_timing,
    peak_pick,
    simulate_fid,
    spectrum,
)
from nmrswitch.gatecomp import CN, Hadamard, RotZ, compile_cn, compile_h, compile_rz, ideal_unitary, verify
from nmrswitch.qcore import DensityOperator, StateVector, apply, global_phase_distance, is_unitary
from nmrswitch.qswitch import (
    SwitchConfig,
    build_switch_circuit,
    c2q,
    is_involution,
    permutation_to_involutions,
    q2c,
    route_frames,
    switch_unitary,
)
from nmrswitch.spinsim import (
    DelayEvent,
    PulseEvent,
    PulseSequence,
    SpinAxis,
    angle_to_duration,
    coupling_delay,
    delay_propagator,
    pulse_propagator,
    sequence_propagator,
)

CN01 = np.eye(4)[[0, 1, 3, 2]]


def permute_bits(p, bits):
    out = [None] * len(bits)
    for i, b in enumerate(bits):
        out[p[i]] = b
    return out


def test_1_compiled_cn_equivalence(chloroform, acceptance):
    start = time.perf_counter()
    report = verify(compile_cn(0, 1, system=chloroform), ideal_unitary(CN(0, 1)), 1e-9, system=chloroform)
    elapsed = time.perf_counter() - start
    ok = report.distance <= 1e-9 and elapsed < 1.0
    acceptance(1, "compiled CN equivalence", ok, f"distance={report.distance:.3g}, {elapsed:.3f}s")
    assert ok


def test_2_controlled_phase_closed_form(acceptance):
    e = np.eye(4)
    iz = np.kron(np.diag([0.5, -0.5]), np.eye(2))
    sz = np.kron(np.eye(2), np.diag([0.5, -0.5]))
    factors = [expm(-1j * (np.pi / 2) * g) for g in (-0.5 * e, iz, sz, -2 * iz @ sz)]
    product = factors[0] @ factors[1] @ factors[2] @ factors[3]
    d = global_phase_distance(product, np.diag([1, 1, 1, -1]))
    acceptance(2, "four-factor controlled phase = diag(1,1,1,-1)", d <= 1e-12, f"distance={d:.3g}")
    assert d <= 1e-12


def test_3_z_rotation_and_hadamard_decompositions(acceptance):
    rng = np.random.default_rng(3)
    thetas = [math.pi / 4, math.pi / 2, math.pi] + list(rng.uniform(-2 * math.pi, 2 * math.pi, 20))
    worst = max(verify(compile_rz(0, t), ideal_unitary(RotZ(0, t)), 1e-10).distance for t in thetas)
    worst = max(worst, verify(compile_h(0), ideal_unitary(Hadamard(0)), 1e-10).distance)
    acceptance(3, "Rz (23 angles) and H decompositions", worst <= 1e-10, f"worst={worst:.3g}")
    assert worst <= 1e-10


def test_4_cross_mode_routing(chloroform, acceptance):
    cfg = SwitchConfig.cross()
    inputs = [[0, 0], [1, 0], [0, 1], [1, 1]]
    expected = [(0, 0), (0, 1), (1, 0), (1, 1)]
    ideal = [f.bits for f in route_frames(cfg, inputs, "ideal")]
    pulse = [f.bits for f in route_frames(cfg, inputs, "pulse", system=chloroform, tol=1e-8)]
    u = switch_unitary(cfg, "pulse", system=chloroform)
    overlap = min(abs(np.vdot(c2q(list(out)).amplitudes, apply(u, c2q(inp)).amplitudes)) ** 2
                  for inp, out in zip(inputs, expected))
    ok = ideal == expected and pulse == expected and overlap >= 1 - 1e-8
    acceptance(4, "cross-mode routing 00/10/01/11 -> 00/01/10/11", ok, f"min pulse overlap={overlap:.15f}")
    assert ok


def test_5_constant_depth_switch(acceptance):
    start = time.perf_counter()
    max_depth = 0
    failures = 0
    for n in (1, 2, 3, 4):
        frames = [list(b) for b in itertools.product((0, 1), repeat=n)]
        for p in itertools.permutations(range(n)):
            c = build_switch_circuit(p, n)
            max_depth = max(max_depth, c.depth)
            u = ideal_unitary(c)
            failures += sum(list(q2c(apply(u, c2q(f))).bits) != permute_bits(p, f) for f in frames)
    rng = np.random.default_rng(8)
    for _ in range(100):
        p = tuple(int(x) for x in rng.permutation(8))
        c = build_switch_circuit(p, 8)
        max_depth = max(max_depth, c.depth)
        u = ideal_unitary(c)
        for _ in range(100):
            f = [int(b) for b in rng.integers(0, 2, 8)]
            failures += list(q2c(apply(u, c2q(f))).bits) != permute_bits(p, f)
    elapsed = time.perf_counter() - start
    ok = max_depth <= 6 and failures == 0 and elapsed < 10
    acceptance(5, "<= 6 CN layers, exhaustive n<=4 and 100x100 random n=8", ok,
               f"max depth={max_depth}, misroutes={failures}, {elapsed:.2f}s")
    assert ok


def test_6_calibration_arithmetic(chloroform, acceptance):
    p1 = angle_to_duration(chloroform, 1, math.pi)
    p2 = angle_to_duration(chloroform, 2, math.pi)
    tau = coupling_delay(215, math.pi / 2)
    ok = (math.isclose(p1, 19.0e-6, rel_tol=1e-15, abs_tol=0)
          and math.isclose(p2, 25.2e-6, rel_tol=1e-15, abs_tol=0)
          and abs(tau - 1 / (2 * 215)) <= 1e-9 * (1 / (2 * 215)))
    acceptance(6, "pi pulses 19.0/25.2 us, tau = 1/(2J)", ok, f"{p1:.9g}s, {p2:.9g}s, tau={tau:.9g}s")
    assert ok


def test_7_acquisition_arithmetic(acceptance):
    t = derive_timing(AcquisitionParams(td=32768, sw_hz=10000))
    ok = abs(t.fidres_hz - 0.305176) <= 1e-6 and abs(t.aq_s - 1.63845) <= 1e-3 * 1.63845
    acceptance(7, "FIDRES and AQ for TD=32768, SW=10000", ok, f"fidres={t.fidres_hz:.9g}, aq={t.aq_s:.9g}")
    assert ok


def test_8_doublet_invariant(chloroform, acceptance):
    start = time.perf_counter()
    p = AcquisitionParams(td=32768, sw_hz=10000)
    fidres = derive_timing(p).fidres_hz
    lines = []
    for bits in ([0, 0], [0, 1]):
        peaks = peak_pick(spectrum(simulate_fid(chloroform, StateVector.basis(bits).density(), p)))
        lines.append(peaks)
    elapsed = time.perf_counter() - start
    sep = lines[0][0][0] - lines[1][0][0] if all(len(x) == 1 for x in lines) else float("nan")
    ok = abs(sep - 215.0) <= 2 * fidres and elapsed < 5
    acceptance(8, "carbon |0> vs |1> proton lines split by J", ok, f"separation={sep:.6g} Hz, {elapsed:.2f}s")
    assert ok


def test_9_property_suites(chloroform, acceptance):
    rng = np.random.default_rng(9)
    checks = {}

    worst = 0.0
    for _ in range(200):
        e = PulseEvent(int(rng.integers(2)), [SpinAxis.PX, SpinAxis.MX, SpinAxis.PY, SpinAxis.MY][rng.integers(4)],
                       float(rng.uniform(1e-3, 2 * math.pi)))
        u = pulse_propagator(chloroform, e, 2)
        worst = max(worst, np.abs(u @ u.conj().T - np.eye(4)).max())
        d = delay_propagator(chloroform, float(rng.uniform(0, 0.1)), 2)
        worst = max(worst, np.abs(d @ d.conj().T - np.eye(4)).max())
    seq = compile_cn(0, 1) + compile_cn(1, 0) + PulseSequence((DelayEvent(1e-3),)) + compile_cn(0, 1)
    checks["unitarity"] = worst <= 1e-10 and is_unitary(sequence_propagator(chloroform, seq, 2), 1e-10)

    norm_err = 0.0
    u = sequence_propagator(chloroform, seq, 2)
    for _ in range(100):
        s = StateVector.normalized(rng.normal(size=4) + 1j * rng.normal(size=4))
        norm_err = max(norm_err, abs(np.linalg.norm(u @ s.amplitudes) - 1))
    checks["norm"] = norm_err <= 1e-12

    inv_ok = True
    for n in range(1, 7):
        for p in itertools.permutations(range(n)):
            pair = permutation_to_involutions(p)
            inv_ok &= is_involution(pair.sigma1) and is_involution(pair.sigma2) and pair.compose() == p
    checks["involutions"] = inv_ok

    checks["q2c_c2q"] = all(list(q2c(c2q(list(b))).bits) == list(b)
                            for n in range(1, 7) for b in itertools.product((0, 1), repeat=n))

    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    r1 = DensityOperator(a @ a.conj().T / np.trace(a @ a.conj().T))
    r2 = StateVector.basis([1, 0]).density()
    pa = AcquisitionParams(td=2048)
    mix = DensityOperator(0.25 * r1.matrix + 0.75 * r2.matrix)
    lin = np.abs(simulate_fid(chloroform, mix, pa).samples
                 - 0.25 * simulate_fid(chloroform, r1, pa).samples
                 - 0.75 * simulate_fid(chloroform, r2, pa).samples).max()
    checks["fid_linearity"] = lin <= 1e-10

    x = rng.normal(size=4096) + 1j * rng.normal(size=4096)
    s = spectrum(FIDRecord(x, 1e-4))
    rhs = s.amplitudes.size * np.sum(np.abs(x) ** 2)
    checks["parseval"] = abs(np.sum(np.abs(s.amplitudes) ** 2) - rhs) / rhs <= 1e-9

    ok = all(checks.values())
    acceptance(9, "property suites", ok, ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items()))
    assert ok
