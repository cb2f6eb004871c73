"""Gate IR and lowering of gates and layered circuits to NMR pulse sequences.

Z rotations are realized as ``(pi/2)_-x, (theta)_y, (pi/2)_x``; Hadamard as
``(pi/4)_y, (pi)_x, (pi/4)_-y``; the controlled phase as two z rotations and
a J-coupling delay; CN as Hadamard-controlled phase-Hadamard on the target.
Every lowering is checked numerically against the textbook unitary up to a
global phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .qcore import (
    HADAMARD,
    SIGMA_X,
    DimensionError,
    SpinAxis,
    embed,
    global_phase_distance,
    rotation,
)
from .spinsim import (
    CouplingError,
    DelayEvent,
    PulseEvent,
    PulseSequence,
    SpinSystem,
    coupling_delay,
    sequence_propagator,
    standard_chloroform,
)


# -- gates ------------------------------------------------------------------

@dataclass(frozen=True)
class Not:
    spin: int

    @property
    def spins(self) -> tuple[int, ...]:
        return (self.spin,)


@dataclass(frozen=True)
class Hadamard:
    spin: int

    @property
    def spins(self) -> tuple[int, ...]:
        return (self.spin,)


@dataclass(frozen=True)
class RotZ:
    spin: int
    theta: float

    @property
    def spins(self) -> tuple[int, ...]:
        return (self.spin,)


@dataclass(frozen=True)
class CPhase:
    control: int
    target: int
    theta: float = math.pi

    def __post_init__(self):
        if self.control == self.target:
            raise ValueError("control and target must differ")

    @property
    def spins(self) -> tuple[int, ...]:
        return (self.control, self.target)


@dataclass(frozen=True)
class CN:
    control: int
    target: int

    def __post_init__(self):
        if self.control == self.target:
            raise ValueError("control and target must differ")

    @property
    def spins(self) -> tuple[int, ...]:
        return (self.control, self.target)


Gate = Union[Not, Hadamard, RotZ, CPhase, CN]
GATE_TYPES = (Not, Hadamard, RotZ, CPhase, CN)


@dataclass(frozen=True)
class QuantumCircuit:
    """Layers of gates; gates inside one layer act on disjoint spins.

    Empty layers are dropped on construction.
    """

    nspins: int
    layers: tuple = ()

    def __post_init__(self):
        if self.nspins < 1:
            raise ValueError("circuit needs at least one spin")
        layers = []
        for layer in self.layers:
            layer = tuple(layer)
            if not layer:
                continue
            used: set[int] = set()
            for g in layer:
                if not isinstance(g, GATE_TYPES):
                    raise TypeError(f"not a gate: {g!r}")
                for s in g.spins:
                    if not 0 <= s < self.nspins:
                        raise IndexError(f"spin {s} out of range for {self.nspins} spins")
                    if s in used:
                        raise ValueError(f"spin {s} used twice in one layer")
                    used.add(s)
            layers.append(layer)
        object.__setattr__(self, "layers", tuple(layers))

    @classmethod
    def from_gates(cls, nspins: int, gates) -> "QuantumCircuit":
        """One gate per layer, in order."""
        return cls(nspins, tuple((g,) for g in gates))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def gates(self) -> list:
        return [g for layer in self.layers for g in layer]


# -- ideal unitaries --------------------------------------------------------

def _cn_image(control: int, target: int, nspins: int) -> np.ndarray:
    """Basis index each state maps to under CN."""
    idx = np.arange(2**nspins)
    cbit = 1 << (nspins - 1 - control)
    tbit = 1 << (nspins - 1 - target)
    return np.where(idx & cbit, idx ^ tbit, idx)


def _controlled_permutation(control: int, target: int, nspins: int) -> np.ndarray:
    dim = 2**nspins
    u = np.zeros((dim, dim), dtype=complex)
    u[_cn_image(control, target, nspins), np.arange(dim)] = 1.0
    return u


def _cphase_phases(control: int, target: int, theta: float, nspins: int) -> np.ndarray:
    idx = np.arange(2**nspins)
    both = (idx >> (nspins - 1 - control)) & (idx >> (nspins - 1 - target)) & 1
    return np.where(both == 1, np.exp(1j * theta), 1.0 + 0j)


def _cphase_diag(control: int, target: int, theta: float, nspins: int) -> np.ndarray:
    return np.diag(_cphase_phases(control, target, theta, nspins))


def _left_multiply(gate: Gate, u: np.ndarray, nspins: int) -> np.ndarray:
    """``gate_unitary(gate) @ u`` without forming permutation or diagonal matrices."""
    if isinstance(gate, CN):
        if any(not 0 <= s < nspins for s in gate.spins):
            raise IndexError(f"{gate!r} does not fit {nspins} spins")
        out = np.empty_like(u)
        out[_cn_image(gate.control, gate.target, nspins)] = u
        return out
    if isinstance(gate, CPhase):
        if any(not 0 <= s < nspins for s in gate.spins):
            raise IndexError(f"{gate!r} does not fit {nspins} spins")
        return _cphase_phases(gate.control, gate.target, gate.theta, nspins)[:, None] * u
    return gate_unitary(gate, nspins) @ u


def gate_unitary(gate: Gate, nspins: int) -> np.ndarray:
    if any(not 0 <= s < nspins for s in gate.spins):
        raise IndexError(f"{gate!r} does not fit {nspins} spins")
    if isinstance(gate, Not):
        return embed(SIGMA_X, gate.spin, nspins)
    if isinstance(gate, Hadamard):
        return embed(HADAMARD, gate.spin, nspins)
    if isinstance(gate, RotZ):
        return embed(rotation(SpinAxis.PZ, gate.theta), gate.spin, nspins)
    if isinstance(gate, CPhase):
        return _cphase_diag(gate.control, gate.target, gate.theta, nspins)
    if isinstance(gate, CN):
        return _controlled_permutation(gate.control, gate.target, nspins)
    raise TypeError(f"not a gate: {gate!r}")


def ideal_unitary(obj: Gate | QuantumCircuit, nspins: int | None = None) -> np.ndarray:
    """Textbook matrix of a gate or of a whole circuit (layers in time order)."""
    if isinstance(obj, QuantumCircuit):
        n = obj.nspins if nspins is None else nspins
        u = np.eye(2**n, dtype=complex)
        for layer in obj.layers:
            for g in layer:
                u = _left_multiply(g, u, n)
        return u
    n = max(obj.spins) + 1 if nspins is None else nspins
    return gate_unitary(obj, n)


# -- lowering ---------------------------------------------------------------

def _wrap(theta: float) -> float:
    """Angle mapped into (-pi, pi]."""
    a = math.remainder(theta, 2 * math.pi)
    return math.pi if a == -math.pi else a


def _signed_pulse(spin: int, axis: SpinAxis, theta: float) -> list[PulseEvent]:
    """A pulse of signed angle; negative angles use the opposite axis."""
    a = _wrap(theta)
    if a == 0.0:
        return []
    if a < 0:
        axis = {SpinAxis.PX: SpinAxis.MX, SpinAxis.PY: SpinAxis.MY}[axis]
    return [PulseEvent(spin, axis, abs(a))]


def compile_rz(spin: int, theta: float) -> PulseSequence:
    if not math.isfinite(theta):
        raise ValueError("rotation angle must be finite")
    return PulseSequence((
        PulseEvent(spin, SpinAxis.MX, math.pi / 2),
        *_signed_pulse(spin, SpinAxis.PY, theta),
        PulseEvent(spin, SpinAxis.PX, math.pi / 2),
    ))


def compile_h(spin: int) -> PulseSequence:
    return PulseSequence((
        PulseEvent(spin, SpinAxis.PY, math.pi / 4),
        PulseEvent(spin, SpinAxis.PX, math.pi),
        PulseEvent(spin, SpinAxis.MY, math.pi / 4),
    ))


def compile_not(spin: int) -> PulseSequence:
    return PulseSequence((PulseEvent(spin, SpinAxis.PX, math.pi),))


def _coupling_of(system: SpinSystem, control: int, target: int) -> float:
    if control == target:
        raise ValueError("control and target must differ")
    for s in (control, target):
        if not 0 <= s < system.nspins:
            raise IndexError(f"spin {s} not in a {system.nspins}-spin system")
    j = system.coupling(control, target)
    if j <= 0:
        raise CouplingError(f"spins {control} and {target} are not coupled")
    return j


def compile_cphase(control: int, target: int, theta: float = math.pi, *,
                   system: SpinSystem | None = None) -> PulseSequence:
    """Controlled phase ``diag(1, 1, 1, exp(i theta))`` on (control, target).

    Decomposes as ``Rz_c(theta/2) Rz_t(theta/2) exp(+i (theta/2) 2IzSz)``.
    Free evolution only produces ``exp(-i phi 2IzSz)`` with ``phi >= 0``, so
    the coupling angle is taken as ``phi = -theta/2 mod pi``; the leftover
    ``m`` half-turns equal ``(Z x Z)^m`` and fold into both z rotations as
    an extra ``m*pi``.  At ``theta = pi`` this gives the ``1/(2J)`` delay.
    Couplings to other spins are refocused during the delay.
    """
    system = standard_chloroform() if system is None else system
    j = _coupling_of(system, control, target)
    phi = (-theta / 2) % math.pi
    m = round((phi + theta / 2) / math.pi)
    z_angle = theta / 2 + m * math.pi
    events = list(compile_rz(control, z_angle)) + list(compile_rz(target, z_angle))
    if phi > 1e-15:
        events.extend(_refocused_delay(system, control, target, coupling_delay(j, phi)))
    return PulseSequence(tuple(events))


def _refocused_delay(system: SpinSystem, control: int, target: int, tau: float) -> list:
    """Free evolution of length ``tau`` that keeps only the control-target coupling.

    Every other coupled spin gets its own non-constant Walsh sign pattern
    over ``M`` equal segments (a pi_x pulse at each sign change, and one
    more at the end when needed); the active pair keeps the constant
    pattern.  Orthogonal patterns average every unwanted IzIz term to zero.
    With no coupled spectators this is a single delay.
    """
    coupled = {s for pair in system.couplings for s in pair if system.couplings[pair] != 0}
    spectators = sorted(coupled - {control, target})
    if not spectators:
        return [DelayEvent(tau)]
    m = 1
    while m < len(spectators) + 1:
        m *= 2
    rows = {s: r for r, s in enumerate(spectators, start=1)}

    def sign(spin: int, seg: int) -> int:
        return -1 if bin(rows[spin] & seg).count("1") % 2 else 1

    events: list = []
    for seg in range(m):
        if seg:
            events.extend(PulseEvent(s, SpinAxis.PX, math.pi)
                          for s in spectators if sign(s, seg) != sign(s, seg - 1))
        events.append(DelayEvent(tau / m))
    events.extend(PulseEvent(s, SpinAxis.PX, math.pi) for s in spectators if sign(s, m - 1) < 0)
    return events


def compile_cn(control: int, target: int, *, system: SpinSystem | None = None) -> PulseSequence:
    return (
        compile_h(target)
        + compile_cphase(control, target, math.pi, system=system)
        + compile_h(target)
    )


def compile_gate(gate: Gate, *, system: SpinSystem | None = None) -> PulseSequence:
    if isinstance(gate, Not):
        return compile_not(gate.spin)
    if isinstance(gate, Hadamard):
        return compile_h(gate.spin)
    if isinstance(gate, RotZ):
        return compile_rz(gate.spin, gate.theta)
    if isinstance(gate, CPhase):
        return compile_cphase(gate.control, gate.target, gate.theta, system=system)
    if isinstance(gate, CN):
        return compile_cn(gate.control, gate.target, system=system)
    raise TypeError(f"not a gate: {gate!r}")


def compile_circuit(circuit: QuantumCircuit, *, system: SpinSystem | None = None) -> PulseSequence:
    """Concatenate per-gate sequences in layer order.

    Gates sharing a layer are emitted one after another; they act on
    disjoint spins so the order inside a layer does not matter.
    """
    system = standard_chloroform() if system is None else system
    if circuit.nspins > system.nspins:
        raise IndexError(f"{circuit.nspins}-spin circuit on a {system.nspins}-spin system")
    seq = PulseSequence()
    for layer in circuit.layers:
        for g in layer:
            seq = seq + compile_gate(g, system=system)
    return seq


# -- verification -----------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    distance: float
    phase: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.distance <= self.tolerance


def verify(seq: PulseSequence, target: np.ndarray, tol: float = 1e-9, *,
           system: SpinSystem | None = None) -> VerificationReport:
    """Compare a sequence's propagator with ``target`` modulo global phase."""
    system = standard_chloroform() if system is None else system
    target = np.asarray(target, dtype=complex)
    dim = target.shape[0]
    nspins = dim.bit_length() - 1
    if target.shape != (dim, dim) or 2**nspins != dim:
        raise DimensionError(f"target must be 2^n square, got {target.shape}")
    if seq.max_spin() >= nspins:
        raise DimensionError(f"sequence touches spin {seq.max_spin()} beyond {nspins} spins")
    u = sequence_propagator(system, seq, nspins)
    distance, phase = global_phase_distance(target, u, return_phase=True)
    return VerificationReport(distance, phase, tol)


# -- text format ------------------------------------------------------------

class CircuitParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def format_gate(g: Gate) -> str:
    if isinstance(g, Not):
        return f"N {g.spin}"
    if isinstance(g, Hadamard):
        return f"H {g.spin}"
    if isinstance(g, RotZ):
        return f"RZ {g.spin} {g.theta!r}"
    if isinstance(g, CPhase):
        return f"CP {g.control} {g.target} {g.theta!r}"
    if isinstance(g, CN):
        return f"CN {g.control} {g.target}"
    raise TypeError(f"not a gate: {g!r}")


def parse_gate(line: str) -> Gate:
    parts = line.split()
    if not parts:
        raise ValueError("empty gate")
    op, args = parts[0].upper(), parts[1:]
    arity = {"N": 1, "H": 1, "RZ": 2, "CP": 3, "CN": 2}
    if op not in arity:
        raise ValueError(f"unknown gate {parts[0]!r}")
    if len(args) != arity[op]:
        raise ValueError(f"{op} takes {arity[op]} arguments, got {len(args)}")
    if op == "N":
        return Not(int(args[0]))
    if op == "H":
        return Hadamard(int(args[0]))
    if op == "RZ":
        return RotZ(int(args[0]), float(args[1]))
    if op == "CP":
        return CPhase(int(args[0]), int(args[1]), float(args[2]))
    return CN(int(args[0]), int(args[1]))


def dumps_circuit(circuit: QuantumCircuit) -> str:
    blocks = ["".join(format_gate(g) + "\n" for g in layer) for layer in circuit.layers]
    return "---\n".join(blocks)


def loads_circuit(text: str, nspins: int | None = None) -> QuantumCircuit:
    """Parse one gate per line, layers separated by ``---``.

    ``nspins`` defaults to one more than the largest spin index used.
    """
    layers: list[list] = [[]]
    linenos: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "---":
            layers.append([])
            continue
        try:
            layers[-1].append(parse_gate(line))
        except ValueError as exc:
            raise CircuitParseError(lineno, str(exc)) from None
        linenos.append(lineno)
    used = [s for layer in layers for g in layer for s in g.spins]
    if nspins is None:
        nspins = max(used, default=0) + 1
    try:
        return QuantumCircuit(nspins, tuple(tuple(layer) for layer in layers))
    except (ValueError, IndexError) as exc:
        raise CircuitParseError(linenos[-1] if linenos else 0, str(exc)) from None
