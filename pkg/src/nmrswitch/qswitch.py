"""Digital quantum switch: C/Q conversion, CN-layer permutation, Q/C readout.

A routing permutation ``p`` sends the bit on input port ``i`` to output port
``p[i]``.  Any permutation is the composition of two involutions, and an
involution is a set of disjoint transpositions; each transposition is a
three-CN swap, and disjoint swaps share layers, so every permutation costs
at most six CN layers regardless of the port count.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gatecomp import CN, QuantumCircuit, compile_circuit, ideal_unitary
from .qcore import StateVector, apply, index_bits
from .spinsim import SpinSystem, sequence_propagator, standard_chloroform, uniform_system

MODES = ("ideal", "pulse")


class SuperposedStateError(ValueError):
    """The state has no dominant basis amplitude and cannot be read classically."""


def _as_permutation(p: Iterable[int]) -> tuple[int, ...]:
    p = tuple(int(x) for x in p)
    if sorted(p) != list(range(len(p))):
        raise ValueError(f"not a bijection on 0..{len(p) - 1}: {list(p)}")
    return p


def compose(p2: Sequence[int], p1: Sequence[int]) -> tuple[int, ...]:
    """``p2 o p1``: apply ``p1`` first."""
    return tuple(p2[p1[i]] for i in range(len(p1)))


def is_involution(p: Sequence[int]) -> bool:
    return all(p[p[i]] == i for i in range(len(p)))


def cycles(p: Sequence[int]) -> list[list[int]]:
    """Cycle decomposition, each cycle starting at its minimum element."""
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = []
        k = start
        while not seen[k]:
            seen[k] = True
            cyc.append(k)
            k = p[k]
        out.append(cyc)
    return out


@dataclass(frozen=True)
class ClassicalFrame:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits or any(b not in (0, 1) for b in bits):
            raise ValueError(f"frame bits must be 0/1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    def __len__(self):
        return len(self.bits)

    def __str__(self):
        return "".join(map(str, self.bits))

    @classmethod
    def parse(cls, text: str) -> "ClassicalFrame":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"invalid frame {text!r}")
        return cls(tuple(int(c) for c in text))


@dataclass(frozen=True)
class SwitchConfig:
    nports: int
    permutation: tuple[int, ...]
    port_kinds: tuple[str, ...] = ()

    def __post_init__(self):
        perm = _as_permutation(self.permutation)
        if len(perm) != self.nports:
            raise ValueError(f"permutation has {len(perm)} entries for {self.nports} ports")
        kinds = tuple(self.port_kinds) or ("classical",) * self.nports
        if len(kinds) != self.nports or set(kinds) - {"classical", "quantum"}:
            raise ValueError(f"invalid port kinds {kinds!r}")
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "port_kinds", kinds)

    @classmethod
    def from_permutation(cls, p: Iterable[int]) -> "SwitchConfig":
        p = tuple(p)
        return cls(len(p), p)

    @classmethod
    def bypass(cls) -> "SwitchConfig":
        return cls(2, (0, 1))

    @classmethod
    def cross(cls) -> "SwitchConfig":
        return cls(2, (1, 0))


@dataclass(frozen=True)
class InvolutionPair:
    """``sigma1 o sigma2`` equals the target permutation (``sigma2`` acts first)."""

    sigma1: tuple[int, ...]
    sigma2: tuple[int, ...]

    def compose(self) -> tuple[int, ...]:
        return compose(self.sigma1, self.sigma2)


def c2q(frame: ClassicalFrame | Sequence[int]) -> StateVector:
    bits = frame.bits if isinstance(frame, ClassicalFrame) else tuple(frame)
    return StateVector.basis(bits)


def q2c(state: StateVector, tol: float = 1e-6) -> ClassicalFrame:
    """Deterministic readout of a (phase-shifted) computational basis state."""
    probs = np.abs(state.amplitudes) ** 2
    k = int(np.argmax(probs))
    if probs[k] < 1 - tol:
        raise SuperposedStateError(
            f"largest basis population {probs[k]:.6g} is below 1 - {tol:g}")
    return ClassicalFrame(tuple(index_bits(k, state.nspins)))


def permutation_to_involutions(p: Iterable[int]) -> InvolutionPair:
    """Factor ``p`` into two involutions by reflecting each cycle.

    For a cycle ``(c0 c1 ... c_{L-1})`` with ``c0`` its minimum,
    ``sigma2: c_k -> c_{-k}`` and ``sigma1: c_k -> c_{1-k}`` (indices mod L),
    so ``sigma1(sigma2(c_k)) = c_{k+1}``.
    """
    p = _as_permutation(p)
    s1 = list(range(len(p)))
    s2 = list(range(len(p)))
    for cyc in cycles(p):
        n = len(cyc)
        for k, c in enumerate(cyc):
            s2[c] = cyc[(-k) % n]
            s1[c] = cyc[(1 - k) % n]
    return InvolutionPair(tuple(s1), tuple(s2))


def _swap_layers(sigma: Sequence[int]) -> list[tuple]:
    pairs = [(a, b) for a, b in enumerate(sigma) if a < b]
    if not pairs:
        return []
    forward = tuple(CN(a, b) for a, b in pairs)
    backward = tuple(CN(b, a) for a, b in pairs)
    return [forward, backward, forward]


def build_switch_circuit(p: Iterable[int], n: int | None = None) -> QuantumCircuit:
    p = _as_permutation(p)
    if n is not None and n != len(p):
        raise ValueError(f"permutation of {len(p)} ports given for n = {n}")
    pair = permutation_to_involutions(p)
    layers = _swap_layers(pair.sigma2) + _swap_layers(pair.sigma1)
    return QuantumCircuit(len(p), tuple(layers))


def cross_circuit_2x2() -> QuantumCircuit:
    return QuantumCircuit(2, ((CN(0, 1),), (CN(1, 0),), (CN(0, 1),)))


def bypass_circuit_2x2() -> QuantumCircuit:
    return QuantumCircuit(2, ())


def default_system(nports: int) -> SpinSystem:
    return standard_chloroform() if nports == 2 else uniform_system(nports)


def switch_unitary(cfg: SwitchConfig, mode: str = "ideal", *,
                   system: SpinSystem | None = None) -> np.ndarray:
    """Unitary applied between the converters, exact or from compiled pulses."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    circuit = build_switch_circuit(cfg.permutation)
    if mode == "ideal":
        return ideal_unitary(circuit)
    system = default_system(cfg.nports) if system is None else system
    if system.nspins != cfg.nports:
        raise ValueError(f"{system.nspins}-spin system cannot carry {cfg.nports} ports")
    seq = compile_circuit(circuit, system=system)
    return sequence_propagator(system, seq, cfg.nports)


def route_frames(cfg: SwitchConfig, frames: Iterable, mode: str = "ideal", *,
                 system: SpinSystem | None = None, tol: float = 1e-6) -> list[ClassicalFrame]:
    u = switch_unitary(cfg, mode, system=system)
    out = []
    for f in frames:
        f = f if isinstance(f, ClassicalFrame) else ClassicalFrame(tuple(f))
        if len(f) != cfg.nports:
            raise ValueError(f"frame of {len(f)} bits on a {cfg.nports}-port switch")
        out.append(q2c(apply(u, c2q(f)), tol))
    return out


def route_frame(cfg: SwitchConfig, frame, mode: str = "ideal", *,
                system: SpinSystem | None = None, tol: float = 1e-6) -> ClassicalFrame:
    return route_frames(cfg, [frame], mode, system=system, tol=tol)[0]


# -- text formats -----------------------------------------------------------

def parse_permutation(text: str) -> tuple[int, ...]:
    try:
        return _as_permutation(int(tok) for tok in text.split())
    except ValueError as exc:
        raise ValueError(f"invalid permutation {text!r}: {exc}") from None


def format_permutation(p: Sequence[int]) -> str:
    return " ".join(str(x) for x in p)


def loads_frames(text: str) -> list[ClassicalFrame]:
    return [ClassicalFrame.parse(line) for line in text.splitlines() if line.strip()]


def dumps_frames(frames: Iterable[ClassicalFrame]) -> str:
    return "".join(f"{f}\n" for f in frames)
