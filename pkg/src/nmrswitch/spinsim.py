"""Spin system model and pulse-sequence propagators.

Pulses are hard (instantaneous) rotations; J coupling and resonance offsets
act only during delays.  Sequences are time ordered, and the propagator of a
sequence is the product with the first event as the rightmost factor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from .qcore import IZ, SpinAxis, embed, rotation

PULSE_AXES = (SpinAxis.PX, SpinAxis.MX, SpinAxis.PY, SpinAxis.MY)


class CouplingError(ValueError):
    """Two spins that must interact have no J coupling."""


@dataclass(frozen=True)
class Spin:
    name: str
    channel: int
    offset_hz: float = 0.0


@dataclass(frozen=True)
class ChannelCalibration:
    """RF calibration of one channel; ``t90`` is the pi/2 duration in seconds."""

    t90: float
    power_db: float = 0.0

    def __post_init__(self):
        if not self.t90 > 0:
            raise ValueError(f"t90 must be positive, got {self.t90!r}")


@dataclass(frozen=True)
class SpinSystem:
    """Spins, their RF channels, pairwise J couplings (Hz) and calibration.

    ``couplings`` may be given with either key order; it is stored with the
    smaller spin index first.
    """

    spins: tuple[Spin, ...]
    couplings: dict = field(default_factory=dict)
    calibration: dict = field(default_factory=dict)

    def __post_init__(self):
        spins = tuple(self.spins)
        if not spins:
            raise ValueError("a spin system needs at least one spin")
        channels = [s.channel for s in spins]
        if len(set(channels)) != len(channels):
            raise ValueError(f"channels must be unique per spin, got {channels}")
        norm = {}
        for (i, j), jhz in dict(self.couplings).items():
            if i == j or not (0 <= i < len(spins) and 0 <= j < len(spins)):
                raise ValueError(f"invalid coupling pair ({i}, {j})")
            key = (min(i, j), max(i, j))
            if key in norm and norm[key] != jhz:
                raise ValueError(f"asymmetric coupling for pair {key}")
            norm[key] = float(jhz)
        cal = dict(self.calibration)
        missing = [c for c in channels if c not in cal]
        if missing:
            raise ValueError(f"no calibration for channels {missing}")
        object.__setattr__(self, "spins", spins)
        object.__setattr__(self, "couplings", norm)
        object.__setattr__(self, "calibration", cal)

    @property
    def nspins(self) -> int:
        return len(self.spins)

    def coupling(self, i: int, j: int) -> float:
        """J between spins ``i`` and ``j`` in Hz; 0.0 when uncoupled."""
        return self.couplings.get((min(i, j), max(i, j)), 0.0)

    def channel_of(self, spin: int) -> int:
        return self.spins[spin].channel

    def calibration_for(self, channel: int) -> ChannelCalibration:
        try:
            return self.calibration[channel]
        except KeyError:
            raise KeyError(f"unknown channel {channel}") from None


def standard_chloroform() -> SpinSystem:
    """13C-labelled chloroform: 1H on channel 1, 13C on channel 2, J = 215 Hz."""
    return SpinSystem(
        spins=(Spin("1H", 1), Spin("13C", 2)),
        couplings={(0, 1): 215.0},
        calibration={
            1: ChannelCalibration(t90=9.5e-6, power_db=3.0),
            2: ChannelCalibration(t90=12.6e-6, power_db=-3.0),
        },
    )


def uniform_system(nspins: int, j_hz: float = 215.0, t90: float = 10e-6) -> SpinSystem:
    """Synthetic all-pairs coupled register, one channel per spin."""
    if nspins < 1:
        raise ValueError("nspins must be positive")
    return SpinSystem(
        spins=tuple(Spin(f"q{k}", k + 1) for k in range(nspins)),
        couplings={(i, j): j_hz for i in range(nspins) for j in range(i + 1, nspins)},
        calibration={k + 1: ChannelCalibration(t90=t90) for k in range(nspins)},
    )


def angle_to_duration(system: SpinSystem, channel: int, theta: float) -> float:
    """Pulse length for a tip angle ``theta`` at the channel's fixed power."""
    if not theta > 0:
        raise ValueError("tip angle must be positive")
    cal = system.calibration_for(channel)
    return cal.t90 * theta / (math.pi / 2)


def coupling_delay(j_hz: float, phi: float) -> float:
    """Free-evolution time giving ``exp(-i phi 2IzSz)``; ``phi = pi/2`` is ``1/(2J)``."""
    if not j_hz > 0:
        raise CouplingError(f"coupling constant must be positive, got {j_hz!r}")
    if not phi > 0:
        raise ValueError("coupling angle must be positive")
    return phi / (math.pi * j_hz)


@dataclass(frozen=True)
class PulseEvent:
    spin: int
    axis: SpinAxis
    angle: float

    def __post_init__(self):
        axis = SpinAxis.parse(self.axis) if isinstance(self.axis, str) else self.axis
        if axis not in PULSE_AXES:
            raise ValueError(f"pulses must be along x or y, got {axis.value}")
        if not (0 < self.angle <= 2 * math.pi):
            raise ValueError(f"pulse angle must lie in (0, 2pi], got {self.angle!r}")
        if self.spin < 0:
            raise IndexError(f"negative spin index {self.spin}")
        object.__setattr__(self, "axis", axis)


@dataclass(frozen=True)
class DelayEvent:
    duration: float

    def __post_init__(self):
        if not self.duration >= 0:
            raise ValueError(f"delay must be nonnegative, got {self.duration!r}")


Event = Union[PulseEvent, DelayEvent]


@dataclass(frozen=True)
class PulseSequence:
    events: tuple = ()

    def __post_init__(self):
        events = tuple(self.events)
        for e in events:
            if not isinstance(e, (PulseEvent, DelayEvent)):
                raise TypeError(f"not a sequence event: {e!r}")
        object.__setattr__(self, "events", events)

    def __add__(self, other: "PulseSequence") -> "PulseSequence":
        return PulseSequence(self.events + tuple(other.events))

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    @property
    def pulses(self) -> list[PulseEvent]:
        return [e for e in self.events if isinstance(e, PulseEvent)]

    @property
    def delays(self) -> list[DelayEvent]:
        return [e for e in self.events if isinstance(e, DelayEvent)]

    def max_spin(self) -> int:
        return max((e.spin for e in self.pulses), default=-1)

    def duration(self, system: SpinSystem) -> float:
        """Wall-clock length using calibrated pulse durations."""
        total = 0.0
        for e in self.events:
            if isinstance(e, PulseEvent):
                total += angle_to_duration(system, system.channel_of(e.spin), e.angle)
            else:
                total += e.duration
        return total


def pulse_propagator(system: SpinSystem, event: PulseEvent, nspins: int) -> np.ndarray:
    if not 0 <= event.spin < min(nspins, system.nspins):
        raise IndexError(f"spin {event.spin} out of range")
    return embed(rotation(event.axis, event.angle), event.spin, nspins)


def _check_width(system: SpinSystem, nspins: int) -> None:
    if not 1 <= nspins <= system.nspins:
        raise IndexError(f"register of {nspins} spins does not fit a {system.nspins}-spin system")


def free_energies(system: SpinSystem, nspins: int) -> np.ndarray:
    """Diagonal of the free Hamiltonian in rad/s (offsets plus 2piJ IzSz terms)."""
    _check_width(system, nspins)
    idx = np.arange(2**nspins)
    # Iz eigenvalue of each spin in each basis state: +1/2 for bit 0
    iz = 0.5 - ((idx[:, None] >> (nspins - 1 - np.arange(nspins))[None, :]) & 1)
    h = np.zeros(2**nspins)
    for k in range(nspins):
        h += 2 * np.pi * system.spins[k].offset_hz * iz[:, k]
    for (i, j), jhz in system.couplings.items():
        if j < nspins:
            h += 2 * np.pi * jhz * iz[:, i] * iz[:, j]
    return h


def delay_propagator(system: SpinSystem, t: float, nspins: int) -> np.ndarray:
    """Free evolution ``exp(-i H t)`` with ``H = sum 2pi nu Iz + sum 2pi J IzSz``."""
    if not t >= 0:
        raise ValueError(f"delay must be nonnegative, got {t!r}")
    return np.diag(np.exp(-1j * free_energies(system, nspins) * t))


def event_propagator(system: SpinSystem, event: Event, nspins: int) -> np.ndarray:
    if isinstance(event, PulseEvent):
        return pulse_propagator(system, event, nspins)
    return delay_propagator(system, event.duration, nspins)


def sequence_propagator(system: SpinSystem, seq: PulseSequence | Iterable[Event],
                        nspins: int) -> np.ndarray:
    u = np.eye(2**nspins, dtype=complex)
    for event in seq:
        u = event_propagator(system, event, nspins) @ u
    return u


def free_hamiltonian(system: SpinSystem, nspins: int) -> np.ndarray:
    """Explicit free Hamiltonian matrix in rad/s (reference for tests)."""
    _check_width(system, nspins)
    h = np.zeros((2**nspins, 2**nspins), dtype=complex)
    for k in range(nspins):
        h += 2 * np.pi * system.spins[k].offset_hz * embed(IZ, k, nspins)
    for (i, j), jhz in system.couplings.items():
        if j < nspins:
            h += 2 * np.pi * jhz * embed(IZ, i, nspins) @ embed(IZ, j, nspins)
    return h


# -- text format ------------------------------------------------------------

def dumps_sequence(seq: PulseSequence) -> str:
    lines = []
    for e in seq:
        if isinstance(e, PulseEvent):
            lines.append(f"P {e.spin} {e.axis.value} {e.angle!r}")
        else:
            lines.append(f"D {e.duration!r}")
    return "".join(line + "\n" for line in lines)


class SequenceParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def loads_sequence(text: str) -> PulseSequence:
    """Parse ``P <spin> <axis> <angle_rad>`` / ``D <seconds>`` lines.

    Blank lines and ``#`` comments are ignored.
    """
    events = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0].upper() == "P" and len(parts) == 4:
                events.append(PulseEvent(int(parts[1]), SpinAxis.parse(parts[2]), float(parts[3])))
            elif parts[0].upper() == "D" and len(parts) == 2:
                events.append(DelayEvent(float(parts[1])))
            else:
                raise ValueError(f"unrecognized event {line!r}")
        except (ValueError, IndexError) as exc:
            raise SequenceParseError(lineno, str(exc)) from None
    return PulseSequence(tuple(events))
