"""Command-line driver: ``nmrswitch compile|verify|switch|spectrum``.

Exit codes: 0 success or verification pass, 1 verification failure,
2 usage, parse or precondition error.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import acquisition as acq
from .gatecomp import (
    CircuitParseError,
    QuantumCircuit,
    compile_circuit,
    dumps_circuit,
    ideal_unitary,
    loads_circuit,
    verify,
)
from .qcore import StateVector, apply
from .qswitch import (
    MODES,
    ClassicalFrame,
    SwitchConfig,
    build_switch_circuit,
    c2q,
    default_system,
    dumps_frames,
    loads_frames,
    parse_permutation,
    q2c,
    switch_unitary,
)
from .spinsim import (
    ChannelCalibration,
    Spin,
    SpinSystem,
    dumps_sequence,
    loads_sequence,
    standard_chloroform,
    uniform_system,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.9g}"


def parse_system(spec: str) -> SpinSystem:
    """``chloroform``, ``uniform:N[:J]``, inline JSON, or a JSON file path.

    JSON layout::

        {"spins": [{"name": "1H", "channel": 1, "offset_hz": 0}, ...],
         "couplings": [[0, 1, 215.0]],
         "calibration": {"1": {"t90": 9.5e-6, "power_db": 3.0}, ...}}
    """
    spec = spec.strip()
    if spec == "chloroform":
        return standard_chloroform()
    if spec.startswith("uniform:"):
        parts = spec.split(":")[1:]
        try:
            n = int(parts[0])
            j = float(parts[1]) if len(parts) > 1 else 215.0
        except (ValueError, IndexError):
            raise UsageError(f"bad uniform system {spec!r}") from None
        return uniform_system(n, j)
    try:
        data = json.loads(spec if spec.startswith("{") else Path(spec).read_text())
        return SpinSystem(
            spins=tuple(Spin(s["name"], int(s["channel"]), float(s.get("offset_hz", 0.0)))
                        for s in data["spins"]),
            couplings={(int(i), int(j)): float(jhz) for i, j, jhz in data.get("couplings", [])},
            calibration={int(ch): ChannelCalibration(float(c["t90"]), float(c.get("power_db", 0.0)))
                         for ch, c in data["calibration"].items()},
        )
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read spin system {spec!r}: {exc}") from None


def read_config(path: str) -> dict:
    """``key = value`` lines; keys are option names with ``-`` or ``_``."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None


def _emit(args, human: list[str], payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in human:
            print(line)


def _map(args, fn, items):
    jobs = max(1, int(args.jobs))
    if jobs == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- commands ---------------------------------------------------------------

def cmd_compile(args) -> int:
    system = parse_system(args.system)
    circuit = loads_circuit(_read(args.circuit), nspins=system.nspins)
    seq = compile_circuit(circuit, system=system)
    out = Path(args.output) if args.output else Path(args.circuit).with_suffix(".seq")
    out.write_text(dumps_sequence(seq))
    duration = seq.duration(system)
    _emit(args, [
        f"pulses: {len(seq.pulses)}",
        f"delays: {len(seq.delays)}",
        f"duration_s: {fmt(duration)}",
        f"output: {out}",
    ], {"pulses": len(seq.pulses), "delays": len(seq.delays),
        "duration_s": float(fmt(duration)), "output": str(out)})
    return EXIT_OK


def _target_unitary(target: str, nspins: int) -> np.ndarray:
    if Path(target).is_file():
        circuit = loads_circuit(_read(target), nspins=nspins)
    elif target.strip().upper() in ("I", "IDENTITY"):
        circuit = QuantumCircuit(nspins)
    else:
        circuit = loads_circuit(target.replace(";", "\n"), nspins=nspins)
    return ideal_unitary(circuit)


def cmd_verify(args) -> int:
    system = parse_system(args.system)
    tol = float(args.tol)
    if not tol > 0:
        raise UsageError("tolerance must be positive")
    seq = loads_sequence(_read(args.sequence))
    target = _target_unitary(args.target, system.nspins)
    report = verify(seq, target, tol, system=system)
    _emit(args, [
        f"distance: {fmt(report.distance)}",
        f"phase: {fmt(report.phase)}",
        f"result: {'PASS' if report.passed else 'FAIL'}",
    ], {"distance": float(fmt(report.distance)), "phase": float(fmt(report.phase)),
        "tolerance": tol, "passed": report.passed})
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_switch(args) -> int:
    perm = parse_permutation(args.permutation)
    cfg = SwitchConfig.from_permutation(perm)
    frames = loads_frames(_read(args.frames))
    for k, f in enumerate(frames, start=1):
        if len(f) != cfg.nports:
            raise UsageError(f"frame {k} has {len(f)} bits, switch has {cfg.nports} ports")
    system = parse_system(args.system) if args.system else default_system(cfg.nports)
    u = switch_unitary(cfg, args.mode, system=system)
    routed = _map(args, lambda f: q2c(apply(u, c2q(f))), frames)
    text = dumps_frames(routed)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.emit_circuit:
        Path(args.emit_circuit).write_text(dumps_circuit(build_switch_circuit(perm)))
    return EXIT_OK


def _read_state(path: str) -> StateVector:
    """One amplitude per line as ``re im`` (or ``re,im``); normalized on load."""
    amps = []
    for lineno, raw in enumerate(_read(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].replace(",", " ").strip()
        if not line:
            continue
        parts = line.split()
        try:
            re_ = float(parts[0])
            im = float(parts[1]) if len(parts) > 1 else 0.0
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad amplitude {raw!r}") from None
        amps.append(complex(re_, im))
    try:
        return StateVector.normalized(amps)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_spectrum(args) -> int:
    if bool(args.frame) == bool(args.state):
        raise UsageError("give exactly one of --frame or --state")
    state = c2q(ClassicalFrame.parse(args.frame)) if args.frame else _read_state(args.state)
    n = state.nspins
    system = parse_system(args.system) if args.system else default_system(n)
    if system.nspins != n:
        raise UsageError(f"{n}-spin preparation on a {system.nspins}-spin system")
    if args.route:
        cfg = SwitchConfig.from_permutation(parse_permutation(args.route))
        if cfg.nports != n:
            raise UsageError(f"route has {cfg.nports} ports, preparation has {n} spins")
        state = apply(switch_unitary(cfg, args.mode, system=system), state)
    params = acq.AcquisitionParams(td=int(args.td), sw_hz=float(args.sw), ns=int(args.ns),
                                   ds=int(args.ds), observed_spin=int(args.observed))
    fid = acq.simulate_fid(system, state.density(), params)
    spec = acq.spectrum(fid)
    peaks = acq.peak_pick(spec, float(args.threshold))
    prefix = args.out_prefix
    Path(f"{prefix}_fid.csv").write_text(acq.fid_csv(fid))
    Path(f"{prefix}_spectrum.csv").write_text(acq.spectrum_csv(spec))
    Path(f"{prefix}_peaks.json").write_text(acq.peaks_json(peaks) + "\n")
    timing = acq.derive_timing(params)
    _emit(args, [
        f"fidres_hz: {fmt(timing.fidres_hz)}",
        f"aq_s: {fmt(timing.aq_s)}",
        f"peaks: {len(peaks)}",
        *(f"  {fmt(f)} Hz  {fmt(m)}" for f, m in peaks),
    ], {"fidres_hz": float(fmt(timing.fidres_hz)), "aq_s": float(fmt(timing.aq_s)),
        "peaks": json.loads(acq.peaks_json(peaks))})
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file of defaults; flags win")
    common.add_argument("--json", action="store_true", help="structured output")
    common.add_argument("--jobs", default=1, type=int, help="parallel workers")

    parser = argparse.ArgumentParser(prog="nmrswitch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", parents=[common], help="lower a circuit file to pulses")
    p.add_argument("circuit")
    p.add_argument("--system", default="chloroform")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("verify", parents=[common], help="check a pulse file against a target")
    p.add_argument("sequence")
    p.add_argument("target", help="circuit file, gate text such as 'CN 0 1', or I")
    p.add_argument("--system", default="chloroform")
    p.add_argument("--tol", default=1e-9, type=float)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("switch", parents=[common], help="route classical frames")
    p.add_argument("permutation", help="image list, e.g. '2 0 1'")
    p.add_argument("frames")
    p.add_argument("--mode", choices=MODES, default="ideal")
    p.add_argument("--system")
    p.add_argument("-o", "--output")
    p.add_argument("--emit-circuit")
    p.set_defaults(func=cmd_switch)

    p = sub.add_parser("spectrum", parents=[common], help="simulate FID, spectrum and peaks")
    p.add_argument("--frame")
    p.add_argument("--state")
    p.add_argument("--route")
    p.add_argument("--mode", choices=MODES, default="ideal")
    p.add_argument("--system")
    p.add_argument("--td", default=32768, type=int)
    p.add_argument("--sw", default=10000.0, type=float)
    p.add_argument("--ns", default=8, type=int)
    p.add_argument("--ds", default=0, type=int)
    p.add_argument("--observed", default=0, type=int)
    p.add_argument("--threshold", default=0.5, type=float)
    p.add_argument("--out-prefix", default="nmr")
    p.set_defaults(func=cmd_spectrum)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config(known.config)

    def convert(action, value):
        if isinstance(action, argparse._StoreTrueAction):
            return value.lower() in ("1", "true", "yes", "on")
        return action.type(value) if action.type else value

    for action in parser._subparsers._group_actions:
        for sp in action.choices.values():
            dests = {a.dest: a for a in sp._actions}
            sp.set_defaults(**{k: convert(dests[k], v) for k, v in values.items() if k in dests})


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, CircuitParseError, ValueError, IndexError, KeyError) as exc:
        print(f"nmrswitch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
