"""Command-line interface: one-shot runs, sweeps, and closed-form values.

Configuration is a flat text file of `key = value` lines with full-line
`#` comments. Time-valued keys accept a `TR` suffix (units of the
coherent exchange time pi/g); everything stored back into metadata is in
absolute units, so a metadata sidecar is itself a valid configuration
that reproduces its run bit for bit.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import __version__
from .analytic import SwitchSpec, d_crit_res, w_casimir, w_lamb
from .hamiltonian import (
    Constant,
    Cosine,
    DriveProtocol,
    Interaction,
    SwitchRamp,
    SystemParams,
    TermSelection,
)
from .lindblad import IntegratorConfig, integrate
from .observables import TerminationStatus, Trajectory
from .operators import build_operators
from .sweep import AXES, RunSetup, SweepSpec, SweepTable, run_sweep


class ConfigError(ValueError):
    """Malformed, unknown, missing, or inconsistent configuration key."""


# Every key the parser accepts, in canonical emission order.
_KNOWN_KEYS = (
    "omega0",
    "epsilon",
    "g",
    "kappa",
    "gamma",
    "gamma_phi",
    "drive.kind",
    "drive.d",
    "drive.Omega",
    "drive.omega1",
    "drive.omega2",
    "drive.tau",
    "drive.t_switch",
    "terms.casimir",
    "terms.interaction",
    "fock.n_max",
    "integrator.t_end",
    "integrator.rel_tol",
    "integrator.abs_tol",
    "integrator.dt_initial",
    "integrator.dt_max",
    "integrator.positivity_tol",
    "integrator.trace_tol",
    "integrator.top_level_guard",
    "output.path",
    "output.sample_interval",
    "sweep.axis",
    "sweep.values",
    "sweep.workers",
)

# keys where a TR suffix (multiples of pi/g) is meaningful
_TIME_KEYS = {
    "drive.tau",
    "drive.t_switch",
    "integrator.t_end",
    "integrator.dt_initial",
    "integrator.dt_max",
    "output.sample_interval",
}

_EXIT_CODE = {
    TerminationStatus.COMPLETED: 0,
    TerminationStatus.TRUNCATION_BREACH: 3,
    TerminationStatus.TRACE_DRIFT: 4,
    TerminationStatus.NON_FINITE: 4,
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Flat key=value lines -> raw string dict; strict about everything."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        raw[key] = value
    return raw


def _apply_overrides(raw: dict[str, str], overrides: list[str]) -> dict[str, str]:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"--set: unknown key {key!r}")
        if not value:
            raise ConfigError(f"--set: empty value for {key!r}")
        raw[key] = value
    return raw


def _float(raw: dict[str, str], key: str, default: float | None = None) -> float:
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return float(raw[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not a number: {raw[key]!r}") from None


def _int(raw: dict[str, str], key: str, default: int | None = None) -> int:
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return int(raw[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: not an integer: {raw[key]!r}") from None


def _time(
    raw: dict[str, str], key: str, rabi: float, default: float | None = None
) -> float:
    """Absolute time, or multiples of the exchange time via a TR suffix."""
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    text = raw[key]
    scale = 1.0
    if text.endswith("TR"):
        text = text[:-2].strip()
        scale = rabi
    try:
        return float(text) * scale
    except ValueError:
        raise ConfigError(f"key {key!r}: not a time value: {raw[key]!r}") from None


def _choice(raw: dict[str, str], key: str, allowed: tuple[str, ...], default: str | None) -> str:
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    value = raw[key]
    if value not in allowed:
        raise ConfigError(f"key {key!r}: expected one of {allowed}, got {value!r}")
    return value


def _onoff(raw: dict[str, str], key: str, default: bool) -> bool:
    if key not in raw:
        return default
    return _choice(raw, key, ("on", "off"), None) == "on"


def _forbid(raw: dict[str, str], keys: tuple[str, ...], reason: str) -> None:
    for key in keys:
        if key in raw:
            raise ConfigError(f"key {key!r} is only valid with {reason}")


class ResolvedRun:
    """Typed run configuration plus its canonical key=value echo."""

    def __init__(self, raw: dict[str, str], need_output: bool = True):
        params = SystemParams(
            omega0=_float(raw, "omega0", 1.0),
            epsilon=_float(raw, "epsilon", 1.0),
            g=_float(raw, "g", 0.05),
            kappa=_float(raw, "kappa", 0.0),
            gamma=_float(raw, "gamma", 0.0),
            gamma_phi=_float(raw, "gamma_phi", 0.0),
        )
        rabi = params.rabi_period
        kind = _choice(raw, "drive.kind", ("constant", "cosine", "switch"), None)
        protocol: DriveProtocol
        if kind == "constant":
            _forbid(
                raw,
                ("drive.d", "drive.Omega", "drive.omega1", "drive.omega2",
                 "drive.tau", "drive.t_switch"),
                "drive.kind = cosine or switch",
            )
            protocol = Constant(omega=params.omega0)
        elif kind == "cosine":
            _forbid(
                raw,
                ("drive.omega1", "drive.omega2", "drive.tau", "drive.t_switch"),
                "drive.kind = switch",
            )
            protocol = Cosine(
                omega0=params.omega0,
                d=_float(raw, "drive.d", None),
                Omega=_float(raw, "drive.Omega", None),
            )
        else:
            _forbid(raw, ("drive.d", "drive.Omega"), "drive.kind = cosine")
            protocol = SwitchRamp(
                omega1=_float(raw, "drive.omega1", None),
                omega2=_float(raw, "drive.omega2", None),
                t_switch=_time(raw, "drive.t_switch", rabi, None),
                tau=_time(raw, "drive.tau", rabi, None),
            )
        terms = TermSelection(
            include_casimir=_onoff(raw, "terms.casimir", True),
            interaction=Interaction(
                _choice(raw, "terms.interaction", ("full", "jc", "ajc", "none"), "full")
            ),
        )
        n_max = _int(raw, "fock.n_max", 16)
        cycle = 2.0 * 3.141592653589793 / params.omega0
        config = IntegratorConfig(
            t_end=_time(raw, "integrator.t_end", rabi, 40.0 * rabi),
            rel_tol=_float(raw, "integrator.rel_tol", 1e-8),
            abs_tol=_float(raw, "integrator.abs_tol", 1e-10),
            dt_initial=_time(raw, "integrator.dt_initial", rabi, 1e-3),
            dt_max=_time(raw, "integrator.dt_max", rabi, 0.02 * cycle),
            sample_interval=_time(raw, "output.sample_interval", rabi, cycle / 20.0),
            positivity_tol=_float(raw, "integrator.positivity_tol", 1e-7),
            trace_tol=_float(raw, "integrator.trace_tol", 1e-6),
            top_level_guard=_float(raw, "integrator.top_level_guard", 1e-3),
        )
        out_path = raw.get("output.path")
        if need_output and out_path is None:
            raise ConfigError("missing required key 'output.path'")

        self.params = params
        self.protocol = protocol
        self.terms = terms
        self.n_max = n_max
        self.config = config
        self.out_path = out_path
        self.drive_kind = kind

    def echo_pairs(self) -> list[tuple[str, str]]:
        """Canonical resolved key=value pairs (absolute units, full precision)."""
        p, c = self.params, self.config
        pairs = [
            ("omega0", repr(p.omega0)),
            ("epsilon", repr(p.epsilon)),
            ("g", repr(p.g)),
            ("kappa", repr(p.kappa)),
            ("gamma", repr(p.gamma)),
            ("gamma_phi", repr(p.gamma_phi)),
            ("drive.kind", self.drive_kind),
        ]
        if self.drive_kind == "cosine":
            pairs += [
                ("drive.d", repr(self.protocol.d)),
                ("drive.Omega", repr(self.protocol.Omega)),
            ]
        elif self.drive_kind == "switch":
            pairs += [
                ("drive.omega1", repr(self.protocol.omega1)),
                ("drive.omega2", repr(self.protocol.omega2)),
                ("drive.tau", repr(self.protocol.tau)),
                ("drive.t_switch", repr(self.protocol.t_switch)),
            ]
        pairs += [
            ("terms.casimir", "on" if self.terms.include_casimir else "off"),
            ("terms.interaction", self.terms.interaction.value),
            ("fock.n_max", str(self.n_max)),
            ("integrator.t_end", repr(c.t_end)),
            ("integrator.rel_tol", repr(c.rel_tol)),
            ("integrator.abs_tol", repr(c.abs_tol)),
            ("integrator.dt_initial", repr(c.dt_initial)),
            ("integrator.dt_max", repr(c.dt_max)),
            ("integrator.positivity_tol", repr(c.positivity_tol)),
            ("integrator.trace_tol", repr(c.trace_tol)),
            ("integrator.top_level_guard", repr(c.top_level_guard)),
            ("output.sample_interval", repr(c.sample_interval)),
        ]
        if self.out_path is not None:
            pairs.append(("output.path", self.out_path))
        return pairs


def _load(config_path: str, overrides: list[str]) -> dict[str, str]:
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {config_path!r}: {exc}") from None
    raw = parse_config_text(text, source=config_path)
    return _apply_overrides(raw, overrides)


def _write_trajectory_csv(path: str, traj: Trajectory) -> None:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t,w_e,n_ph,purity,trace_dev,top_fock_pop\n")
        for i in range(len(traj.t)):
            fh.write(
                f"{traj.t[i]:.12e},{traj.w_e[i]:.12e},{traj.n_ph[i]:.12e},"
                f"{traj.purity[i]:.12e},{traj.trace_dev[i]:.12e},"
                f"{traj.top_fock_pop[i]:.12e}\n"
            )


def _write_sweep_csv(path: str, table: SweepTable) -> None:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("axis_value,w_e_min,w_e_max,n_ph_mean,stabilized,status\n")
        for row in table.rows:
            if row.envelope is None:
                fields = ["", "", "", ""]
            else:
                env = row.envelope
                fields = [
                    f"{env.w_e_min:.12e}",
                    f"{env.w_e_max:.12e}",
                    f"{env.n_ph_mean:.12e}",
                    "true" if env.stabilized else "false",
                ]
            fh.write(f"{row.value:.12e}," + ",".join(fields) + f",{row.status.value}\n")


def _write_sidecar(
    path: str,
    command: str,
    pairs: list[tuple[str, str]],
    status: str,
    wall_time: float,
    extras: list[str] | None = None,
) -> None:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# casimir-sim {__version__} {command}\n")
        fh.write(f"# status: {status}\n")
        fh.write(f"# wall_time_s: {wall_time:.3f}\n")
        for line in extras or []:
            fh.write(f"# {line}\n")
        for key, value in pairs:
            fh.write(f"{key} = {value}\n")


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def cmd_simulate(config_path: str, overrides: list[str]) -> int:
    raw = _load(config_path, overrides)
    _forbid(raw, ("sweep.axis", "sweep.values", "sweep.workers"), "the sweep command")
    run = ResolvedRun(raw)
    start = time.perf_counter()
    ops = build_operators(run.n_max)
    traj = integrate(ops, run.params, run.protocol, run.terms, None, run.config)
    wall = time.perf_counter() - start
    _write_trajectory_csv(run.out_path, traj)
    extras = [
        f"n_accepted: {traj.metadata['n_accepted']}",
        f"n_rejected: {traj.metadata['n_rejected']}",
    ]
    _write_sidecar(
        run.out_path + ".meta", "simulate", run.echo_pairs(),
        traj.status.value, wall, extras,
    )
    if traj.status is not TerminationStatus.COMPLETED:
        print(f"terminated early: {traj.status.value}", file=sys.stderr)
    return _EXIT_CODE[traj.status]


def cmd_sweep(config_path: str, overrides: list[str]) -> int:
    raw = _load(config_path, overrides)
    axis = _choice(raw, "sweep.axis", AXES, None)
    values_text = raw.get("sweep.values")
    if values_text is None:
        raise ConfigError("missing required key 'sweep.values'")
    try:
        values = tuple(float(part) for part in values_text.split(","))
    except ValueError:
        raise ConfigError(f"key 'sweep.values': not a comma-separated number list") from None
    workers = _int(raw, "sweep.workers", 1)
    run = ResolvedRun(raw)
    spec = SweepSpec(
        base=RunSetup(
            params=run.params,
            protocol=run.protocol,
            terms=run.terms,
            config=run.config,
            n_max=run.n_max,
        ),
        axis=axis,
        values=values,
        workers=workers,
    )
    start = time.perf_counter()
    table = run_sweep(spec)
    wall = time.perf_counter() - start
    _write_sweep_csv(run.out_path, table)
    pairs = run.echo_pairs() + [
        ("sweep.axis", axis),
        ("sweep.values", ",".join(repr(v) for v in spec.values)),
        ("sweep.workers", str(workers)),
    ]
    statuses = ",".join(row.status.value for row in table.rows)
    _write_sidecar(
        run.out_path + ".meta", "sweep", pairs, "completed", wall,
        [f"row_statuses: {statuses}"],
    )
    return 0


def cmd_analytic(args: argparse.Namespace) -> int:
    if args.subcommand == "dcrit":
        value = d_crit_res(args.omega0, args.Omega, args.kappa)
    else:
        spec = SwitchSpec(
            omega1=args.omega1, omega2=args.omega2, epsilon=args.epsilon, g=args.g
        )
        value = w_casimir(spec) if args.subcommand == "wcasimir" else w_lamb(spec)
    print(f"{value:.12g}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="casimir-sim",
        description="Qubit-cavity simulator with a frequency-modulated cavity",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate one run, write trajectory CSV")
    sim.add_argument("config", help="key=value configuration file")
    sim.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        dest="overrides", help="override a configuration key (repeatable)",
    )

    sw = sub.add_parser("sweep", help="run a one-axis parameter sweep, write table CSV")
    sw.add_argument("config", help="key=value configuration file")
    sw.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        dest="overrides", help="override a configuration key (repeatable)",
    )

    an = sub.add_parser("analytic", help="print a closed-form value")
    ansub = an.add_subparsers(dest="subcommand", required=True)
    dcrit = ansub.add_parser("dcrit", help="critical modulation amplitude, bare cavity")
    dcrit.add_argument("--omega0", type=float, default=1.0)
    dcrit.add_argument("--Omega", type=float, required=True)
    dcrit.add_argument("--kappa", type=float, required=True)
    for name, helptext in (
        ("wcasimir", "switch excitation via photon absorption"),
        ("wlamb", "switch excitation via re-dressing"),
    ):
        p = ansub.add_parser(name, help=helptext)
        p.add_argument("--omega1", type=float, required=True)
        p.add_argument("--omega2", type=float, required=True)
        p.add_argument("--epsilon", type=float, required=True)
        p.add_argument("--g", type=float, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.overrides)
        if args.command == "sweep":
            return cmd_sweep(args.config, args.overrides)
        return cmd_analytic(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
