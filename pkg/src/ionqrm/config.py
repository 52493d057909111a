"""Run configuration: a flat key-value document with dotted sections.

Grammar (one setting per line)::

    # full-line comments and blank lines are ignored
    key = value
    section.key = value

Keys are case-sensitive and may appear at most once; unknown keys are hard
errors, not warnings, because a silent typo in a physics parameter is the
costliest failure mode. Command-scoped keys (``build.*``, ``evolve.*``,
``scan.*``, ``verify.*``, ``regime.*``) may only be set when ``command``
selects that section. Values use the shortest round-trip decimal form for
floats, ``true``/``false`` for booleans, ``re+imj`` for complex numbers and
comma-separated items for lists.

:func:`parse_config` and :func:`emit_config` are inverses on valid
configurations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .algebra import TruncationSpec
from .analysis import Tolerances
from .models import HAMILTONIAN_BUILDERS, IonParams, RegimeThresholds

COMMANDS = ("build", "verify", "evolve", "scan", "regime", "all-checks")
BUILDER_NAMES = tuple(sorted(HAMILTONIAN_BUILDERS))
VERIFY_CHECKS = ("qrm-transform", "guard", "dispersive", "jc-rabi", "speed", "rotation")
SCAN_KINDS = ("dispersive", "truncation", "lamb-dicke")
DEFAULT_SEED = 2024


class ConfigError(ValueError):
    """Configuration syntax error or constraint violation."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class BuildSpec:
    hamiltonian: str = "qrm"
    include_constant: bool = True


@dataclass(frozen=True)
class EvolveSpec:
    hamiltonian: str = "jc"
    include_constant: bool = False
    state: str = "fock"
    spin: str = "e"
    fock: int = 0
    alpha: complex = 0j
    t_max: float = 10.0
    samples: int = 201
    times: tuple[float, ...] | None = None


@dataclass(frozen=True)
class ScanSpec:
    kind: str = "dispersive"
    etas: tuple[float, ...] = (0.08, 0.04, 0.02)
    n_list: tuple[int, ...] = (16, 32, 64)
    k_lowest: int = 10
    builder: str = "qrm"


@dataclass(frozen=True)
class VerifySpec:
    check: str = "qrm-transform"
    fock: int = 0


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: IonParams
    trunc: TruncationSpec
    seed: int = DEFAULT_SEED
    out: str | None = None
    format: str = "json"
    tol: Tolerances = Tolerances()
    build: BuildSpec = BuildSpec()
    evolve: EvolveSpec = EvolveSpec()
    scan: ScanSpec = ScanSpec()
    verify: VerifySpec = VerifySpec()
    regime: RegimeThresholds = RegimeThresholds()


def _parse_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"not a number: {text!r}")
    if not math.isfinite(value):
        raise ValueError(f"numeric fields must be finite, got {text!r}")
    return value


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"not an integer: {text!r}")


def _parse_bool(text: str) -> bool:
    if text == "true":
        return True
    if text == "false":
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _parse_complex(text: str) -> complex:
    try:
        value = complex(text)
    except ValueError:
        raise ValueError(f"not a complex number: {text!r}")
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"numeric fields must be finite, got {text!r}")
    return value


def _parse_floats(text: str) -> tuple[float, ...]:
    items = [part.strip() for part in text.split(",")]
    if not items or any(not part for part in items):
        raise ValueError(f"malformed list: {text!r}")
    return tuple(_parse_float(part) for part in items)


def _parse_ints(text: str) -> tuple[int, ...]:
    items = [part.strip() for part in text.split(",")]
    if not items or any(not part for part in items):
        raise ValueError(f"malformed list: {text!r}")
    return tuple(_parse_int(part) for part in items)


def _format_complex(z: complex) -> str:
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}j"


# key -> (parser, scope); scope None means global
_SCHEMA: dict[str, tuple] = {
    "command": (str, None),
    "nu": (_parse_float, None),
    "Omega": (_parse_float, None),
    "eta": (_parse_float, None),
    "phi_l": (_parse_float, None),
    "delta": (_parse_float, None),
    "trunc.n_max": (_parse_int, None),
    "trunc.guard": (_parse_int, None),
    "seed": (_parse_int, None),
    "out": (str, None),
    "format": (str, None),
    "tol.identity": (_parse_float, None),
    "tol.oracle": (_parse_float, None),
    "tol.spectral": (_parse_float, None),
    "tol.min_order": (_parse_float, None),
    "build.hamiltonian": (str, "build"),
    "build.include_constant": (_parse_bool, "build"),
    "evolve.hamiltonian": (str, "evolve"),
    "evolve.include_constant": (_parse_bool, "evolve"),
    "evolve.state": (str, "evolve"),
    "evolve.spin": (str, "evolve"),
    "evolve.fock": (_parse_int, "evolve"),
    "evolve.alpha": (_parse_complex, "evolve"),
    "evolve.t_max": (_parse_float, "evolve"),
    "evolve.samples": (_parse_int, "evolve"),
    "evolve.times": (_parse_floats, "evolve"),
    "scan.kind": (str, "scan"),
    "scan.etas": (_parse_floats, "scan"),
    "scan.n_list": (_parse_ints, "scan"),
    "scan.k_lowest": (_parse_int, "scan"),
    "scan.builder": (str, "scan"),
    "verify.check": (str, "verify"),
    "verify.fock": (_parse_int, "verify"),
    "regime.ordering_factor": (_parse_float, "regime"),
    "regime.ultrastrong_onset": (_parse_float, "regime"),
    "regime.dispersive_factor": (_parse_float, "regime"),
    "regime.resonant_max_g_ratio": (_parse_float, "regime"),
}

_REQUIRED = ("command", "Omega", "eta")


def _scan_document(text: str) -> dict[str, tuple[str, int]]:
    """Raw key -> (value text, line number); rejects malformed lines and duplicates."""
    raw: dict[str, tuple[str, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got {stripped!r}", lineno)
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise ConfigError("missing key before '='", lineno)
        if key in raw:
            raise ConfigError(f"duplicate key {key!r}", lineno)
        raw[key] = (value, lineno)
    return raw


def _choice(key: str, value: str, choices: tuple[str, ...], line: int | None) -> str:
    if value not in choices:
        raise ConfigError(
            f"{key} must be one of {', '.join(choices)}; got {value!r}", line
        )
    return value


def parse_config(text: str, overrides: tuple[tuple[str, str], ...] = ()) -> RunConfig:
    """Parse a configuration document into a fully validated :class:`RunConfig`.

    ``overrides`` are (key, value-text) pairs applied after the document
    (command-line flags override file values); they go through the same
    grammar and validation.
    """
    raw = _scan_document(text)
    for key, value in overrides:
        raw[key.strip()] = (value.strip(), None)

    values: dict[str, object] = {}
    lines: dict[str, int | None] = {}
    for key, (value_text, lineno) in raw.items():
        if key not in _SCHEMA:
            raise ConfigError(f"unknown key {key!r}", lineno)
        parser, _scope = _SCHEMA[key]
        try:
            values[key] = parser(value_text)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", lineno)
        lines[key] = lineno

    for key in _REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}")

    command = _choice("command", str(values["command"]), COMMANDS, lines.get("command"))
    for key in values:
        scope = _SCHEMA[key][1]
        if scope is not None and scope != command:
            raise ConfigError(
                f"key {key!r} applies to command {scope!r}, not {command!r}",
                lines.get(key),
            )

    def get(key: str, default):
        return values.get(key, default)

    try:
        params = IonParams(
            Omega=get("Omega", None),
            eta=get("eta", None),
            nu=get("nu", 1.0),
            phi_l=get("phi_l", 0.0),
            delta=get("delta", 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"constraint violation: {exc}")
    try:
        trunc = TruncationSpec(n_max=get("trunc.n_max", 64), guard=get("trunc.guard", 16))
    except ValueError as exc:
        raise ConfigError(f"constraint violation: {exc}")

    fmt = _choice("format", str(get("format", _default_format(command))),
                  ("csv", "json"), lines.get("format"))

    for key in ("tol.identity", "tol.oracle", "tol.spectral", "tol.min_order"):
        if key in values and values[key] <= 0:
            raise ConfigError(f"constraint violation: {key} > 0", lines.get(key))
    tol = Tolerances(
        identity=get("tol.identity", 1e-10),
        oracle=get("tol.oracle", 1e-9),
        spectral=get("tol.spectral", 1e-8),
        min_scaling_order=get("tol.min_order", 1.8),
    )

    build = BuildSpec(
        hamiltonian=_choice("build.hamiltonian", str(get("build.hamiltonian", "qrm")),
                            BUILDER_NAMES, lines.get("build.hamiltonian")),
        include_constant=get("build.include_constant", True),
    )
    evolve = EvolveSpec(
        hamiltonian=_choice("evolve.hamiltonian", str(get("evolve.hamiltonian", "jc")),
                            BUILDER_NAMES, lines.get("evolve.hamiltonian")),
        include_constant=get("evolve.include_constant", False),
        state=_choice("evolve.state", str(get("evolve.state", "fock")),
                      ("fock", "coherent"), lines.get("evolve.state")),
        spin=_choice("evolve.spin", str(get("evolve.spin", "e")),
                     ("e", "g"), lines.get("evolve.spin")),
        fock=get("evolve.fock", 0),
        alpha=get("evolve.alpha", 0j),
        t_max=get("evolve.t_max", 10.0),
        samples=get("evolve.samples", 201),
        times=get("evolve.times", None),
    )
    scan_kind = _choice("scan.kind", str(get("scan.kind", "dispersive")),
                        SCAN_KINDS, lines.get("scan.kind"))
    scan = ScanSpec(
        kind=scan_kind,
        etas=get("scan.etas", (0.08, 0.04, 0.02)),
        n_list=get("scan.n_list", (16, 32, 64)),
        k_lowest=get("scan.k_lowest", 8 if scan_kind == "truncation" else 10),
        builder=_choice("scan.builder", str(get("scan.builder", "qrm")),
                        BUILDER_NAMES, lines.get("scan.builder")),
    )
    verify = VerifySpec(
        check=_choice("verify.check", str(get("verify.check", "qrm-transform")),
                      VERIFY_CHECKS, lines.get("verify.check")),
        fock=get("verify.fock", 0),
    )
    try:
        regime = RegimeThresholds(
            ordering_factor=get("regime.ordering_factor", 10.0),
            ultrastrong_onset=get("regime.ultrastrong_onset", 0.1),
            dispersive_factor=get("regime.dispersive_factor", 0.1),
            resonant_max_g_ratio=get("regime.resonant_max_g_ratio", 0.1),
        )
    except ValueError as exc:
        raise ConfigError(f"constraint violation: {exc}")

    config = RunConfig(
        command=command,
        params=params,
        trunc=trunc,
        seed=get("seed", DEFAULT_SEED),
        out=get("out", None),
        format=fmt,
        tol=tol,
        build=build,
        evolve=evolve,
        scan=scan,
        verify=verify,
        regime=regime,
    )
    _validate(config)
    return config


def _default_format(command: str) -> str:
    return "csv" if command in ("evolve", "scan") else "json"


def _validate(config: RunConfig) -> None:
    """Constraint checks against the target command, before any computation."""
    c = config
    if c.command == "evolve":
        if c.format != "csv":
            raise ConfigError("constraint violation: evolve emits csv (format = csv)")
        if c.evolve.fock < 0:
            raise ConfigError("constraint violation: evolve.fock >= 0")
        if c.evolve.fock >= c.trunc.n_max:
            raise ConfigError("constraint violation: evolve.fock < trunc.n_max")
        if c.evolve.times is not None:
            if len(c.evolve.times) < 1:
                raise ConfigError("constraint violation: evolve.times non-empty")
            diffs = [b - a for a, b in zip(c.evolve.times, c.evolve.times[1:])]
            if any(d <= 0 for d in diffs):
                raise ConfigError("constraint violation: evolve.times strictly increasing")
        else:
            if c.evolve.t_max <= 0:
                raise ConfigError("constraint violation: evolve.t_max > 0")
            if c.evolve.samples < 2:
                raise ConfigError("constraint violation: evolve.samples >= 2")
        _builder_preconditions(c.evolve.hamiltonian, c)
    elif c.command == "build":
        if c.format != "json":
            raise ConfigError("constraint violation: build emits json (format = json)")
        _builder_preconditions(c.build.hamiltonian, c)
    elif c.command in ("verify", "all-checks"):
        if c.format != "json":
            raise ConfigError(
                f"constraint violation: {c.command} emits json (format = json)"
            )
        if c.command == "verify":
            _verify_preconditions(c)
    elif c.command == "scan":
        if c.scan.kind in ("dispersive", "lamb-dicke"):
            if len(c.scan.etas) < 2:
                raise ConfigError("constraint violation: scan.etas needs >= 2 entries")
            if any(e <= 0 for e in c.scan.etas):
                raise ConfigError("constraint violation: scan.etas > 0")
            if any(b >= a for a, b in zip(c.scan.etas, c.scan.etas[1:])):
                raise ConfigError("constraint violation: scan.etas strictly decreasing")
        else:
            if len(c.scan.n_list) < 2:
                raise ConfigError("constraint violation: scan.n_list needs >= 2 entries")
            if any(n < 1 for n in c.scan.n_list):
                raise ConfigError("constraint violation: scan.n_list >= 1")
            if any(b <= a for a, b in zip(c.scan.n_list, c.scan.n_list[1:])):
                raise ConfigError("constraint violation: scan.n_list strictly increasing")
        if c.scan.k_lowest < 1:
            raise ConfigError("constraint violation: scan.k_lowest >= 1")


def _builder_preconditions(name: str, c: RunConfig) -> None:
    p = c.params
    if name == "resonant" and p.delta != 0.0:
        raise ConfigError("constraint violation: resonant requires delta = 0")
    if name == "rabi-rotated":
        phase = math.remainder(p.phi_l, 2.0 * math.pi)
        if not (abs(phase) <= 1e-12 or abs(abs(phase) - math.pi) <= 1e-12):
            raise ConfigError("constraint violation: rabi-rotated requires phi_l in {0, pi}")


def _verify_preconditions(c: RunConfig) -> None:
    p = c.params
    check = c.verify.check
    if check == "qrm-transform" and (p.phi_l != 0.0 or p.delta != 0.0):
        raise ConfigError("constraint violation: qrm-transform requires phi_l = 0 and delta = 0")
    if check == "guard" and p.eta < 0.3:
        raise ConfigError("constraint violation: guard demonstration requires eta >= 0.3")
    if check == "jc-rabi":
        if abs(p.nu - 2.0 * p.Omega) > 1e-9 * (p.nu + 2.0 * p.Omega):
            raise ConfigError("constraint violation: jc-rabi requires nu = 2*Omega")
        if p.eta <= 0 or p.Omega <= 0:
            raise ConfigError("constraint violation: jc-rabi requires eta > 0 and Omega > 0")
        if c.verify.fock >= c.trunc.n_max - c.trunc.guard:
            raise ConfigError("constraint violation: verify.fock < n_max - guard")


def _emit_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, complex):
        return _format_complex(value)
    if isinstance(value, tuple):
        return ",".join(_emit_value(v) for v in value)
    return str(value)


def emit_config(config: RunConfig) -> str:
    """Serialize a :class:`RunConfig` to the canonical document form.

    Only globally applicable keys plus the active command's section are
    written; ``parse_config(emit_config(c)) == c`` for every valid config.
    """
    c = config
    pairs: list[tuple[str, object]] = [
        ("command", c.command),
        ("nu", c.params.nu),
        ("Omega", c.params.Omega),
        ("eta", c.params.eta),
        ("phi_l", c.params.phi_l),
        ("delta", c.params.delta),
        ("trunc.n_max", c.trunc.n_max),
        ("trunc.guard", c.trunc.guard),
        ("seed", c.seed),
        ("format", c.format),
        ("tol.identity", c.tol.identity),
        ("tol.oracle", c.tol.oracle),
        ("tol.spectral", c.tol.spectral),
        ("tol.min_order", c.tol.min_scaling_order),
    ]
    if c.out is not None:
        pairs.append(("out", c.out))
    if c.command == "build":
        pairs += [
            ("build.hamiltonian", c.build.hamiltonian),
            ("build.include_constant", c.build.include_constant),
        ]
    elif c.command == "evolve":
        pairs += [
            ("evolve.hamiltonian", c.evolve.hamiltonian),
            ("evolve.include_constant", c.evolve.include_constant),
            ("evolve.state", c.evolve.state),
            ("evolve.spin", c.evolve.spin),
            ("evolve.fock", c.evolve.fock),
            ("evolve.alpha", c.evolve.alpha),
            ("evolve.t_max", c.evolve.t_max),
            ("evolve.samples", c.evolve.samples),
        ]
        if c.evolve.times is not None:
            pairs.append(("evolve.times", c.evolve.times))
    elif c.command == "scan":
        pairs += [
            ("scan.kind", c.scan.kind),
            ("scan.etas", c.scan.etas),
            ("scan.n_list", c.scan.n_list),
            ("scan.k_lowest", c.scan.k_lowest),
            ("scan.builder", c.scan.builder),
        ]
    elif c.command == "verify":
        pairs += [
            ("verify.check", c.verify.check),
            ("verify.fock", c.verify.fock),
        ]
    elif c.command == "regime":
        pairs += [
            ("regime.ordering_factor", c.regime.ordering_factor),
            ("regime.ultrastrong_onset", c.regime.ultrastrong_onset),
            ("regime.dispersive_factor", c.regime.dispersive_factor),
            ("regime.resonant_max_g_ratio", c.regime.resonant_max_g_ratio),
        ]
    return "\n".join(f"{key} = {_emit_value(value)}" for key, value in pairs) + "\n"
