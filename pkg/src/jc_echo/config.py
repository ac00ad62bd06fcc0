"""Run configuration: flat key=value text, presets, and validation.

The config format is deliberately flat (dotted keys, one assignment per
line, ``#`` comments). Unknown keys are hard errors: a silently ignored
typo in a physics parameter is the main user hazard this format guards
against. Preset scenarios pin the parameters they stand for and reject
overrides of locked keys.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .dynamics import IonModeCoupling, MultiIonParams, SystemModel, SystemParams
from .protocol import RamseyParams
from .qspace import (
    CoherentState,
    DensityMatrix,
    FieldStateSpec,
    FieldSuperposition,
    FockState,
    HilbertLayout,
    build_layout,
    make_state,
)

__all__ = [
    "ConfigError",
    "SweepSpec",
    "RunConfig",
    "load_config",
    "preset_names",
    "preset_configs",
]


class ConfigError(ValueError):
    """Malformed, inconsistent, or locked-override configuration."""


SCENARIOS = (
    "fig1a",
    "fig1b",
    "fig2a",
    "fig2b",
    "kick_robustness",
    "multi_ion_echo",
    "custom",
)

SWEEP_VARIABLES = ("gT", "kappa_over_g", "epsilon", "tau_fraction")

VALID_KEYS = frozenset(
    {
        "scenario",
        "params.omega",
        "params.kappa_over_g",
        "params.n_max",
        "initial.qubit",
        "initial.field",
        "initial.variant",
        "schedule.tau_fraction",
        "schedule.t_free",
        "schedule.kick_epsilon",
        "schedule.ramsey",
        "schedule.ramsey_phi",
        "schedule.ramsey_zeta",
        "sweep.variable",
        "sweep.lo",
        "sweep.hi",
        "sweep.n_points",
        "sweep.fixed_gt",
        "propagator",
        "perturbative",
        "output",
    }
)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    lo: float
    hi: float
    n_points: int


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one sweep run."""

    scenario: str
    omega: float
    kappa_over_g: float
    n_max: int
    qubit_levels: str
    fieldstate: FieldStateSpec | None
    tau_fraction: float
    t_free: float
    kick_epsilon: float
    ramsey: RamseyParams | None
    sweep: SweepSpec
    fixed_g_t: float
    propagator: str
    perturbative: bool
    output: str | None
    multi_ion: MultiIonParams | None = None

    def layout(self) -> HilbertLayout:
        return build_layout(len(self.qubit_levels), self.n_max)

    def model(self, kappa_over_g: float | None = None) -> SystemModel:
        kappa = self.kappa_over_g if kappa_over_g is None else kappa_over_g
        if self.multi_ion is not None:
            return SystemModel.from_multi_ion(self.multi_ion, self.layout(), kappa=kappa)
        return SystemModel.from_params(
            SystemParams(layout=self.layout(), omega=self.omega, kappa=kappa)
        )

    def initial_state(self) -> DensityMatrix | None:
        if self.fieldstate is None:
            return None
        return make_state(self.layout(), self.qubit_levels, self.fieldstate)


def parse_config_text(text: str) -> dict[str, str]:
    """key = value lines into an ordered mapping; duplicates are errors."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in mapping:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        mapping[key] = value
    return mapping


def _parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"key {key!r}: expected a number, got {value!r}") from None


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"key {key!r}: expected an integer, got {value!r}") from None


def _parse_switch(key: str, value: str) -> bool:
    if value == "on":
        return True
    if value == "off":
        return False
    raise ConfigError(f"key {key!r}: expected 'on' or 'off', got {value!r}")


def _parse_complex(key: str, value: str) -> complex:
    try:
        return complex(value.replace(" ", ""))
    except ValueError:
        raise ConfigError(f"key {key!r}: expected a complex number, got {value!r}") from None


def _parse_field(key: str, value: str) -> FieldStateSpec:
    kind, _, rest = value.partition(":")
    if kind == "fock":
        return FockState(_parse_int(key, rest))
    if kind == "coherent":
        return CoherentState(_parse_complex(key, rest))
    if kind == "super":
        terms = []
        for item in rest.split(","):
            n_text, _, amp_text = item.partition(":")
            if not amp_text:
                raise ConfigError(
                    f"key {key!r}: superposition terms look like n:amplitude, got {item!r}"
                )
            terms.append((_parse_int(key, n_text), _parse_complex(key, amp_text)))
        try:
            return FieldSuperposition(tuple(terms))
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: {exc}") from None
    raise ConfigError(
        f"key {key!r}: field state must be fock:N, coherent:C, or super:N:C,...; got {value!r}"
    )


# Initial field states of the lettered scenarios. Normalization is applied
# on realization, so (|2> + i|3>)/sqrt(2) is just "super:2:1,3:1j"; the
# coherent alpha exp(i pi/4)/sqrt(2) is exactly 0.5+0.5j.
_FIG1B_VARIANTS = {
    "superposition": "super:2:1,3:1j",
    "fock2": "fock:2",
    "coherent": "coherent:0.5+0.5j",
}

_PI_OVER_4 = repr(math.pi / 4)


@dataclass(frozen=True)
class _Preset:
    base: dict[str, str]
    locked: frozenset[str]
    kappa_choices: tuple[float, ...] | None = None


_COMMON_DEFAULTS = {
    "params.omega": "0",
    "params.kappa_over_g": "0",
    "params.n_max": "15",
    "initial.qubit": "g",
    "schedule.tau_fraction": "0.5",
    "schedule.t_free": "0",
    "schedule.kick_epsilon": "0",
    "schedule.ramsey": "off",
    "schedule.ramsey_zeta": "0",
    "sweep.variable": "gT",
    "sweep.lo": "0",
    "sweep.hi": "25",
    "sweep.n_points": "501",
    "sweep.fixed_gt": "10",
    "propagator": "oracle",
    "perturbative": "off",
}

_SCHEDULE_LOCK = frozenset(
    {
        "schedule.tau_fraction",
        "schedule.t_free",
        "schedule.kick_epsilon",
        "schedule.ramsey",
        "schedule.ramsey_phi",
        "schedule.ramsey_zeta",
    }
)

_PRESETS: dict[str, _Preset] = {
    "fig1a": _Preset(
        base={
            "params.kappa_over_g": "0.05",
            "initial.field": "fock:3",
            "perturbative": "on",
        },
        locked=frozenset(
            {"params.omega", "initial.qubit", "initial.field", "initial.variant",
             "sweep.variable", "perturbative"}
        )
        | _SCHEDULE_LOCK,
        kappa_choices=(0.01, 0.05, 0.1),
    ),
    "fig1b": _Preset(
        base={
            "params.kappa_over_g": "0.05",
            "initial.variant": "superposition",
        },
        locked=frozenset(
            {"params.omega", "params.kappa_over_g", "initial.qubit", "initial.field",
             "sweep.variable", "perturbative"}
        )
        | _SCHEDULE_LOCK,
    ),
    "fig2a": _Preset(
        base={
            "params.omega": "10",
            "params.kappa_over_g": "0.05",
            "initial.field": "super:2:1,3:1j",
            "schedule.ramsey": "on",
            "schedule.ramsey_phi": _PI_OVER_4,
        },
        locked=frozenset(
            {"params.omega", "params.kappa_over_g", "initial.qubit", "initial.field",
             "initial.variant", "sweep.variable", "perturbative"}
        )
        | _SCHEDULE_LOCK,
    ),
    "fig2b": _Preset(
        base={
            "params.omega": "10",
            "params.kappa_over_g": "0.05",
            "initial.field": "coherent:0.5+0.5j",
            "schedule.ramsey": "on",
            "schedule.ramsey_phi": _PI_OVER_4,
        },
        locked=frozenset(
            {"params.omega", "params.kappa_over_g", "initial.qubit", "initial.field",
             "initial.variant", "sweep.variable", "perturbative"}
        )
        | _SCHEDULE_LOCK,
    ),
    "kick_robustness": _Preset(
        base={
            "sweep.variable": "epsilon",
            "sweep.lo": "-0.1",
            "sweep.hi": "0.1",
            "sweep.n_points": "41",
        },
        locked=frozenset(
            {"params.omega", "params.kappa_over_g", "initial.qubit", "initial.field",
             "initial.variant", "sweep.variable", "perturbative"}
        )
        | _SCHEDULE_LOCK,
    ),
    "multi_ion_echo": _Preset(
        base={
            "params.kappa_over_g": "0.05",
            "params.n_max": "7",
            "initial.qubit": "gg",
            "initial.field": "fock:1",
        },
        locked=frozenset(
            {"params.omega", "initial.qubit", "initial.field", "initial.variant",
             "sweep.variable", "perturbative"}
        )
        | _SCHEDULE_LOCK,
    ),
}

# One shared mode, both ions driven identically; nu = g keeps the free
# rotation harmless to the measured ground population.
_MULTI_ION = MultiIonParams(
    n_ions=2,
    couplings=(IonModeCoupling(ion=0, mode_frequency=1.0, rabi_frequency=1.0),),
    addressing="homogeneous",
)


def preset_names() -> tuple[str, ...]:
    return tuple(_PRESETS)


def _merge_preset(scenario: str, overrides: dict[str, str]) -> dict[str, str]:
    preset = _PRESETS[scenario]
    merged = dict(_COMMON_DEFAULTS)
    merged.update(preset.base)
    merged["scenario"] = scenario
    for key, value in overrides.items():
        if key == "scenario":
            continue
        if key in preset.locked and value != merged.get(key):
            raise ConfigError(f"preset {scenario!r} locks key {key!r}")
        merged[key] = value
    return merged


def _build_config(mapping: dict[str, str]) -> RunConfig:
    unknown = set(mapping) - VALID_KEYS
    if unknown:
        raise ConfigError(f"unknown config key: {sorted(unknown)[0]!r}")
    scenario = mapping.get("scenario", "custom")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {SCENARIOS}")

    omega = _parse_float("params.omega", mapping.get("params.omega", "0"))
    kappa = _parse_float("params.kappa_over_g", mapping.get("params.kappa_over_g", "0"))
    n_max = _parse_int("params.n_max", mapping.get("params.n_max", "15"))
    if omega < 0 or kappa < 0:
        raise ConfigError("params.omega and params.kappa_over_g must be >= 0")
    if n_max < 1:
        raise ConfigError(f"params.n_max must be >= 1, got {n_max}")

    preset = _PRESETS.get(scenario)
    if preset is not None and preset.kappa_choices is not None:
        if kappa not in preset.kappa_choices:
            raise ConfigError(
                f"preset {scenario!r} allows params.kappa_over_g in "
                f"{preset.kappa_choices}, got {kappa}"
            )

    qubit_levels = mapping.get("initial.qubit", "g")
    if not qubit_levels or any(c not in "ge" for c in qubit_levels):
        raise ConfigError(f"initial.qubit must be letters g/e, got {qubit_levels!r}")

    fieldstate: FieldStateSpec | None = None
    if scenario == "fig1b":
        variant = mapping.get("initial.variant", "superposition")
        if variant not in _FIG1B_VARIANTS:
            raise ConfigError(
                f"initial.variant must be one of {sorted(_FIG1B_VARIANTS)}, got {variant!r}"
            )
        fieldstate = _parse_field("initial.field", _FIG1B_VARIANTS[variant])
    elif scenario == "kick_robustness":
        fieldstate = None  # internal test set {|g,n>: n=1..5}
    elif "initial.field" in mapping:
        fieldstate = _parse_field("initial.field", mapping["initial.field"])
    elif scenario == "custom":
        raise ConfigError("scenario 'custom' requires key 'initial.field'")

    tau_fraction = _parse_float(
        "schedule.tau_fraction", mapping.get("schedule.tau_fraction", "0.5")
    )
    if not 0.0 <= tau_fraction <= 1.0:
        raise ConfigError(f"schedule.tau_fraction must be in [0, 1], got {tau_fraction}")
    t_free = _parse_float("schedule.t_free", mapping.get("schedule.t_free", "0"))
    if t_free < 0:
        raise ConfigError(f"schedule.t_free must be >= 0, got {t_free}")
    kick_epsilon = _parse_float(
        "schedule.kick_epsilon", mapping.get("schedule.kick_epsilon", "0")
    )

    ramsey = None
    if _parse_switch("schedule.ramsey", mapping.get("schedule.ramsey", "off")):
        if "schedule.ramsey_phi" not in mapping:
            raise ConfigError("schedule.ramsey = on requires key 'schedule.ramsey_phi'")
        ramsey = RamseyParams(
            phi=_parse_float("schedule.ramsey_phi", mapping["schedule.ramsey_phi"]),
            zeta=_parse_float("schedule.ramsey_zeta", mapping.get("schedule.ramsey_zeta", "0")),
        )

    variable = mapping.get("sweep.variable", "gT")
    if variable not in SWEEP_VARIABLES:
        raise ConfigError(
            f"sweep.variable must be one of {SWEEP_VARIABLES}, got {variable!r}"
        )
    lo = _parse_float("sweep.lo", mapping.get("sweep.lo", "0"))
    hi = _parse_float("sweep.hi", mapping.get("sweep.hi", "25"))
    n_points = _parse_int("sweep.n_points", mapping.get("sweep.n_points", "501"))
    if not lo < hi:
        raise ConfigError(f"sweep range needs lo < hi, got [{lo}, {hi}]")
    if n_points < 2:
        raise ConfigError(f"sweep.n_points must be >= 2, got {n_points}")
    if variable in ("gT", "kappa_over_g") and lo < 0:
        raise ConfigError(f"sweep.lo must be >= 0 for {variable} sweeps")
    if variable == "tau_fraction" and not (0.0 <= lo and hi <= 1.0):
        raise ConfigError("tau_fraction sweeps must stay inside [0, 1]")
    fixed_g_t = _parse_float("sweep.fixed_gt", mapping.get("sweep.fixed_gt", "10"))
    if fixed_g_t < 0:
        raise ConfigError(f"sweep.fixed_gt must be >= 0, got {fixed_g_t}")

    propagator = mapping.get("propagator", "oracle")
    if propagator not in ("stepper", "oracle"):
        raise ConfigError(f"propagator must be 'stepper' or 'oracle', got {propagator!r}")

    perturbative = _parse_switch("perturbative", mapping.get("perturbative", "off"))
    if perturbative:
        if variable not in ("gT", "kappa_over_g"):
            raise ConfigError(
                "perturbative column is defined for gT or kappa_over_g sweeps only"
            )
        if not isinstance(fieldstate, (FockState, CoherentState)):
            raise ConfigError(
                "perturbative column needs a diagonal or coherent initial field state"
            )

    multi_ion = _MULTI_ION if scenario == "multi_ion_echo" else None
    if multi_ion is not None and len(qubit_levels) != multi_ion.n_ions:
        raise ConfigError("multi_ion_echo uses two ions; initial.qubit must have length 2")

    return RunConfig(
        scenario=scenario,
        omega=omega,
        kappa_over_g=kappa,
        n_max=n_max,
        qubit_levels=qubit_levels,
        fieldstate=fieldstate,
        tau_fraction=tau_fraction,
        t_free=t_free,
        kick_epsilon=kick_epsilon,
        ramsey=ramsey,
        sweep=SweepSpec(variable=variable, lo=lo, hi=hi, n_points=n_points),
        fixed_g_t=fixed_g_t,
        propagator=propagator,
        perturbative=perturbative,
        output=mapping.get("output"),
        multi_ion=multi_ion,
    )


def load_config(source: str | Path) -> RunConfig:
    """Build a RunConfig from a file path or inline key=value text."""
    if isinstance(source, Path) or ("=" not in source and "\n" not in source):
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text(encoding="utf-8")
    else:
        text = str(source)
    mapping = parse_config_text(text)
    scenario = mapping.get("scenario", "custom")
    if scenario in _PRESETS:
        mapping = _merge_preset(scenario, mapping)
    return _build_config(mapping)


def preset_configs(
    name: str, kappa_over_g: float | None = None
) -> list[tuple[str, RunConfig]]:
    """(canonical csv filename, config) pairs for one preset invocation.

    fig1a expands to all three decay ratios unless one is requested;
    fig1b expands to its three initial states. The filenames are the
    contract the plotting frontend resolves against a data directory.
    """
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {preset_names()}")
    overrides: dict[str, str] = {}
    if kappa_over_g is not None:
        overrides["params.kappa_over_g"] = repr(kappa_over_g)

    if name == "fig1a":
        kappas = (kappa_over_g,) if kappa_over_g is not None else _PRESETS[name].kappa_choices
        out = []
        for k in kappas:
            mapping = _merge_preset(name, {"params.kappa_over_g": repr(k)})
            out.append((f"fig1a_kappa_{k:g}.csv", _build_config(mapping)))
        return out
    if name == "fig1b":
        out = []
        for variant in ("superposition", "fock2", "coherent"):
            mapping = _merge_preset(name, {**overrides, "initial.variant": variant})
            out.append((f"fig1b_{variant}.csv", _build_config(mapping)))
        return out
    mapping = _merge_preset(name, overrides)
    return [(f"{name}.csv", _build_config(mapping))]
