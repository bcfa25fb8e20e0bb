"""JSON run configuration: circuit, Fock space and numerics blocks."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
import json

from .errors import KerrCatError
from .evolve import METHODS, PropagationSpec
from .fock import DEFAULT_DIMS, FockSpace
from .params import CircuitDesign, SubsystemDesign

SUBSYSTEM_KEYS = {
    "shunt_capacitance_ff": "shunt_capacitance",
    "junction_capacitance_ff": "junction_capacitance",
    "squid_count": "squid_count",
    "josephson_energy_ghz": "josephson_energy",
    "bias_flux_over_2pi": "bias_flux",
    "pump_amplitude": "pump_amplitude",
}
CIRCUIT_KEYS = {"qubit1", "qubit2", "coupler", "c12_ff", "c1c_ff", "c2c_ff", "pump_frequency_ghz"}
SPACE_KEYS = {"dims", "convergence_check"}
NUMERICS_KEYS = {"rel_tol", "abs_tol", "method", "step"}
TOP_KEYS = {"circuit", "space", "numerics", "experiment"}


class ConfigError(KerrCatError, ValueError):
    pass


def _check_keys(block: dict, allowed: set, required: set, where: str):
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(block) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = required - set(block)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")


@dataclass
class RunConfig:
    design: CircuitDesign
    dims: tuple[int, int, int] = DEFAULT_DIMS
    convergence_check: bool = False
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    method: str = "adaptive"
    step: float = 1e-3
    experiment: dict = field(default_factory=dict)

    @property
    def space(self) -> FockSpace:
        return FockSpace(self.dims)

    def propagation_spec(self) -> PropagationSpec:
        return PropagationSpec(rel_tol=self.rel_tol, abs_tol=self.abs_tol, method=self.method, step=self.step)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        _check_keys(data, TOP_KEYS, {"circuit"}, "config")
        circuit = data["circuit"]
        _check_keys(circuit, CIRCUIT_KEYS, CIRCUIT_KEYS, "circuit")
        subs = {}
        for name in ("qubit1", "qubit2", "coupler"):
            block = circuit[name]
            _check_keys(block, set(SUBSYSTEM_KEYS), set(SUBSYSTEM_KEYS), f"circuit.{name}")
            subs[name] = SubsystemDesign(**{SUBSYSTEM_KEYS[k]: v for k, v in block.items()})
        design = CircuitDesign(
            **subs,
            c12=circuit["c12_ff"],
            c1c=circuit["c1c_ff"],
            c2c=circuit["c2c_ff"],
            pump_frequency=circuit["pump_frequency_ghz"],
        )
        space = data.get("space", {})
        _check_keys(space, SPACE_KEYS, set(), "space")
        numerics = data.get("numerics", {})
        _check_keys(numerics, NUMERICS_KEYS, set(), "numerics")
        if numerics.get("method", "adaptive") not in METHODS:
            raise ConfigError(f"numerics.method must be one of {METHODS}")
        cfg = cls(
            design=design,
            dims=tuple(space.get("dims", DEFAULT_DIMS)),
            convergence_check=bool(space.get("convergence_check", False)),
            rel_tol=float(numerics.get("rel_tol", 1e-12)),
            abs_tol=float(numerics.get("abs_tol", 1e-14)),
            method=numerics.get("method", "adaptive"),
            step=float(numerics.get("step", 1e-3)),
            experiment=dict(data.get("experiment", {})),
        )
        try:
            cfg.space
            cfg.propagation_spec()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return cfg

    def to_dict(self) -> dict:
        inverse = {v: k for k, v in SUBSYSTEM_KEYS.items()}

        def sub(s: SubsystemDesign):
            return {inverse[k]: getattr(s, k) for k in inverse}

        d = self.design
        return {
            "circuit": {
                "qubit1": sub(d.qubit1),
                "qubit2": sub(d.qubit2),
                "coupler": sub(d.coupler),
                "c12_ff": d.c12,
                "c1c_ff": d.c1c,
                "c2c_ff": d.c2c,
                "pump_frequency_ghz": d.pump_frequency,
            },
            "space": {"dims": list(self.dims), "convergence_check": self.convergence_check},
            "numerics": {"rel_tol": self.rel_tol, "abs_tol": self.abs_tol, "method": self.method, "step": self.step},
            "experiment": dict(self.experiment),
        }


def loads(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    try:
        return RunConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def load(path) -> RunConfig:
    with open(path) as fh:
        return loads(fh.read())


def dumps(cfg: RunConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True)


def table1_config() -> RunConfig:
    """The bundled reference design (``kerrcat/data/table1.json``)."""
    return loads(resources.files("kerrcat").joinpath("data/table1.json").read_text())
