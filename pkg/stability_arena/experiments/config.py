"""Experiment documents: JSON with one section per module.

Each section is a pydantic model; ``ExperimentDocument`` ties them together
and runs the checks that need the model gallery (parameter dimension,
legal ranges). A document is normalised into an ``ExperimentConfig``;
``expand_sweep`` turns it into one runnable ``ExperimentInstance`` per
sweep value. Every validation failure surfaces as a ``ConfigError`` naming
the offending key path.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, ValidationInfo, field_validator, model_validator
from pydantic_core import PydanticCustomError

from stability_arena.dominating.quantiles import MIN_REPS
from stability_arena.dominating.tail import DominatingConfig
from stability_arena.engine.annealer import EngineConfig
from stability_arena.engine.params import ParameterSet
from stability_arena.engine.schedule import TauSchedule
from stability_arena.models.base import ChainModel
from stability_arena.models.registry import MODEL_REGISTRY, make_model

__all__ = [
    "ConfigError",
    "DominatingSection",
    "EngineSection",
    "ExperimentConfig",
    "ExperimentDocument",
    "ExperimentInstance",
    "ModelSection",
    "OutputSection",
    "REGISTRY_PATH",
    "SWEEP_KEYS",
    "SetSection",
    "SweepSection",
    "apply_full_scale",
    "expand_sweep",
    "load_experiment_config",
    "load_registry",
    "parse_config",
    "with_seed",
]

REGISTRY_PATH = Path("configs/registry.json")

SweepKey = Literal[
    "set.upper",
    "set.lower",
    "set.window",
    "dominating.delta",
    "engine.k_star",
    "engine.c",
    "engine.algorithm",
]
SWEEP_KEYS: Tuple[str, ...] = SweepKey.__args__

Bound = Union[float, List[float]]

_SECTIONS = ("model", "set", "engine", "dominating", "output")


class ConfigError(ValueError):
    """A config document failed validation; ``key`` is the offending key path."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


def _keyed(key: str, message: str) -> PydanticCustomError:
    """A validator error that names its own key path instead of the validator's location."""
    return PydanticCustomError("config", "{message}", {"key": key, "message": message})


def _broadcast(value: Bound, dim: int) -> Tuple[float, ...]:
    if isinstance(value, list):
        if len(value) != dim:
            raise ValueError(f"expected {dim} values (got {len(value)})")
        return tuple(value)
    return (float(value),) * dim


# ---------- sections ----------
class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ModelSection(_Section):
    id: str = Field(description="Model gallery id, see `arena models`")
    overrides: Dict[str, Any] = Field(default_factory=dict, description="Model constants to override")

    @field_validator("id")
    @classmethod
    def known_model(cls, v: str) -> str:
        if v not in MODEL_REGISTRY:
            raise ValueError(f"unknown model '{v}' (available: {', '.join(MODEL_REGISTRY)})")
        return v

    @model_validator(mode="after")
    def constructible(self) -> "ModelSection":
        try:
            make_model(self.id, self.overrides)
        except (TypeError, ValueError) as e:
            raise _keyed("model.overrides", str(e)) from e
        return self


class SetSection(_Section):
    kind: Literal["box", "grid"] = "box"
    lower: Optional[Bound] = None
    upper: Optional[Bound] = None
    h: float = Field(0.01, gt=0, description="Grid resolution")
    r_nbhd: int = Field(1, ge=1, description="Neighborhood radius in grid steps")
    width: Optional[float] = Field(None, gt=0, description="Window width for set.window sweeps")

    @field_validator("lower", "upper", mode="before")
    @classmethod
    def numeric(cls, v: Any) -> Any:
        if v is None:
            return v
        values = v if isinstance(v, list) else [v]
        if not values or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in values):
            raise ValueError(f"expected a number or a list of numbers (got {v!r})")
        return v

    @field_validator("lower", "upper")
    @classmethod
    def finite(cls, v: Optional[Bound]) -> Optional[Bound]:
        # the searched set must be bounded whatever its kind
        if v is not None and not all(math.isfinite(x) for x in (v if isinstance(v, list) else [v])):
            raise ValueError("parameter set bounds must be finite")
        return v

    def bounds(self, dim: int) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
        return _broadcast(self.lower, dim), _broadcast(self.upper, dim)


class EngineSection(_Section):
    eta: float = Field(0.01, gt=0, description="Metropolis inverse temperature")
    c: float = Field(0.5, gt=0, description="Slope of tau(x) = c f(x) + d")
    d: float = Field(1.0, gt=0, description="Offset of tau(x)")
    k_star: int = Field(1_000_000, ge=1, description="Simulation budget")
    algorithm: Literal["global", "local"] = "global"
    seed: int = Field(0, ge=0, description="Root seed of every substream")


class DominatingSection(_Section):
    delta: float = Field(0.05, gt=0)
    sigma: int = Field(1, ge=1)
    kappa: float = Field(1.0, ge=0)
    phi: Optional[float] = Field(None, gt=0, description="Increment bound; defaults to the model's")
    alpha: float = Field(0.05, gt=0, lt=1)
    n_reps: int = Field(10_000, ge=MIN_REPS, description="W replications behind each quantile")


class SweepSection(_Section):
    key: SweepKey
    values: List[Any] = Field(default_factory=list)


class OutputSection(_Section):
    emit_trajectories: bool = Field(False, description="Write per-replication trajectories and quantile tables")
    workers: int = Field(1, ge=1, description="Worker processes; 1 runs inline")


class ExperimentDocument(_Section):
    model: ModelSection
    parameter_set: SetSection = Field(default_factory=SetSection, alias="set")
    engine: EngineSection = Field(default_factory=EngineSection)
    dominating: DominatingSection = Field(default_factory=DominatingSection)
    output: OutputSection = Field(default_factory=OutputSection)
    replications: int = Field(100, ge=1)
    sweep: Optional[SweepSection] = None
    description: str = ""
    full_scale: Dict[str, Any] = Field(default_factory=dict, description="Overlay applied by --full-scale")

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    @model_validator(mode="after")
    def coherent(self, info: ValidationInfo) -> "ExperimentDocument":
        s = self.parameter_set
        if self.sweep is not None and self.sweep.key == "set.window" and s.width is None:
            raise _keyed("set.width", "a set.window sweep needs set.width")
        if self.engine.algorithm == "local" and s.kind != "grid":
            raise _keyed("set.kind", "local search needs a grid parameter set")
        if s.lower is None or s.upper is None:
            # a sweep may still supply the missing bound; resolved documents must have both
            if info.context and info.context.get("resolved"):
                raise _keyed("set.upper" if s.lower is not None else "set.lower", "missing parameter set bound")
            return self
        self._check_bounds(MODEL_REGISTRY[self.model.id])
        return self

    def _check_bounds(self, cls: type) -> None:
        dim = len(cls.param_bounds)
        s = self.parameter_set
        try:
            lower = _broadcast(s.lower, dim)
        except ValueError as e:
            raise _keyed("set.lower", str(e)) from e
        try:
            upper = _broadcast(s.upper, dim)
        except ValueError as e:
            raise _keyed("set.upper", str(e)) from e
        for i, ((lo, hi), a, b) in enumerate(zip(cls.param_bounds, lower, upper)):
            if not lo <= a <= hi:
                raise _keyed(f"set.lower[{i}]", f"{a} is outside the legal range [{lo}, {hi}] of {cls.model_id}")
            if not lo <= b <= hi:
                raise _keyed(f"set.upper[{i}]", f"{b} is outside the legal range [{lo}, {hi}] of {cls.model_id}")
            if a > b:
                raise _keyed(f"set.lower[{i}]", f"{a} exceeds set.upper[{i}]={b}")


def _dotted(loc: Sequence[Union[str, int]]) -> str:
    parts: List[str] = []
    for p in loc:
        if isinstance(p, int) and parts:
            parts[-1] += f"[{p}]"
        else:
            parts.append(str(p))
    return ".".join(parts)


def _config_error(exc: ValidationError) -> ConfigError:
    err = exc.errors()[0]
    ctx = err.get("ctx") or {}
    return ConfigError(ctx.get("key") or _dotted(err["loc"]), ctx.get("message") or err["msg"])


def validate_document(obj: Dict[str, Any], *, resolved: bool = False) -> ExperimentDocument:
    body = {k: v for k, v in obj.items() if k != "provenance"}
    for section in _SECTIONS:
        body.setdefault(section, {})
    try:
        return ExperimentDocument.model_validate(body, context={"resolved": resolved})
    except ValidationError as e:
        raise _config_error(e) from e


# ---------- configs ----------
@dataclass(frozen=True)
class ExperimentInstance:
    """Everything one instability test needs, for a single sweep value."""
    sweep_value: Any
    model: ChainModel
    pset: ParameterSet
    engine: EngineConfig
    dominating: DominatingConfig
    n_reps: int


@dataclass(frozen=True)
class ExperimentConfig:
    model_id: str
    document: Dict[str, Any] = field(repr=False)
    replications: int = 100
    sweep_key: Optional[str] = None
    sweep_values: tuple = ()
    description: str = ""

    @property
    def seed(self) -> int:
        return int(self.document["engine"]["seed"])

    @property
    def workers(self) -> int:
        return int(self.document["output"]["workers"])

    @property
    def emit_trajectories(self) -> bool:
        return bool(self.document["output"]["emit_trajectories"])

    def to_document(self) -> Dict[str, Any]:
        return copy.deepcopy(self.document)


# ---------- loading ----------
def load_registry(registry_path: Path = REGISTRY_PATH) -> Dict[str, str]:
    return json.loads(Path(registry_path).read_text(encoding="utf-8"))


def _resolve(ref: str | Path, registry_path: Path) -> Path:
    path = Path(ref)
    if path.exists():
        return path
    if Path(registry_path).exists():
        registry = load_registry(registry_path)
        if str(ref) in registry:
            target = Path(registry[str(ref)])
            # registry entries are relative to the repo root that holds configs/
            return target if target.is_absolute() else Path(registry_path).parent.parent / target
    raise FileNotFoundError(f"Config '{ref}' is neither a file nor a preset in {registry_path}")


def parse_config(text: str) -> ExperimentConfig:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("", f"malformed JSON at line {e.lineno} column {e.colno}: {e.msg}") from e
    return load_experiment_config(obj)


def load_experiment_config(
    ref: str | Path | Dict[str, Any],
    registry_path: Path = REGISTRY_PATH,
) -> ExperimentConfig:
    """Read a config from a path, a preset id, or an already-parsed dict."""
    if isinstance(ref, dict):
        obj = ref
    else:
        text = _resolve(ref, registry_path).read_text(encoding="utf-8")
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("", f"malformed JSON in {ref} at line {e.lineno}: {e.msg}") from e
    if not isinstance(obj, dict):
        raise ConfigError("", "a config document must be a JSON object")
    doc = validate_document(obj)
    cfg = ExperimentConfig(
        model_id=doc.model.id,
        document=doc.model_dump(by_alias=True),
        replications=doc.replications,
        sweep_key=doc.sweep.key if doc.sweep else None,
        sweep_values=tuple(doc.sweep.values) if doc.sweep else (),
        description=doc.description,
    )
    # building every instance validates sweep values against the model's ranges
    expand_sweep(cfg)
    return cfg


# ---------- derived documents ----------
def with_seed(cfg: ExperimentConfig, seed: int) -> ExperimentConfig:
    doc = cfg.to_document()
    doc["engine"]["seed"] = int(seed)
    return load_experiment_config(doc)


def apply_full_scale(cfg: ExperimentConfig) -> ExperimentConfig:
    """Overlay the document's ``full_scale`` block (section-wise) and drop it."""
    doc = cfg.to_document()
    overlay = doc.pop("full_scale", {}) or {}
    for key, value in overlay.items():
        if isinstance(value, dict) and isinstance(doc.get(key), dict):
            doc[key].update(value)
        else:
            doc[key] = value
    return load_experiment_config(doc)


# ---------- instances ----------
def _apply_sweep(doc: Dict[str, Any], key: str, value: Any) -> None:
    if key == "set.window":
        width = doc["set"]["width"]
        doc["set"]["lower"] = value
        try:
            doc["set"]["upper"] = [v + width for v in value] if isinstance(value, list) else value + width
        except TypeError as e:
            raise ConfigError("set.lower", f"expected a number or a list of numbers (got {value!r})") from e
        return
    section, name = key.split(".")
    doc[section][name] = value


def _instance(obj: Dict[str, Any], sweep_value: Any) -> ExperimentInstance:
    doc = validate_document(obj, resolved=True)
    model = make_model(doc.model.id, doc.model.overrides)
    lower, upper = doc.parameter_set.bounds(model.param_dim())
    s = doc.parameter_set
    pset = ParameterSet(s.kind, lower, upper, h=s.h, r_nbhd=s.r_nbhd)

    e = doc.engine
    tau = TauSchedule(e.c, e.d)
    engine = EngineConfig(e.eta, tau, e.algorithm, e.seed, e.k_star)

    d = doc.dominating
    phi = model.phi_f() if d.phi is None else d.phi
    dominating = DominatingConfig(d.delta, d.sigma, d.kappa, phi, tau, d.alpha)
    return ExperimentInstance(sweep_value, model, pset, engine, dominating, d.n_reps)


def expand_sweep(cfg: ExperimentConfig) -> List[ExperimentInstance]:
    """One instance per sweep value, or the single base instance without a sweep."""
    if cfg.sweep_key is None:
        return [_instance(cfg.to_document(), None)]
    out = []
    for i, value in enumerate(cfg.sweep_values):
        doc = cfg.to_document()
        try:
            _apply_sweep(doc, cfg.sweep_key, value)
            out.append(_instance(doc, value))
        except ConfigError as e:
            raise ConfigError(f"sweep.values[{i}]", f"{value!r} gives {e}") from e
    return out
