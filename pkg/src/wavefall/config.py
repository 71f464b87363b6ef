"""Scenario configuration: JSON documents validated into typed objects.

A scenario bundles a grid, a tidal matrix, a packet definition and the run
settings; sweep-style experiments add ``masses``, ``shapes`` or ``dt_list``
blocks.  Loading re-validates every module precondition so a bad document
fails before any array is allocated, and unknown keys are rejected
everywhere.  ``resolved()`` returns the full document with defaults
materialized; every CSV/JSON the CLI writes embeds it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .classical import ClassicalState
from .curvature import TidalMatrix
from .errors import ConfigError
from .packets import PacketShape, check_packet_preconditions, make_packet
from .propagate import EvolveConfig, StepScheme, check_kinetic_phase, check_tidal_phase
from .spectral import SpectralGrid

_TOP_KEYS = {"grid", "packet", "curvature", "evolve", "masses", "shapes", "dt_list", "order_band"}
_GRID_KEYS = {"dim", "n", "extent"}
_PACKET_KEYS = {"shape", "params", "x0", "v0", "mass", "table"}
_SHAPE_KEYS = {"shape", "params", "table"}
_CURV_KEYS = {"tidal", "vacuum"}
_EVOLVE_KEYS = {"dt", "steps", "record_every", "scheme",
                "boundary_margin_fraction", "boundary_mass_tol"}

DEFAULT_ORDER_BANDS = {StepScheme.STRANG: (1.8, 2.2), StepScheme.LIE: (0.8, 1.2)}


def _block(doc: dict, name: str, allowed: set, required: tuple) -> dict:
    if name not in doc:
        raise ConfigError(f"missing config block {name!r}")
    block = doc[name]
    if not isinstance(block, dict):
        raise ConfigError(f"config block {name!r} must be an object")
    unknown = sorted(set(block) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {unknown}")
    missing = [k for k in required if k not in block]
    if missing:
        raise ConfigError(f"{name!r} is missing keys: {missing}")
    return block


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    return value


def _vector(value, dim: int, where: str) -> tuple[float, ...]:
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{where} must be a list of {dim} numbers")
    vec = tuple(_number(v, where) for v in value)
    if len(vec) != dim:
        raise ConfigError(f"{where} must have {dim} components, got {len(vec)}")
    return vec


def _parse_shape(block: dict, where: str) -> PacketShape:
    kind = block.get("shape")
    if not isinstance(kind, str):
        raise ConfigError(f"{where}.shape must be a string")
    params = block.get("params", [])
    if not isinstance(params, (list, tuple)):
        raise ConfigError(f"{where}.params must be a list of numbers")
    params = tuple(_number(p, f"{where}.params") for p in params)
    table = block.get("table")
    if table is not None and kind != "custom_table":
        raise ConfigError(f"{where}.table is only valid for custom_table shapes")
    return PacketShape(kind, params, table)


@dataclass(frozen=True, eq=False)
class ScenarioConfig:
    """Validated scenario with builders for its runtime objects."""

    grid: SpectralGrid
    tidal: TidalMatrix
    shape: PacketShape
    x0: tuple[float, ...]
    v0: tuple[float, ...]
    mass: float
    evolve_cfg: EvolveConfig
    scheme: StepScheme
    masses: tuple[float, ...] | None = None
    shapes: tuple[PacketShape, ...] | None = None
    dt_list: tuple[float, ...] | None = None
    order_band: tuple[float, float] | None = None

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config document must be a JSON object")
        unknown = sorted(set(doc) - _TOP_KEYS)
        if unknown:
            raise ConfigError(f"unknown top-level keys: {unknown}")

        gb = _block(doc, "grid", _GRID_KEYS, ("dim", "n", "extent"))
        try:
            grid = SpectralGrid(dim=_integer(gb["dim"], "grid.dim"),
                                n=_integer(gb["n"], "grid.n"),
                                extent=_number(gb["extent"], "grid.extent"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

        cb = _block(doc, "curvature", _CURV_KEYS, ("tidal",))
        entries = np.asarray(cb["tidal"], dtype=float)
        if entries.size != grid.dim ** 2:
            raise ConfigError(
                f"curvature.tidal needs {grid.dim ** 2} entries (row-major), got {entries.size}")
        vacuum = cb.get("vacuum", False)
        if not isinstance(vacuum, bool):
            raise ConfigError("curvature.vacuum must be a boolean")
        tidal = TidalMatrix(entries.reshape(grid.dim, grid.dim), vacuum=vacuum)

        pb = _block(doc, "packet", _PACKET_KEYS, ("shape", "x0", "v0", "mass"))
        shape = _parse_shape(pb, "packet")
        x0 = _vector(pb["x0"], grid.dim, "packet.x0")
        v0 = _vector(pb["v0"], grid.dim, "packet.v0")
        mass = _number(pb["mass"], "packet.mass")

        eb = _block(doc, "evolve", _EVOLVE_KEYS, ("dt", "steps"))
        scheme_name = eb.get("scheme", "strang")
        try:
            scheme = StepScheme(scheme_name)
        except ValueError as exc:
            raise ConfigError(f"evolve.scheme must be 'lie' or 'strang', got {scheme_name!r}") from exc
        try:
            evolve_cfg = EvolveConfig(
                dt=_number(eb["dt"], "evolve.dt"),
                n_steps=_integer(eb["steps"], "evolve.steps"),
                record_every=_integer(eb.get("record_every", 1), "evolve.record_every"),
                boundary_margin_fraction=_number(
                    eb.get("boundary_margin_fraction", 0.1), "evolve.boundary_margin_fraction"),
                boundary_mass_tol=_number(
                    eb.get("boundary_mass_tol", 1e-8), "evolve.boundary_mass_tol"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

        masses = None
        if "masses" in doc:
            if not isinstance(doc["masses"], (list, tuple)):
                raise ConfigError("masses must be a list of numbers")
            masses = tuple(_number(m, "masses") for m in doc["masses"])
        shapes = None
        if "shapes" in doc:
            if not isinstance(doc["shapes"], (list, tuple)):
                raise ConfigError("shapes must be a list of shape objects")
            parsed = []
            for i, entry in enumerate(doc["shapes"]):
                if not isinstance(entry, dict):
                    raise ConfigError(f"shapes[{i}] must be an object")
                bad = sorted(set(entry) - _SHAPE_KEYS)
                if bad:
                    raise ConfigError(f"unknown keys in shapes[{i}]: {bad}")
                parsed.append(_parse_shape(entry, f"shapes[{i}]"))
            shapes = tuple(parsed)
        dt_list = None
        if "dt_list" in doc:
            if not isinstance(doc["dt_list"], (list, tuple)):
                raise ConfigError("dt_list must be a list of numbers")
            dt_list = tuple(_number(v, "dt_list") for v in doc["dt_list"])
        order_band = None
        if "order_band" in doc:
            band = doc["order_band"]
            if not isinstance(band, (list, tuple)) or len(band) != 2:
                raise ConfigError("order_band must be [low, high]")
            order_band = (_number(band[0], "order_band"), _number(band[1], "order_band"))

        cfg = cls(grid=grid, tidal=tidal, shape=shape, x0=x0, v0=v0, mass=mass,
                  evolve_cfg=evolve_cfg, scheme=scheme, masses=masses, shapes=shapes,
                  dt_list=dt_list, order_band=order_band)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        return cls.from_dict(doc)

    def validate(self) -> None:
        """Re-run module preconditions without allocating fields."""
        check_packet_preconditions(self.grid, self.shape, self.x0, self.v0, self.mass)
        for mass in (self.masses or ()):
            check_packet_preconditions(self.grid, self.shape, self.x0, self.v0, mass)
        for shape in (self.shapes or ()):
            if shape.kind != "custom_table":
                check_packet_preconditions(self.grid, shape, self.x0, self.v0, self.mass)
        dts = [self.evolve_cfg.dt] + [float(d) for d in (self.dt_list or ())]
        for dt in dts:
            for mass in (self.mass,) + tuple(self.masses or ()):
                check_kinetic_phase(self.grid, mass, dt)
                check_tidal_phase(self.grid, self.tidal, mass, dt)

    # --- builders ---------------------------------------------------------

    def build_packet(self, mass: float | None = None, shape: PacketShape | None = None):
        return make_packet(self.grid, shape or self.shape, self.x0, self.v0,
                           self.mass if mass is None else mass)

    def classical_state(self) -> ClassicalState:
        return ClassicalState(x=np.asarray(self.x0), v=np.asarray(self.v0))

    def duration(self) -> float:
        return self.evolve_cfg.dt * self.evolve_cfg.n_steps

    def resolved(self) -> dict:
        """Full config document with defaults materialized (for echoing)."""
        def shape_doc(shape: PacketShape) -> dict:
            doc = {"shape": shape.kind, "params": list(shape.params)}
            if shape.table_path is not None:
                doc["table"] = shape.table_path
            return doc

        doc = {
            "grid": {"dim": self.grid.dim, "n": self.grid.n, "extent": self.grid.extent},
            "packet": {**shape_doc(self.shape), "x0": list(self.x0), "v0": list(self.v0),
                       "mass": self.mass},
            "curvature": {"tidal": [float(v) for v in self.tidal.entries.reshape(-1)],
                          "vacuum": self.tidal.vacuum},
            "evolve": {"dt": self.evolve_cfg.dt, "steps": self.evolve_cfg.n_steps,
                       "record_every": self.evolve_cfg.record_every,
                       "scheme": self.scheme.value,
                       "boundary_margin_fraction": self.evolve_cfg.boundary_margin_fraction,
                       "boundary_mass_tol": self.evolve_cfg.boundary_mass_tol},
        }
        if self.masses is not None:
            doc["masses"] = list(self.masses)
        if self.shapes is not None:
            doc["shapes"] = [shape_doc(s) for s in self.shapes]
        if self.dt_list is not None:
            doc["dt_list"] = list(self.dt_list)
        if self.order_band is not None:
            doc["order_band"] = list(self.order_band)
        return doc


def load_scenario(path) -> ScenarioConfig:
    if not Path(path).exists():
        raise ConfigError(f"config file not found: {path}")
    return ScenarioConfig.from_file(path)
