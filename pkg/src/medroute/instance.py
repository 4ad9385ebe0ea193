"""Problem data model, JSON instance format and validation.

Node indexing convention used everywhere downstream: matrix row/column 0 is the
depot, row/column ``k`` (k >= 1) is the site whose id is ``k``.  The depot keeps
its own public id (``depot_id``, e.g. 29) for display only.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field, fields, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import InfeasibleError, ParseError, ValidationError

DOOR_FACTORS = (0.25, 0.5, 1.0, 1.5, 2.0)


class Scenario(str, Enum):
    GENERAL = "general"
    COVID = "covid"


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.field}: [{self.rule}] {self.detail}".rstrip()


@dataclass(frozen=True)
class Site:
    id: int
    demand_q: float
    service_time: float
    x: float | None = None
    y: float | None = None


@dataclass(frozen=True)
class EdgeRiskProfile:
    """Hazard data for one directed road segment (units: km, h, km^2, CNY)."""

    accident_rate_q: float
    leak_given_accident: float
    length_L: float
    speed_v: float
    area_water_A1: float
    area_air_A2: float
    area_soil_A3: float
    sherwood_th1: float
    sherwood_th2: float
    sherwood_th3: float
    harm_level_hm: float
    fatal_rate_delta: float
    impact_radius_lambda: float
    pop_density_beta: float
    segment_area_S: float
    impacted_area_Sm: float
    personal_value_V1: float
    public_value_V2: float
    damage_severity_gamma: float


RISK_FIELDS = tuple(f.name for f in fields(EdgeRiskProfile))
_PROBABILITY_FIELDS = ("leak_given_accident", "fatal_rate_delta", "damage_severity_gamma")


@dataclass(frozen=True)
class CovidParams:
    """Low-temperature sterilization parameters; defaults are the case-study estimates."""

    deterioration_eps: float = 0.08
    conductivity_Rc: float = 2.5
    body_surface_S: float = 59.12
    delta_T: float = 20.0
    unit_cooling_Uc: float = 0.5
    carriage_volume_Vol: float = 26.78
    door_factor_tau: float = 2.0
    night_t0: float = 18.0
    night_tR: float = 24.0


@dataclass(frozen=True)
class FleetParams:
    num_vehicles_H: int
    capacity_Q: float
    fixed_cost_Ch: float = 120.0
    unit_transport_cost_Cij: float = 20.0
    penalty_M: float = 1000.0
    window_t0: float = 8.0
    window_tR: float = 18.0
    depart_T0: float = 8.0
    # per-vehicle duty limit; None means the window end doubles as the limit
    duty_end_TR: float | None = None
    transport_mode: str = "literal"
    covid: CovidParams | None = None


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    sites: tuple[Site, ...]
    depot_id: int
    distance_D: np.ndarray
    travel_time_t: np.ndarray
    risk: Mapping[tuple[int, int], EdgeRiskProfile]
    fleet: FleetParams
    scenario: Scenario = Scenario.GENERAL
    depot_xy: tuple[float, float] | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(sorted(self.sites, key=lambda s: s.id)))
        object.__setattr__(self, "distance_D", _readonly(self.distance_D))
        object.__setattr__(self, "travel_time_t", _readonly(self.travel_time_t))
        object.__setattr__(self, "risk", dict(self.risk))
        object.__setattr__(self, "scenario", Scenario(self.scenario))

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return (
            self.sites == other.sites
            and self.depot_id == other.depot_id
            and self.distance_D.shape == other.distance_D.shape
            and np.array_equal(self.distance_D, other.distance_D)
            and np.array_equal(self.travel_time_t, other.travel_time_t)
            and self.risk == other.risk
            and self.fleet == other.fleet
            and self.scenario == other.scenario
            and self.depot_xy == other.depot_xy
            and self.name == other.name
        )

    __hash__ = None

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    @property
    def covid(self) -> CovidParams:
        return self.fleet.covid or CovidParams()

    @property
    def effective_fleet(self) -> FleetParams:
        """Fleet parameters with the penalty window the scenario actually enforces."""
        if self.scenario is Scenario.COVID:
            c = self.covid
            return replace(self.fleet, window_t0=c.night_t0, window_tR=c.night_tR)
        return self.fleet

    @property
    def duty_end(self) -> float:
        f = self.effective_fleet
        return f.window_tR if f.duty_end_TR is None else f.duty_end_TR

    def site(self, site_id: int) -> Site:
        return self.sites[site_id - 1]

    def label(self, node: int) -> int:
        """Public id of a matrix index."""
        return self.depot_id if node == 0 else node

    @property
    def total_demand(self) -> float:
        return float(sum(s.demand_q for s in self.sites))


# ---------------------------------------------------------------------------
# validation


def validate_instance(inst: ProblemInstance) -> list[Violation]:
    """Return every invariant violation of ``inst``; empty means valid."""
    out: list[Violation] = []
    n = inst.n_sites
    fleet = inst.fleet

    ids = [s.id for s in inst.sites]
    if ids != list(range(1, n + 1)):
        out.append(Violation("sites", "site_ids", f"ids must be exactly 1..{n}, got {ids}"))
    if 1 <= inst.depot_id <= n:
        out.append(Violation("depot_id", "depot_distinct", f"{inst.depot_id} collides with a site id"))
    for k, s in enumerate(inst.sites):
        if not s.demand_q >= 0:
            out.append(Violation(f"sites[{k}].demand_q", "nonnegative_demand", f"{s.demand_q}"))
        if not s.service_time >= 0:
            out.append(Violation(f"sites[{k}].service_time", "nonnegative_service", f"{s.service_time}"))
        if s.demand_q > fleet.capacity_Q:
            out.append(
                Violation(
                    f"sites[{k}].demand_q",
                    "demand_within_capacity",
                    f"{s.demand_q} exceeds vehicle capacity {fleet.capacity_Q}",
                )
            )

    shape = (n + 1, n + 1)
    for name in ("distance_D", "travel_time_t"):
        m = getattr(inst, name)
        if m.shape != shape:
            out.append(Violation(name, "matrix_shape", f"expected {shape}, got {m.shape}"))
            continue
        bad = ~np.isfinite(m)
        for a, b in zip(*np.nonzero(bad)):
            out.append(Violation(f"{name}[{a}][{b}]", "finite", "entry is not a finite number"))
        for a, b in zip(*np.nonzero(m < 0)):
            out.append(Violation(f"{name}[{a}][{b}]", "nonnegative_matrix", f"{m[a, b]} < 0"))
    if inst.distance_D.shape == shape:
        for a in np.nonzero(np.diag(inst.distance_D) != 0)[0]:
            out.append(Violation(f"distance_D[{a}][{a}]", "zero_diagonal", f"{inst.distance_D[a, a]}"))

    for a in range(n + 1):
        for b in range(n + 1):
            if a == b:
                continue
            where = f"risk[{inst.label(a)}->{inst.label(b)}]"
            prof = inst.risk.get((a, b))
            if prof is None:
                out.append(Violation(where, "risk_profile_present", "no risk profile for edge"))
                continue
            out.extend(_check_profile(prof, where))
            if inst.travel_time_t.shape == shape and prof.speed_v > 0:
                t = inst.travel_time_t[a, b]
                if abs(t - prof.length_L / prof.speed_v) > 1e-6:
                    out.append(
                        Violation(
                            f"travel_time_t[{a}][{b}]",
                            "travel_time_consistent",
                            f"{t} differs from L/v = {prof.length_L / prof.speed_v}",
                        )
                    )

    out.extend(_check_fleet(fleet, inst))
    if inst.scenario is Scenario.COVID:
        out.extend(_check_covid(inst.covid))
    elif fleet.covid is not None:
        out.extend(_check_covid(fleet.covid))

    cap = fleet.num_vehicles_H * fleet.capacity_Q
    if inst.total_demand > cap:
        out.append(
            Violation("sites", "fleet_capacity", f"total demand {inst.total_demand} exceeds H*Q = {cap}")
        )
    return out


def _check_profile(p: EdgeRiskProfile, where: str) -> list[Violation]:
    out = []
    for name in RISK_FIELDS:
        v = getattr(p, name)
        if not math.isfinite(v) or v < 0:
            out.append(Violation(f"{where}.{name}", "nonnegative_risk_field", f"{v}"))
    for name in _PROBABILITY_FIELDS:
        v = getattr(p, name)
        if v > 1:
            out.append(Violation(f"{where}.{name}", "probability_range", f"{v} not in [0, 1]"))
    if not p.speed_v > 0:
        out.append(Violation(f"{where}.speed_v", "positive_speed", f"{p.speed_v}"))
    if p.impacted_area_Sm > p.segment_area_S:
        out.append(
            Violation(
                f"{where}.impacted_area_Sm",
                "impacted_area_within_segment",
                f"{p.impacted_area_Sm} > segment area {p.segment_area_S}",
            )
        )
    return out


def _check_fleet(f: FleetParams, inst: ProblemInstance) -> list[Violation]:
    out = []
    if f.num_vehicles_H < 1:
        out.append(Violation("fleet.num_vehicles_H", "at_least_one_vehicle", f"{f.num_vehicles_H}"))
    if not f.capacity_Q > 0:
        out.append(Violation("fleet.capacity_Q", "positive_capacity", f"{f.capacity_Q}"))
    for name in ("fixed_cost_Ch", "unit_transport_cost_Cij"):
        if getattr(f, name) < 0:
            out.append(Violation(f"fleet.{name}", "nonnegative_cost", f"{getattr(f, name)}"))
    if f.window_t0 > f.window_tR:
        out.append(Violation("fleet.window_t0", "window_order", f"{f.window_t0} > {f.window_tR}"))
    if f.transport_mode not in ("literal", "load_weighted"):
        out.append(Violation("fleet.transport_mode", "transport_mode", f"unknown mode {f.transport_mode!r}"))
    if not f.penalty_M > 0:
        out.append(Violation("fleet.penalty_M", "positive_penalty", f"{f.penalty_M}"))
    elif inst.distance_D.size and np.all(np.isfinite(inst.distance_D)):
        worst_edge = f.unit_transport_cost_Cij * float(inst.distance_D.max())
        if f.penalty_M <= worst_edge:
            out.append(
                Violation(
                    "fleet.penalty_M",
                    "penalty_dominates",
                    f"M={f.penalty_M} must exceed the costliest edge {worst_edge}",
                )
            )
    return out


def _check_covid(c: CovidParams) -> list[Violation]:
    out = []
    for name in (
        "deterioration_eps",
        "conductivity_Rc",
        "body_surface_S",
        "delta_T",
        "unit_cooling_Uc",
        "carriage_volume_Vol",
    ):
        if not getattr(c, name) > 0:
            out.append(Violation(f"fleet.covid.{name}", "positive_parameter", f"{getattr(c, name)}"))
    if c.door_factor_tau not in DOOR_FACTORS:
        out.append(
            Violation("fleet.covid.door_factor_tau", "door_factor_set", f"{c.door_factor_tau} not in {DOOR_FACTORS}")
        )
    if c.night_t0 > c.night_tR:
        out.append(Violation("fleet.covid.night_t0", "window_order", f"{c.night_t0} > {c.night_tR}"))
    return out


# ---------------------------------------------------------------------------
# JSON (de)serialisation


def _matrix(raw, name: str, size: int) -> np.ndarray:
    try:
        m = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{name}: not a numeric matrix ({exc})") from exc
    if m.shape != (size, size):
        raise ValidationError([Violation(name, "matrix_shape", f"expected {(size, size)}, got {m.shape}")])
    return m


def _build(cls, raw: Mapping, where: str, **extra):
    if not isinstance(raw, Mapping):
        raise ParseError(f"{where}: expected an object")
    known = {f.name for f in fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ParseError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        return cls(**{**raw, **extra})
    except TypeError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def instance_from_dict(data: Mapping, name: str = "") -> ProblemInstance:
    """Build an instance from the decoded JSON document (no invariant checks)."""
    if not isinstance(data, Mapping):
        raise ParseError("instance document must be a JSON object")
    for key in ("sites", "depot_id", "distance", "fleet"):
        if key not in data:
            raise ParseError(f"missing required key {key!r}")
    try:
        sites = tuple(
            Site(
                id=int(s["id"]),
                demand_q=float(s["demand"]),
                service_time=float(s.get("service_time", 0.0)),
                x=None if s.get("x") is None else float(s["x"]),
                y=None if s.get("y") is None else float(s["y"]),
            )
            for s in data["sites"]
        )
        depot_id = int(data["depot_id"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"sites: {exc!r}") from exc
    sites = tuple(sorted(sites, key=lambda s: s.id))
    n = len(sites)
    size = n + 1
    ids = [s.id for s in sites]
    if ids != list(range(1, n + 1)):
        raise ValidationError([Violation("sites", "site_ids", f"ids must be exactly 1..{n}, got {ids}")])

    try:
        scenario = Scenario(data.get("scenario", "general"))
    except ValueError as exc:
        raise ParseError(f"scenario: {exc}") from exc

    fleet_raw = dict(data["fleet"])
    covid_raw = fleet_raw.pop("covid", None)
    covid = _build(CovidParams, covid_raw, "fleet.covid") if covid_raw is not None else None
    if covid is None and scenario is Scenario.COVID:
        covid = CovidParams()
    if "depart_T0" not in fleet_raw:
        if scenario is Scenario.COVID:
            fleet_raw["depart_T0"] = covid.night_t0
        else:
            fleet_raw["depart_T0"] = fleet_raw.get("window_t0", FleetParams.window_t0)
    fleet = _build(FleetParams, fleet_raw, "fleet", covid=covid)

    dist = _matrix(data["distance"], "distance", size)
    ttime = _matrix(data["travel_time"], "travel_time", size) if data.get("travel_time") is not None else None

    def to_index(node_id) -> int:
        node_id = int(node_id)
        if node_id == depot_id:
            return 0
        if 1 <= node_id <= n:
            return node_id
        raise ParseError(f"risk_overrides: unknown node id {node_id}")

    defaults = dict(data.get("risk_defaults") or {})
    overrides: dict[tuple[int, int], dict] = {}
    for k, item in enumerate(data.get("risk_overrides") or []):
        item = dict(item)
        try:
            key = (to_index(item.pop("from")), to_index(item.pop("to")))
        except KeyError as exc:
            raise ParseError(f"risk_overrides[{k}]: missing {exc}") from exc
        overrides.setdefault(key, {}).update(item)
    for where, block in [("risk_defaults", defaults)] + [
        (f"risk_overrides[{a}->{b}]", blk) for (a, b), blk in overrides.items()
    ]:
        unknown = set(block) - set(RISK_FIELDS)
        if unknown:
            raise ParseError(f"{where}: unknown keys {sorted(unknown)}")

    problems: list[Violation] = []
    risk: dict[tuple[int, int], EdgeRiskProfile] = {}
    derived_t = np.zeros((size, size)) if ttime is None else ttime
    for a in range(size):
        for b in range(size):
            if a == b:
                continue
            merged = {**defaults, **overrides.get((a, b), {})}
            length = float(merged.get("length_L", dist[a, b]))
            speed = merged.get("speed_v")
            if ttime is None:
                if speed is None:
                    problems.append(
                        Violation(f"travel_time[{a}][{b}]", "travel_time_derivable", "no travel_time and no speed_v")
                    )
                    continue
                speed = float(speed)
                derived_t[a, b] = length / speed if speed > 0 else math.inf
            elif speed is None:
                t = float(ttime[a, b])
                if t > 0:
                    speed = length / t
                elif length == 0:
                    # co-located nodes: any positive speed gives zero exposure time
                    speed = 1.0
                else:
                    problems.append(
                        Violation(f"travel_time[{a}][{b}]", "travel_time_derivable", "zero travel time on a non-zero length")
                    )
                    continue
            missing = [f for f in RISK_FIELDS if f not in ("length_L", "speed_v") and f not in merged]
            if missing:
                if merged:
                    problems.append(
                        Violation(f"risk[{a}->{b}]", "risk_profile_complete", f"missing fields {missing}")
                    )
                continue
            try:
                values = {f: float(merged[f]) for f in RISK_FIELDS if f not in ("length_L", "speed_v")}
            except (TypeError, ValueError) as exc:
                raise ParseError(f"risk[{a}->{b}]: {exc}") from exc
            risk[(a, b)] = EdgeRiskProfile(length_L=length, speed_v=float(speed), **values)
    if problems:
        raise ValidationError(problems)

    depot_xy = data.get("depot_xy")
    return ProblemInstance(
        sites=sites,
        depot_id=depot_id,
        distance_D=dist,
        travel_time_t=derived_t,
        risk=risk,
        fleet=fleet,
        scenario=scenario,
        depot_xy=None if depot_xy is None else (float(depot_xy[0]), float(depot_xy[1])),
        name=str(data.get("name", name)),
    )


def instance_to_dict(inst: ProblemInstance) -> dict:
    """Serialise ``inst`` compactly: shared risk values go to ``risk_defaults``."""
    size = inst.n_sites + 1
    edges = sorted(inst.risk)
    defaults: dict = {}
    per_edge: dict[tuple[int, int], dict] = {e: {} for e in edges}
    for name in RISK_FIELDS:
        vals = {e: getattr(inst.risk[e], name) for e in edges}
        if name == "length_L" and all(v == inst.distance_D[e] for e, v in vals.items()):
            continue
        if name == "speed_v" and all(
            _derived_speed(inst.risk[e].length_L, inst.travel_time_t[e]) == v for e, v in vals.items()
        ):
            continue
        distinct = set(vals.values())
        if len(distinct) == 1:
            defaults[name] = distinct.pop()
        else:
            for e, v in vals.items():
                per_edge[e][name] = v
    overrides = [
        {"from": inst.label(a), "to": inst.label(b), **blk} for (a, b), blk in per_edge.items() if blk
    ]
    fleet = asdict(inst.fleet)
    if fleet["covid"] is None:
        del fleet["covid"]
    out = {
        "name": inst.name,
        "scenario": inst.scenario.value,
        "depot_id": inst.depot_id,
        "sites": [
            {k: v for k, v in (("id", s.id), ("demand", s.demand_q), ("service_time", s.service_time), ("x", s.x), ("y", s.y)) if v is not None}
            for s in inst.sites
        ],
        "distance": inst.distance_D.tolist(),
        "travel_time": inst.travel_time_t.tolist(),
        "risk_defaults": defaults,
        "risk_overrides": overrides,
        "fleet": fleet,
    }
    if inst.depot_xy is not None:
        out["depot_xy"] = list(inst.depot_xy)
    assert len(out["distance"]) == size
    return out


def _derived_speed(length: float, t: float) -> float:
    if t > 0:
        return length / t
    return 1.0 if length == 0 else math.nan


def _resolve_path(path) -> Path:
    p = Path(path)
    if not p.exists():
        from .data import bundled_path

        bundled = bundled_path(p.name)
        if bundled is not None:
            return bundled
    return p


def load_instance(path) -> ProblemInstance:
    """Read, build and fully validate an instance file.

    Bare names of bundled instances (``synthetic_dalian_day.json``) resolve to
    the copies shipped with the package when no such local file exists.
    """
    p = _resolve_path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ParseError(f"{p}: no such file") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{p}: {exc}") from exc
    inst = instance_from_dict(data, name=p.stem)
    check_instance(inst)
    return inst


def check_instance(inst: ProblemInstance) -> ProblemInstance:
    """Raise on any violation; capacity shortfall alone raises InfeasibleError."""
    violations = validate_instance(inst)
    hard = [v for v in violations if v.rule != "fleet_capacity"]
    if hard:
        raise ValidationError(hard)
    if violations:
        raise InfeasibleError(str(violations[0]))
    return inst


def write_instance(inst: ProblemInstance, path) -> None:
    atomic_write_text(path, json.dumps(instance_to_dict(inst), indent=1))


def atomic_write_text(path, text: str) -> None:
    """Write via a temp file in the target directory and rename into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def routes_from_ids(inst: ProblemInstance, routes: Iterable[Iterable[int]]) -> list[list[int]]:
    """Normalise plan input (public ids) to matrix indices; the depot id is dropped."""
    return [[int(s) for s in r if int(s) != inst.depot_id] for r in routes]
