"""Scenario files and simulation reports.

Scenario files are JSON objects (``schema_version`` 1)::

    {
      "schema_version": 1,
      "ego_id": "ego",
      "d_max_m": 140.0,
      "policy": "SmartCooper",
      "seed": 0,
      "vehicles": [
        {"id": "ego", "x_m": 0.0, "y_m": 0.0,
         "sensing_radius_m": 70.0, "data_volume_bits": 1.2e8},
        ...
      ],
      "channel": {"total_bandwidth_hz": 2e8, "num_subchannels": 3, ...},
      "judger": {"score_threshold_3cav": 0.4, ...},
      "proxy": {"gamma": 0.5, ...}
    }

Everything except ``schema_version``, ``ego_id``, ``vehicles`` and each
vehicle's ``id``/``x_m``/``y_m`` is optional. Unknown keys are rejected.
All quantities are SI (m, W, Hz, bits, s).
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources

from .allocation import PolicyKind
from .channel import ChannelParams
from .judger import JudgerPolicy
from .proxy import ProxyParams

__all__ = [
    "SCHEMA_VERSION",
    "DEFAULT_D_MAX_M",
    "DEFAULT_SENSING_RADIUS_M",
    "DEFAULT_DATA_VOLUME_BITS",
    "REPORT_COLUMNS",
    "ScenarioError",
    "Vehicle",
    "ScenarioConfig",
    "ReportRow",
    "SimulationReport",
    "load_scenario",
    "dump_scenario",
    "scenario_digest",
    "write_report",
    "suite_names",
    "load_suite",
]

SCHEMA_VERSION = 1
DEFAULT_D_MAX_M = 140.0
DEFAULT_SENSING_RADIUS_M = 70.0
DEFAULT_DATA_VOLUME_BITS = 1.2e8


class ScenarioError(ValueError):
    """Invalid scenario input.

    ``code`` identifies the violated rule, ``path`` the offending field
    (e.g. ``vehicles[2].sensing_radius_m``).
    """

    def __init__(self, code: str, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.code = code
        self.path = path


@dataclass(frozen=True)
class Vehicle:
    id: str
    x_m: float
    y_m: float
    sensing_radius_m: float = DEFAULT_SENSING_RADIUS_M
    data_volume_bits: float = DEFAULT_DATA_VOLUME_BITS

    @property
    def position(self):
        return (self.x_m, self.y_m)


@dataclass(frozen=True)
class ScenarioConfig:
    ego_id: str
    vehicles: tuple
    d_max_m: float = DEFAULT_D_MAX_M
    channel: ChannelParams = field(default_factory=ChannelParams)
    judger: JudgerPolicy = field(default_factory=JudgerPolicy)
    proxy: ProxyParams = field(default_factory=ProxyParams)
    policy: PolicyKind = PolicyKind.SMART_COOPER
    seed: int = 0
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        object.__setattr__(self, "policy", PolicyKind.parse(self.policy))

    @property
    def ego(self) -> Vehicle:
        return next(v for v in self.vehicles if v.id == self.ego_id)

    @property
    def collaborators(self) -> list:
        return [v for v in self.vehicles if v.id != self.ego_id]

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def with_channel(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, channel=dataclasses.replace(self.channel, **changes))

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "ego_id": self.ego_id,
            "d_max_m": self.d_max_m,
            "policy": self.policy.value,
            "seed": self.seed,
            "vehicles": [dataclasses.asdict(v) for v in self.vehicles],
            "channel": dataclasses.asdict(self.channel),
            "judger": dataclasses.asdict(self.judger),
            "proxy": dataclasses.asdict(self.proxy),
        }


# --------------------------------------------------------------------------
# parsing

def _reject_unknown(obj: dict, allowed, path: str):
    for key in obj:
        if key not in allowed:
            raise ScenarioError("unknown_field", f"{path}.{key}" if path else key, "unknown field")


def _number(obj: dict, key: str, path: str, default=None, integer=False):
    p = f"{path}.{key}" if path else key
    if key not in obj:
        if default is None:
            raise ScenarioError("missing_field", p, "required field missing")
        return default
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError("type_error", p, f"expected a number, got {type(value).__name__}")
    if integer:
        if isinstance(value, float) and not value.is_integer():
            raise ScenarioError("type_error", p, "expected an integer")
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise ScenarioError("invalid_value", p, "must be finite")
    return value


def _section(obj: dict, key: str, cls, path: str = ""):
    p = f"{path}.{key}" if path else key
    raw = obj.get(key, {})
    if not isinstance(raw, dict):
        raise ScenarioError("type_error", p, "expected an object")
    names = {f.name: f for f in dataclasses.fields(cls)}
    _reject_unknown(raw, names, p)
    kwargs = {}
    for name, f in names.items():
        if name not in raw:
            continue
        if f.type in ("bool", bool):
            if not isinstance(raw[name], bool):
                raise ScenarioError("type_error", f"{p}.{name}", "expected a boolean")
            kwargs[name] = raw[name]
        else:
            kwargs[name] = _number(raw, name, p, integer=f.type in ("int", int))
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ScenarioError(f"invalid_{key}", p, str(exc)) from None


def _vehicle(raw, i: int) -> Vehicle:
    p = f"vehicles[{i}]"
    if not isinstance(raw, dict):
        raise ScenarioError("type_error", p, "expected an object")
    _reject_unknown(raw, {f.name for f in dataclasses.fields(Vehicle)}, p)
    if "id" not in raw:
        raise ScenarioError("missing_field", f"{p}.id", "required field missing")
    if not isinstance(raw["id"], str) or not raw["id"]:
        raise ScenarioError("type_error", f"{p}.id", "expected a non-empty string")
    v = Vehicle(
        id=raw["id"],
        x_m=_number(raw, "x_m", p),
        y_m=_number(raw, "y_m", p),
        sensing_radius_m=_number(raw, "sensing_radius_m", p, DEFAULT_SENSING_RADIUS_M),
        data_volume_bits=_number(raw, "data_volume_bits", p, DEFAULT_DATA_VOLUME_BITS),
    )
    if not v.sensing_radius_m > 0:
        raise ScenarioError("invalid_value", f"{p}.sensing_radius_m", "must be positive")
    if not v.data_volume_bits > 0:
        raise ScenarioError("invalid_value", f"{p}.data_volume_bits", "must be positive")
    return v


def scenario_from_dict(obj) -> ScenarioConfig:
    if not isinstance(obj, dict):
        raise ScenarioError("type_error", "", "scenario must be a JSON object")
    _reject_unknown(obj, {"schema_version", "ego_id", "d_max_m", "policy", "seed", "vehicles",
                          "channel", "judger", "proxy"}, "")
    version = _number(obj, "schema_version", "", integer=True)
    if version != SCHEMA_VERSION:
        raise ScenarioError("unknown_schema_version", "schema_version",
                            f"unsupported schema version {version}")
    ego_id = obj.get("ego_id")
    if not isinstance(ego_id, str) or not ego_id:
        raise ScenarioError("missing_field" if ego_id is None else "type_error", "ego_id",
                            "expected a non-empty string")
    if not isinstance(obj.get("vehicles"), list):
        raise ScenarioError("missing_field" if "vehicles" not in obj else "type_error", "vehicles",
                            "expected a list of vehicles")
    vehicles = tuple(_vehicle(raw, i) for i, raw in enumerate(obj["vehicles"]))

    seen = set()
    for i, v in enumerate(vehicles):
        if v.id in seen:
            raise ScenarioError("duplicate_vehicle_id", f"vehicles[{i}].id", f"duplicate id {v.id!r}")
        seen.add(v.id)
    if ego_id not in seen:
        raise ScenarioError("missing_ego", "ego_id", f"no vehicle with id {ego_id!r}")

    d_max = _number(obj, "d_max_m", "", DEFAULT_D_MAX_M)
    if not d_max > 0:
        raise ScenarioError("invalid_value", "d_max_m", "must be positive")
    for i, v in enumerate(vehicles):
        if not v.sensing_radius_m < d_max:
            raise ScenarioError("sensing_radius_exceeds_mcsc", f"vehicles[{i}].sensing_radius_m",
                                "sensing radius exceeds MCSC")

    try:
        policy = PolicyKind.parse(obj.get("policy", PolicyKind.SMART_COOPER.value))
    except ValueError as exc:
        raise ScenarioError("unknown_policy", "policy", str(exc)) from None

    return ScenarioConfig(
        ego_id=ego_id,
        vehicles=vehicles,
        d_max_m=d_max,
        channel=_section(obj, "channel", ChannelParams),
        judger=_section(obj, "judger", JudgerPolicy),
        proxy=_section(obj, "proxy", ProxyParams),
        policy=policy,
        seed=_number(obj, "seed", "", 0, integer=True),
        schema_version=version,
    )


def load_scenario(data) -> ScenarioConfig:
    """Parse and validate scenario bytes (or text)."""
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioError("parse_error", "", f"not UTF-8: {exc}") from None
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ScenarioError("parse_error", "", f"invalid JSON: {exc}") from None
    return scenario_from_dict(obj)


def dump_scenario(config: ScenarioConfig) -> bytes:
    """Canonical scenario bytes: sorted keys, exact float round-trip."""
    return (json.dumps(config.to_dict(), sort_keys=True, indent=2) + "\n").encode()


def scenario_digest(config: ScenarioConfig) -> str:
    return hashlib.sha256(dump_scenario(config)).hexdigest()


def suite_names() -> list:
    files = resources.files("coopercept") / "suite"
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def load_suite(name: str) -> ScenarioConfig:
    """Load one of the scenarios shipped with the package by name."""
    path = resources.files("coopercept") / "suite" / f"{name}.json"
    return load_scenario(path.read_bytes())


# --------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class ReportRow:
    cav_id: str
    distance_m: float
    score_raw_m2: float
    score_normalized: float
    kept: bool
    reason: str
    subchannels: int
    capacity_bps: float
    alpha: float
    delay_s: float
    quality: float
    net_gain_m2: float


@dataclass(frozen=True)
class SimulationReport:
    scenario_digest: str
    policy: str
    seed: int
    rows: tuple
    proxy_ap: float
    net_gain_sum_m2: float
    bandwidth_consumed_hz: float
    score_evaluations: int
    metadata: dict = field(default_factory=dict)

    @property
    def kept_ids(self) -> list:
        return [r.cav_id for r in self.rows if r.kept]

    def row(self, cav_id: str) -> ReportRow:
        return next(r for r in self.rows if r.cav_id == cav_id)


# Tabular report layout: one "cav" row per collaborator, then one "total" row.
REPORT_COLUMNS = (
    "row_type", "policy", "cav_id", "distance_m", "score_raw_m2", "score_normalized", "kept",
    "reason", "subchannels", "capacity_bps", "alpha", "delay_s", "quality", "net_gain_m2",
    "proxy_ap", "bandwidth_consumed_hz", "score_evaluations",
)


def fmt_float(x: float) -> str:
    return format(float(x), ".15g")


def _round(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(fmt_float(obj))
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def report_to_dict(report: SimulationReport) -> dict:
    return {
        "scenario_digest": report.scenario_digest,
        "policy": report.policy,
        "seed": report.seed,
        "rows": [dataclasses.asdict(r) for r in report.rows],
        "totals": {
            "proxy_ap": report.proxy_ap,
            "net_gain_sum_m2": report.net_gain_sum_m2,
            "bandwidth_consumed_hz": report.bandwidth_consumed_hz,
            "score_evaluations": report.score_evaluations,
        },
        "metadata": report.metadata,
    }


def write_report(report: SimulationReport, format: str = "structured") -> bytes:
    """Serialize a report.

    ``structured``: canonical JSON, sorted keys, floats at 15 significant
    digits. ``tabular``: CSV with header :data:`REPORT_COLUMNS`.
    """
    if format == "structured":
        text = json.dumps(_round(report_to_dict(report)), sort_keys=True, indent=2,
                          allow_nan=False)
        return (text + "\n").encode()
    if format != "tabular":
        raise ValueError(f"unknown report format {format!r}")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for r in report.rows:
        writer.writerow([
            "cav", report.policy, r.cav_id, fmt_float(r.distance_m), fmt_float(r.score_raw_m2),
            fmt_float(r.score_normalized), int(r.kept), r.reason, r.subchannels,
            fmt_float(r.capacity_bps), fmt_float(r.alpha), fmt_float(r.delay_s),
            fmt_float(r.quality), fmt_float(r.net_gain_m2), "", "", "",
        ])
    writer.writerow([
        "total", report.policy, "", "", "", "", len(report.kept_ids), "", "", "", "", "", "",
        fmt_float(report.net_gain_sum_m2), fmt_float(report.proxy_ap),
        fmt_float(report.bandwidth_consumed_hz), report.score_evaluations,
    ])
    return buf.getvalue().encode()
