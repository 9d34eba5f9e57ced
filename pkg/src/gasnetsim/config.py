"""Network configuration: a versioned JSON document with five sections.

Schema (version ``v1``)::

    {
      "version": "v1",
      "eos": {"kind": "cnga", ...},
      "nodes": [{"id": "1", "kind": "slack", "pressure": <profile>},
                {"id": "3", "kind": "demand", "withdrawal": <profile>}],
      "pipes": [{"id": "p1", "from": "1", "to": "2",
                 "length": 20000.0, "diameter": 0.9144, "friction": 0.01}],
      "compressors": [{"pipe": "p1", "side": "inlet", "ratio": <profile>}],
      "simulation": {"dt": 0.125, "t_end": 86400.0, "dx_target": 62.5,
                     "cfl_safety": 0.9, "output_cadence": 60.0,
                     "output_path": "out"}
    }

Profiles are either a bare number (constant) or a dict with a ``type`` key
(``constant``, ``harmonic``, ``piecewise_linear``, ``step_sequence``).
Validation collects every violation before failing; in strict mode unknown
keys are rejected as well.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .eos import make_eos
from .errors import ConfigError
from .network import DemandBC, Network, Node, PipeEdge, SlackBC, \
    grid_for_length
from .pipe import PipeGeometry
from .profiles import profile_from_config

SCHEMA_VERSION = "v1"

_EOS_REQUIRED = {
    "ideal": {"wave_speed"},
    "cnga": set(),
    "cnga_detailed": {"t_kelvin", "gas_gravity"},
    "cnga_nonisothermal": {"t_ambient", "t_jump", "decay_rate",
                           "gas_gravity"},
}
_EOS_OPTIONAL = {
    "ideal": set(),
    "cnga": {"b1", "b2", "rt"},
    "cnga_detailed": set(),
    "cnga_nonisothermal": set(),
}


@dataclass
class NodeConfig:
    id: str
    kind: str                    # "slack" | "demand"
    profile: object              # pressure or withdrawal profile config

    def to_dict(self):
        key = "pressure" if self.kind == "slack" else "withdrawal"
        return {"id": self.id, "kind": self.kind, key: self.profile}


@dataclass
class PipeConfig:
    id: str
    from_node: str
    to_node: str
    length: float
    diameter: float
    friction: float

    def to_dict(self):
        return {"id": self.id, "from": self.from_node, "to": self.to_node,
                "length": self.length, "diameter": self.diameter,
                "friction": self.friction}


@dataclass
class CompressorConfig:
    pipe: str
    side: str                    # "inlet" | "outlet"
    ratio: object

    def to_dict(self):
        return {"pipe": self.pipe, "side": self.side, "ratio": self.ratio}


@dataclass
class SimulationConfig:
    t_end: float
    dx_target: float
    dt: float | None = None
    cfl_safety: float = 0.9
    output_cadence: float = 60.0
    output_path: str = "out"

    def to_dict(self):
        return {"dt": self.dt, "t_end": self.t_end,
                "dx_target": self.dx_target, "cfl_safety": self.cfl_safety,
                "output_cadence": self.output_cadence,
                "output_path": self.output_path}


@dataclass
class NetworkConfig:
    eos: dict
    nodes: list
    pipes: list
    compressors: list = field(default_factory=list)
    simulation: SimulationConfig | None = None
    version: str = SCHEMA_VERSION

    def to_dict(self):
        doc = {"version": self.version, "eos": dict(self.eos),
               "nodes": [n.to_dict() for n in self.nodes],
               "pipes": [p.to_dict() for p in self.pipes],
               "compressors": [c.to_dict() for c in self.compressors]}
        if self.simulation is not None:
            doc["simulation"] = self.simulation.to_dict()
        return doc


def _expect_keys(section, obj, required, optional, problems, strict):
    missing = required - obj.keys()
    if missing:
        problems.append(f"{section}: missing keys {sorted(missing)}")
    if strict:
        unknown = obj.keys() - required - optional
        if unknown:
            problems.append(f"{section}: unknown keys {sorted(unknown)}")


def _check_profile(section, cfg, problems, strict):
    try:
        profile_from_config(cfg, strict=strict)
    except (ValueError, TypeError) as exc:
        problems.append(f"{section}: bad profile ({exc})")


def parse_config(doc: dict, strict: bool = False) -> NetworkConfig:
    """Validate a parsed JSON document; raises ConfigError listing every
    violation found."""
    problems = []
    if not isinstance(doc, dict):
        raise ConfigError(["config root must be an object"])
    _expect_keys("config", doc, {"version", "eos", "nodes", "pipes"},
                 {"compressors", "simulation"}, problems, strict)
    if doc.get("version") != SCHEMA_VERSION:
        problems.append(f"config: schema version must be "
                        f"{SCHEMA_VERSION!r}, got {doc.get('version')!r}")

    eos_cfg = doc.get("eos", {})
    if not isinstance(eos_cfg, dict) or "kind" not in eos_cfg:
        problems.append("eos: must be an object with a 'kind'")
        eos_cfg = {}
    else:
        kind = eos_cfg["kind"]
        if kind not in _EOS_REQUIRED:
            problems.append(f"eos: unknown kind {kind!r}")
        else:
            _expect_keys("eos", eos_cfg, _EOS_REQUIRED[kind] | {"kind"},
                         _EOS_OPTIONAL[kind], problems, strict)
            try:
                make_eos(kind, **{k: v for k, v in eos_cfg.items()
                                  if k != "kind"})
            except (ValueError, KeyError, TypeError) as exc:
                problems.append(f"eos: invalid parameters ({exc})")

    nodes, seen_nodes, has_slack = [], set(), False
    for i, nd in enumerate(doc.get("nodes", [])):
        label = f"nodes[{i}]"
        if not isinstance(nd, dict):
            problems.append(f"{label}: must be an object")
            continue
        kind = nd.get("kind")
        value_key = "pressure" if kind == "slack" else "withdrawal"
        _expect_keys(label, nd, {"id", "kind", value_key}, set(), problems,
                     strict)
        nid = str(nd.get("id"))
        if nid in seen_nodes:
            problems.append(f"{label}: duplicate node id {nid!r}")
        seen_nodes.add(nid)
        if kind not in ("slack", "demand"):
            problems.append(f"{label}: kind must be 'slack' or 'demand'")
            continue
        has_slack = has_slack or kind == "slack"
        if value_key in nd:
            _check_profile(label, nd[value_key], problems, strict)
            nodes.append(NodeConfig(id=nid, kind=kind, profile=nd[value_key]))
    if not has_slack:
        problems.append("nodes: at least one slack node is required")

    pipes, seen_pipes = [], set()
    for i, pd in enumerate(doc.get("pipes", [])):
        label = f"pipes[{i}]"
        if not isinstance(pd, dict):
            problems.append(f"{label}: must be an object")
            continue
        _expect_keys(label, pd, {"id", "from", "to", "length", "diameter",
                                 "friction"}, set(), problems, strict)
        pid = str(pd.get("id"))
        if pid in seen_pipes:
            problems.append(f"{label}: duplicate pipe id {pid!r}")
        seen_pipes.add(pid)
        for key in ("length", "diameter"):
            if not isinstance(pd.get(key), (int, float)) or pd[key] <= 0:
                problems.append(f"{label}: {key} must be positive")
        if not isinstance(pd.get("friction"), (int, float)) or \
                pd["friction"] < 0:
            problems.append(f"{label}: friction must be non-negative")
        for key in ("from", "to"):
            if str(pd.get(key)) not in seen_nodes:
                problems.append(f"{label}: {key} node {pd.get(key)!r} "
                                f"does not exist")
        if pd.get("from") == pd.get("to"):
            problems.append(f"{label}: from and to must differ")
        pipes.append(PipeConfig(id=pid, from_node=str(pd.get("from")),
                                to_node=str(pd.get("to")),
                                length=float(pd.get("length", 0) or 0),
                                diameter=float(pd.get("diameter", 0) or 0),
                                friction=float(pd.get("friction", 0) or 0)))

    compressors, seen_comp = [], set()
    for i, cd in enumerate(doc.get("compressors", [])):
        label = f"compressors[{i}]"
        if not isinstance(cd, dict):
            problems.append(f"{label}: must be an object")
            continue
        _expect_keys(label, cd, {"pipe", "side", "ratio"}, set(), problems,
                     strict)
        side = cd.get("side")
        if side not in ("inlet", "outlet"):
            problems.append(f"{label}: side must be 'inlet' or 'outlet'")
        if str(cd.get("pipe")) not in seen_pipes:
            problems.append(f"{label}: pipe {cd.get('pipe')!r} does not exist")
        key = (str(cd.get("pipe")), side)
        if key in seen_comp:
            problems.append(f"{label}: duplicate compressor for {key}")
        seen_comp.add(key)
        if "ratio" in cd:
            _check_profile(label, cd["ratio"], problems, strict)
            compressors.append(CompressorConfig(pipe=str(cd.get("pipe")),
                                                side=side or "inlet",
                                                ratio=cd["ratio"]))

    simulation = None
    if "simulation" in doc:
        sd = doc["simulation"]
        label = "simulation"
        if not isinstance(sd, dict):
            problems.append(f"{label}: must be an object")
        else:
            _expect_keys(label, sd, {"t_end", "dx_target"},
                         {"dt", "cfl_safety", "output_cadence",
                          "output_path"}, problems, strict)
            for key in ("t_end", "dx_target"):
                if not isinstance(sd.get(key), (int, float)) or sd[key] <= 0:
                    problems.append(f"{label}: {key} must be positive")
            dt = sd.get("dt")
            if dt is not None and (not isinstance(dt, (int, float)) or
                                   dt <= 0):
                problems.append(f"{label}: dt must be positive or null")
            safety = sd.get("cfl_safety", 0.9)
            if not 0 < safety <= 1:
                problems.append(f"{label}: cfl_safety must be in (0, 1]")
            if not problems:
                simulation = SimulationConfig(
                    t_end=float(sd["t_end"]),
                    dx_target=float(sd["dx_target"]),
                    dt=None if dt is None else float(dt),
                    cfl_safety=float(safety),
                    output_cadence=float(sd.get("output_cadence", 60.0)),
                    output_path=str(sd.get("output_path", "out")))

    if problems:
        raise ConfigError(problems)
    return NetworkConfig(eos=dict(eos_cfg), nodes=nodes, pipes=pipes,
                         compressors=compressors, simulation=simulation,
                         version=doc["version"])


def load_config(path, strict: bool = False) -> NetworkConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"parse error at line {exc.lineno}, column "
                           f"{exc.colno}: {exc.msg}"]) from exc
    return parse_config(doc, strict=strict)


def save_config(cfg: NetworkConfig, path) -> None:
    with open(path, "w") as fh:
        json.dump(cfg.to_dict(), fh, indent=2)
        fh.write("\n")


def config_sha(cfg: NetworkConfig | dict) -> str:
    doc = cfg.to_dict() if isinstance(cfg, NetworkConfig) else cfg
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def build_network(cfg: NetworkConfig, dx_target: float | None = None,
                  strict: bool = False) -> Network:
    """Instantiate the runtime Network from a validated config."""
    eos = make_eos(cfg.eos["kind"],
                   **{k: v for k, v in cfg.eos.items() if k != "kind"})
    nodes = []
    for nc in cfg.nodes:
        profile = profile_from_config(nc.profile, strict=strict)
        bc = SlackBC(profile) if nc.kind == "slack" else DemandBC(profile)
        nodes.append(Node(nc.id, bc))
    if dx_target is None:
        dx_target = cfg.simulation.dx_target if cfg.simulation else 500.0
    ratios = {}
    for cc in cfg.compressors:
        ratios[(cc.pipe, cc.side)] = profile_from_config(cc.ratio,
                                                         strict=strict)
    edges = []
    for pc in cfg.pipes:
        edges.append(PipeEdge(
            id=pc.id, from_node=pc.from_node, to_node=pc.to_node,
            geometry=PipeGeometry(length=pc.length, diameter=pc.diameter,
                                  friction=pc.friction),
            grid=grid_for_length(pc.length, dx_target),
            inlet_ratio=ratios.get((pc.id, "inlet")),
            outlet_ratio=ratios.get((pc.id, "outlet"))))
    return Network(nodes, edges, eos)
