"""Experiment configuration: a single JSON document.

Vectors are written sparsely as {"index": value} maps ({"1": 1, "2": 1}
is e1 + e2); a plain list is accepted as dense shorthand.  The map comes
from the builtin registry; its convex sets and declared distance can be
overridden for contrapositive experiments.  See docs/config.schema.json
for the full shape.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .iterate import StopRule
from .maps import BUILTIN_MAPS, CyclicMapSpec, MapsError, PhiSpec, builtin
from .sets import Box, ConvexSet, Hull, SetsError
from .space import Vector

# check name -> (needs trajectories, allowed parameter keys)
CHECK_REGISTRY: dict[str, tuple[bool, frozenset[str]]] = {
    "cyclic_invariance": (False, frozenset({"samples", "tol"})),
    "phi_contraction": (False, frozenset({"samples", "tol", "quantification",
                                          "starts", "steps"})),
    "kannan": (False, frozenset({"samples", "tol"})),
    "kannan_strict": (False, frozenset({"samples", "tol"})),
    "certify_candidates": (False, frozenset({"tol"})),
    "second_iterate": (False, frozenset({"tol"})),
    "certify_limits": (True, frozenset({"tol"})),
    "monotone_t": (True, frozenset({"tol"})),
    "t_limit": (True, frozenset({"tol"})),
    "even_gaps": (True, frozenset({"tol"})),
    "interleaved": (True, frozenset({"eps", "tol"})),
    "cauchy": (True, frozenset({"k", "tol"})),
}


class ConfigError(ValueError):
    pass


def parse_vector(obj: Any) -> Vector:
    if isinstance(obj, dict):
        try:
            return Vector.from_map({int(k): float(v) for k, v in obj.items()})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad sparse vector {obj!r}: {exc}") from exc
    if isinstance(obj, list):
        try:
            return Vector.dense([float(v) for v in obj])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad dense vector {obj!r}: {exc}") from exc
    raise ConfigError(f"a vector must be an index->value map or a list, got {obj!r}")


def parse_pair(obj: Any) -> tuple[Vector, Vector]:
    if not (isinstance(obj, list) and len(obj) == 2):
        raise ConfigError(f"a point pair must be a two-element list, got {obj!r}")
    return parse_vector(obj[0]), parse_vector(obj[1])


def parse_set(obj: Any) -> ConvexSet:
    if not isinstance(obj, dict) or "variant" not in obj:
        raise ConfigError(f"a set needs a 'variant' key, got {obj!r}")
    try:
        if obj["variant"] == "box":
            return Box(tuple(float(v) for v in obj["lower"]),
                       tuple(float(v) for v in obj["upper"]))
        if obj["variant"] == "hull":
            return Hull(tuple(parse_vector(v) for v in obj["vertices"]))
    except (KeyError, TypeError, ValueError, SetsError) as exc:
        raise ConfigError(f"bad set definition: {exc}") from exc
    raise ConfigError(
        f"unknown set variant {obj['variant']!r} (declared sets are builtin-only)")


def parse_phi(obj: Any) -> PhiSpec:
    if not isinstance(obj, dict):
        raise ConfigError(f"phi must be an object, got {obj!r}")
    try:
        if set(obj) == {"lambda"}:
            return PhiSpec.linear(float(obj["lambda"]))
        variant = obj.get("variant")
        if variant == "linear":
            return PhiSpec.linear(float(obj["lambda"]))
        if variant == "half":
            return PhiSpec.half()
        if variant == "custom":
            return PhiSpec.custom([(float(t), float(f)) for t, f in obj["table"]])
    except (KeyError, TypeError, ValueError, MapsError) as exc:
        raise ConfigError(f"bad phi spec: {exc}") from exc
    raise ConfigError(f"unknown phi spec {obj!r}")


@dataclass(frozen=True)
class CheckSpec:
    name: str
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def needs_trajectories(self) -> bool:
        return CHECK_REGISTRY[self.name][0]


@dataclass(frozen=True)
class ExperimentConfig:
    map_name: str
    T: CyclicMapSpec
    phi: PhiSpec | None
    starts: list[tuple[Vector, Vector]]
    candidates: list[tuple[Vector, Vector]]
    rule: StopRule
    checks: list[CheckSpec]
    seed: int
    tol: float
    cert_tol: float
    output: str
    raw: dict

    def require_phi(self) -> PhiSpec:
        if self.phi is None:
            raise ConfigError(
                "no phi available: give map.phi in the config or pick a builtin "
                "with a declared contraction gauge")
        return self.phi


def _parse_checks(obj: Any) -> list[CheckSpec]:
    if obj is None:
        return []
    if not isinstance(obj, list):
        raise ConfigError("'checks' must be a list")
    out = []
    for item in obj:
        if isinstance(item, str):
            name, params = item, {}
        elif isinstance(item, dict) and "name" in item:
            name = item["name"]
            params = {k: v for k, v in item.items() if k != "name"}
        else:
            raise ConfigError(f"bad check entry {item!r}")
        if name not in CHECK_REGISTRY:
            raise ConfigError(
                f"unknown check {name!r}; available: {', '.join(sorted(CHECK_REGISTRY))}")
        allowed = CHECK_REGISTRY[name][1]
        for k in params:
            if k not in allowed:
                raise ConfigError(f"check {name!r} takes no parameter {k!r}")
        out.append(CheckSpec(name, params))
    return out


def _parse_rule(obj: Any) -> StopRule:
    if obj is None:
        return StopRule()
    if not isinstance(obj, dict):
        raise ConfigError("'rule' must be an object")
    known = {"max_iters", "t_tol", "gap_tol"}
    for k in obj:
        if k not in known:
            raise ConfigError(f"rule takes no key {k!r}")
    try:
        return StopRule(
            max_iters=int(obj.get("max_iters", 1000)),
            t_tol=None if obj.get("t_tol", 1e-8) is None else float(obj.get("t_tol", 1e-8)),
            gap_tol=None if obj.get("gap_tol", 1e-8) is None else float(obj.get("gap_tol", 1e-8)),
        )
    except ValueError as exc:
        raise ConfigError(f"bad stop rule: {exc}") from exc


def _resolve_starts(obj: Any, T: CyclicMapSpec, default_seed: int) -> list[tuple[Vector, Vector]]:
    from .sets import sample

    if obj is None:
        return []
    if isinstance(obj, dict) and "explicit" in obj:
        return [parse_pair(p) for p in obj["explicit"]]
    if isinstance(obj, dict) and "count" in obj:
        n = int(obj["count"])
        if n < 1:
            raise ConfigError("starts.count must be >= 1")
        seed = int(obj.get("seed", default_seed))
        xs = sample(T.A, T.space, n, seed=seed)
        ys = sample(T.B, T.space, n, seed=seed + 1000003)
        return list(zip(xs, ys))
    raise ConfigError("'starts' needs either 'explicit' or 'count'")


def parse_config(raw: dict, seed_override: int | None = None,
                 max_iters_override: int | None = None,
                 tol_override: float | None = None,
                 out_override: str | None = None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("the configuration document must be a JSON object")
    known = {"map", "starts", "candidates", "rule", "checks", "seed", "tol",
             "cert_tol", "output"}
    for k in raw:
        if k not in known:
            raise ConfigError(f"unknown configuration key {k!r}")

    map_cfg = raw.get("map")
    if not (isinstance(map_cfg, dict) and "builtin" in map_cfg):
        raise ConfigError("'map' must be an object naming a 'builtin'")
    for k in map_cfg:
        if k not in {"builtin", "phi", "lambda", "sets", "dist"}:
            raise ConfigError(f"map takes no key {k!r}")
    try:
        T = builtin(str(map_cfg["builtin"]))
    except MapsError as exc:
        raise ConfigError(str(exc)) from exc

    if "sets" in map_cfg:
        pair = map_cfg["sets"]
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ConfigError("map.sets must be a two-element list")
        T = CyclicMapSpec(T.label, T.space, parse_set(pair[0]), parse_set(pair[1]),
                          T.evaluator, T.declared_class, T.declared_dist, T.phi)
    if "dist" in map_cfg:
        T = CyclicMapSpec(T.label, T.space, T.A, T.B, T.evaluator,
                          T.declared_class, float(map_cfg["dist"]), T.phi)

    phi = T.phi
    if "phi" in map_cfg:
        phi = parse_phi(map_cfg["phi"])
    elif "lambda" in map_cfg:
        phi = PhiSpec.linear(float(map_cfg["lambda"]))

    seed = int(raw.get("seed", 0)) if seed_override is None else seed_override
    rule = _parse_rule(raw.get("rule"))
    if max_iters_override is not None:
        rule = StopRule(max_iters_override, rule.t_tol, rule.gap_tol)
    tol = float(raw.get("tol", 1e-9)) if tol_override is None else tol_override
    output = str(raw.get("output", "out")) if out_override is None else out_override

    try:
        starts = _resolve_starts(raw.get("starts"), T, seed)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad starts: {exc}") from exc
    candidates = [parse_pair(p) for p in raw.get("candidates", [])]

    return ExperimentConfig(
        map_name=str(map_cfg["builtin"]),
        T=T,
        phi=phi,
        starts=starts,
        candidates=candidates,
        rule=rule,
        checks=_parse_checks(raw.get("checks")),
        seed=seed,
        tol=tol,
        cert_tol=float(raw.get("cert_tol", 1e-8)),
        output=output,
        raw=raw,
    )


def load_config(path: str, **overrides) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return parse_config(raw, **overrides)
