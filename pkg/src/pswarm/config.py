"""JSON run configurations.

A configuration document has the sections ``problem``, ``swarm``, ``init``,
``termination``, ``defaults``, ``overrides`` and ``output``.  Polymorphic
settings (distributions, combiners, sociometries, constraint handlers and
sample relations) are tagged records with a ``kind`` key, e.g.
``{"kind": "sum2u", "iw": 1.496, "sw": 1.496}``.

Documents are checked against the bundled JSON schema (unknown keys are
rejected) and then by :meth:`RunConfig.validate`.  Every failure is raised
as :class:`~pswarm.engine.ConfigError` naming the offending field.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .engine import (
    AttributeOverride,
    BoundaryPolicy,
    ConfigError,
    InitSpec,
    OutputOptions,
    ParticleAttributes,
    RunConfig,
)
from .initialization import (
    Independent,
    InitialCondition,
    Perturbation,
    SamplingMethod,
    Simultaneous,
)
from .memory import GatheringMode, Penalty, PreservingFeasibility, PriorityRules, SynchronyMode
from .sociometry import Forward, Global, Ring, Wheel
from .stochastic import (
    CoupledClassical,
    Custom,
    DecoupledConvex,
    PointMass,
    ScalingMode,
    SumOfTwoUniforms,
    Uniform,
)
from .termination import TerminationConfig

_ATTRIBUTE_KEYS = ("omega", "phi", "scaling", "combiner", "sociometry", "cht", "gathering")


def load_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("config.schema.json").read_text())


_VALIDATOR = None


def _validator() -> jsonschema.Draft202012Validator:
    global _VALIDATOR
    if _VALIDATOR is None:
        _VALIDATOR = jsonschema.Draft202012Validator(load_schema())
    return _VALIDATOR


def _dotted(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<root>"


def _schema_error(doc: dict) -> ConfigError | None:
    errors = list(_validator().iter_errors(doc))
    if not errors:
        return None
    err = jsonschema.exceptions.best_match(errors)
    path = list(err.absolute_path)
    if err.validator == "required" and isinstance(err.instance, dict):
        missing = [k for k in err.validator_value if k not in err.instance]
        if missing:
            return ConfigError(_dotted(path + [missing[0]]), "missing required field")
    return ConfigError(_dotted(path), err.message)


# -- records -> objects ----------------------------------------------------


def _distribution(rec: dict):
    kind = rec["kind"]
    if kind == "point":
        return PointMass(rec["value"])
    if kind == "uniform":
        return Uniform(rec["lo"], rec["hi"])
    if kind == "sum2u":
        return SumOfTwoUniforms(rec["iw"], rec["sw"])
    return Custom(rec["name"], tuple(rec["probabilities"]), tuple(rec["values"]))


def _combiner(rec: dict):
    if rec["kind"] == "coupled":
        return CoupledClassical()
    if "lambda" in rec:
        return DecoupledConvex(_distribution(rec["lambda"]))
    return DecoupledConvex()


def _sociometry(rec: dict):
    include_self = rec.get("include_self", True)
    kind = rec["kind"]
    if kind == "global":
        return Global(include_self)
    if kind == "ring":
        return Ring(rec.get("k", 1), include_self)
    if kind == "forward":
        return Forward(rec.get("k", 1), include_self)
    return Wheel(rec.get("hub", 0), include_self)


def _cht(rec: dict):
    kind = rec["kind"]
    if kind == "priority_rules":
        return PriorityRules()
    if kind == "preserving_feasibility":
        return PreservingFeasibility()
    return Penalty(tuple(rec.get("coefficients", (1.0,))), rec.get("exponent", 1.0))


def _relation(rec: dict):
    kind = rec["kind"]
    if kind == "independent":
        return Independent()
    if kind == "simultaneous":
        return Simultaneous()
    return Perturbation(rec.get("radius_fraction", 0.05))


_PARSERS = {
    "omega": _distribution,
    "phi": _distribution,
    "scaling": ScalingMode,
    "combiner": _combiner,
    "sociometry": _sociometry,
    "cht": _cht,
    "gathering": GatheringMode,
}


def _attributes(rec: dict, where: str) -> dict:
    out = {}
    for key in _ATTRIBUTE_KEYS:
        if key in rec:
            try:
                out[key] = _PARSERS[key](rec[key])
            except ValueError as exc:
                raise ConfigError(f"{where}.{key}", str(exc)) from None
    return out


def config_from_dict(doc: dict) -> RunConfig:
    """Build and validate a :class:`RunConfig` from a parsed document."""
    err = _schema_error(doc)
    if err is not None:
        raise err
    swarm = doc["swarm"]
    init = doc.get("init", {})
    term = doc.get("termination", {})
    out = doc.get("output", {})

    try:
        init_spec = InitSpec(
            condition=InitialCondition(init.get("condition", InitSpec.condition.value)),
            relation=_relation(init["relation"]) if "relation" in init else InitSpec.relation,
            method=SamplingMethod(init.get("method", InitSpec.method.value)),
        )
    except ValueError as exc:
        raise ConfigError("init", str(exc)) from None

    base = TerminationConfig()
    try:
        termination = TerminationConfig(
            t_max=term.get("t_max", base.t_max),
            diversity_threshold=term.get("diversity_threshold", base.diversity_threshold),
            improvement_epsilon=term.get("improvement_epsilon", base.improvement_epsilon),
            window=term.get("window", base.window),
        )
    except ValueError as exc:
        raise ConfigError("termination", str(exc)) from None

    defaults = ParticleAttributes(**_attributes(doc.get("defaults", {}), "defaults"))
    overrides = tuple(
        AttributeOverride(particles=tuple(rec["particles"]), **_attributes(rec, f"overrides[{k}]"))
        for k, rec in enumerate(doc.get("overrides", []))
    )
    config = RunConfig(
        problem=doc["problem"]["name"],
        dimension=doc["problem"]["dimension"],
        swarm_size=swarm["size"],
        seed=swarm.get("seed", 0),
        init=init_spec,
        termination=termination,
        defaults=defaults,
        overrides=overrides,
        synchrony=SynchronyMode(swarm.get("synchrony", "synchronous")),
        boundary=BoundaryPolicy(swarm.get("boundary", "clamp")),
        displacement_cap=swarm.get("displacement_cap"),
        output=OutputOptions(out.get("trace"), out.get("dump")),
    )
    config.validate()
    return config


def loads(text: str) -> RunConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<root>", f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    return config_from_dict(doc)


def load(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    return loads(text)


# -- objects -> records ----------------------------------------------------


def _distribution_record(d) -> dict:
    if isinstance(d, PointMass):
        return {"kind": "point", "value": d.value}
    if isinstance(d, Uniform):
        return {"kind": "uniform", "lo": d.lo, "hi": d.hi}
    if isinstance(d, SumOfTwoUniforms):
        return {"kind": "sum2u", "iw": d.iw, "sw": d.sw}
    return {"kind": "custom", "name": d.name, "probabilities": list(d.probabilities), "values": list(d.values)}


def _combiner_record(c) -> dict:
    if isinstance(c, CoupledClassical):
        return {"kind": "coupled"}
    return {"kind": "decoupled", "lambda": _distribution_record(c.lambda_dist)}


def _sociometry_record(s) -> dict:
    if isinstance(s, Global):
        return {"kind": "global", "include_self": s.include_self}
    if isinstance(s, Wheel):
        return {"kind": "wheel", "hub": s.hub, "include_self": s.include_self}
    kind = "ring" if isinstance(s, Ring) else "forward"
    return {"kind": kind, "k": s.k, "include_self": s.include_self}


def _cht_record(c) -> dict:
    if isinstance(c, PriorityRules):
        return {"kind": "priority_rules"}
    if isinstance(c, PreservingFeasibility):
        return {"kind": "preserving_feasibility"}
    return {"kind": "penalty", "coefficients": list(c.coefficients), "exponent": c.exponent}


def _relation_record(r) -> dict:
    if isinstance(r, Independent):
        return {"kind": "independent"}
    if isinstance(r, Simultaneous):
        return {"kind": "simultaneous"}
    return {"kind": "perturbation", "radius_fraction": r.radius_fraction}


_WRITERS = {
    "omega": _distribution_record,
    "phi": _distribution_record,
    "scaling": lambda m: m.value,
    "combiner": _combiner_record,
    "sociometry": _sociometry_record,
    "cht": _cht_record,
    "gathering": lambda m: m.value,
}


def _attribute_record(source, keys=_ATTRIBUTE_KEYS) -> dict:
    out = {}
    for key in keys:
        value = getattr(source, key)
        if value is not None:
            out[key] = _WRITERS[key](value)
    return out


def config_to_dict(config: RunConfig) -> dict[str, Any]:
    """Fully explicit document; parses back to an equal configuration."""
    t = config.termination
    return {
        "problem": {"name": config.problem, "dimension": config.dimension},
        "swarm": {
            "size": config.swarm_size,
            "seed": config.seed,
            "synchrony": config.synchrony.value,
            "boundary": config.boundary.value,
            "displacement_cap": config.displacement_cap,
        },
        "init": {
            "condition": config.init.condition.value,
            "method": config.init.method.value,
            "relation": _relation_record(config.init.relation),
        },
        "termination": {
            "t_max": t.t_max,
            "diversity_threshold": t.diversity_threshold,
            "improvement_epsilon": t.improvement_epsilon,
            "window": t.window,
        },
        "defaults": _attribute_record(config.defaults),
        "overrides": [
            {"particles": list(o.particles), **_attribute_record(o)} for o in config.overrides
        ],
        "output": {"trace": config.output.trace, "dump": config.output.dump},
    }


def dumps(config: RunConfig) -> str:
    return json.dumps(config_to_dict(config), indent=2) + "\n"
