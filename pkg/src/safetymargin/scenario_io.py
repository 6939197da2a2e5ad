"""Scenario files: parsing, canonical serialization and fixture generation.

Scenarios are JSON documents. The canonical form written by
:func:`serialize_scenario` uses the key order below, sorts alternatives by id,
sorts metadata keys, and renders floats in shortest round-trip form::

    {
      "formatVersion": "1",
      "metadata": {"title": "..."},
      "welfare": {"family": "Linear", "riskParam": 0.0, "affineScale": 1.0, "affineShift": 0.0},
      "seed": 0,
      "samplesPerAlternative": 100000,
      "alternatives": [
        {"id": "A", "pCat": 0.1,
         "costGood": {"kind": "PointMass", "value": 10.0},
         "costFail": {"kind": "Discrete", "values": [90.0, 110.0], "probs": [0.5, 0.5]}}
      ]
    }

Required keys are ``formatVersion``, ``welfare`` (with ``family``) and
``alternatives``. ``riskParam`` is required for Exponential and Power welfare.
Unknown keys anywhere are schema errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .alternatives import (
    DISTRIBUTION_KINDS,
    Alternative,
    CostDistribution,
    Discrete,
    PointMass,
    Scenario,
    Violation,
    validate_scenario,
)
from .errors import (
    FixtureGeometryError,
    ParamError,
    ScenarioSyntaxError,
    ScenarioValidationError,
    SchemaError,
)
from .evaluation import BOUND_TOL, Label, analyze_evaluations, evaluate_alternative
from .montecarlo import split_stream
from .welfare import Family, WelfareFunction

FORMAT_VERSION = "1"
DEFAULT_SAMPLES = 100_000
#: Seed for which the bundled 27-alternative fixture is known to verify.
DEFAULT_FIG3_SEED = 1957

_TOP_KEYS = ("formatVersion", "metadata", "welfare", "seed", "samplesPerAlternative", "alternatives")
_WELFARE_KEYS = ("family", "riskParam", "affineScale", "affineShift")
_ALT_KEYS = ("id", "pCat", "costGood", "costFail")
_DIST_KEYS = {
    "PointMass": ("value",),
    "Discrete": ("values", "probs"),
    "Uniform": ("lo", "hi"),
    "Triangular": ("lo", "mode", "hi"),
    "LogNormal": ("mu", "sigma"),
}


@dataclass(frozen=True)
class ScenarioDocument:
    scenario: Scenario
    metadata: dict[str, str] = field(default_factory=dict)
    format_version: str = FORMAT_VERSION


def _reject_constant(name: str):
    raise ValueError(f"non-finite literal {name} is not allowed")


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise SchemaError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _check_keys(obj, where: str, allowed, required) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = [k for k in obj if k not in allowed]
    if unknown:
        raise SchemaError(f"{where}: unknown field(s) {', '.join(map(repr, unknown))}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise SchemaError(f"{where}: missing required field(s) {', '.join(map(repr, missing))}")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{where}: expected a number, got {value!r}")
    try:
        return float(value)
    except OverflowError:
        raise SchemaError(f"{where}: number out of range") from None


def _integer(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{where}: expected an integer, got {value!r}")
    return value


def _number_list(value, where: str) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise SchemaError(f"{where}: expected an array, got {value!r}")
    return tuple(_number(v, f"{where}[{i}]") for i, v in enumerate(value))


def _parse_distribution(obj, where: str) -> CostDistribution:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object, got {type(obj).__name__}")
    kind = obj.get("kind")
    if kind not in _DIST_KEYS:
        raise SchemaError(f"{where}.kind: expected one of {sorted(_DIST_KEYS)}, got {kind!r}")
    keys = _DIST_KEYS[kind]
    _check_keys(obj, where, ("kind",) + keys, ("kind",) + keys)
    if kind == "Discrete":
        return Discrete(_number_list(obj["values"], f"{where}.values"), _number_list(obj["probs"], f"{where}.probs"))
    return DISTRIBUTION_KINDS[kind](*(_number(obj[k], f"{where}.{k}") for k in keys))


def _parse_welfare(obj) -> tuple[WelfareFunction, list[Violation]]:
    _check_keys(obj, "welfare", _WELFARE_KEYS, ("family",))
    family = obj["family"]
    if family not in {f.value for f in Family}:
        raise SchemaError(f"welfare.family: expected one of {[f.value for f in Family]}, got {family!r}")
    if family != Family.LINEAR.value and "riskParam" not in obj:
        raise SchemaError(f"welfare: {family} requires 'riskParam'")
    kwargs = {"family": Family(family)}
    for key, attr in (("riskParam", "risk_param"), ("affineScale", "affine_scale"), ("affineShift", "affine_shift")):
        if key in obj:
            kwargs[attr] = _number(obj[key], f"welfare.{key}")
    try:
        return WelfareFunction(**kwargs), []
    except ParamError as exc:
        # keep validating the rest of the document against a placeholder
        return WelfareFunction(), [Violation(None, "welfare", str(exc))]


def _parse_alternative(obj, i: int) -> Alternative:
    where = f"alternatives[{i}]"
    _check_keys(obj, where, _ALT_KEYS, _ALT_KEYS)
    if not isinstance(obj["id"], str):
        raise SchemaError(f"{where}.id: expected a string, got {obj['id']!r}")
    return Alternative(
        obj["id"],
        _number(obj["pCat"], f"{where}.pCat"),
        _parse_distribution(obj["costGood"], f"{where}.costGood"),
        _parse_distribution(obj["costFail"], f"{where}.costFail"),
    )


def _load_json(text: bytes | str):
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioSyntaxError(f"not valid UTF-8: {exc.reason} at byte {exc.start}") from None
    try:
        return json.loads(text, parse_constant=_reject_constant, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise ScenarioSyntaxError(exc.msg, exc.lineno, exc.colno) from None
    except (ValueError, RecursionError) as exc:
        raise ScenarioSyntaxError(str(exc) or type(exc).__name__) from None


def parse_scenario(text: bytes | str) -> ScenarioDocument:
    """Parse and validate a scenario document.

    Alternatives come back sorted by id, so parsing is idempotent with
    respect to :func:`serialize_scenario`.

    Raises:
        ScenarioSyntaxError: malformed JSON or encoding, with line/column when known.
        SchemaError: unknown, missing or mistyped fields.
        ScenarioValidationError: model invariant violations, all of them at once.
    """
    data = _load_json(text)
    _check_keys(data, "document", _TOP_KEYS, ("formatVersion", "welfare", "alternatives"))
    if data["formatVersion"] != FORMAT_VERSION:
        raise SchemaError(f"formatVersion: unsupported version {data['formatVersion']!r}")

    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict) or not all(isinstance(v, str) for v in metadata.values()):
        raise SchemaError("metadata: expected an object of strings")

    welfare, violations = _parse_welfare(data["welfare"])
    seed = _integer(data.get("seed", 0), "seed")
    samples = _integer(data.get("samplesPerAlternative", DEFAULT_SAMPLES), "samplesPerAlternative")
    raw_alts = data["alternatives"]
    if not isinstance(raw_alts, list):
        raise SchemaError("alternatives: expected an array")
    alts = [_parse_alternative(obj, i) for i, obj in enumerate(raw_alts)]
    alts.sort(key=lambda a: a.id)

    scenario = Scenario(tuple(alts), welfare, seed, samples)
    violations += validate_scenario(scenario)
    if violations:
        raise ScenarioValidationError(violations)
    return ScenarioDocument(scenario, dict(sorted(metadata.items())), FORMAT_VERSION)


def _dist_to_obj(d: CostDistribution) -> dict:
    return {"kind": d.kind, **{k: v for k, v in d.params().items()}}


def document_to_obj(doc: ScenarioDocument) -> dict:
    s = doc.scenario
    w = s.welfare
    return {
        "formatVersion": doc.format_version,
        "metadata": dict(sorted(doc.metadata.items())),
        "welfare": {
            "family": w.family.value,
            "riskParam": w.risk_param,
            "affineScale": w.affine_scale,
            "affineShift": w.affine_shift,
        },
        "seed": s.seed,
        "samplesPerAlternative": s.samples_per_alternative,
        "alternatives": [
            {
                "id": a.id,
                "pCat": float(a.p_cat),
                "costGood": _dist_to_obj(a.cost_good),
                "costFail": _dist_to_obj(a.cost_fail),
            }
            for a in sorted(s.alternatives, key=lambda a: a.id)
        ],
    }


def serialize_scenario(doc: ScenarioDocument) -> bytes:
    """Canonical UTF-8 JSON encoding of ``doc``; byte-identical for equal documents."""
    return (json.dumps(document_to_obj(doc), indent=2, ensure_ascii=False, allow_nan=False) + "\n").encode("utf-8")


def read_scenario(path) -> ScenarioDocument:
    with open(path, "rb") as fh:
        return parse_scenario(fh.read())


def write_scenario(doc: ScenarioDocument, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize_scenario(doc))


def generate_fig3_fixture(seed: int = DEFAULT_FIG3_SEED, *, jitter: float = 1.0) -> ScenarioDocument:
    """Build and verify the 27-alternative illustration portfolio.

    Alternatives ``T01``..``T27`` sit on a catastrophe-probability grid
    0.01..0.27. Catastrophe-free cost rises with that probability, except for
    the two safest alternatives, which carry a protection surcharge that makes
    them dearer than ``T03``. ``T03`` is then the unique social optimum with
    exactly two safer (super-optimal) rivals. ``jitter`` scales the seeded
    noise on costs; the default keeps the geometry intact for every seed.

    Raises:
        FixtureGeometryError: the generated portfolio does not have that geometry.
    """
    rng = split_stream(seed, "fig3-fixture", 0)
    n = 27
    p = np.round(np.arange(1, n + 1) / 100.0, 4)
    good = 100.0 + 200.0 * p + jitter * rng.uniform(-1.0, 1.0, n)
    good[0] += 30.0 + 5.0 * rng.uniform()
    good[1] += 15.0 + 5.0 * rng.uniform()
    premium = 500.0 + 5.0 * jitter * rng.uniform(-1.0, 1.0, n)

    alts = []
    for i in range(n):
        m = round(float(good[i]), 4)
        alts.append(
            Alternative(
                f"T{i + 1:02d}",
                float(p[i]),
                Discrete((round(0.8 * m, 4), m, round(1.2 * m, 4)), (0.25, 0.5, 0.25)),
                PointMass(round(m + float(premium[i]), 4)),
            )
        )
    scenario = Scenario(tuple(alts), WelfareFunction(Family.LINEAR), seed, DEFAULT_SAMPLES)
    doc = ScenarioDocument(
        scenario,
        {
            "title": "27 candidate protective systems",
            "description": "Cost rises with catastrophe probability; two safe but costly rivals.",
        },
    )
    verify_fig3_geometry(doc)
    return doc


def verify_fig3_geometry(doc: ScenarioDocument) -> None:
    """Raise :class:`FixtureGeometryError` unless the fixture has the expected geometry."""
    s = doc.scenario
    problems = [str(v) for v in validate_scenario(s)]
    if problems:
        raise FixtureGeometryError("; ".join(problems))
    if len(s.alternatives) != 27:
        problems.append(f"expected 27 alternatives, got {len(s.alternatives)}")

    evals = [evaluate_alternative(a, s.welfare) for a in s.alternatives]
    analysis = analyze_evaluations(evals)
    best = analysis.optimal
    for e in evals:
        if e.id != best.id and e.expected_social_cost <= best.expected_social_cost + BOUND_TOL:
            problems.append(f"{e.id} is not strictly dearer than optimum {best.id}")
    n_super = analysis.count(Label.SUPER_OPTIMAL)
    if n_super != 2:
        problems.append(f"expected 2 super-optimal alternatives, got {n_super}")
    p = np.array([e.p_cat for e in evals])
    g = np.array([e.c_good for e in evals])
    if not np.corrcoef(p, g)[0, 1] > 0:
        problems.append("catastrophe probability and clean-lifecycle cost are not positively correlated")
    if problems:
        raise FixtureGeometryError("; ".join(problems))
