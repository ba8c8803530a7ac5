"""Scenario files: declarative descriptions of a system, observables,
boxes and trial settings, consumed by the CLI."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .averages import FolnerBox
from .errors import ValidationError
from .observables import Observable
from .system import FiniteSystem, validate_system
from .torus import RotationEntry, TorusSystem, TrigObservable


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    engine: str  # "finite" | "torus"
    system: Union[FiniteSystem, TorusSystem]
    observables: Dict[str, Union[Observable, TrigObservable]]
    average_tuples: Tuple[Tuple[str, ...], ...]
    boxes: Tuple[FolnerBox, ...]
    trial_count: int
    trial_seed: int
    samples: Tuple[Tuple[float, ...], ...]
    options: Dict[str, int]
    sha256: str


def _parse_entry(raw) -> RotationEntry:
    if isinstance(raw, str):
        return RotationEntry.exact(Fraction(raw))
    if isinstance(raw, dict):
        if "float" in raw:
            return RotationEntry.from_float(float(raw["float"]))
        symbols = {
            str(k): Fraction(str(v)) for k, v in raw.get("symbols", {}).items()
        }
        return RotationEntry.exact(Fraction(str(raw.get("rational", "0"))), symbols)
    raise ValidationError(f"unparseable rotation entry: {raw!r}")


def _parse_torus_system(raw: dict) -> TorusSystem:
    try:
        m = int(raw["m"])
        r = int(raw["r"])
        d = int(raw["d"])
        rotations_raw = raw["rotations"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed torus system: {exc}") from exc
    table: dict = {}
    for entry in rotations_raw:
        i = int(entry["action"])
        j = int(entry["axis"])
        vec = tuple(_parse_entry(e) for e in entry["vector"])
        if (i, j) in table:
            raise ValidationError(f"duplicate rotation for ({i},{j})")
        table[(i, j)] = vec
    missing = [
        (i, j)
        for i in range(1, d + 1)
        for j in range(1, r + 1)
        if (i, j) not in table
    ]
    if missing:
        raise ValidationError(f"missing rotations for {missing}")
    rotations = tuple(
        tuple(table[(i, j)] for j in range(1, r + 1)) for i in range(1, d + 1)
    )
    symbol_values = tuple(
        sorted((str(k), float(v)) for k, v in raw.get("symbol_values", {}).items())
    )
    return TorusSystem(
        m=m, r=r, d=d, rotations=rotations, symbol_values=symbol_values
    )


def _parse_trig(raw) -> TrigObservable:
    terms = []
    for term in raw:
        freq = tuple(int(v) for v in term["freq"])
        re, im = term["coeff"]
        terms.append((freq, complex(float(re), float(im))))
    return TrigObservable(tuple(terms))


def load_scenario(path: Union[str, Path]) -> ScenarioConfig:
    data = Path(path).read_bytes()
    sha = hashlib.sha256(data).hexdigest()
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"scenario is not valid JSON: {exc}") from exc
    return parse_scenario(raw, sha)


def parse_scenario(raw: dict, sha256: str = "") -> ScenarioConfig:
    try:
        name = str(raw["name"])
        engine = str(raw["engine"])
        system_raw = raw["system"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed scenario: {exc}") from exc
    if engine == "finite":
        system = validate_system(system_raw)
        observables = {
            str(k): Observable.from_values([Fraction(str(v)) for v in vals])
            for k, vals in raw.get("observables", {}).items()
        }
        for k, f in observables.items():
            if len(f) != system.n:
                raise ValidationError(
                    f"observable {k} has length {len(f)}, expected {system.n}"
                )
        box_dim = system.r
    elif engine == "torus":
        system = _parse_torus_system(system_raw)
        observables = {
            str(k): _parse_trig(v) for k, v in raw.get("observables", {}).items()
        }
        box_dim = system.r
    else:
        raise ValidationError(f"unknown engine {engine!r}")
    tuples = tuple(
        tuple(str(n) for n in t) for t in raw.get("average_tuples", [])
    )
    for t in tuples:
        if len(t) != system.d:
            raise ValidationError(
                f"average tuple {t} has {len(t)} entries, expected {system.d}"
            )
        for n in t:
            if n not in observables:
                raise ValidationError(f"unknown observable {n!r} in tuple")
    boxes = []
    for b in raw.get("boxes", []):
        lengths = tuple(int(v) for v in b["lengths"])
        base = tuple(int(v) for v in b.get("base", (0,) * box_dim))
        if len(lengths) != box_dim:
            raise ValidationError("box dimension differs from rank")
        boxes.append(FolnerBox(lengths, base))
    trials = raw.get("base_point_trials", {})
    samples = tuple(
        tuple(float(v) for v in s) for s in raw.get("samples", [])
    )
    options = {str(k): int(v) for k, v in raw.get("options", {}).items()}
    return ScenarioConfig(
        name=name,
        engine=engine,
        system=system,
        observables=observables,
        average_tuples=tuples,
        boxes=tuple(boxes),
        trial_count=int(trials.get("count", 20)),
        trial_seed=int(trials.get("seed", 7)),
        samples=samples,
        options=options,
        sha256=sha256,
    )


def bundled_scenario_dir() -> Path:
    return Path(resources.files("ergolab") / "scenarios")


def bundled_scenarios() -> List[Path]:
    return sorted(bundled_scenario_dir().glob("*.json"))
