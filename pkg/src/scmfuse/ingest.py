"""Input parsing: knowledge-source JSON, expert submissions, CSV datasets.

All readers fail loudly with ParseError/ValidationError carrying enough
context (file, line, field) to locate the offending record.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .core import (
    EdgeAssertion,
    KnowledgeSource,
    ScenarioConfig,
    Stance,
    Tier,
    canonical_pair,
    validate_weights,
)
from .errors import ParseError, ValidationError

_RELATIONS = {"causes", "caused_by", "no_edge", "undirected"}
_PHASES = ("initial", "informed")


@dataclass(frozen=True)
class Dataset:
    """Numeric observation table: named columns over an (n, q) float array."""

    name: str
    columns: Tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if len(set(self.columns)) != len(self.columns):
            raise ValidationError(f"dataset {self.name!r} has duplicate columns")
        if values.ndim != 2 or values.shape[1] != len(self.columns):
            raise ValidationError(
                f"dataset {self.name!r}: value shape {values.shape} does not "
                f"match {len(self.columns)} columns"
            )
        if values.shape[0] < 1:
            raise ValidationError(f"dataset {self.name!r} has no rows")
        if not np.all(np.isfinite(values)):
            raise ValidationError(f"dataset {self.name!r} contains non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]

    def select(self, columns: Sequence[str]) -> "Dataset":
        idx = [self.columns.index(c) for c in columns]
        return Dataset(self.name, tuple(columns), self.values[:, idx])


@dataclass(frozen=True)
class ExpertSubmission:
    """One elicitation round from one expert."""

    expert_id: str
    phase: str  # "initial" | "informed"
    assertions: Tuple[EdgeAssertion, ...]

    def __post_init__(self):
        if self.phase not in _PHASES:
            raise ValidationError(
                f"unknown phase {self.phase!r} for expert {self.expert_id!r}"
            )


def _parse_assertion(rec: dict, where: str, index: int) -> EdgeAssertion:
    for key in ("from", "to", "relation"):
        if key not in rec:
            raise ParseError(
                f"{where}: assertion {index} missing field {key!r}",
                context={"file": where, "assertion": index, "field": key},
            )
    src, dst, rel = rec["from"], rec["to"], rec["relation"]
    if rel not in _RELATIONS:
        raise ParseError(
            f"{where}: assertion {index} has unknown relation {rel!r}",
            context={"file": where, "assertion": index, "field": "relation"},
        )
    conf = rec.get("confidence", 1.0)
    if not isinstance(conf, (int, float)) or isinstance(conf, bool):
        raise ParseError(
            f"{where}: assertion {index} confidence is not numeric",
            context={"file": where, "assertion": index, "field": "confidence"},
        )
    conf = float(conf)
    if not (0.0 <= conf <= 1.0):
        raise ValidationError(
            f"{where}: assertion {index} confidence {conf} outside [0, 1]",
            context={"file": where, "assertion": index, "field": "confidence"},
        )
    try:
        if rel == "causes":
            return EdgeAssertion.directed(src, dst, conf)
        if rel == "caused_by":
            return EdgeAssertion.directed(dst, src, conf)
        pair = canonical_pair(src, dst)
    except Exception as exc:
        raise ParseError(
            f"{where}: assertion {index}: {exc}",
            context={"file": where, "assertion": index},
        ) from exc
    stance = Stance.NO_EDGE if rel == "no_edge" else Stance.UNDIRECTED
    return EdgeAssertion(pair, stance, conf)


def _mentioned(assertions: Iterable[EdgeAssertion]) -> frozenset:
    out = set()
    for a in assertions:
        out.update((a.pair.a, a.pair.b))
    return frozenset(out)


def source_from_dict(rec: dict, where: str = "<source>") -> KnowledgeSource:
    for key in ("id", "tier", "scope", "assertions"):
        if key not in rec:
            raise ParseError(
                f"{where}: missing field {key!r}",
                context={"file": where, "field": key},
            )
    try:
        tier = Tier(rec["tier"])
    except ValueError:
        raise ParseError(
            f"{where}: unknown tier {rec['tier']!r}",
            context={"file": where, "field": "tier"},
        ) from None
    assertions = tuple(
        _parse_assertion(a, where, i) for i, a in enumerate(rec["assertions"])
    )
    scope_field = rec["scope"]
    if scope_field == "global":
        return KnowledgeSource(
            source_id=str(rec["id"]),
            tier=tier,
            scope=_mentioned(assertions),
            assertions=assertions,
            global_scope=True,
        )
    if not isinstance(scope_field, list):
        raise ParseError(
            f"{where}: scope must be \"global\" or a list of variable names",
            context={"file": where, "field": "scope"},
        )
    return KnowledgeSource(
        source_id=str(rec["id"]),
        tier=tier,
        scope=frozenset(str(v) for v in scope_field),
        assertions=assertions,
    )


def parse_source_file(path) -> KnowledgeSource:
    """Read one knowledge-source JSON file into a KnowledgeSource."""
    path = Path(path)
    try:
        rec = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}",
            context={"file": str(path), "line": exc.lineno},
        ) from exc
    if not isinstance(rec, dict):
        raise ParseError(f"{path}: expected a JSON object", context={"file": str(path)})
    return source_from_dict(rec, where=str(path))


def source_to_dict(source: KnowledgeSource) -> dict:
    """Serialize a source back to the file schema (round-trip safe)."""
    assertions = []
    for a in sorted(source.assertions, key=lambda a: (a.pair.a, a.pair.b)):
        if a.stance is Stance.FORWARD:
            rec = {"from": a.pair.a, "to": a.pair.b, "relation": "causes"}
        elif a.stance is Stance.BACKWARD:
            rec = {"from": a.pair.b, "to": a.pair.a, "relation": "causes"}
        elif a.stance is Stance.NO_EDGE:
            rec = {"from": a.pair.a, "to": a.pair.b, "relation": "no_edge"}
        else:
            rec = {"from": a.pair.a, "to": a.pair.b, "relation": "undirected"}
        rec["confidence"] = a.confidence
        assertions.append(rec)
    return {
        "id": source.source_id,
        "tier": source.tier.value,
        "scope": "global" if source.global_scope else sorted(source.scope),
        "assertions": assertions,
    }


def parse_expert_submission(path) -> ExpertSubmission:
    """Read one expert elicitation round from JSON."""
    path = Path(path)
    try:
        rec = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}",
            context={"file": str(path), "line": exc.lineno},
        ) from exc
    for key in ("expert_id", "phase", "assertions"):
        if key not in rec:
            raise ParseError(
                f"{path}: missing field {key!r}",
                context={"file": str(path), "field": key},
            )
    assertions = tuple(
        _parse_assertion(a, str(path), i) for i, a in enumerate(rec["assertions"])
    )
    seen = set()
    for a in assertions:
        if a.pair in seen:
            raise ValidationError(
                f"{path}: pair {a.pair.label()} asserted twice in one phase",
                context={"file": str(path)},
            )
        seen.add(a.pair)
    return ExpertSubmission(
        expert_id=str(rec["expert_id"]),
        phase=str(rec["phase"]),
        assertions=assertions,
    )


def merge_expert_phases(
    submissions: Sequence[ExpertSubmission],
) -> List[KnowledgeSource]:
    """Collapse multi-phase elicitation into one source per expert.

    Per pair, the stance from the expert's latest phase wins; the stated
    confidence is averaged over all of that expert's phases, with a phase
    that omits the pair (or contradicts the winning stance) contributing
    zero. Each expert therefore counts as exactly one rater downstream.
    """
    by_expert: dict = {}
    for sub in submissions:
        by_expert.setdefault(sub.expert_id, []).append(sub)
    sources = []
    for expert_id in sorted(by_expert):
        subs = by_expert[expert_id]
        phases_seen = [s.phase for s in subs]
        if len(set(phases_seen)) != len(phases_seen):
            raise ValidationError(
                f"expert {expert_id!r} submitted the same phase twice"
            )
        subs.sort(key=lambda s: _PHASES.index(s.phase))
        n_phases = len(subs)
        winning: dict = {}
        for sub in subs:  # later phases overwrite direction
            for a in sub.assertions:
                winning[a.pair] = a.stance
        merged = []
        for pair in sorted(winning):
            stance = winning[pair]
            total = 0.0
            for sub in subs:
                a = next((x for x in sub.assertions if x.pair == pair), None)
                if a is not None and a.stance is stance:
                    total += a.confidence
            merged.append(EdgeAssertion(pair, stance, total / n_phases))
        merged_t = tuple(merged)
        sources.append(
            KnowledgeSource(
                source_id=expert_id,
                tier=Tier.EXPERT,
                scope=_mentioned(merged_t),
                assertions=merged_t,
            )
        )
    return sources


def load_dataset(path, name: Optional[str] = None) -> Dataset:
    """Read an RFC-4180 CSV with a header row into a Dataset.

    Every cell below the header must parse as a finite float; the first
    offending cell is reported with row and column coordinates.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file", context={"file": str(path)}) from None
        header = [h.strip() for h in header]
        if any(not h for h in header):
            raise ParseError(
                f"{path}: blank column name in header", context={"file": str(path)}
            )
        if len(set(header)) != len(header):
            raise ParseError(
                f"{path}: duplicate column names in header",
                context={"file": str(path)},
            )
        rows = []
        for line_no, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise ParseError(
                    f"{path}: line {line_no} has {len(rec)} fields, "
                    f"expected {len(header)}",
                    context={"file": str(path), "line": line_no},
                )
            parsed = []
            for col, cell in zip(header, rec):
                try:
                    val = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}: line {line_no}, column {col!r}: "
                        f"non-numeric value {cell!r}",
                        context={"file": str(path), "line": line_no, "column": col},
                    ) from None
                parsed.append(val)
            rows.append(parsed)
    if not rows:
        raise ParseError(
            f"{path}: header-only file, no observations",
            context={"file": str(path)},
        )
    values = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ParseError(
            f"{path}: non-finite value in data", context={"file": str(path)}
        )
    return Dataset(name=name or path.stem, columns=tuple(header), values=values)


def write_dataset(dataset: Dataset, path) -> None:
    """Write a Dataset as RFC-4180 CSV (header + repr-formatted floats)."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(dataset.columns)
        for row in dataset.values:
            writer.writerow([repr(float(v)) for v in row])


def load_config(path) -> ScenarioConfig:
    """Read a scenario configuration JSON; input paths resolve relative to it."""
    path = Path(path)
    try:
        rec = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}",
            context={"file": str(path), "line": exc.lineno},
        ) from exc
    if not isinstance(rec, dict):
        raise ParseError(f"{path}: expected a JSON object", context={"file": str(path)})
    weights_rec = rec.get("tier_weights", {})
    weights = validate_weights(
        float(weights_rec.get("expert", 0.2)),
        float(weights_rec.get("data", 0.3)),
        float(weights_rec.get("literature", 0.5)),
    )
    base = path.parent

    def _resolve(p):
        return str((base / p) if not Path(p).is_absolute() else Path(p))

    gt = rec.get("ground_truth")
    return ScenarioConfig(
        problem_statement=str(rec.get("problem_statement", "")),
        keywords=tuple(str(k) for k in rec.get("keywords", [])),
        weights=weights,
        tier1_threshold=float(rec.get("tier1_threshold", 0.8)),
        ci_alpha=float(rec.get("ci_alpha", 0.05)),
        sample_seed=int(rec.get("sample_seed", 0)),
        learners=tuple(rec.get("learners", ["pc", "hc"])),
        expert_submissions=tuple(_resolve(p) for p in rec.get("expert_submissions", [])),
        literature_sources=tuple(_resolve(p) for p in rec.get("literature_sources", [])),
        datasets=tuple(_resolve(p) for p in rec.get("datasets", [])),
        ground_truth=_resolve(gt) if gt else None,
    )
