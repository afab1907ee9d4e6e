"""Ground-truth handling, simulation, scoring and the sensitivity harness.

The sensitivity protocol corrupts one tier at a time with up to three
cumulative events: inject a false edge, reverse a true edge, remove a true
edge. Each event touches a single source of the target tier (for the data
tier, a single learner output, after learning), so a healthy tier can
outvote it. The grid reports per-tier agreement and recovery metrics for
the baseline plus every tier-by-schedule combination.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .core import (
    KnowledgeSource,
    EdgeAssertion,
    ScenarioConfig,
    Scm,
    Stance,
    Tier,
    canonical_pair,
    is_acyclic,
    topological_order,
)
from .errors import InvalidInput, InvalidSpec, NoOpWarning, ParseError
from .fuse import (
    FusionResult,
    GraphEdit,
    ScenarioInputs,
    fuse_all,
)
from .ingest import Dataset


@dataclass(frozen=True)
class GroundTruthSpec:
    """Linear-Gaussian data-generating model used for scoring and simulation."""

    variables: Tuple[str, ...]
    edges: Tuple[Tuple[str, str, float], ...]  # (src, dst, coefficient)
    intercepts: Mapping[str, float]
    noise_variances: Mapping[str, float]

    def __post_init__(self):
        varset = set(self.variables)
        if len(varset) != len(self.variables):
            raise InvalidSpec("duplicate variable names")
        seen = set()
        for src, dst, coeff in self.edges:
            if src not in varset or dst not in varset:
                raise InvalidSpec(f"edge {src}->{dst} uses unknown variables")
            if src == dst:
                raise InvalidSpec(f"self-loop on {src!r}")
            key = canonical_pair(src, dst)
            if key in seen:
                raise InvalidSpec(f"pair {key.label()} appears twice")
            seen.add(key)
            if not math.isfinite(coeff):
                raise InvalidSpec(f"non-finite coefficient on {src}->{dst}")
        if not is_acyclic(self.variables, [(s, d) for s, d, _ in self.edges]):
            raise InvalidSpec("ground truth contains a directed cycle")
        for v in self.variables:
            if v not in self.intercepts or v not in self.noise_variances:
                raise InvalidSpec(f"missing intercept or noise variance for {v!r}")
            if not math.isfinite(self.intercepts[v]):
                raise InvalidSpec(f"non-finite intercept for {v!r}")
            var = self.noise_variances[v]
            if not math.isfinite(var) or var < 0:
                raise InvalidSpec(f"invalid noise variance {var!r} for {v!r}")

    def edge_set(self) -> frozenset:
        return frozenset((s, d) for s, d, _ in self.edges)

    def parents(self) -> Dict[str, List[Tuple[str, float]]]:
        out: Dict[str, List[Tuple[str, float]]] = {v: [] for v in self.variables}
        for src, dst, coeff in self.edges:
            out[dst].append((src, coeff))
        return out


def ground_truth_from_dict(rec: dict, where: str = "<spec>") -> GroundTruthSpec:
    for key in ("variables", "edges", "intercepts", "noise_variances"):
        if key not in rec:
            raise ParseError(
                f"{where}: missing field {key!r}", context={"file": where, "field": key}
            )
    edges = []
    for i, e in enumerate(rec["edges"]):
        for key in ("from", "to", "coefficient"):
            if key not in e:
                raise ParseError(
                    f"{where}: edge {i} missing field {key!r}",
                    context={"file": where, "edge": i, "field": key},
                )
        edges.append((str(e["from"]), str(e["to"]), float(e["coefficient"])))
    return GroundTruthSpec(
        variables=tuple(str(v) for v in rec["variables"]),
        edges=tuple(edges),
        intercepts={k: float(v) for k, v in rec["intercepts"].items()},
        noise_variances={k: float(v) for k, v in rec["noise_variances"].items()},
    )


def ground_truth_to_dict(spec: GroundTruthSpec) -> dict:
    return {
        "variables": list(spec.variables),
        "edges": [
            {"from": s, "to": d, "coefficient": c} for s, d, c in spec.edges
        ],
        "intercepts": {v: spec.intercepts[v] for v in spec.variables},
        "noise_variances": {v: spec.noise_variances[v] for v in spec.variables},
    }


def load_ground_truth(path) -> GroundTruthSpec:
    path = Path(path)
    try:
        rec = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}",
            context={"file": str(path), "line": exc.lineno},
        ) from exc
    return ground_truth_from_dict(rec, where=str(path))


def simulate_data(
    spec: GroundTruthSpec,
    n: int,
    seed: int,
    columns: Optional[Sequence[str]] = None,
    name: Optional[str] = None,
) -> Dataset:
    """Ancestral sampling from the linear-Gaussian model.

    The full system is always drawn in declared variable order from one
    seeded generator, then projected onto ``columns``; a subset therefore
    shares the exact draws of the full table under the same seed.
    """
    if n < 1:
        raise InvalidInput(f"sample size {n} must be positive")
    order = topological_order(
        spec.variables, [(s, d) for s, d, _ in spec.edges]
    )
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((n, len(spec.variables)))
    index = {v: i for i, v in enumerate(spec.variables)}
    values = np.empty((n, len(spec.variables)))
    parents = spec.parents()
    for var in order:
        j = index[var]
        col = spec.intercepts[var] + noise[:, j] * math.sqrt(
            spec.noise_variances[var]
        )
        for parent, coeff in parents[var]:
            col = col + coeff * values[:, index[parent]]
        values[:, j] = col
    if columns is None:
        columns = spec.variables
    else:
        unknown = [c for c in columns if c not in index]
        if unknown:
            raise InvalidInput(f"unknown columns {unknown}")
    out = values[:, [index[c] for c in columns]]
    return Dataset(
        name=name or f"sim_seed{seed}", columns=tuple(columns), values=out
    )


# ---------------------------------------------------------------------------
# scoring


@dataclass(frozen=True)
class MetricsReport:
    """Pairwise recovery metrics of a predicted graph against the truth."""

    tp: int
    tn: int
    fp: int
    fn: int
    tpr: float
    fdr: float
    mcc: float

    def to_dict(self) -> dict:
        return {
            "tp": self.tp,
            "tn": self.tn,
            "fp": self.fp,
            "fn": self.fn,
            "tpr": self.tpr,
            "fdr": self.fdr,
            "mcc": self.mcc,
        }


def compare_graphs(predicted: Scm, truth: GroundTruthSpec) -> MetricsReport:
    """Score edge recovery over all unordered pairs.

    A pair present in both graphs with opposite directions counts as one
    false positive and one false negative. Ratios with zero denominators
    are reported as 0.
    """
    if set(predicted.variables) != set(truth.variables):
        raise InvalidInput(
            "predicted and truth variable sets differ",
            context={
                "predicted_only": sorted(
                    set(predicted.variables) - set(truth.variables)
                ),
                "truth_only": sorted(
                    set(truth.variables) - set(predicted.variables)
                ),
            },
        )
    pred = predicted.edge_set()
    true = truth.edge_set()
    tp = tn = fp = fn = 0
    for a, b in itertools.combinations(sorted(truth.variables), 2):
        p = (a, b) if (a, b) in pred else ((b, a) if (b, a) in pred else None)
        t = (a, b) if (a, b) in true else ((b, a) if (b, a) in true else None)
        if p is None and t is None:
            tn += 1
        elif p is None:
            fn += 1
        elif t is None:
            fp += 1
        elif p == t:
            tp += 1
        else:  # same pair, opposite direction
            fp += 1
            fn += 1
    tpr = tp / (tp + fn) if tp + fn else 0.0
    fdr = fp / (fp + tp) if fp + tp else 0.0
    denom = math.sqrt(
        float(tp + fp) * float(tp + fn) * float(tn + fp) * float(tn + fn)
    )
    mcc = (tp * tn - fp * fn) / denom if denom else 0.0
    return MetricsReport(tp=tp, tn=tn, fp=fp, fn=fn, tpr=tpr, fdr=fdr, mcc=mcc)


# ---------------------------------------------------------------------------
# perturbations


class PerturbationKind(Enum):
    ADD_FALSE = "add_false"
    REVERSE_TRUE = "reverse_true"
    REMOVE_TRUE = "remove_true"


@dataclass(frozen=True)
class Perturbation:
    """One corruption event: kind, the edge src -> dst, and the target tier."""

    kind: PerturbationKind
    src: str
    dst: str
    tier: Tier

    @property
    def pair(self):
        return canonical_pair(self.src, self.dst)


def _edit_sources(
    sources: Tuple[KnowledgeSource, ...], p: Perturbation
) -> Tuple[Optional[Tuple[KnowledgeSource, ...]], Optional[str]]:
    """Apply one event to a tier's source list; None signals a no-op."""
    pair = p.pair
    if p.kind is PerturbationKind.ADD_FALSE:
        if not sources:
            return None, "tier has no sources"
        target = sources[0]
        kept = tuple(a for a in target.assertions if a.pair != pair)
        edited = replace(
            target,
            scope=target.scope | {p.src, p.dst},
            assertions=kept + (EdgeAssertion.directed(p.src, p.dst, 1.0),),
        )
        return (edited,) + sources[1:], None
    if p.kind is PerturbationKind.REVERSE_TRUE:
        for i, s in enumerate(sources):
            hit = s.assertion_for(pair)
            if hit is not None and hit.stance in (Stance.FORWARD, Stance.BACKWARD):
                kept = tuple(a for a in s.assertions if a.pair != pair)
                edited = replace(
                    s,
                    assertions=kept
                    + (EdgeAssertion.directed(p.dst, p.src, hit.confidence),),
                )
                return sources[:i] + (edited,) + sources[i + 1 :], None
        # nobody asserts it: the altered (reversed) claim is injected instead
        if not sources:
            return None, "tier has no sources"
        target = sources[0]
        kept = tuple(a for a in target.assertions if a.pair != pair)
        edited = replace(
            target,
            scope=target.scope | {p.src, p.dst},
            assertions=kept + (EdgeAssertion.directed(p.dst, p.src, 1.0),),
        )
        return (edited,) + sources[1:], None
    # REMOVE_TRUE
    for i, s in enumerate(sources):
        if s.assertion_for(pair) is not None:
            edited = replace(
                s, assertions=tuple(a for a in s.assertions if a.pair != pair)
            )
            return sources[:i] + (edited,) + sources[i + 1 :], None
    return None, "no source asserts this pair"


_EDIT_KIND = {
    PerturbationKind.ADD_FALSE: "add",
    PerturbationKind.REVERSE_TRUE: "reverse",
    PerturbationKind.REMOVE_TRUE: "remove",
}


def apply_perturbation(inputs: ScenarioInputs, p: Perturbation) -> ScenarioInputs:
    """Return a perturbed copy of the scenario inputs (originals untouched).

    Expert and literature events edit the first matching source directly.
    Data events are queued as post-hoc learner-output edits, applied inside
    the data tier after learning. An event that matches nothing raises
    NoOpWarning and returns the inputs unchanged.
    """
    if p.tier is Tier.DATA:
        return replace(
            inputs,
            data_edits=inputs.data_edits
            + (GraphEdit(_EDIT_KIND[p.kind], p.src, p.dst),),
        )
    if p.tier is Tier.EXPERT:
        edited, why = _edit_sources(inputs.expert_sources, p)
        if edited is None:
            warnings.warn(
                f"{p.kind.value} on {p.pair.label()} changed nothing: {why}",
                NoOpWarning,
                stacklevel=2,
            )
            return inputs
        return replace(inputs, expert_sources=edited)
    edited, why = _edit_sources(inputs.literature_sources, p)
    if edited is None:
        warnings.warn(
            f"{p.kind.value} on {p.pair.label()} changed nothing: {why}",
            NoOpWarning,
            stacklevel=2,
        )
        return inputs
    return replace(inputs, literature_sources=edited)


# ---------------------------------------------------------------------------
# sensitivity grid


#: Default corruption events: a false edge, a reversed true edge, a removed
#: true edge, applied cumulatively.
DEFAULT_EVENTS: Tuple[Tuple[str, PerturbationKind, str, str], ...] = (
    ("A1", PerturbationKind.ADD_FALSE, "C", "D"),
    ("A2", PerturbationKind.REVERSE_TRUE, "E", "G"),
    ("A3", PerturbationKind.REMOVE_TRUE, "B", "F"),
)

SENSITIVITY_COLUMNS = (
    "tier",
    "alteration",
    "alpha_t1",
    "alpha_t2",
    "alpha_t3",
    "tpr",
    "fdr",
    "mcc",
)

_TIER_LABEL = {Tier.EXPERT: "tier1", Tier.DATA: "tier2", Tier.LITERATURE: "tier3"}


def _grid_row(tier_label: str, alteration: str, result: FusionResult,
              metrics: MetricsReport) -> dict:
    return {
        "tier": tier_label,
        "alteration": alteration,
        "alpha_t1": result.summaries[Tier.EXPERT].alpha,
        "alpha_t2": result.summaries[Tier.DATA].alpha,
        "alpha_t3": result.summaries[Tier.LITERATURE].alpha,
        "tpr": metrics.tpr,
        "fdr": metrics.fdr,
        "mcc": metrics.mcc,
    }


def sensitivity_run(
    config: ScenarioConfig,
    inputs: ScenarioInputs,
    truth: GroundTruthSpec,
    events: Sequence[Tuple[str, PerturbationKind, str, str]] = DEFAULT_EVENTS,
) -> List[dict]:
    """Baseline plus every tier under cumulative corruption schedules.

    Returns one row per run: the clean baseline, then for each tier the
    schedules A1, A1+A2, ..., up to all events. Inputs are never mutated;
    every run starts from the pristine scenario.
    """
    rows = []
    baseline = fuse_all(config, inputs)
    rows.append(
        _grid_row("none", "none", baseline, compare_graphs(baseline.scm, truth))
    )
    for tier in (Tier.EXPERT, Tier.DATA, Tier.LITERATURE):
        for k in range(1, len(events) + 1):
            label = "+".join(e[0] for e in events[:k])
            current = inputs
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NoOpWarning)
                for _, kind, src, dst in events[:k]:
                    current = apply_perturbation(
                        current, Perturbation(kind, src, dst, tier)
                    )
            result = fuse_all(config, current)
            rows.append(
                _grid_row(
                    _TIER_LABEL[tier],
                    label,
                    result,
                    compare_graphs(result.scm, truth),
                )
            )
    return rows


def sensitivity_to_csv(rows: Sequence[Mapping]) -> str:
    """Render grid rows as CSV with full-precision floats."""
    lines = [",".join(SENSITIVITY_COLUMNS)]
    for row in rows:
        cells = []
        for col in SENSITIVITY_COLUMNS:
            v = row[col]
            cells.append(repr(float(v)) if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
