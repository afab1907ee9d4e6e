"""Fusion of the three knowledge tiers into one weighted causal model.

Pipeline: the expert tier yields a summary plus a whitelist of high-confidence
directed edges; the data tier runs every learner on every dataset under that
whitelist and votes the results; the literature tier votes its sources
directly. Per-pair conflicts across tiers go to the directed stance with the
highest weighted confidence, agreeing tiers pool their weighted confidences,
and a final orientation pass guarantees an acyclic output.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .agreement import build_scoring_matrix, summarize_tier
from .core import (
    KnowledgeSource,
    Mechanism,
    ScenarioConfig,
    Scm,
    ScmEdge,
    ScoringMatrix,
    Stance,
    Tier,
    TierSummary,
    TierWeights,
    VarPair,
    build_adjacency,
    canonical_pair,
    has_path,
)
from .errors import InvalidInput, ScmFuseError, SingularityError
from .ingest import (
    Dataset,
    load_dataset,
    merge_expert_phases,
    parse_expert_submission,
    parse_source_file,
)
from .learn import (
    LearnedGraph,
    Whitelist,
    fit_parameters,
    graphs_to_sources,
    hc_learn,
    pc_learn,
)

_DIRECTED = (Stance.FORWARD, Stance.BACKWARD)


@dataclass(frozen=True)
class GraphEdit:
    """Post-hoc edit applied to learner outputs before votes are tallied.

    kind: "add" places the directed edge src -> dst in the first learner
    output (by learner then dataset id) covering both endpoints; "reverse"
    rewrites the pair to dst -> src in the first output asserting it, falling
    back to injection; "remove" deletes the pair from the first output
    asserting it. A remove with no asserting output is a no-op.
    """

    kind: str
    src: str
    dst: str

    def __post_init__(self):
        if self.kind not in ("add", "reverse", "remove"):
            raise InvalidInput(f"unknown graph edit kind {self.kind!r}")


@dataclass(frozen=True)
class ScenarioInputs:
    """Everything fuse_all consumes besides the configuration."""

    expert_sources: Tuple[KnowledgeSource, ...] = ()
    literature_sources: Tuple[KnowledgeSource, ...] = ()
    datasets: Tuple[Dataset, ...] = ()
    data_edits: Tuple[GraphEdit, ...] = ()


def load_inputs(config: ScenarioConfig) -> ScenarioInputs:
    """Materialize scenario inputs from the file paths named in the config."""
    submissions = [parse_expert_submission(p) for p in config.expert_submissions]
    experts = tuple(merge_expert_phases(submissions))
    literature = []
    for p in config.literature_sources:
        src = parse_source_file(p)
        if src.tier is not Tier.LITERATURE:
            raise InvalidInput(
                f"{p}: expected a literature-tier source, got {src.tier.value}"
            )
        literature.append(src)
    datasets = tuple(load_dataset(p) for p in config.datasets)
    return ScenarioInputs(
        expert_sources=experts,
        literature_sources=tuple(literature),
        datasets=datasets,
    )


@dataclass(frozen=True)
class CombinedEdge:
    """Cross-tier outcome for one pair."""

    pair: VarPair
    direction: Stance
    confidence: float
    per_tier: Mapping[Tier, Tuple[Stance, float]]

    def endpoints(self) -> Optional[Tuple[str, str]]:
        if self.direction is Stance.FORWARD:
            return (self.pair.a, self.pair.b)
        if self.direction is Stance.BACKWARD:
            return (self.pair.b, self.pair.a)
        return None


@dataclass(frozen=True)
class DataTierResult:
    summary: TierSummary
    graphs: Tuple[LearnedGraph, ...]
    mechanisms: Optional[Dict[str, Mechanism]]
    fit_dataset: Optional[str]
    consensus_edges: Tuple[Tuple[str, str], ...]
    failures: Tuple[dict, ...]
    noop_edits: Tuple[dict, ...]
    matrix: Optional[ScoringMatrix] = None


def _empty_summary(tier: Tier, weight: float, rater_count: int) -> TierSummary:
    # fewer than two variables (or no raters) leaves nothing to score
    return TierSummary(
        tier=tier, alpha=1.0, weight=weight, scores={}, rater_count=rater_count
    )


def _summarize(sources, variables, tier, weight, elicited=None) -> Tuple[TierSummary, Optional[ScoringMatrix]]:
    if len(set(variables)) < 2:
        return _empty_summary(tier, weight, len(sources)), None
    matrix = build_scoring_matrix(sources, variables)
    return summarize_tier(matrix, tier, weight, elicited), matrix


def greedy_acyclic(
    candidates: Sequence[Tuple[str, str, float]],
    allow_flip: bool = False,
) -> Tuple[List[Tuple[str, str, float]], List[dict]]:
    """Insert directed edges in descending confidence, keeping acyclicity.

    Candidates are processed by (-confidence, pair); an edge that would close
    a cycle is flipped when ``allow_flip`` is set and the flip is safe,
    otherwise dropped. Returns the kept edges plus a log of interventions.
    """
    ordered = sorted(
        candidates, key=lambda e: (-e[2], canonical_pair(e[0], e[1]))
    )
    kept: List[Tuple[str, str, float]] = []
    log: List[dict] = []
    for src, dst, conf in ordered:
        adjacency = build_adjacency((s, d) for s, d, _ in kept)
        if not has_path(adjacency, dst, src):
            kept.append((src, dst, conf))
            continue
        if allow_flip and not has_path(adjacency, src, dst):
            kept.append((dst, src, conf))
            log.append(
                {
                    "pair": canonical_pair(src, dst).label(),
                    "action": "flipped",
                    "from": f"{src}->{dst}",
                    "to": f"{dst}->{src}",
                    "confidence": conf,
                }
            )
            continue
        log.append(
            {
                "pair": canonical_pair(src, dst).label(),
                "action": "dropped",
                "from": f"{src}->{dst}",
                "confidence": conf,
                "reason": "both directions close a cycle"
                if allow_flip
                else "edge closes a cycle",
            }
        )
    return kept, log


# ---------------------------------------------------------------------------
# tier runners


def run_expert_tier(
    expert_sources: Sequence[KnowledgeSource],
    variables: Sequence[str],
    weights: TierWeights,
    threshold: float = 0.8,
) -> Tuple[TierSummary, Whitelist, Optional[ScoringMatrix], List[dict]]:
    """Score the expert tier and extract the high-confidence whitelist.

    Pair confidence is the stated (phase-averaged) expert belief, not the
    vote ratio. The whitelist keeps every directed pair whose stated
    confidence reaches ``threshold``; in the pathological case of a cyclic
    expert consensus, lower-confidence offenders are dropped and logged.
    """
    for s in expert_sources:
        if s.tier is not Tier.EXPERT:
            raise InvalidInput(f"source {s.source_id!r} is not expert tier")
    elicited: Dict[VarPair, Dict[Stance, float]] = {}
    sums: Dict[VarPair, Dict[Stance, list]] = {}
    for s in expert_sources:
        for a in s.assertions:
            if a.stance in _DIRECTED:
                sums.setdefault(a.pair, {}).setdefault(a.stance, []).append(
                    a.confidence
                )
    for pair, by_stance in sums.items():
        elicited[pair] = {
            st: sum(vals) / len(vals) for st, vals in by_stance.items()
        }
    summary, matrix = _summarize(
        expert_sources, variables, Tier.EXPERT, weights.expert, elicited
    )
    candidates = []
    for pair, score in summary.scores.items():
        if score.direction in _DIRECTED and score.confidence >= threshold:
            src, dst = (
                (pair.a, pair.b)
                if score.direction is Stance.FORWARD
                else (pair.b, pair.a)
            )
            candidates.append((src, dst, score.confidence))
    kept, log = greedy_acyclic(candidates, allow_flip=False)
    whitelist = Whitelist(tuple(sorted((s, d) for s, d, _ in kept)))
    return summary, whitelist, matrix, log


_LEARNERS = {
    "pc": lambda ds, wl, alpha: pc_learn(ds, wl, ci_alpha=alpha),
    "hc": lambda ds, wl, alpha: hc_learn(ds, wl),
}


def _apply_graph_edit(
    graphs: List[LearnedGraph], edit: GraphEdit
) -> Tuple[List[LearnedGraph], Optional[dict]]:
    pair = canonical_pair(edit.src, edit.dst)
    in_scope = [
        i
        for i, g in enumerate(graphs)
        if edit.src in g.variables and edit.dst in g.variables
    ]
    if edit.kind == "remove":
        for i in in_scope:
            if graphs[i].asserts_pair(pair):
                graphs[i] = graphs[i].with_removed(pair)
                return graphs, None
        return graphs, {
            "edit": "remove",
            "pair": pair.label(),
            "reason": "no learner output asserts this pair",
        }
    if edit.kind == "reverse":
        target = (edit.dst, edit.src)
        for i in in_scope:
            if graphs[i].asserts_pair(pair):
                graphs[i] = graphs[i].with_removed(pair).with_added(*target)
                return graphs, None
        if in_scope:
            i = in_scope[0]
            graphs[i] = graphs[i].with_added(*target)
            return graphs, None
        return graphs, {
            "edit": "reverse",
            "pair": pair.label(),
            "reason": "no learner output covers this pair",
        }
    # add
    if in_scope:
        i = in_scope[0]
        graphs[i] = graphs[i].with_added(edit.src, edit.dst)
        return graphs, None
    return graphs, {
        "edit": "add",
        "pair": pair.label(),
        "reason": "no learner output covers this pair",
    }


def run_data_tier(
    datasets: Sequence[Dataset],
    whitelist: Whitelist,
    variables: Sequence[str],
    weights: TierWeights,
    ci_alpha: float = 0.05,
    learners: Sequence[str] = ("pc", "hc"),
    edits: Sequence[GraphEdit] = (),
) -> DataTierResult:
    """Learn per-dataset graphs, vote them, and fit consensus mechanisms.

    A learner failing on one dataset is recorded and skipped rather than
    aborting the tier. Mechanisms are fitted by least squares on the largest
    dataset over the tier's consensus edges (unresolved pairs dropped;
    cyclic consensus reduced greedily by confidence).
    """
    graphs: List[LearnedGraph] = []
    failures: List[dict] = []
    for name in sorted(set(learners)):
        if name not in _LEARNERS:
            raise InvalidInput(f"unknown learner {name!r}")
        for ds in sorted(datasets, key=lambda d: d.name):
            try:
                graphs.append(_LEARNERS[name](ds, whitelist, ci_alpha))
            except ScmFuseError as exc:
                failures.append(
                    {"learner": name, "dataset": ds.name, "error": type(exc).__name__,
                     "message": str(exc)}
                )
    graphs.sort(key=lambda g: (g.learner_id, g.dataset_id))
    noops: List[dict] = []
    for edit in edits:
        graphs, noop = _apply_graph_edit(graphs, edit)
        if noop is not None:
            noops.append(noop)
    sources = graphs_to_sources(graphs)
    summary, matrix = _summarize(sources, variables, Tier.DATA, weights.data)

    consensus = []
    for pair, score in sorted(summary.scores.items()):
        ends = None
        if score.direction is Stance.FORWARD:
            ends = (pair.a, pair.b)
        elif score.direction is Stance.BACKWARD:
            ends = (pair.b, pair.a)
        if ends is not None:
            consensus.append((ends[0], ends[1], score.weighted_confidence))
    acyclic_consensus, _ = greedy_acyclic(consensus, allow_flip=False)

    mechanisms = None
    fit_dataset = None
    if datasets:
        largest = max(datasets, key=lambda d: (len(d.columns), d.n_rows, d.name))
        fit_dataset = largest.name
        cols = set(largest.columns)
        fit_edges = [
            (s, d) for s, d, _ in acyclic_consensus if s in cols and d in cols
        ]
        try:
            mechanisms = fit_parameters(largest, fit_edges)
        except ScmFuseError as exc:
            failures.append(
                {"learner": "fit", "dataset": largest.name,
                 "error": type(exc).__name__, "message": str(exc)}
            )
    return DataTierResult(
        summary=summary,
        graphs=tuple(graphs),
        mechanisms=mechanisms,
        fit_dataset=fit_dataset,
        consensus_edges=tuple((s, d) for s, d, _ in acyclic_consensus),
        failures=tuple(failures),
        noop_edits=tuple(noops),
        matrix=matrix,
    )


def run_literature_tier(
    literature_sources: Sequence[KnowledgeSource],
    variables: Sequence[str],
    weights: TierWeights,
) -> Tuple[TierSummary, Optional[ScoringMatrix]]:
    """Score the literature tier; sources are ordinary raters."""
    for s in literature_sources:
        if s.tier is not Tier.LITERATURE:
            raise InvalidInput(f"source {s.source_id!r} is not literature tier")
    return _summarize(
        literature_sources, variables, Tier.LITERATURE, weights.literature
    )


# ---------------------------------------------------------------------------
# cross-tier resolution and final orientation


def resolve_conflicts(
    summaries: Sequence[TierSummary],
) -> Tuple[Dict[VarPair, CombinedEdge], List[dict]]:
    """Combine per-tier edge scores into one stance per pair.

    The winning direction is the directed stance with the highest weighted
    confidence across tiers; ties break toward the heavier tier, then the
    later tier. Tiers agreeing with the winner pool their weighted
    confidences; dissenting tiers contribute nothing. Pairs no tier directs
    are unresolved (when some tier left them undirected with positive
    weight) or plain no-edge.
    """
    pairs = sorted({p for s in summaries for p in s.scores})
    combined: Dict[VarPair, CombinedEdge] = {}
    conflicts: List[dict] = []
    for pair in pairs:
        present = [
            (s, s.scores[pair]) for s in summaries if pair in s.scores
        ]
        per_tier = {
            s.tier: (score.direction, score.weighted_confidence)
            for s, score in present
        }
        directed = [
            (score.weighted_confidence, s.weight, s.tier.rank, score.direction)
            for s, score in present
            if score.direction in _DIRECTED
        ]
        if directed:
            winner = max(directed, key=lambda t: (t[0], t[1], t[2]))
            direction = winner[3]
            total = sum(
                score.weighted_confidence
                for _, score in present
                if score.direction is direction
            )
            if len({d[3] for d in directed}) > 1:
                conflicts.append(
                    {
                        "pair": pair.label(),
                        "winner": direction.value,
                        "stances": {
                            s.tier.value: {
                                "direction": score.direction.value,
                                "weighted_confidence": score.weighted_confidence,
                            }
                            for s, score in present
                        },
                    }
                )
            combined[pair] = CombinedEdge(pair, direction, total, per_tier)
            continue
        undirected_total = sum(
            score.weighted_confidence
            for _, score in present
            if score.direction is Stance.UNDIRECTED
        )
        if undirected_total > 0:
            combined[pair] = CombinedEdge(
                pair, Stance.UNDIRECTED, undirected_total, per_tier
            )
        else:
            combined[pair] = CombinedEdge(pair, Stance.NO_EDGE, 0.0, per_tier)
    return combined, conflicts


def orient_and_acyclify(
    combined: Mapping[VarPair, CombinedEdge],
) -> Tuple[List[Tuple[str, str, float]], List[dict], List[dict]]:
    """Produce a fully directed acyclic edge set from combined stances.

    Directed pairs enter greedily in descending confidence; a cycle-closing
    edge is flipped when the flip is safe, else dropped with a diagnostic.
    Unresolved pairs with positive confidence enter undirected and are
    oriented by two rules driven to a fixed point: follow any existing
    directed path between the endpoints, and extend x -> u over u - v into
    u -> v when x and v are non-adjacent (no new collider). Pairs still
    undirected afterwards fall back to low -> high name order, re-running
    the rules after each forced choice. The result is always acyclic.
    """
    directed_candidates = []
    undirected: Dict[VarPair, float] = {}
    for pair, edge in combined.items():
        ends = edge.endpoints()
        if ends is not None:
            directed_candidates.append((ends[0], ends[1], edge.confidence))
        elif edge.direction is Stance.UNDIRECTED and edge.confidence > 0:
            undirected[pair] = edge.confidence

    kept, cycle_log = greedy_acyclic(directed_candidates, allow_flip=True)
    conf_of = {canonical_pair(s, d): c for s, d, c in kept}
    conf_of.update({p: c for p, c in undirected.items()})
    edges: Dict[VarPair, Tuple[str, str]] = {
        canonical_pair(s, d): (s, d) for s, d, _ in kept
    }
    pending = set(undirected)
    forced_log: List[dict] = []

    def adjacent(x: str, y: str) -> bool:
        key = canonical_pair(x, y)
        return key in edges or key in pending

    def orient(pair: VarPair, src: str, dst: str, rule: str) -> None:
        arrows = build_adjacency(edges.values())
        if has_path(arrows, dst, src):
            # cycle avoidance outranks the collider rule
            src, dst = dst, src
            rule = "path"
        edges[pair] = (src, dst)
        pending.discard(pair)
        forced_log.append(
            {"pair": pair.label(), "oriented": f"{src}->{dst}", "rule": rule}
        )

    def apply_rules() -> None:
        changed = True
        while changed:
            changed = False
            parents: Dict[str, list] = {}
            for src, dst in edges.values():
                parents.setdefault(dst, []).append(src)
            arrows = build_adjacency(edges.values())
            for pair in sorted(pending):
                decision = None
                for u, v in ((pair.a, pair.b), (pair.b, pair.a)):
                    if any(
                        not adjacent(x, v)
                        for x in sorted(parents.get(u, []))
                        if x != v
                    ):
                        decision = (u, v, "no_new_collider")
                        break
                if decision is None:
                    for u, v in ((pair.a, pair.b), (pair.b, pair.a)):
                        if has_path(arrows, u, v):
                            decision = (u, v, "path")
                            break
                if decision is not None:
                    orient(pair, decision[0], decision[1], decision[2])
                    changed = True
                    break  # adjacency changed; restart the sweep

    apply_rules()
    while pending:
        pair = min(pending)
        orient(pair, pair.a, pair.b, "lexicographic")
        apply_rules()

    final = sorted(
        (src, dst, conf_of[pair]) for pair, (src, dst) in edges.items()
    )
    return final, cycle_log, forced_log


@dataclass(frozen=True)
class FusionResult:
    scm: Scm
    summaries: Mapping[Tier, TierSummary]
    whitelist: Whitelist
    combined: Mapping[VarPair, CombinedEdge]
    conflicts: Tuple[dict, ...]
    cycle_breaks: Tuple[dict, ...]
    forced_orientations: Tuple[dict, ...]
    data_result: DataTierResult
    matrices: Mapping[Tier, Optional[ScoringMatrix]]
    whitelist_log: Tuple[dict, ...]
    config: ScenarioConfig

    def report(self) -> dict:
        """JSON-ready run report with deterministic ordering."""
        tiers: Dict[str, dict] = {}
        for tier in (Tier.EXPERT, Tier.DATA, Tier.LITERATURE):
            summary = self.summaries[tier]
            matrix = self.matrices.get(tier)
            entry = {
                "alpha": summary.alpha,
                "weight": summary.weight,
                "rater_count": summary.rater_count,
                "matrix": matrix.to_records() if matrix is not None else [],
                "scores": [
                    {
                        "pair": p.label(),
                        "direction": sc.direction.value,
                        "confidence": sc.confidence,
                        "weighted_confidence": sc.weighted_confidence,
                    }
                    for p, sc in sorted(summary.scores.items())
                ],
            }
            if tier is Tier.EXPERT:
                entry["whitelist"] = [list(e) for e in self.whitelist.edges]
                entry["whitelist_log"] = list(self.whitelist_log)
            if tier is Tier.DATA:
                entry["learned_graphs"] = [
                    {
                        "learner": g.learner_id,
                        "dataset": g.dataset_id,
                        "directed": [list(e) for e in g.directed],
                        "undirected": [p.label() for p in g.undirected],
                    }
                    for g in self.data_result.graphs
                ]
                entry["failures"] = list(self.data_result.failures)
                entry["noop_edits"] = list(self.data_result.noop_edits)
                entry["fit_dataset"] = self.data_result.fit_dataset
            tiers[tier.value] = entry
        return {
            "problem_statement": self.config.problem_statement,
            "keywords": list(self.config.keywords),
            "weights": {
                "expert": self.config.weights.expert,
                "data": self.config.weights.data,
                "literature": self.config.weights.literature,
                "ordering_warning": self.config.weights.ordering_warning,
            },
            "tier1_threshold": self.config.tier1_threshold,
            "ci_alpha": self.config.ci_alpha,
            "variables": list(self.scm.variables),
            "tiers": tiers,
            "combined": [
                {
                    "pair": p.label(),
                    "direction": e.direction.value,
                    "confidence": e.confidence,
                    "per_tier": {
                        t.value: {"direction": d.value, "weighted_confidence": w}
                        for t, (d, w) in sorted(
                            e.per_tier.items(), key=lambda kv: kv[0].rank
                        )
                    },
                }
                for p, e in sorted(self.combined.items())
            ],
            "conflicts": list(self.conflicts),
            "cycle_breaks": list(self.cycle_breaks),
            "forced_orientations": list(self.forced_orientations),
            "graph": scm_to_dict(self.scm),
        }


def scm_to_dict(scm: Scm) -> dict:
    """JSON-ready model: sorted edges, mechanisms keyed by variable."""
    out: dict = {
        "variables": list(scm.variables),
        "exogenous": list(scm.exogenous),
        "edges": [
            {"from": e.src, "to": e.dst, "confidence": e.confidence}
            for e in sorted(scm.edges, key=lambda e: (e.src, e.dst))
        ],
    }
    if scm.mechanisms is None:
        out["mechanisms"] = None
    else:
        out["mechanisms"] = {
            v: {
                "parents": list(m.parents),
                "coefficients": list(m.coefficients),
                "intercept": m.intercept,
                "noise_variance": m.noise_variance,
            }
            for v, m in sorted(scm.mechanisms.items())
        }
    return out


def scm_to_dot(scm: Scm) -> str:
    """Graphviz rendering; edge labels carry confidence to 4 decimals."""
    lines = ["digraph fused {"]
    for v in sorted(scm.variables):
        lines.append(f'  "{v}";')
    for e in sorted(scm.edges, key=lambda e: (e.src, e.dst)):
        lines.append(f'  "{e.src}" -> "{e.dst}" [label="{e.confidence:.4f}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def scenario_variables(inputs: ScenarioInputs) -> Tuple[str, ...]:
    """Union of dataset columns and every variable mentioned by any source."""
    out = set()
    for ds in inputs.datasets:
        out.update(ds.columns)
    for s in itertools.chain(inputs.expert_sources, inputs.literature_sources):
        out.update(s.scope)
    return tuple(sorted(out))


def fuse_all(config: ScenarioConfig, inputs: ScenarioInputs) -> FusionResult:
    """Run the whole fusion pipeline over an in-memory scenario."""
    variables = scenario_variables(inputs)
    t1_summary, whitelist, t1_matrix, wl_log = run_expert_tier(
        inputs.expert_sources, variables, config.weights, config.tier1_threshold
    )
    data = run_data_tier(
        inputs.datasets,
        whitelist,
        variables,
        config.weights,
        ci_alpha=config.ci_alpha,
        learners=config.learners,
        edits=inputs.data_edits,
    )
    t3_summary, t3_matrix = run_literature_tier(
        inputs.literature_sources, variables, config.weights
    )
    combined, conflicts = resolve_conflicts([t1_summary, data.summary, t3_summary])
    final_edges, cycle_log, forced_log = orient_and_acyclify(combined)

    mechanisms = None
    if data.mechanisms is not None:
        fit_ds = next(
            ds for ds in inputs.datasets if ds.name == data.fit_dataset
        )
        cols = set(fit_ds.columns)
        surviving = [(s, d) for s, d, _ in final_edges if s in cols and d in cols]
        fitted_edges = {
            (s, d) for s, d in data.consensus_edges if s in cols and d in cols
        }
        if set(surviving) == fitted_edges:
            fitted = data.mechanisms
        else:
            try:
                fitted = fit_parameters(fit_ds, surviving)
            except ScmFuseError:
                fitted = None
        if fitted is not None:
            # only variables whose full parent set was observable in the fit
            parent_map: Dict[str, set] = {v: set() for v in variables}
            for s, d, _ in final_edges:
                parent_map[d].add(s)
            mechanisms = {
                v: m
                for v, m in fitted.items()
                if parent_map[v] == set(m.parents)
            }

    scm = Scm(
        variables=tuple(variables),
        edges=tuple(ScmEdge(s, d, c) for s, d, c in final_edges),
        mechanisms=mechanisms,
    )
    return FusionResult(
        scm=scm,
        summaries={
            Tier.EXPERT: t1_summary,
            Tier.DATA: data.summary,
            Tier.LITERATURE: t3_summary,
        },
        whitelist=whitelist,
        combined=combined,
        conflicts=tuple(conflicts),
        cycle_breaks=tuple(cycle_log),
        forced_orientations=tuple(forced_log),
        data_result=data,
        matrices={
            Tier.EXPERT: t1_matrix,
            Tier.DATA: data.matrix,
            Tier.LITERATURE: t3_matrix,
        },
        whitelist_log=tuple(wl_log),
        config=config,
    )
