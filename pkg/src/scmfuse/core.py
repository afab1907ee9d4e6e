"""Core domain types for tiered causal-knowledge fusion.

Variables are plain strings. A variable pair is always stored in canonical
(lexicographically sorted) order; directionality lives in the stance, with
Forward meaning low-name -> high-name.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    InvalidInput,
    InvalidPair,
    InvalidRow,
    InvalidWeights,
    OrderingWarning,
    ScopeError,
)


class Stance(Enum):
    """Stance of a source toward a canonical pair.

    The first four members are exactly the scoring-matrix columns. UNDIRECTED
    only appears on assertions (an edge of unknown direction); its vote mass is
    split half Forward, half Backward when a matrix is built. NO_INFO is never
    stored on an assertion: silence outside scope already encodes it.
    """

    FORWARD = "forward"
    BACKWARD = "backward"
    NO_EDGE = "no_edge"
    NO_INFO = "no_info"
    UNDIRECTED = "undirected"


#: Scoring-matrix column order.
MATRIX_COLUMNS: Tuple[Stance, ...] = (
    Stance.FORWARD,
    Stance.BACKWARD,
    Stance.NO_EDGE,
    Stance.NO_INFO,
)


class Tier(Enum):
    """Knowledge tiers in ascending order of the default weighting."""

    EXPERT = "expert"
    DATA = "data"
    LITERATURE = "literature"

    @property
    def rank(self) -> int:
        return _TIER_RANK[self]


_TIER_RANK = {Tier.EXPERT: 1, Tier.DATA: 2, Tier.LITERATURE: 3}


@dataclass(frozen=True, order=True)
class VarPair:
    """Unordered variable pair in canonical (sorted) storage order."""

    a: str
    b: str

    def __post_init__(self):
        if not self.a or not self.b:
            raise InvalidPair("pair endpoints must be non-empty names")
        if self.a == self.b:
            raise InvalidPair(f"self-pair {self.a!r} is not a valid pair")
        if self.a > self.b:
            raise InvalidPair(
                f"pair ({self.a!r}, {self.b!r}) not in canonical order; "
                "use canonical_pair()"
            )

    def __iter__(self):
        return iter((self.a, self.b))

    def label(self) -> str:
        return f"{self.a},{self.b}"


def canonical_pair(x: str, y: str) -> VarPair:
    """Return the canonical VarPair for two variable names (order-free)."""
    if x == y:
        raise InvalidPair(f"self-pair {x!r} is not a valid pair")
    return VarPair(x, y) if x < y else VarPair(y, x)


@dataclass(frozen=True)
class EdgeAssertion:
    """One source's stance on one canonical pair.

    For FORWARD the asserted edge is pair.a -> pair.b, for BACKWARD it is
    pair.b -> pair.a. Confidence is the source's own belief in [0, 1]; any
    remainder is treated as abstention when votes are tallied.
    """

    pair: VarPair
    stance: Stance
    confidence: float = 1.0

    def __post_init__(self):
        if self.stance is Stance.NO_INFO:
            raise InvalidInput("NO_INFO is implicit and never stored on an assertion")
        if not (0.0 <= self.confidence <= 1.0):
            raise InvalidInput(
                f"confidence {self.confidence} outside [0, 1] for pair "
                f"{self.pair.label()}"
            )

    @staticmethod
    def directed(src: str, dst: str, confidence: float = 1.0) -> "EdgeAssertion":
        """Assertion that src causes dst, canonicalized."""
        pair = canonical_pair(src, dst)
        stance = Stance.FORWARD if pair.a == src else Stance.BACKWARD
        return EdgeAssertion(pair, stance, confidence)

    def endpoints(self) -> Optional[Tuple[str, str]]:
        """(source, target) for directed stances, else None."""
        if self.stance is Stance.FORWARD:
            return (self.pair.a, self.pair.b)
        if self.stance is Stance.BACKWARD:
            return (self.pair.b, self.pair.a)
        return None


@dataclass(frozen=True)
class KnowledgeSource:
    """A single rater: one expert, one learned graph, or one literature item.

    ``scope`` is the set of variables the source observed or discussed. If
    ``global_scope`` is set the source is taken to cover the whole scenario
    variable set (resolved when the scoring matrix is built), so unasserted
    pairs count as explicit no-edge opinions rather than abstentions.
    """

    source_id: str
    tier: Tier
    scope: frozenset
    assertions: Tuple[EdgeAssertion, ...] = ()
    global_scope: bool = False

    def __post_init__(self):
        seen = set()
        for a in self.assertions:
            if a.pair in seen:
                raise InvalidInput(
                    f"source {self.source_id!r} asserts pair {a.pair.label()} twice"
                )
            seen.add(a.pair)
            if not {a.pair.a, a.pair.b} <= self.scope:
                raise ScopeError(
                    f"source {self.source_id!r} asserts {a.pair.label()} "
                    "outside its scope"
                )

    def effective_scope(self, variables: Iterable[str]) -> frozenset:
        return frozenset(variables) if self.global_scope else self.scope

    def assertion_for(self, pair: VarPair) -> Optional[EdgeAssertion]:
        for a in self.assertions:
            if a.pair == pair:
                return a
        return None


@dataclass(frozen=True)
class TierWeights:
    """Per-tier fusion weights; each in (0, 1), summing to 1."""

    expert: float
    data: float
    literature: float
    ordering_warning: bool = False

    def weight(self, tier: Tier) -> float:
        return {
            Tier.EXPERT: self.expert,
            Tier.DATA: self.data,
            Tier.LITERATURE: self.literature,
        }[tier]


def validate_weights(expert: float, data: float, literature: float) -> TierWeights:
    """Validate tier weights and flag non-default orderings.

    Each weight must lie strictly inside (0, 1) and the three must sum to 1
    within 1e-12. An ordering other than expert < data < literature is legal
    but unusual, so it raises OrderingWarning and sets the flag on the result.
    """
    vals = (expert, data, literature)
    for name, v in zip(("expert", "data", "literature"), vals):
        if not (0.0 < v < 1.0):
            raise InvalidWeights(
                f"{name} weight {v} outside the open interval (0, 1)",
                context={"weight": name, "value": v},
            )
    total = expert + data + literature
    if abs(total - 1.0) > 1e-12:
        raise InvalidWeights(
            f"tier weights must sum to 1 (got {total!r})",
            context={"sum": total},
        )
    flagged = not (expert < data < literature)
    if flagged:
        warnings.warn(
            "tier weights are not in the default ascending order "
            "(expert < data < literature)",
            OrderingWarning,
            stacklevel=2,
        )
    return TierWeights(expert, data, literature, ordering_warning=flagged)


@dataclass(frozen=True)
class ScoringMatrix:
    """Vote-mass matrix: one row per canonical pair, four stance columns.

    Each of the ``rater_count`` sources contributes exactly one unit of mass
    per row, so every row sums to rater_count. Masses may be fractional
    (undirected votes, partial confidences).
    """

    pairs: Tuple[VarPair, ...]
    votes: np.ndarray  # shape (len(pairs), 4), float
    rater_count: int

    def __post_init__(self):
        votes = np.asarray(self.votes, dtype=float)
        if votes.shape != (len(self.pairs), 4):
            raise InvalidRow(
                f"votes shape {votes.shape} does not match "
                f"{len(self.pairs)} pairs x 4 stances"
            )
        if np.any(votes < -1e-12):
            raise InvalidRow("negative vote mass")
        if self.rater_count > 0:
            bad = np.where(np.abs(votes.sum(axis=1) - self.rater_count) > 1e-9)[0]
            if bad.size:
                p = self.pairs[bad[0]]
                raise InvalidRow(
                    f"row {p.label()} sums to {votes[bad[0]].sum()!r}, "
                    f"expected rater count {self.rater_count}"
                )
        object.__setattr__(self, "votes", votes)

    def row(self, pair: VarPair) -> np.ndarray:
        return self.votes[self.pairs.index(pair)]

    def to_records(self):
        return [
            {"pair": p.label(), "votes": [float(v) for v in row]}
            for p, row in zip(self.pairs, self.votes)
        ]


@dataclass(frozen=True)
class EdgeScore:
    """Plurality outcome for one pair within one tier."""

    pair: VarPair
    direction: Stance  # FORWARD / BACKWARD / NO_EDGE / UNDIRECTED(=unresolved)
    confidence: float
    weighted_confidence: float


@dataclass(frozen=True)
class TierSummary:
    """One tier's agreement score and per-pair edge scores."""

    tier: Tier
    alpha: float
    weight: float
    scores: Mapping[VarPair, EdgeScore]
    rater_count: int = 0

    def score_for(self, pair: VarPair) -> Optional[EdgeScore]:
        return self.scores.get(pair)


@dataclass(frozen=True)
class Mechanism:
    """Linear-Gaussian assignment for one endogenous variable."""

    parents: Tuple[str, ...]
    coefficients: Tuple[float, ...]
    intercept: float
    noise_variance: float

    def __post_init__(self):
        if len(self.parents) != len(self.coefficients):
            raise InvalidInput("one coefficient required per parent")
        if self.noise_variance < 0:
            raise InvalidInput(f"negative noise variance {self.noise_variance}")


@dataclass(frozen=True)
class ScmEdge:
    src: str
    dst: str
    confidence: float

    def __post_init__(self):
        if self.src == self.dst:
            raise InvalidPair(f"self-loop on {self.src!r}")
        if not (0.0 <= self.confidence <= 1.0):
            raise InvalidInput(f"edge confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class Scm:
    """Weighted structural causal model over a fixed variable set.

    The directed edge set is validated to be acyclic on construction, so a
    cyclic Scm is unrepresentable. ``mechanisms`` may be None when no dataset
    was available to fit them; when present, each mechanism's parents must
    equal the variable's graph parents.
    """

    variables: Tuple[str, ...]
    edges: Tuple[ScmEdge, ...]
    mechanisms: Optional[Mapping[str, Mechanism]] = None

    def __post_init__(self):
        varset = set(self.variables)
        if len(varset) != len(self.variables):
            raise InvalidInput("duplicate variable names")
        pairs = set()
        for e in self.edges:
            if e.src not in varset or e.dst not in varset:
                raise ScopeError(f"edge {e.src}->{e.dst} uses unknown variables")
            key = canonical_pair(e.src, e.dst)
            if key in pairs:
                raise InvalidInput(f"pair {key.label()} appears twice in edge set")
            pairs.add(key)
        if not is_acyclic(self.variables, [(e.src, e.dst) for e in self.edges]):
            raise InvalidInput("edge set contains a directed cycle")
        if self.mechanisms is not None:
            parent_map = self.parents()
            for var, mech in self.mechanisms.items():
                if var not in varset:
                    raise ScopeError(f"mechanism for unknown variable {var!r}")
                if tuple(sorted(mech.parents)) != tuple(sorted(parent_map[var])):
                    raise InvalidInput(
                        f"mechanism parents for {var!r} do not match graph parents"
                    )

    @property
    def exogenous(self) -> Tuple[str, ...]:
        # one independent noise term per endogenous variable
        return tuple(f"u_{v}" for v in self.variables)

    def parents(self) -> Mapping[str, Tuple[str, ...]]:
        out = {v: [] for v in self.variables}
        for e in self.edges:
            out[e.dst].append(e.src)
        return {v: tuple(sorted(ps)) for v, ps in out.items()}

    def edge_set(self) -> frozenset:
        return frozenset((e.src, e.dst) for e in self.edges)


@dataclass(frozen=True)
class ScenarioConfig:
    """Run configuration: problem framing, weights, thresholds, input paths."""

    problem_statement: str = ""
    keywords: Tuple[str, ...] = ()
    weights: TierWeights = field(
        default_factory=lambda: TierWeights(0.2, 0.3, 0.5)
    )
    tier1_threshold: float = 0.8
    ci_alpha: float = 0.05
    sample_seed: int = 0
    learners: Tuple[str, ...] = ("pc", "hc")
    expert_submissions: Tuple[str, ...] = ()
    literature_sources: Tuple[str, ...] = ()
    datasets: Tuple[str, ...] = ()
    ground_truth: Optional[str] = None

    def __post_init__(self):
        if not (0.0 <= self.tier1_threshold <= 1.0):
            raise InvalidInput(
                f"tier1_threshold {self.tier1_threshold} outside [0, 1]"
            )
        if not (0.0 < self.ci_alpha < 1.0):
            raise InvalidInput(f"ci_alpha {self.ci_alpha} outside (0, 1)")
        for name in self.learners:
            if name not in ("pc", "hc"):
                raise InvalidInput(f"unknown learner {name!r}")


# ---------------------------------------------------------------------------
# small graph helpers shared by the learning and fusion stages


def has_path(adjacency: Mapping[str, Iterable[str]], src: str, dst: str) -> bool:
    """True when a directed path src ~> dst exists (length >= 1)."""
    stack = list(adjacency.get(src, ()))
    seen = set()
    while stack:
        node = stack.pop()
        if node == dst:
            return True
        if node in seen:
            continue
        seen.add(node)
        stack.extend(adjacency.get(node, ()))
    return False


def build_adjacency(edges: Iterable[Tuple[str, str]]) -> Mapping[str, list]:
    adj: dict = {}
    for src, dst in edges:
        adj.setdefault(src, []).append(dst)
    return adj


def is_acyclic(nodes: Sequence[str], edges: Iterable[Tuple[str, str]]) -> bool:
    """Kahn's algorithm; True when the directed edge set has no cycle."""
    return topological_order(nodes, edges) is not None


def topological_order(nodes, edges):
    """Topological order of ``nodes`` under ``edges``, or None on a cycle.

    Deterministic: among ready nodes the lexicographically smallest is
    emitted first.
    """
    nodes = list(nodes)
    indeg = {n: 0 for n in nodes}
    adj = {n: [] for n in nodes}
    for src, dst in edges:
        adj[src].append(dst)
        indeg[dst] += 1
    ready = sorted(n for n in nodes if indeg[n] == 0)
    order = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        inserted = False
        for nxt in adj[node]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                ready.append(nxt)
                inserted = True
        if inserted:
            ready.sort()
    return order if len(order) == len(nodes) else None
