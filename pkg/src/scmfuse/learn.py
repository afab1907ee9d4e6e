"""Structure learning on observational data.

Two learners produce per-dataset graphs that are then treated as ordinary
raters: a constraint-based learner (stable skeleton search with Fisher-z
partial-correlation tests, collider orientation and propagation rules) and a
score-based greedy hill-climber over Gaussian BIC. Expert-approved edges
arrive as a whitelist that learners must keep, with direction fixed.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .core import (
    EdgeAssertion,
    KnowledgeSource,
    Mechanism,
    Stance,
    Tier,
    VarPair,
    build_adjacency,
    canonical_pair,
    has_path,
    is_acyclic,
)
from .errors import InsufficientData, InvalidInput, SingularityError
from .ingest import Dataset

_MIN_VARIANCE = 1e-12
# score differences below this are treated as ties between candidate moves
_TIE_WINDOW = 1e-6


@dataclass(frozen=True)
class Whitelist:
    """Directed edges a learner may not remove or reorient."""

    edges: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        pairs = set()
        nodes = set()
        for src, dst in self.edges:
            key = canonical_pair(src, dst)
            if key in pairs:
                raise InvalidInput(f"whitelist repeats pair {key.label()}")
            pairs.add(key)
            nodes.update((src, dst))
        if not is_acyclic(sorted(nodes), self.edges):
            raise InvalidInput("whitelist edges form a directed cycle")

    def restricted_to(self, columns: Iterable[str]) -> Tuple[Tuple[str, str], ...]:
        cols = set(columns)
        return tuple((s, d) for s, d in self.edges if s in cols and d in cols)

    def pairs(self) -> frozenset:
        return frozenset(canonical_pair(s, d) for s, d in self.edges)


@dataclass(frozen=True)
class LearnedGraph:
    """Output of one learner on one dataset; may contain undirected edges."""

    variables: Tuple[str, ...]
    directed: Tuple[Tuple[str, str], ...]
    undirected: Tuple[VarPair, ...]
    learner_id: str
    dataset_id: str

    def __post_init__(self):
        varset = set(self.variables)
        seen = set()
        for src, dst in self.directed:
            if src not in varset or dst not in varset:
                raise InvalidInput(f"edge {src}->{dst} outside graph variables")
            key = canonical_pair(src, dst)
            if key in seen:
                raise InvalidInput(f"pair {key.label()} listed twice")
            seen.add(key)
        for pair in self.undirected:
            if pair.a not in varset or pair.b not in varset:
                raise InvalidInput(f"edge {pair.label()} outside graph variables")
            if pair in seen:
                raise InvalidInput(f"pair {pair.label()} listed twice")
            seen.add(pair)

    def iter_assertions(self) -> List[EdgeAssertion]:
        out = [EdgeAssertion.directed(s, d, 1.0) for s, d in self.directed]
        out.extend(EdgeAssertion(p, Stance.UNDIRECTED, 1.0) for p in self.undirected)
        return out

    # --- small edit helpers used by the sensitivity harness -----------------

    def with_added(self, src: str, dst: str) -> "LearnedGraph":
        pair = canonical_pair(src, dst)
        directed = tuple(e for e in self.directed if canonical_pair(*e) != pair)
        undirected = tuple(p for p in self.undirected if p != pair)
        return replace(
            self,
            directed=tuple(sorted(directed + ((src, dst),))),
            undirected=undirected,
        )

    def with_flipped(self, pair: VarPair) -> "LearnedGraph":
        directed = []
        hit = False
        for src, dst in self.directed:
            if canonical_pair(src, dst) == pair:
                directed.append((dst, src))
                hit = True
            else:
                directed.append((src, dst))
        if not hit:
            raise InvalidInput(f"no directed edge on pair {pair.label()} to flip")
        return replace(self, directed=tuple(sorted(directed)))

    def with_removed(self, pair: VarPair) -> "LearnedGraph":
        return replace(
            self,
            directed=tuple(e for e in self.directed if canonical_pair(*e) != pair),
            undirected=tuple(p for p in self.undirected if p != pair),
        )

    def asserts_pair(self, pair: VarPair) -> bool:
        return any(canonical_pair(*e) == pair for e in self.directed) or (
            pair in self.undirected
        )


# ---------------------------------------------------------------------------
# conditional independence


def _partial_correlation(corr: np.ndarray, ix: int, iy: int, cond_ix: Sequence[int]) -> float:
    if not cond_ix:
        r = corr[ix, iy]
    else:
        sel = [ix, iy] + list(cond_ix)
        sub = corr[np.ix_(sel, sel)]
        try:
            prec = np.linalg.inv(sub)
        except np.linalg.LinAlgError as exc:
            raise SingularityError(
                "correlation submatrix is singular", context={"size": len(sel)}
            ) from exc
        denom = prec[0, 0] * prec[1, 1]
        if not np.isfinite(denom) or denom <= 0:
            raise SingularityError("degenerate precision matrix")
        r = -prec[0, 1] / math.sqrt(denom)
    if not np.isfinite(r):
        raise SingularityError("non-finite partial correlation")
    # keep arctanh finite for perfectly collinear columns
    return float(np.clip(r, -1.0 + 1e-12, 1.0 - 1e-12))


def fisher_z_test(
    data: Dataset,
    x: str,
    y: str,
    cond: Sequence[str] = (),
    ci_alpha: float = 0.05,
) -> Tuple[bool, float]:
    """Fisher-z partial-correlation independence test.

    Parameters
    ----------
    data : Dataset
    x, y : str
        Column names to test; must differ and not appear in ``cond``.
    cond : sequence of str
        Conditioning columns.
    ci_alpha : float
        Two-sided significance level.

    Returns
    -------
    (independent, p_value) where independent means p_value > ci_alpha.
    """
    if x == y or x in cond or y in cond:
        raise InvalidInput("test variables must be distinct from conditioning set")
    n = data.n_rows
    if n <= len(cond) + 3:
        raise InsufficientData(
            f"need more than {len(cond) + 3} rows for |cond|={len(cond)}, have {n}"
        )
    cols = [x, y] + list(cond)
    idx = [data.columns.index(c) for c in cols]
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.corrcoef(data.values[:, idx], rowvar=False)
    if not np.all(np.isfinite(corr)):
        raise SingularityError("constant column in test variables")
    r = _partial_correlation(corr, 0, 1, list(range(2, len(cols))))
    z = math.atanh(r)
    statistic = math.sqrt(n - len(cond) - 3) * abs(z)
    p_value = float(2.0 * stats.norm.sf(statistic))
    return (p_value > ci_alpha, p_value)


class _CorrTester:
    """One correlation matrix per dataset, reused across all tests."""

    def __init__(self, data: Dataset, ci_alpha: float):
        self.n = data.n_rows
        self.alpha = ci_alpha
        self.index = {c: i for i, c in enumerate(data.columns)}
        with np.errstate(invalid="ignore", divide="ignore"):
            self.corr = np.corrcoef(data.values, rowvar=False)

    def independent(self, x: str, y: str, cond: Sequence[str]) -> bool:
        if self.n <= len(cond) + 3:
            raise InsufficientData("too few rows for this conditioning size")
        r = _partial_correlation(
            self.corr, self.index[x], self.index[y], [self.index[c] for c in cond]
        )
        if not np.isfinite(r):
            raise SingularityError("non-finite correlation")
        statistic = math.sqrt(self.n - len(cond) - 3) * abs(math.atanh(r))
        return 2.0 * stats.norm.sf(statistic) > self.alpha


# ---------------------------------------------------------------------------
# constraint-based learner


def pc_learn(
    data: Dataset,
    whitelist: Optional[Whitelist] = None,
    ci_alpha: float = 0.05,
    max_cond: Optional[int] = None,
) -> LearnedGraph:
    """Stable skeleton search with collider orientation and propagation.

    Adjacency snapshots are taken per conditioning level so removal order
    cannot change the result; pairs and conditioning sets are enumerated
    lexicographically. Whitelisted edges are exempt from testing, oriented
    before collider detection, and never reoriented. A singular test is
    treated as dependence (edge kept).
    """
    variables = tuple(sorted(data.columns))
    q = len(variables)
    whitelist = whitelist or Whitelist()
    wl_edges = whitelist.restricted_to(variables)
    protected = {canonical_pair(s, d) for s, d in wl_edges}
    cap = q - 2 if max_cond is None else min(max_cond, q - 2)
    tester = _CorrTester(data, ci_alpha)

    adj: Dict[str, set] = {v: set(variables) - {v} for v in variables}
    sepsets: Dict[VarPair, frozenset] = {}

    for level in range(0, max(cap, 0) + 1):
        if data.n_rows <= level + 3:
            break
        snapshot = {v: tuple(sorted(adj[v])) for v in variables}
        if all(len(snapshot[v]) - 1 < level for v in variables):
            break
        for a, b in itertools.combinations(variables, 2):
            if b not in adj[a]:
                continue
            pair = VarPair(a, b)
            if pair in protected:
                continue
            removed = False
            for x, y in ((a, b), (b, a)):
                candidates = [c for c in snapshot[x] if c != y]
                if len(candidates) < level:
                    continue
                for cond in itertools.combinations(candidates, level):
                    try:
                        indep = tester.independent(x, y, cond)
                    except (SingularityError, InsufficientData):
                        continue
                    if indep:
                        adj[a].discard(b)
                        adj[b].discard(a)
                        sepsets[pair] = frozenset(cond)
                        removed = True
                        break
                if removed:
                    break

    oriented: Dict[VarPair, Tuple[str, str]] = {
        canonical_pair(s, d): (s, d) for s, d in wl_edges
    }

    # colliders: a - c - b with a, b non-adjacent and c outside their sepset
    for c in variables:
        for a, b in itertools.combinations(sorted(adj[c]), 2):
            if b in adj[a]:
                continue
            if c in sepsets.get(VarPair(a, b), frozenset()):
                continue
            for parent in (a, b):
                pair = canonical_pair(parent, c)
                if pair not in oriented:
                    oriented[pair] = (parent, c)

    _propagate_orientations(variables, adj, oriented)

    directed = tuple(sorted(oriented.values()))
    undirected = tuple(
        sorted(
            VarPair(a, b)
            for a, b in itertools.combinations(variables, 2)
            if b in adj[a] and VarPair(a, b) not in oriented
        )
    )
    return LearnedGraph(
        variables=variables,
        directed=directed,
        undirected=undirected,
        learner_id="pc",
        dataset_id=data.name,
    )


def _propagate_orientations(variables, adj, oriented) -> None:
    """Drive the two propagation rules to a fixed point, in place.

    Rule one: with x -> u known, an undirected u - v where x and v are not
    adjacent must point u -> v, else a new collider at u would have been
    detected. Rule two: an undirected u - v with a strictly directed path
    from u to v must point u -> v to avoid a cycle.
    """
    def undirected_pairs():
        return [
            (a, b)
            for a, b in itertools.combinations(variables, 2)
            if b in adj[a] and VarPair(a, b) not in oriented
        ]

    changed = True
    while changed:
        changed = False
        parents: Dict[str, set] = {v: set() for v in variables}
        for src, dst in oriented.values():
            parents[dst].add(src)
        arrows = build_adjacency(oriented.values())
        for a, b in undirected_pairs():
            decided = None
            for u, v in ((a, b), (b, a)):
                if any(x not in adj[v] and x != v for x in sorted(parents[u])):
                    decided = (u, v)
                    break
            if decided is None:
                for u, v in ((a, b), (b, a)):
                    if has_path(arrows, u, v):
                        decided = (u, v)
                        break
            if decided is not None:
                oriented[canonical_pair(*decided)] = decided
                changed = True


# ---------------------------------------------------------------------------
# score-based learner


class _FamilyScorer:
    """Gaussian BIC family scores from a precomputed Gram matrix.

    Free parameters per family: one coefficient per parent, an intercept and
    a noise variance. The log-likelihood uses the ML variance estimate.
    """

    def __init__(self, data: Dataset):
        self.n = data.n_rows
        self.columns = data.columns
        self.index = {c: i for i, c in enumerate(data.columns)}
        design = np.column_stack([np.ones(self.n), data.values])
        self.gram = design.T @ design
        self._cache: Dict[Tuple[str, Tuple[str, ...]], float] = {}

    def family(self, var: str, parents: Iterable[str]) -> float:
        parents = tuple(sorted(parents))
        key = (var, parents)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        rows = [0] + [1 + self.index[p] for p in parents]
        target = 1 + self.index[var]
        a = self.gram[np.ix_(rows, rows)]
        c = self.gram[rows, target]
        beta, _, rank, _ = np.linalg.lstsq(a, c, rcond=None)
        if rank < len(rows):
            raise SingularityError(
                f"collinear parents {parents} for {var!r}",
                context={"variable": var},
            )
        rss = max(float(self.gram[target, target] - beta @ c), 0.0)
        sigma2 = max(rss / self.n, _MIN_VARIANCE)
        loglik = -0.5 * self.n * (math.log(2.0 * math.pi * sigma2) + 1.0)
        value = loglik - 0.5 * (len(parents) + 2) * math.log(self.n)
        self._cache[key] = value
        return value

    def total(self, parent_map: Mapping[str, Iterable[str]]) -> float:
        return sum(self.family(v, ps) for v, ps in parent_map.items())


def bic_score(data: Dataset, edges: Iterable[Tuple[str, str]]) -> float:
    """Gaussian BIC of a fully directed acyclic graph on this dataset."""
    edges = list(edges)
    if not is_acyclic(sorted(data.columns), edges):
        raise InvalidInput("edge set contains a directed cycle")
    parent_map: Dict[str, list] = {v: [] for v in data.columns}
    for src, dst in edges:
        if src not in parent_map or dst not in parent_map:
            raise InvalidInput(f"edge {src}->{dst} outside dataset columns")
        parent_map[dst].append(src)
    return _FamilyScorer(data).total(parent_map)


def hc_learn(data: Dataset, whitelist: Optional[Whitelist] = None) -> LearnedGraph:
    """Greedy hill-climbing over add/delete/reverse moves under Gaussian BIC.

    Starts from the whitelist (whose edges are immune to delete and reverse),
    enumerates moves lexicographically, applies the best strictly improving
    move each round with ties going to the earliest move in scan order, and
    stops at a local optimum. Fully deterministic for fixed input.
    """
    variables = tuple(sorted(data.columns))
    whitelist = whitelist or Whitelist()
    wl_edges = whitelist.restricted_to(variables)
    protected = set(wl_edges)
    scorer = _FamilyScorer(data)

    parents: Dict[str, set] = {v: set() for v in variables}
    edges = set()
    for src, dst in wl_edges:
        edges.add((src, dst))
        parents[dst].add(src)

    def delta_for(var, new_parents, old_parents):
        return scorer.family(var, new_parents) - scorer.family(var, old_parents)

    improving = True
    while improving:
        improving = False
        adjacency = build_adjacency(edges)
        # Ties keep the earliest move in scan order. The window must dwarf
        # float noise between score-equivalent moves (~1e-10 at BIC scale),
        # or orientation within an equivalence class becomes arbitrary.
        best: Optional[Tuple[float, tuple]] = None
        for u, v in itertools.permutations(variables, 2):
            if (u, v) in edges:
                if (u, v) in protected:
                    continue
                try:
                    d_del = delta_for(v, parents[v] - {u}, parents[v])
                except SingularityError:
                    d_del = None
                if d_del is not None and (best is None or d_del > best[0] + _TIE_WINDOW):
                    best = (d_del, ("del", u, v))
                rest = build_adjacency(e for e in edges if e != (u, v))
                if not has_path(rest, u, v):
                    try:
                        d_rev = delta_for(v, parents[v] - {u}, parents[v]) + delta_for(
                            u, parents[u] | {v}, parents[u]
                        )
                    except SingularityError:
                        d_rev = None
                    if d_rev is not None and (
                        best is None or d_rev > best[0] + _TIE_WINDOW
                    ):
                        best = (d_rev, ("rev", u, v))
            elif (v, u) not in edges:
                if has_path(adjacency, v, u):
                    continue
                try:
                    d_add = delta_for(v, parents[v] | {u}, parents[v])
                except SingularityError:
                    continue
                if best is None or d_add > best[0] + _TIE_WINDOW:
                    best = (d_add, ("add", u, v))
        if best is not None and best[0] > _TIE_WINDOW:
            kind, u, v = best[1]
            if kind == "add":
                edges.add((u, v))
                parents[v].add(u)
            elif kind == "del":
                edges.discard((u, v))
                parents[v].discard(u)
            else:
                edges.discard((u, v))
                parents[v].discard(u)
                edges.add((v, u))
                parents[u].add(v)
            improving = True

    return LearnedGraph(
        variables=variables,
        directed=tuple(sorted(edges)),
        undirected=(),
        learner_id="hc",
        dataset_id=data.name,
    )


# ---------------------------------------------------------------------------
# parameter fitting and vote conversion


def fit_parameters(
    data: Dataset, edges: Iterable[Tuple[str, str]]
) -> Dict[str, Mechanism]:
    """Least-squares linear-Gaussian mechanisms for a directed acyclic graph.

    Root variables get their sample mean as intercept and unbiased sample
    variance as noise. Child variables are regressed on their parents; the
    noise variance is the residual sum of squares over n - p - 1.
    """
    edges = list(edges)
    columns = data.columns
    if not is_acyclic(sorted(columns), edges):
        raise InvalidInput("edge set contains a directed cycle")
    parent_map: Dict[str, list] = {v: [] for v in columns}
    for src, dst in edges:
        if src not in parent_map or dst not in parent_map:
            raise InvalidInput(f"edge {src}->{dst} outside dataset columns")
        parent_map[dst].append(src)
    n = data.n_rows
    mechanisms: Dict[str, Mechanism] = {}
    for var in columns:
        ps = tuple(sorted(parent_map[var]))
        y = data.column(var)
        if not ps:
            if n < 2:
                raise InsufficientData("need at least two rows for a variance")
            mechanisms[var] = Mechanism(
                parents=(),
                coefficients=(),
                intercept=float(np.mean(y)),
                noise_variance=float(np.var(y, ddof=1)),
            )
            continue
        if n < len(ps) + 2:
            raise InsufficientData(
                f"{var!r}: {n} rows cannot support {len(ps)} parents"
            )
        design = np.column_stack([np.ones(n)] + [data.column(p) for p in ps])
        beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
        if rank < design.shape[1]:
            raise SingularityError(
                f"collinear or constant parent column for {var!r}",
                context={"variable": var, "parents": list(ps)},
            )
        residuals = y - design @ beta
        dof = n - len(ps) - 1
        mechanisms[var] = Mechanism(
            parents=ps,
            coefficients=tuple(float(b) for b in beta[1:]),
            intercept=float(beta[0]),
            noise_variance=float(residuals @ residuals / dof),
        )
    return mechanisms


def graphs_to_sources(graphs: Sequence[LearnedGraph]) -> List[KnowledgeSource]:
    """Wrap learner outputs as data-tier raters, one source per graph.

    Directed edges become full-confidence directed assertions; undirected
    edges become undirected assertions (half a vote each way downstream).
    Sources are ordered by (learner_id, dataset_id).
    """
    sources = []
    for g in sorted(graphs, key=lambda g: (g.learner_id, g.dataset_id)):
        sources.append(
            KnowledgeSource(
                source_id=f"{g.learner_id}:{g.dataset_id}",
                tier=Tier.DATA,
                scope=frozenset(g.variables),
                assertions=tuple(g.iter_assertions()),
            )
        )
    return sources
