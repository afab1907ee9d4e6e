"""Vote tallying, inter-source agreement and weighted edge confidence.

Every source contributes one unit of vote mass per pair: its stated
confidence goes on its stance (an undirected stance splits evenly between
the two directions), the remainder is abstention, a pair outside the
source's scope is pure abstention, and an in-scope pair the source stayed
silent on is a full no-edge vote.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .core import (
    MATRIX_COLUMNS,
    EdgeScore,
    KnowledgeSource,
    ScoringMatrix,
    Stance,
    Tier,
    TierSummary,
    VarPair,
    canonical_pair,
)
from .errors import EmptyMatrix, InvalidInput, InvalidRow, ScopeError

_COL = {stance: i for i, stance in enumerate(MATRIX_COLUMNS)}


def build_scoring_matrix(
    sources: Sequence[KnowledgeSource],
    variables: Iterable[str],
) -> ScoringMatrix:
    """Tally all sources of one tier into a pair-by-stance vote matrix.

    Parameters
    ----------
    sources : sequence of KnowledgeSource
        Raters of a single tier (mixed tiers are rejected).
    variables : iterable of str
        The scenario variable set; must cover every source's scope.

    Returns
    -------
    ScoringMatrix over all unordered pairs of ``variables`` in lexicographic
    order, with one unit of mass per source per row.
    """
    variables = sorted(set(variables))
    tiers = {s.tier for s in sources}
    if len(tiers) > 1:
        raise InvalidInput(f"sources span multiple tiers: {sorted(t.value for t in tiers)}")
    varset = set(variables)
    for s in sources:
        missing = (s.scope if not s.global_scope else frozenset()) - varset
        if missing:
            raise ScopeError(
                f"source {s.source_id!r} scopes unknown variables {sorted(missing)}"
            )
    pairs = tuple(VarPair(a, b) for a, b in itertools.combinations(variables, 2))
    votes = np.zeros((len(pairs), 4), dtype=float)
    for s in sources:
        scope = s.effective_scope(variables)
        asserted = {a.pair: a for a in s.assertions}
        for i, pair in enumerate(pairs):
            if not {pair.a, pair.b} <= scope:
                votes[i, _COL[Stance.NO_INFO]] += 1.0
                continue
            a = asserted.get(pair)
            if a is None:
                votes[i, _COL[Stance.NO_EDGE]] += 1.0
            elif a.stance is Stance.UNDIRECTED:
                votes[i, _COL[Stance.FORWARD]] += a.confidence / 2.0
                votes[i, _COL[Stance.BACKWARD]] += a.confidence / 2.0
                votes[i, _COL[Stance.NO_INFO]] += 1.0 - a.confidence
            else:
                votes[i, _COL[a.stance]] += a.confidence
                votes[i, _COL[Stance.NO_INFO]] += 1.0 - a.confidence
    return ScoringMatrix(pairs=pairs, votes=votes, rater_count=len(sources))


def edge_confidence(row: Sequence[float]) -> Tuple[Stance, float]:
    """Plurality direction and confidence for one vote row.

    Abstentions (the NO_INFO column) are excluded from the denominator, so
    the confidence reflects only sources that had something to say. Ties
    between the two directions are unresolved; any tie involving no-edge
    resolves conservatively to no-edge.

    Returns
    -------
    (direction, confidence) where direction is FORWARD, BACKWARD, NO_EDGE or
    UNDIRECTED (unresolved) and confidence = max informative mass / total
    informative mass. A row with no informative mass is (UNDIRECTED, 0.0).
    """
    row = np.asarray(row, dtype=float)
    if row.shape != (4,):
        raise InvalidRow(f"expected four vote masses, got shape {row.shape}")
    if np.any(row < 0):
        raise InvalidRow("negative vote mass")
    fwd, bwd, ne = row[0], row[1], row[2]
    total = fwd + bwd + ne
    if total == 0.0:
        return (Stance.UNDIRECTED, 0.0)
    top = max(fwd, bwd, ne)
    conf = float(top / total)
    if ne == top:
        return (Stance.NO_EDGE, conf)
    if fwd == top and bwd == top:
        return (Stance.UNDIRECTED, conf)
    return (Stance.FORWARD if fwd == top else Stance.BACKWARD, conf)


def fleiss_kappa_table(table: Sequence[Sequence[float]], rater_count: float) -> float:
    """Fleiss' kappa over an items-by-categories vote-mass table.

    Accepts fractional masses; each row must sum to ``rater_count``. The raw
    kappa is clamped to [0, 1]: negative chance-corrected agreement carries no
    usable weight here. Degenerate cases: a single rater (or none) trivially
    agrees with itself (1.0), and so does a table whose expected agreement is
    already 1.
    """
    table = np.asarray(table, dtype=float)
    if table.ndim != 2 or table.shape[0] == 0:
        raise EmptyMatrix("agreement needs at least one pair row")
    if rater_count <= 1:
        return 1.0
    n = float(rater_count)
    n_items = table.shape[0]
    p_item = (np.sum(table * table, axis=1) - n) / (n * (n - 1.0))
    p_mean = float(np.mean(p_item))
    p_cat = table.sum(axis=0) / (n_items * n)
    p_exp = float(np.sum(p_cat * p_cat))
    if 1.0 - p_exp < 1e-12:
        return 1.0
    kappa = (p_mean - p_exp) / (1.0 - p_exp)
    return float(min(1.0, max(0.0, kappa)))


def fleiss_kappa(matrix: ScoringMatrix) -> float:
    """Agreement score of a tier's scoring matrix (see fleiss_kappa_table)."""
    if len(matrix.pairs) == 0:
        raise EmptyMatrix("scoring matrix has no pair rows")
    return fleiss_kappa_table(matrix.votes, matrix.rater_count)


def weighted_confidence(edge_conf: float, alpha: float, weight: float) -> float:
    """Edge confidence scaled by tier agreement and tier weight (plain product)."""
    for name, v in (("edge_conf", edge_conf), ("alpha", alpha), ("weight", weight)):
        if not (0.0 <= v <= 1.0):
            raise InvalidInput(f"{name} {v} outside [0, 1]")
    return edge_conf * alpha * weight


def summarize_tier(
    matrix: ScoringMatrix,
    tier: Tier,
    weight: float,
    elicited_confidences: Optional[Mapping[VarPair, Mapping[Stance, float]]] = None,
) -> TierSummary:
    """Reduce a tier's matrix to per-pair edge scores plus an agreement alpha.

    ``elicited_confidences`` applies to the expert tier only: when the
    plurality direction of a pair was directly elicited, the stated (mean)
    confidence replaces the vote-ratio confidence, since experts report
    beliefs rather than frequencies.
    """
    alpha = fleiss_kappa(matrix)
    scores = {}
    for pair, row in zip(matrix.pairs, matrix.votes):
        direction, conf = edge_confidence(row)
        if (
            elicited_confidences is not None
            and direction in (Stance.FORWARD, Stance.BACKWARD)
        ):
            stated = elicited_confidences.get(pair, {}).get(direction)
            if stated is not None:
                conf = stated
        scores[pair] = EdgeScore(
            pair=pair,
            direction=direction,
            confidence=conf,
            weighted_confidence=weighted_confidence(conf, alpha, weight),
        )
    return TierSummary(
        tier=tier,
        alpha=alpha,
        weight=weight,
        scores=scores,
        rater_count=matrix.rater_count,
    )
