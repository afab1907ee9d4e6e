import itertools
import json

import numpy as np
import pytest

from scmfuse import (
    CombinedEdge,
    Dataset,
    EdgeAssertion,
    EdgeScore,
    GraphEdit,
    InvalidInput,
    KnowledgeSource,
    ScenarioInputs,
    Stance,
    Tier,
    TierSummary,
    TierWeights,
    VarPair,
    canonical_pair,
    default_config,
    default_inputs,
    fuse_all,
    is_acyclic,
    orient_and_acyclify,
    resolve_conflicts,
    run_data_tier,
    run_expert_tier,
    run_literature_tier,
)
from scmfuse.fuse import greedy_acyclic, scenario_variables

from oracles import replay_greedy_orientation

WEIGHTS = TierWeights(0.2, 0.3, 0.5)

# frozen from the bundled demo scenario (three literature sources over a
# 28-pair grid); agreement recomputed independently in test_evaluate via
# the sensitivity grid
LIT_ALPHA = 0.372353673723536


@pytest.fixture(scope="module")
def demo_inputs():
    return default_inputs()


@pytest.fixture(scope="module")
def demo_variables(demo_inputs):
    return scenario_variables(demo_inputs)


class TestExpertTier:
    def test_demo_summary_frozen_values(self, demo_inputs, demo_variables):
        summary, whitelist, matrix, log = run_expert_tier(
            demo_inputs.expert_sources, demo_variables, WEIGHTS
        )
        assert summary.alpha == 1.0  # single rater
        assert summary.rater_count == 1
        dg = summary.scores[VarPair("D", "G")]
        assert (dg.direction, dg.confidence) == (Stance.FORWARD, 1.0)
        assert dg.weighted_confidence == 1.0 * 1.0 * 0.2
        ad = summary.scores[VarPair("A", "D")]
        assert (ad.direction, ad.confidence) == (Stance.FORWARD, 0.5)
        assert ad.weighted_confidence == 0.5 * 1.0 * 0.2
        be = summary.scores[VarPair("B", "E")]
        assert (be.direction, be.confidence) == (Stance.FORWARD, 1.0)
        # pairs inside the expert's scope but never asserted read as no-edge
        ab = summary.scores[VarPair("A", "B")]
        assert (ab.direction, ab.confidence) == (Stance.NO_EDGE, 1.0)
        # pairs outside the scope carry no information at all
        ac = summary.scores[VarPair("A", "C")]
        assert (ac.direction, ac.confidence) == (Stance.UNDIRECTED, 0.0)
        assert ac.weighted_confidence == 0.0
        assert not log

    def test_demo_whitelist(self, demo_inputs, demo_variables):
        _, whitelist, _, _ = run_expert_tier(
            demo_inputs.expert_sources, demo_variables, WEIGHTS
        )
        # stated confidence 1.0 passes the 0.8 bar; the 0.5 claim does not
        assert whitelist.edges == (("B", "E"), ("D", "G"))

    def test_threshold_is_inclusive(self):
        src = KnowledgeSource(
            source_id="x",
            tier=Tier.EXPERT,
            scope=frozenset({"X", "Y"}),
            assertions=(EdgeAssertion.directed("X", "Y", 0.8),),
        )
        _, whitelist, _, _ = run_expert_tier([src], ("X", "Y"), WEIGHTS, threshold=0.8)
        assert whitelist.edges == (("X", "Y"),)

    def test_cyclic_expert_consensus_drops_weakest(self):
        src = KnowledgeSource(
            source_id="x",
            tier=Tier.EXPERT,
            scope=frozenset({"X", "Y", "Z"}),
            assertions=(
                EdgeAssertion.directed("X", "Y", 1.0),
                EdgeAssertion.directed("Y", "Z", 0.95),
                EdgeAssertion.directed("Z", "X", 0.9),
            ),
        )
        _, whitelist, _, log = run_expert_tier([src], ("X", "Y", "Z"), WEIGHTS)
        assert set(whitelist.edges) == {("X", "Y"), ("Y", "Z")}
        assert log and log[0]["action"] == "dropped"

    def test_rejects_wrong_tier(self):
        src = KnowledgeSource(
            source_id="l", tier=Tier.LITERATURE, scope=frozenset({"X"}), assertions=()
        )
        with pytest.raises(InvalidInput):
            run_expert_tier([src], ("X", "Y"), WEIGHTS)


class TestLiteratureTier:
    def test_demo_alpha_frozen(self, demo_inputs, demo_variables):
        summary, _ = run_literature_tier(
            demo_inputs.literature_sources, demo_variables, WEIGHTS
        )
        assert summary.alpha == pytest.approx(LIT_ALPHA, abs=1e-12)
        assert summary.rater_count == 3

    def test_demo_scores_frozen(self, demo_inputs, demo_variables):
        summary, _ = run_literature_tier(
            demo_inputs.literature_sources, demo_variables, WEIGHTS
        )
        sc = summary.scores
        # all three sources assert D -> G
        assert sc[VarPair("D", "G")].direction is Stance.FORWARD
        assert sc[VarPair("D", "G")].confidence == 1.0
        assert sc[VarPair("D", "G")].weighted_confidence == 1.0 * summary.alpha * 0.5
        # two of three assert C -> F and E -> G
        for pair in (VarPair("C", "F"), VarPair("E", "G")):
            assert sc[pair].direction is Stance.FORWARD
            assert sc[pair].confidence == pytest.approx(2.0 / 3.0)
        # a single global-scope claim is outvoted by the silent majority
        assert sc[VarPair("A", "D")].direction is Stance.NO_EDGE
        assert sc[VarPair("A", "D")].confidence == pytest.approx(2.0 / 3.0)
        assert sc[VarPair("A", "B")].direction is Stance.NO_EDGE
        assert sc[VarPair("A", "B")].confidence == 1.0


class TestDataTier:
    def chain_dataset(self, name="chain", seed=3, n=1500):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(n)
        y = 1.2 * x + rng.standard_normal(n)
        z = 1.1 * y + rng.standard_normal(n)
        return Dataset(name=name, columns=("X", "Y", "Z"), values=np.column_stack([x, y, z]))

    def test_runs_learners_and_votes(self):
        ds = self.chain_dataset()
        result = run_data_tier([ds], None, ("X", "Y", "Z"), WEIGHTS, 0.05, ("pc", "hc"))
        assert [
            (g.learner_id, g.dataset_id) for g in result.graphs
        ] == [("hc", "chain"), ("pc", "chain")]
        assert result.summary.rater_count == 2
        # hc orients the chain, pc leaves it undirected: majority is forward
        xy = result.summary.scores[VarPair("X", "Y")]
        assert xy.direction is Stance.FORWARD
        assert xy.confidence == pytest.approx(1.5 / 2.0)
        assert result.fit_dataset == "chain"
        assert result.mechanisms is not None

    def test_add_edit_is_single_source(self):
        ds = self.chain_dataset()
        result = run_data_tier(
            [ds],
            None,
            ("X", "Y", "Z"),
            WEIGHTS,
            0.05,
            ("pc", "hc"),
            edits=(GraphEdit("add", "X", "Z"),),
        )
        counts = sum(g.asserts_pair(VarPair("X", "Z")) for g in result.graphs)
        assert counts == 1  # only the first in-scope output carries the fake
        assert not result.noop_edits

    def test_remove_edit_hits_first_asserting_source(self):
        ds = self.chain_dataset()
        result = run_data_tier(
            [ds],
            None,
            ("X", "Y", "Z"),
            WEIGHTS,
            0.05,
            ("pc", "hc"),
            edits=(GraphEdit("remove", "X", "Y"),),
        )
        assertions = [g.asserts_pair(VarPair("X", "Y")) for g in result.graphs]
        assert assertions == [False, True]  # hc edited, pc untouched

    def test_reverse_edit_flips_first_asserting_source(self):
        ds = self.chain_dataset()
        result = run_data_tier(
            [ds],
            None,
            ("X", "Y", "Z"),
            WEIGHTS,
            0.05,
            ("pc", "hc"),
            edits=(GraphEdit("reverse", "X", "Y"),),
        )
        hc = result.graphs[0]
        assert ("Y", "X") in hc.directed and ("X", "Y") not in hc.directed

    def test_reverse_without_assertion_injects(self):
        rng = np.random.default_rng(5)
        ds = Dataset(
            name="noise",
            columns=("X", "Y"),
            values=rng.standard_normal((500, 2)),
        )
        result = run_data_tier(
            [ds],
            None,
            ("X", "Y"),
            WEIGHTS,
            0.05,
            ("hc",),
            edits=(GraphEdit("reverse", "X", "Y"),),
        )
        # learner found nothing, so the reversed claim is planted instead
        assert result.graphs[0].directed == (("Y", "X"),)
        assert not result.noop_edits

    def test_remove_without_assertion_is_noop(self):
        rng = np.random.default_rng(5)
        ds = Dataset(
            name="noise", columns=("X", "Y"), values=rng.standard_normal((500, 2))
        )
        result = run_data_tier(
            [ds],
            None,
            ("X", "Y"),
            WEIGHTS,
            0.05,
            ("hc",),
            edits=(GraphEdit("remove", "X", "Y"),),
        )
        assert result.noop_edits and result.noop_edits[0]["edit"] == "remove"

    def test_no_datasets_gives_empty_summary(self):
        result = run_data_tier([], None, ("X", "Y"), WEIGHTS, 0.05, ("pc", "hc"))
        assert result.summary.alpha == 1.0
        assert result.summary.rater_count == 0
        assert result.mechanisms is None and result.fit_dataset is None


class TestResolveConflicts:
    def summary(self, tier, weight, scores):
        table = {}
        for pair, (direction, wc) in scores.items():
            table[pair] = EdgeScore(
                pair=pair, direction=direction, confidence=1.0, weighted_confidence=wc
            )
        return TierSummary(tier=tier, alpha=1.0, weight=weight, scores=table)

    def test_highest_weighted_directed_stance_wins(self):
        pair = VarPair("X", "Y")
        combined, conflicts = resolve_conflicts(
            [
                self.summary(Tier.EXPERT, 0.2, {pair: (Stance.FORWARD, 0.2)}),
                self.summary(Tier.LITERATURE, 0.5, {pair: (Stance.BACKWARD, 0.4)}),
            ]
        )
        edge = combined[pair]
        assert edge.direction is Stance.BACKWARD
        assert edge.confidence == pytest.approx(0.4)
        assert conflicts and conflicts[0]["pair"] == "X,Y"

    def test_agreeing_tiers_pool_confidence(self):
        pair = VarPair("X", "Y")
        combined, conflicts = resolve_conflicts(
            [
                self.summary(Tier.EXPERT, 0.2, {pair: (Stance.FORWARD, 0.2)}),
                self.summary(Tier.DATA, 0.3, {pair: (Stance.FORWARD, 0.25)}),
                self.summary(Tier.LITERATURE, 0.5, {pair: (Stance.NO_EDGE, 0.5)}),
            ]
        )
        edge = combined[pair]
        assert edge.direction is Stance.FORWARD
        assert edge.confidence == pytest.approx(0.45)
        assert not conflicts  # only one directed stance, nothing to log

    def test_tie_breaks_to_heavier_tier(self):
        pair = VarPair("X", "Y")
        combined, _ = resolve_conflicts(
            [
                self.summary(Tier.EXPERT, 0.2, {pair: (Stance.FORWARD, 0.3)}),
                self.summary(Tier.LITERATURE, 0.5, {pair: (Stance.BACKWARD, 0.3)}),
            ]
        )
        assert combined[pair].direction is Stance.BACKWARD

    def test_equal_weight_tie_breaks_to_later_tier(self):
        pair = VarPair("X", "Y")
        combined, _ = resolve_conflicts(
            [
                self.summary(Tier.EXPERT, 0.3, {pair: (Stance.FORWARD, 0.3)}),
                self.summary(Tier.DATA, 0.3, {pair: (Stance.BACKWARD, 0.3)}),
            ]
        )
        assert combined[pair].direction is Stance.BACKWARD

    def test_undirected_fallback(self):
        pair = VarPair("X", "Y")
        combined, _ = resolve_conflicts(
            [
                self.summary(Tier.DATA, 0.3, {pair: (Stance.UNDIRECTED, 0.1)}),
                self.summary(Tier.LITERATURE, 0.5, {pair: (Stance.NO_EDGE, 0.5)}),
            ]
        )
        assert combined[pair].direction is Stance.UNDIRECTED
        assert combined[pair].confidence == pytest.approx(0.1)

    def test_no_signal_is_no_edge(self):
        pair = VarPair("X", "Y")
        combined, _ = resolve_conflicts(
            [self.summary(Tier.DATA, 0.3, {pair: (Stance.UNDIRECTED, 0.0)})]
        )
        assert combined[pair].direction is Stance.NO_EDGE
        assert combined[pair].confidence == 0.0


class TestGreedyAcyclic:
    def test_three_cycle_flips_weakest(self):
        kept, log = greedy_acyclic(
            [("A", "B", 0.9), ("B", "C", 0.8), ("C", "A", 0.7)], allow_flip=True
        )
        assert kept == [("A", "B", 0.9), ("B", "C", 0.8), ("A", "C", 0.7)]
        assert log == [
            {
                "pair": "A,C",
                "action": "flipped",
                "from": "C->A",
                "to": "A->C",
                "confidence": 0.7,
            }
        ]

    def test_drop_when_flips_disallowed(self):
        kept, log = greedy_acyclic(
            [("A", "B", 0.9), ("B", "C", 0.8), ("C", "A", 0.7)], allow_flip=False
        )
        assert [(s, d) for s, d, _ in kept] == [("A", "B"), ("B", "C")]
        assert log[0]["action"] == "dropped"

    def test_confidence_order_drives_insertion(self):
        kept, _ = greedy_acyclic(
            [("C", "A", 0.9), ("A", "B", 0.5), ("B", "C", 0.4)], allow_flip=True
        )
        # weakest edge arrives last and is the one flipped
        assert ("C", "B", 0.4) in kept


def combo(entries):
    out = {}
    for src, dst, direction, conf in entries:
        pair = canonical_pair(src, dst)
        if direction is Stance.UNDIRECTED:
            stance = Stance.UNDIRECTED
        else:
            stance = (
                Stance.FORWARD if (src, dst) == (pair.a, pair.b) else Stance.BACKWARD
            )
        out[pair] = CombinedEdge(
            pair=pair, direction=stance, confidence=conf, per_tier={}
        )
    return out


class TestOrientAndAcyclify:
    def test_directed_cycle_flip_frozen(self):
        edges, cycle_log, forced = orient_and_acyclify(
            combo(
                [
                    ("A", "B", Stance.FORWARD, 0.9),
                    ("B", "C", Stance.FORWARD, 0.8),
                    ("C", "A", Stance.FORWARD, 0.7),
                ]
            )
        )
        assert edges == [("A", "B", 0.9), ("A", "C", 0.7), ("B", "C", 0.8)]
        assert cycle_log[0]["action"] == "flipped"
        assert not forced

    def test_no_new_collider_rule(self):
        edges, _, forced = orient_and_acyclify(
            combo(
                [
                    ("A", "B", Stance.FORWARD, 0.9),
                    ("B", "C", Stance.UNDIRECTED, 0.5),
                ]
            )
        )
        assert ("B", "C", 0.5) in edges
        assert forced[0]["rule"] == "no_new_collider"

    def test_path_rule(self):
        edges, _, forced = orient_and_acyclify(
            combo(
                [
                    ("A", "B", Stance.FORWARD, 0.9),
                    ("B", "C", Stance.FORWARD, 0.8),
                    ("A", "C", Stance.UNDIRECTED, 0.5),
                ]
            )
        )
        assert ("A", "C", 0.5) in edges

    def test_cycle_avoidance_overrides_collider_rule(self):
        # parents of A include X (not adjacent to C), suggesting A -> C,
        # but C already reaches A through D, so A -> C would close a cycle
        edges, _, forced = orient_and_acyclify(
            combo(
                [
                    ("C", "D", Stance.FORWARD, 0.9),
                    ("D", "A", Stance.FORWARD, 0.8),
                    ("X", "A", Stance.FORWARD, 0.7),
                    ("A", "C", Stance.UNDIRECTED, 0.5),
                ]
            )
        )
        assert ("C", "A", 0.5) in edges
        entry = [f for f in forced if f["pair"] == "A,C"][0]
        assert entry["rule"] == "path"

    def test_lexicographic_fallback(self):
        edges, _, forced = orient_and_acyclify(
            combo([("Y", "X", Stance.UNDIRECTED, 0.4)])
        )
        assert edges == [("X", "Y", 0.4)]
        assert forced[0]["rule"] == "lexicographic"

    def test_zero_confidence_unresolved_pairs_are_dropped(self):
        edges, _, _ = orient_and_acyclify(combo([("X", "Y", Stance.UNDIRECTED, 0.0)]))
        assert edges == []

    def test_fuzzed_inputs_always_acyclic_and_flip_before_drop(self):
        rng = np.random.default_rng(2026)
        names = "PQRSTUV"
        for _ in range(300):
            q = int(rng.integers(3, 8))
            variables = list(names[:q])
            entries = []
            for a, b in itertools.combinations(variables, 2):
                roll = rng.random()
                if roll < 0.45:
                    continue
                conf = float(rng.random())
                if roll < 0.75:
                    src, dst = (a, b) if rng.random() < 0.5 else (b, a)
                    entries.append((src, dst, Stance.FORWARD, conf))
                else:
                    entries.append((a, b, Stance.UNDIRECTED, conf))
            combined = combo(entries)
            edges, cycle_log, _ = orient_and_acyclify(combined)
            assert is_acyclic(variables, [(s, d) for s, d, _ in edges])
            # replay the directed insertions against the reference policy
            directed = [
                (e.pair.a, e.pair.b, e.confidence)
                if e.direction is Stance.FORWARD
                else (e.pair.b, e.pair.a, e.confidence)
                for e in combined.values()
                if e.direction in (Stance.FORWARD, Stance.BACKWARD)
            ]
            _, ref_log = replay_greedy_orientation(directed)
            ours = [(entry["pair"], entry["action"]) for entry in cycle_log]
            ref = [(entry["pair"], entry["action"]) for entry in ref_log]
            assert ours == ref


class TestFuseAll:
    def test_demo_runs_and_is_acyclic(self, demo_inputs):
        result = fuse_all(default_config(), demo_inputs)
        assert is_acyclic(
            result.scm.variables, [(e.src, e.dst) for e in result.scm.edges]
        )
        assert result.scm.mechanisms is not None
        parent_map = result.scm.parents()
        for var, mech in result.scm.mechanisms.items():
            assert tuple(sorted(mech.parents)) == tuple(sorted(parent_map[var]))

    def test_demo_recovers_expected_edges(self, demo_inputs):
        result = fuse_all(default_config(), demo_inputs)
        edge_set = result.scm.edge_set()
        for edge in [("D", "G"), ("B", "E"), ("A", "D"), ("C", "F"), ("E", "G")]:
            assert edge in edge_set

    def test_report_is_deterministic(self, demo_inputs):
        a = fuse_all(default_config(), demo_inputs).report()
        b = fuse_all(default_config(), demo_inputs).report()
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_report_shape(self, demo_inputs):
        report = fuse_all(default_config(), demo_inputs).report()
        assert set(report["tiers"]) == {"expert", "data", "literature"}
        assert report["tiers"]["expert"]["whitelist"] == [["B", "E"], ["D", "G"]]
        assert report["graph"]["edges"]
        assert report["weights"]["literature"] == 0.5

    def test_scenario_variables_union(self):
        src = KnowledgeSource(
            source_id="l",
            tier=Tier.LITERATURE,
            scope=frozenset({"Q", "R"}),
            assertions=(),
        )
        ds = Dataset(name="d", columns=("A", "B"), values=np.zeros((2, 2)) + 1.0)
        inputs = ScenarioInputs(literature_sources=(src,), datasets=(ds,))
        assert scenario_variables(inputs) == ("A", "B", "Q", "R")
