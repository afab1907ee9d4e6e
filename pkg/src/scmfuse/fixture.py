"""Built-in demonstration scenario: an 8-variable linear-Gaussian system.

Ten true edges over variables A..H, one expert elicited in two phases,
three literature sources with different coverage, and three observational
datasets (two partial views plus the full table). Coefficients were drawn
once from +/-Uniform(0.8, 1.5) and frozen so every run sees the same system.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Tuple

from .core import EdgeAssertion, KnowledgeSource, ScenarioConfig, Stance, Tier
from .evaluate import GroundTruthSpec, ground_truth_to_dict, simulate_data
from .fuse import ScenarioInputs
from .ingest import (
    Dataset,
    ExpertSubmission,
    merge_expert_phases,
    source_to_dict,
    write_dataset,
)

DEFAULT_VARIABLES: Tuple[str, ...] = ("A", "B", "C", "D", "E", "F", "G", "H")

# frozen draw, seed 20260823
GROUND_TRUTH_EDGES: Tuple[Tuple[str, str, float], ...] = (
    ("A", "D", -0.8289),
    ("A", "E", 0.9226),
    ("A", "H", 0.9699),
    ("B", "E", 1.1269),
    ("B", "F", 1.4749),
    ("C", "F", -0.9217),
    ("D", "E", 1.3594),
    ("D", "G", -1.008),
    ("E", "G", -1.3788),
    ("F", "G", 1.4184),
)

#: Dataset views: two partial tables (d2 hides D -> E's co-parent A, so the
#: full table has to settle those pairs) plus the complete system.
DATASET_COLUMNS: Tuple[Tuple[str, Tuple[str, ...]], ...] = (
    ("d1", ("A", "D", "G")),
    ("d2", ("B", "D", "E", "G", "H")),
    ("d3", DEFAULT_VARIABLES),
)

DEFAULT_SAMPLE_SIZE = 5000
DEFAULT_SAMPLE_SEED = 1


def default_ground_truth() -> GroundTruthSpec:
    return GroundTruthSpec(
        variables=DEFAULT_VARIABLES,
        edges=GROUND_TRUTH_EDGES,
        intercepts={v: 0.0 for v in DEFAULT_VARIABLES},
        noise_variances={v: 1.0 for v in DEFAULT_VARIABLES},
    )


def default_expert_submissions() -> Tuple[ExpertSubmission, ...]:
    """One expert, two rounds; A -> D only appears after seeing the data."""
    initial = ExpertSubmission(
        expert_id="x1",
        phase="initial",
        assertions=(
            EdgeAssertion.directed("D", "G", 1.0),
            EdgeAssertion.directed("B", "E", 1.0),
        ),
    )
    informed = ExpertSubmission(
        expert_id="x1",
        phase="informed",
        assertions=(
            EdgeAssertion.directed("D", "G", 1.0),
            EdgeAssertion.directed("B", "E", 1.0),
            EdgeAssertion.directed("A", "D", 1.0),
        ),
    )
    return (initial, informed)


def default_literature_sources() -> Tuple[KnowledgeSource, ...]:
    def lit(source_id, *edges):
        return KnowledgeSource(
            source_id=source_id,
            tier=Tier.LITERATURE,
            scope=frozenset(v for e in edges for v in e),
            assertions=tuple(
                EdgeAssertion.directed(s, d, 1.0) for s, d in edges
            ),
            global_scope=True,
        )

    return (
        lit("l1", ("D", "G"), ("A", "D")),
        lit("l2", ("F", "G"), ("E", "G"), ("D", "G"), ("C", "F")),
        lit("l3", ("B", "E"), ("C", "F"), ("D", "E"), ("D", "G"), ("E", "G")),
    )


def default_datasets(
    truth: Optional[GroundTruthSpec] = None,
    sample_seed: int = DEFAULT_SAMPLE_SEED,
    n: int = DEFAULT_SAMPLE_SIZE,
) -> Tuple[Dataset, ...]:
    truth = truth or default_ground_truth()
    return tuple(
        simulate_data(truth, n, sample_seed + i, columns=cols, name=name)
        for i, (name, cols) in enumerate(DATASET_COLUMNS)
    )


def default_config(sample_seed: int = DEFAULT_SAMPLE_SEED) -> ScenarioConfig:
    return ScenarioConfig(
        problem_statement=(
            "Recover the causal structure of an eight-variable system from "
            "expert elicitation, observational data and published findings."
        ),
        keywords=("causal structure", "fusion", "linear gaussian"),
        sample_seed=sample_seed,
    )


def default_inputs(
    truth: Optional[GroundTruthSpec] = None,
    sample_seed: int = DEFAULT_SAMPLE_SEED,
    n: int = DEFAULT_SAMPLE_SIZE,
) -> ScenarioInputs:
    return ScenarioInputs(
        expert_sources=tuple(merge_expert_phases(default_expert_submissions())),
        literature_sources=default_literature_sources(),
        datasets=default_datasets(truth, sample_seed, n),
    )


def write_default_scenario(
    directory,
    sample_seed: int = DEFAULT_SAMPLE_SEED,
    n: int = DEFAULT_SAMPLE_SIZE,
) -> Path:
    """Materialize the scenario as files; returns the config path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    truth = default_ground_truth()
    (directory / "ground_truth.json").write_text(
        json.dumps(ground_truth_to_dict(truth), indent=2) + "\n"
    )
    expert_files = []
    for sub in default_expert_submissions():
        rec = {
            "expert_id": sub.expert_id,
            "phase": sub.phase,
            "assertions": [
                {
                    "from": a.pair.a if a.stance is Stance.FORWARD else a.pair.b,
                    "to": a.pair.b if a.stance is Stance.FORWARD else a.pair.a,
                    "relation": "causes",
                    "confidence": a.confidence,
                }
                for a in sub.assertions
            ],
        }
        fname = f"expert_{sub.expert_id}_{sub.phase}.json"
        (directory / fname).write_text(json.dumps(rec, indent=2) + "\n")
        expert_files.append(fname)
    lit_files = []
    for src in default_literature_sources():
        fname = f"literature_{src.source_id}.json"
        (directory / fname).write_text(
            json.dumps(source_to_dict(src), indent=2) + "\n"
        )
        lit_files.append(fname)
    data_files = []
    for ds in default_datasets(truth, sample_seed, n):
        fname = f"{ds.name}.csv"
        write_dataset(ds, directory / fname)
        data_files.append(fname)
    config = {
        "problem_statement": default_config().problem_statement,
        "keywords": list(default_config().keywords),
        "tier_weights": {"expert": 0.2, "data": 0.3, "literature": 0.5},
        "tier1_threshold": 0.8,
        "ci_alpha": 0.05,
        "sample_seed": sample_seed,
        "learners": ["pc", "hc"],
        "expert_submissions": expert_files,
        "literature_sources": lit_files,
        "datasets": data_files,
        "ground_truth": "ground_truth.json",
    }
    config_path = directory / "config.json"
    config_path.write_text(json.dumps(config, indent=2) + "\n")
    return config_path
