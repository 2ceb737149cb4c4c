"""Tests for campaign configuration, orchestration, resumption, generalisation,
and report generation."""

import csv
import json
from pathlib import Path

import pytest

from equigen.campaign.config import (
    AnalysisOptions,
    CampaignConfig,
    CampaignConfigError,
    EvaluatorSettings,
    StrategySpec,
    load_campaign_config,
    load_prompt_dataset,
)
from equigen.campaign.report import (
    generate_report,
    load_campaign_logs,
    run_statistical_analysis,
)
from equigen.campaign.runner import (
    FAIR_PROMPT_SUFFIX,
    default_individual,
    run_campaign,
)
from equigen.evaluation.errors import EvaluatorUnavailable
from equigen.evaluation.synthetic import SyntheticEvaluator, SyntheticLandscape
from equigen.genotype import canonical_key
from equigen.search.runlog import load_runlog

SMALL_SEARCH = {"population_size": 6, "generations": 2, "images_per_individual": 3}
SMALL_RANDOM = {"evals_per_iter": 3, "iterations": 3}


def make_campaign(out_dir: Path, **overrides) -> CampaignConfig:
    settings = {
        "strategies": (
            StrategySpec(name="nsga2", label="nsga2"),
            StrategySpec(name="random_search", label="random_search"),
        ),
        "output_dir": out_dir,
        "seed": 9,
        "repetitions": 2,
        "search_overrides": dict(SMALL_SEARCH),
        "random_search_overrides": dict(SMALL_RANDOM),
    }
    settings.update(overrides)
    return CampaignConfig(**settings)


def tree_bytes(root: Path, subdirs=("logs", "reports", "generalisation")) -> dict:
    snapshot = {}
    for sub in subdirs:
        base = root / sub
        if not base.is_dir():
            continue
        for path in sorted(base.rglob("*")):
            if path.is_file():
                snapshot[str(path.relative_to(root))] = path.read_bytes()
    return snapshot


# ---------------------------------------------------------------------------
# Config validation
# ---------------------------------------------------------------------------

def write_config(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def minimal_payload(out_name: str = "out") -> dict:
    return {
        "strategies": [{"name": "nsga2", "label": "nsga2"}],
        "output_dir": out_name,
    }


def test_load_campaign_config_minimal(tmp_path):
    config_path = write_config(tmp_path / "c.json", minimal_payload())
    campaign = load_campaign_config(config_path)
    assert campaign.output_dir == tmp_path / "out"
    assert campaign.repetitions == 10
    assert campaign.evaluator.kind == "synthetic"
    assert campaign.analysis.flagship == "nsga2"
    assert not campaign.parallel


def test_load_campaign_config_resolves_relative_paths(tmp_path):
    (tmp_path / "prompts.txt").write_text("one\ntwo\n", encoding="utf-8")
    payload = minimal_payload()
    payload["prompt_dataset"] = "prompts.txt"
    campaign = load_campaign_config(write_config(tmp_path / "c.json", payload))
    assert campaign.prompt_dataset == tmp_path / "prompts.txt"


def test_load_campaign_config_missing_file(tmp_path):
    with pytest.raises(CampaignConfigError, match="not found"):
        load_campaign_config(tmp_path / "absent.json")


def test_load_campaign_config_bad_json(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(CampaignConfigError, match="cannot parse"):
        load_campaign_config(path)
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(CampaignConfigError, match="object"):
        load_campaign_config(path)


def test_load_campaign_config_unknown_keys_rejected_everywhere(tmp_path):
    payload = minimal_payload()
    payload["budget"] = 5
    with pytest.raises(CampaignConfigError, match="budget"):
        load_campaign_config(write_config(tmp_path / "a.json", payload))

    payload = minimal_payload()
    payload["evaluator"] = {"kind": "synthetic", "gpu": True}
    with pytest.raises(CampaignConfigError, match="gpu"):
        load_campaign_config(write_config(tmp_path / "b.json", payload))

    payload = minimal_payload()
    payload["analysis"] = {"alpha": 0.01}
    with pytest.raises(CampaignConfigError, match="alpha"):
        load_campaign_config(write_config(tmp_path / "c.json", payload))

    payload = minimal_payload()
    payload["strategies"] = [{"name": "nsga2", "label": "x", "budget": 1}]
    with pytest.raises(CampaignConfigError, match="budget"):
        load_campaign_config(write_config(tmp_path / "d.json", payload))


def test_load_campaign_config_requires_strategies_and_output(tmp_path):
    with pytest.raises(CampaignConfigError, match="strategies"):
        load_campaign_config(write_config(tmp_path / "a.json", {"output_dir": "out"}))
    with pytest.raises(CampaignConfigError):
        load_campaign_config(
            write_config(tmp_path / "b.json", {"strategies": [{"name": "nsga2", "label": "x"}]})
        )


def test_load_campaign_config_missing_referenced_files(tmp_path):
    payload = minimal_payload()
    payload["prompt_dataset"] = "absent.txt"
    with pytest.raises(CampaignConfigError, match="prompt dataset"):
        load_campaign_config(write_config(tmp_path / "a.json", payload))

    payload = minimal_payload()
    payload["keyword_pools"] = {"positive": "pos.txt", "negative": "neg.txt"}
    with pytest.raises(CampaignConfigError, match="keyword pool"):
        load_campaign_config(write_config(tmp_path / "b.json", payload))

    payload = minimal_payload()
    payload["keyword_pools"] = {"positive": "pos.txt"}
    with pytest.raises(CampaignConfigError, match="exactly"):
        load_campaign_config(write_config(tmp_path / "c.json", payload))


def test_strategy_spec_validation():
    with pytest.raises(CampaignConfigError, match="unknown strategy"):
        StrategySpec(name="hill_climb", label="hc")
    with pytest.raises(CampaignConfigError, match="objective"):
        StrategySpec(name="nsga2", label="x", objective="cpu_energy")
    with pytest.raises(CampaignConfigError):
        StrategySpec(name="ga_single", label="x", objective="speed")
    spec = StrategySpec(name="ga_single", label="energy", objective="cpu_energy")
    assert spec.objective == "cpu_energy"
    ablation = StrategySpec(name="ablation_q", label="q")
    assert ablation.objective is None


def test_campaign_config_validation(tmp_path):
    with pytest.raises(CampaignConfigError, match="unique"):
        make_campaign(
            tmp_path,
            strategies=(
                StrategySpec(name="nsga2", label="same"),
                StrategySpec(name="random_search", label="same"),
            ),
        )
    with pytest.raises(CampaignConfigError, match="at least one"):
        make_campaign(tmp_path, strategies=())
    with pytest.raises(CampaignConfigError, match="repetitions"):
        make_campaign(tmp_path, repetitions=0)
    with pytest.raises(CampaignConfigError, match="base_prompt"):
        make_campaign(tmp_path, base_prompt="   ")
    with pytest.raises(CampaignConfigError, match="parallel"):
        make_campaign(
            tmp_path,
            parallel=True,
            evaluator=EvaluatorSettings(kind="bridge", command=("a-bridge",)),
        )
    with pytest.raises(CampaignConfigError, match="generalisation_images"):
        make_campaign(tmp_path, generalisation_images=0)


def test_evaluator_settings_validation():
    with pytest.raises(CampaignConfigError):
        EvaluatorSettings(kind="bridge")  # needs command or tcp
    with pytest.raises(CampaignConfigError):
        EvaluatorSettings(kind="synthetic", command=("x",))
    with pytest.raises(CampaignConfigError):
        EvaluatorSettings(kind="gpu")
    settings = EvaluatorSettings(kind="bridge", tcp="tcp:localhost:9000")
    assert settings.tcp == "tcp:localhost:9000"


def test_analysis_options_validation():
    with pytest.raises(CampaignConfigError):
        AnalysisOptions(tie_rule="loose")
    with pytest.raises(CampaignConfigError):
        AnalysisOptions(objectives=("speed",))
    with pytest.raises(CampaignConfigError):
        AnalysisOptions(epsilon=-1.0)


def test_load_prompt_dataset(tmp_path):
    path = tmp_path / "prompts.txt"
    path.write_text("alpha\n\n  beta  \nalpha\ngamma\n", encoding="utf-8")
    assert load_prompt_dataset(path) == ("alpha", "beta", "gamma")
    empty = tmp_path / "empty.txt"
    empty.write_text("\n\n", encoding="utf-8")
    with pytest.raises(CampaignConfigError, match="no prompts"):
        load_prompt_dataset(empty)


# ---------------------------------------------------------------------------
# Campaign execution, resume, determinism
# ---------------------------------------------------------------------------

def test_run_campaign_completes_and_reruns_skip(tmp_path):
    campaign = make_campaign(tmp_path / "out")
    outcome = run_campaign(campaign)
    assert not outcome.partial
    assert len(outcome.completed) == 4
    for label in ("nsga2", "random_search"):
        for rep in range(2):
            assert (tmp_path / "out" / "logs" / label / f"rep{rep:02d}.jsonl").is_file()
    state = json.loads((tmp_path / "out" / "state.json").read_text(encoding="utf-8"))
    assert state["completed"] == sorted(outcome.completed)

    before = tree_bytes(tmp_path / "out")
    skipped: list[str] = []
    again = run_campaign(campaign, echo=skipped.append)
    assert not again.partial
    assert len(again.completed) == 4
    assert all("skip" in line for line in skipped)
    assert tree_bytes(tmp_path / "out") == before


def test_run_campaign_byte_identical_across_directories(tmp_path):
    first = make_campaign(tmp_path / "one")
    second = make_campaign(tmp_path / "two")
    run_campaign(first)
    run_campaign(second)
    generate_report(tmp_path / "one")
    generate_report(tmp_path / "two")
    run_statistical_analysis(tmp_path / "one")
    run_statistical_analysis(tmp_path / "two")
    assert tree_bytes(tmp_path / "one") == tree_bytes(tmp_path / "two")


def test_run_campaign_resumes_after_deleted_log(tmp_path):
    campaign = make_campaign(tmp_path / "out")
    run_campaign(campaign)
    reference = tree_bytes(tmp_path / "out", subdirs=("logs",))

    victim = tmp_path / "out" / "logs" / "nsga2" / "rep01.jsonl"
    victim.unlink()
    (tmp_path / "out" / "state.json").unlink()
    outcome = run_campaign(campaign)
    assert not outcome.partial
    assert tree_bytes(tmp_path / "out", subdirs=("logs",)) == reference


def test_run_campaign_rejects_corrupt_log_and_rewrites_it(tmp_path):
    campaign = make_campaign(tmp_path / "out")
    run_campaign(campaign)
    reference = tree_bytes(tmp_path / "out", subdirs=("logs",))
    victim = tmp_path / "out" / "logs" / "random_search" / "rep00.jsonl"
    victim.write_text("not a log\n", encoding="utf-8")
    outcome = run_campaign(campaign)
    assert not outcome.partial
    assert tree_bytes(tmp_path / "out", subdirs=("logs",)) == reference


class FlakyEvaluator:
    """Delegates to a synthetic evaluator, then starts failing."""

    def __init__(self, budget: int):
        self.inner = SyntheticEvaluator(SyntheticLandscape())
        self.budget = budget
        self.calls = 0

    def evaluate(self, ind, base_prompt, images, seed):
        self.calls += 1
        if self.calls > self.budget:
            raise EvaluatorUnavailable("evaluator went away")
        return self.inner.evaluate(ind, base_prompt, images, seed)


def test_run_campaign_partial_then_resume_matches_clean_run(tmp_path, monkeypatch):
    campaign = make_campaign(tmp_path / "out")

    monkeypatch.setattr(
        "equigen.campaign.runner.build_evaluator", lambda settings: FlakyEvaluator(25)
    )
    outcome = run_campaign(campaign)
    assert outcome.partial
    assert outcome.error_kind == "evaluator"
    assert "rep" in outcome.error
    assert 0 < len(outcome.completed) < 4
    state = json.loads((tmp_path / "out" / "state.json").read_text(encoding="utf-8"))
    assert state["completed"] == sorted(outcome.completed)

    monkeypatch.undo()
    resumed = run_campaign(campaign)
    assert not resumed.partial
    assert len(resumed.completed) == 4

    clean = make_campaign(tmp_path / "clean")
    run_campaign(clean)
    assert tree_bytes(tmp_path / "out", subdirs=("logs",)) == tree_bytes(
        tmp_path / "clean", subdirs=("logs",)
    )


def test_run_campaign_parallel_matches_sequential(tmp_path):
    sequential = make_campaign(
        tmp_path / "seq", strategies=(StrategySpec(name="nsga2", label="nsga2"),)
    )
    parallel = make_campaign(
        tmp_path / "par",
        strategies=(StrategySpec(name="nsga2", label="nsga2"),),
        parallel=True,
        max_workers=2,
    )
    run_campaign(sequential)
    outcome = run_campaign(parallel)
    assert not outcome.partial
    assert tree_bytes(tmp_path / "seq", subdirs=("logs",)) == tree_bytes(
        tmp_path / "par", subdirs=("logs",)
    )


def test_manifest_written_and_free_of_paths(tmp_path):
    campaign = make_campaign(tmp_path / "out")
    run_campaign(campaign)
    manifest = json.loads((tmp_path / "out" / "campaign.json").read_text(encoding="utf-8"))
    assert manifest["seed"] == 9
    assert manifest["repetitions"] == 2
    assert [s["label"] for s in manifest["strategies"]] == ["nsga2", "random_search"]
    assert manifest["has_prompt_dataset"] is False
    assert "output_dir" not in manifest
    assert str(tmp_path) not in json.dumps(manifest)


def test_fixed_configuration_strategies_write_single_snapshot(tmp_path):
    campaign = make_campaign(
        tmp_path / "out",
        strategies=(
            StrategySpec(name="sd3_default", label="sd3_default"),
            StrategySpec(name="fair_prompt", label="fair_prompt"),
        ),
        repetitions=1,
    )
    run_campaign(campaign)
    stock = load_runlog(tmp_path / "out" / "logs" / "sd3_default" / "rep00.jsonl")
    assert len(stock.snapshots) == 1
    assert stock.config.generations == 0
    assert stock.snapshots[0].front_ranks == (0,)
    assert stock.snapshots[0].new_evaluations == 1
    individual, _fv = stock.final_front[0]
    assert canonical_key(individual) == canonical_key(default_individual())
    assert FAIR_PROMPT_SUFFIX not in stock.config.base_prompt

    fair = load_runlog(tmp_path / "out" / "logs" / "fair_prompt" / "rep00.jsonl")
    assert fair.config.base_prompt.endswith(FAIR_PROMPT_SUFFIX)
    assert len(fair.final_front) == 1


def test_run_seeds_differ_across_labels_and_reps(tmp_path):
    campaign = make_campaign(tmp_path / "out")
    run_campaign(campaign)
    seeds = set()
    for label in ("nsga2", "random_search"):
        for rep in range(2):
            log = load_runlog(tmp_path / "out" / "logs" / label / f"rep{rep:02d}.jsonl")
            assert log.label == label
            seeds.add(log.seed)
    assert len(seeds) == 4


# ---------------------------------------------------------------------------
# Generalisation experiment
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def generalisation_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("generalisation")
    prompts = root / "prompts.txt"
    prompts.write_text(
        "Photo portrait of a Software Engineer that codes\n"
        "Photo portrait of a Software Engineer that fixes bugs\n"
        "Photo portrait of a Software Engineer that reviews pull requests\n",
        encoding="utf-8",
    )
    campaign = make_campaign(
        root / "out",
        prompt_dataset=prompts,
        generalisation_images=4,
    )
    outcome = run_campaign(campaign)
    assert not outcome.partial
    return root, campaign


def test_generalisation_outputs_exist_and_buckets_sum(generalisation_dir):
    root, _campaign = generalisation_dir
    records = root / "out" / "generalisation" / "records.csv"
    wtl = root / "out" / "generalisation" / "win_tie_loss.json"
    assert records.is_file() and wtl.is_file()

    with records.open(encoding="utf-8", newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 3 * 4  # prompts x arms
    arms = {row["arm"] for row in rows}
    assert arms == {"candidate", "sd3_default", "random", "fair_prompt"}
    for row in rows:
        assert 0.0 <= float(row["image_quality"]) <= 1.0
        assert float(row["cpu_energy"]) > 0.0

    payload = json.loads(wtl.read_text(encoding="utf-8"))
    assert payload["prompt_count"] == 3
    assert payload["tie_rule"] == "strict"
    for baseline in ("sd3_default", "random", "fair_prompt"):
        for variant in ("all_objectives", "without_image_quality"):
            bucket = payload[baseline][variant]
            assert bucket["wins"] + bucket["ties"] + bucket["losses"] == 3


def test_generalisation_rerun_is_byte_identical(generalisation_dir):
    root, campaign = generalisation_dir
    before = tree_bytes(root / "out", subdirs=("generalisation",))
    outcome = run_campaign(campaign)
    assert not outcome.partial
    assert tree_bytes(root / "out", subdirs=("generalisation",)) == before


def test_generalisation_requires_flagship_label(tmp_path):
    prompts = tmp_path / "p.txt"
    prompts.write_text("a prompt\n", encoding="utf-8")
    campaign = make_campaign(
        tmp_path / "out",
        strategies=(StrategySpec(name="random_search", label="random_search"),),
        prompt_dataset=prompts,
    )
    with pytest.raises(CampaignConfigError, match="flagship"):
        run_campaign(campaign)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def reported_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("reports")
    campaign = make_campaign(root / "out", repetitions=5)
    outcome = run_campaign(campaign)
    assert not outcome.partial
    generate_report(root / "out")
    run_statistical_analysis(root / "out")
    return root / "out"


def test_report_files_exist(reported_dir):
    for name in (
        "stats_table.csv",
        "pareto_counts.csv",
        "hypervolume_runs.csv",
        "report.json",
        "analysis.json",
    ):
        assert (reported_dir / "reports" / name).is_file()


def test_stats_table_rows_and_flagship_comparisons(reported_dir):
    with (reported_dir / "reports" / "stats_table.csv").open(encoding="utf-8", newline="") as f:
        rows = list(csv.DictReader(f))
    # 6 tracked objectives x 2 labels.
    assert len(rows) == 12
    by_label = {}
    for row in rows:
        by_label.setdefault(row["label"], []).append(row)
        assert row["mean"] != ""
        assert row["std"] != ""
    # The flagship row never carries a self-comparison.
    assert all(r["p_value"] == "" for r in by_label["nsga2"])
    # With 5 repetitions the continuous objectives get real comparisons; the
    # bias measures may tie at identical means and skip the test instead.
    continuous = {"image_quality", "cpu_energy", "gpu_energy", "duration"}
    baseline_rows = {r["objective"]: r for r in by_label["random_search"]}
    assert all(baseline_rows[name]["p_value"] != "" for name in continuous)
    for row in by_label["random_search"]:
        if row["p_value"] == "":
            continue
        p = float(row["p_value"])
        assert 0.0 <= p <= 1.0
        if row["significant"] == "true":
            assert row["a12"] != ""
        else:
            assert row["a12"] == ""


def test_stats_table_blank_p_for_few_repetitions(tmp_path):
    campaign = make_campaign(tmp_path / "out")  # 2 repetitions
    run_campaign(campaign)
    generate_report(tmp_path / "out")
    with (tmp_path / "out" / "reports" / "stats_table.csv").open(
        encoding="utf-8", newline=""
    ) as f:
        rows = list(csv.DictReader(f))
    assert all(row["p_value"] == "" for row in rows)
    report = json.loads(
        (tmp_path / "out" / "reports" / "report.json").read_text(encoding="utf-8")
    )
    comparison = report["objective_table"]["image_quality"]["random_search"][
        "flagship_comparison"
    ]
    assert "skipped" in comparison


def test_pareto_counts_share_sums_to_one(reported_dir):
    with (reported_dir / "reports" / "pareto_counts.csv").open(
        encoding="utf-8", newline=""
    ) as f:
        rows = list(csv.DictReader(f))
    assert [row["label"] for row in rows] == ["nsga2", "random_search"]
    total_share = sum(float(row["share"]) for row in rows)
    assert total_share == pytest.approx(1.0)
    assert sum(int(row["front_members"]) for row in rows) > 0


def test_hypervolume_runs_cover_every_rep(reported_dir):
    with (reported_dir / "reports" / "hypervolume_runs.csv").open(
        encoding="utf-8", newline=""
    ) as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 10  # 2 labels x 5 reps
    for row in rows:
        assert float(row["hypervolume"]) >= 0.0
    report = json.loads((reported_dir / "reports" / "report.json").read_text(encoding="utf-8"))
    hv = report["hypervolume"]
    assert hv["mode"] == "raw"
    assert len(hv["reference"]) == 4
    assert set(hv["per_label"]) == {"nsga2", "random_search"}
    assert "random_search" in hv["comparisons"]


def test_report_json_structure(reported_dir):
    report = json.loads((reported_dir / "reports" / "report.json").read_text(encoding="utf-8"))
    assert report["labels"] == ["nsga2", "random_search"]
    assert report["flagship"] == "nsga2"
    assert report["alpha"] == 0.05
    assert report["alpha_per_objective"] == pytest.approx(0.05 / 6)
    assert len(report["provenance"]["logs"]) == 10
    assert all(not p.startswith("/") for p in report["provenance"]["logs"])
    assert report["win_tie_loss"] is None


def test_analysis_json_structure(reported_dir):
    analysis = json.loads(
        (reported_dir / "reports" / "analysis.json").read_text(encoding="utf-8")
    )
    assert analysis["flagship"] == "nsga2"
    assert set(analysis["stability"]) == {
        "image_quality",
        "gender_bias",
        "ethnic_bias",
        "cpu_energy",
        "gpu_energy",
        "duration",
    }
    for entry in analysis["stability"].values():
        assert "kruskal_wallis" in entry or "skipped" in entry
    assert analysis["front_member_count"] >= 3
    assert len(analysis["correlations"]) == 15
    for pair in analysis["correlations"]:
        value = pair["spearman"]
        assert value is None or -1.0 <= value <= 1.0
    battery = analysis["pairwise"]["random_search"]
    assert set(battery) == set(analysis["stability"])


def test_report_regeneration_is_idempotent(reported_dir):
    before = tree_bytes(reported_dir, subdirs=("reports",))
    generate_report(reported_dir)
    run_statistical_analysis(reported_dir)
    assert tree_bytes(reported_dir, subdirs=("reports",)) == before


def test_generate_report_normalized_mode(reported_dir):
    options = AnalysisOptions(hv_normalize=True)
    generate_report(reported_dir, analysis=options)
    report = json.loads((reported_dir / "reports" / "report.json").read_text(encoding="utf-8"))
    assert report["hypervolume"]["mode"] == "normalized"
    assert report["hypervolume"]["reference"] == [1.5, 1.5, 1.5, 1.5]
    # Restore the default report for the idempotence test ordering safety.
    generate_report(reported_dir)


def test_generalisation_buckets_flow_into_report(generalisation_dir):
    root, _campaign = generalisation_dir
    generate_report(root / "out")
    report = json.loads((root / "out" / "reports" / "report.json").read_text(encoding="utf-8"))
    assert report["win_tie_loss"]["prompt_count"] == 3
    wtl_csv = root / "out" / "reports" / "win_tie_loss.csv"
    assert wtl_csv.is_file()
    with wtl_csv.open(encoding="utf-8", newline="") as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 6  # 3 baselines x 2 objective sets
    for row in rows:
        assert int(row["wins"]) + int(row["ties"]) + int(row["losses"]) == 3


def test_load_campaign_logs_requires_logs(tmp_path):
    with pytest.raises(CampaignConfigError, match="no logs directory"):
        load_campaign_logs(tmp_path)
    (tmp_path / "logs").mkdir()
    with pytest.raises(CampaignConfigError, match="no run logs"):
        load_campaign_logs(tmp_path)


def test_statistical_analysis_requires_flagship(reported_dir):
    options = AnalysisOptions(flagship="absent")
    with pytest.raises(CampaignConfigError, match="absent"):
        run_statistical_analysis(reported_dir, analysis=options)
