"""Campaign execution: strategy dispatch, checkpointed runs, generalisation.

A campaign is a grid of strategies x repetitions. Every run gets a seed
derived from (campaign seed, strategy label, repetition index) so reruns
and resumed runs reproduce the same bytes. Logs land under
``output_dir/logs/<label>/repNN.jsonl`` and a ``state.json`` checkpoint
tracks which runs are complete.
"""

from __future__ import annotations

import csv
import json
import os
import random
from concurrent.futures import FIRST_EXCEPTION, ProcessPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from ..evaluation import (
    BridgeEvaluator,
    EvaluatorError,
    SyntheticEvaluator,
    SyntheticLandscape,
)
from ..evaluation.base import Evaluator
from ..genotype import (
    Individual,
    KeywordPools,
    SearchBounds,
    canonical_key,
    default_pools,
    new_random,
)
from ..objectives import FitnessVector, ObjectiveSpec, fitness_vector
from ..search import (
    GenerationSnapshot,
    RunLog,
    SearchConfig,
    load_runlog,
    run_nsga2,
    run_random_search,
    run_single_objective_ga,
    save_runlog,
)
from ..seeding import stable_hash
from ..analysis.wtl import WinTieLoss, win_tie_loss
from .config import CampaignConfig, CampaignConfigError, StrategySpec, load_prompt_dataset

__all__ = [
    "CampaignOutcome",
    "FAIR_PROMPT_SUFFIX",
    "build_evaluator",
    "default_individual",
    "generalisation_experiment",
    "run_campaign",
]

# Appended to the base prompt by the fair-prompt arm.
FAIR_PROMPT_SUFFIX = " such that it fairly represents different genders and ethnicities"

_SEARCH_OVERRIDE_KEYS = {
    "population_size",
    "generations",
    "crossover_prob",
    "mutation_prob",
    "inner_mutation_prob",
    "selection_rate",
    "images_per_individual",
}

_RANDOM_OVERRIDE_KEYS = {"evals_per_iter", "iterations"}

_SINGLE_OBJECTIVE_DEFAULTS = {"ga_single": "cpu_energy", "ablation_q": "image_quality"}

_ABLATION_OBJECTIVES = {
    "ablation_qb": ("image_quality", "gender_bias", "ethnic_bias"),
    "ablation_qe": ("image_quality", "cpu_energy"),
}


def default_individual() -> Individual:
    """The untouched model configuration: stock guidance and steps, no keywords."""
    return Individual(
        guidance_tenths=70,
        inference_steps=50,
        positive_keywords=(),
        negative_keywords=(),
        weight=0,
    )


# ---------------------------------------------------------------------------
# Evaluator construction
# ---------------------------------------------------------------------------

def build_evaluator(settings) -> Evaluator:
    """Instantiate the evaluator a campaign is configured to use."""
    if settings.kind == "synthetic":
        try:
            landscape = SyntheticLandscape(**settings.landscape)
        except TypeError as exc:
            raise CampaignConfigError(f"bad landscape parameters: {exc}") from exc
        return SyntheticEvaluator(landscape)
    endpoint: str | Sequence[str]
    endpoint = settings.tcp if settings.tcp else settings.command
    return BridgeEvaluator.connect(endpoint, timeout=settings.timeout)


def _close_evaluator(evaluator: Evaluator) -> None:
    close = getattr(evaluator, "close", None)
    if callable(close):
        close()


# ---------------------------------------------------------------------------
# Strategy dispatch
# ---------------------------------------------------------------------------

def _search_config(
    campaign: CampaignConfig,
    seed: int,
    objective_spec: ObjectiveSpec,
    base_prompt: Optional[str] = None,
    generations: Optional[int] = None,
) -> SearchConfig:
    overrides = dict(campaign.search_overrides)
    unknown = set(overrides) - _SEARCH_OVERRIDE_KEYS
    if unknown:
        raise CampaignConfigError(f"search overrides contain unknown keys {sorted(unknown)}")
    if generations is not None:
        overrides["generations"] = generations
    try:
        return SearchConfig(
            objective_spec=objective_spec,
            seed=seed,
            base_prompt=base_prompt if base_prompt is not None else campaign.base_prompt,
            **overrides,
        )
    except (TypeError, ValueError) as exc:
        raise CampaignConfigError(f"bad search overrides: {exc}") from exc


def _random_search_params(campaign: CampaignConfig) -> tuple[int, int]:
    overrides = dict(campaign.random_search_overrides)
    unknown = set(overrides) - _RANDOM_OVERRIDE_KEYS
    if unknown:
        raise CampaignConfigError(f"random_search overrides contain unknown keys {sorted(unknown)}")
    return int(overrides.get("evals_per_iter", 4)), int(overrides.get("iterations", 25))


def _campaign_pools(campaign: CampaignConfig) -> KeywordPools:
    if campaign.keyword_pool_paths is None:
        return default_pools()
    positive, negative = campaign.keyword_pool_paths
    return KeywordPools.from_files(positive, negative)


def _fixed_configuration_run(
    campaign: CampaignConfig,
    evaluator: Evaluator,
    strategy: str,
    label: str,
    seed: int,
    base_prompt: str,
) -> RunLog:
    """A one-individual, zero-generation run recording the stock configuration."""
    spec = ObjectiveSpec.default_search()
    config = _search_config(campaign, seed, spec, base_prompt=base_prompt, generations=0)
    ind = default_individual()
    request_seed = stable_hash(config.seed, 0, canonical_key(ind))
    batch = evaluator.evaluate(ind, config.base_prompt, config.images_per_individual, request_seed)
    fv = fitness_vector(batch, spec)
    snapshot = GenerationSnapshot(
        index=0,
        population=((ind, fv),),
        front_ranks=(0,),
        new_evaluations=1,
    )
    return RunLog(
        strategy=strategy,
        label=label,
        seed=seed,
        config=config,
        snapshots=(snapshot,),
        final_front=((ind, fv),),
    )


def _execute_run(
    campaign: CampaignConfig,
    spec: StrategySpec,
    rep: int,
    evaluator: Evaluator,
) -> RunLog:
    """Run one strategy repetition and return its log."""
    seed = stable_hash(campaign.seed, spec.label, rep)
    pools = _campaign_pools(campaign)
    name = spec.name

    if name == "nsga2":
        config = _search_config(campaign, seed, ObjectiveSpec.default_search())
        return run_nsga2(config, evaluator, pools=pools, label=spec.label)

    if name == "random_search":
        config = _search_config(campaign, seed, ObjectiveSpec.default_search())
        evals_per_iter, iterations = _random_search_params(campaign)
        return run_random_search(
            config,
            evaluator,
            evals_per_iter=evals_per_iter,
            iterations=iterations,
            pools=pools,
            label=spec.label,
        )

    if name in _SINGLE_OBJECTIVE_DEFAULTS:
        objective = spec.objective or _SINGLE_OBJECTIVE_DEFAULTS[name]
        config = _search_config(campaign, seed, ObjectiveSpec.from_names([objective]))
        return run_single_objective_ga(
            config, evaluator, pools=pools, strategy=name, label=spec.label
        )

    if name in _ABLATION_OBJECTIVES:
        config = _search_config(campaign, seed, ObjectiveSpec.from_names(_ABLATION_OBJECTIVES[name]))
        return run_nsga2(config, evaluator, pools=pools, strategy=name, label=spec.label)

    if name == "no_prompt_eng":
        config = _search_config(campaign, seed, ObjectiveSpec.default_search())
        bounds = SearchBounds(pos_count_max=0, neg_count_max=0, weight_min=0, weight_max=0)
        return run_nsga2(
            config, evaluator, bounds=bounds, pools=pools, strategy=name, label=spec.label
        )

    if name == "sd3_default":
        return _fixed_configuration_run(
            campaign, evaluator, name, spec.label, seed, campaign.base_prompt
        )

    if name == "fair_prompt":
        return _fixed_configuration_run(
            campaign,
            evaluator,
            name,
            spec.label,
            seed,
            campaign.base_prompt + FAIR_PROMPT_SUFFIX,
        )

    raise CampaignConfigError(f"unknown strategy {name!r}")


# ---------------------------------------------------------------------------
# Campaign orchestration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CampaignOutcome:
    """What a campaign invocation accomplished."""

    output_dir: Path
    completed: tuple[str, ...]
    partial: bool = False
    error: Optional[str] = None
    error_kind: Optional[str] = None  # "evaluator" or "interrupted"


def _run_id(label: str, rep: int) -> str:
    return f"{label}/rep{rep:02d}"


def _log_path(output_dir: Path, label: str, rep: int) -> Path:
    return output_dir / "logs" / label / f"rep{rep:02d}.jsonl"


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _write_state(output_dir: Path, completed: set[str]) -> None:
    payload = {"completed": sorted(completed)}
    _write_atomic(output_dir / "state.json", json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _campaign_manifest(campaign: CampaignConfig) -> str:
    payload = {
        "seed": campaign.seed,
        "repetitions": campaign.repetitions,
        "base_prompt": campaign.base_prompt,
        "strategies": [
            {"name": s.name, "label": s.label, "objective": s.objective}
            for s in campaign.strategies
        ],
        "evaluator": {
            "kind": campaign.evaluator.kind,
            "landscape": campaign.evaluator.landscape,
        },
        "search": campaign.search_overrides,
        "random_search": campaign.random_search_overrides,
        "analysis": {
            "objectives": list(campaign.analysis.objectives),
            "hv_normalize": campaign.analysis.hv_normalize,
            "epsilon": campaign.analysis.epsilon,
            "tie_rule": campaign.analysis.tie_rule,
            "flagship": campaign.analysis.flagship,
        },
        "generalisation_images": campaign.generalisation_images,
        "has_prompt_dataset": campaign.prompt_dataset is not None,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _existing_log_complete(path: Path, label: str, seed: int) -> bool:
    if not path.is_file():
        return False
    try:
        log = load_runlog(path)
    except (ValueError, KeyError, OSError, json.JSONDecodeError):
        return False
    return log.label == label and log.seed == seed


def _parallel_worker(campaign: CampaignConfig, label: str, rep: int) -> str:
    """Process-pool entry point: run one repetition against a fresh evaluator."""
    spec = next(s for s in campaign.strategies if s.label == label)
    evaluator = build_evaluator(campaign.evaluator)
    try:
        log = _execute_run(campaign, spec, rep, evaluator)
        save_runlog(log, _log_path(campaign.output_dir, label, rep))
    finally:
        _close_evaluator(evaluator)
    return _run_id(label, rep)


def run_campaign(
    campaign: CampaignConfig,
    echo: Optional[Callable[[str], None]] = None,
) -> CampaignOutcome:
    """Run every (strategy, repetition) cell, resuming past completed logs."""
    say = echo or (lambda _line: None)
    output_dir = campaign.output_dir
    output_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(output_dir / "campaign.json", _campaign_manifest(campaign))

    if campaign.prompt_dataset is not None:
        labels = {s.label for s in campaign.strategies}
        if campaign.analysis.flagship not in labels:
            raise CampaignConfigError(
                f"generalisation needs flagship label {campaign.analysis.flagship!r} in strategies"
            )

    cells: list[tuple[StrategySpec, int]] = [
        (spec, rep) for spec in campaign.strategies for rep in range(campaign.repetitions)
    ]
    completed: set[str] = set()
    pending: list[tuple[StrategySpec, int]] = []
    for spec, rep in cells:
        seed = stable_hash(campaign.seed, spec.label, rep)
        if _existing_log_complete(_log_path(output_dir, spec.label, rep), spec.label, seed):
            completed.add(_run_id(spec.label, rep))
            say(f"skip {_run_id(spec.label, rep)} (already complete)")
        else:
            pending.append((spec, rep))
    _write_state(output_dir, completed)

    if campaign.parallel and pending:
        outcome = _run_parallel(campaign, pending, completed, say)
    else:
        outcome = _run_sequential(campaign, pending, completed, say)
    if outcome.partial:
        return outcome

    if campaign.prompt_dataset is not None:
        evaluator = build_evaluator(campaign.evaluator)
        try:
            generalisation_experiment(campaign, evaluator)
        except EvaluatorError as exc:
            return CampaignOutcome(
                output_dir=output_dir,
                completed=tuple(sorted(completed)),
                partial=True,
                error=str(exc),
                error_kind="evaluator",
            )
        finally:
            _close_evaluator(evaluator)
        say("generalisation experiment complete")

    return CampaignOutcome(output_dir=output_dir, completed=tuple(sorted(completed)))


def _run_sequential(
    campaign: CampaignConfig,
    pending: Sequence[tuple[StrategySpec, int]],
    completed: set[str],
    say: Callable[[str], None],
) -> CampaignOutcome:
    evaluator = build_evaluator(campaign.evaluator)
    try:
        for spec, rep in pending:
            run_id = _run_id(spec.label, rep)
            try:
                log = _execute_run(campaign, spec, rep, evaluator)
            except EvaluatorError as exc:
                _write_state(campaign.output_dir, completed)
                return CampaignOutcome(
                    output_dir=campaign.output_dir,
                    completed=tuple(sorted(completed)),
                    partial=True,
                    error=f"{run_id}: {exc}",
                    error_kind="evaluator",
                )
            except KeyboardInterrupt:
                _write_state(campaign.output_dir, completed)
                return CampaignOutcome(
                    output_dir=campaign.output_dir,
                    completed=tuple(sorted(completed)),
                    partial=True,
                    error=f"interrupted during {run_id}",
                    error_kind="interrupted",
                )
            save_runlog(log, _log_path(campaign.output_dir, spec.label, rep))
            completed.add(run_id)
            _write_state(campaign.output_dir, completed)
            say(f"done {run_id}")
    finally:
        _close_evaluator(evaluator)
    return CampaignOutcome(output_dir=campaign.output_dir, completed=tuple(sorted(completed)))


def _run_parallel(
    campaign: CampaignConfig,
    pending: Sequence[tuple[StrategySpec, int]],
    completed: set[str],
    say: Callable[[str], None],
) -> CampaignOutcome:
    workers = max(1, min(campaign.max_workers, len(pending)))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {
            pool.submit(_parallel_worker, campaign, spec.label, rep): _run_id(spec.label, rep)
            for spec, rep in pending
        }
        try:
            done, not_done = wait(futures, return_when=FIRST_EXCEPTION)
            failure: Optional[str] = None
            for future in done:
                exc = future.exception()
                if exc is not None:
                    failure = f"{futures[future]}: {exc}" if failure is None else failure
                    continue
                completed.add(future.result())
                say(f"done {futures[future]}")
            _write_state(campaign.output_dir, completed)
            if failure is not None:
                for future in not_done:
                    future.cancel()
                return CampaignOutcome(
                    output_dir=campaign.output_dir,
                    completed=tuple(sorted(completed)),
                    partial=True,
                    error=failure,
                    error_kind="evaluator",
                )
        except KeyboardInterrupt:
            for future in futures:
                future.cancel()
            _write_state(campaign.output_dir, completed)
            return CampaignOutcome(
                output_dir=campaign.output_dir,
                completed=tuple(sorted(completed)),
                partial=True,
                error="interrupted",
                error_kind="interrupted",
            )
    return CampaignOutcome(output_dir=campaign.output_dir, completed=tuple(sorted(completed)))


# ---------------------------------------------------------------------------
# Generalisation across prompts
# ---------------------------------------------------------------------------

_GENERALISATION_ARMS = ("candidate", "sd3_default", "random", "fair_prompt")


def _flagship_front_members(campaign: CampaignConfig) -> list[Individual]:
    """Pool final-front individuals from every flagship repetition, key-deduplicated."""
    members: list[Individual] = []
    seen: set[str] = set()
    label = campaign.analysis.flagship
    for rep in range(campaign.repetitions):
        path = _log_path(campaign.output_dir, label, rep)
        log = load_runlog(path)
        for ind, _fv in log.final_front:
            key = canonical_key(ind)
            if key not in seen:
                seen.add(key)
                members.append(ind)
    if not members:
        raise CampaignConfigError(f"no front members found for flagship {label!r}")
    return members


def _evaluate_arm(
    campaign: CampaignConfig,
    evaluator: Evaluator,
    ind: Individual,
    prompt: str,
    prompt_index: int,
    arm: str,
) -> FitnessVector:
    spec = ObjectiveSpec.all_tracked()
    seed = stable_hash(campaign.seed, "generalisation", prompt_index, arm)
    batch = evaluator.evaluate(ind, prompt, campaign.generalisation_images, seed)
    return fitness_vector(batch, spec)


def generalisation_experiment(
    campaign: CampaignConfig, evaluator: Evaluator
) -> dict[str, dict[str, WinTieLoss]]:
    """Re-evaluate tuned configurations across the full prompt dataset.

    For every prompt, a candidate drawn uniformly from the flagship's pooled
    final fronts competes against the stock configuration, a fresh random
    configuration, and the stock configuration with a fairness-requesting
    prompt. Bucket counts are computed on all tracked objectives and again
    with image quality excluded.
    """
    if campaign.prompt_dataset is None:
        raise CampaignConfigError("campaign has no prompt dataset")
    prompts = load_prompt_dataset(campaign.prompt_dataset)
    front = _flagship_front_members(campaign)
    pools = _campaign_pools(campaign)
    bounds = SearchBounds()
    full_spec = ObjectiveSpec.all_tracked()
    reduced_spec = ObjectiveSpec.from_names(
        [name for name in full_spec.names if name != "image_quality"]
    )

    rows: list[dict] = []
    vectors: dict[str, list[FitnessVector]] = {arm: [] for arm in _GENERALISATION_ARMS}
    for index, prompt in enumerate(prompts):
        draw_rng = random.Random(stable_hash(campaign.seed, "generalisation", index, "draw"))
        arm_individuals = {
            "candidate": front[draw_rng.randrange(len(front))],
            "sd3_default": default_individual(),
            "random": new_random(
                random.Random(stable_hash(campaign.seed, "generalisation", index, "uniform")),
                bounds,
                pools,
            ),
            "fair_prompt": default_individual(),
        }
        for arm in _GENERALISATION_ARMS:
            ind = arm_individuals[arm]
            arm_prompt = prompt + FAIR_PROMPT_SUFFIX if arm == "fair_prompt" else prompt
            fv = _evaluate_arm(campaign, evaluator, ind, arm_prompt, index, arm)
            vectors[arm].append(fv)
            row = {
                "prompt_index": index,
                "prompt": prompt,
                "arm": arm,
                "individual": canonical_key(ind),
            }
            row.update({name: fv.measured.get(name) for name in full_spec.names})
            rows.append(row)

    def reduced(arm: str) -> list[tuple[float, ...]]:
        return [
            tuple(fv.measured.get(name) for name in reduced_spec.names)
            for fv in vectors[arm]
        ]

    buckets: dict[str, dict[str, WinTieLoss]] = {}
    for baseline in ("sd3_default", "random", "fair_prompt"):
        buckets[baseline] = {
            "all_objectives": win_tie_loss(
                vectors["candidate"], vectors[baseline], full_spec,
                tie_rule=campaign.analysis.tie_rule,
            ),
            "without_image_quality": win_tie_loss(
                reduced("candidate"), reduced(baseline), reduced_spec,
                tie_rule=campaign.analysis.tie_rule,
            ),
        }

    out_dir = campaign.output_dir / "generalisation"
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_records_csv(out_dir / "records.csv", rows, full_spec)
    payload = {
        baseline: {
            variant: {"wins": wtl.wins, "ties": wtl.ties, "losses": wtl.losses}
            for variant, wtl in variants.items()
        }
        for baseline, variants in buckets.items()
    }
    payload["prompt_count"] = len(prompts)
    payload["tie_rule"] = campaign.analysis.tie_rule
    _write_atomic(
        out_dir / "win_tie_loss.json", json.dumps(payload, sort_keys=True, indent=2) + "\n"
    )
    return buckets


def _write_records_csv(path: Path, rows: Sequence[dict], spec: ObjectiveSpec) -> None:
    fieldnames = ["prompt_index", "prompt", "arm", "individual", *spec.names]
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_number(v) for k, v in row.items()})
    os.replace(tmp, path)


def _csv_number(value) -> str:
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)
