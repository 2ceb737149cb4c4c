"""Campaign configuration: a strict JSON schema with early validation.

Relative paths inside a config file resolve against the file's directory.
Every schema violation raises CampaignConfigError, which the CLI maps to
exit code 2 before any work starts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from ..analysis.wtl import TIE_RULES
from ..objectives import SEARCH_OBJECTIVE_NAMES, TRACKED_OBJECTIVE_NAMES
from ..search.runlog import STRATEGIES

__all__ = [
    "CampaignConfigError",
    "StrategySpec",
    "EvaluatorSettings",
    "AnalysisOptions",
    "CampaignConfig",
    "load_campaign_config",
    "load_prompt_dataset",
]


class CampaignConfigError(Exception):
    """The campaign configuration is unusable; nothing has been run."""


@dataclass(frozen=True)
class StrategySpec:
    """One strategy entry: canonical name, unique label, optional scalar objective."""

    name: str
    label: str
    objective: Optional[str] = None

    def __post_init__(self) -> None:
        if self.name not in STRATEGIES:
            raise CampaignConfigError(f"unknown strategy {self.name!r}; expected one of {STRATEGIES}")
        if not self.label:
            raise CampaignConfigError("strategy label must be non-empty")
        if self.objective is not None and self.objective not in TRACKED_OBJECTIVE_NAMES:
            raise CampaignConfigError(f"unknown objective {self.objective!r}")
        if self.objective is not None and self.name not in ("ga_single", "ablation_q"):
            raise CampaignConfigError(f"strategy {self.name!r} does not take an objective")


@dataclass(frozen=True)
class EvaluatorSettings:
    """Which evaluator backs the campaign: in-process synthetic or a bridge."""

    kind: str = "synthetic"
    landscape: dict = field(default_factory=dict)
    command: Optional[tuple[str, ...]] = None
    tcp: Optional[str] = None
    timeout: float = 60.0

    def __post_init__(self) -> None:
        if self.kind not in ("synthetic", "bridge"):
            raise CampaignConfigError(f"evaluator kind must be synthetic or bridge, got {self.kind!r}")
        if self.kind == "bridge" and not (self.command or self.tcp):
            raise CampaignConfigError("bridge evaluator needs a command or a tcp endpoint")
        if self.kind == "synthetic" and (self.command or self.tcp):
            raise CampaignConfigError("synthetic evaluator takes no command or tcp endpoint")
        if self.command is not None:
            object.__setattr__(self, "command", tuple(self.command))
        if self.timeout <= 0:
            raise CampaignConfigError("timeout must be positive")


@dataclass(frozen=True)
class AnalysisOptions:
    """Knobs for reports: objective subset, reference handling, tie rule."""

    objectives: tuple[str, ...] = SEARCH_OBJECTIVE_NAMES
    hv_normalize: bool = False
    epsilon: float = 0.5
    tie_rule: str = "strict"
    flagship: str = "nsga2"

    def __post_init__(self) -> None:
        object.__setattr__(self, "objectives", tuple(self.objectives))
        unknown = set(self.objectives) - set(TRACKED_OBJECTIVE_NAMES)
        if not self.objectives or unknown:
            raise CampaignConfigError(f"bad analysis objectives {self.objectives!r}")
        if self.tie_rule not in TIE_RULES:
            raise CampaignConfigError(f"tie_rule must be one of {TIE_RULES}")
        if self.epsilon < 0:
            raise CampaignConfigError("epsilon must be non-negative")


@dataclass(frozen=True)
class CampaignConfig:
    strategies: tuple[StrategySpec, ...]
    output_dir: Path
    seed: int = 0
    repetitions: int = 10
    base_prompt: str = "Photo portrait of a Software Engineer that codes"
    prompt_dataset: Optional[Path] = None
    evaluator: EvaluatorSettings = field(default_factory=EvaluatorSettings)
    search_overrides: dict = field(default_factory=dict)
    random_search_overrides: dict = field(default_factory=dict)
    keyword_pool_paths: Optional[tuple[Path, Path]] = None
    analysis: AnalysisOptions = field(default_factory=AnalysisOptions)
    parallel: bool = False
    max_workers: int = 4
    generalisation_images: int = 20

    def __post_init__(self) -> None:
        if not self.strategies:
            raise CampaignConfigError("campaign needs at least one strategy")
        labels = [s.label for s in self.strategies]
        if len(set(labels)) != len(labels):
            raise CampaignConfigError(f"strategy labels must be unique, got {labels}")
        if self.repetitions < 1:
            raise CampaignConfigError("repetitions must be positive")
        if self.seed < 0:
            raise CampaignConfigError("seed must be non-negative")
        if not self.base_prompt.strip():
            raise CampaignConfigError("base_prompt must be non-empty")
        if self.parallel and self.evaluator.kind != "synthetic":
            raise CampaignConfigError("parallel execution is supported for synthetic evaluators only")
        if self.generalisation_images < 1:
            raise CampaignConfigError("generalisation_images must be positive")


_TOP_KEYS = {
    "strategies",
    "output_dir",
    "seed",
    "repetitions",
    "base_prompt",
    "prompt_dataset",
    "evaluator",
    "search",
    "random_search",
    "keyword_pools",
    "analysis",
    "parallel",
    "max_workers",
    "generalisation_images",
}


def _strategy_spec(entry: Any) -> StrategySpec:
    if isinstance(entry, str):
        return StrategySpec(name=entry, label=entry)
    if isinstance(entry, dict):
        unknown = set(entry) - {"name", "label", "objective"}
        if unknown:
            raise CampaignConfigError(f"strategy entry has unknown keys {sorted(unknown)}")
        if "name" not in entry:
            raise CampaignConfigError("strategy entry needs a name")
        name = entry["name"]
        return StrategySpec(
            name=name,
            label=entry.get("label", name),
            objective=entry.get("objective"),
        )
    raise CampaignConfigError(f"strategy entry must be a string or object, got {entry!r}")


def load_campaign_config(path: str | Path) -> CampaignConfig:
    """Parse and validate a campaign config file."""
    config_path = Path(path)
    if not config_path.is_file():
        raise CampaignConfigError(f"config file not found: {config_path}")
    try:
        payload = json.loads(config_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CampaignConfigError(f"cannot parse {config_path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise CampaignConfigError("config root must be a JSON object")
    unknown = set(payload) - _TOP_KEYS
    if unknown:
        raise CampaignConfigError(f"config has unknown keys {sorted(unknown)}")
    base_dir = config_path.parent

    def resolve(p: str) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else base_dir / candidate

    if "strategies" not in payload or "output_dir" not in payload:
        raise CampaignConfigError("config requires 'strategies' and 'output_dir'")
    strategies = tuple(_strategy_spec(e) for e in payload["strategies"])

    prompt_dataset = None
    if payload.get("prompt_dataset") is not None:
        prompt_dataset = resolve(payload["prompt_dataset"])
        if not prompt_dataset.is_file():
            raise CampaignConfigError(f"prompt dataset not found: {prompt_dataset}")

    evaluator_payload = payload.get("evaluator", {})
    if not isinstance(evaluator_payload, dict):
        raise CampaignConfigError("evaluator must be an object")
    unknown = set(evaluator_payload) - {"kind", "landscape", "command", "tcp", "timeout"}
    if unknown:
        raise CampaignConfigError(f"evaluator has unknown keys {sorted(unknown)}")
    evaluator = EvaluatorSettings(
        kind=evaluator_payload.get("kind", "synthetic"),
        landscape=evaluator_payload.get("landscape", {}),
        command=tuple(evaluator_payload["command"]) if evaluator_payload.get("command") else None,
        tcp=evaluator_payload.get("tcp"),
        timeout=float(evaluator_payload.get("timeout", 60.0)),
    )

    keyword_pool_paths = None
    if payload.get("keyword_pools") is not None:
        pools_payload = payload["keyword_pools"]
        if not isinstance(pools_payload, dict) or set(pools_payload) != {"positive", "negative"}:
            raise CampaignConfigError("keyword_pools must carry exactly 'positive' and 'negative' paths")
        pos = resolve(pools_payload["positive"])
        neg = resolve(pools_payload["negative"])
        for p in (pos, neg):
            if not p.is_file():
                raise CampaignConfigError(f"keyword pool file not found: {p}")
        keyword_pool_paths = (pos, neg)

    analysis_payload = payload.get("analysis", {})
    if not isinstance(analysis_payload, dict):
        raise CampaignConfigError("analysis must be an object")
    unknown = set(analysis_payload) - {"objectives", "hv_normalize", "epsilon", "tie_rule", "flagship"}
    if unknown:
        raise CampaignConfigError(f"analysis has unknown keys {sorted(unknown)}")
    analysis = AnalysisOptions(
        objectives=tuple(analysis_payload.get("objectives", SEARCH_OBJECTIVE_NAMES)),
        hv_normalize=bool(analysis_payload.get("hv_normalize", False)),
        epsilon=float(analysis_payload.get("epsilon", 0.5)),
        tie_rule=analysis_payload.get("tie_rule", "strict"),
        flagship=analysis_payload.get("flagship", "nsga2"),
    )

    try:
        return CampaignConfig(
            strategies=strategies,
            output_dir=resolve(payload["output_dir"]),
            seed=int(payload.get("seed", 0)),
            repetitions=int(payload.get("repetitions", 10)),
            base_prompt=payload.get("base_prompt", CampaignConfig.base_prompt),
            prompt_dataset=prompt_dataset,
            evaluator=evaluator,
            search_overrides=dict(payload.get("search", {})),
            random_search_overrides=dict(payload.get("random_search", {})),
            keyword_pool_paths=keyword_pool_paths,
            analysis=analysis,
            parallel=bool(payload.get("parallel", False)),
            max_workers=int(payload.get("max_workers", 4)),
            generalisation_images=int(payload.get("generalisation_images", 20)),
        )
    except (TypeError, ValueError) as exc:
        raise CampaignConfigError(f"invalid config value: {exc}") from exc


def load_prompt_dataset(path: str | Path) -> tuple[str, ...]:
    """One prompt per line, UTF-8; blanks skipped, duplicates collapsed in order."""
    prompts: list[str] = []
    seen: set[str] = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        prompt = raw.strip()
        if not prompt or prompt in seen:
            continue
        seen.add(prompt)
        prompts.append(prompt)
    if not prompts:
        raise CampaignConfigError(f"{path}: prompt dataset contains no prompts")
    return tuple(prompts)
