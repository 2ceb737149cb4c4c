"""Campaign orchestration: multi-strategy repeated runs, reports, statistics."""

from .config import (
    AnalysisOptions,
    CampaignConfig,
    CampaignConfigError,
    EvaluatorSettings,
    StrategySpec,
    load_campaign_config,
    load_prompt_dataset,
)
from .runner import CampaignOutcome, build_evaluator, generalisation_experiment, run_campaign
from .report import generate_report, load_campaign_logs, run_statistical_analysis

__all__ = [
    "AnalysisOptions",
    "CampaignConfig",
    "CampaignConfigError",
    "EvaluatorSettings",
    "StrategySpec",
    "load_campaign_config",
    "load_prompt_dataset",
    "CampaignOutcome",
    "build_evaluator",
    "generalisation_experiment",
    "run_campaign",
    "generate_report",
    "load_campaign_logs",
    "run_statistical_analysis",
]
