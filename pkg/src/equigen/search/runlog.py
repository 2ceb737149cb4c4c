"""Run logs: per-generation snapshots persisted as deterministic JSONL.

A log file holds one header line (strategy, label, seed, config), one line
per generation snapshot, and one trailer line with the final front. Encoding
is canonical (sorted keys, compact separators, no timestamps), so identical
runs produce byte-identical files.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ..genotype import Individual, individual_from_dict, individual_to_dict
from ..objectives import FitnessVector, MeasuredObjectives, TRACKED_OBJECTIVE_NAMES
from .config import SearchConfig

__all__ = [
    "STRATEGIES",
    "GenerationSnapshot",
    "RunLog",
    "save_runlog",
    "load_runlog",
    "runlog_lines",
]

# Canonical strategy names usable in logs and campaign configs.
STRATEGIES: tuple[str, ...] = (
    "nsga2",
    "random_search",
    "ga_single",
    "ablation_q",
    "ablation_qb",
    "ablation_qe",
    "no_prompt_eng",
    "sd3_default",
    "fair_prompt",
)


def _dump(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _fitness_to_dict(fv: FitnessVector) -> dict:
    return {"values": list(fv.values), "measured": fv.measured.as_dict()}


def _fitness_from_dict(payload: dict) -> FitnessVector:
    measured = MeasuredObjectives(**{k: float(payload["measured"][k]) for k in TRACKED_OBJECTIVE_NAMES})
    return FitnessVector(values=tuple(float(v) for v in payload["values"]), measured=measured)


@dataclass(frozen=True)
class GenerationSnapshot:
    """Population state after selection for one generation (or iteration)."""

    index: int
    population: tuple[tuple[Individual, FitnessVector], ...]
    front_ranks: tuple[int, ...]
    new_evaluations: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "population", tuple(self.population))
        object.__setattr__(self, "front_ranks", tuple(self.front_ranks))
        if self.index < 0:
            raise ValueError("snapshot index must be non-negative")
        if self.new_evaluations < 0:
            raise ValueError("new_evaluations must be non-negative")
        if len(self.front_ranks) != len(self.population):
            raise ValueError("front_ranks must parallel the population")


@dataclass(frozen=True)
class RunLog:
    """Complete, replayable record of one search run."""

    strategy: str
    label: str
    seed: int
    config: SearchConfig
    snapshots: tuple[GenerationSnapshot, ...]
    final_front: tuple[tuple[Individual, FitnessVector], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "snapshots", tuple(self.snapshots))
        object.__setattr__(self, "final_front", tuple(self.final_front))
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if not self.label:
            raise ValueError("label must be non-empty")
        if not self.snapshots:
            raise ValueError("run log must contain at least one snapshot")
        if not self.final_front:
            raise ValueError("final front must be non-empty")


def runlog_lines(log: RunLog) -> list[str]:
    """Serialize a run log to its canonical JSONL lines (without newlines)."""
    lines = [
        _dump(
            {
                "type": "header",
                "strategy": log.strategy,
                "label": log.label,
                "seed": log.seed,
                "config": log.config.to_dict(),
            }
        )
    ]
    for snap in log.snapshots:
        lines.append(
            _dump(
                {
                    "type": "generation",
                    "index": snap.index,
                    "new_evaluations": snap.new_evaluations,
                    "population": [
                        {
                            "individual": individual_to_dict(ind),
                            "fitness": _fitness_to_dict(fv),
                            "rank": rank,
                        }
                        for (ind, fv), rank in zip(snap.population, snap.front_ranks)
                    ],
                }
            )
        )
    lines.append(
        _dump(
            {
                "type": "final_front",
                "entries": [
                    {"individual": individual_to_dict(ind), "fitness": _fitness_to_dict(fv)}
                    for ind, fv in log.final_front
                ],
            }
        )
    )
    return lines


def save_runlog(log: RunLog, path: str | Path) -> None:
    """Write a log atomically: a partial file never appears under ``path``."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    tmp = target.with_name(target.name + ".tmp")
    tmp.write_text("\n".join(runlog_lines(log)) + "\n", encoding="utf-8")
    os.replace(tmp, target)


def _parse_member(payload: dict) -> tuple[Individual, FitnessVector]:
    return individual_from_dict(payload["individual"]), _fitness_from_dict(payload["fitness"])


def load_runlog(path: str | Path) -> RunLog:
    """Parse a JSONL run log; raises ValueError on truncated or malformed files."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if len(lines) < 3:
        raise ValueError(f"{path}: run log is truncated")
    records = [json.loads(line) for line in lines if line.strip()]
    header, *middle = records
    if header.get("type") != "header":
        raise ValueError(f"{path}: first line is not a header")
    trailer = middle.pop()
    if trailer.get("type") != "final_front":
        raise ValueError(f"{path}: last line is not a final front (incomplete run?)")
    snapshots = []
    for record in middle:
        if record.get("type") != "generation":
            raise ValueError(f"{path}: unexpected record type {record.get('type')!r}")
        members = [_parse_member(m) for m in record["population"]]
        ranks = [int(m["rank"]) for m in record["population"]]
        snapshots.append(
            GenerationSnapshot(
                index=int(record["index"]),
                population=tuple(members),
                front_ranks=tuple(ranks),
                new_evaluations=int(record["new_evaluations"]),
            )
        )
    return RunLog(
        strategy=str(header["strategy"]),
        label=str(header["label"]),
        seed=int(header["seed"]),
        config=SearchConfig.from_dict(header["config"]),
        snapshots=tuple(snapshots),
        final_front=tuple(_parse_member(m) for m in trailer["entries"]),
    )
