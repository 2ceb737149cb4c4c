"""Objective math: quality aggregation, bias measures, energy medians."""

from __future__ import annotations

import random
import statistics
from collections import Counter

import pytest

from equigen.objectives import (
    Direction,
    ETHNICITY_CLASSES,
    Ethnicity,
    EvaluationBatch,
    Gender,
    ImageRecord,
    MeasuredObjectives,
    ObjectiveSpec,
    SEARCH_OBJECTIVE_NAMES,
    TRACKED_OBJECTIVE_NAMES,
    aggregate_quality,
    canonical_objective,
    energy_fitness,
    ethnic_bias,
    fitness_vector,
    gender_bias,
    image_quality,
)

from oracles import oracle_ethnic_spread, oracle_gender_gap


def make_record(
    quality: float = 0.5,
    gender: Gender = Gender.MALE,
    ethnicity: Ethnicity = Ethnicity.WHITE,
    cpu: float = 1e-4,
    gpu: float = 9e-4,
    duration: float = 30.0,
) -> ImageRecord:
    return ImageRecord(
        quality=quality,
        gender=gender,
        ethnicity=ethnicity,
        cpu_energy=cpu,
        gpu_energy=gpu,
        duration=duration,
    )


def batch_of(records) -> EvaluationBatch:
    return EvaluationBatch(individual_key="[70,50,0,[],[]]", records=tuple(records))


# ---------------------------------------------------------------------------
# Objective taxonomy
# ---------------------------------------------------------------------------

def test_search_objectives_and_directions():
    spec = ObjectiveSpec.default_search()
    assert spec.names == SEARCH_OBJECTIVE_NAMES
    assert spec.names == ("image_quality", "gender_bias", "ethnic_bias", "cpu_energy")
    directions = dict(zip(spec.names, spec.directions))
    assert directions["image_quality"] is Direction.MAXIMIZE
    for name in ("gender_bias", "ethnic_bias", "cpu_energy"):
        assert directions[name] is Direction.MINIMIZE


def test_tracked_objectives_extend_the_search_set():
    assert TRACKED_OBJECTIVE_NAMES == SEARCH_OBJECTIVE_NAMES + ("gpu_energy", "duration")
    assert canonical_objective("gpu_energy").direction is Direction.MINIMIZE
    assert canonical_objective("duration").direction is Direction.MINIMIZE


def test_objective_spec_rejects_unknown_and_duplicate_names():
    with pytest.raises(ValueError):
        ObjectiveSpec.from_names(["image_quality", "made_up"])
    with pytest.raises(ValueError):
        ObjectiveSpec.from_names(["image_quality", "image_quality"])


def test_objective_spec_indexing():
    spec = ObjectiveSpec.from_names(["image_quality", "cpu_energy"])
    assert len(spec) == 2
    assert spec.index("cpu_energy") == 1
    with pytest.raises(ValueError):
        spec.index("gender_bias")


def test_ethnicity_taxonomy_is_the_fixed_four_class_set():
    assert tuple(e.value for e in ETHNICITY_CLASSES) == ("arab", "asian", "black", "white")
    assert Ethnicity.UNKNOWN not in ETHNICITY_CLASSES


# ---------------------------------------------------------------------------
# Image quality
# ---------------------------------------------------------------------------

def test_image_quality_means_detector_confidences():
    assert image_quality([0.2, 0.4, 0.9]) == pytest.approx(0.5)


def test_image_quality_no_detections_scores_zero():
    assert image_quality([]) == 0.0


def test_image_quality_rejects_out_of_range_confidence():
    with pytest.raises(ValueError):
        image_quality([0.5, 1.2])


def test_aggregate_quality_averages_across_the_batch():
    batch = batch_of([make_record(quality=q) for q in (0.0, 0.5, 1.0, 0.9)])
    assert aggregate_quality(batch) == pytest.approx(0.6)


# ---------------------------------------------------------------------------
# Gender bias
# ---------------------------------------------------------------------------

def test_gender_bias_balanced_batch_scores_zero():
    records = [make_record(gender=Gender.MALE)] * 3 + [make_record(gender=Gender.FEMALE)] * 3
    assert gender_bias(batch_of(records)) == 0.0


def test_gender_bias_single_gender_scores_one():
    records = [make_record(gender=Gender.FEMALE)] * 5
    assert gender_bias(batch_of(records)) == 1.0


def test_gender_bias_ignores_unknown_labels():
    records = (
        [make_record(gender=Gender.MALE)] * 3
        + [make_record(gender=Gender.FEMALE)] * 1
        + [make_record(gender=Gender.UNKNOWN)] * 6
    )
    assert gender_bias(batch_of(records)) == pytest.approx(0.5)


def test_gender_bias_all_unknown_scores_worst():
    records = [make_record(gender=Gender.UNKNOWN)] * 4
    assert gender_bias(batch_of(records)) == 1.0


def test_gender_bias_matches_oracle_for_every_composition_of_20():
    for males in range(21):
        for unknown in range(0, 21 - males):
            females = 20 - males - unknown
            records = (
                [make_record(gender=Gender.MALE)] * males
                + [make_record(gender=Gender.FEMALE)] * females
                + [make_record(gender=Gender.UNKNOWN)] * unknown
            )
            got = gender_bias(batch_of(records))
            assert got == pytest.approx(oracle_gender_gap(males, females, unknown))
            assert 0.0 <= got <= 1.0


# ---------------------------------------------------------------------------
# Ethnic bias
# ---------------------------------------------------------------------------

def test_ethnic_bias_uniform_four_way_scores_zero():
    records = [make_record(ethnicity=e) for e in ETHNICITY_CLASSES] * 2
    assert ethnic_bias(batch_of(records)) == 0.0


def test_ethnic_bias_single_class_scores_one():
    records = [make_record(ethnicity=Ethnicity.ASIAN)] * 6
    assert ethnic_bias(batch_of(records)) == 1.0


def test_ethnic_bias_absent_class_counts_as_zero_share():
    # 2 arab / 1 asian / 1 black, no white: spread is 0.5 - 0.0
    records = (
        [make_record(ethnicity=Ethnicity.ARAB)] * 2
        + [make_record(ethnicity=Ethnicity.ASIAN)]
        + [make_record(ethnicity=Ethnicity.BLACK)]
    )
    assert ethnic_bias(batch_of(records)) == pytest.approx(0.5)


def test_ethnic_bias_all_unknown_scores_worst():
    records = [make_record(ethnicity=Ethnicity.UNKNOWN)] * 3
    assert ethnic_bias(batch_of(records)) == 1.0


def test_ethnic_bias_matches_oracle_on_random_multisets():
    rng = random.Random(99)
    labels = list(ETHNICITY_CLASSES) + [Ethnicity.UNKNOWN]
    for _ in range(3000):
        size = rng.randint(1, 40)
        sample = [rng.choice(labels) for _ in range(size)]
        counts = Counter(e.value for e in sample)
        records = [make_record(ethnicity=e) for e in sample]
        got = ethnic_bias(batch_of(records))
        want = oracle_ethnic_spread(counts, [e.value for e in ETHNICITY_CLASSES])
        assert got == pytest.approx(want)
        assert 0.0 <= got <= 1.0


def test_two_class_batches_have_spread_equal_to_share_gap():
    # With only two classes present the spread reduces to max share minus 0
    # only when some class is absent; with all mass on two classes the
    # minimum share over the fixed taxonomy is zero.
    records = [make_record(ethnicity=Ethnicity.WHITE)] * 3 + [
        make_record(ethnicity=Ethnicity.BLACK)
    ]
    assert ethnic_bias(batch_of(records)) == pytest.approx(0.75)


# ---------------------------------------------------------------------------
# Energy
# ---------------------------------------------------------------------------

def test_energy_fitness_takes_medians_componentwise():
    records = [
        make_record(cpu=3.0, gpu=30.0, duration=1.0),
        make_record(cpu=1.0, gpu=10.0, duration=3.0),
        make_record(cpu=2.0, gpu=20.0, duration=2.0),
    ]
    assert energy_fitness(batch_of(records)) == (2.0, 20.0, 2.0)


def test_energy_fitness_even_batch_uses_the_midpoint():
    records = [make_record(cpu=c) for c in (1.0, 2.0, 10.0, 20.0)]
    cpu, _gpu, _duration = energy_fitness(batch_of(records))
    assert cpu == pytest.approx(6.0)
    values = [1.0, 2.0, 10.0, 20.0]
    assert cpu == statistics.median(values)


# ---------------------------------------------------------------------------
# Fitness vectors
# ---------------------------------------------------------------------------

def test_fitness_vector_orders_values_by_the_spec():
    records = [
        make_record(quality=0.8, gender=Gender.MALE, ethnicity=Ethnicity.WHITE, cpu=2.0),
        make_record(quality=0.6, gender=Gender.MALE, ethnicity=Ethnicity.WHITE, cpu=4.0),
    ]
    batch = batch_of(records)
    fv = fitness_vector(batch, ObjectiveSpec.from_names(["cpu_energy", "image_quality"]))
    assert fv.values == pytest.approx((3.0, 0.7))
    assert fv.measured.image_quality == pytest.approx(0.7)
    assert fv.measured.gender_bias == 1.0
    assert fv.measured.ethnic_bias == 1.0


def test_fitness_vector_always_carries_all_six_measurements():
    batch = batch_of([make_record()])
    fv = fitness_vector(batch, ObjectiveSpec.default_search())
    as_dict = fv.measured.as_dict()
    assert tuple(as_dict) == TRACKED_OBJECTIVE_NAMES
    assert len(fv.values) == 4


def test_measured_objectives_get_rejects_unknown_names():
    measured = MeasuredObjectives(0.5, 0.1, 0.2, 1.0, 2.0, 3.0)
    assert measured.get("gpu_energy") == 2.0
    with pytest.raises(ValueError):
        measured.get("quality")


# ---------------------------------------------------------------------------
# Record validation
# ---------------------------------------------------------------------------

def test_image_record_validates_ranges():
    with pytest.raises(ValueError):
        make_record(quality=1.5)
    with pytest.raises(ValueError):
        make_record(cpu=-1.0)
    with pytest.raises(ValueError):
        ImageRecord(0.5, "male", Ethnicity.WHITE, 1.0, 1.0, 1.0)  # label must be the enum


def test_evaluation_batch_rejects_empty_record_sets():
    with pytest.raises(ValueError):
        EvaluationBatch(individual_key="k", records=())
