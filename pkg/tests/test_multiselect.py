import random

import pytest
from hypothesis import given, strategies as st

from synergy.core import InstrumentedArray
from synergy.multiselect import QueryBatch, multiselect, multiselect_with_global
from synergy.synergy_sort import quick_synergy_sort

from conftest import multisets, run_shaped

SELECTORS = [multiselect, multiselect_with_global]


@st.composite
def instance_and_ranks(draw):
    values = draw(multisets(max_size=100).filter(bool))
    ranks = draw(st.lists(st.integers(1, len(values)), max_size=12))
    return values, ranks


@pytest.mark.parametrize("selector", SELECTORS)
@given(case=instance_and_ranks())
def test_answers_match_oracle(selector, case):
    values, ranks = case
    res = selector(InstrumentedArray(values), ranks)
    srt = sorted(values)
    assert res.answers == [srt[r - 1] for r in ranks]
    for v, s in zip(res.state.materialize(), srt):
        assert v is None or v == s


@pytest.mark.parametrize("selector", SELECTORS)
@given(values=multisets(max_size=100).filter(bool))
def test_all_ranks_resolve_everything(selector, values):
    res = selector(InstrumentedArray(values), range(1, len(values) + 1))
    assert res.state.materialize() == sorted(values)


@given(case=instance_and_ranks())
def test_pivots_are_a_subset_of_the_sort_pivots(case):
    values, ranks = case
    ms = multiselect(InstrumentedArray(values), ranks)
    qs = quick_synergy_sort(InstrumentedArray(values))
    sort_pivots = {(p.mu, p.start, p.size) for p in qs.pivots}
    assert {(p.mu, p.start, p.size) for p in ms.state.pivots} <= sort_pivots
    assert ms.report.comparisons <= qs.report.comparisons


def test_micro(micro):
    res = multiselect(InstrumentedArray(micro), [4, 1, 10])
    assert res.answers == [3, 1, 9]


def test_single_query_is_linear():
    rng = random.Random(2)
    n = 4096
    values = rng.sample(range(10 ** 6), n)
    a = InstrumentedArray(values)
    multiselect(a, [n // 2])
    assert a.comparisons <= 8 * n


def test_rejects_out_of_range():
    with pytest.raises(ValueError):
        multiselect(InstrumentedArray([1, 2, 3]), [0])
    with pytest.raises(ValueError):
        QueryBatch.from_ranks([4], 3)


def test_empty_batch():
    res = multiselect(InstrumentedArray([3, 1, 2]), [])
    assert res.answers == [] and res.state.xi == 0


def test_profile_and_predictor():
    rng = random.Random(4)
    values = run_shaped(rng, 300, 40, 6)
    res = multiselect(InstrumentedArray(values), [10, 150, 290])
    prof = res.state.profile(values)
    assert sum(prof["sel_sizes"]) == len(values)
    assert prof["beta"] == len(prof["sel_sizes"]) >= prof["rho"]
    assert res.state.predictor(values) > 0
