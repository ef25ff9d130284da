import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given

from synergy.measures import (
    CostReport,
    block_decomposition,
    entropy,
    instance_profile,
    log2_binomial,
    multiplicities,
    pivot_position_count,
    predictor_envelope,
    predictor_multiselect,
    predictor_munro_spira,
    predictor_synergy,
    predictor_takaoka,
    run_sizes,
)

from conftest import multisets


def brute_blocks(values):
    """Blocks by definition: walk the stable sorted order and cut whenever
    the next element is not the next position of the same run, or either
    value is repeated."""
    n = len(values)
    run = [0] * n
    for i in range(1, n):
        run[i] = run[i - 1] + (values[i] < values[i - 1])
    order = sorted(range(n), key=lambda i: (values[i], i))
    mult = Counter(values)
    blocks = []
    for k, i in enumerate(order):
        prev = order[k - 1] if k else None
        joined = (prev is not None and i == prev + 1 and run[i] == run[prev]
                  and mult[values[i]] == 1 and mult[values[prev]] == 1)
        if joined:
            r, s, g = blocks[-1]
            blocks[-1] = (r, s, g + 1)
        else:
            blocks.append((run[i], i, 1))
    weights = []
    seen = set()
    for r, s, g in blocks:
        v = values[s]
        if mult[v] > 1:
            if v not in seen:
                seen.add(v)
                weights.append(mult[v])
        else:
            weights.append(1)
    return blocks, weights


def test_micro_blocks(micro):
    bd = block_decomposition(micro)
    assert (bd.rho, bd.delta, bd.chi) == (3, 6, 5)
    assert bd.pi_weights.tolist() == [1, 1, 2, 1, 1]
    # (1), (2), (3) from run 0, (3) from run 1, (4 5 6), (7 8 9)
    assert [micro[s:s + g] for _, s, g in bd.blocks] == [[1], [2], [3], [3], [4, 5, 6], [7, 8, 9]]
    assert [m for m, _ in bd.pi_members] == ["block", "block", "multiplicity", "block", "block"]


@given(multisets(max_size=80))
def test_blocks_match_definition(values):
    bd = block_decomposition(values)
    blocks, weights = brute_blocks(values)
    assert bd.blocks == blocks
    assert bd.pi_weights.tolist() == weights
    assert int(bd.block_len.sum()) == len(values)


def test_empty_decomposition():
    bd = block_decomposition([])
    assert (bd.n, bd.delta, bd.chi) == (0, 0, 0)


def test_opaque_keys_decompose_like_integers():
    words = ["b", "c", "a", "c", "g", "h", "i", "d", "e", "f"]
    assert block_decomposition(words).blocks == block_decomposition([2, 3, 1, 3, 7, 8, 9, 4, 5, 6]).blocks


def test_entropy_values():
    assert entropy([1, 1]) == pytest.approx(1.0)
    assert entropy([2, 2, 4]) == pytest.approx(1.5)
    assert entropy([7]) == 0.0
    with pytest.raises(ValueError):
        entropy([])
    with pytest.raises(ValueError):
        entropy([1, 0])


def test_log2_binomial_against_exact():
    for r in range(1, 30):
        for m in range(1, r + 1):
            assert log2_binomial(r, m) == pytest.approx(math.log2(math.comb(r, m)), abs=1e-9)


def test_micro_synergy_predictor_against_direct_formula(micro):
    bd = block_decomposition(micro)
    direct = len(micro) + sum(math.log2(g) for g in bd.block_len.tolist()) \
        + sum(math.log2(math.comb(3, m)) for m in bd.pi_weights.tolist())
    assert predictor_synergy(len(micro), bd.block_len, bd.pi_weights, bd.rho) == pytest.approx(direct)
    assert direct == pytest.approx(10 + 2 * math.log2(3) + 5 * math.log2(3))


def test_example1_predictors():
    n = 64
    values = [1, 2] * (n // 2)
    assert predictor_munro_spira(n, multiplicities(values)) == pytest.approx(2 * n)
    assert predictor_takaoka(n, run_sizes(values)) == pytest.approx(n * (1 + math.log2(n / 2)))


def test_envelope_values():
    assert predictor_envelope(100, [50]) == pytest.approx(100.0)
    n = 64
    assert predictor_envelope(n, range(1, n + 1)) == pytest.approx(n * math.log2(n))
    assert predictor_envelope(n, []) == 0.0
    with pytest.raises(ValueError):
        predictor_envelope(10, [11])


def test_multiselect_predictor_formula():
    got = predictor_multiselect(16, [4, 4, 8], 3, 2, [2], [2, 1])
    assert got == pytest.approx(16 + 2 + 2 + 3 + 3 * 1 - 2 - 2)


@given(multisets())
def test_pivot_position_count_matches_definition(values):
    expected = sum(max(values[:i]) <= min(values[i:]) for i in range(1, len(values)))
    assert pivot_position_count(values) == expected


def test_instance_profile_micro(micro):
    prof = instance_profile(micro)
    assert {k: prof[k] for k in ("n", "rho", "sigma", "delta", "chi", "phi")} == \
        {"n": 10, "rho": 3, "sigma": 9, "delta": 6, "chi": 5, "phi": 2}


def test_cost_report_dict():
    r = CostReport("x", 5, 2, {"p": 1.0}, {"n": 3})
    assert r.as_dict() == {"algorithm": "x", "comparisons": 5, "index_steps": 2,
                           "predictors": {"p": 1.0}, "descriptors": {"n": 3}}
