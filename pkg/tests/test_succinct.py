import math
import random

import pytest
from hypothesis import given, strategies as st

from synergy.succinct import (
    MAGIC,
    BitVectorRS,
    PackedInts,
    PermutationRS,
    RankAwareCDS,
    SelectAwareCDS,
    SequenceRS,
    build_rank_aware,
    build_select_aware,
    deserialize,
    serialize,
    shortcut_stride,
    space_report,
)

from conftest import multisets

BUILDERS = [build_rank_aware, build_select_aware]


def bits_str(bv):
    return "".join(map(str, bv.to_list()))


@given(st.lists(st.booleans(), max_size=2000))
def test_bitvector_against_scans(bits):
    bv = BitVectorRS(bits)
    prefix = 0
    for i, b in enumerate(bits):
        assert bv.rank1(i) == prefix
        prefix += b
    assert bv.rank1(len(bits)) == prefix == bv.ones
    ones = [i for i, b in enumerate(bits) if b]
    zeros = [i for i, b in enumerate(bits) if not b]
    assert [bv.select1(j) for j in range(1, len(ones) + 1)] == ones
    assert [bv.select0(j) for j in range(1, len(zeros) + 1)] == zeros


def test_bitvector_random_probes():
    rng = random.Random(0)
    n = 300_000
    bits = [rng.random() < 0.7 for _ in range(n)]
    bv = BitVectorRS(bits)
    prefix = [0]
    for b in bits:
        prefix.append(prefix[-1] + b)
    ones = [i for i, b in enumerate(bits) if b]
    zeros = [i for i, b in enumerate(bits) if not b]
    for _ in range(100_000):
        i = rng.randrange(n + 1)
        assert bv.rank1(i) == prefix[i]
    for _ in range(20_000):
        j = rng.randrange(len(ones))
        assert bv.select1(j + 1) == ones[j]
        assert bv.rank1(bv.select1(j + 1)) == j
        k = rng.randrange(len(zeros))
        assert bv.select0(k + 1) == zeros[k]


def test_bitvector_select_rejects_out_of_range():
    bv = BitVectorRS([1, 0, 1])
    with pytest.raises(ValueError):
        bv.select1(3)
    with pytest.raises(ValueError):
        bv.select0(0)


def test_directory_overhead_shrinks_with_n():
    rng = random.Random(1)
    ratios = []
    for k in range(10, 25, 2):
        n = 1 << k
        import numpy as np
        bits = np.frombuffer(rng.randbytes(n // 8), dtype=np.uint8)
        bv = BitVectorRS(np.unpackbits(bits))
        ratios.append(bv.space()["directory"] / n)
    assert all(b <= a for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < ratios[0]


@given(st.lists(st.integers(0, 2 ** 20 - 1), max_size=200), st.integers(20, 33))
def test_packed_ints(values, width):
    p = PackedInts(values, width)
    assert [p[i] for i in range(len(values))] == values
    assert p.bits() == width * len(values)


def test_packed_ints_reject_wide_values():
    with pytest.raises(ValueError):
        PackedInts([8], 3)


@given(st.integers(1, 40).flatmap(lambda s: st.tuples(st.just(s), st.lists(st.integers(0, s - 1), max_size=200))))
def test_sequence_access_rank_select(case):
    sigma, seq = case
    S = SequenceRS(seq, sigma)
    assert [S.access(j) for j in range(len(seq))] == seq
    for c in set(seq):
        occ = [i for i, x in enumerate(seq) if x == c]
        assert [S.select(c, k) for k in range(1, len(occ) + 1)] == occ
        for j in range(len(seq) + 1):
            r = S.rank(c, j)
            assert r == sum(1 for i in occ if i < j)
            if r:
                assert S.select(c, r) < j


@given(st.permutations(list(range(300))).flatmap(lambda p: st.just(p)))
def test_permutation_inverse_and_walk_length(perm):
    P = PermutationRS(perm)
    t = shortcut_stride(len(perm))
    for y in range(len(perm)):
        x = P.inverse(y)
        assert perm[x] == y and P(x) == y
        assert P.last_walk <= t + 1


def test_shortcut_stride():
    assert shortcut_stride(1) == 1
    assert shortcut_stride(2 ** 16) == math.ceil(16 / 4)
    assert shortcut_stride(2 ** 20) == math.ceil(20 / math.log2(20))


def test_micro_layout(micro):
    ra = build_rank_aware(micro)
    assert (ra.delta, ra.rho) == (6, 3)
    # sorted blocks (1)(2)(3)(3)(4 5 6)(7 8 9) start at ranks 0 1 2 3 4 7
    assert bits_str(ra.A) == "1111100100"
    assert bits_str(ra.C) == "1010000100"
    assert [ra.S.access(j) for j in range(6)] == [1, 0, 0, 1, 2, 1]
    assert ra.A.ones == ra.B.ones == 6 and ra.C.ones == 3


def test_single_run_layout():
    ra = build_rank_aware([1, 2, 3, 4, 5])
    assert bits_str(ra.A) == bits_str(ra.B) == bits_str(ra.C) == "10000"
    assert [ra.S.access(0)] == [0] and ra.delta == 1


def test_all_equal_runs_of_one():
    ra = build_rank_aware([4, 4, 4, 4])
    # equal values form non-decreasing runs, so each copy is its own block inside one run
    assert ra.rho == 1 and ra.delta == 4
    ra = build_rank_aware([4, 3, 2, 1])
    assert ra.rho == ra.delta == 4


@pytest.mark.parametrize("build", BUILDERS)
def test_micro_queries(build, micro):
    cds = build(micro)
    assert micro[cds.cds_select(4)] == 3
    assert cds.cds_rank(micro.index(1)) == 0
    assert cds.rank_value(3) == 2
    with pytest.raises(ValueError):
        cds.cds_select(0)
    with pytest.raises(ValueError):
        cds.cds_rank(len(micro))


@pytest.mark.parametrize("build", BUILDERS)
@given(values=multisets(max_size=120).filter(bool))
def test_round_trip_against_oracle(build, values):
    cds = build(values)
    n = len(values)
    stable = sorted(range(n), key=lambda i: (values[i], i))
    srt = sorted(values)
    assert [cds.cds_select(i) for i in range(1, n + 1)] == stable
    assert [cds.cds_rank(p) for p in stable] == list(range(n))
    assert [cds.rank_value(values[p]) for p in range(n)] == [srt.index(values[p]) for p in range(n)]
    assert cds.decode_original() == values
    assert cds.A.ones == cds.B.ones == cds.delta


@pytest.mark.parametrize("build", BUILDERS)
@given(values=multisets(max_size=80))
def test_serialization_is_bit_exact(build, values):
    cds = build(values)
    data = serialize(cds)
    assert data.startswith(MAGIC)
    back = deserialize(data)
    assert serialize(back) == data
    assert type(back) is type(cds)
    if values:
        assert back.decode_original() == values


def test_bad_stream():
    with pytest.raises(ValueError):
        deserialize(b"NOPE00")
    with pytest.raises(ValueError):
        deserialize(serialize(build_rank_aware([3, 1, 2]))[:-5])


def test_space_report_components():
    rng = random.Random(2)
    values = [rng.randint(1, 1000) for _ in range(5000)]
    ra, sa = build_rank_aware(values), build_select_aware(values)
    assert set(space_report(ra).components) == {"A", "B", "C", "S"}
    assert set(space_report(sa).components) == {"A", "B", "perm"}
    assert isinstance(ra, RankAwareCDS) and isinstance(sa, SelectAwareCDS)
    assert space_report(ra).total == sum(space_report(ra).components.values())
