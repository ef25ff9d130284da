"""Compressed multiset representations answering rank and select by position.

Both structures describe the input through its blocks (see
:func:`synergy.measures.block_decomposition`):

* ``RankAwareCDS`` keeps bitvectors ``A`` (block starts in rank space),
  ``B`` (block starts in input order) and ``C`` (run starts) plus the
  sequence ``S`` of run ids of the blocks in sorted order.
* ``SelectAwareCDS`` keeps ``A`` and ``B`` plus a permutation mapping each
  block's sorted index to its index in input order.

Positions are 0-based, select ranks 1-based. ``cds_select(i)`` returns the
input position of the i-th smallest element; ``cds_rank(p)`` returns the
stable sorted index of the element at input position ``p`` (earlier equal
copies count as smaller); ``rank_value(x)`` counts elements strictly smaller
than ``x``. The sorted values themselves are kept alongside the structure
so that answers can be turned back into values; they are not part of the
space accounting.
"""
from __future__ import annotations

import bisect
import io
import math
import struct
from dataclasses import dataclass
from typing import BinaryIO, Dict, List, Sequence

import numpy as np

from .measures import block_decomposition

SUPERBLOCK_BITS = 512
WORD_BITS = 64
WORDS_PER_SUPERBLOCK = SUPERBLOCK_BITS // WORD_BITS
RELATIVE_FIELD_BITS = 9
SELECT_SAMPLE = 8192
MAGIC = b"SMCDS1"
_MASK64 = (1 << 64) - 1


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    """Little-endian bit packing into uint64 words (bit ``i`` of the vector is bit ``i % 64`` of word ``i // 64``)."""
    n = len(bits)
    padded = np.zeros(-(-n // WORD_BITS) * WORD_BITS, dtype=np.uint8)
    padded[:n] = bits
    return np.packbits(padded, bitorder="little").view("<u8").astype(np.uint64)


def _word_select(word: int, k: int) -> int:
    """Position of the k-th (1-based) set bit of ``word``, by halving popcounts."""
    pos = 0
    for width in (32, 16, 8, 4, 2, 1):
        low = ((word >> pos) & ((1 << width) - 1)).bit_count()
        if low < k:
            k -= low
            pos += width
    return pos


class BitVectorRS:
    """Static bitvector with a two-level rank directory and sampled select.

    Every 512-bit superblock stores the absolute count of ones before it
    (uint32) and one uint64 packing seven 9-bit counts of ones before each
    of its words 1..7. Select keeps the position of every 8192-th one (and
    every 8192-th zero) to bracket a binary search over superblocks.
    """

    def __init__(self, bits=(), _parts=None):
        if _parts is not None:
            self.n, self.words, self.superblocks, self.relative, self.samples1, self.samples0 = _parts
        else:
            arr = np.asarray(bits, dtype=bool).astype(np.uint8)
            self.n = len(arr)
            self.words = _pack_bits(arr)
            self._build_directory()
        self._cache()

    def _build_directory(self):
        nwords = len(self.words)
        nsb = max(1, -(-nwords // WORDS_PER_SUPERBLOCK))
        counts = np.zeros(nsb * WORDS_PER_SUPERBLOCK, dtype=np.int64)
        counts[:nwords] = np.bitwise_count(self.words)
        per_sb = counts.reshape(nsb, WORDS_PER_SUPERBLOCK)
        inner = np.cumsum(per_sb, axis=1)
        totals = inner[:, -1]
        self.superblocks = np.concatenate(([0], np.cumsum(totals)[:-1])).astype(np.uint32)
        shifts = np.arange(WORDS_PER_SUPERBLOCK - 1, dtype=np.uint64) * np.uint64(RELATIVE_FIELD_BITS)
        self.relative = np.bitwise_or.reduce(inner[:, :-1].astype(np.uint64) << shifts, axis=1)
        bits = np.unpackbits(self.words.view(np.uint8), bitorder="little")[: self.n].astype(bool)
        self.samples1 = np.flatnonzero(bits)[::SELECT_SAMPLE].astype(np.uint32)
        self.samples0 = np.flatnonzero(~bits)[::SELECT_SAMPLE].astype(np.uint32)

    def _cache(self):
        # Plain lists make per-query indexing cheap; the numpy arrays stay the
        # canonical (serialized, accounted) form.
        self._w = self.words.tolist()
        # one extra superblock entry lets rank1(n) skip a bounds check
        self._sb = self.superblocks.tolist() + [int(np.bitwise_count(self.words).sum())]
        self._rel = self.relative.tolist()
        self._s1 = self.samples1.tolist()
        self._s0 = self.samples0.tolist()
        self.ones = self._sb[-1]

    def __len__(self) -> int:
        return self.n

    def access(self, i: int) -> int:
        return (self._w[i >> 6] >> (i & 63)) & 1

    def rank1(self, i: int) -> int:
        """Ones in ``[0, i)``."""
        if i <= 0:
            return 0
        if i >= self.n:
            return self.ones
        w = i >> 6
        sub = w & 7
        r = self._sb[i >> 9]
        if sub:
            r += (self._rel[i >> 9] >> (RELATIVE_FIELD_BITS * (sub - 1))) & 511
        bit = i & 63
        if bit:
            r += (self._w[w] & ((1 << bit) - 1)).bit_count()
        return r

    def rank0(self, i: int) -> int:
        if i >= self.n:
            return self.n - self.ones
        return i - self.rank1(i) if i > 0 else 0

    def _ones_before_word(self, sb: int, sub: int) -> int:
        return (self._rel[sb] >> (RELATIVE_FIELD_BITS * (sub - 1))) & 511 if sub else 0

    def select1(self, j: int) -> int:
        """Position of the j-th (1-based) one."""
        if not 1 <= j <= self.ones:
            raise ValueError(f"select1({j}) outside [1, {self.ones}]")
        k = (j - 1) // SELECT_SAMPLE
        lo = self._s1[k] >> 9
        hi = (self._s1[k + 1] >> 9) if k + 1 < len(self._s1) else len(self._sb) - 2
        sb = bisect.bisect_left(self._sb, j, lo, hi + 1) - 1
        rem = j - self._sb[sb]
        sub = 0
        while sub < 7 and self._ones_before_word(sb, sub + 1) < rem:
            sub += 1
        rem -= self._ones_before_word(sb, sub)
        w = sb * WORDS_PER_SUPERBLOCK + sub
        return w * WORD_BITS + _word_select(self._w[w], rem)

    def select0(self, j: int) -> int:
        """Position of the j-th (1-based) zero."""
        zeros = self.n - self.ones
        if not 1 <= j <= zeros:
            raise ValueError(f"select0({j}) outside [1, {zeros}]")
        k = (j - 1) // SELECT_SAMPLE
        lo = self._s0[k] >> 9
        hi = (self._s0[k + 1] >> 9) if k + 1 < len(self._s0) else len(self._sb) - 2
        # last superblock with fewer than j zeros before it
        while lo < hi:
            mid = (lo + hi + 1) >> 1
            if mid * SUPERBLOCK_BITS - self._sb[mid] < j:
                lo = mid
            else:
                hi = mid - 1
        sb = lo
        rem = j - (sb * SUPERBLOCK_BITS - self._sb[sb])
        sub = 0
        while sub < 7 and (sub + 1) * WORD_BITS - self._ones_before_word(sb, sub + 1) < rem:
            sub += 1
        rem -= sub * WORD_BITS - self._ones_before_word(sb, sub)
        w = sb * WORDS_PER_SUPERBLOCK + sub
        return w * WORD_BITS + _word_select(~self._w[w] & _MASK64, rem)

    def to_list(self) -> List[int]:
        return [self.access(i) for i in range(self.n)]

    def space(self) -> Dict[str, int]:
        return {
            "payload": self.n,
            "directory": 32 * len(self.superblocks) + 64 * len(self.relative)
            + 32 * (len(self.samples1) + len(self.samples0)),
        }

    def bits(self) -> int:
        s = self.space()
        return s["payload"] + s["directory"]

    def __eq__(self, other) -> bool:
        return isinstance(other, BitVectorRS) and self.n == other.n and np.array_equal(self.words, other.words)


class PackedInts:
    """Fixed-width unsigned integers packed into uint64 words."""

    def __init__(self, values=(), width: int = 1, _words=None, _length=None):
        self.width = max(1, int(width))
        if _words is not None:
            self.words, self.length = _words, _length
        else:
            vals = np.asarray(values, dtype=np.uint64)
            self.length = len(vals)
            if len(vals) and int(vals.max()) >> self.width:
                raise ValueError(f"value does not fit in {self.width} bits")
            offsets = np.arange(self.length, dtype=np.uint64) * np.uint64(self.width)
            word = (offsets >> np.uint64(6)).astype(np.int64)
            shift = offsets & np.uint64(63)
            words = np.zeros(-(-self.length * self.width // 64) + 1, dtype=np.uint64)
            np.bitwise_or.at(words, word, vals << shift)
            spill = shift + np.uint64(self.width) > np.uint64(64)
            np.bitwise_or.at(words, word[spill] + 1, vals[spill] >> (np.uint64(64) - shift[spill]))
            self.words = words
        self._w = self.words.tolist()
        self._mask = (1 << self.width) - 1

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        off = i * self.width
        w, s = off >> 6, off & 63
        x = self._w[w] >> s
        if s + self.width > 64:
            x |= self._w[w + 1] << (64 - s)
        return x & self._mask

    def bits(self) -> int:
        return self.length * self.width


class SequenceRS:
    """Wavelet matrix over symbols ``[0, sigma)``: access, rank and select in one pass per bit level."""

    def __init__(self, symbols=(), sigma: int = 1, _parts=None):
        if _parts is not None:
            self.length, self.sigma, self.levels, self.zeros = _parts
            return
        cur = np.asarray(symbols, dtype=np.int64)
        self.length = len(cur)
        self.sigma = max(1, int(sigma))
        if len(cur) and (cur.min() < 0 or cur.max() >= self.sigma):
            raise ValueError("symbol outside the alphabet")
        depth = max(1, (self.sigma - 1).bit_length())
        self.levels: List[BitVectorRS] = []
        self.zeros: List[int] = []
        for lvl in range(depth):
            bits = (cur >> (depth - 1 - lvl)) & 1
            self.levels.append(BitVectorRS(bits))
            self.zeros.append(int(len(cur) - bits.sum()))
            cur = np.concatenate((cur[bits == 0], cur[bits == 1]))

    @property
    def depth(self) -> int:
        return len(self.levels)

    def __len__(self) -> int:
        return self.length

    def access(self, j: int) -> int:
        c = 0
        for bv, z in zip(self.levels, self.zeros):
            b = bv.access(j)
            j = z + bv.rank1(j) if b else bv.rank0(j)
            c = (c << 1) | b
        return c

    def _path(self, c: int):
        """Per level: bitvector, zero count and the bit of ``c`` routed there."""
        top = len(self.levels) - 1
        return [(bv, z, (c >> (top - lvl)) & 1) for lvl, (bv, z) in enumerate(zip(self.levels, self.zeros))]

    def rank(self, c: int, j: int) -> int:
        """Occurrences of ``c`` in ``[0, j)``."""
        start = 0
        for bv, z, b in self._path(c):
            if b:
                start, j = z + bv.rank1(start), z + bv.rank1(j)
            else:
                start, j = bv.rank0(start), bv.rank0(j)
        return j - start

    def select(self, c: int, i: int) -> int:
        """Position of the i-th (1-based) occurrence of ``c``."""
        path = self._path(c)
        start = 0
        for bv, z, b in path:
            start = z + bv.rank1(start) if b else bv.rank0(start)
        pos = start + i - 1
        for bv, z, b in reversed(path):
            pos = bv.select1(pos - z + 1) if b else bv.select0(pos + 1)
        return pos

    def bits(self) -> int:
        return sum(bv.bits() for bv in self.levels) + 64 * len(self.zeros)


def shortcut_stride(delta: int) -> int:
    """Back-pointer spacing ``max(1, ceil(log2 d / log2 log2 d))``."""
    if delta < 4:
        return 1
    lg = math.log2(delta)
    return max(1, math.ceil(lg / math.log2(lg)))


class PermutationRS:
    """A permutation stored explicitly, with back-pointers every ``stride`` steps along long cycles.

    ``inverse(y)`` walks forward from ``y``; the first marked element met
    within ``stride`` steps jumps back to the previous mark on the cycle,
    from where the predecessor of ``y`` is at most ``stride`` steps ahead.
    ``last_walk`` records the elements visited before the jump.
    """

    def __init__(self, perm=(), _parts=None):
        if _parts is not None:
            self.forward, self.marks, self.back, self.stride = _parts
        else:
            perm = np.asarray(perm, dtype=np.int64)
            d = len(perm)
            if d and not np.array_equal(np.sort(perm), np.arange(d)):
                raise ValueError("not a permutation of [0, d)")
            width = max(1, (d - 1).bit_length())
            self.stride = shortcut_stride(d)
            self.forward = PackedInts(perm, width)
            marks = np.zeros(d, dtype=np.uint8)
            back_of: Dict[int, int] = {}
            seen = np.zeros(d, dtype=bool)
            fwd = perm.tolist()
            t = self.stride
            for s in range(d):
                if seen[s]:
                    continue
                cycle = [s]
                seen[s] = True
                x = fwd[s]
                while x != s:
                    cycle.append(x)
                    seen[x] = True
                    x = fwd[x]
                if len(cycle) <= t:
                    continue
                marked = cycle[::t]
                for k, m in enumerate(marked):
                    marks[m] = 1
                    back_of[m] = marked[k - 1]
            self.marks = BitVectorRS(marks)
            self.back = PackedInts([back_of[m] for m in sorted(back_of)], width)
        self.last_walk = 0
        self.evaluations = 0

    def __len__(self) -> int:
        return len(self.forward)

    def __call__(self, i: int) -> int:
        return self.forward[i]

    def inverse(self, y: int) -> int:
        x = y
        visited = 1
        evaluations = 0
        jumped = False
        while True:
            nxt = self.forward[x]
            evaluations += 1
            if nxt == y:
                break
            if not jumped and self.marks.access(x):
                x = self.back[self.marks.rank1(x)]
                jumped = True
                continue
            x = nxt
            if not jumped:
                visited += 1
        self.last_walk = visited
        self.evaluations = evaluations
        return x

    def bits(self) -> int:
        return self.forward.bits() + self.marks.bits() + self.back.bits()


# -- the two multiset structures


class _BlockStructure:
    """Shared parts: bitvectors A and B, the sorted values, and value-level rank."""

    kind = 0

    def __len__(self) -> int:
        return self.n

    def _check_position(self, p: int):
        if not 0 <= p < self.n:
            raise ValueError(f"position {p} outside [0, {self.n})")

    def _check_rank(self, i: int):
        if not 1 <= i <= self.n:
            raise ValueError(f"select rank {i} outside [1, {self.n}]")

    def rank_value(self, x) -> int:
        """Elements strictly smaller than ``x``."""
        return bisect.bisect_left(self.sorted_values, x)

    def value_at(self, p: int):
        """The input value at position ``p``, decoded through ``cds_rank``."""
        return self.sorted_values[self.cds_rank(p)]

    def decode_original(self) -> list:
        return [self.value_at(p) for p in range(self.n)]

    def decode_sorted_positions(self) -> List[int]:
        return [self.cds_select(i) for i in range(1, self.n + 1)]


class RankAwareCDS(_BlockStructure):
    kind = 1

    def __init__(self, n, rho, delta, A, B, C, S, sorted_values):
        self.n, self.rho, self.delta = n, rho, delta
        self.A, self.B, self.C, self.S = A, B, C, S
        self.sorted_values = sorted_values

    def cds_rank(self, p: int) -> int:
        self._check_position(p)
        run = self.C.rank1(p + 1) - 1
        run_start = self.C.select1(run + 1)
        block_in_run = self.B.rank1(p + 1) - self.B.rank1(run_start)
        sorted_block = self.S.select(run, block_in_run)
        block_origin = self.B.select1(self.B.rank1(p + 1))
        return self.A.select1(sorted_block + 1) + p - block_origin

    def cds_select(self, i: int) -> int:
        self._check_rank(i)
        sorted_block = self.A.rank1(i) - 1
        run = self.S.access(sorted_block)
        block_in_run = self.S.rank(run, sorted_block + 1)
        origin = self.B.select1(block_in_run + self.B.rank1(self.C.select1(run + 1)))
        return origin + (i - 1) - self.A.select1(sorted_block + 1)

    def space(self) -> Dict[str, int]:
        return {"A": self.A.bits(), "B": self.B.bits(), "C": self.C.bits(), "S": self.S.bits()}


class SelectAwareCDS(_BlockStructure):
    kind = 2

    def __init__(self, n, rho, delta, A, B, perm, sorted_values):
        self.n, self.rho, self.delta = n, rho, delta
        self.A, self.B, self.perm = A, B, perm
        self.sorted_values = sorted_values

    def cds_select(self, i: int) -> int:
        self._check_rank(i)
        sorted_block = self.A.rank1(i) - 1
        origin = self.B.select1(self.perm(sorted_block) + 1)
        return origin + (i - 1) - self.A.select1(sorted_block + 1)

    def cds_rank(self, p: int) -> int:
        self._check_position(p)
        block = self.B.rank1(p + 1) - 1
        sorted_block = self.perm.inverse(block)
        return self.A.select1(sorted_block + 1) + p - self.B.select1(block + 1)

    def space(self) -> Dict[str, int]:
        return {"A": self.A.bits(), "B": self.B.bits(), "perm": self.perm.bits()}


@dataclass
class SpaceReport:
    """Measured bits per component next to the leading-term target."""

    components: Dict[str, int]
    n: int
    rho: int
    delta: int
    target: float

    @property
    def total(self) -> int:
        return sum(self.components.values())

    @property
    def ratio(self) -> float:
        return self.total / self.target if self.target else float("inf")


def _block_layout(values):
    bd = block_decomposition(values)
    n = bd.n
    vals = list(values)
    lens = bd.block_len
    rank_starts = np.concatenate(([0], np.cumsum(lens)[:-1])).astype(np.int64) if n else lens
    A = np.zeros(n, dtype=np.uint8)
    B = np.zeros(n, dtype=np.uint8)
    C = np.zeros(n, dtype=np.uint8)
    A[rank_starts] = 1
    B[bd.block_start] = 1
    if n:
        C[0] = 1
        C[1:] = [vals[i] < vals[i - 1] for i in range(1, n)]
    sorted_values = [vals[i] for i in bd.order.tolist()]
    return bd, A, B, C, sorted_values


def build_rank_aware(values) -> RankAwareCDS:
    bd, A, B, C, sorted_values = _block_layout(values)
    S = SequenceRS(bd.block_run, max(1, bd.rho))
    return RankAwareCDS(bd.n, bd.rho, bd.delta, BitVectorRS(A), BitVectorRS(B), BitVectorRS(C), S, sorted_values)


def build_select_aware(values) -> SelectAwareCDS:
    bd, A, B, _, sorted_values = _block_layout(values)
    # Blocks in input order are the blocks ordered by start position, so the
    # input-order index of sorted block j is the rank of its start.
    origin_index = np.argsort(np.argsort(bd.block_start, kind="stable"), kind="stable")
    return SelectAwareCDS(bd.n, bd.rho, bd.delta, BitVectorRS(A), BitVectorRS(B),
                          PermutationRS(origin_index), sorted_values)


def space_report(structure) -> SpaceReport:
    n, rho, delta = structure.n, structure.rho, structure.delta
    if isinstance(structure, RankAwareCDS):
        target = delta * math.log2(rho) + 3 * n if rho else 0.0
    else:
        loglog = math.log2(math.log2(delta)) if delta > 2 else 0.0
        target = (delta * math.log2(delta) if delta else 0.0) + 2 * n + 2 * delta * loglog
    return SpaceReport(structure.space(), n, rho, delta, target)


# -- serialization: magic, kind byte, then length-prefixed little-endian components


def _write_array(out: BinaryIO, arr: np.ndarray, dtype: str):
    data = np.ascontiguousarray(arr, dtype=dtype).tobytes()
    out.write(struct.pack("<Q", len(data)))
    out.write(data)


def _read_array(inp: BinaryIO, dtype: str) -> np.ndarray:
    (size,) = struct.unpack("<Q", _read_exact(inp, 8))
    return np.frombuffer(_read_exact(inp, size), dtype=dtype).copy()


def _read_exact(inp: BinaryIO, size: int) -> bytes:
    data = inp.read(size)
    if len(data) != size:
        raise ValueError("truncated structure stream")
    return data


def _write_bitvector(out, bv: BitVectorRS):
    out.write(struct.pack("<Q", bv.n))
    _write_array(out, bv.words, "<u8")
    _write_array(out, bv.superblocks, "<u4")
    _write_array(out, bv.relative, "<u8")
    _write_array(out, bv.samples1, "<u4")
    _write_array(out, bv.samples0, "<u4")


def _read_bitvector(inp) -> BitVectorRS:
    (n,) = struct.unpack("<Q", _read_exact(inp, 8))
    parts = [_read_array(inp, d).astype(d[1:]) for d in ("<u8", "<u4", "<u8", "<u4", "<u4")]
    return BitVectorRS(_parts=(n, *parts))


def _write_packed(out, p: PackedInts):
    out.write(struct.pack("<QI", p.length, p.width))
    _write_array(out, p.words, "<u8")


def _read_packed(inp) -> PackedInts:
    length, width = struct.unpack("<QI", _read_exact(inp, 12))
    return PackedInts(width=width, _words=_read_array(inp, "<u8").astype(np.uint64), _length=length)


def serialize(structure) -> bytes:
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<BQQQ", structure.kind, structure.n, structure.rho, structure.delta))
    _write_array(out, np.asarray(structure.sorted_values, dtype=np.int64), "<i8")
    _write_bitvector(out, structure.A)
    _write_bitvector(out, structure.B)
    if isinstance(structure, RankAwareCDS):
        _write_bitvector(out, structure.C)
        S = structure.S
        out.write(struct.pack("<QQI", S.length, S.sigma, S.depth))
        _write_array(out, np.asarray(S.zeros, dtype=np.uint64), "<u8")
        for bv in S.levels:
            _write_bitvector(out, bv)
    else:
        perm = structure.perm
        out.write(struct.pack("<I", perm.stride))
        _write_packed(out, perm.forward)
        _write_bitvector(out, perm.marks)
        _write_packed(out, perm.back)
    return out.getvalue()


def deserialize(data: bytes):
    inp = io.BytesIO(data)
    if _read_exact(inp, len(MAGIC)) != MAGIC:
        raise ValueError("not a serialized compressed multiset (bad magic)")
    kind, n, rho, delta = struct.unpack("<BQQQ", _read_exact(inp, 25))
    sorted_values = _read_array(inp, "<i8").tolist()
    A = _read_bitvector(inp)
    B = _read_bitvector(inp)
    if kind == RankAwareCDS.kind:
        C = _read_bitvector(inp)
        length, sigma, depth = struct.unpack("<QQI", _read_exact(inp, 20))
        zeros = _read_array(inp, "<u8").tolist()
        levels = [_read_bitvector(inp) for _ in range(depth)]
        S = SequenceRS(_parts=(length, sigma, levels, zeros))
        return RankAwareCDS(n, rho, delta, A, B, C, S, sorted_values)
    if kind == SelectAwareCDS.kind:
        (stride,) = struct.unpack("<I", _read_exact(inp, 4))
        forward = _read_packed(inp)
        marks = _read_bitvector(inp)
        back = _read_packed(inp)
        return SelectAwareCDS(n, rho, delta, A, B, PermutationRS(_parts=(forward, marks, back, stride)), sorted_values)
    raise ValueError(f"unknown structure kind {kind}")
