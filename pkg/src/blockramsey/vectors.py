"""Finitely supported integer vectors under sums and the tetris operation.

A block vector is a finitely supported map from positions to nonzero
integers whose largest magnitude equals a declared bound k.  Unsigned
vectors take values in {1, ..., k}, signed ones in {-k, ..., -1, 1, ..., k}.
Two vectors whose supports are separated (every position of the first
below every position of the second) can be summed coordinate-wise, which
makes each family a partial semigroup.  The tetris operation T lowers
every magnitude by one and drops entries that reach zero.

The span of a block sequence collects every sum of per-block tetris
images, with independent signs in signed mode, subject to at least one
block being used at full magnitude.  Distances are sup-norm; the
embedding into real sequences with coordinates +-(1+delta)^(i-k) links
signed vectors to the unit sphere of c_0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

UNSIGNED = "unsigned"
SIGNED = "signed"
MODES = (UNSIGNED, SIGNED)


@dataclass(frozen=True)
class BlockVector:
    """Sparse vector with magnitude bound k, stored as ordered (position, value) pairs."""

    k: int
    mode: str
    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not self.entries:
            raise ValueError("a block vector has nonempty support")
        prev = -1
        for n, v in self.entries:
            if n <= prev:
                raise ValueError("positions must be strictly increasing")
            if n < 0:
                raise ValueError("positions are nonnegative")
            prev = n
            if v == 0 or abs(v) > self.k:
                raise ValueError(f"value {v} out of range for k={self.k}")
            if self.mode == UNSIGNED and v < 0:
                raise ValueError("unsigned vectors take positive values")
        if max(abs(v) for _, v in self.entries) != self.k:
            raise ValueError(f"magnitude {self.k} must be attained")

    @classmethod
    def make(cls, k: int, mode: str, entries) -> "BlockVector":
        """Build from a mapping or an iterable of (position, value) pairs."""
        if isinstance(entries, Mapping):
            entries = entries.items()
        items = sorted((int(n), int(v)) for n, v in entries)
        return cls(int(k), mode, tuple(items))

    def value_at(self, n: int) -> int:
        for pos, v in self.entries:
            if pos == n:
                return v
        return 0

    def support(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.entries)

    @property
    def min_support(self) -> int:
        return self.entries[0][0]

    @property
    def max_support(self) -> int:
        return self.entries[-1][0]

    def sort_key(self):
        # canonical order: lexicographic by (min support, entries)
        return (self.min_support, self.entries)

    def to_dict(self) -> dict:
        return {"k": self.k, "mode": self.mode, "entries": [list(e) for e in self.entries]}

    @classmethod
    def from_dict(cls, data: dict) -> "BlockVector":
        return cls.make(data["k"], data["mode"], data["entries"])


@dataclass(frozen=True)
class BlockSequence:
    """Finite list of block vectors with shared (k, mode) and strictly separated supports."""

    blocks: tuple[BlockVector, ...]

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("a block sequence is nonempty")
        first = self.blocks[0]
        for b in self.blocks[1:]:
            if b.k != first.k or b.mode != first.mode:
                raise ValueError("blocks must share k and mode")
        for a, b in zip(self.blocks, self.blocks[1:]):
            if not a.max_support < b.min_support:
                raise ValueError("blocks must be in strict block order")

    @classmethod
    def make(cls, blocks: Iterable[BlockVector]) -> "BlockSequence":
        return cls(tuple(blocks))

    @property
    def k(self) -> int:
        return self.blocks[0].k

    @property
    def mode(self) -> str:
        return self.blocks[0].mode

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def to_list(self) -> list:
        return [b.to_dict() for b in self.blocks]

    @classmethod
    def from_list(cls, data: Iterable[dict]) -> "BlockSequence":
        return cls(tuple(BlockVector.from_dict(d) for d in data))


@dataclass(frozen=True)
class RealVector:
    """Finitely supported real vector, ordered (position, value) pairs."""

    entries: tuple[tuple[int, float], ...]

    def __post_init__(self):
        prev = -1
        for n, v in self.entries:
            if n <= prev:
                raise ValueError("positions must be strictly increasing")
            prev = n
            if not math.isfinite(v):
                raise ValueError("values must be finite")

    def value_at(self, n: int) -> float:
        for pos, v in self.entries:
            if pos == n:
                return v
        return 0.0

    def sup_norm(self) -> float:
        return max((abs(v) for _, v in self.entries), default=0.0)

    def to_dict(self) -> dict:
        return {"entries": [[n, v] for n, v in self.entries]}


def support(p: BlockVector) -> tuple[int, ...]:
    """Positions where p is nonzero."""
    return p.support()


def block_lt(p: BlockVector, q: BlockVector) -> bool:
    """True iff every position of p lies below every position of q."""
    _check_compatible(p, q)
    return p.max_support < q.min_support


def block_sum(p: BlockVector, q: BlockVector) -> BlockVector:
    """Coordinate-wise sum; requires block_lt(p, q)."""
    if not block_lt(p, q):
        raise ValueError("block_sum requires p < q in block order")
    return BlockVector(p.k, p.mode, p.entries + q.entries)


def tetris(p: BlockVector) -> BlockVector:
    """Lower every magnitude by one; maps bound k to bound k-1."""
    if p.k < 2:
        raise ValueError("tetris needs k >= 2; the bound-0 family is not modeled")
    return BlockVector(p.k - 1, p.mode, _tetris_entries(p.entries, 1, 1))


def negate(p: BlockVector) -> BlockVector:
    """Flip the sign of every value (signed mode only)."""
    if p.mode != SIGNED:
        raise ValueError("negate requires signed mode")
    return BlockVector(p.k, p.mode, tuple((n, -v) for n, v in p.entries))


def _tetris_entries(entries, j: int, sign: int) -> tuple[tuple[int, int], ...]:
    # raw helper: apply T j times and an overall sign, dropping zeros
    out = []
    for n, v in entries:
        m = abs(v) - j
        if m > 0:
            out.append((n, sign * m if v > 0 else -sign * m))
    return tuple(out)


def span(P: BlockSequence) -> list[BlockVector]:
    """All sums of signed tetris images over nonempty subsets of P.

    Per-block exponents run over 0..k-1 with at least one exponent 0,
    signs over {+1, -1} in signed mode.  Deduplicated, canonical order.
    """
    k, mode = P.k, P.mode
    signs = (1, -1) if mode == SIGNED else (1,)
    options = []
    for b in P.blocks:
        options.append([(j, s) for j in range(k) for s in signs])
    seen = set()
    idx = range(len(P.blocks))
    for size in range(1, len(P.blocks) + 1):
        for subset in itertools.combinations(idx, size):
            for choice in itertools.product(*(options[i] for i in subset)):
                if min(j for j, _ in choice) != 0:
                    continue
                merged = []
                for i, (j, s) in zip(subset, choice):
                    merged.extend(_tetris_entries(P.blocks[i].entries, j, s))
                seen.add(tuple(merged))
    return sorted((BlockVector(k, mode, e) for e in seen), key=BlockVector.sort_key)


def linf_dist(p: BlockVector, q: BlockVector) -> int:
    """Sup-norm distance, treating absent entries as 0."""
    if p.mode != q.mode:
        raise ValueError("mode mismatch")
    a, b = dict(p.entries), dict(q.entries)
    return max(abs(a.get(n, 0) - b.get(n, 0)) for n in set(a) | set(b))

def in_fattening(p: BlockVector, A: Iterable[BlockVector], eps: int) -> bool:
    """True iff some member of A lies within sup-norm distance eps of p."""
    return any(linf_dist(p, q) <= eps for q in A)


def seq_dist(A: BlockSequence, B: BlockSequence) -> float:
    """Sup of element-wise distances; infinity when lengths differ."""
    if len(A) != len(B):
        return math.inf
    return max(linf_dist(a, b) for a, b in zip(A, B))


def embed_delta(p: BlockVector, delta: float) -> RealVector:
    """Send value +-i to +-(1+delta)^(i-k); the image has sup-norm exactly 1."""
    if p.mode != SIGNED:
        raise ValueError("embed_delta requires signed mode")
    base = 1.0 + delta
    out = []
    for n, v in p.entries:
        mag = base ** (abs(v) - p.k)
        out.append((n, mag if v > 0 else -mag))
    return RealVector(tuple(out))


def net_defect(B: BlockSequence, delta: float, sample_count: int, seed: int) -> float:
    """Largest sup-norm gap between random unit vectors of the embedded span
    of B's basis and the embedded images of span(B).

    Samples coefficients uniform in [-1, 1] over the images of B's blocks,
    normalizes to sup-norm 1, and measures distance to the embedded span.
    Requires (1+delta)^(1-k) < delta so that the image grid is delta-dense.
    """
    if B.mode != SIGNED:
        raise ValueError("net_defect requires signed mode")
    if sample_count < 1:
        raise ValueError("sample_count must be positive")
    k = B.k
    if (1.0 + delta) ** (1 - k) >= delta:
        raise ValueError(f"need (1+delta)^(1-k) < delta; got k={k}, delta={delta}")
    positions = sorted({n for b in B for n, _ in b.entries})
    index = {n: i for i, n in enumerate(positions)}

    def dense(rv: RealVector) -> np.ndarray:
        row = np.zeros(len(positions))
        for n, v in rv.entries:
            row[index[n]] = v
        return row

    basis = np.array([dense(embed_delta(b, delta)) for b in B])
    net = np.array([dense(embed_delta(q, delta)) for q in span(B)])
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-1.0, 1.0, size=(sample_count, len(B.blocks)))
    pts = coeffs @ basis
    norms = np.abs(pts).max(axis=1)
    pts = pts[norms > 0] / norms[norms > 0, None]
    defect = 0.0
    chunk = max(1, 10**7 // max(1, net.shape[0] * net.shape[1]))
    for start in range(0, len(pts), chunk):
        batch = pts[start : start + chunk]
        dists = np.abs(batch[:, None, :] - net[None, :, :]).max(axis=2).min(axis=1)
        if dists.size:
            defect = max(defect, float(dists.max()))
    return defect


def _check_compatible(p: BlockVector, q: BlockVector):
    if p.mode != q.mode or p.k != q.k:
        raise ValueError("vectors must share k and mode")
