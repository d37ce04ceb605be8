"""Finite Ramsey witness search: exact and 1-approximate monochromatic spans.

The searches look for a block sequence (of vectors, or of variable
words) of a requested length whose span is monochromatic under a given
colouring, either exactly or after fattening each colour class by
distance 1.  The engine is a depth-first search in canonical order with
incremental pruning: the span of a prefix sits inside the span of every
extension, so a prefix whose span already rules out every colour is
dead.  The first witness found is therefore the lexicographically least
one.  Exhaustion is reported with node counts so pruning changes are
observable in regression runs.

Colourings are total oracles over a declared finite universe.  They can
be lookup tables keyed by the canonical JSON of an element, seeded
pseudo-random mixes of that JSON, members of a small family of
structured rules, or arbitrary callables (not serializable).

The parametrized pipeline mirrors the two-step construction that derives
a coarser block sequence and per-column constraint records from a word
search: it lifts a (vector sequence, matrix) colouring to single words
through the encodings, searches for an even-length witness sequence,
and samples the derived product to confirm the colour guarantee.
"""

from __future__ import annotations

import concurrent.futures
import itertools
import json
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from . import words as W
from .encodings import (
    DerivedPair,
    ParamMatrix,
    decode_witness,
    derived_pair,
    phi_encode,
    product_to_sigmas,
    psi_encode,
)
from .sampling import random_satisfying_string, random_span_element
from .vectors import (
    SIGNED,
    UNSIGNED,
    BlockSequence,
    BlockVector,
    _tetris_entries,
    linf_dist,
)
from .words import Alphabet, Letter, Var, VarWordSequence, Word, classify

FAMILIES = (
    "value-at-min-support",
    "support-size-mod",
    "min-position-mod",
    "weighted-sum-mod",
)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _fnv1a(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h = ((h ^ byte) * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def element_key(elem) -> str:
    """Canonical serialization used by tables and seeded colourings."""
    if isinstance(elem, BlockVector):
        return canonical_json(elem.to_dict())
    if isinstance(elem, Word):
        return canonical_json(elem.to_dict())
    if isinstance(elem, tuple) and len(elem) == 2:
        seq, matrix = elem
        return canonical_json([seq.to_list(), matrix.to_dict()])
    raise ValueError(f"cannot serialize {elem!r}")


def _vector_profile(p: BlockVector):
    return p.entries


def _word_profile(x: Word):
    # positions and indices of the variables, the word-level analogue
    return tuple(
        (n, s.index) for n, s in enumerate(x.symbols) if isinstance(s, Var)
    )


def _family_fn(name: str, r: int, arity: str) -> Callable:
    def profile(*elem):
        if arity == "vector":
            return _vector_profile(elem[0])
        if arity == "word":
            return _word_profile(elem[0])
        return _vector_profile(elem[0].blocks[0])

    if name == "value-at-min-support":
        def fn(*elem):
            prof = profile(*elem)
            return (prof[0][1] if prof else 0) % r
    elif name == "support-size-mod":
        def fn(*elem):
            if arity == "vector_matrix":
                return len(elem[0].blocks) % r
            return len(profile(*elem)) % r
    elif name == "min-position-mod":
        def fn(*elem):
            prof = profile(*elem)
            return (prof[0][0] if prof else 0) % r
    elif name == "weighted-sum-mod":
        def fn(*elem):
            total = sum((n + 1) * v for n, v in profile(*elem))
            if arity == "vector_matrix":
                total += sum((n + 1) * (i + 1) for n, i in elem[1].bits)
            return total % r
    else:
        raise ValueError(f"unknown family {name!r}; choose from {FAMILIES}")
    return fn


class Colouring:
    """Total colour oracle with colours in [0, r)."""

    def __init__(self, arity: str, r: int, spec: dict, fn: Callable):
        if arity not in ("vector", "word", "vector_matrix"):
            raise ValueError(f"unknown arity {arity!r}")
        if r < 1:
            raise ValueError("need at least one colour")
        self.arity = arity
        self.r = r
        self.spec = spec
        self.fn = fn

    @classmethod
    def family(cls, name: str, r: int, arity: str = "vector") -> "Colouring":
        return cls(arity, r, {"kind": "family", "name": name},
                   _family_fn(name, r, arity))

    @classmethod
    def table(cls, mapping: dict, r: int, arity: str = "vector",
              default: Optional[int] = None) -> "Colouring":
        def fn(*elem):
            key = element_key(elem[0] if len(elem) == 1 else elem)
            if key in mapping:
                return mapping[key]
            if default is None:
                raise KeyError(f"no colour for {key}")
            return default

        return cls(arity, r, {"kind": "table", "mapping": dict(mapping),
                              "default": default}, fn)

    @classmethod
    def seeded(cls, seed: int, r: int, arity: str = "vector") -> "Colouring":
        # FNV-1a over the canonical JSON bytes, xor'd with the seed and
        # finished with a splitmix64 round; reproducible across runs.
        def fn(*elem):
            key = element_key(elem[0] if len(elem) == 1 else elem)
            return _splitmix64(_fnv1a(key.encode()) ^ (seed & 0xFFFFFFFFFFFFFFFF)) % r

        return cls(arity, r, {"kind": "seeded", "seed": seed}, fn)

    @classmethod
    def custom(cls, fn: Callable, r: int, arity: str = "vector",
               name: str = "custom") -> "Colouring":
        return cls(arity, r, {"kind": "custom", "name": name}, fn)

    def __call__(self, *elem) -> int:
        c = self.fn(*elem)
        if not 0 <= c < self.r:
            raise ValueError(f"colour {c} out of range [0, {self.r})")
        return c

    def rule_name(self) -> str:
        kind = self.spec["kind"]
        if kind == "family":
            return f"family:{self.spec['name']}"
        if kind == "seeded":
            return f"seeded:{self.spec['seed']}"
        if kind == "custom":
            return f"custom:{self.spec['name']}"
        return kind

    def __getstate__(self):
        if self.spec["kind"] == "custom":
            return {"arity": self.arity, "r": self.r, "spec": self.spec,
                    "fn": self.fn}
        return {"arity": self.arity, "r": self.r, "spec": self.spec}

    def __setstate__(self, state):
        spec = state["spec"]
        if spec["kind"] == "family":
            fn = _family_fn(spec["name"], state["r"], state["arity"])
        elif spec["kind"] == "seeded":
            rebuilt = Colouring.seeded(spec["seed"], state["r"], state["arity"])
            fn = rebuilt.fn
        elif spec["kind"] == "table":
            rebuilt = Colouring.table(spec["mapping"], state["r"],
                                      state["arity"], spec["default"])
            fn = rebuilt.fn
        else:
            fn = state["fn"]
        self.__init__(state["arity"], state["r"], spec, fn)


@dataclass(frozen=True)
class SearchProblem:
    mode: str
    k: int
    r: int
    N: int
    m: int
    radius: int = 0

    def __post_init__(self):
        if self.mode not in (UNSIGNED, SIGNED):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.m < 1 or self.N < self.m:
            raise ValueError("need N >= m >= 1")
        if self.radius not in (0, 1):
            raise ValueError("radius must be 0 or 1")
        if self.radius == 1 and self.mode != SIGNED:
            raise ValueError("approximate search requires signed mode")

    def to_dict(self) -> dict:
        return {"mode": self.mode, "k": self.k, "r": self.r, "N": self.N,
                "m": self.m, "radius": self.radius}


@dataclass(frozen=True)
class Witness:
    kind: str  # "vector" | "word"
    mode: str
    k: int
    r: int
    radius: int
    colour: int
    certificate: tuple
    blocks: Optional[BlockSequence] = None
    words: Optional[VarWordSequence] = None
    N: Optional[int] = None
    lengths: Optional[tuple] = None
    rule: str = ""

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind, "mode": self.mode, "k": self.k, "r": self.r,
            "radius": self.radius, "colour": self.colour,
            "certificate": list(self.certificate), "rule": self.rule,
        }
        if self.blocks is not None:
            out["blocks"] = self.blocks.to_list()
            out["N"] = self.N
        if self.words is not None:
            out["words"] = self.words.to_list()
            out["alphabet"] = self.words.alphabet.to_dict()
            out["lengths"] = list(self.lengths)
        return out


@dataclass(frozen=True)
class Exhausted:
    nodes: int
    dead_ends: int

    def to_dict(self) -> dict:
        return {"exhausted": True, "nodes": self.nodes,
                "dead_ends": self.dead_ends}


def enumerate_universe(k: int, N: int, mode: str) -> list[BlockVector]:
    """Every valid block vector supported inside [0, N), canonical order."""
    if N < 1:
        raise ValueError("N must be positive")
    values = range(0, k + 1) if mode == UNSIGNED else range(-k, k + 1)
    out = []
    for combo in itertools.product(values, repeat=N):
        entries = tuple((n, v) for n, v in enumerate(combo) if v != 0)
        if entries and max(abs(v) for _, v in entries) == k:
            out.append(BlockVector(k, mode, entries))
    out.sort(key=BlockVector.sort_key)
    return out


def vector_ball(p: BlockVector, N: int, radius: int) -> list[BlockVector]:
    """Universe members within sup-norm distance radius of p, canonical order."""
    if radius == 0:
        return [p]
    k, mode = p.k, p.mode
    vals = dict(p.entries)
    choices = []
    for n in range(N):
        v = vals.get(n, 0)
        lo = 0 if mode == UNSIGNED else -k
        choices.append([u for u in range(v - radius, v + radius + 1) if lo <= u <= k])
    out = []
    for combo in itertools.product(*choices):
        entries = tuple((n, u) for n, u in enumerate(combo) if u != 0)
        if entries and max(abs(u) for _, u in entries) == k:
            out.append(BlockVector(k, mode, entries))
    out.sort(key=BlockVector.sort_key)
    return out


def word_ball(x: Word, radius: int) -> list[Word]:
    """Compatible full-class words within word distance radius of x."""
    if radius == 0:
        return [x]
    k = x.k
    zero = x.alphabet.zero
    fixed = W._letter_positions(x)
    choices = []
    for n, sym in enumerate(x.symbols):
        if n in fixed:
            choices.append([sym])
            continue
        idx = W._symbol_index(sym, zero)
        opts = []
        for i in range(idx - radius, idx + radius + 1):
            if i == 0:
                opts.append(Letter(zero))
            elif abs(i) <= k:
                opts.append(Var(i))
        choices.append(opts)
    out = []
    for combo in itertools.product(*choices):
        w = Word(k, x.mode, x.alphabet, combo)
        if classify(w) == k:
            out.append(w)
    out.sort(key=Word.sort_key)
    return out


def _block_variants(b: BlockVector):
    signs = (1, -1) if b.mode == SIGNED else (1,)
    return [
        (_tetris_entries(b.entries, j, s), j)
        for j in range(b.k)
        for s in signs
    ]


class _Counters:
    __slots__ = ("nodes", "dead_ends")

    def __init__(self):
        self.nodes = 0
        self.dead_ends = 0


def _vector_subtree(problem, colouring, universe, feas_cache, root, counters):
    """DFS below a fixed first block; returns the least witness or None.

    A node is one evaluated candidate prefix; a dead end is a node whose
    partial span already excludes every colour.
    """
    variants = {}

    def feasible(entries) -> frozenset:
        if entries not in feas_cache:
            vec = BlockVector(problem.k, problem.mode, entries)
            feas_cache[entries] = frozenset(
                colouring(q) for q in vector_ball(vec, problem.N, problem.radius)
            )
        return feas_cache[entries]

    def evaluate(combos, feas, ci):
        counters.nodes += 1
        if ci not in variants:
            variants[ci] = _block_variants(universe[ci])
        fresh = []
        for vent, vj in variants[ci]:
            fresh.append((vent, vj))
            for ent, j in combos:
                fresh.append((ent + vent, min(j, vj)))
        for ent, j in fresh:
            if j == 0:
                feas = feas & feasible(ent)
                if not feas:
                    counters.dead_ends += 1
                    return None
        return combos + fresh, feas

    def extend(prefix, combos, feas):
        last = universe[prefix[-1]]
        for ci in range(prefix[-1] + 1, len(universe)):
            if universe[ci].min_support <= last.max_support:
                continue
            res = evaluate(combos, feas, ci)
            if res is None:
                continue
            ncombos, nfeas = res
            if len(prefix) + 1 == problem.m:
                return _make_vector_witness(
                    problem, colouring, universe, prefix + [ci], ncombos, nfeas)
            found = extend(prefix + [ci], ncombos, nfeas)
            if found is not None:
                return found
        return None

    res = evaluate([], frozenset(range(problem.r)), root)
    if res is None:
        return None
    combos, feas = res
    if problem.m == 1:
        return _make_vector_witness(problem, colouring, universe, [root],
                                    combos, feas)
    return extend([root], combos, feas)


def _make_vector_witness(problem, colouring, universe, prefix, combos, feas):
    colour = min(feas)
    elements = sorted(
        (BlockVector(problem.k, problem.mode, ent) for ent, j in combos if j == 0),
        key=BlockVector.sort_key,
    )
    cert = []
    for p in elements:
        if problem.radius == 0:
            cert.append({"element": p.to_dict(), "colour": colouring(p)})
        else:
            nb = next(
                q for q in vector_ball(p, problem.N, problem.radius)
                if colouring(q) == colour
            )
            cert.append({
                "element": p.to_dict(), "neighbour": nb.to_dict(),
                "colour": colour, "dist": linf_dist(p, nb),
            })
    return Witness(
        kind="vector", mode=problem.mode, k=problem.k, r=problem.r,
        radius=problem.radius, colour=colour, certificate=tuple(cert),
        blocks=BlockSequence(tuple(universe[i] for i in prefix)),
        N=problem.N, rule=colouring.rule_name(),
    )


def _vector_root_worker(args):
    problem, colouring, root = args
    universe = enumerate_universe(problem.k, problem.N, problem.mode)
    counters = _Counters()
    found = _vector_subtree(problem, colouring, universe, {}, root, counters)
    return found, counters.nodes, counters.dead_ends


def _run_vector_search(problem: SearchProblem, colouring: Colouring,
                       parallel: bool):
    if colouring.arity != "vector":
        raise ValueError("vector searches need a vector colouring")
    universe = enumerate_universe(problem.k, problem.N, problem.mode)
    roots = range(len(universe))
    if parallel:
        with concurrent.futures.ProcessPoolExecutor() as pool:
            results = list(pool.map(
                _vector_root_worker,
                [(problem, colouring, root) for root in roots],
                chunksize=8,
            ))
        nodes = sum(n for _, n, _ in results)
        dead = sum(d for _, _, d in results)
        for found, _, _ in results:
            if found is not None:
                return found
        return Exhausted(nodes, dead)
    counters = _Counters()
    feas_cache = {}
    for root in roots:
        found = _vector_subtree(problem, colouring, universe, feas_cache,
                                root, counters)
        if found is not None:
            return found
    return Exhausted(counters.nodes, counters.dead_ends)


def search_exact(problem: SearchProblem, colouring: Colouring,
                 parallel: bool = False):
    """Least block sequence with an exactly monochromatic span, or Exhausted."""
    if problem.radius != 0:
        raise ValueError("search_exact requires radius 0")
    return _run_vector_search(problem, colouring, parallel)


def search_approx(problem: SearchProblem, colouring: Colouring,
                  parallel: bool = False):
    """Least block sequence whose span sits in the radius-1 fattening of one
    colour class (computed over the declared universe), or Exhausted."""
    if problem.mode != SIGNED:
        raise ValueError("search_approx requires signed mode")
    return _run_vector_search(problem, colouring, parallel)


def word_candidates(alphabet: Alphabet, k: int, mode: str, length: int,
                    letters: Optional[Iterable] = None) -> list[Word]:
    """All full-class words of the given length, canonical order."""
    letters = alphabet.letters(len(alphabet.levels)) if letters is None \
        else sorted(letters, key=W.letter_key)
    indices = range(1, k + 1) if mode == UNSIGNED else \
        [i for i in range(-k, k + 1) if i != 0]
    symbols = [Letter(t) for t in letters] + [Var(i) for i in indices]
    symbols.sort(key=W.symbol_key)
    out = []
    for combo in itertools.product(symbols, repeat=length):
        w = Word(k, mode, alphabet, combo)
        if classify(w) == k:
            out.append(w)
    return out


def _eval_piece(wrd: Word, sign: int, exponent: int, lam) -> Word:
    piece = W.tetris_power(W.substitute(wrd, lam), exponent)
    if sign == -1:
        piece = W.reflect_word(piece)
    return piece


def _ghj_subtree(alphabet, k, mode, r, colouring, lengths, radius, candidates,
                 root, counters):
    feas_cache = {}
    piece_cache = {}

    def feasible(syms) -> frozenset:
        if syms not in feas_cache:
            wrd = Word(k, mode, alphabet, syms)
            feas_cache[syms] = frozenset(
                colouring(y) for y in word_ball(wrd, radius))
        return feas_cache[syms]

    def slot_pieces(slot: int, wrd: Word):
        key = (slot, wrd)
        if key not in piece_cache:
            pieces = []
            for sign, j, lam in W._slot_options(
                    _single_seq(wrd, slot), 0, neg_t=False):
                piece = _eval_piece(wrd, sign, j, lam)
                pieces.append((piece.symbols, classify(piece)))
            piece_cache[key] = pieces
        return piece_cache[key]

    def evaluate(combos, feas, slot, cand):
        counters.nodes += 1
        fresh = {}
        for psyms, pcls in slot_pieces(slot, cand):
            fresh.setdefault((psyms, pcls), None)
            for syms, cls in combos:
                fresh.setdefault((syms + psyms, max(cls, pcls)), None)
        for syms, cls in fresh:
            if cls == k:
                feas = feas & feasible(syms)
                if not feas:
                    counters.dead_ends += 1
                    return None
        return combos + list(fresh), feas

    def extend(slot, prefix, combos, feas):
        for cand in candidates[slot]:
            res = evaluate(combos, feas, slot, cand)
            if res is None:
                continue
            ncombos, nfeas = res
            if slot + 1 == len(lengths):
                return _make_word_witness(alphabet, k, mode, r, colouring,
                                          lengths, radius, prefix + [cand],
                                          ncombos, nfeas)
            found = extend(slot + 1, prefix + [cand], ncombos, nfeas)
            if found is not None:
                return found
        return None

    first = candidates[0][root]
    res = evaluate([], frozenset(range(r)), 0, first)
    if res is None:
        return None
    combos, feas = res
    if len(lengths) == 1:
        return _make_word_witness(alphabet, k, mode, r, colouring, lengths,
                                  radius, [first], combos, feas)
    return extend(1, [first], combos, feas)


def _single_seq(wrd: Word, slot: int) -> VarWordSequence:
    return VarWordSequence((wrd,), (slot,))


def _make_word_witness(alphabet, k, mode, r, colouring, lengths, radius,
                       prefix, combos, feas):
    colour = min(feas)
    seq = VarWordSequence(tuple(prefix))
    elements = sorted(
        {Word(k, mode, alphabet, syms) for syms, cls in combos if cls == k},
        key=Word.sort_key,
    )
    cert = []
    for x in elements:
        if radius == 0:
            cert.append({"element": x.to_dict(), "colour": colouring(x)})
        else:
            nb = next(y for y in word_ball(x, radius) if colouring(y) == colour)
            cert.append({
                "element": x.to_dict(), "neighbour": nb.to_dict(),
                "colour": colour, "dist": W.dist_words(x, nb),
            })
    return Witness(
        kind="word", mode=mode, k=k, r=r, radius=radius, colour=colour,
        certificate=tuple(cert), words=seq, lengths=tuple(lengths),
        rule=colouring.rule_name(),
    )


def _ghj_root_worker(args):
    alphabet, k, mode, r, colouring, lengths, radius, letters, root = args
    candidates = [
        word_candidates(alphabet, k, mode, ln, letters) for ln in lengths
    ]
    counters = _Counters()
    found = _ghj_subtree(alphabet, k, mode, r, colouring, lengths, radius,
                         candidates, root, counters)
    return found, counters.nodes, counters.dead_ends


def search_ghj(alphabet: Alphabet, k: int, mode: str, r: int,
               colouring: Colouring, lengths: Iterable[int],
               radius: Optional[int] = None,
               letters: Optional[Iterable] = None,
               parallel: bool = False):
    """Least rapidly increasing word sequence with the requested lengths whose
    span is monochromatic (exactly, or within the radius-1 fattening).

    Generator lengths are exact and must themselves increase rapidly, so
    every assembled sequence is structurally valid.  `letters` optionally
    restricts the letters available for generator content (substitution
    letters still follow the per-slot level grading).
    """
    lengths = tuple(lengths)
    if not lengths:
        raise ValueError("need at least one generator length")
    total = 0
    for ln in lengths:
        if ln <= total:
            raise ValueError("generator lengths must increase rapidly")
        total += ln
    if radius is None:
        radius = 0 if mode == UNSIGNED else 1
    if radius == 1 and mode != SIGNED:
        raise ValueError("approximate word search requires signed mode")
    if colouring.arity != "word":
        raise ValueError("word searches need a word colouring")
    if letters is not None:
        letters = list(letters)
    candidates = [word_candidates(alphabet, k, mode, ln, letters)
                  for ln in lengths]
    roots = range(len(candidates[0]))
    if parallel:
        with concurrent.futures.ProcessPoolExecutor() as pool:
            results = list(pool.map(
                _ghj_root_worker,
                [(alphabet, k, mode, r, colouring, lengths, radius, letters,
                  root)
                 for root in roots],
                chunksize=4,
            ))
        nodes = sum(n for _, n, _ in results)
        dead = sum(d for _, _, d in results)
        for found, _, _ in results:
            if found is not None:
                return found
        return Exhausted(nodes, dead)
    counters = _Counters()
    for root in roots:
        found = _ghj_subtree(alphabet, k, mode, r, colouring, lengths, radius,
                             candidates, root, counters)
        if found is not None:
            return found
    return Exhausted(counters.nodes, counters.dead_ends)


def oracle_span_vectors(blocks: BlockSequence) -> list[BlockVector]:
    """Generate-then-filter span: enumerate all vectors over the union of the
    supports and keep those expressible over the blocks.  Independent of the
    combination enumeration used by span()."""
    k, mode = blocks.k, blocks.mode
    positions = sorted({n for b in blocks for n, _ in b.entries})
    owner = {}
    for bi, b in enumerate(blocks.blocks):
        for n, _ in b.entries:
            owner[n] = bi
    values = range(0, k + 1) if mode == UNSIGNED else range(-k, k + 1)
    signs = (1,) if mode == UNSIGNED else (1, -1)
    out = []
    for combo in itertools.product(values, repeat=len(positions)):
        entries = tuple(
            (n, v) for n, v in zip(positions, combo) if v != 0)
        if not entries or max(abs(v) for _, v in entries) != k:
            continue
        by_block = {}
        for n, v in entries:
            by_block.setdefault(owner[n], []).append((n, v))
        exps = []
        ok = True
        for bi, restriction in by_block.items():
            restriction = tuple(sorted(restriction))
            j = k - max(abs(v) for _, v in restriction)
            if j >= k or not any(
                _tetris_entries(blocks.blocks[bi].entries, j, s) == restriction
                for s in signs
            ):
                ok = False
                break
            exps.append(j)
        if ok and exps and min(exps) == 0:
            out.append(BlockVector(k, mode, entries))
    out.sort(key=BlockVector.sort_key)
    return out


def oracle_span_words(Y: VarWordSequence) -> list[Word]:
    """Generate-then-filter span: enumerate all words whose length is a subset
    sum of the generator lengths and keep those that parse over Y."""
    lengths = [len(w) for w in Y.words]
    sums = sorted({
        sum(lengths[i] for i in subset)
        for size in range(1, len(lengths) + 1)
        for subset in itertools.combinations(range(len(lengths)), size)
    })
    letters = sorted(Y.alphabet.top, key=W.letter_key)
    indices = range(1, Y.k + 1) if Y.mode == UNSIGNED else \
        [i for i in range(-Y.k, Y.k + 1) if i != 0]
    symbols = [Letter(t) for t in letters] + [Var(i) for i in indices]
    out = []
    for ln in sums:
        for combo in itertools.product(symbols, repeat=ln):
            w = Word(Y.k, Y.mode, Y.alphabet, combo)
            if W.parse_support(Y, w) is not None:
                out.append(w)
    out.sort(key=Word.sort_key)
    return out


@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    colour: int
    checked: int
    failures: tuple

    def to_dict(self) -> dict:
        return {"passed": self.passed, "colour": self.colour,
                "checked": self.checked, "failures": list(self.failures)}


def verify_witness(witness: Witness, colouring: Colouring) -> VerifyReport:
    """Re-enumerate the witness span independently and re-check the colour
    condition; failures are reported, never raised."""
    failures = []
    if witness.kind == "vector":
        elements = oracle_span_vectors(witness.blocks)
    else:
        elements = oracle_span_words(witness.words)
    for x in elements:
        if witness.radius == 0:
            c = colouring(x)
            if c != witness.colour:
                failures.append({
                    "element": _elem_dict(x), "colour": c,
                    "expected": witness.colour,
                })
        else:
            ball = (vector_ball(x, witness.N, witness.radius)
                    if witness.kind == "vector" else
                    word_ball(x, witness.radius))
            if not any(colouring(q) == witness.colour for q in ball):
                failures.append({
                    "element": _elem_dict(x),
                    "reason": f"no colour-{witness.colour} neighbour in radius "
                              f"{witness.radius}",
                })
    return VerifyReport(
        passed=not failures, colour=witness.colour, checked=len(elements),
        failures=tuple(failures),
    )


def _elem_dict(x):
    return x.to_dict()


@dataclass(frozen=True)
class PipelineBounds:
    mode: str
    k: int
    lengths: tuple[int, ...]
    letter_level: int = 0
    sample_count: int = 32
    seed: int = 0

    def __post_init__(self):
        if len(self.lengths) % 2 != 0 or not self.lengths:
            raise ValueError("the word search needs an even number of lengths")


@dataclass(frozen=True)
class PipelineResult:
    pair: DerivedPair
    colour: int
    cols: int
    samples: int
    failures: tuple

    @property
    def passed(self) -> bool:
        return not self.failures


def parametrized_pipeline(colouring: Colouring, bounds: PipelineBounds):
    """Lift a (vector sequence, matrix) colouring to single words, search for
    an even-length witness sequence, and derive the block sequence plus the
    per-column constraint records.  The derived product is then sampled: each
    sample decodes back to a word and must land on the witness colour
    (exactly in unsigned mode, within sequence distance 1 in signed mode).
    """
    if colouring.arity != "vector_matrix":
        raise ValueError("the pipeline needs a (vector sequence, matrix) colouring")
    from .encodings import bitstring_alphabet

    depth = max(bounds.letter_level, len(bounds.lengths) - 1)
    alphabet = bitstring_alphabet(depth)
    cols = depth + 1
    content = [t for t in alphabet.top if len(t) <= bounds.letter_level + 1]

    def lifted(wrd: Word) -> int:
        seq = _single_seq(wrd, 0)
        return colouring(phi_encode(seq), psi_encode(seq, cols))

    word_colouring = Colouring.custom(lifted, colouring.r, arity="word",
                                      name="lifted")
    radius = 0 if bounds.mode == UNSIGNED else 1
    found = search_ghj(alphabet, bounds.k, bounds.mode, colouring.r,
                       word_colouring, bounds.lengths, radius=radius,
                       letters=content)
    if isinstance(found, Exhausted):
        return found
    Y = found.words
    pair = derived_pair(Y, cols)
    rng = random.Random(bounds.seed)
    failures = []
    for _ in range(bounds.sample_count):
        a = random_span_element(rng, pair.B)
        deltas = [random_satisfying_string(rng, desc)
                  for desc in pair.perfect_sets]
        sigmas = product_to_sigmas(Y, deltas)
        Z = decode_witness(Y, BlockSequence((a,)), sigmas)
        z = Z.words[0]
        assembled = ParamMatrix(
            pair.perfect_sets[0].length, cols,
            frozenset((n, i) for i, delta in enumerate(deltas)
                      for n, b in enumerate(delta) if b),
        )
        if phi_encode(Z).blocks != (a,):
            failures.append({"sample": a.to_dict(), "reason": "vector encode mismatch"})
            continue
        if psi_encode(Z, cols) != assembled:
            failures.append({"sample": a.to_dict(), "reason": "matrix encode mismatch"})
            continue
        if bounds.mode == UNSIGNED:
            if lifted(z) != found.colour:
                failures.append({"sample": a.to_dict(), "reason": "colour mismatch"})
        else:
            near = [y for y in word_ball(z, 1) if lifted(y) == found.colour]
            if not near:
                failures.append({"sample": a.to_dict(),
                                 "reason": "no on-colour word within distance 1"})
            else:
                a_tilde = phi_encode(_single_seq(near[0], 0)).blocks[0]
                if linf_dist(a, a_tilde) > 1:
                    failures.append({"sample": a.to_dict(),
                                     "reason": "decoded vector drifted"})
    return PipelineResult(pair=pair, colour=found.colour, cols=cols,
                          samples=bounds.sample_count,
                          failures=tuple(failures))


def witness_from_dict(data: dict) -> Witness:
    """Rebuild a witness from its JSON form (the output of Witness.to_dict)."""
    common = dict(
        kind=data["kind"], mode=data["mode"], k=data["k"], r=data["r"],
        radius=data["radius"], colour=data["colour"],
        certificate=tuple(data["certificate"]), rule=data.get("rule", ""),
    )
    if data["kind"] == "vector":
        return Witness(
            blocks=BlockSequence.from_list(data["blocks"]), N=data["N"],
            **common,
        )
    alphabet = Alphabet.from_dict(data["alphabet"])
    return Witness(
        words=VarWordSequence.from_list(data["words"], alphabet),
        lengths=tuple(data["lengths"]), **common,
    )
