"""Variable words over graded alphabets: substitution, tetris, spans, parsing.

Words mix letters drawn from an increasing chain of finite alphabet
levels with variables v_1, ..., v_k (and v_{-1}, ..., v_{-k} in signed
mode).  Substitution replaces every variable occurrence by a letter from
a tuple, the word tetris lowers each variable index by one (sending
v_{+-1} to the zero letter), and reflection negates variable indices.

Spans of rapidly increasing sequences concatenate per-generator pieces
of the form sign * T^j(x[tuple]), where the tuple for the generator with
global index n must come from level n of the alphabet.  Rapid increase
(each word longer than all predecessors combined) makes the generator
index set of any span element unique, so span elements can be parsed
back into a canonical decomposition.

Signed words carry a metric: two words are compatible when they have
equal length and agree on positions holding nonzero letters, and their
distance is the largest index gap over the remaining positions (zero
letter counting as index 0).  The halving map folds variable indices
+-1..+-2k down to 0..+-k and contracts this metric by a factor of two.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .vectors import MODES, SIGNED, UNSIGNED


def letter_key(token):
    """Deterministic sort key for letter tokens (strings or bit tuples)."""
    if isinstance(token, str):
        return (0, token)
    return (1, len(token), tuple(token))


@dataclass(frozen=True)
class Alphabet:
    """Increasing chain of finite letter sets with a designated zero letter."""

    levels: tuple[frozenset, ...]
    zero: object

    def __post_init__(self):
        if not self.levels:
            raise ValueError("an alphabet has at least one level")
        if self.zero not in self.levels[0]:
            raise ValueError("the zero letter must lie in the bottom level")
        for lo, hi in zip(self.levels, self.levels[1:]):
            if not lo <= hi:
                raise ValueError("levels must form an increasing chain")

    @classmethod
    def make(cls, levels: Iterable[Iterable], zero) -> "Alphabet":
        return cls(tuple(frozenset(l) for l in levels), zero)

    @property
    def top(self) -> frozenset:
        return self.levels[-1]

    def level_at(self, n: int) -> frozenset:
        """Level n of the chain; indices past the top return the full alphabet."""
        return self.levels[min(n, len(self.levels) - 1)]

    def letters(self, n: int) -> list:
        return sorted(self.level_at(n), key=letter_key)

    def to_dict(self) -> dict:
        return {
            "levels": [sorted((_token_json(t) for t in lv), key=str) for lv in self.levels],
            "zero": _token_json(self.zero),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Alphabet":
        levels = [frozenset(_token_parse(t) for t in lv) for lv in data["levels"]]
        return cls(tuple(levels), _token_parse(data["zero"]))


def _token_json(token):
    return list(token) if isinstance(token, tuple) else token


def _token_parse(token):
    return tuple(token) if isinstance(token, list) else token


@dataclass(frozen=True)
class Var:
    """Variable symbol v_i; index is nonzero, negative only in signed mode."""

    index: int


@dataclass(frozen=True)
class Letter:
    """Letter symbol holding an alphabet token."""

    token: object


def symbol_key(sym):
    if isinstance(sym, Letter):
        return (0,) + letter_key(sym.token)
    return (1, sym.index)


@dataclass(frozen=True)
class Word:
    """Finite nonempty symbol sequence over an alphabet with variable bound k."""

    k: int
    mode: str
    alphabet: Alphabet
    symbols: tuple

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not self.symbols:
            raise ValueError("words are nonempty")
        for sym in self.symbols:
            if isinstance(sym, Var):
                i = sym.index
                if i == 0 or abs(i) > self.k:
                    raise ValueError(f"variable index {i} out of range for k={self.k}")
                if self.mode == UNSIGNED and i < 0:
                    raise ValueError("negative variable in unsigned mode")
            elif isinstance(sym, Letter):
                if sym.token not in self.alphabet.top:
                    raise ValueError(f"letter {sym.token!r} not in the alphabet")
            else:
                raise ValueError(f"bad symbol {sym!r}")

    def __len__(self):
        return len(self.symbols)

    def sort_key(self):
        return (len(self.symbols), tuple(symbol_key(s) for s in self.symbols))

    def to_dict(self) -> dict:
        syms = []
        for s in self.symbols:
            if isinstance(s, Var):
                syms.append({"var": s.index})
            else:
                syms.append({"letter": _token_json(s.token)})
        return {"k": self.k, "mode": self.mode, "symbols": syms}

    @classmethod
    def from_dict(cls, data: dict, alphabet: Alphabet) -> "Word":
        syms = []
        for s in data["symbols"]:
            if "var" in s:
                syms.append(Var(s["var"]))
            else:
                syms.append(Letter(_token_parse(s["letter"])))
        return cls(data["k"], data["mode"], alphabet, tuple(syms))


def word(k: int, mode: str, alphabet: Alphabet, symbols) -> Word:
    """Convenience constructor accepting ints (variables) and raw tokens (letters)."""
    out = []
    for s in symbols:
        if isinstance(s, (Var, Letter)):
            out.append(s)
        elif isinstance(s, int):
            out.append(Var(s))
        else:
            out.append(Letter(s))
    return Word(k, mode, alphabet, tuple(out))


def classify(x: Word) -> int:
    """0 for variable-free words, otherwise the largest |variable index|."""
    best = 0
    for s in x.symbols:
        if isinstance(s, Var):
            best = max(best, abs(s.index))
    return best


def concat(x: Word, y: Word) -> Word:
    if (x.k, x.mode, x.alphabet) != (y.k, y.mode, y.alphabet):
        raise ValueError("words must share alphabet, k and mode")
    return Word(x.k, x.mode, x.alphabet, x.symbols + y.symbols)


def substitute(x: Word, lam: Optional[tuple]) -> Word:
    """Replace each variable v_i by lam's letter for i; lam=None is the identity."""
    if lam is None:
        return x
    arity = x.k if x.mode == UNSIGNED else 2 * x.k
    if len(lam) != arity:
        raise ValueError(f"substitution tuple must have arity {arity}")
    out = []
    for s in x.symbols:
        if isinstance(s, Var):
            out.append(Letter(lam[_lam_slot(s.index, x.k, x.mode)]))
        else:
            out.append(s)
    return Word(x.k, x.mode, x.alphabet, tuple(out))


def _lam_slot(index: int, k: int, mode: str) -> int:
    # unsigned tuples are (lam_1, ..., lam_k); signed ones
    # (lam_{-k}, ..., lam_{-1}, lam_1, ..., lam_k)
    if mode == UNSIGNED:
        return index - 1
    return k + index - 1 if index > 0 else index + k


def tetris_word(x: Word) -> Word:
    """Lower each variable index by one toward zero; v_{+-1} becomes the zero letter."""
    zero = Letter(x.alphabet.zero)
    out = []
    for s in x.symbols:
        if isinstance(s, Var):
            if s.index > 1:
                out.append(Var(s.index - 1))
            elif s.index < -1:
                out.append(Var(s.index + 1))
            else:
                out.append(zero)
        else:
            out.append(s)
    return Word(x.k, x.mode, x.alphabet, tuple(out))


def tetris_power(x: Word, j: int) -> Word:
    for _ in range(j):
        x = tetris_word(x)
    return x


def reflect_word(x: Word) -> Word:
    """Replace each variable v_i by v_{-i} (signed mode only)."""
    if x.mode != SIGNED:
        raise ValueError("reflect_word requires signed mode")
    out = tuple(Var(-s.index) if isinstance(s, Var) else s for s in x.symbols)
    return Word(x.k, x.mode, x.alphabet, out)


def neg_tetris(x: Word, j: int = 1) -> Word:
    """The composite map x -> -T(x), iterated j times."""
    for _ in range(j):
        x = reflect_word(tetris_word(x))
    return x


def is_rapidly_increasing(words: Iterable[Word]) -> bool:
    total = 0
    for w in words:
        if len(w) <= total:
            return False
        total += len(w)
    return True


@dataclass(frozen=True)
class VarWordSequence:
    """Rapidly increasing sequence of variable words of full class k.

    Each word carries a global index; subsequences keep their original
    indices so that span grading (level n letters at generator n) is
    preserved under restriction.
    """

    words: tuple[Word, ...]
    indices: tuple[int, ...] = None

    def __post_init__(self):
        if not self.words:
            raise ValueError("a word sequence is nonempty")
        if self.indices is None:
            object.__setattr__(self, "indices", tuple(range(len(self.words))))
        if len(self.indices) != len(self.words):
            raise ValueError("one index per word")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        first = self.words[0]
        for w in self.words:
            if (w.k, w.mode, w.alphabet) != (first.k, first.mode, first.alphabet):
                raise ValueError("words must share alphabet, k and mode")
            if classify(w) != w.k:
                raise ValueError("every word must have full variable class k")
        if not is_rapidly_increasing(self.words):
            raise ValueError("sequence must be rapidly increasing")

    @property
    def k(self) -> int:
        return self.words[0].k

    @property
    def mode(self) -> str:
        return self.words[0].mode

    @property
    def alphabet(self) -> Alphabet:
        return self.words[0].alphabet

    def __len__(self):
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def subsequence(self, positions: Iterable[int]) -> "VarWordSequence":
        positions = tuple(positions)
        return VarWordSequence(
            tuple(self.words[p] for p in positions),
            tuple(self.indices[p] for p in positions),
        )

    def to_list(self) -> list:
        return [w.to_dict() for w in self.words]

    @classmethod
    def from_list(cls, data: Iterable[dict], alphabet: Alphabet) -> "VarWordSequence":
        return cls(tuple(Word.from_dict(d, alphabet) for d in data))


@dataclass(frozen=True)
class Segment:
    """One span piece: sign * T^exponent(generator[lam]); lam=None means v-vector."""

    gen_index: int
    sign: int
    exponent: int
    lam: Optional[tuple]

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.exponent < 0:
            raise ValueError("exponent must be nonnegative")


@dataclass(frozen=True)
class Decomposition:
    segments: tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a decomposition is nonempty")
        ids = [s.gen_index for s in self.segments]
        if any(b <= a for a, b in zip(ids, ids[1:])):
            raise ValueError("generator indices must be strictly increasing")

    def gen_indices(self) -> tuple[int, ...]:
        return tuple(s.gen_index for s in self.segments)


def compose(X: VarWordSequence, d: Decomposition) -> Word:
    """Evaluate a decomposition against X and concatenate the pieces."""
    pieces = []
    lookup = {g: w for g, w in zip(X.indices, X.words)}
    for seg in d.segments:
        if seg.gen_index not in lookup:
            raise ValueError(f"generator {seg.gen_index} not in the sequence")
        gen = lookup[seg.gen_index]
        if seg.exponent > X.k:
            raise ValueError("exponent exceeds k")
        if seg.sign == -1 and X.mode != SIGNED:
            raise ValueError("signs require signed mode")
        if seg.lam is not None:
            level = X.alphabet.level_at(seg.gen_index)
            if any(t not in level for t in seg.lam):
                raise ValueError(f"letters must come from level {seg.gen_index}")
        piece = tetris_power(substitute(gen, seg.lam), seg.exponent)
        if seg.sign == -1:
            piece = reflect_word(piece)
        pieces.append(piece)
    out = pieces[0]
    for p in pieces[1:]:
        out = concat(out, p)
    return out


def _slot_options(X: VarWordSequence, pos: int, neg_t: bool):
    """All (sign, exponent, lam) choices for one generator slot."""
    k = X.k
    arity = k if X.mode == UNSIGNED else 2 * k
    level = X.alphabet.letters(X.indices[pos])
    opts = []
    if neg_t:
        # (-T)^j fixes sign = (-1)^j; substituted pieces take exponent 0
        opts.extend((1 if j % 2 == 0 else -1, j, None) for j in range(k + 1))
        opts.extend((1, 0, lam) for lam in itertools.product(level, repeat=arity))
    else:
        signs = (1, -1) if X.mode == SIGNED else (1,)
        opts.extend((s, j, None) for j in range(k + 1) for s in signs)
        opts.extend((1, 0, lam) for lam in itertools.product(level, repeat=arity))
    return opts


def _iter_span(X: VarWordSequence, subset_bound: Optional[int], neg_t: bool):
    top = len(X) if subset_bound is None else min(len(X), subset_bound)
    for size in range(1, top + 1):
        for subset in itertools.combinations(range(len(X)), size):
            slot_opts = [_slot_options(X, p, neg_t) for p in subset]
            for choice in itertools.product(*slot_opts):
                if neg_t and not any(
                    j == 0 and lam is None for _, j, lam in choice
                ):
                    continue
                segs = tuple(
                    Segment(X.indices[p], s, j, lam)
                    for p, (s, j, lam) in zip(subset, choice)
                )
                yield Decomposition(segs)


def span_words(X: VarWordSequence, subset_bound: Optional[int] = None) -> list[Word]:
    """All span elements of full class k, deduplicated, canonical order."""
    seen = {}
    for d in _iter_span(X, subset_bound, neg_t=False):
        w = compose(X, d)
        if classify(w) == X.k:
            seen[w] = None
    return sorted(seen, key=Word.sort_key)


def span_letters(X: VarWordSequence) -> list[Word]:
    """All variable-free concatenations under graded substitutions."""
    k = X.k
    arity = k if X.mode == UNSIGNED else 2 * k
    seen = {}
    for size in range(1, len(X) + 1):
        for subset in itertools.combinations(range(len(X)), size):
            slot_opts = [
                [(1, 0, lam) for lam in itertools.product(
                    X.alphabet.letters(X.indices[p]), repeat=arity)]
                for p in subset
            ]
            for choice in itertools.product(*slot_opts):
                segs = tuple(
                    Segment(X.indices[p], s, j, lam)
                    for p, (s, j, lam) in zip(subset, choice)
                )
                seen[compose(X, Decomposition(segs))] = None
    return sorted(seen, key=Word.sort_key)


def span_negT(X: VarWordSequence, subset_bound: Optional[int] = None) -> list[Word]:
    """Span built from (-T)^j pieces with some piece kept whole (exponent 0)."""
    if X.mode != SIGNED:
        raise ValueError("the (-T) span requires signed mode")
    seen = {}
    for d in _iter_span(X, subset_bound, neg_t=True):
        w = compose(X, d)
        if classify(w) == X.k:
            seen[w] = None
    return sorted(seen, key=Word.sort_key)


def parse_support(Y: VarWordSequence, x: Word) -> Optional[Decomposition]:
    """Canonical decomposition of x over Y, or None when x is not in the span.

    Rapid increase makes generator lengths superincreasing, so the index
    set is recovered greedily from |x|.  Segments holding variables are
    forced to lam = v-vector with a unique shift and sign; variable-free
    segments are normalized to exponent 0, sign +1 and a letter tuple
    read off pointwise (absent variables receive the zero letter).
    """
    if (x.k, x.mode, x.alphabet) != (Y.k, Y.mode, Y.alphabet):
        return None
    if classify(x) != Y.k:
        return None
    lengths = [len(w) for w in Y.words]
    remaining = len(x)
    picked = []
    for pos in range(len(Y) - 1, -1, -1):
        if lengths[pos] <= remaining:
            picked.append(pos)
            remaining -= lengths[pos]
    if remaining != 0:
        return None
    picked.reverse()
    segments = []
    offset = 0
    for pos in picked:
        gen = Y.words[pos]
        piece = x.symbols[offset : offset + len(gen)]
        offset += len(gen)
        seg = _parse_segment(Y, pos, gen, piece)
        if seg is None:
            return None
        segments.append(seg)
    return Decomposition(tuple(segments))


def _parse_segment(Y, pos, gen, piece) -> Optional[Segment]:
    k = Y.k
    zero = Y.alphabet.zero
    # letters of the generator survive substitution and tetris unchanged
    for g, p in zip(gen.symbols, piece):
        if isinstance(g, Letter) and g != p:
            return None
    has_var = any(isinstance(p, Var) for p in piece)
    if has_var:
        maxidx = max(abs(p.index) for p in piece if isinstance(p, Var))
        j = k - maxidx
        if j < 0:
            return None
        signs = (1, -1) if Y.mode == SIGNED else (1,)
        for s in signs:
            cand = tetris_power(gen, j)
            if s == -1:
                cand = reflect_word(cand)
            if cand.symbols == tuple(piece):
                return Segment(Y.indices[pos], s, j, None)
        return None
    # variable-free piece: read off a substitution tuple
    arity = k if Y.mode == UNSIGNED else 2 * k
    lam = [zero] * arity
    seen = {}
    for g, p in zip(gen.symbols, piece):
        if isinstance(g, Var):
            if not isinstance(p, Letter):
                return None
            tok = p.token
            if g.index in seen and seen[g.index] != tok:
                return None
            seen[g.index] = tok
            lam[_lam_slot(g.index, k, Y.mode)] = tok
    level = Y.alphabet.level_at(Y.indices[pos])
    if any(t not in level for t in lam):
        return None
    return Segment(Y.indices[pos], 1, 0, tuple(lam))


def supp_of(Y: VarWordSequence, x: Word) -> Optional[tuple[int, ...]]:
    """Generator index set of x over Y, or None when not in the span."""
    d = parse_support(Y, x)
    return None if d is None else d.gen_indices()


def is_block_subseq(X: VarWordSequence, Y: VarWordSequence) -> bool:
    """True iff every word of X parses over Y with strictly separated supports."""
    prev_max = None
    for w in X.words:
        supp = supp_of(Y, w)
        if supp is None:
            return False
        if prev_max is not None and not prev_max < min(supp):
            return False
        prev_max = max(supp)
    return True


def _letter_positions(x: Word) -> dict:
    """Positions holding a nonzero letter, with their tokens."""
    zero = x.alphabet.zero
    return {
        n: s.token
        for n, s in enumerate(x.symbols)
        if isinstance(s, Letter) and s.token != zero
    }


def compatible(x: Word, y: Word) -> bool:
    """Equal length, same nonzero-letter positions, same letters there."""
    if x.mode != SIGNED or y.mode != SIGNED:
        raise ValueError("compatibility is defined for signed words")
    return len(x) == len(y) and _letter_positions(x) == _letter_positions(y)


def _symbol_index(sym, zero) -> int:
    if isinstance(sym, Var):
        return sym.index
    if sym.token == zero:
        return 0
    raise ValueError("position holds a nonzero letter")


def dist_words(x: Word, y: Word) -> float:
    """Largest variable-index gap over non-letter positions; infinity if incompatible."""
    if not compatible(x, y):
        return float("inf")
    zero = x.alphabet.zero
    skip = _letter_positions(x)
    best = 0
    for n in range(len(x)):
        if n in skip:
            continue
        best = max(
            best,
            abs(_symbol_index(x.symbols[n], zero) - _symbol_index(y.symbols[n], zero)),
        )
    return best


def dist_seqs(X: VarWordSequence, Y: VarWordSequence) -> float:
    if len(X) != len(Y):
        return float("inf")
    return max(dist_words(a, b) for a, b in zip(X.words, Y.words))


def halve(x: Word) -> Word:
    """Fold variable indices +-1..+-2k down to the 0..+-k range.

    Indices +-1 land on the zero letter; even indices are halved exactly
    and odd ones are rounded toward zero.  Letters are unchanged.
    """
    if x.mode != SIGNED:
        raise ValueError("halve requires signed mode")
    if x.k % 2 != 0:
        raise ValueError("halve needs an even variable bound")
    zero = Letter(x.alphabet.zero)
    out = []
    for s in x.symbols:
        if isinstance(s, Var):
            h = _halve_index(s.index)
            out.append(zero if h == 0 else Var(h))
        else:
            out.append(s)
    return Word(x.k // 2, x.mode, x.alphabet, tuple(out))


def _halve_index(i: int) -> int:
    if i % 2 == 0:
        return i // 2
    return (i - 1) // 2 if i > 0 else (i + 1) // 2


def widen_tuple(lam: tuple, k: int, zero) -> tuple:
    """Lift a 2k-arity tuple to 4k arity so that halving undoes the lift.

    The doubled word's variable v_w collapses to v_{h(w)} under halving,
    so slot w receives the original letter for h(w), and the slots with
    |w| = 1 (which collapse to the zero letter) receive the zero letter.
    """
    out = []
    for w in itertools.chain(range(-2 * k, 0), range(1, 2 * k + 1)):
        h = _halve_index(w)
        out.append(zero if h == 0 else lam[_lam_slot(h, k, SIGNED)])
    return tuple(out)


def lift_double(Ytilde: VarWordSequence, d: Decomposition) -> Word:
    """Evaluate d against the doubled-bound sequence, doubling exponents and
    widening letter tuples; halving the result reproduces the plain compose."""
    if Ytilde.mode != SIGNED:
        raise ValueError("lift_double requires signed mode")
    if Ytilde.k % 2 != 0:
        raise ValueError("the ambient sequence must have an even bound")
    k = Ytilde.k // 2
    zero = Ytilde.alphabet.zero
    segs = []
    for seg in d.segments:
        if seg.exponent > k:
            raise ValueError("exponent exceeds the halved bound")
        lam = None if seg.lam is None else widen_tuple(seg.lam, k, zero)
        segs.append(Segment(seg.gen_index, seg.sign, 2 * seg.exponent, lam))
    return compose(Ytilde, Decomposition(tuple(segs)))


def approx_negT(Y: VarWordSequence, x: Word) -> tuple[Word, str]:
    """Replace a span element by a nearby member of the (-T) span.

    Returns (z, "direct") with d(x, z) <= 1 when x's decomposition keeps
    some generator whole with a plus sign; otherwise (z, "reflected")
    with d(-x, z) <= 1.  Either way min(d(x, z), d(-x, z)) <= 1.
    """
    if Y.mode != SIGNED:
        raise ValueError("approx_negT requires signed mode")
    d = parse_support(Y, x)
    if d is None:
        raise ValueError("word is not in the span")
    if any(s.sign == 1 and s.exponent == 0 and s.lam is None for s in d.segments):
        return _negT_case1(Y, d), "direct"
    d = parse_support(Y, reflect_word(x))
    return _negT_case1(Y, d), "reflected"


def _negT_case1(Y: VarWordSequence, d: Decomposition) -> Word:
    pieces = []
    lookup = {g: w for g, w in zip(Y.indices, Y.words)}
    for seg in d.segments:
        base = substitute(lookup[seg.gen_index], seg.lam)
        z = tetris_power(base, seg.exponent)
        if seg.sign == -1:
            z = reflect_word(z)
        keep = (seg.sign == 1) == (seg.exponent % 2 == 0)
        pieces.append(z if keep else tetris_word(z))
    out = pieces[0]
    for p in pieces[1:]:
        out = concat(out, p)
    return out
