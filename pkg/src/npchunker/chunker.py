"""Chunk scoring and optimal segmentation.

Every chunk gets two scores, one from its own probability and one from its
probability given the preceding chunk, both passed through :func:`s_function`.
A segmentation scores the sum of both over its chunks and
:func:`chunk_sentence` finds the best one.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .corpus import TaggedSentence, Token, parse_item
from .errors import DomainError, FormatError
from .grammar import BEGIN, ChunkLabel, GrammarModel

BRUTE_FORCE_LIMIT = 16
# Segmentation totals are summed as integers in units of 2**-50, so that
# sums do not depend on the order of addition and equal totals are really
# equal.  Rounding each term costs at most 2**-51.
SCALE = 2 ** 50


def s_function(p: float) -> float:
    """Map a probability to a score in [0, 1]; zero stays zero."""
    if not 0.0 <= p <= 1.0:      # also rejects NaN
        raise DomainError("probability %r outside [0, 1]" % (p,))
    if p == 0.0:
        return 0.0
    return 1.0 / (1.0 + abs(math.log(p)))


@dataclass(frozen=True)
class Chunk:
    start: int
    end: int
    tags: ChunkLabel
    words: tuple = ()

    def __post_init__(self):
        if self.end <= self.start:
            raise ValueError("empty chunk [%d, %d)" % (self.start, self.end))
        if len(self.tags) != self.end - self.start:
            raise ValueError("chunk has %d tags for %d tokens"
                             % (len(self.tags), self.end - self.start))

    def __len__(self):
        return self.end - self.start

    def tokens(self):
        words = self.words or ("",) * len(self)
        return [Token(w, t) for w, t in zip(words, self.tags)]


@dataclass
class ChunkSequence:
    chunks: List[Chunk]
    total_score: float

    def spans(self):
        return [(c.start, c.end) for c in self.chunks]

    def render(self):
        return render_chunks(self.chunks)


@dataclass
class DPState:
    score: List[float]
    pre: List[int]


class ChunkScorer:
    """Caches the two chunk scores of one model."""

    def __init__(self, model: GrammarModel):
        self.model = model
        self._d = {}
        self._c = {}
        self._dfix = {}
        self._cfix = {}
        if not model.epsilon:
            # without smoothing, only observed events score above zero
            for label in model.unigram_count:
                self._d[label] = s_function(model.prob(label))
            for prev, label in model.bigram_count:
                self._c[prev, label] = s_function(model.cond_prob(label, prev))
                self._cfix[prev, label] = round(self._c[prev, label] * SCALE)

    def dscore(self, label: ChunkLabel) -> float:
        try:
            return self._d[label]
        except KeyError:
            pass
        value = 0.0 if not self.model.epsilon \
            else s_function(self.model.prob(label))
        self._d[label] = value
        return value

    def cscore(self, label: ChunkLabel, prev: ChunkLabel) -> float:
        try:
            return self._c[prev, label]
        except KeyError:
            pass
        value = 0.0 if not self.model.epsilon \
            else s_function(self.model.cond_prob(label, prev))
        self._c[prev, label] = value
        return value

    def dfixed(self, label: ChunkLabel) -> int:
        """dscore as an integer multiple of 1/SCALE."""
        try:
            return self._dfix[label]
        except KeyError:
            pass
        v = round(self.dscore(label) * SCALE)
        self._dfix[label] = v
        return v

    def cfixed(self, label: ChunkLabel, prev: ChunkLabel) -> int:
        """cscore as an integer multiple of 1/SCALE."""
        try:
            return self._cfix[prev, label]
        except KeyError:
            pass
        if not self.model.epsilon:
            return 0
        v = round(self.cscore(label, prev) * SCALE)
        self._cfix[prev, label] = v
        return v

    def fixed(self, label: ChunkLabel, prev: ChunkLabel) -> int:
        return self.cfixed(label, prev) + self.dfixed(label)


def dscore(chunk, model) -> float:
    tags = chunk.tags if isinstance(chunk, Chunk) else tuple(chunk)
    return s_function(model.prob(tags))


def cscore(chunk, prev, model) -> float:
    tags = chunk.tags if isinstance(chunk, Chunk) else tuple(chunk)
    prev = prev.tags if isinstance(prev, Chunk) else tuple(prev)
    return s_function(model.cond_prob(tags, prev))


def _tie_key(length, seen):
    # On equal scores a seen chunk is preferred long, an unseen one short.
    return (1, length) if seen else (0, -length)


def _as_tags(sentence):
    if isinstance(sentence, TaggedSentence):
        return tuple(sentence.tags), tuple(sentence.words)
    tags = []
    words = []
    for item in sentence:
        if isinstance(item, Token):
            tags.append(item.lob_tag)
            words.append(item.surface)
        else:
            tags.append(item)
    return tuple(tags), tuple(words) if words else ()


def _effective_cap(model, cap):
    cap = model.max_chunk_len if cap is None else cap
    if cap < 1:
        raise DomainError("chunk length cap must be at least 1")
    return cap


def _build(tags, words, bounds, total):
    chunks = []
    for s, e in bounds:
        chunks.append(Chunk(s, e, tags[s:e], words[s:e] if words else ()))
    return ChunkSequence(chunks, total)


def chunk_sentence(sentence, model: GrammarModel, cap: Optional[int] = None,
                   scorer: Optional[ChunkScorer] = None,
                   method: str = "exact", stats: Optional[dict] = None):
    """Best segmentation of a tagged sentence.

    ``method="exact"`` keeps the last chunk in the state, so the context score
    of a chunk is taken against every possible predecessor and the result is
    the true maximum.  ``method="paper"`` keeps one predecessor per position
    and returns the :class:`DPState` instead.

    If ``stats`` is a dict, the number of candidate chunks scored is added to
    ``stats["candidates"]``.
    """
    tags, words = _as_tags(sentence)
    n = len(tags)
    if n == 0:
        raise DomainError("cannot chunk an empty sentence")
    cap = _effective_cap(model, cap)
    scorer = scorer or ChunkScorer(model)
    if method == "paper":
        return _paper_dp(tags, scorer, cap, stats)
    if method != "exact":
        raise ValueError("unknown method %r" % method)

    dfix = scorer.dfixed
    cfix = scorer.cfixed
    # best[i][L]: value of the best segmentation of tags[:i] whose last chunk
    # has length L; back[i][L]: length of the chunk before it (0 at BEGIN).
    best = [None] * (n + 1)
    back = [None] * (n + 1)
    keys = [None] * (n + 1)
    candidates = 0
    for i in range(1, n + 1):
        top = min(cap, i)
        b_i = [0] * (top + 1)
        p_i = [0] * (top + 1)
        k_i = [None] * (top + 1)
        for L in range(1, top + 1):
            k = i - L
            label = tags[k:i]
            candidates += 1
            ds = dfix(label)
            k_i[L] = _tie_key(L, ds > 0)
            if k == 0:
                b_i[L] = cfix(label, BEGIN) + ds
                continue
            b_k, k_k = best[k], keys[k]
            arg = 0
            val = None
            for M in range(1, len(b_k)):
                v = b_k[M] + cfix(label, tags[k - M:k]) + ds
                if val is None or v > val or (v == val and k_k[M] > k_k[arg]):
                    val, arg = v, M
            b_i[L] = val
            p_i[L] = arg
        best[i], back[i], keys[i] = b_i, p_i, k_i
    if stats is not None:
        stats["candidates"] = stats.get("candidates", 0) + candidates

    b_n, k_n = best[n], keys[n]
    L = 1
    for M in range(2, len(b_n)):
        if b_n[M] > b_n[L] or (b_n[M] == b_n[L] and k_n[M] > k_n[L]):
            L = M
    total = b_n[L] / SCALE
    bounds = []
    i = n
    while i > 0:
        prev = back[i][L]
        bounds.append((i - L, i))
        i, L = i - L, prev
    bounds.reverse()
    return _build(tags, words, bounds, total)


def _paper_dp(tags, scorer, cap, stats):
    """One best predecessor per position, as in the published procedure."""
    n = len(tags)
    score = [0] * (n + 1)
    pre = [0] * (n + 1)
    for i in range(1, n + 1):
        best = None
        for j in range(max(0, i - cap), i):
            label = tags[j:i]
            prev = tags[pre[j]:j] if j > 0 else BEGIN
            v = score[j] + scorer.fixed(label, prev)
            if best is None or v > best:
                best, pre[i] = v, j
        score[i] = best
        if stats is not None:
            stats["candidates"] = stats.get("candidates", 0) + i - max(0, i - cap)
    return DPState([v / SCALE for v in score], pre)


def dp_state_chunks(sentence, state: DPState):
    """Read the segmentation out of a :class:`DPState`."""
    tags, words = _as_tags(sentence)
    bounds = []
    i = len(tags)
    while i > 0:
        bounds.append((state.pre[i], i))
        i = state.pre[i]
    bounds.reverse()
    return _build(tags, words, bounds, state.score[-1])


def score_segmentation(tags, bounds, scorer: ChunkScorer) -> float:
    """Objective of one segmentation (see :data:`SCALE`)."""
    return _fixed_total(tags, bounds, scorer) / SCALE


def _fixed_total(tags, bounds, scorer):
    total = 0
    prev = BEGIN
    for s, e in bounds:
        label = tuple(tags[s:e])
        total += scorer.fixed(label, prev)
        prev = label
    return total


def _segment_keys(tags, bounds, scorer):
    return tuple(_tie_key(e - s, scorer.dscore(tuple(tags[s:e])) > 0.0)
                 for s, e in reversed(bounds))


def compositions(n, cap):
    """All segmentations of ``n`` tokens into parts of length <= cap."""
    if n == 0:
        yield []
        return
    for first in range(1, min(cap, n) + 1):
        for rest in compositions(n - first, cap):
            yield [(0, first)] + [(s + first, e + first) for s, e in rest]


def compositions_by_mask(n, cap):
    """Same set as :func:`compositions`, generated from cut-point bitmasks."""
    for mask in range(1 << (n - 1)):
        cuts = [0] + [i + 1 for i in range(n - 1) if mask >> i & 1] + [n]
        bounds = list(zip(cuts, cuts[1:]))
        if all(e - s <= cap for s, e in bounds):
            yield bounds


def brute_force_chunk(sentence, model: GrammarModel, cap: Optional[int] = None,
                      scorer: Optional[ChunkScorer] = None,
                      enumerate_by="recursion"):
    """Exhaustive search over all segmentations, for testing."""
    tags, words = _as_tags(sentence)
    n = len(tags)
    if n == 0:
        raise DomainError("cannot chunk an empty sentence")
    if n > BRUTE_FORCE_LIMIT:
        raise DomainError("brute force refuses sentences longer than %d"
                          % BRUTE_FORCE_LIMIT)
    cap = _effective_cap(model, cap)
    scorer = scorer or ChunkScorer(model)
    gen = compositions if enumerate_by == "recursion" else compositions_by_mask
    best = None
    for bounds in gen(n, cap):
        key = (_fixed_total(tags, bounds, scorer),
               _segment_keys(tags, bounds, scorer))
        if best is None or key > best[0]:
            best = (key, bounds)
    return _build(tags, words, best[1], best[0][0] / SCALE)


# -- bracketed chunk text ------------------------------------------------------

def render_chunks(chunks: Sequence[Chunk]) -> str:
    parts = []
    for c in chunks:
        items = " ".join(str(t) for t in c.tokens())
        parts.append("[ %s ]" % items)
    return " ".join(parts)


def parse_chunk_line(line: str):
    """Parse ``[ w_T w_T ] [ w_T ]`` into (sentence, chunk spans)."""
    tokens = []
    spans = []
    start = None
    for item in line.split():
        if item == "[":
            if start is not None:
                raise FormatError("nested '[' in chunk line")
            start = len(tokens)
        elif item == "]":
            if start is None or start == len(tokens):
                raise FormatError("unbalanced or empty chunk in chunk line")
            spans.append((start, len(tokens)))
            start = None
        else:
            if start is None:
                raise FormatError("token %r outside brackets" % item)
            tokens.append(parse_item(item))
    if start is not None:
        raise FormatError("unclosed chunk in chunk line")
    return TaggedSentence(tokens), spans


def read_chunked(stream):
    """Read one bracketed chunking per non-blank line."""
    out = []
    for lineno, line in enumerate(stream, 1):
        if not line.strip():
            continue
        try:
            sentence, spans = parse_chunk_line(line)
        except FormatError as e:
            raise FormatError("line %d: %s" % (lineno, e)) from None
        sentence.source_id = "s%d" % (len(out) + 1)
        out.append((sentence, spans))
    return out


def chunks_from_spans(sentence: TaggedSentence, spans) -> List[Chunk]:
    tags, words = tuple(sentence.tags), tuple(sentence.words)
    return [Chunk(s, e, tags[s:e], words[s:e]) for s, e in spans]
