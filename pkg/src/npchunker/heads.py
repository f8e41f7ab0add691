"""Syntactic and semantic heads of chunks.

A head is chosen with a priority table: coarse classes in rank order, each
holding tag patterns in rank order.  The token with the best (class,
pattern) rank heads the chunk; among equals the rightmost one wins.
"""

from collections import Counter
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Sequence

from . import patterns
from .chunker import Chunk
from .errors import ValidationError


@dataclass
class PriorityTable:
    coarse_rank: List[str]
    within_rank: Dict[str, List[str]]
    name: str = ""

    def __post_init__(self):
        self.validate()
        self._cache = {}

    def validate(self):
        seen = []
        for cls in self.coarse_rank:
            if cls not in self.within_rank:
                raise ValidationError("class %s has no patterns" % cls)
            pats = self.within_rank[cls]
            if len(set(pats)) != len(pats):
                dup = [p for p in pats if pats.count(p) > 1][0]
                raise ValidationError("pattern %r repeated in class %s"
                                      % (dup, cls))
            for p in pats:
                patterns.check_pattern(p)
                for other_cls, q in seen:
                    if other_cls != cls and patterns.overlap(p, q):
                        raise ValidationError(
                            "classes %s and %s overlap (%r, %r)"
                            % (other_cls, cls, q, p))
            seen.extend((cls, p) for p in pats)
        if len(set(self.coarse_rank)) != len(self.coarse_rank):
            raise ValidationError("class listed twice")

    def rank(self, tag):
        """(class index, pattern index); unmatched tags rank last."""
        try:
            return self._cache[tag]
        except KeyError:
            pass
        r = None
        for ci, cls in enumerate(self.coarse_rank):
            for pi, p in enumerate(self.within_rank[cls]):
                if patterns.matches(p, tag):
                    r = (ci, pi)
                    break
            if r is not None:
                break
        self._cache[tag] = r
        return r

    def coarse_class(self, tag):
        r = self.rank(tag)
        return None if r is None else self.coarse_rank[r[0]]

    @classmethod
    def parse(cls, lines, name=""):
        order = []
        within = {}
        current = None
        for lineno, raw in enumerate(lines, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]") and len(line) > 2:
                current = line[1:-1].strip()
                if current in within:
                    raise ValidationError("line %d: class %s defined twice"
                                          % (lineno, current))
                order.append(current)
                within[current] = []
                continue
            if current is None:
                raise ValidationError("line %d: pattern before any class"
                                      % lineno)
            within[current].append(line)
        if not order:
            raise ValidationError("priority table %s is empty" % name)
        return cls(order, within, name)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            return cls.parse(f, str(path))


def default_table(kind):
    if kind not in ("syntactic", "semantic"):
        raise ValueError(kind)
    text = resources.files("npchunker").joinpath(
        "data/%s.txt" % kind).read_text()
    return PriorityTable.parse(text.splitlines(), kind)


@dataclass(frozen=True)
class HeadedChunk:
    chunk: Chunk
    syntactic_head: int
    semantic_head: int

    @property
    def start(self):
        return self.chunk.start

    @property
    def end(self):
        return self.chunk.end

    def tag_at(self, index):
        return self.chunk.tags[index - self.chunk.start]

    def word_at(self, index):
        words = self.chunk.words
        return words[index - self.chunk.start] if words else ""


class HeadFinder:
    """Assigns heads and counts tags that fell through a table."""

    def __init__(self, syn_table=None, sem_table=None):
        self.syn_table = syn_table or default_table("syntactic")
        self.sem_table = sem_table or default_table("semantic")
        self.fallbacks = Counter()

    def head(self, tags: Sequence[str], table) -> int:
        last = len(table.coarse_rank)
        best = None
        best_i = 0
        for i, tag in enumerate(tags):
            r = table.rank(tag)
            if r is None:
                self.fallbacks[table.name, tag] += 1
                r = (last, 0)
            if best is None or r <= best:
                best, best_i = r, i
        return best_i

    def assign(self, chunk: Chunk) -> HeadedChunk:
        if len(chunk) == 1:
            return HeadedChunk(chunk, chunk.start, chunk.start)
        syn = self.head(chunk.tags, self.syn_table)
        sem = self.head(chunk.tags, self.sem_table)
        return HeadedChunk(chunk, chunk.start + syn, chunk.start + sem)

    def assign_all(self, chunks):
        return [self.assign(c) for c in chunks]


def assign_heads(chunk: Chunk, syn_table: PriorityTable,
                 sem_table: PriorityTable) -> HeadedChunk:
    return HeadFinder(syn_table, sem_table).assign(chunk)
