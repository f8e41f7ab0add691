"""Chunk grammar extraction and the chunk language model.

A chunk label is a tuple of LOB tags.  The model keeps unigram counts of
chunk labels and bigram counts of adjacent labels; the sentence-initial
context is the empty tuple :data:`BEGIN`.
"""

import hashlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .corpus import ParseNode, map_tag
from .errors import DataError, ModelFormatError, StructuralError

ChunkLabel = Tuple[str, ...]

BEGIN: ChunkLabel = ()
BEGIN_TEXT = "<BEGIN>"
CHUNK_LEN_CAP = 6
MODEL_MAGIC = "#npchunker-model"
MODEL_VERSION = "1"


def label_text(label):
    return BEGIN_TEXT if label == BEGIN else " ".join(label)


def parse_label(text):
    if text == BEGIN_TEXT:
        return BEGIN
    tags = tuple(text.split(" "))
    if not all(tags):
        raise ValueError("empty tag in chunk label %r" % text)
    return tags


def chunk_cover(tree: ParseNode, n: int, cap: int = CHUNK_LEN_CAP):
    """Spans of the training cover of a sentence of ``n`` leaves.

    A node whose children are all leaves and whose span is at most ``cap``
    becomes one chunk; every other leaf is a chunk of its own.
    """
    owner = [None] * n
    for node in tree.subtrees():
        if node.synthetic or not node.children:
            continue
        if all(not isinstance(c, ParseNode) for c in node.children) \
                and node.end - node.start <= cap:
            for i in node.children:
                owner[i] = node.span
    spans = []
    i = 0
    while i < n:
        span = owner[i] or (i, i + 1)
        spans.append(span)
        i = span[1]
    return spans


def extract_training_instances(tree: ParseNode, records, tag_map=None,
                               cap: int = CHUNK_LEN_CAP):
    """Chunk instances and context pairs of one parsed sentence.

    Instances are the cover chunks followed by the tag sequences of all
    other constituents no longer than ``cap``.  Pairs are the adjacent cover
    chunks, starting with ``(BEGIN, first)``.
    """
    n = len(records)
    if tree.end - tree.start != n or len(tree.leaves()) != n:
        raise StructuralError("tree spans %d leaves but there are %d records"
                              % (len(tree.leaves()), n))
    tags = [map_tag(r.word_tag, tag_map) for r in records]
    cover = chunk_cover(tree, n, cap)
    instances = [tuple(tags[s:e]) for s, e in cover]
    in_cover = set(cover)
    for node in tree.subtrees():
        if node.synthetic or node.span in in_cover:
            continue
        if node.end - node.start <= cap:
            instances.append(tuple(tags[node.start:node.end]))
    pairs = []
    prev = BEGIN
    for s, e in cover:
        label = tuple(tags[s:e])
        pairs.append((prev, label))
        prev = label
    return instances, pairs


@dataclass
class GrammarModel:
    unigram_count: Dict[ChunkLabel, int]
    bigram_count: Dict[Tuple[ChunkLabel, ChunkLabel], int]
    unigram_total: int
    max_chunk_len: int
    provenance: Dict[str, str] = field(default_factory=dict)
    epsilon: float = 0.0
    _context_total: Dict[ChunkLabel, int] = field(
        default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        totals = Counter()
        for (prev, _), count in self.bigram_count.items():
            totals[prev] += count
        self._context_total = dict(totals)

    @property
    def context_total(self):
        return self._context_total

    def prob(self, label: ChunkLabel) -> float:
        count = self.unigram_count.get(label, 0)
        if self.epsilon:
            vocab = len(self.unigram_count)
            return (count + self.epsilon) / (self.unigram_total
                                             + self.epsilon * vocab)
        return count / self.unigram_total

    def cond_prob(self, label: ChunkLabel, prev: ChunkLabel) -> float:
        count = self.bigram_count.get((prev, label), 0)
        total = self._context_total.get(prev, 0)
        if self.epsilon:
            vocab = len(self.unigram_count)
            return (count + self.epsilon) / (total + self.epsilon * vocab)
        if total == 0:
            return 0.0
        return count / total


def fit_model(instances: Iterable[ChunkLabel],
              pairs: Iterable[Tuple[ChunkLabel, ChunkLabel]],
              epsilon: float = 0.0,
              provenance: Optional[Dict[str, str]] = None) -> GrammarModel:
    """Maximum-likelihood counts from chunk instances and context pairs."""
    unigrams = Counter(tuple(c) for c in instances)
    if not unigrams:
        raise DataError("no chunk instances to train on")
    if any(not label for label in unigrams):
        raise DataError("empty chunk label among instances")
    bigrams = Counter((tuple(p), tuple(c)) for p, c in pairs)
    for prev, label in bigrams:
        if not label:
            raise DataError("BEGIN can only be a left context")
    return GrammarModel(
        unigram_count=dict(unigrams),
        bigram_count=dict(bigrams),
        unigram_total=sum(unigrams.values()),
        max_chunk_len=max(len(c) for c in unigrams),
        provenance=dict(provenance or {}),
        epsilon=float(epsilon),
    )


def train_from_treebank(groups, tag_map=None, cap=CHUNK_LEN_CAP,
                        epsilon=0.0, provenance=None):
    """Fit a model from SUSANNE record groups."""
    from .corpus import build_parse_tree
    instances: List[ChunkLabel] = []
    pairs = []
    for records in groups:
        tree = build_parse_tree(records)
        inst, prs = extract_training_instances(tree, records, tag_map, cap)
        instances.extend(inst)
        pairs.extend(prs)
    return fit_model(instances, pairs, epsilon, provenance)


def chunking_instances(chunkings):
    """Instances and pairs from already chunked sentences.

    ``chunkings`` yields (tags, spans) where spans tile the tags.
    """
    instances, pairs = [], []
    for tags, spans in chunkings:
        prev = BEGIN
        for s, e in spans:
            label = tuple(tags[s:e])
            instances.append(label)
            pairs.append((prev, label))
            prev = label
    return instances, pairs


# -- model files -------------------------------------------------------------

def _model_body(model: GrammarModel):
    lines = ["%s\t%s" % (MODEL_MAGIC, MODEL_VERSION),
             "max_chunk_len\t%d" % model.max_chunk_len,
             "unigram_total\t%d" % model.unigram_total,
             "epsilon\t%r" % model.epsilon]
    for key in sorted(model.provenance):
        lines.append("provenance\t%s\t%s" % (key, model.provenance[key]))
    lines.append("[unigram]")
    for label in sorted(model.unigram_count, key=label_text):
        lines.append("%d\t%s" % (model.unigram_count[label],
                                 label_text(label)))
    lines.append("[bigram]")
    for prev, label in sorted(model.bigram_count,
                              key=lambda k: (label_text(k[0]),
                                             label_text(k[1]))):
        lines.append("%d\t%s\t%s" % (model.bigram_count[prev, label],
                                     label_text(prev), label_text(label)))
    return lines


def dumps_model(model: GrammarModel) -> str:
    body = "".join(line + "\n" for line in _model_body(model))
    digest = hashlib.sha256(body.encode("utf-8")).hexdigest()
    return body + "[end]\tsha256=%s\n" % digest


def loads_model(text: str) -> GrammarModel:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[-1].startswith("[end]\tsha256="):
        raise ModelFormatError("model file is truncated (no end marker)")
    body = "".join(line + "\n" for line in lines[:-1])
    digest = lines[-1].split("=", 1)[1]
    if hashlib.sha256(body.encode("utf-8")).hexdigest() != digest:
        raise ModelFormatError("model checksum mismatch")
    header = lines[0].split("\t")
    if header[0] != MODEL_MAGIC:
        raise ModelFormatError("not a model file")
    if len(header) != 2 or header[1] != MODEL_VERSION:
        raise ModelFormatError("unsupported model version %r"
                               % "\t".join(header[1:]))
    meta, provenance = {}, {}
    unigrams, bigrams = {}, {}
    section = None
    for lineno, line in enumerate(lines[1:-1], 2):
        try:
            if line in ("[unigram]", "[bigram]"):
                section = line
                continue
            cols = line.split("\t")
            if section is None:
                if cols[0] == "provenance" and len(cols) == 3:
                    provenance[cols[1]] = cols[2]
                elif len(cols) == 2:
                    meta[cols[0]] = cols[1]
                else:
                    raise ValueError("bad header line")
            elif section == "[unigram]":
                count, text = cols
                unigrams[parse_label(text)] = int(count)
            else:
                count, prev, text = cols
                bigrams[parse_label(prev), parse_label(text)] = int(count)
        except ValueError as e:
            raise ModelFormatError("line %d: malformed (%s)" % (lineno, e)) \
                from None
    try:
        model = GrammarModel(unigrams, bigrams, int(meta["unigram_total"]),
                             int(meta["max_chunk_len"]), provenance,
                             float(meta.get("epsilon", "0.0")))
    except (KeyError, ValueError) as e:
        raise ModelFormatError("missing or bad header field %s" % e) from None
    if model.unigram_total != sum(unigrams.values()):
        raise ModelFormatError("unigram_total disagrees with the counts")
    return model


def save_model(model: GrammarModel, path) -> None:
    from .util import atomic_write
    atomic_write(path, dumps_model(model))


def load_model(path) -> GrammarModel:
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ModelFormatError("cannot read model %s: %s" % (path, e)) \
            from None
    return loads_model(text)
