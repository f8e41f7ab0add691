"""Scoring chunks and noun phrases against treebank parses."""

import json
import logging
from collections import OrderedDict
from dataclasses import asdict, dataclass, fields
from decimal import ROUND_HALF_UP, Decimal
from typing import Callable, Dict, Iterable, Optional, Sequence, Tuple

from .corpus import ParseNode
from .errors import DataError

log = logging.getLogger(__name__)

REPORT_SCHEMA = 1
CLAUSE_PREFIXES = ("S", "F")
PP_PREFIXES = ("P",)
CONNECTING_PREPOSITIONS = ("of",)


def label_category(label):
    """Form part of a SUSANNE label: ``Np:s`` -> ``Np``."""
    return label.split(":", 1)[0]


def np_label_predicate(prefix="N"):
    def is_np(label):
        return label_category(label).startswith(prefix)
    return is_np


default_np_predicate = np_label_predicate("N")


def round_half_up(x, places=2):
    if x is None:
        return None
    q = Decimal(1).scaleb(-places)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


# -- chunk criterion -----------------------------------------------------------

def constituent_spans(tree: ParseNode):
    return {n.span for n in tree.subtrees() if not n.synthetic}


def check_chunk_criterion(chunk, gold: ParseNode, spans=None) -> bool:
    """A chunk is right if it is one token or some constituent spans exactly
    its tokens."""
    start, end = (chunk.start, chunk.end) if hasattr(chunk, "start") else chunk
    if not gold.start <= start < end <= gold.end:
        raise DataError("chunk [%d, %d) lies outside the sentence"
                        % (start, end))
    if end - start == 1:
        return True
    if spans is None:
        spans = constituent_spans(gold)
    return (start, end) in spans


@dataclass
class ChunkScore:
    chunks: int = 0
    correct_chunks: int = 0
    sentences: int = 0
    correct_sentences: int = 0

    @property
    def chunk_rate(self):
        return self.correct_chunks / self.chunks if self.chunks else None

    @property
    def sentence_rate(self):
        return self.correct_sentences / self.sentences \
            if self.sentences else None

    def add(self, other):
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def as_dict(self):
        d = asdict(self)
        d["chunk_rate"] = round_half_up(self.chunk_rate)
        d["sentence_rate"] = round_half_up(self.sentence_rate)
        d["chunk_rate_raw"] = self.chunk_rate
        d["sentence_rate_raw"] = self.sentence_rate
        return d


def score_sentence_chunks(gold: ParseNode, spans) -> ChunkScore:
    if not spans:
        raise DataError("sentence has no chunks")
    pos = gold.start
    for s, e in spans:
        if s != pos:
            raise DataError("chunks do not tile the sentence")
        pos = e
    if pos != gold.end:
        raise DataError("chunks cover %d tokens, the parse %d"
                        % (pos - gold.start, gold.end - gold.start))
    cspans = constituent_spans(gold)
    good = sum(check_chunk_criterion(sp, gold, cspans) for sp in spans)
    return ChunkScore(len(spans), good, 1, int(good == len(spans)))


def chunker_eval(items: Iterable[Tuple[str, ParseNode, Sequence]]
                 ) -> Dict[str, ChunkScore]:
    """``items`` are (category, gold tree, chunk spans).

    Returns scores per category plus a ``"total"`` entry.
    """
    out = OrderedDict()
    total = ChunkScore()
    for category, gold, spans in items:
        s = score_sentence_chunks(gold, spans)
        out.setdefault(category, ChunkScore()).add(s)
        total.add(s)
    out = OrderedDict(sorted(out.items()))
    out["total"] = total
    for key, score in out.items():
        # usual on real data, but short all-correct sentences can outweigh
        # long wrong ones, so this is only a warning
        if score.sentence_rate is not None and \
                score.sentence_rate > score.chunk_rate:
            log.warning("%s: sentence rate %.4f above chunk rate %.4f",
                        key, score.sentence_rate, score.chunk_rate)
    return out


# -- noun phrase taxonomy ------------------------------------------------------

@dataclass
class NpTaxonomyCounts:
    np: int = 0
    mnp: int = 0
    mnp_min: int = 0
    mmnp: int = 0
    anp: int = 0
    enp: int = 0
    cnp: int = 0
    cmnp: int = 0
    cmnp_min: int = 0
    cmmnp: int = 0

    def add(self, other):
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def check(self):
        ok = (self.mmnp <= min(self.mnp, self.mnp_min)
              and self.np >= self.mnp and self.np >= self.mnp_min
              and self.cnp <= self.enp and self.cmnp <= self.cnp
              and self.cmnp_min <= self.cnp
              and self.cmmnp <= min(self.cmnp, self.cmnp_min)
              and self.anp <= self.np)
        if not ok:
            raise AssertionError("inconsistent taxonomy counts %r" % (self,))
        return self


@dataclass
class ContingencyTable:
    a: int = 0
    b: int = 0
    c: int = 0

    def add(self, other):
        self.a += other.a
        self.b += other.b
        self.c += other.c


class _NpView:
    """NP nodes of one tree with their maximal/minimal status."""

    def __init__(self, tree, words, is_np, clause_prefixes, pp_prefixes,
                 connecting):
        self.tree = tree
        self.words = words
        self.is_np = is_np
        self.clause_prefixes = tuple(clause_prefixes)
        self.pp_prefixes = tuple(pp_prefixes)
        self.connecting = tuple(connecting)
        self.nodes = []
        self.maximal = set()
        self.minimal = set()
        self._walk(tree, False)

    def _walk(self, node, under_np):
        """Returns True if ``node``'s subtree holds an NP below ``node``."""
        here = (not node.synthetic) and self.is_np(node.label)
        if here:
            self.nodes.append(node)
            if not under_np:
                self.maximal.add(id(node))
        below = False
        for c in node.children:
            if isinstance(c, ParseNode):
                below = self._walk(c, under_np or here) or below
        if here and not below:
            self.minimal.add(id(node))
        return below or here

    def _blocks(self, node):
        cat = label_category(node.label)
        if cat.startswith(self.clause_prefixes):
            return True
        if cat.startswith(self.pp_prefixes):
            first = node.leaves()[0] if node.leaves() else None
            word = self.words[first].lower() if first is not None \
                and self.words else ""
            return word not in self.connecting
        return False

    def _contains_block(self, np_node):
        return any(self._blocks(n) for n in np_node.subtrees()
                   if n is not np_node)

    def _top_nps(self, node):
        out = []
        for c in node.children:
            if not isinstance(c, ParseNode):
                continue
            if self.is_np(c.label):
                out.append(c)
            else:
                out.extend(self._top_nps(c))
        return out

    def applicable(self):
        """Maximal NPs free of clauses and non-"of" PPs; an NP that has one
        is replaced by the topmost NPs inside it, recursively."""
        out = []
        todo = [n for n in self.nodes if id(n) in self.maximal]
        while todo:
            node = todo.pop(0)
            if self._contains_block(node):
                todo[0:0] = self._top_nps(node)
            else:
                out.append(node)
        return out


def _view(gold, words, is_np, clause_prefixes, pp_prefixes, connecting):
    return _NpView(gold, list(words) if words is not None else [],
                   is_np or default_np_predicate, clause_prefixes,
                   pp_prefixes, connecting)


def np_taxonomy_counts(gold: ParseNode, words: Optional[Sequence[str]] = None,
                       is_np: Optional[Callable[[str], bool]] = None,
                       clause_prefixes=CLAUSE_PREFIXES,
                       pp_prefixes=PP_PREFIXES,
                       connecting=CONNECTING_PREPOSITIONS) -> NpTaxonomyCounts:
    v = _view(gold, words, is_np, clause_prefixes, pp_prefixes, connecting)
    both = v.maximal & v.minimal
    return NpTaxonomyCounts(np=len(v.nodes), mnp=len(v.maximal),
                            mnp_min=len(v.minimal), mmnp=len(both),
                            anp=len(v.applicable())).check()


def classify_extracted_nps(extracted, gold: ParseNode,
                           words: Optional[Sequence[str]] = None,
                           is_np=None, clause_prefixes=CLAUSE_PREFIXES,
                           pp_prefixes=PP_PREFIXES,
                           connecting=CONNECTING_PREPOSITIONS):
    """Counts for the extracted spans of one sentence.

    Returns (NpTaxonomyCounts with the extraction fields filled,
    ContingencyTable).  ``c`` counts applicable NPs with no matching span.
    """
    v = _view(gold, words, is_np, clause_prefixes, pp_prefixes, connecting)
    by_span = {}
    for n in v.nodes:
        by_span.setdefault(n.span, []).append(n)
    counts = NpTaxonomyCounts()
    matched = set()
    for p in extracted:
        span = p.span if hasattr(p, "span") else tuple(p)
        counts.enp += 1
        nodes = by_span.get(span)
        if not nodes:
            continue
        matched.add(span)
        counts.cnp += 1
        is_max = any(id(n) in v.maximal for n in nodes)
        is_min = any(id(n) in v.minimal for n in nodes)
        counts.cmnp += is_max
        counts.cmnp_min += is_min
        counts.cmmnp += any(id(n) in v.maximal and id(n) in v.minimal
                            for n in nodes)
    missed = sum(1 for n in v.applicable() if n.span not in matched)
    table = ContingencyTable(counts.cnp, counts.enp - counts.cnp, missed)
    return counts, table


def precision_recall(table: ContingencyTable):
    """(precision %, recall %); a metric with a zero denominator is None."""
    p = 100.0 * table.a / (table.a + table.b) if table.a + table.b else None
    r = 100.0 * table.a / (table.a + table.c) if table.a + table.c else None
    return p, r


# -- reports -------------------------------------------------------------------

@dataclass
class EvalReport:
    chunk_scores: Dict[str, ChunkScore]
    taxonomy: Dict[str, NpTaxonomyCounts]
    contingency: Dict[str, ContingencyTable]
    throughput: Optional[float] = None

    def metrics(self, key="total"):
        t = self.contingency.get(key)
        return precision_recall(t) if t is not None else (None, None)

    def as_dict(self):
        d = OrderedDict()
        d["schema"] = REPORT_SCHEMA
        if self.chunk_scores:
            d["chunks"] = OrderedDict(
                (k, v.as_dict()) for k, v in self.chunk_scores.items())
        if self.taxonomy:
            d["noun_phrases"] = OrderedDict()
            for k, counts in self.taxonomy.items():
                row = OrderedDict(asdict(counts))
                table = self.contingency.get(k)
                if table is not None:
                    p, r = precision_recall(table)
                    row["contingency"] = asdict(table)
                    row["precision"] = round_half_up(p)
                    row["recall"] = round_half_up(r)
                    row["precision_raw"] = p
                    row["recall_raw"] = r
                    row["cnp_over_anp"] = round_half_up(
                        counts.cnp / counts.anp if counts.anp else None)
                    if counts.cnp != table.a:
                        row["warning"] = "cnp differs from cell a"
                d["noun_phrases"][k] = row
        if self.throughput is not None:
            d["words_per_second"] = round_half_up(self.throughput)
        return d

    def to_json(self):
        return json.dumps(self.as_dict(), indent=1, sort_keys=False) + "\n"

    def to_text(self):
        lines = []
        if self.chunk_scores:
            lines.append("%-8s %8s %8s %6s %9s %9s %6s" % (
                "category", "chunks", "correct", "rate", "sentences",
                "correct", "rate"))
            for k, s in self.chunk_scores.items():
                lines.append("%-8s %8d %8d %6s %9d %9d %6s" % (
                    k, s.chunks, s.correct_chunks, _fmt(s.chunk_rate),
                    s.sentences, s.correct_sentences, _fmt(s.sentence_rate)))
            lines.append("")
        if self.taxonomy:
            names = [f.name for f in fields(NpTaxonomyCounts)]
            lines.append("%-8s " % "category" + " ".join(
                "%7s" % _HEADERS.get(n, n.upper()) for n in names)
                + " %9s %7s" % ("precision", "recall"))
            for k, counts in self.taxonomy.items():
                p, r = self.metrics(k)
                lines.append("%-8s " % k + " ".join(
                    "%7d" % getattr(counts, n) for n in names)
                    + " %9s %7s" % (_fmt(p, 100), _fmt(r, 100)))
        return "\n".join(lines) + "\n"


_HEADERS = {"mnp_min": "mNP", "cmnp_min": "CmNP", "mmnp": "MmNP",
            "cmmnp": "CMmNP"}


def _fmt(x, scale=1):
    if x is None:
        return "n/a"
    return "%.2f" % round_half_up(x / scale)
