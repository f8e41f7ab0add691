"""Reading SUSANNE treebank files and word_TAG text.

A SUSANNE record line has six columns::

    G01:0010b  -  JJ  NORTHERN  northern  [O[S[Np:s.

The last column is the parse field.  It holds the constituents opened before
the word, a ``.`` standing for the word itself, and the constituents closed
after it, e.g. ``[O[S[Np:s.`` or ``.Po+]Po]Np:e]S]``.
"""

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, List, Optional, Sequence

from .errors import FormatError, ParseError, StructuralError, UnknownTagError

# Text-level constituents; they may span several sentences.
WRAPPER_LABELS = frozenset(["O", "Oh", "Ot"])
# word_TAG items ending with one of these tags close a sentence.
SENTENCE_TERMINATORS = frozenset(["."])

_ANNOTATION = re.compile(r"^((?:\[[^\[\].\s]+)*)\.((?:[^\[\].\s]+\])*)$")
_OPEN = re.compile(r"\[([^\[\].\s]+)")
_CLOSE = re.compile(r"([^\[\].\s]+)\]")
_DITTO = re.compile(r"^(.+?)(\d)(\d)$")


@dataclass(frozen=True)
class SusanneRecord:
    ref_id: str
    status: str
    word_tag: str
    surface: str
    lemma: str
    parse_annotation: str

    def to_line(self):
        return "\t".join((self.ref_id, self.status, self.word_tag,
                          self.surface, self.lemma, self.parse_annotation))


@dataclass(frozen=True)
class Token:
    surface: str
    lob_tag: str
    susanne_tag: Optional[str] = None

    def __str__(self):
        return "%s_%s" % (self.surface, self.lob_tag)


@dataclass
class TaggedSentence:
    tokens: List[Token]
    source_id: Optional[str] = None

    def __len__(self):
        return len(self.tokens)

    @property
    def words(self):
        return [t.surface for t in self.tokens]

    @property
    def tags(self):
        return [t.lob_tag for t in self.tokens]


@dataclass
class ParseNode:
    """A constituent.  ``children`` mixes ParseNodes and leaf indices.

    The root returned by :func:`build_parse_tree` is synthetic: its label is
    the empty string and it spans the whole record group.
    """
    label: str
    children: list = field(default_factory=list)
    start: int = 0
    end: int = 0

    @property
    def span(self):
        return (self.start, self.end)

    @property
    def synthetic(self):
        return self.label == ""

    def subtrees(self):
        """Pre-order iterator over all non-terminal nodes, self included."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed([c for c in node.children
                                   if isinstance(c, ParseNode)]))

    def leaves(self):
        out = []
        for child in self.children:
            if isinstance(child, ParseNode):
                out.extend(child.leaves())
            else:
                out.append(child)
        return out

    def __str__(self):
        parts = [str(c) for c in self.children]
        return "(%s %s)" % (self.label or "ROOT", " ".join(parts))


def split_annotation(annotation):
    """Return (opened labels, closed labels) of one parse field.

    >>> split_annotation('.Po+]Po]Np:e]S]')
    ([], ['Po+', 'Po', 'Np:e', 'S'])
    """
    m = _ANNOTATION.match(annotation)
    if m is None:
        raise FormatError("malformed parse field %r" % annotation)
    return _OPEN.findall(m.group(1)), _CLOSE.findall(m.group(2))


def parse_record(line, lineno=None):
    fields = line.split("\t") if line.count("\t") == 5 else line.split()
    if len(fields) < 6:
        raise ParseError("expected 6 fields, found %d: %r"
                         % (len(fields), line.strip()), lineno)
    if len(fields) > 6:
        raise ParseError("expected 6 fields, found %d: %r"
                         % (len(fields), line.strip()), lineno)
    fields = [f.strip() for f in fields]
    if not all(fields):
        raise ParseError("empty field in %r" % line.strip(), lineno)
    try:
        split_annotation(fields[5])
    except FormatError as e:
        raise ParseError(str(e), lineno) from None
    return SusanneRecord(*fields)


def _is_wrapper(label, wrappers):
    return label.split(":")[0] in wrappers


def parse_susanne_stream(stream: Iterable[str], wrappers=WRAPPER_LABELS
                         ) -> List[List[SusanneRecord]]:
    """Read SUSANNE records and group them into sentences.

    A sentence is a constituent opened while only text-level wrappers
    (``O``, ``Oh``...) are open.  Records outside any sentence attach to the
    preceding sentence, or to the next one when a new wrapper is opened or
    nothing precedes them.
    """
    groups = []
    current = []
    stack = []
    sentence_depth = None   # stack height when the open sentence began
    seen_sentence = False   # current group already holds a closed sentence
    for lineno, line in enumerate(stream, 1):
        if not line.strip():
            continue
        rec = parse_record(line, lineno)
        opens, closes = split_annotation(rec.parse_annotation)
        if seen_sentence and sentence_depth is None and opens:
            groups.append(current)
            current = []
            seen_sentence = False
        for label in opens:
            if sentence_depth is None and not _is_wrapper(label, wrappers):
                sentence_depth = len(stack)
            stack.append(label)
        current.append(rec)
        for label in closes:
            if not stack:
                raise StructuralError("%s: closing %r with nothing open"
                                      % (rec.ref_id, label))
            if stack[-1] != label:
                raise StructuralError("%s: closing %r but %r is open"
                                      % (rec.ref_id, label, stack[-1]))
            stack.pop()
            if sentence_depth is not None and len(stack) == sentence_depth:
                sentence_depth = None
                seen_sentence = True
    if sentence_depth is not None:
        raise StructuralError("unbalanced sentence at end of stream: %s open"
                              % " ".join(stack[sentence_depth:]))
    if current:
        groups.append(current)
    return groups


def render_records(records: Iterable[SusanneRecord]) -> str:
    return "".join(r.to_line() + "\n" for r in records)


def build_parse_tree(records: Sequence[SusanneRecord],
                     wrappers=WRAPPER_LABELS) -> ParseNode:
    """Rebuild the constituent tree of one record group.

    Constituents still open after the last record are closed there.  Closing
    a wrapper that was opened before the group is allowed and ignored.
    """
    root = ParseNode("", [], 0, len(records))
    stack = [root]
    for i, rec in enumerate(records):
        opens, closes = split_annotation(rec.parse_annotation)
        for label in opens:
            node = ParseNode(label, [], i, i)
            stack[-1].children.append(node)
            stack.append(node)
        stack[-1].children.append(i)
        for label in closes:
            if len(stack) == 1:
                if _is_wrapper(label, wrappers):
                    continue
                raise StructuralError("%s: closing %r with nothing open"
                                      % (rec.ref_id, label))
            if stack[-1].label != label:
                raise StructuralError("%s: closing %r but %r is open"
                                      % (rec.ref_id, label, stack[-1].label))
            stack.pop().end = i + 1
    for node in stack[1:]:
        node.end = len(records)
    return root


# -- tag mapping -----------------------------------------------------------

class TagMap:
    """Many-to-one map from SUSANNE word tags to LOB tags."""

    def __init__(self, table, notes=None):
        self.table = dict(table)
        self.notes = dict(notes or {})

    def __contains__(self, tag):
        return tag in self.table

    def __len__(self):
        return len(self.table)

    def lookup(self, tag):
        try:
            return self.table[tag]
        except KeyError:
            pass
        # multi-word items carry "ditto" digits, e.g. II21 II22 for "because of"
        m = _DITTO.match(tag)
        if m and m.group(1) in self.table and m.group(2) >= m.group(3) > "0":
            return self.table[m.group(1)]
        raise UnknownTagError(tag)

    @classmethod
    def load(cls, path=None):
        if path is None:
            text = resources.files("npchunker").joinpath(
                "data/susanne_lob.tsv").read_text()
        else:
            with open(path) as f:
                text = f.read()
        return cls.parse(text.splitlines())

    @classmethod
    def parse(cls, lines):
        table, notes = {}, {}
        for lineno, line in enumerate(lines, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < 2 or not cols[0] or not cols[1]:
                raise ParseError("tag map needs two tab-separated columns",
                                 lineno)
            if cols[0] in table:
                raise ParseError("duplicate tag %r" % cols[0], lineno)
            table[cols[0]] = cols[1]
            if len(cols) > 2:
                notes[cols[0]] = cols[2]
        return cls(table, notes)


_default_map = None


def default_tag_map():
    global _default_map
    if _default_map is None:
        _default_map = TagMap.load()
    return _default_map


def map_tag(susanne_tag: str, table: Optional[TagMap] = None) -> str:
    if not susanne_tag:
        raise UnknownTagError(susanne_tag)
    return (table or default_tag_map()).lookup(susanne_tag)


def records_to_sentence(records, tag_map=None, source_id=None):
    tokens = [Token(r.surface, map_tag(r.word_tag, tag_map), r.word_tag)
              for r in records]
    if source_id is None and records:
        source_id = records[0].ref_id
    return TaggedSentence(tokens, source_id)


# -- word_TAG text ---------------------------------------------------------

def check_lob_tag(tag):
    return bool(tag) and "*" not in tag and not any(c.isspace() for c in tag)


def parse_item(item):
    word, sep, tag = item.rpartition("_")
    if not sep or not word or not tag:
        raise FormatError("expected word_TAG, got %r" % item)
    if not check_lob_tag(tag):
        raise FormatError("bad tag in %r" % item)
    return Token(word, tag)


def read_vertical_tagged(stream: Iterable[str],
                         terminators=SENTENCE_TERMINATORS
                         ) -> List[TaggedSentence]:
    """Read whitespace-separated word_TAG items into sentences.

    A sentence ends after an item tagged with a terminator or at a blank
    line.  Only the last underscore separates word and tag.
    """
    sentences = []
    current = []

    def flush():
        if current:
            sentences.append(TaggedSentence(list(current),
                                            "s%d" % (len(sentences) + 1)))
            current.clear()

    for line in stream:
        items = line.split()
        if not items:
            flush()
            continue
        for item in items:
            tok = parse_item(item)
            current.append(tok)
            if tok.lob_tag in terminators:
                flush()
    flush()
    return sentences


def read_susanne_file(path, wrappers=WRAPPER_LABELS):
    with open(path, encoding="latin-1") as f:
        return parse_susanne_stream(f, wrappers)
