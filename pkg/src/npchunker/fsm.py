"""Noun-phrase extraction with a finite-state machine over headed chunks.

The machine is read from a data file (see ``data/np_fsm.txt``).  Scanning
starts at every token not yet covered by a phrase and keeps the longest run
that ends in an accepting state.  Inside a chunk only internal edges fire;
the first token of a new chunk must be taken by a connect edge, whose guards
decide whether two chunks join into one phrase.
"""

import json
import re
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, FrozenSet, List, Sequence, Tuple

from .errors import ValidationError
from .heads import HeadedChunk

MODES = ("internal", "connect", "any")
GUARD_KEYS = ("word", "right")
RIGHT_GUARDS = ("noun", "pp")


def _glob(pattern):
    if not pattern or any(c.isspace() for c in pattern):
        raise ValidationError("bad pattern %r" % pattern)
    return re.compile(".*".join(re.escape(p) for p in pattern.split("*")) + r"\Z")


class TagClass:
    """Tags matching any include pattern and no exclude pattern."""

    def __init__(self, name, patterns):
        self.name = name
        self.patterns = tuple(patterns)
        inc = [p for p in patterns if not p.startswith("!")]
        exc = [p[1:] for p in patterns if p.startswith("!")]
        if not inc:
            raise ValidationError("class %s has no include pattern" % name)
        self._inc = [_glob(p) for p in inc]
        self._exc = [_glob(p) for p in exc]
        self._cache = {}

    def __contains__(self, tag):
        try:
            return self._cache[tag]
        except KeyError:
            pass
        ok = any(r.match(tag) for r in self._inc) \
            and not any(r.match(tag) for r in self._exc)
        self._cache[tag] = ok
        return ok

    def stems(self):
        out = set()
        for p in self.patterns:
            stem = p.lstrip("!").replace("*", "")
            out.update((stem, stem + "~"))
        return out


@dataclass(frozen=True)
class Edge:
    source: int
    symbol: str
    target: int
    mode: str = "internal"
    guards: Tuple[Tuple[str, str], ...] = ()
    lineno: int = 0

    def __str__(self):
        parts = ["EDGE", str(self.source), self.symbol, str(self.target),
                 self.mode] + ["%s=%s" % g for g in self.guards]
        return " ".join(parts)


@dataclass
class FsmSpec:
    states: FrozenSet[int]
    start: int
    accepting: FrozenSet[int]
    classes: Dict[str, TagClass]
    transitions: List[Edge]
    nominal: TagClass
    witnesses: FrozenSet[str] = frozenset()
    _out: Dict[int, List[Edge]] = field(default=None, repr=False)

    def __post_init__(self):
        self.validate()
        self._out = {s: [] for s in self.states}
        for e in self.transitions:
            self._out[e.source].append(e)
        self._step = {}

    def validate(self):
        if self.start not in self.states:
            raise ValidationError("start state %d is not declared" % self.start)
        for s in self.accepting:
            if s not in self.states:
                raise ValidationError("accepting state %d is not declared" % s)
        for e in self.transitions:
            for s in (e.source, e.target):
                if s not in self.states:
                    raise ValidationError("line %d: %s uses undeclared state %d"
                                          % (e.lineno, e, s))
            if e.symbol not in self.classes:
                raise ValidationError("line %d: unknown symbol class %r"
                                      % (e.lineno, e.symbol))
            if e.mode not in MODES:
                raise ValidationError("line %d: unknown mode %r"
                                      % (e.lineno, e.mode))
            for key, value in e.guards:
                if key not in GUARD_KEYS or \
                        (key == "right" and value not in RIGHT_GUARDS):
                    raise ValidationError("line %d: unknown guard %s=%s"
                                          % (e.lineno, key, value))
        self._check_deterministic()
        self._check_reachable()

    def _check_deterministic(self):
        universe = set(self.witnesses)
        for c in self.classes.values():
            universe |= c.stems()
        universe = sorted(universe)
        by_state = {}
        for e in self.transitions:
            by_state.setdefault(e.source, []).append(e)
        for edges in by_state.values():
            for i, e in enumerate(edges):
                for f in edges[i + 1:]:
                    if {e.mode, f.mode} == {"internal", "connect"}:
                        continue
                    we, wf = dict(e.guards).get("word"), dict(f.guards).get("word")
                    if we is not None and wf is not None and we != wf:
                        continue
                    ce, cf = self.classes[e.symbol], self.classes[f.symbol]
                    shared = next((t for t in universe if t in ce and t in cf),
                                  None)
                    if shared is not None:
                        raise ValidationError(
                            "nondeterministic: '%s' (line %d) and '%s' "
                            "(line %d) both accept %r"
                            % (e, e.lineno, f, f.lineno, shared))

    def _check_reachable(self):
        seen = {self.start}
        todo = deque([self.start])
        while todo:
            s = todo.popleft()
            for e in self.transitions:
                if e.source == s and e.target not in seen:
                    seen.add(e.target)
                    todo.append(e.target)
        missing = sorted(set(self.states) - seen)
        if missing:
            raise ValidationError("unreachable states: %s"
                                  % " ".join(map(str, missing)))

    def edges_for(self, state, tag, boundary):
        """Edges leaving ``state`` that can consume ``tag``."""
        key = (state, tag, boundary)
        try:
            return self._step[key]
        except KeyError:
            pass
        bad = "internal" if boundary else "connect"
        out = [e for e in self._out[state]
               if e.mode != bad and tag in self.classes[e.symbol]]
        self._step[key] = out
        return out


def parse_fsm_spec(lines, witnesses=()):
    states = None
    start = None
    accepting = None
    nominal = None
    classes = {}
    edges = []
    for lineno, raw in enumerate(lines, 1):
        f = raw.split()
        if not f or f[0].startswith("#"):
            continue
        kind, args = f[0], f[1:]
        try:
            if kind == "STATES":
                states = frozenset(int(a) for a in args)
            elif kind == "START":
                (start,) = [int(a) for a in args]
            elif kind == "ACCEPT":
                accepting = frozenset(int(a) for a in args)
            elif kind == "NOMINAL":
                nominal = TagClass("NOMINAL", args)
            elif kind == "CLASS":
                name, pats = args[0], args[1:]
                if name in classes:
                    raise ValidationError("class %s defined twice" % name)
                classes[name] = TagClass(name, pats)
            elif kind == "EDGE":
                src, sym, dst = int(args[0]), args[1], int(args[2])
                rest = args[3:]
                mode = "internal"
                if rest and "=" not in rest[0]:
                    mode, rest = rest[0], rest[1:]
                guards = []
                for g in rest:
                    key, sep, value = g.partition("=")
                    if not sep or not value:
                        raise ValidationError("bad guard %r" % g)
                    guards.append((key, value))
                edges.append(Edge(src, sym, dst, mode, tuple(guards), lineno))
            else:
                raise ValidationError("unknown record %r" % kind)
        except (ValueError, IndexError) as e:
            raise ValidationError("line %d: malformed %s record (%s)"
                                  % (lineno, kind, e)) from None
        except ValidationError as e:
            raise ValidationError("line %d: %s" % (lineno, e)) from None
    for what, value in (("STATES", states), ("START", start),
                        ("ACCEPT", accepting), ("NOMINAL", nominal)):
        if value is None:
            raise ValidationError("missing %s record" % what)
    return FsmSpec(states, start, accepting, classes, edges, nominal,
                   frozenset(witnesses))


def lob_tag_inventory():
    text = resources.files("npchunker").joinpath("data/lob_tags.txt").read_text()
    return [t for t in text.split("\n") if t and not t.startswith("#")]


def load_fsm_spec(path=None) -> FsmSpec:
    if path is None:
        text = resources.files("npchunker").joinpath(
            "data/np_fsm.txt").read_text()
    else:
        try:
            with open(path, encoding="utf-8") as f:
                text = f.read()
        except OSError as e:
            raise ValidationError("cannot read FSM spec: %s" % e) from None
    return parse_fsm_spec(text.splitlines(), lob_tag_inventory())


@dataclass(frozen=True)
class NounPhrase:
    start: int
    end: int
    text: str

    @property
    def span(self):
        return (self.start, self.end)


class _Sentence:
    """Flat token view of a headed chunk sequence."""

    def __init__(self, chunks: Sequence[HeadedChunk]):
        self.chunks = list(chunks)
        self.tags = []
        self.words = []
        self.owner = []
        for ci, hc in enumerate(self.chunks):
            c = hc.chunk
            if c.start != len(self.tags):
                raise ValueError("chunks do not tile the sentence")
            self.tags.extend(c.tags)
            self.words.extend(c.words or ("",) * len(c))
            self.owner.extend([ci] * len(c))


def _guards_hold(edge, sent, fsm, j):
    left = sent.chunks[sent.owner[j - 1]]
    nominal = fsm.nominal
    if left.tag_at(left.syntactic_head) not in nominal \
            or left.tag_at(left.semantic_head) not in nominal:
        return False
    right = sent.chunks[sent.owner[j]]
    for key, value in edge.guards:
        if key == "word":
            if sent.words[j].lower() != value:
                return False
        elif value == "noun":
            if right.tag_at(right.syntactic_head) not in nominal:
                return False
        elif value == "pp":
            if right.syntactic_head != right.start \
                    or right.tag_at(right.semantic_head) not in nominal:
                return False
    return True


def _step(sent, fsm, state, s, j):
    boundary = j > s and sent.owner[j] != sent.owner[j - 1]
    for e in fsm.edges_for(state, sent.tags[j], boundary):
        if boundary and not _guards_hold(e, sent, fsm, j):
            continue
        return e.target
    return None


def _run(sent, fsm, s):
    """Longest accepting end for a run starting at ``s`` (or None)."""
    state = fsm.start
    last = None
    for j in range(s, len(sent.tags)):
        state = _step(sent, fsm, state, s, j)
        if state is None:
            break
        if state in fsm.accepting:
            last = j + 1
    return last


def accepts(chunks: Sequence[HeadedChunk], fsm: FsmSpec, start, end):
    """Whether exactly tokens[start:end] drives the machine to acceptance."""
    sent = _Sentence(chunks)
    state = fsm.start
    for j in range(start, end):
        state = _step(sent, fsm, state, start, j)
        if state is None:
            return False
    return state in fsm.accepting


def extract_noun_phrases(chunks: Sequence[HeadedChunk],
                         fsm: FsmSpec) -> List[NounPhrase]:
    sent = _Sentence(chunks)
    out = []
    n = len(sent.tags)
    s = 0
    while s < n:
        end = _run(sent, fsm, s)
        if end is None:
            s += 1
            continue
        out.append(NounPhrase(s, end, " ".join(sent.words[s:end])))
        s = end
    return out


# -- output --------------------------------------------------------------------

def render_np_brackets(tokens, phrases: Sequence[NounPhrase]) -> str:
    """Tagged text with each phrase wrapped in ``[ ... ]``."""
    starts = {p.start: p for p in phrases}
    ends = {p.end for p in phrases}
    parts = []
    for i, tok in enumerate(tokens):
        if i in ends:
            parts.append("]")
        if i in starts:
            parts.append("[")
        parts.append(str(tok))
    if len(tokens) in ends:
        parts.append("]")
    return " ".join(parts)


def phrases_to_json(per_sentence) -> str:
    """``per_sentence`` is an iterable of (sentence id, phrases)."""
    rows = []
    for sid, phrases in per_sentence:
        for p in phrases:
            rows.append({"sentence": sid, "start": p.start, "end": p.end,
                         "text": p.text})
    return json.dumps(rows, indent=1, ensure_ascii=False) + "\n"


def phrases_from_json(text):
    try:
        rows = json.loads(text)
        out = {}
        for r in rows:
            out.setdefault(r["sentence"], []).append(
                NounPhrase(int(r["start"]), int(r["end"]), r.get("text", "")))
        return out
    except (ValueError, KeyError, TypeError) as e:
        from .errors import FormatError
        raise FormatError("bad span list: %s" % e) from None


def parse_np_brackets(text):
    """Inverse of :func:`render_np_brackets` over a whole text.

    Returns the tokens and the bracketed spans as token offsets.
    """
    from .corpus import parse_item
    from .errors import FormatError
    tokens = []
    spans = []
    start = None
    for item in text.split():
        if item == "[":
            if start is not None:
                raise FormatError("nested '[' in bracketed text")
            start = len(tokens)
        elif item == "]":
            if start is None or start == len(tokens):
                raise FormatError("unbalanced or empty brackets")
            spans.append((start, len(tokens)))
            start = None
        else:
            tokens.append(parse_item(item))
    if start is not None:
        raise FormatError("unclosed '['")
    return tokens, spans
