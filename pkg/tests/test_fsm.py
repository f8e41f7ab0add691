import pytest
from hypothesis import given, settings, strategies as st

from npchunker.chunker import chunks_from_spans, parse_chunk_line, read_chunked
from npchunker.errors import FormatError, ValidationError
from npchunker.fsm import (NounPhrase, accepts, extract_noun_phrases, load_fsm_spec,
                           lob_tag_inventory, parse_fsm_spec,
                           parse_np_brackets, phrases_from_json,
                           phrases_to_json, render_np_brackets)
from npchunker.heads import HeadFinder

from conftest import data_path

FSM = load_fsm_spec()

TINY = """STATES 0 1
START 0
ACCEPT 1
NOMINAL N*
CLASS N N*
CLASS A AT
EDGE 0 A 0
EDGE 0 N 1
EDGE 1 N 1
"""


def headed(line):
    sent, spans = parse_chunk_line(line)
    return sent, HeadFinder().assign_all(chunks_from_spans(sent, spans))


def nps(line):
    _, chunks = headed(line)
    return [p.text for p in extract_noun_phrases(chunks, FSM)]


def test_default_spec_shape():
    assert FSM.states == frozenset(range(8))
    assert FSM.start == 0
    assert FSM.accepting


def test_duplicate_edge_is_nondeterministic():
    with pytest.raises(ValidationError, match="nondeterministic"):
        parse_fsm_spec((TINY + "EDGE 0 N 0\n").splitlines())


def test_overlapping_classes_are_nondeterministic():
    text = TINY + "CLASS NN NN\nEDGE 1 NN 0\n"
    with pytest.raises(ValidationError, match="nondeterministic"):
        parse_fsm_spec(text.splitlines())


def test_internal_and_connect_edges_may_share_a_class():
    text = TINY.replace("STATES 0 1", "STATES 0 1 2") + "EDGE 1 N 2 connect\n"
    assert parse_fsm_spec(text.splitlines()).states == {0, 1, 2}


def test_undeclared_state():
    with pytest.raises(ValidationError, match="undeclared state 9"):
        parse_fsm_spec((TINY + "EDGE 1 A 9\n").splitlines())


def test_unknown_class():
    with pytest.raises(ValidationError, match="unknown symbol class"):
        parse_fsm_spec((TINY + "EDGE 1 Q 0\n").splitlines())


def test_unreachable_state():
    text = TINY.replace("STATES 0 1", "STATES 0 1 2")
    with pytest.raises(ValidationError, match="unreachable"):
        parse_fsm_spec(text.splitlines())


@pytest.mark.parametrize("extra", ["EDGE 1 A 0 sideways\n",
                                   "EDGE 1 A 0 connect right=verb\n",
                                   "EDGE 1 A\n", "BOGUS 1\n"])
def test_malformed_records(extra):
    with pytest.raises(ValidationError):
        parse_fsm_spec((TINY + extra).splitlines())


def test_missing_header():
    with pytest.raises(ValidationError, match="missing START"):
        parse_fsm_spec(TINY.replace("START 0\n", "").splitlines())


def test_missing_spec_file(tmp_path):
    with pytest.raises(ValidationError):
        load_fsm_spec(tmp_path / "none.txt")


def test_single_chunk_np():
    assert nps("[ a_AT one-room_JJ studio_NN ]") == ["a one-room studio"]


def test_non_of_preposition_does_not_connect():
    assert nps("[ the_ATI wool_NN ] [ over_IN a_AT husband_NN eyes_NNS ]") \
        == ["the wool", "a husband eyes"]


@pytest.mark.parametrize("tag", ["IO", "IN"])
def test_of_connects(tag):
    line = "[ the_ATI books_NNS ] [ of_%s my_PP$ uncle_NN ]" % tag
    assert nps(line) == ["the books of my uncle"]


def test_of_case_insensitive():
    assert nps("[ the_ATI books_NNS ] [ Of_IN my_PP$ uncle_NN ]") == \
        ["the books Of my uncle"]


def test_adjacent_noun_chunks_connect():
    assert nps("[ the_ATI stone_NN ] [ wall_NN ]") == ["the stone wall"]


def test_participle_chunk_does_not_connect():
    assert nps("[ the_ATI man_NN ] [ broken_VBN ] [ glass_NN ]") == \
        ["the man", "glass"]


def test_empty_input():
    assert extract_noun_phrases([], FSM) == []


def test_chunks_must_tile():
    _, chunks = headed("[ a_AT ] [ b_NN ]")
    with pytest.raises(ValueError):
        extract_noun_phrases(chunks[1:], FSM)


def _appendix():
    with open(data_path("appendix.txt")) as f:
        golden_text = f.read()
    tokens, golden = parse_np_brackets(golden_text)
    with open(data_path("appendix_chunks.txt")) as f:
        rows = read_chunked(f)
    return golden_text, tokens, golden, rows


def test_appendix_reference_chunking_reproduces_every_group():
    golden_text, tokens, golden, rows = _appendix()
    found, offset, flat = [], 0, []
    finder = HeadFinder()
    for sent, spans in rows:
        chunks = finder.assign_all(chunks_from_spans(sent, spans))
        for p in extract_noun_phrases(chunks, FSM):
            found.append((p.start + offset, p.end + offset))
        offset += len(sent)
        flat.extend(sent.tokens)
    assert [str(t) for t in flat] == [str(t) for t in tokens]
    assert len(golden) == 76
    assert found == golden
    assert sum(finder.fallbacks.values()) == 0
    rendered = render_np_brackets(tokens, [NounPhrase(s, e, "")
                                           for s, e in found])
    assert rendered == " ".join(golden_text.split())


def test_bracket_round_trip():
    golden_text, tokens, golden, _ = _appendix()
    text = render_np_brackets(tokens, [NounPhrase(s, e, "") for s, e in golden])
    assert parse_np_brackets(text) == (tokens, golden)


@pytest.mark.parametrize("text", ["[ [ a_AT ] ]", "] a_AT", "[ a_AT", "[ ]"])
def test_bad_brackets(text):
    with pytest.raises(FormatError):
        parse_np_brackets(text)


def test_json_round_trip():
    _, chunks = headed("[ the_ATI books_NNS ] [ of_IO my_PP$ uncle_NN ] "
                       "[ and_CC ] [ a_AT dog_NN ]")
    phrases = extract_noun_phrases(chunks, FSM)
    text = phrases_to_json([("s1", phrases)])
    assert phrases_from_json(text) == {"s1": phrases}
    assert phrases_to_json([("s1", phrases)]) == text
    with pytest.raises(FormatError):
        phrases_from_json('[{"start": 1}]')


TAGS = sorted(lob_tag_inventory())


@st.composite
def headed_sentences(draw):
    n = draw(st.integers(1, 14))
    tags = draw(st.lists(st.sampled_from(TAGS), min_size=n, max_size=n))
    words = [draw(st.sampled_from(["of", "Of", "x", "the"])) for _ in tags]
    cuts = sorted(draw(st.sets(st.integers(1, n - 1), max_size=n - 1))) \
        if n > 1 else []
    bounds = [0] + cuts + [n]
    line = " ".join("[ %s ]" % " ".join("%s_%s" % wt for wt in
                                        zip(words[s:e], tags[s:e]))
                    for s, e in zip(bounds, bounds[1:]))
    return headed(line)[1]


@settings(max_examples=300, deadline=None)
@given(headed_sentences())
def test_spans_are_ordered_maximal_and_accepted(chunks):
    n = chunks[-1].end
    phrases = extract_noun_phrases(chunks, FSM)
    prev_end = 0
    for p in phrases:
        assert prev_end <= p.start < p.end <= n
        prev_end = p.end
        assert accepts(chunks, FSM, p.start, p.end)
        for longer in range(p.end + 1, n + 1):
            assert not accepts(chunks, FSM, p.start, longer)
    assert extract_noun_phrases(chunks, FSM) == phrases


@settings(max_examples=100, deadline=None)
@given(headed_sentences())
def test_every_phrase_contains_a_nominal(chunks):
    tags = [t for c in chunks for t in c.chunk.tags]
    for p in extract_noun_phrases(chunks, FSM):
        assert any(t in FSM.nominal for t in tags[p.start:p.end])
