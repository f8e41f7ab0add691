import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from npchunker.chunker import (BRUTE_FORCE_LIMIT, Chunk, ChunkScorer, DPState,
                               brute_force_chunk, chunk_sentence, compositions,
                               compositions_by_mask, cscore, dp_state_chunks,
                               dscore, parse_chunk_line, read_chunked,
                               render_chunks, s_function, score_segmentation)
from npchunker.corpus import TaggedSentence, Token
from npchunker.errors import DomainError, FormatError
from npchunker.grammar import BEGIN, GrammarModel, load_model

from conftest import data_path, random_model


def S(p):
    # written out independently of the library
    return 0.0 if p == 0 else 1.0 / (1.0 + abs(math.log(p)))


@pytest.mark.parametrize("p, expected", [
    (math.exp(-3), 0.25), (math.exp(-1), 0.5), (1.0, 1.0), (0.0, 0.0),
    (0.02, 0.20358)])
def test_s_function_values(p, expected):
    assert s_function(p) == pytest.approx(expected, abs=5e-6)


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_s_function_domain(p):
    with pytest.raises(DomainError):
        s_function(p)


@given(st.floats(0, 1), st.floats(0, 1))
def test_s_function_monotone_and_bounded(p, q):
    lo, hi = sorted((p, q))
    assert 0.0 <= s_function(lo) <= s_function(hi) <= 1.0


def _two_tag_model():
    uni = {("A",): 1, ("B",): 1, ("A", "B"): 2}
    bi = {(BEGIN, ("A", "B")): 1, (BEGIN, ("A",)): 1, (("A",), ("B",)): 1}
    return GrammarModel(uni, bi, 4, 2)


def test_score_helpers():
    m = _two_tag_model()
    assert dscore(("A", "B"), m) == pytest.approx(S(0.5))
    assert dscore(Chunk(0, 1, ("B",)), m) == pytest.approx(S(0.25))
    assert dscore(("C",), m) == 0.0
    assert cscore(("B",), ("A",), m) == 1.0
    assert cscore(("A",), ("B",), m) == 0.0
    assert cscore(("A",), BEGIN, m) == pytest.approx(S(0.5))


def test_two_tokens_by_hand():
    m = _two_tag_model()
    whole = S(0.5) + S(0.5)
    split = S(0.25) + S(0.5) + S(0.25) + S(1.0)
    assert split > whole
    for result in (chunk_sentence(["A", "B"], m),
                   brute_force_chunk(["A", "B"], m)):
        assert result.spans() == [(0, 1), (1, 2)]
        assert result.total_score == pytest.approx(split)


def test_single_token_is_one_chunk():
    m = _two_tag_model()
    assert chunk_sentence(["A"], m).spans() == [(0, 1)]
    assert chunk_sentence(["Z"], m).spans() == [(0, 1)]


def test_unseen_tags_fall_back_to_single_chunks():
    m = _two_tag_model()
    res = chunk_sentence(["X", "Y", "Z"], m)
    assert res.spans() == [(0, 1), (1, 2), (2, 3)]
    assert res.total_score == 0.0


def test_symmetric_three_tokens():
    # A A A with (A A) unseen: three single chunks beat anything else
    uni = {("A",): 3}
    bi = {(BEGIN, ("A",)): 1, (("A",), ("A",)): 2}
    m = GrammarModel(uni, bi, 3, 1)
    res = chunk_sentence(["A"] * 3, m, cap=3)
    assert res.spans() == [(0, 1), (1, 2), (2, 3)]
    assert res.total_score == pytest.approx(3 * S(1.0) + 3 * S(1.0))
    assert brute_force_chunk(["A"] * 3, m, cap=3).spans() == res.spans()


def test_example_fixture():
    m = load_model(data_path("example2_model.txt"))
    tags = "NN MD BE VBN IN NN .".split()
    expected = [(0, 1), (1, 4), (4, 6), (6, 7)]
    assert chunk_sentence(tags, m).spans() == expected
    assert brute_force_chunk(tags, m).spans() == expected


def test_empty_sentence():
    m = _two_tag_model()
    with pytest.raises(DomainError):
        chunk_sentence([], m)
    with pytest.raises(DomainError):
        brute_force_chunk([], m)


def test_brute_force_refuses_long_input():
    m = _two_tag_model()
    with pytest.raises(DomainError):
        brute_force_chunk(["A"] * (BRUTE_FORCE_LIMIT + 1), m)


def test_bad_cap():
    with pytest.raises(DomainError):
        chunk_sentence(["A"], _two_tag_model(), cap=0)


@pytest.mark.parametrize("n, cap", [(1, 1), (4, 2), (6, 3), (7, 7)])
def test_enumerators_agree(n, cap):
    a = sorted(map(tuple, compositions(n, cap)))
    b = sorted(map(tuple, compositions_by_mask(n, cap)))
    assert a == b
    if cap >= n:
        assert len(a) == 2 ** (n - 1)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 9),
       st.sampled_from(["recursion", "mask"]))
def test_dp_matches_brute_force(seed, n, how):
    rng = random.Random(seed)
    model, alphabet = random_model(rng, alphabet=rng.randint(2, 5))
    tags = [rng.choice(alphabet) for _ in range(n)]
    dp = chunk_sentence(tags, model)
    bf = brute_force_chunk(tags, model, enumerate_by=how)
    assert dp.total_score == bf.total_score
    assert dp.spans() == bf.spans()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 40))
def test_segmentation_tiles_and_score_adds_up(seed, n):
    rng = random.Random(seed)
    model, alphabet = random_model(rng)
    tags = [rng.choice(alphabet) for _ in range(n)]
    res = chunk_sentence(tags, model)
    spans = res.spans()
    assert spans[0][0] == 0 and spans[-1][1] == n
    assert all(a[1] == b[0] for a, b in zip(spans, spans[1:]))
    assert all(0 < e - s <= model.max_chunk_len for s, e in spans)
    scorer = ChunkScorer(model)
    assert res.total_score == score_segmentation(tags, spans, scorer)
    # by hand, straight from the model
    total, prev = 0.0, BEGIN
    for s, e in spans:
        label = tuple(tags[s:e])
        total += S(model.cond_prob(label, prev)) + S(model.prob(label))
        prev = label
    assert res.total_score == pytest.approx(total, abs=1e-12 * n)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 30))
def test_paper_mode_never_beats_exact(seed, n):
    rng = random.Random(seed)
    model, alphabet = random_model(rng)
    tags = [rng.choice(alphabet) for _ in range(n)]
    state = chunk_sentence(tags, model, method="paper")
    assert isinstance(state, DPState)
    greedy = dp_state_chunks(tags, state)
    scorer = ChunkScorer(model)
    assert greedy.total_score == pytest.approx(
        score_segmentation(tags, greedy.spans(), scorer), abs=1e-12)
    assert chunk_sentence(tags, model).total_score >= \
        greedy.total_score - 1e-12


@pytest.mark.parametrize("n", [10, 100, 1000, 10000])
def test_candidate_count_is_linear(n):
    rng = random.Random(n)
    model, alphabet = random_model(rng, max_len=4)
    tags = [rng.choice(alphabet) for _ in range(n)]
    stats = {}
    chunk_sentence(tags, model, stats=stats)
    cap = model.max_chunk_len
    assert stats["candidates"] <= n * cap
    assert stats["candidates"] == sum(min(cap, i) for i in range(1, n + 1))


def test_unknown_method():
    with pytest.raises(ValueError):
        chunk_sentence(["A"], _two_tag_model(), method="beam")


def test_tokens_keep_words():
    m = _two_tag_model()
    sent = TaggedSentence([Token("a", "A"), Token("b", "B")])
    res = chunk_sentence(sent, m)
    assert res.render() == "[ a_A ] [ b_B ]"


def test_chunk_validation():
    with pytest.raises(ValueError):
        Chunk(2, 2, ())
    with pytest.raises(ValueError):
        Chunk(0, 2, ("A",))


def test_chunk_line_round_trip():
    line = "[ the_ATI dog_NN ] [ barked_VBD ] [ ._. ]"
    sent, spans = parse_chunk_line(line)
    assert spans == [(0, 2), (2, 3), (3, 4)]
    assert sent.tags == ["ATI", "NN", "VBD", "."]
    from npchunker.chunker import chunks_from_spans
    assert render_chunks(chunks_from_spans(sent, spans)) == line


@pytest.mark.parametrize("line", ["[ a_AT [ b_NN ] ]", "a_AT", "[ ]",
                                  "[ a_AT"])
def test_bad_chunk_lines(line):
    with pytest.raises(FormatError):
        parse_chunk_line(line)


def test_read_chunked_numbers_sentences():
    rows = read_chunked(["[ a_AT ]\n", "\n", "[ b_NN ] [ c_NN ]\n"])
    assert [s.source_id for s, _ in rows] == ["s1", "s2"]
    with pytest.raises(FormatError, match="line 2"):
        read_chunked(["[ a_AT ]", "oops_NN"])


def test_one_rule_model_scores_one():
    m = GrammarModel({("NN",): 4}, {(BEGIN, ("NN",)): 4}, 4, 1)
    assert dscore(("NN",), m) == 1.0
    assert cscore(("NN",), BEGIN, m) == 1.0
