"""Tagged sentence -> chunks -> heads -> noun phrases."""

from typing import List, Optional

from .chunker import ChunkScorer, chunk_sentence, chunks_from_spans
from .corpus import TaggedSentence
from .fsm import FsmSpec, NounPhrase, extract_noun_phrases, load_fsm_spec
from .grammar import GrammarModel
from .heads import HeadFinder


class Pipeline:
    def __init__(self, model: Optional[GrammarModel] = None,
                 heads: Optional[HeadFinder] = None,
                 fsm: Optional[FsmSpec] = None, cap: Optional[int] = None):
        self.model = model
        self.heads = heads or HeadFinder()
        self.fsm = fsm or load_fsm_spec()
        self.cap = cap
        self.scorer = ChunkScorer(model) if model is not None else None

    def chunk(self, sentence: TaggedSentence):
        if self.model is None:
            raise ValueError("no chunk model loaded")
        return chunk_sentence(sentence, self.model, cap=self.cap,
                              scorer=self.scorer)

    def extract_from_spans(self, sentence: TaggedSentence,
                           spans) -> List[NounPhrase]:
        headed = self.heads.assign_all(chunks_from_spans(sentence, spans))
        return extract_noun_phrases(headed, self.fsm)

    def extract(self, sentence: TaggedSentence):
        """(chunk spans, noun phrases) of one sentence."""
        spans = self.chunk(sentence).spans()
        return spans, self.extract_from_spans(sentence, spans)
