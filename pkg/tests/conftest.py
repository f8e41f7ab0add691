import os
import random

import pytest

from npchunker.grammar import BEGIN, GrammarModel

DATA = os.path.join(os.path.dirname(__file__), "data")


def data_path(name):
    return os.path.join(DATA, name)


def random_model(rng: random.Random, alphabet=6, max_len=3, rules=12,
                 pairs=20):
    """A random model over tags T0..T{alphabet-1}."""
    tags = ["T%d" % i for i in range(alphabet)]
    uni = {}
    for _ in range(rules):
        label = tuple(rng.choice(tags) for _ in range(rng.randint(1, max_len)))
        uni[label] = uni.get(label, 0) + rng.randint(1, 5)
    labels = sorted(uni)
    bi = {}
    for _ in range(pairs):
        prev = rng.choice([BEGIN] + labels)
        key = (prev, rng.choice(labels))
        bi[key] = bi.get(key, 0) + rng.randint(1, 5)
    return GrammarModel(uni, bi, sum(uni.values()),
                        max(len(x) for x in uni)), tags


@pytest.fixture
def data():
    return data_path


SUSANNE_TAGS = ["AT", "AT1", "JJ", "NN1c", "NN2", "VVDv", "II", "IO", "CC",
                "APPGm", "RR", "YF"]
LABELS = ["Ns", "Np:s", "Po", "Vd", "Fr", "P:p", "Nns"]


def random_tree_records(rng: random.Random, prefix="R", max_len=9):
    """One random well-nested record group under an S node."""
    n = rng.randint(1, max_len)
    opens = [[] for _ in range(n)]
    closes = [[] for _ in range(n)]

    def build(lo, hi, depth):
        i = lo
        while i < hi:
            j = rng.randint(i + 1, hi)
            if depth < 4 and rng.random() < 0.6:
                label = rng.choice(LABELS)
                opens[i].append(label)
                build(i, j, depth + 1)
                closes[j - 1].append(label)
            i = j

    from npchunker.corpus import SusanneRecord
    opens[0].append("S")
    build(0, n, 1)
    closes[n - 1].append("S")
    recs = []
    for i in range(n):
        ann = "".join("[" + x for x in opens[i]) + "." + \
            "".join(x + "]" for x in closes[i])
        recs.append(SusanneRecord("%s:%04d" % (prefix, i), "-",
                                  rng.choice(SUSANNE_TAGS), "w%d" % i, "w",
                                  ann))
    return recs


def random_treebank(rng, sentences=None):
    k = sentences or rng.randint(1, 12)
    return [random_tree_records(rng, "R%02d" % s) for s in range(k)]
