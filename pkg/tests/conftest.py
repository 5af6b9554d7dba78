import random

import pytest

from i3rab.conllx import FeatureBag, Sentence, Token, Treebank
from i3rab.data import figures_i3rab, figures_padt
from i3rab.schema import Schema


@pytest.fixture(scope="session")
def schema():
    return Schema()


@pytest.fixture(scope="session")
def gold_corpus():
    return figures_i3rab()


@pytest.fixture(scope="session")
def padt_corpus():
    return figures_padt()


def make_sentence(rows, comments=()):
    """rows: (form, postag, head, deprel) or full token dicts."""
    tokens = []
    for i, row in enumerate(rows, start=1):
        if isinstance(row, dict):
            row = dict(row)
            row.setdefault("id", i)
            tokens.append(Token(**row))
        else:
            form, postag, head, deprel = row
            tokens.append(
                Token(
                    id=i,
                    form=form,
                    cpostag=postag[0] if postag else "",
                    postag=postag,
                    head=head,
                    deprel=deprel,
                )
            )
    return Sentence(tokens=tuple(tokens), comments=tuple(comments))


def _segments(rng, lo, hi):
    """Random partition of lo..hi into contiguous chunks."""
    out = []
    start = lo
    while start <= hi:
        stop = rng.randint(start, hi)
        out.append((start, stop))
        start = stop + 1
    return out


def random_projective_sentence(rng: random.Random, labels, n=None, prefix="w") -> Sentence:
    """Generate a uniformly structured random projective tree."""
    if n is None:
        n = rng.randint(1, 10)
    heads = [0] * (n + 1)

    def build(lo, hi, head):
        if lo > hi:
            return
        root = rng.randint(lo, hi)
        heads[root] = head
        for a, b in _segments(rng, lo, root - 1):
            build(a, b, root)
        for a, b in _segments(rng, root + 1, hi):
            build(a, b, root)

    build(1, n, 0)
    tokens = tuple(
        Token(
            id=i,
            form="%s%d" % (prefix, i),
            lemma="%s%d" % (prefix, i),
            cpostag="N",
            postag="N-",
            feats=FeatureBag(),
            head=heads[i],
            deprel=rng.choice(labels),
        )
        for i in range(1, n + 1)
    )
    return Sentence(tokens=tokens)


def random_treebank(rng, labels, sentences=10, max_len=8) -> Treebank:
    """Random projective treebank; per-sentence form prefixes keep the
    data separable so a memorizing learner can fit it."""
    return Treebank(
        tuple(
            random_projective_sentence(
                rng, labels, n=rng.randint(1, max_len), prefix="s%dw" % idx
            )
            for idx in range(sentences)
        )
    )
