#!/usr/bin/env python3
"""Compare the compiled scoring kernel against the pure-Python fallback.

Times perceptron training and greedy parsing over a synthetic projective
treebank with each backend, then micro-times the raw kernel calls.
Run: python benchmarks/bench_scoring.py [--sentences N] [--epochs E]
"""

import argparse
import random
import time

import numpy as np

import i3rab.parser as parser_mod
from i3rab import _scoring_py
from i3rab.conllx import FeatureBag, Sentence, Token, Treebank
from i3rab.parser import parse_treebank_with_model, train

try:
    from i3rab import _scoring
except ImportError:
    _scoring = None


def synthetic_treebank(sentences, max_len, seed):
    rng = random.Random(seed)
    labels = ["TOPIC", "PRED-VP", "AGENT", "OBJ", "GEN", "VB", "P", "ADJ"]
    out = []
    for s in range(sentences):
        n = rng.randint(4, max_len)
        heads = [0] * (n + 1)

        def build(lo, hi, head):
            if lo > hi:
                return
            root = rng.randint(lo, hi)
            heads[root] = head
            start = lo
            while start <= root - 1:
                stop = rng.randint(start, root - 1)
                build(start, stop, root)
                start = stop + 1
            start = root + 1
            while start <= hi:
                stop = rng.randint(start, hi)
                build(start, stop, root)
                start = stop + 1

        build(1, n, 0)
        tokens = tuple(
            Token(
                id=i,
                form="s%dw%d" % (s, i),
                lemma="l%d" % (i % 11),
                cpostag="N",
                postag=rng.choice(["N-", "VI", "P-", "A-"]),
                feats=FeatureBag((("Case", rng.choice(("1", "2", "4"))),)),
                head=heads[i],
                deprel=rng.choice(labels),
            )
            for i in range(1, n + 1)
        )
        out.append(Sentence(tokens=tokens))
    return Treebank(tuple(out))


def run_with_kernel(kernel, tb, epochs):
    original = parser_mod._kernel
    parser_mod._kernel = kernel
    try:
        t0 = time.perf_counter()
        model, _ = train(tb, epochs=epochs, seed=7)
        t_train = time.perf_counter() - t0
        t0 = time.perf_counter()
        parse_treebank_with_model(tb, model)
        t_parse = time.perf_counter() - t0
    finally:
        parser_mod._kernel = original
    return model, t_train, t_parse


def micro_bench(kernel, rows=40, feats=20000, width=70, iters=20000, seed=3):
    rng = np.random.default_rng(seed)
    weights = rng.normal(size=(feats, width))
    ids = rng.integers(0, feats, size=rows).astype(np.int64)
    scores = np.zeros(width)
    legal = np.ones(width, dtype=np.uint8)
    t0 = time.perf_counter()
    for _ in range(iters):
        kernel.score_rows(weights, ids, scores)
        kernel.best_legal(scores, legal)
    return time.perf_counter() - t0


def main():
    args_parser = argparse.ArgumentParser(description=__doc__)
    args_parser.add_argument("--sentences", type=int, default=300)
    args_parser.add_argument("--max-len", type=int, default=20)
    args_parser.add_argument("--epochs", type=int, default=5)
    args = args_parser.parse_args()

    tb = synthetic_treebank(args.sentences, args.max_len, seed=11)
    print(
        "treebank: %d sentences, %d tokens; %d epochs"
        % (len(tb), tb.token_count(), args.epochs)
    )

    rows = []
    model_texts = {}
    for name, kernel in (("cython", _scoring), ("python", _scoring_py)):
        if kernel is None:
            print("%-8s extension not built, skipping" % name)
            continue
        model, t_train, t_parse = run_with_kernel(kernel, tb, args.epochs)
        micro = micro_bench(kernel)
        model_texts[name] = model.to_text()
        rows.append((name, t_train, t_parse, micro))

    print()
    print("%-8s %12s %12s %16s" % ("backend", "train (s)", "parse (s)", "kernel 20k (s)"))
    for name, t_train, t_parse, micro in rows:
        print("%-8s %12.3f %12.3f %16.3f" % (name, t_train, t_parse, micro))
    if len(rows) == 2:
        speedup = rows[1][1] / rows[0][1]
        print()
        print("train speedup (python / cython): %.2fx" % speedup)
        same = model_texts["cython"] == model_texts["python"]
        print("models byte-identical across backends: %s" % same)


if __name__ == "__main__":
    main()
