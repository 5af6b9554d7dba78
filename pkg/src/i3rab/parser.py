"""Greedy arc-eager transition-based dependency parser.

Training is an averaged perceptron over static-oracle transition
sequences.  The per-step score/update loop is the hot path: it runs in
the compiled kernel (i3rab._scoring) when available and otherwise in
the pure-Python twin (i3rab._scoring_py), selected at import.  Both
kernels are bit-identical, so models and parses do not depend on which
one is active; set I3RAB_PURE=1 to force the fallback.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

import numpy as np

from .conllx import Sentence, Treebank
from .errors import (
    AllSentencesNonProjective,
    EmptyTreebank,
    IllegalTransition,
    ModelFormatError,
    NonProjectiveInput,
    SchemaMismatch,
)
from .schema import Schema

if os.environ.get("I3RAB_PURE"):
    from . import _scoring_py as _kernel
else:
    try:
        from . import _scoring as _kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _scoring_py as _kernel

BACKEND = _kernel.BACKEND

SHIFT = "SHIFT"
LEFT_ARC = "LEFT_ARC"
RIGHT_ARC = "RIGHT_ARC"
REDUCE = "REDUCE"

MODEL_HEADER = "I3RAB-MODEL v1"

TEMPLATES = (
    "s0.form", "s0.lemma", "s0.cpos", "s0.pos", "s0.feat", "s0.ldep", "s0.rdep",
    "s1.form", "s1.lemma", "s1.cpos", "s1.pos", "s1.feat",
    "b0.form", "b0.lemma", "b0.cpos", "b0.pos", "b0.feat",
    "b1.form", "b1.lemma", "b1.cpos", "b1.pos", "b1.feat",
    "s0b0.pos", "b0b1.pos", "s1s0.pos",
)

NULL = "NULL"
ROOT = "ROOT"


@dataclass(frozen=True)
class Transition:
    kind: str
    label: str | None = None

    def __post_init__(self):
        if self.kind not in (SHIFT, LEFT_ARC, RIGHT_ARC, REDUCE):
            raise IllegalTransition("unknown transition kind %r" % self.kind)
        needs_label = self.kind in (LEFT_ARC, RIGHT_ARC)
        if needs_label != (self.label is not None):
            raise IllegalTransition(
                "%s %s a label" % (self.kind, "needs" if needs_label else "forbids")
            )

    def __str__(self):
        if self.label is None:
            return self.kind
        return "%s:%s" % (self.kind, self.label)

    @classmethod
    def parse(cls, text: str) -> "Transition":
        kind, sep, label = text.partition(":")
        return cls(kind, label if sep else None)


@dataclass(frozen=True)
class Configuration:
    """Arc-eager parser state: stack, buffer, and the arcs built so far."""

    stack: tuple[int, ...]
    buffer: tuple[int, ...]
    arcs: frozenset[tuple[int, int, str]]

    @classmethod
    def initial(cls, n: int) -> "Configuration":
        return cls(stack=(0,), buffer=tuple(range(1, n + 1)), arcs=frozenset())

    def head_of(self, token_id: int) -> int | None:
        for head, dep, _ in self.arcs:
            if dep == token_id:
                return head
        return None

    def is_terminal(self) -> bool:
        return not self.buffer


def _legal(config: Configuration, kind: str) -> bool:
    if kind == SHIFT:
        return bool(config.buffer)
    top = config.stack[-1] if config.stack else None
    if kind == LEFT_ARC:
        return (
            bool(config.buffer)
            and top is not None
            and top != 0
            and config.head_of(top) is None
        )
    if kind == RIGHT_ARC:
        return bool(config.buffer) and top is not None
    if kind == REDUCE:
        return top is not None and config.head_of(top) is not None
    return False


def apply_transition(config: Configuration, transition: Transition) -> Configuration:
    """Arc-eager transition semantics; raises IllegalTransition for
    moves whose preconditions fail."""
    if not _legal(config, transition.kind):
        raise IllegalTransition(
            "%s is not legal in stack=%s buffer[0]=%s"
            % (
                transition,
                list(config.stack),
                config.buffer[0] if config.buffer else None,
            )
        )
    stack, buffer, arcs = config.stack, config.buffer, config.arcs
    if transition.kind == SHIFT:
        return Configuration(stack + (buffer[0],), buffer[1:], arcs)
    if transition.kind == LEFT_ARC:
        arc = (buffer[0], stack[-1], transition.label)
        return Configuration(stack[:-1], buffer, arcs | {arc})
    if transition.kind == RIGHT_ARC:
        arc = (stack[-1], buffer[0], transition.label)
        return Configuration(stack + (buffer[0],), buffer[1:], arcs | {arc})
    return Configuration(stack[:-1], buffer, arcs)


def is_projective(sentence: Sentence) -> bool:
    """True iff no two arcs cross when drawn above the token line."""
    spans = []
    for tok in sentence:
        lo, hi = sorted((tok.head, tok.id))
        spans.append((lo, hi))
    for i in range(len(spans)):
        a, b = spans[i]
        for j in range(i + 1, len(spans)):
            c, d = spans[j]
            if a < c < b < d or c < a < d < b:
                return False
    return True


def oracle_sequence(sentence: Sentence) -> list[Transition]:
    """Static arc-eager oracle: the transition sequence that rebuilds the
    gold tree of a projective sentence."""
    if not is_projective(sentence):
        raise NonProjectiveInput(
            "oracle needs a projective sentence: %r"
            % " ".join(t.form for t in sentence)
        )
    gold_head = {t.id: t.head for t in sentence}
    gold_label = {t.id: t.deprel for t in sentence}
    # leftmost position each token is gold-linked to (head or dependent);
    # the stack must be cleared down to it before that token arrives
    left_link: dict[int, int | None] = {}
    for tok in sentence:
        candidates = [k for k in gold_head if k < tok.id and gold_head[k] == tok.id]
        if gold_head[tok.id] < tok.id:
            candidates.append(gold_head[tok.id])
        left_link[tok.id] = min(candidates) if candidates else None
    config = Configuration.initial(len(sentence))
    out: list[Transition] = []
    while not config.is_terminal():
        top = config.stack[-1]
        front = config.buffer[0]
        link = left_link[front]
        if top != 0 and gold_head[top] == front:
            move = Transition(LEFT_ARC, gold_label[top])
        elif gold_head[front] == top:
            move = Transition(RIGHT_ARC, gold_label[front])
        elif (
            top != 0
            and config.head_of(top) is not None
            and link is not None
            and link < top
        ):
            move = Transition(REDUCE)
        else:
            move = Transition(SHIFT)
        out.append(move)
        config = apply_transition(config, move)
    gold = {(t.head, t.id, t.deprel) for t in sentence}
    if set(config.arcs) != gold:
        raise NonProjectiveInput("oracle replay failed to rebuild the gold arcs")
    return out


class _Addr:
    __slots__ = ("form", "lemma", "cpos", "pos", "feats")

    def __init__(self, form, lemma, cpos, pos, feats):
        self.form = form
        self.lemma = lemma
        self.cpos = cpos
        self.pos = pos
        self.feats = feats


_NULL_ADDR = _Addr(NULL, NULL, NULL, NULL, ())
_ROOT_ADDR = _Addr(ROOT, ROOT, ROOT, ROOT, ())


def _addr(sentence: Sentence, token_id: int | None) -> _Addr:
    if token_id is None:
        return _NULL_ADDR
    if token_id == 0:
        return _ROOT_ADDR
    tok = sentence.token_by_id(token_id)
    return _Addr(
        tok.form,
        tok.lemma or NULL,
        tok.cpostag or NULL,
        tok.postag or NULL,
        tuple(tok.feats),
    )


def extract_features(config: Configuration, sentence: Sentence) -> list[str]:
    """Instantiate the fixed template set for one configuration."""
    s0 = config.stack[-1] if config.stack else None
    s1 = config.stack[-2] if len(config.stack) > 1 else None
    b0 = config.buffer[0] if config.buffer else None
    b1 = config.buffer[1] if len(config.buffer) > 1 else None
    out: list[str] = []
    for name, tid in (("s0", s0), ("s1", s1), ("b0", b0), ("b1", b1)):
        addr = _addr(sentence, tid)
        out.append("%s.form=%s" % (name, addr.form))
        out.append("%s.lemma=%s" % (name, addr.lemma))
        out.append("%s.cpos=%s" % (name, addr.cpos))
        out.append("%s.pos=%s" % (name, addr.pos))
        for key, value in addr.feats:
            out.append("%s.feat=%s=%s" % (name, key, value))
    ldep = rdep = None
    if s0 is not None:
        for head, dep, label in config.arcs:
            if head != s0:
                continue
            if ldep is None or dep < ldep[0]:
                ldep = (dep, label)
            if rdep is None or dep > rdep[0]:
                rdep = (dep, label)
    out.append("s0.ldep=%s" % (ldep[1] if ldep else NULL))
    out.append("s0.rdep=%s" % (rdep[1] if rdep else NULL))
    a0 = _addr(sentence, s0)
    a1 = _addr(sentence, s1)
    ab0 = _addr(sentence, b0)
    ab1 = _addr(sentence, b1)
    out.append("s0b0.pos=%s|%s" % (a0.pos, ab0.pos))
    out.append("b0b1.pos=%s|%s" % (ab0.pos, ab1.pos))
    out.append("s1s0.pos=%s|%s" % (a1.pos, a0.pos))
    return out


def _transition_space(labels: tuple[str, ...]) -> list[Transition]:
    """Fixed decoding order: SHIFT, LEFT_ARCs, RIGHT_ARCs, REDUCE, with
    labels in lexicographic order.  Score ties resolve to the earliest."""
    out = [Transition(SHIFT)]
    out.extend(Transition(LEFT_ARC, label) for label in labels)
    out.extend(Transition(RIGHT_ARC, label) for label in labels)
    out.append(Transition(REDUCE))
    return out


@dataclass
class TrainReport:
    sentences: int = 0
    used: int = 0
    skipped_nonprojective: int = 0
    epochs: int = 0
    steps: int = 0
    updates: int = 0


@dataclass
class ParserModel:
    version: str
    schema_digest: str
    templates: tuple[str, ...]
    labels: tuple[str, ...]
    root_counts: dict[str, int]
    feat_index: dict[str, int]
    weights: np.ndarray  # (n features, n transitions), averaged

    def __post_init__(self):
        self._transitions = _transition_space(self.labels)

    @property
    def transitions(self) -> list[Transition]:
        return self._transitions

    def root_fallback_label(self) -> str:
        if self.root_counts:
            top = max(self.root_counts.values())
            return min(k for k, v in self.root_counts.items() if v == top)
        return self.labels[0] if self.labels else "VB"

    def weight_entries(self) -> list[tuple[str, str, float]]:
        out = []
        transitions = [str(t) for t in self._transitions]
        for feat, row in self.feat_index.items():
            for col, trans in enumerate(transitions):
                w = float(self.weights[row, col])
                if w != 0.0:
                    out.append((feat, trans, w))
        out.sort(key=lambda e: (e[0], e[1]))
        return out

    def __eq__(self, other):
        if not isinstance(other, ParserModel):
            return NotImplemented
        return (
            self.version == other.version
            and self.schema_digest == other.schema_digest
            and self.templates == other.templates
            and self.labels == other.labels
            and self.root_counts == other.root_counts
            and self.weight_entries() == other.weight_entries()
        )

    def to_text(self) -> str:
        lines = [MODEL_HEADER, self.schema_digest, "templates:"]
        lines.extend("  %s" % t for t in self.templates)
        lines.append("labels:")
        lines.extend(
            "  %s\t%d" % (label, self.root_counts.get(label, 0))
            for label in self.labels
        )
        for feat, trans, weight in self.weight_entries():
            lines.append("%s\t%s\t%s" % (feat, trans, repr(weight)))
        return "\n".join(lines) + "\n"

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "ParserModel":
        lines = text.splitlines()
        if not lines or lines[0] != MODEL_HEADER:
            raise ModelFormatError("missing %r header" % MODEL_HEADER)
        if len(lines) < 2:
            raise ModelFormatError("missing schema digest line")
        digest = lines[1]
        idx = 2
        if idx >= len(lines) or lines[idx] != "templates:":
            raise ModelFormatError("missing templates block")
        idx += 1
        templates = []
        while idx < len(lines) and lines[idx].startswith("  "):
            templates.append(lines[idx].strip())
            idx += 1
        if idx >= len(lines) or lines[idx] != "labels:":
            raise ModelFormatError("missing labels block")
        idx += 1
        labels = []
        root_counts = {}
        while idx < len(lines) and lines[idx].startswith("  "):
            name, _, count = lines[idx].strip().partition("\t")
            labels.append(name)
            if count and int(count):
                root_counts[name] = int(count)
            idx += 1
        entries = []
        for line in lines[idx:]:
            if not line:
                continue
            try:
                feat, trans, weight = line.split("\t")
            except ValueError:
                raise ModelFormatError("bad weight line %r" % line) from None
            entries.append((feat, trans, float(weight)))
        label_tuple = tuple(labels)
        transitions = [str(t) for t in _transition_space(label_tuple)]
        col = {t: i for i, t in enumerate(transitions)}
        feat_index: dict[str, int] = {}
        for feat, _, _ in entries:
            if feat not in feat_index:
                feat_index[feat] = len(feat_index)
        weights = np.zeros((max(len(feat_index), 1), len(transitions)))
        for feat, trans, weight in entries:
            if trans not in col:
                raise ModelFormatError("unknown transition %r" % trans)
            weights[feat_index[feat], col[trans]] = weight
        return cls(
            version=MODEL_HEADER,
            schema_digest=digest,
            templates=tuple(templates),
            labels=label_tuple,
            root_counts=root_counts,
            feat_index=feat_index,
            weights=weights,
        )

    @classmethod
    def load(cls, path: str) -> "ParserModel":
        with open(path, encoding="utf-8") as handle:
            return cls.from_text(handle.read())


class _FastState:
    """Mutable decoder state mirroring Configuration for the hot loops."""

    __slots__ = ("stack", "start", "buffer", "heads", "labels", "arcs")

    def __init__(self, n: int):
        self.stack = [0]
        self.buffer = list(range(1, n + 1))
        self.start = 0
        self.heads: dict[int, int] = {}
        self.labels: dict[int, str] = {}
        self.arcs: set[tuple[int, int, str]] = set()

    def front(self):
        return self.buffer[self.start] if self.start < len(self.buffer) else None

    def exhausted(self):
        return self.start >= len(self.buffer)

    def as_configuration(self) -> Configuration:
        return Configuration(
            stack=tuple(self.stack),
            buffer=tuple(self.buffer[self.start :]),
            arcs=frozenset(self.arcs),
        )

    def legal_mask(self, transitions, mask):
        top = self.stack[-1] if self.stack else None
        has_buffer = not self.exhausted()
        top_headed = top is not None and top in self.heads
        for i, t in enumerate(transitions):
            if t.kind == SHIFT:
                mask[i] = has_buffer
            elif t.kind == LEFT_ARC:
                mask[i] = has_buffer and top not in (None, 0) and not top_headed
            elif t.kind == RIGHT_ARC:
                mask[i] = has_buffer and top is not None
            else:
                mask[i] = top_headed
        return mask

    def apply(self, transition: Transition):
        if transition.kind == SHIFT:
            self.stack.append(self.buffer[self.start])
            self.start += 1
        elif transition.kind == LEFT_ARC:
            dep = self.stack.pop()
            head = self.buffer[self.start]
            self.heads[dep] = head
            self.labels[dep] = transition.label
            self.arcs.add((head, dep, transition.label))
        elif transition.kind == RIGHT_ARC:
            dep = self.buffer[self.start]
            head = self.stack[-1]
            self.heads[dep] = head
            self.labels[dep] = transition.label
            self.arcs.add((head, dep, transition.label))
            self.stack.append(dep)
            self.start += 1
        else:
            self.stack.pop()


def _feature_rows(feats, feat_index, grow):
    rows = []
    for feat in feats:
        row = feat_index.get(feat)
        if row is None:
            if not grow:
                continue
            row = len(feat_index)
            feat_index[feat] = row
        rows.append(row)
    return rows


class _Learner:
    def __init__(self, n_transitions: int):
        self.capacity = 1024
        self.n_transitions = n_transitions
        self.weights = np.zeros((self.capacity, n_transitions))
        self.totals = np.zeros((self.capacity, n_transitions))
        self.stamps = np.zeros((self.capacity, n_transitions), dtype=np.int64)
        self.scores = np.zeros(n_transitions)
        self.mask = np.zeros(n_transitions, dtype=np.uint8)

    def ensure(self, rows_needed: int):
        while rows_needed > self.capacity:
            self.capacity *= 2
        if self.weights.shape[0] < self.capacity:
            def grow(arr):
                out = np.zeros((self.capacity, self.n_transitions), dtype=arr.dtype)
                out[: arr.shape[0]] = arr
                return out

            self.weights = grow(self.weights)
            self.totals = grow(self.totals)
            self.stamps = grow(self.stamps)


def train(
    tb: Treebank,
    epochs: int,
    seed: int,
    schema: Schema | None = None,
) -> tuple[ParserModel, TrainReport]:
    """Averaged-perceptron training over static-oracle sequences.

    Non-projective sentences are skipped and counted.  Identical
    (treebank, epochs, seed) inputs produce byte-identical model files.
    """
    schema = schema or Schema()
    if not len(tb.sentences):
        raise EmptyTreebank("cannot train on an empty treebank")
    usable = []
    skipped = 0
    for sentence in tb.sentences:
        if is_projective(sentence):
            usable.append(sentence)
        else:
            skipped += 1
    if not usable:
        raise AllSentencesNonProjective(
            "all %d sentences are non-projective" % len(tb.sentences)
        )
    labels = tuple(sorted(set(schema.relation_labels)))
    transitions = _transition_space(labels)
    trans_col = {str(t): i for i, t in enumerate(transitions)}
    learner = _Learner(len(transitions))
    feat_index: dict[str, int] = {}
    oracles = [oracle_sequence(s) for s in usable]
    rng = random.Random(seed)
    report = TrainReport(
        sentences=len(tb.sentences),
        used=len(usable),
        skipped_nonprojective=skipped,
        epochs=epochs,
    )
    step = 0
    for _ in range(epochs):
        order = list(range(len(usable)))
        rng.shuffle(order)
        for sent_idx in order:
            sentence = usable[sent_idx]
            state = _FastState(len(sentence))
            for gold_move in oracles[sent_idx]:
                step += 1
                config = state.as_configuration()
                feats = extract_features(config, sentence)
                rows = _feature_rows(feats, feat_index, grow=True)
                learner.ensure(len(feat_index))
                rows_arr = np.asarray(rows, dtype=np.int64)
                _kernel.score_rows(learner.weights, rows_arr, learner.scores)
                state.legal_mask(transitions, learner.mask)
                pred_idx = _kernel.best_legal(learner.scores, learner.mask)
                gold_idx = trans_col[str(gold_move)]
                if pred_idx != gold_idx:
                    _kernel.perceptron_update(
                        learner.weights,
                        learner.totals,
                        learner.stamps,
                        rows_arr,
                        gold_idx,
                        pred_idx,
                        step,
                    )
                    report.updates += 1
                state.apply(gold_move)
    report.steps = step
    averaged = _kernel.finalize_average(
        learner.weights[: max(len(feat_index), 1)],
        learner.totals[: max(len(feat_index), 1)],
        learner.stamps[: max(len(feat_index), 1)],
        step,
    )
    root_counts: dict[str, int] = {}
    for sentence in usable:
        for tok in sentence:
            if tok.head == 0:
                root_counts[tok.deprel] = root_counts.get(tok.deprel, 0) + 1
    model = ParserModel(
        version=MODEL_HEADER,
        schema_digest=schema.digest(),
        templates=TEMPLATES,
        labels=labels,
        root_counts=root_counts,
        feat_index=dict(feat_index),
        weights=np.asarray(averaged),
    )
    return model, report


def parse_sentence(
    sentence: Sentence, model: ParserModel, schema: Schema | None = None
) -> Sentence:
    """Greedy decode; always returns a valid single-rooted tree."""
    if schema is not None and schema.digest() != model.schema_digest:
        raise SchemaMismatch(
            "model was trained against a different schema (digest mismatch)"
        )
    n = len(sentence)
    transitions = model.transitions
    state = _FastState(n)
    scores = np.zeros(len(transitions))
    mask = np.zeros(len(transitions), dtype=np.uint8)
    guard = 0
    while not state.exhausted():
        guard += 1
        if guard > 2 * n + 1:
            raise IllegalTransition("decoder exceeded the 2n transition bound")
        config = state.as_configuration()
        feats = extract_features(config, sentence)
        rows = _feature_rows(feats, model.feat_index, grow=False)
        rows_arr = np.asarray(rows, dtype=np.int64)
        _kernel.score_rows(model.weights, rows_arr, scores)
        state.legal_mask(transitions, mask)
        best = _kernel.best_legal(scores, mask)
        if best < 0:
            break
        state.apply(transitions[best])

    fallback = model.root_fallback_label()
    heads = dict(state.heads)
    labels = dict(state.labels)
    for tok in sentence:
        if tok.id not in heads:
            heads[tok.id] = 0
            labels[tok.id] = fallback

    # enforce a single non-punctuation root child
    punct = schema.is_punct if schema is not None else (
        lambda t: t.postag == "G-" or t.cpostag == "G"
    )
    root_children = [t.id for t in sentence if heads[t.id] == 0 and not punct(t)]
    for extra in root_children[1:]:
        heads[extra] = root_children[0]

    tokens = tuple(
        tok.with_(head=heads[tok.id], deprel=labels[tok.id]) for tok in sentence
    )
    return Sentence(tokens=tokens, comments=sentence.comments)


def parse_treebank_with_model(
    tb: Treebank, model: ParserModel, schema: Schema | None = None
) -> Treebank:
    return Treebank(
        tuple(parse_sentence(s, model, schema) for s in tb.sentences),
        source=tb.source,
    )
