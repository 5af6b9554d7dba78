"""Attachment scores, treebank statistics, cross-validation and the
paired t-test.

The t-distribution tail probability is computed here from the
regularized incomplete beta function (continued fraction evaluation),
keeping the package free of heavyweight statistics dependencies; the
test suite pins its values against an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .conllx import Sentence, Treebank
from .errors import (
    KTooLarge,
    LengthMismatch,
    TokenMismatch,
    ZeroBase,
    ZeroVariance,
)
from .schema import Schema

_FINAL_DOT_FORMS = (".", "؟", "!", "?")


@dataclass(frozen=True)
class EvalOptions:
    exclude_punct: bool = False
    exclude_root_dot_distance: bool = False


@dataclass(frozen=True)
class EvalReport:
    uas: float
    las: float
    token_count: int
    correct_head: int
    correct_head_and_label: int

    def as_text(self) -> str:
        return "UAS %.2f / LAS %.2f (%d/%d heads, %d/%d labeled)\n" % (
            self.uas,
            self.las,
            self.correct_head,
            self.token_count,
            self.correct_head_and_label,
            self.token_count,
        )

    def as_machine(self) -> str:
        return (
            "uas\t%s\nlas\t%s\ntokens\t%d\ncorrect_head\t%d\ncorrect_labeled\t%d\n"
            % (
                format_score(self.uas),
                format_score(self.las),
                self.token_count,
                self.correct_head,
                self.correct_head_and_label,
            )
        )


def format_score(value: float) -> str:
    return "%.2f" % value


def attachment_scores(
    gold: Sentence | Treebank,
    pred: Sentence | Treebank,
    opts: EvalOptions = EvalOptions(),
    schema: Schema | None = None,
) -> EvalReport:
    """UAS/LAS between gold and predicted annotation of the same text."""
    schema = schema or Schema()
    gold_sents = gold.sentences if isinstance(gold, Treebank) else (gold,)
    pred_sents = pred.sentences if isinstance(pred, Treebank) else (pred,)
    if len(gold_sents) != len(pred_sents):
        raise TokenMismatch(
            "gold has %d sentences, prediction has %d"
            % (len(gold_sents), len(pred_sents))
        )
    total = 0
    correct_head = 0
    correct_both = 0
    for g_sent, p_sent in zip(gold_sents, pred_sents):
        if len(g_sent) != len(p_sent):
            raise TokenMismatch(
                "token count differs: %d vs %d" % (len(g_sent), len(p_sent))
            )
        for g_tok, p_tok in zip(g_sent, p_sent):
            if g_tok.form != p_tok.form or g_tok.id != p_tok.id:
                raise TokenMismatch(
                    "token %d differs between gold and prediction" % g_tok.id
                )
            if opts.exclude_punct and schema.is_punct(g_tok):
                continue
            total += 1
            if g_tok.head == p_tok.head:
                correct_head += 1
                if g_tok.deprel == p_tok.deprel:
                    correct_both += 1
    if total == 0:
        return EvalReport(0.0, 0.0, 0, 0, 0)
    return EvalReport(
        uas=100.0 * correct_head / total,
        las=100.0 * correct_both / total,
        token_count=total,
        correct_head=correct_head,
        correct_head_and_label=correct_both,
    )


@dataclass(frozen=True)
class DirectionStats:
    """Arc direction tallies.

    A non-root arc points RIGHT when the head precedes the dependent.
    Root arcs carry no direction of their own; following the published
    accounting they sit in the right-hand remainder, so
    left + right == total.
    """

    total: int
    left: int

    @property
    def right(self) -> int:
        return self.total - self.left

    @property
    def left_pct(self) -> float:
        return 100.0 * self.left / self.total if self.total else 0.0

    @property
    def right_pct(self) -> float:
        return 100.0 * self.right / self.total if self.total else 0.0

    @classmethod
    def from_counts(cls, left: int, total: int) -> "DirectionStats":
        return cls(total=total, left=left)

    def as_text(self) -> str:
        return (
            "dependency relations  %d\n"
            "LEFT direction        %d (%.2f%%)\n"
            "RIGHT direction       %d (%.2f%%)\n"
            % (self.total, self.left, self.left_pct, self.right, self.right_pct)
        )

    def as_machine(self) -> str:
        return "arcs\t%d\nleft\t%d\nright\t%d\nleft_pct\t%.2f\nright_pct\t%.2f\n" % (
            self.total,
            self.left,
            self.right,
            self.left_pct,
            self.right_pct,
        )


def direction_stats(
    tb: Treebank,
    opts: EvalOptions = EvalOptions(),
    schema: Schema | None = None,
) -> DirectionStats:
    schema = schema or Schema()
    total = 0
    left = 0
    for sentence in tb.sentences:
        for tok in sentence:
            if opts.exclude_punct and schema.is_punct(tok):
                continue
            total += 1
            if tok.head != 0 and tok.head > tok.id:
                left += 1
    return DirectionStats(total=total, left=left)


@dataclass(frozen=True)
class DistanceHistogram:
    counts: dict[int, int] = field(default_factory=dict)

    def total(self) -> int:
        return sum(self.counts.values())

    def share(self, distance: int) -> float:
        total = self.total()
        return 100.0 * self.counts.get(distance, 0) / total if total else 0.0

    def as_rows(self) -> list[tuple[int, int]]:
        return sorted(self.counts.items())


def arc_distance(head: int, dependent: int) -> int:
    """Number of tokens strictly between head and dependent; the root
    counts as position 0."""
    return abs(head - dependent) - 1


def distance_histogram(
    tb: Treebank,
    opts: EvalOptions = EvalOptions(),
    schema: Schema | None = None,
) -> tuple[DistanceHistogram, DistanceHistogram]:
    """Distance distributions for root arcs and for all other arcs."""
    schema = schema or Schema()
    root: dict[int, int] = {}
    other: dict[int, int] = {}
    for sentence in tb.sentences:
        for tok in sentence:
            d = arc_distance(tok.head, tok.id)
            if tok.head == 0:
                if (
                    opts.exclude_root_dot_distance
                    and schema.is_punct(tok)
                    and tok.form in _FINAL_DOT_FORMS
                ):
                    continue
                root[d] = root.get(d, 0) + 1
            else:
                other[d] = other.get(d, 0) + 1
    return DistanceHistogram(root), DistanceHistogram(other)


CARDINALITY_CLASSES = (
    ("rare", 0.0, 1.0),
    ("low", 1.0, 5.0),
    ("medium", 5.0, 10.0),
    ("high", 10.0, 30.0),
    ("very-high", 30.0, 100.0),
)


def cardinality_class(share_pct: float) -> str:
    for name, lo, hi in CARDINALITY_CLASSES:
        if lo <= share_pct < hi:
            return name
    return "very-high"


def cardinality_classes(
    tb: Treebank,
    opts: EvalOptions = EvalOptions(),
    schema: Schema | None = None,
) -> dict[str, str]:
    """Map each relation label to its share class over the treebank."""
    schema = schema or Schema()
    counts: dict[str, int] = {}
    total = 0
    for sentence in tb.sentences:
        for tok in sentence:
            if opts.exclude_punct and schema.is_punct(tok):
                continue
            counts[tok.deprel] = counts.get(tok.deprel, 0) + 1
            total += 1
    if total == 0:
        return {}
    return {
        label: cardinality_class(100.0 * count / total)
        for label, count in counts.items()
    }


def label_shares(
    tb: Treebank,
    opts: EvalOptions = EvalOptions(),
    schema: Schema | None = None,
) -> dict[str, float]:
    schema = schema or Schema()
    counts: dict[str, int] = {}
    total = 0
    for sentence in tb.sentences:
        for tok in sentence:
            if opts.exclude_punct and schema.is_punct(tok):
                continue
            counts[tok.deprel] = counts.get(tok.deprel, 0) + 1
            total += 1
    return {
        label: 100.0 * count / total for label, count in sorted(counts.items())
    }


def kfold_split(tb: Treebank, k: int) -> list[tuple[Treebank, Treebank]]:
    """Contiguous-block folds in file order; fold sizes differ by at
    most one and every sentence lands in exactly one test fold."""
    n = len(tb.sentences)
    if k < 1 or k > n:
        raise KTooLarge("cannot split %d sentences into %d folds" % (n, k))
    base = n // k
    extra = n % k
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        stop = start + size
        test = tb.sentences[start:stop]
        train = tb.sentences[:start] + tb.sentences[stop:]
        folds.append(
            (
                Treebank(train, source=tb.source),
                Treebank(test, source=tb.source),
            )
        )
        start = stop
    return folds


@dataclass(frozen=True)
class FoldScores:
    folds: tuple[tuple[float, float], ...]

    @property
    def uas_values(self) -> tuple[float, ...]:
        return tuple(u for u, _ in self.folds)

    @property
    def las_values(self) -> tuple[float, ...]:
        return tuple(l for _, l in self.folds)

    @property
    def avg_uas(self) -> float:
        return sum(self.uas_values) / len(self.folds)

    @property
    def avg_las(self) -> float:
        return sum(self.las_values) / len(self.folds)

    def as_text(self) -> str:
        lines = ["fold\tuas\tlas"]
        for i, (uas, las) in enumerate(self.folds, start=1):
            lines.append("%d\t%.2f\t%.2f" % (i, uas, las))
        lines.append("avg\t%.2f\t%.2f" % (self.avg_uas, self.avg_las))
        return "\n".join(lines) + "\n"


def cross_validate(
    tb: Treebank,
    k: int,
    epochs: int,
    seed: int,
    opts: EvalOptions = EvalOptions(),
    schema: Schema | None = None,
) -> FoldScores:
    from .parser import parse_treebank_with_model, train

    schema = schema or Schema()
    scores = []
    for train_tb, test_tb in kfold_split(tb, k):
        model, _ = train(train_tb, epochs=epochs, seed=seed, schema=schema)
        predicted = parse_treebank_with_model(test_tb, model, schema)
        report = attachment_scores(test_tb, predicted, opts, schema)
        scores.append((report.uas, report.las))
    return FoldScores(folds=tuple(scores))


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified
    Lentz method)."""
    max_iter = 300
    eps = 1e-14
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    return h


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: int) -> float:
    """Two-sided tail probability of Student's t distribution."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    x = df / (df + t * t)
    return betainc(df / 2.0, 0.5, x)


def paired_t_test(a: list[float], b: list[float]) -> tuple[float, float]:
    """Paired two-sided t-test; returns (t statistic, p value)."""
    if len(a) != len(b):
        raise LengthMismatch("paired samples differ in length: %d vs %d" % (len(a), len(b)))
    n = len(a)
    if n < 2:
        raise LengthMismatch("need at least two pairs")
    diffs = [x - y for x, y in zip(a, b)]
    mean = sum(diffs) / n
    ss = sum((d - mean) ** 2 for d in diffs)
    if ss == 0.0:
        raise ZeroVariance("all paired differences are identical")
    sd = math.sqrt(ss / (n - 1))
    t = mean / (sd / math.sqrt(n))
    p = t_sf_two_sided(t, n - 1)
    return t, p


def improvement_pct(base_scores: list[float], new_scores: list[float]) -> float:
    """Percentage improvement of the mean of new over the mean of base."""
    if not base_scores or len(base_scores) != len(new_scores):
        raise LengthMismatch(
            "score vectors must be non-empty and equal length: %d vs %d"
            % (len(base_scores), len(new_scores))
        )
    base_mean = sum(base_scores) / len(base_scores)
    new_mean = sum(new_scores) / len(new_scores)
    if base_mean == 0.0:
        raise ZeroBase("baseline mean is zero")
    return 100.0 * (new_mean - base_mean) / base_mean
