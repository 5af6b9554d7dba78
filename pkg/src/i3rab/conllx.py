"""CoNLL-X treebank reading, writing and the core token/sentence types.

Ten tab-separated columns per token, sentences separated by one blank
line, "_" for empty fields.  Files coming straight out of published
figures are tolerated on input: "-" as the empty marker, spaces instead
of "|" inside FEATS, CRLF line endings.  Output is always canonical, so
emit(parse(emit(parse(x)))) == emit(parse(x)).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import DuplicateKey, HeadOutOfRange, IdGap, MalformedPair, MalformedRow

EMPTY = "_"
# Figure renderings of the format print "-" where files use "_".
_EMPTY_INPUT = ("_", "-", "")

_SENT_ID_RE = re.compile(r"^#\s*sent_id\s*=\s*(\S+)\s*$")


@dataclass(frozen=True)
class FeatureBag:
    """Ordered, duplicate-free sequence of (key, value) morphology pairs."""

    pairs: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        keys = [k for k, _ in self.pairs]
        if len(keys) != len(set(keys)):
            raise DuplicateKey("duplicate feature key in %r" % (self.pairs,))

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __bool__(self):
        return bool(self.pairs)

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.pairs:
            if k == key:
                return v
        return default

    def set(self, key: str, value: str) -> "FeatureBag":
        """Return a bag with key set to value, appended if new."""
        if self.get(key) is None:
            return FeatureBag(self.pairs + ((key, value),))
        return FeatureBag(
            tuple((k, value if k == key else v) for k, v in self.pairs)
        )

    def as_text(self) -> str:
        if not self.pairs:
            return EMPTY
        return "|".join("%s=%s" % (k, v) for k, v in self.pairs)


def parse_feats(text: str) -> FeatureBag:
    """Parse one FEATS column value.

    Canonical pairs are "|"-separated; space-separated pairs (the form
    printed in figures) are accepted too.
    """
    if text in _EMPTY_INPUT:
        return FeatureBag()
    if "|" in text:
        chunks = text.split("|")
    else:
        chunks = [c for c in text.split(" ") if c]
    pairs = []
    for chunk in chunks:
        if "=" not in chunk:
            raise MalformedPair("feature %r has no '='" % chunk)
        key, value = chunk.split("=", 1)
        pairs.append((key, value))
    return FeatureBag(tuple(pairs))


@dataclass(frozen=True)
class Token:
    """One CoNLL-X row."""

    id: int
    form: str
    lemma: str = ""
    cpostag: str = ""
    postag: str = ""
    feats: FeatureBag = field(default_factory=FeatureBag)
    head: int = 0
    deprel: str = ""
    phead: int | None = None
    pdeprel: str | None = None

    def __post_init__(self):
        if self.id < 1:
            raise MalformedRow("token id must be >= 1, got %d" % self.id)
        if self.head < 0:
            raise HeadOutOfRange("head must be >= 0, got %d" % self.head)
        if not self.form:
            raise MalformedRow("token %d has an empty form" % self.id)

    def with_(self, **changes) -> "Token":
        return replace(self, **changes)


@dataclass(frozen=True)
class Sentence:
    """An ordered token sequence forming one dependency tree.

    Comment lines ("# ...") preceding the sentence in the file are kept
    verbatim; a "# sent_id = N" comment is exposed as .meta.
    """

    tokens: tuple[Token, ...]
    comments: tuple[str, ...] = ()

    def __post_init__(self):
        n = len(self.tokens)
        for pos, tok in enumerate(self.tokens, start=1):
            if tok.id != pos:
                raise IdGap(
                    "token ids must be 1..%d in order; position %d has id %d"
                    % (n, pos, tok.id)
                )
            if tok.head > n:
                raise HeadOutOfRange(
                    "token %d has head %d but the sentence has %d tokens"
                    % (tok.id, tok.head, n)
                )

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, idx):
        return self.tokens[idx]

    @property
    def meta(self) -> str | None:
        for line in self.comments:
            m = _SENT_ID_RE.match(line)
            if m:
                return m.group(1)
        return None

    def token_by_id(self, tid: int) -> Token:
        return self.tokens[tid - 1]

    def dependents_of(self, head_id: int) -> list[Token]:
        return [t for t in self.tokens if t.head == head_id]

    def arcs(self) -> list[tuple[int, int, str]]:
        return [(t.head, t.id, t.deprel) for t in self.tokens]


@dataclass(frozen=True)
class Treebank:
    sentences: tuple[Sentence, ...]
    source: str | None = field(default=None, compare=False)

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, idx):
        return self.sentences[idx]

    def token_count(self) -> int:
        return sum(len(s) for s in self.sentences)


def _parse_int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise MalformedRow("non-numeric %s field: %r" % (what, text)) from None


def _parse_row(line: str) -> Token:
    cols = line.split("\t")
    # 10 canonical columns; 8 or 9 with the trailing optional columns
    # dropped; 4 means the bare mandatory quartet ID FORM HEAD DEPREL.
    if len(cols) == 4:
        cols = [cols[0], cols[1], EMPTY, EMPTY, EMPTY, EMPTY, cols[2], cols[3]]
    if len(cols) not in (8, 9, 10):
        raise MalformedRow(
            "expected 4, 8, 9 or 10 tab-separated columns, got %d in %r"
            % (len(cols), line)
        )
    cols = cols + [EMPTY] * (10 - len(cols))
    tid = _parse_int(cols[0], "ID")
    # blind files omit the dependency columns; an empty marker reads as
    # an unattached token, anything else non-numeric is still an error
    head = 0 if cols[6] in _EMPTY_INPUT else _parse_int(cols[6], "HEAD")
    phead = None if cols[8] in _EMPTY_INPUT else _parse_int(cols[8], "PHEAD")
    pdeprel = None if cols[9] in _EMPTY_INPUT else cols[9]

    def opt(value: str) -> str:
        return "" if value in _EMPTY_INPUT else value

    return Token(
        id=tid,
        form=cols[1],
        lemma=opt(cols[2]),
        cpostag=opt(cols[3]),
        postag=opt(cols[4]),
        feats=parse_feats(cols[5]),
        head=head,
        deprel=opt(cols[7]),
        phead=phead,
        pdeprel=pdeprel,
    )


def parse_treebank(document: str, source: str | None = None) -> Treebank:
    """Parse a CoNLL-X document into a Treebank."""
    document = document.replace("\r\n", "\n").replace("\r", "\n")
    sentences = []
    comments: list[str] = []
    rows: list[Token] = []

    def flush():
        nonlocal comments, rows
        if rows:
            sentences.append(Sentence(tokens=tuple(rows), comments=tuple(comments)))
        comments = []
        rows = []

    for line in document.split("\n"):
        if line == "":
            flush()
        elif line.startswith("#"):
            comments.append(line)
        else:
            rows.append(_parse_row(line))
    flush()
    return Treebank(sentences=tuple(sentences), source=source)


def emit_sentence(sentence: Sentence) -> str:
    """Render one sentence in canonical form, trailing blank line included."""
    lines = list(sentence.comments)
    for t in sentence.tokens:
        lines.append(
            "\t".join(
                (
                    str(t.id),
                    t.form,
                    t.lemma or EMPTY,
                    t.cpostag or EMPTY,
                    t.postag or EMPTY,
                    t.feats.as_text(),
                    str(t.head),
                    t.deprel or EMPTY,
                    EMPTY if t.phead is None else str(t.phead),
                    t.pdeprel or EMPTY,
                )
            )
        )
    return "\n".join(lines) + "\n\n"


def emit_treebank(tb: Treebank) -> str:
    return "".join(emit_sentence(s) for s in tb.sentences)


def read_treebank(path: str) -> Treebank:
    with open(path, encoding="utf-8") as handle:
        return parse_treebank(handle.read(), source=path)


def write_treebank(tb: Treebank, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(emit_treebank(tb))
