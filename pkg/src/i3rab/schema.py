"""I3rab label/tag/feature vocabularies, lexicons and tree validation.

The schema bundles everything the rest of the toolkit needs to know
about the annotation scheme: the 34 relation labels, the 20 POS tags,
the morphological feature inventory, and the lexicons of governing
particles, defective verbs, joined-pronoun suffixes, covert pronouns
and fused-word splits.  A schema can be loaded from a sectioned config
file; absent sections fall back to the defaults below.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

from .conllx import Sentence, Token
from .errors import AliasTargetMissing, DuplicateEntry, Unclassifiable, UnknownSection

DEFAULT_LABELS = (
    "ADJ", "ADVP", "AGENT", "ALTER", "COMMA", "COND", "COORD", "END",
    "EXCEPT", "GEN", "HAAL", "MA3TOUF", "NEG", "OBJ", "P", "P-ACC",
    "PART", "PRED-ADVP", "PRED-NOUN", "PRED-NP", "PRED-PP", "PRED-VP",
    "PREDX-ADVP", "PREDX-NOUN", "PREDX-NP", "PREDX-PP", "PREDX-VP",
    "PUNCT", "TAMYEEZ", "TAWKEED", "TOPIC", "TOPICX", "VB", "VBX",
)

DEFAULT_POS = (
    "VI", "VP", "VC",
    "N-", "A-", "D-",
    "C-", "P-", "I-",
    "G-", "Q-", "Y-",
    "F-", "FN", "FI",
    "S-", "SD", "SR",
    "--", "Z-",
)

DEFAULT_FEATS = {
    "Mood": ("I", "S", "J", "D"),
    "Voice": ("A", "P"),
    "Person": ("1", "2", "3"),
    "Gender": ("M", "F"),
    "Number": ("S", "D", "P"),
    "Case": ("1", "2", "4"),
    "Defin": ("I", "D", "R", "C"),
    # toolkit marker for surmised pronoun tokens
    "Covert": ("Y",),
}

# Early renderings of the scheme used SUBJ/PRED for the nominal topic
# and its prepositional predicate.
DEFAULT_ALIASES = {
    "SUBJ": "TOPIC",
    "PRED": "PRED-PP",
}

DEFAULT_KANA_SISTERS = (
    "كان", "أصبح", "أمسى", "أضحى", "ظل", "بات", "صار",
    "ليس", "مازال", "مابرح", "مافتئ", "ماانفك", "مادام",
)

DEFAULT_INNA_SISTERS = ("إن", "أن", "كأن", "لكن", "ليت", "لعل")

DEFAULT_JUSSIVE = ("لم", "لما")

DEFAULT_ACCUSATIVE = ("لن", "أن", "كي", "إذن")

VERB_POS = ("VI", "VP", "VC")
NOMINAL_POS = ("N-", "Z-", "S-", "SD", "SR", "A-")
# particles that never govern: conjunctions, interrogatives,
# interjections, punctuation (skipped when classifying sentences)
NON_GOVERNING_POS = ("C-", "FI", "I-", "G-", "--")


class SuffixRule(NamedTuple):
    """Constraints and output for one joined nominative suffix.

    A constraint of "-" matches any value; otherwise the verb must carry
    exactly that Person/Gender/Number feature for the suffix to detach.
    """

    person: str
    gender: str
    number: str
    lemma: str


DEFAULT_JOINED_SUFFIXES = {
    "ان": SuffixRule("-", "-", "D", "هما_1"),
    "ون": SuffixRule("-", "M", "P", "هم_1"),
    "ن": SuffixRule("-", "F", "P", "هن_1"),
    "نا": SuffixRule("1", "-", "P", "نحن_1"),
    "ت": SuffixRule("1", "-", "S", "أنا_1"),
    "ي": SuffixRule("2", "F", "S", "أنت_1"),
}

# the five covert personal pronouns, keyed (person, gender, number);
# "-" is a gender wildcard
DEFAULT_COVERT_PRONOUNS = {
    ("3", "M", "S"): "هو",
    ("3", "F", "S"): "هي",
    ("1", "-", "S"): "أنا",
    ("1", "-", "P"): "نحن",
    ("2", "M", "S"): "أنت",
}

DEFAULT_SPLIT_LEXICON = {
    "حسبما": ("حسب", "ما"),
    "بالسارس": ("ب", "السارس"),
    "وهواتيان": ("و", "هواتيان"),
}

DEFAULT_PUNCT_POS = ("G-",)


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Violation:
    sentence_index: int
    token_id: int | None
    code: str
    severity: Severity
    message: str

    def __str__(self):
        where = "" if self.token_id is None else " token %d" % self.token_id
        return "sentence %d%s: [%s] %s %s" % (
            self.sentence_index,
            where,
            self.severity.value,
            self.code,
            self.message,
        )


class SentenceType(enum.Enum):
    VERBAL = "verbal"
    NOMINAL = "nominal"
    NOMINAL_WITH_KANA = "nominal-with-kana"
    NOMINAL_WITH_INNA = "nominal-with-inna"


class GovernorStatus(NamedTuple):
    """Truthiness reports whether the token actually governs anything;
    .predicted carries what the governor rules expect of it."""

    actual: bool
    predicted: bool

    def __bool__(self):
        return self.actual


def lemma_base(lemma: str) -> str:
    """Strip the disambiguating _N suffix lexicon lemmas carry."""
    base, sep, tail = lemma.rpartition("_")
    if sep and tail.isdigit():
        return base
    return lemma


@dataclass(frozen=True)
class Schema:
    relation_labels: tuple[str, ...] = DEFAULT_LABELS
    pos_tags: tuple[str, ...] = DEFAULT_POS
    feature_keys: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_FEATS)
    )
    label_aliases: dict[str, str] = field(
        default_factory=lambda: dict(DEFAULT_ALIASES)
    )
    kana_sisters: tuple[str, ...] = DEFAULT_KANA_SISTERS
    inna_sisters: tuple[str, ...] = DEFAULT_INNA_SISTERS
    jussive_particles: tuple[str, ...] = DEFAULT_JUSSIVE
    accusative_particles: tuple[str, ...] = DEFAULT_ACCUSATIVE
    joined_nominative_suffixes: dict[str, SuffixRule] = field(
        default_factory=lambda: dict(DEFAULT_JOINED_SUFFIXES)
    )
    covert_pronouns: dict[tuple[str, str, str], str] = field(
        default_factory=lambda: dict(DEFAULT_COVERT_PRONOUNS)
    )
    split_lexicon: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_SPLIT_LEXICON)
    )
    punctuation_pos: tuple[str, ...] = DEFAULT_PUNCT_POS

    @cached_property
    def label_set(self) -> frozenset[str]:
        return frozenset(self.relation_labels)

    @cached_property
    def pos_set(self) -> frozenset[str]:
        return frozenset(self.pos_tags)

    def resolve_label(self, label: str) -> str:
        return self.label_aliases.get(label, label)

    def knows_label(self, label: str) -> bool:
        return self.resolve_label(label) in self.label_set

    def is_punct(self, token: Token) -> bool:
        return token.postag in self.punctuation_pos or token.cpostag == "G"

    def is_verb(self, token: Token) -> bool:
        return token.postag in VERB_POS

    def is_kana(self, token: Token) -> bool:
        return lemma_base(token.lemma) in self.kana_sisters

    def is_strong_verb(self, token: Token) -> bool:
        return self.is_verb(token) and not self.is_kana(token)

    def is_nominal(self, token: Token) -> bool:
        return token.postag in NOMINAL_POS

    def covert_pronoun_for(self, person, gender, number) -> str | None:
        hit = self.covert_pronouns.get((person, gender, number))
        if hit is None:
            # "-" entries are gender wildcards, matching absent gender too
            hit = self.covert_pronouns.get((person, "-", number))
        return hit

    def digest(self) -> str:
        parts = [
            ";".join(self.relation_labels),
            ";".join(self.pos_tags),
            ";".join(
                "%s=%s" % (k, ",".join(v))
                for k, v in sorted(self.feature_keys.items())
            ),
            ";".join("%s>%s" % kv for kv in sorted(self.label_aliases.items())),
            ";".join(self.kana_sisters),
            ";".join(self.inna_sisters),
            ";".join(self.jussive_particles),
            ";".join(self.accusative_particles),
            ";".join(
                "%s>%s,%s,%s,%s" % ((k,) + tuple(v))
                for k, v in sorted(self.joined_nominative_suffixes.items())
            ),
            ";".join(
                "%s,%s,%s>%s" % (k + (v,))
                for k, v in sorted(self.covert_pronouns.items())
            ),
            ";".join(
                "%s>%s" % (k, "+".join(v))
                for k, v in sorted(self.split_lexicon.items())
            ),
            ";".join(self.punctuation_pos),
        ]
        return hashlib.sha256("\n".join(parts).encode("utf-8")).hexdigest()


_SECTIONS = (
    "labels",
    "label_aliases",
    "pos",
    "feats",
    "kana_sisters",
    "inna_sisters",
    "jussive",
    "accusative_particles",
    "joined_nominative_suffixes",
    "covert_pronouns",
    "split_lexicon",
    "punctuation_pos",
)


def load_schema(config: str = "") -> Schema:
    """Build a Schema from sectioned config text; empty text gives the
    defaults."""
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for raw in config.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in _SECTIONS:
                raise UnknownSection("unknown config section [%s]" % current)
            sections.setdefault(current, [])
            continue
        if current is None:
            raise UnknownSection("entry %r appears before any section" % line)
        sections[current].append(line)

    def listed(name: str, default: tuple[str, ...]) -> tuple[str, ...]:
        if name not in sections:
            return default
        out: list[str] = []
        for entry in sections[name]:
            if entry in out:
                raise DuplicateEntry("[%s] lists %r twice" % (name, entry))
            out.append(entry)
        return tuple(out)

    def arrow_map(name: str) -> dict[str, str]:
        out: dict[str, str] = {}
        for entry in sections[name]:
            if "->" not in entry:
                raise DuplicateEntry("[%s] line %r is not 'FROM -> TO'" % (name, entry))
            key, value = (part.strip() for part in entry.split("->", 1))
            if key in out:
                raise DuplicateEntry("[%s] maps %r twice" % (name, key))
            out[key] = value
        return out

    labels = listed("labels", DEFAULT_LABELS)
    pos = listed("pos", DEFAULT_POS)

    feats = dict(DEFAULT_FEATS)
    if "feats" in sections:
        feats = {}
        for entry in sections["feats"]:
            if "=" not in entry:
                raise DuplicateEntry("[feats] line %r is not 'Key = v1,v2'" % entry)
            key, values = (part.strip() for part in entry.split("=", 1))
            if key in feats:
                raise DuplicateEntry("[feats] defines %r twice" % key)
            feats[key] = tuple(v.strip() for v in values.split(","))

    aliases = dict(DEFAULT_ALIASES)
    if "label_aliases" in sections:
        aliases = arrow_map("label_aliases")

    suffixes = dict(DEFAULT_JOINED_SUFFIXES)
    if "joined_nominative_suffixes" in sections:
        suffixes = {}
        for key, value in arrow_map("joined_nominative_suffixes").items():
            fields = tuple(part.strip() for part in value.split(","))
            if len(fields) != 4:
                raise DuplicateEntry(
                    "[joined_nominative_suffixes] %r needs person,gender,number,form"
                    % key
                )
            suffixes[key] = SuffixRule(*fields)

    covert = dict(DEFAULT_COVERT_PRONOUNS)
    if "covert_pronouns" in sections:
        covert = {}
        for key, value in arrow_map("covert_pronouns").items():
            fields = tuple(part.strip() for part in key.split(","))
            if len(fields) != 3:
                raise DuplicateEntry(
                    "[covert_pronouns] key %r needs person,gender,number" % key
                )
            covert[fields] = value

    splits = dict(DEFAULT_SPLIT_LEXICON)
    if "split_lexicon" in sections:
        splits = {
            key: tuple(part.strip() for part in value.split("+"))
            for key, value in arrow_map("split_lexicon").items()
        }

    label_set = set(labels)
    for source, target in aliases.items():
        if target not in label_set:
            raise AliasTargetMissing(
                "alias %s -> %s targets a label outside [labels]" % (source, target)
            )

    return Schema(
        relation_labels=labels,
        pos_tags=pos,
        feature_keys=feats,
        label_aliases=aliases,
        kana_sisters=listed("kana_sisters", DEFAULT_KANA_SISTERS),
        inna_sisters=listed("inna_sisters", DEFAULT_INNA_SISTERS),
        jussive_particles=listed("jussive", DEFAULT_JUSSIVE),
        accusative_particles=listed("accusative_particles", DEFAULT_ACCUSATIVE),
        joined_nominative_suffixes=suffixes,
        covert_pronouns=covert,
        split_lexicon=splits,
        punctuation_pos=listed("punctuation_pos", DEFAULT_PUNCT_POS),
    )


def load_schema_file(path: str) -> Schema:
    with open(path, encoding="utf-8") as handle:
        return load_schema(handle.read())


DEFAULT_SCHEMA = Schema()


def validate_sentence(
    sentence: Sentence, schema: Schema, sentence_index: int = 0
) -> list[Violation]:
    """Check one sentence against the governance constraints.

    Returns every violation found; an empty list means the tree is valid.
    """
    found: list[Violation] = []
    n = len(sentence)

    def add(code, severity, message, token_id=None):
        found.append(Violation(sentence_index, token_id, code, severity, message))

    for tok in sentence:
        if not schema.knows_label(tok.deprel):
            add(
                "UNKNOWN_LABEL",
                Severity.ERROR,
                "relation %r is not in the schema" % tok.deprel,
                tok.id,
            )
        if tok.postag not in schema.pos_set:
            add(
                "UNKNOWN_POS",
                Severity.ERROR,
                "POS tag %r is not in the schema" % tok.postag,
                tok.id,
            )
        if tok.head == tok.id or tok.head > n or tok.head < 0:
            add(
                "HEAD_SELF_OR_RANGE",
                Severity.ERROR,
                "head %d is not a valid governor for token %d" % (tok.head, tok.id),
                tok.id,
            )
        if tok.feats.get("Covert") == "Y" and tok.cpostag != "S":
            add(
                "COVERT_NOT_PRONOUN",
                Severity.ERROR,
                "covert-marked token must be a pronoun (cpostag S)",
                tok.id,
            )

    # cycle detection: a valid head chain reaches 0 within n steps
    for tok in sentence:
        if tok.head == tok.id:
            continue  # already flagged as HEAD_SELF_OR_RANGE
        seen = set()
        current = tok.id
        while current != 0:
            if current in seen:
                add(
                    "CYCLE",
                    Severity.ERROR,
                    "head chain from token %d never reaches the root" % tok.id,
                    tok.id,
                )
                break
            seen.add(current)
            nxt = sentence.token_by_id(current).head
            if nxt == current or nxt > n or nxt < 0:
                break
            current = nxt

    root_words = [t for t in sentence if t.head == 0 and not schema.is_punct(t)]
    root_punct = [t for t in sentence if t.head == 0 and schema.is_punct(t)]
    if len(root_words) > 1:
        add(
            "MULTI_ROOT",
            Severity.ERROR,
            "tokens %s all attach to the root"
            % ",".join(str(t.id) for t in root_words),
        )
    if len(root_punct) > 1:
        add(
            "ROOT_PUNCT_EXTRA",
            Severity.WARNING,
            "more than one punctuation token attaches to the root (%s)"
            % ",".join(str(t.id) for t in root_punct),
        )

    for tok in sentence:
        if schema.is_strong_verb(tok):
            agents = [
                d
                for d in sentence.dependents_of(tok.id)
                if schema.resolve_label(d.deprel) == "AGENT"
            ]
            if not agents:
                add(
                    "VERB_WITHOUT_AGENT",
                    Severity.WARNING,
                    "strong verb %r has no AGENT dependent" % tok.form,
                    tok.id,
                )

    return found


def validate_treebank(tb, schema: Schema) -> list[Violation]:
    out: list[Violation] = []
    for idx, sentence in enumerate(tb.sentences, start=1):
        out.extend(validate_sentence(sentence, schema, sentence_index=idx))
    return out


def _descendants(sentence: Sentence, head_id: int) -> set[int]:
    ids = {head_id}
    changed = True
    while changed:
        changed = False
        for tok in sentence:
            if tok.head in ids and tok.id not in ids:
                ids.add(tok.id)
                changed = True
    return ids


def classify_sentence(sentence: Sentence, schema: Schema) -> SentenceType:
    """Decide the sentence type from its first governing content word.

    Non-governing particles are skipped; so is a leading prepositional
    or adverbial phrase when a verb follows it (such sentences stay
    verbal).
    """
    if not len(sentence):
        raise Unclassifiable("empty sentence")
    has_verb = any(schema.is_verb(t) for t in sentence)
    skipped: set[int] = set()
    for tok in sentence:
        if tok.id in skipped:
            continue
        if tok.postag in NON_GOVERNING_POS:
            continue
        if tok.postag in ("P-", "D-"):
            if has_verb:
                skipped |= _descendants(sentence, tok.id)
                continue
            return SentenceType.NOMINAL
        if tok.postag in ("F-", "FN"):
            base = lemma_base(tok.lemma) or tok.form
            governs_verb = base in schema.jussive_particles or (
                base in schema.accusative_particles
            )
            if governs_verb:
                follower = _next_content(sentence, tok.id, schema, skipped)
                if follower is not None and schema.is_verb(follower):
                    return SentenceType.VERBAL
            if base in schema.inna_sisters:
                return SentenceType.NOMINAL_WITH_INNA
            continue
        if schema.is_verb(tok):
            if schema.is_kana(tok):
                return SentenceType.NOMINAL_WITH_KANA
            return SentenceType.VERBAL
        if schema.is_nominal(tok):
            base = lemma_base(tok.lemma) or tok.form
            if base in schema.inna_sisters:
                return SentenceType.NOMINAL_WITH_INNA
            return SentenceType.NOMINAL
    raise Unclassifiable("no content word found")


def _next_content(sentence, after_id, schema, skipped):
    for tok in sentence:
        if tok.id <= after_id or tok.id in skipped:
            continue
        if tok.postag in NON_GOVERNING_POS:
            continue
        return tok
    return None


def classify_governor(token: Token, sentence: Sentence, schema: Schema) -> GovernorStatus:
    """Report whether a token governs anything, with the rule-based
    expectation attached."""
    actual = any(t.head == token.id for t in sentence)
    if schema.is_verb(token):
        predicted = True
    elif token.postag == "P-":
        predicted = True
    elif token.postag in ("F-", "FN"):
        base = lemma_base(token.lemma) or token.form
        predicted = (
            base in schema.jussive_particles
            or base in schema.accusative_particles
            or base in schema.inna_sisters
        )
    elif token.postag in NON_GOVERNING_POS:
        predicted = False
    else:
        # nouns govern only when they actually head something
        predicted = actual
    return GovernorStatus(actual=actual, predicted=predicted)
