"""Rule-driven conversion of PADT-style trees into I3rab trees.

The pipeline per sentence is: fix-list merges/deletes/splits, fused-word
splits from the schema lexicon, joined-pronoun detachment, covert-pronoun
insertion (that order keeps suffix detection off fused forms), then head
restructuring driven by the sentence type.  Sentences the rules cannot
restructure are passed through unmodified and counted; the override file
is the channel for expert corrections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .conllx import FeatureBag, Sentence, Token, Treebank
from .errors import (
    InvalidOverride,
    NoCovertMapping,
    OverrideIndexOutOfRange,
    RestructureFailure,
    Unclassifiable,
)
from .schema import (
    Schema,
    SentenceType,
    Severity,
    classify_sentence,
    lemma_base,
    validate_sentence,
)

# context-sensitive map entries: @attr picks GEN or ADJ from the
# dependent's POS, @adv picks GEN under a preposition and ADVP for
# true adverbs
ATTR_BY_POS = "@attr"
ADV_BY_CONTEXT = "@adv"

DEFAULT_LABEL_MAP = {
    "Pred": "VB",
    "Pnom": "PRED-NOUN",
    "Sb": "AGENT",
    "Obj": "OBJ",
    "Atr": ATTR_BY_POS,
    "Adv": ADV_BY_CONTEXT,
    "AuxP": "P",
    "AuxC": "P",
    "AuxY": "P",
    "AuxM": "NEG",
    "Coord": "COORD",
    "AuxG": "PUNCT",
    "AuxK": "END",
    "AuxX": "COMMA",
}

# labels that mark nominal attributes rather than predicates when the
# restructurer looks for the predicate of a topic
_ATTRIBUTE_LABELS = {"GEN", "ADJ", "AGENT", "OBJ", "TAWKEED", "TAMYEEZ", "ALTER"}

# POS tags for generated split parts whose form is a known particle
_PARTICLE_POS = {
    "ب": ("P", "P-"),
    "ل": ("P", "P-"),
    "ك": ("P", "P-"),
    "و": ("C", "C-"),
    "ف": ("C", "C-"),
    "س": ("F", "F-"),
    "أ": ("F", "FI"),
}

_FINAL_PUNCT_FORMS = (".", "؟", "!", "?")


@dataclass(frozen=True)
class FixRule:
    """One entry of the manual fix list, matched on the surface form."""

    match: str
    action: str  # "split" | "merge" | "delete"
    parts: tuple[str, ...] = ()

    def __post_init__(self):
        if self.action not in ("split", "merge", "delete"):
            raise ValueError("unknown fix action %r" % self.action)
        if self.action == "split" and len(self.parts) < 2:
            raise ValueError("split fix for %r needs at least two parts" % self.match)


@dataclass(frozen=True)
class ConversionRules:
    schema: Schema
    label_map: dict[str, str] = field(
        default_factory=lambda: dict(DEFAULT_LABEL_MAP)
    )
    fix_list: tuple[FixRule, ...] = ()
    insert_covert: bool = True
    detach_joined: bool = True


@dataclass
class ConversionReport:
    """Token accounting for one conversion run.

    Counter semantics are token deltas, so the identity
    output_tokens - input_tokens ==
        dropped_pronoun + joined_pronoun + separated - merged - deleted
    holds for every run without overrides.
    """

    dropped_pronoun: int = 0
    joined_pronoun: int = 0
    separated: int = 0
    merged: int = 0
    deleted: int = 0
    overridden_sentences: int = 0
    nonprojective_outputs: int = 0
    passthrough: int = 0

    def merge_with(self, other: "ConversionReport") -> "ConversionReport":
        return ConversionReport(
            *(
                getattr(self, f) + getattr(other, f)
                for f in (
                    "dropped_pronoun",
                    "joined_pronoun",
                    "separated",
                    "merged",
                    "deleted",
                    "overridden_sentences",
                    "nonprojective_outputs",
                    "passthrough",
                )
            )
        )

    def generated_total(self) -> int:
        return (
            self.dropped_pronoun
            + self.joined_pronoun
            + self.separated
            - self.merged
            - self.deleted
        )

    def as_text(self) -> str:
        rows = [
            ("dropped_pronoun", self.dropped_pronoun),
            ("joined_pronoun", self.joined_pronoun),
            ("separated", self.separated),
            ("merged", self.merged),
            ("deleted", self.deleted),
            ("overridden_sentences", self.overridden_sentences),
            ("nonprojective_outputs", self.nonprojective_outputs),
            ("passthrough", self.passthrough),
        ]
        return "".join("%s\t%d\n" % row for row in rows)


def default_rules(schema: Schema | None = None) -> ConversionRules:
    return ConversionRules(schema=schema or Schema())


_RULES_SECTIONS = ("label_map", "fix_list", "options")


def load_rules(config: str, schema: Schema | None = None) -> ConversionRules:
    """Build ConversionRules from sectioned config text.

    Sections: [label_map] "FROM -> TO" (TO may be @attr or @adv),
    [fix_list] "form -> split p1 + p2" | "form -> merge" | "form -> delete",
    [options] "insert_covert = true|false", "detach_joined = true|false".
    Absent sections keep the defaults.
    """
    from .errors import UnknownSection

    schema = schema or Schema()
    sections: dict[str, list[str]] = {}
    current = None
    for raw in config.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip()
            if current not in _RULES_SECTIONS:
                raise UnknownSection("unknown rules section [%s]" % current)
            sections.setdefault(current, [])
            continue
        if current is None:
            raise UnknownSection("entry %r appears before any section" % line)
        sections[current].append(line)

    label_map = dict(DEFAULT_LABEL_MAP)
    if "label_map" in sections:
        label_map = {}
        for entry in sections["label_map"]:
            source, _, target = entry.partition("->")
            label_map[source.strip()] = target.strip()

    fixes: list[FixRule] = []
    for entry in sections.get("fix_list", ()):
        match, _, action_text = entry.partition("->")
        match = match.strip()
        action_text = action_text.strip()
        if action_text == "merge":
            fixes.append(FixRule(match, "merge"))
        elif action_text == "delete":
            fixes.append(FixRule(match, "delete"))
        elif action_text.startswith("split"):
            parts = tuple(
                p.strip() for p in action_text[len("split"):].split("+") if p.strip()
            )
            fixes.append(FixRule(match, "split", parts))
        else:
            raise UnknownSection(
                "fix action must be merge, delete or split: %r" % entry
            )

    insert_covert = True
    detach_joined = True
    for entry in sections.get("options", ()):
        key, _, value = entry.partition("=")
        key = key.strip()
        flag = value.strip().lower() in ("true", "1", "yes")
        if key == "insert_covert":
            insert_covert = flag
        elif key == "detach_joined":
            detach_joined = flag
        else:
            raise UnknownSection("unknown option %r" % key)

    return ConversionRules(
        schema=schema,
        label_map=label_map,
        fix_list=tuple(fixes),
        insert_covert=insert_covert,
        detach_joined=detach_joined,
    )


def detach_joined_pronoun(
    token: Token, schema: Schema
) -> tuple[Token, Token] | None:
    """Split a verb carrying a joined nominative suffix into verb + pronoun.

    The verb keeps its id and lemma, loses the suffix and becomes
    singular; the new pronoun token carries the verb's original
    person/gender/number and nominative case.  Suffix rules only fire
    when the verb's features agree with them, which keeps feminine
    markers like the final taa of a perfect verb attached.
    """
    if token.postag not in ("VI", "VP", "VC"):
        return None
    suffixes = sorted(
        schema.joined_nominative_suffixes.items(),
        key=lambda kv: (-len(kv[0]), kv[0]),
    )
    feats = token.feats
    for suffix, rule in suffixes:
        if not token.form.endswith(suffix):
            continue
        if len(token.form) - len(suffix) < 2:
            continue
        constraints = (
            (rule.person, feats.get("Person")),
            (rule.gender, feats.get("Gender")),
            (rule.number, feats.get("Number")),
        )
        if any(want != "-" and want != have for want, have in constraints):
            continue
        verb = token.with_(
            form=token.form[: -len(suffix)],
            feats=feats.set("Number", "S"),
        )
        pron_pairs = []
        for key in ("Person", "Gender", "Number"):
            value = feats.get(key)
            if value is not None:
                pron_pairs.append((key, value))
        pron_pairs.append(("Case", "1"))
        pronoun = Token(
            id=token.id + 1,
            form=suffix,
            lemma=rule.lemma,
            cpostag="S",
            postag="S-",
            feats=FeatureBag(tuple(pron_pairs)),
            head=token.id,
            deprel="AGENT",
        )
        return verb, pronoun
    return None


def _is_overt_agent(candidate: Token, schema: Schema, label_map=None) -> bool:
    if not schema.is_nominal(candidate):
        return False
    if candidate.feats.get("Case") == "1":
        return True
    mapped = (label_map or {}).get(candidate.deprel, candidate.deprel)
    return schema.resolve_label(mapped) == "AGENT"


def surmise_covert_pronoun(
    verb: Token, sentence: Sentence, schema: Schema, label_map=None
) -> Token | None:
    """Build the covert agent pronoun for a verb with no overt agent.

    Returns None when the token right after the verb already is a
    nominative noun or pronoun (or maps to AGENT).  Raises
    NoCovertMapping when the verb's person/gender/number fall outside
    the five-pronoun table.
    """
    if not schema.is_strong_verb(verb):
        return None
    if verb.id < len(sentence):
        follower = sentence.token_by_id(verb.id + 1)
        if _is_overt_agent(follower, schema, label_map):
            return None
    person = verb.feats.get("Person")
    gender = verb.feats.get("Gender")
    number = verb.feats.get("Number")
    base = schema.covert_pronoun_for(person, gender, number)
    if base is None:
        raise NoCovertMapping(
            "no covert pronoun for verb %r with Person=%s Gender=%s Number=%s"
            % (verb.form, person, gender, number)
        )
    pairs = [(k, v) for k, v in (("Person", person), ("Gender", gender), ("Number", number)) if v]
    pairs.append(("Case", "1"))
    pairs.append(("Covert", "Y"))
    return Token(
        id=verb.id + 1,
        form="*" + base,
        lemma=base,
        cpostag="S",
        postag="S-",
        feats=FeatureBag(tuple(pairs)),
        head=verb.id,
        deprel="AGENT",
    )


def split_fused_word(token: Token, schema: Schema) -> list[Token]:
    """Expand a fused form into its configured parts, or return [token]."""
    parts = schema.split_lexicon.get(token.form)
    if not parts:
        return [token]
    out = []
    last = len(parts) - 1
    for i, form in enumerate(parts):
        if i == last:
            out.append(token.with_(form=form))
        else:
            cpostag, postag = _PARTICLE_POS.get(form, ("N", "N-"))
            out.append(
                Token(
                    id=token.id,
                    form=form,
                    lemma=form,
                    cpostag=cpostag,
                    postag=postag,
                    feats=FeatureBag(),
                    head=token.head,
                    deprel=token.deprel,
                )
            )
    return out


class _Item:
    """Mutable working row during retokenization.

    head_ref is ("old", id) for heads expressed in input ids and
    ("item", other) once a head points at a generated row.
    """

    __slots__ = ("token", "old_id", "head_ref", "deprel", "new_id")

    def __init__(self, token, old_id, head_ref, deprel):
        self.token = token
        self.old_id = old_id
        self.head_ref = head_ref
        self.deprel = deprel
        self.new_id = 0


def _subsequent_part_label(previous: Token) -> str:
    if previous.postag == "P-":
        return "GEN"
    if previous.postag == "C-":
        return "MA3TOUF"
    return "GEN"


def retokenize_sentence(
    sentence: Sentence, rules: ConversionRules
) -> tuple[Sentence, ConversionReport]:
    """Apply fix-list edits, splits, pronoun detachment and covert
    insertion, then renumber ids and remap heads."""
    schema = rules.schema
    report = ConversionReport()
    items = [
        _Item(tok, tok.id, ("old", tok.head), tok.deprel) for tok in sentence
    ]

    def redirect_old_heads(from_id: int, to_ref) -> None:
        for item in items:
            if item.head_ref == ("old", from_id):
                item.head_ref = to_ref

    # manual fix list first: merges and deletions happen on input forms
    for rule in rules.fix_list:
        idx = 0
        while idx < len(items):
            item = items[idx]
            if item.old_id is None or item.token.form != rule.match:
                idx += 1
                continue
            if rule.action == "delete":
                items.pop(idx)
                redirect_old_heads(item.old_id, item.head_ref)
                report.deleted += 1
                continue
            if rule.action == "merge":
                if idx + 1 >= len(items):
                    idx += 1
                    continue
                absorber = items[idx + 1]
                absorber.token = absorber.token.with_(
                    form=item.token.form + absorber.token.form
                )
                items.pop(idx)
                redirect_old_heads(item.old_id, ("old", absorber.old_id))
                report.merged += 1
                continue
            if rule.action == "split":
                pieces = split_fused_word(
                    item.token.with_(form=rule.match),
                    Schema(split_lexicon={rule.match: rule.parts}),
                )
                _splice_split(items, idx, item, pieces)
                report.separated += len(pieces) - 1
                idx += len(pieces)
                continue
            idx += 1

    # lexicon-driven fused-word splits
    idx = 0
    while idx < len(items):
        item = items[idx]
        if item.old_id is None:
            idx += 1
            continue
        pieces = split_fused_word(item.token, schema)
        if len(pieces) == 1:
            idx += 1
            continue
        _splice_split(items, idx, item, pieces)
        report.separated += len(pieces) - 1
        idx += len(pieces)

    # joined nominative pronouns come off their verbs
    if rules.detach_joined:
        idx = 0
        while idx < len(items):
            item = items[idx]
            detached = (
                detach_joined_pronoun(item.token, schema)
                if item.old_id is not None
                else None
            )
            if detached is None:
                idx += 1
                continue
            verb, pronoun = detached
            item.token = verb
            pron_item = _Item(pronoun, None, ("item", item), "AGENT")
            items.insert(idx + 1, pron_item)
            report.joined_pronoun += 1
            idx += 2

    # surmise covert agents for verbs still lacking one
    if rules.insert_covert:
        idx = 0
        while idx < len(items):
            item = items[idx]
            token = item.token
            if not schema.is_strong_verb(token):
                idx += 1
                continue
            follower = items[idx + 1].token if idx + 1 < len(items) else None
            if follower is not None and _is_overt_agent(
                follower, schema, rules.label_map
            ):
                idx += 1
                continue
            person = token.feats.get("Person")
            gender = token.feats.get("Gender")
            number = token.feats.get("Number")
            base = schema.covert_pronoun_for(person, gender, number)
            if base is None:
                raise NoCovertMapping(
                    "no covert pronoun for verb %r with Person=%s Gender=%s Number=%s"
                    % (token.form, person, gender, number)
                )
            pairs = [
                (k, v)
                for k, v in (("Person", person), ("Gender", gender), ("Number", number))
                if v
            ]
            pairs.append(("Case", "1"))
            pairs.append(("Covert", "Y"))
            covert = Token(
                id=1,
                form="*" + base,
                lemma=base,
                cpostag="S",
                postag="S-",
                feats=FeatureBag(tuple(pairs)),
                head=0,
                deprel="AGENT",
            )
            items.insert(idx + 1, _Item(covert, None, ("item", item), "AGENT"))
            report.dropped_pronoun += 1
            idx += 2

    # renumber and resolve heads
    old_to_new = {}
    for position, item in enumerate(items, start=1):
        item.new_id = position
        if item.old_id is not None:
            old_to_new[item.old_id] = position
    tokens = []
    for item in items:
        kind, ref = item.head_ref
        if kind == "old":
            head = 0 if ref == 0 else old_to_new[ref]
        else:
            head = ref.new_id
        tokens.append(item.token.with_(id=item.new_id, head=head, deprel=item.deprel))
    return Sentence(tokens=tuple(tokens), comments=sentence.comments), report


def _splice_split(items, idx, item, pieces):
    """Replace one working row with the split parts.

    The first part always takes over the original token's link to its
    head; later parts chain below the part before them.  Tokens that
    pointed at the original re-attach to the content part: the last one
    when the split leads with a particle, the first one otherwise.
    """
    new_items = [_Item(pieces[0], None, item.head_ref, item.deprel)]
    for j in range(1, len(pieces)):
        new_items.append(
            _Item(
                pieces[j],
                None,
                ("item", new_items[j - 1]),
                _subsequent_part_label(pieces[j - 1]),
            )
        )
    owner = -1 if pieces[0].postag in ("P-", "C-", "F-", "FI") else 0
    new_items[owner].old_id = item.old_id
    items[idx : idx + 1] = new_items


def _mapped_label(token: Token, sentence: Sentence, rules: ConversionRules) -> str:
    schema = rules.schema
    target = rules.label_map.get(token.deprel)
    if target is None:
        return schema.resolve_label(token.deprel)
    if target == ATTR_BY_POS:
        return "ADJ" if token.cpostag == "A" else "GEN"
    if target == ADV_BY_CONTEXT:
        if 1 <= token.head <= len(sentence):
            head = sentence.token_by_id(token.head)
            if head.postag == "P-":
                return "GEN"
        return "ADVP" if token.postag == "D-" else "GEN"
    return target


def _pred_suffix(predicate: Token, sentence: Sentence, schema: Schema) -> str:
    if schema.is_verb(predicate):
        return "VP"
    if predicate.postag == "P-":
        return "PP"
    if predicate.postag == "D-":
        return "ADVP"
    for dep in sentence.dependents_of(predicate.id):
        if schema.is_verb(dep) or schema.resolve_label(dep.deprel) in (
            "TOPIC",
            "PRED-NOUN",
        ):
            return "NP"
    return "NOUN"


def _first_nominal_topic(tokens, sentence, schema, start_after=0):
    """First noun/pronoun token after a position that is not buried
    inside a prepositional or adverbial phrase."""
    for tok in tokens:
        if tok.id <= start_after:
            continue
        if not schema.is_nominal(tok):
            continue
        inside_pp = False
        current = tok
        seen = set()
        while current.head != 0 and current.head not in seen:
            seen.add(current.id)
            parent = sentence.token_by_id(current.head)
            if parent.postag in ("P-", "D-"):
                inside_pp = True
                break
            current = parent
        if not inside_pp:
            return tok
    return None


def _find_predicate(sentence, schema, topic, anchors):
    for tok in sentence:
        if tok.id <= topic.id or tok is topic:
            continue
        if schema.is_punct(tok):
            continue
        if tok.head not in anchors:
            continue
        if schema.resolve_label(tok.deprel) in _ATTRIBUTE_LABELS:
            continue
        return tok
    return None


def restructure_heads(sentence: Sentence, rules: ConversionRules) -> Sentence:
    """Map labels and rebuild the top of the tree per the sentence type."""
    schema = rules.schema
    mapped = [
        tok.with_(deprel=_mapped_label(tok, sentence, rules)) for tok in sentence
    ]
    work = Sentence(tokens=tuple(mapped), comments=sentence.comments)
    stype = classify_sentence(work, schema)
    updates: dict[int, tuple[int, str]] = {}

    if stype is SentenceType.NOMINAL:
        topic = _first_nominal_topic(work, work, schema)
        if topic is None:
            raise RestructureFailure("nominal sentence with no topic candidate")
        updates[topic.id] = (0, "TOPIC")
        predicate = _find_predicate(work, schema, topic, {0, topic.id})
        if predicate is not None:
            updates[predicate.id] = (
                topic.id,
                "PRED-" + _pred_suffix(predicate, work, schema),
            )
    elif stype in (SentenceType.NOMINAL_WITH_INNA, SentenceType.NOMINAL_WITH_KANA):
        if stype is SentenceType.NOMINAL_WITH_INNA:
            abolisher = next(
                (
                    t
                    for t in work
                    if lemma_base(t.lemma) in schema.inna_sisters
                    or t.form in schema.inna_sisters
                ),
                None,
            )
            root_label = "P-ACC"
        else:
            abolisher = next((t for t in work if schema.is_kana(t)), None)
            root_label = "VBX"
        if abolisher is None:
            raise RestructureFailure("abolisher token not found")
        updates[abolisher.id] = (0, root_label)
        topic = _first_nominal_topic(work, work, schema, start_after=abolisher.id)
        if topic is None:
            raise RestructureFailure("abolished sentence with no topic")
        updates[topic.id] = (abolisher.id, "TOPICX")
        predicate = _find_predicate(
            work, schema, topic, {0, abolisher.id, topic.id}
        )
        if predicate is None:
            raise RestructureFailure("abolished sentence with no predicate")
        updates[predicate.id] = (
            abolisher.id,
            "PREDX-" + _pred_suffix(predicate, work, schema),
        )
    else:  # verbal
        particle = None
        verb = None
        for tok in work:
            if tok.postag in ("F-", "FN"):
                base = lemma_base(tok.lemma) or tok.form
                if (
                    base in schema.jussive_particles
                    or base in schema.accusative_particles
                ):
                    particle = tok
                    continue
            if schema.is_verb(tok):
                verb = tok
                break
        if verb is None:
            raise RestructureFailure("verbal sentence with no verb")
        if particle is not None and particle.id < verb.id:
            base = lemma_base(particle.lemma) or particle.form
            label = "P-ACC" if base in schema.accusative_particles else "NEG"
            # the particle takes the verb's former head, unless the verb
            # already hangs under the particle (idempotent re-run)
            particle_head = (
                particle.head if verb.head == particle.id else verb.head
            )
            updates[particle.id] = (particle_head, label)
            updates[verb.id] = (particle.id, "VB")
        elif verb.head == 0:
            updates[verb.id] = (0, "VB")

    tokens = []
    for tok in work:
        if tok.id in updates:
            head, label = updates[tok.id]
            tok = tok.with_(head=head, deprel=label)
        tokens.append(tok)

    # footnote convention: the closing dot hangs off the root
    last = tokens[-1]
    if schema.is_punct(last) and last.form in _FINAL_PUNCT_FORMS:
        tokens[-1] = last.with_(head=0, deprel="END")

    out = Sentence(tokens=tuple(tokens), comments=sentence.comments)
    errors = [
        v for v in validate_sentence(out, schema) if v.severity is Severity.ERROR
    ]
    if errors:
        raise RestructureFailure(
            "restructured sentence fails validation: %s"
            % "; ".join(str(v) for v in errors)
        )
    return out


def convert_sentence(
    sentence: Sentence, rules: ConversionRules
) -> tuple[Sentence, ConversionReport, bool]:
    """Convert one sentence; the flag reports whether rules applied
    cleanly (False means the input was passed through)."""
    try:
        retokenized, report = retokenize_sentence(sentence, rules)
        restructured = restructure_heads(retokenized, rules)
    except (NoCovertMapping, RestructureFailure, Unclassifiable):
        return sentence, ConversionReport(passthrough=1), False
    return restructured, report, True


def _override_table(overrides: Treebank, size: int, schema: Schema):
    table: dict[int, Sentence] = {}
    for sent in overrides:
        if sent.meta is None or not sent.meta.isdigit():
            raise InvalidOverride(
                "override sentences need a '# sent_id = N' comment"
            )
        index = int(sent.meta)
        if not 1 <= index <= size:
            raise OverrideIndexOutOfRange(
                "override sent_id %d outside 1..%d" % (index, size)
            )
        errors = [
            v
            for v in validate_sentence(sent, schema, sentence_index=index)
            if v.severity is Severity.ERROR
        ]
        if errors:
            raise InvalidOverride(
                "override for sentence %d is invalid: %s"
                % (index, "; ".join(str(v) for v in errors))
            )
        table[index] = sent
    return table


def convert_treebank(
    tb: Treebank,
    rules: ConversionRules,
    overrides: Treebank | None = None,
) -> tuple[Treebank, ConversionReport]:
    from .parser import is_projective

    table = (
        _override_table(overrides, len(tb.sentences), rules.schema)
        if overrides is not None
        else {}
    )
    report = ConversionReport()
    out = []
    for index, sentence in enumerate(tb.sentences, start=1):
        if index in table:
            out.append(table[index])
            report.overridden_sentences += 1
        else:
            converted, sent_report, _ = convert_sentence(sentence, rules)
            out.append(converted)
            report = report.merge_with(sent_report)
    for sentence in out:
        if not is_projective(sentence):
            report.nonprojective_outputs += 1
    return Treebank(tuple(out), source=tb.source), report
