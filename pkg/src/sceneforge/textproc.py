"""Rule-based text analysis: tokenizing, chunking, coreference, spatial relations.

A lexicon of physical-object nouns drives mention detection.  Part-of-speech
assignment uses closed-class word lists plus the lexicon's adjective and
numeral tables; out-of-lexicon words default to noun, so unseen (including
misspelled) object words still chunk.
"""

import re
from dataclasses import dataclass, replace

ROOM = "room"

RELATION_KINDS = frozenset({
    "on", "under", "left_of", "right_of", "in_front_of", "behind",
    "next_to", "near", "in_corner", "in_center", "inside",
})

# Fixed surface phrase table; longest patterns are matched first.
RELATION_PHRASES = [
    (("on", "top", "of"), "on"),
    (("to", "the", "left", "of"), "left_of"),
    (("to", "the", "right", "of"), "right_of"),
    (("in", "front", "of"), "in_front_of"),
    (("in", "the", "corner"), "in_corner"),
    (("in", "the", "middle"), "in_center"),
    (("in", "the", "center"), "in_center"),
    (("next", "to"), "next_to"),
    (("behind",), "behind"),
    (("under",), "under"),
    (("near",), "near"),
    (("inside",), "inside"),
    (("on",), "on"),
]

ROOM_RELATION_KINDS = frozenset({"in_corner", "in_center"})

DETERMINERS = frozenset({
    "a", "an", "the", "this", "that", "these", "those", "some", "any",
    "my", "your", "his", "her", "its", "our", "their", "another", "each",
})
PRONOUNS = frozenset({"it", "this", "that"})
COPULAS = frozenset({
    "is", "are", "was", "were", "be", "been", "sits", "sit", "stands",
    "stand", "lies", "lie", "rests", "rest", "placed", "sitting", "standing",
})
CLOSED_WORDS = frozenset({
    "there", "here", "and", "or", "but", "with", "of", "to", "in", "on",
    "at", "by", "for", "from", "as", "has", "have", "had", "also", "too",
    "very", "not", "no", "all", "both", "which", "you", "i", "we", "they",
    "he", "she", "them", "its", "beside", "against", "next", "front",
    "behind", "under", "over", "above", "below", "near", "inside",
}) | COPULAS

# Heads naming parts of the room: diverted to relation context, never mentions.
ROOM_CONTEXT_WORDS = frozenset({
    "room", "corner", "corners", "wall", "walls", "middle", "center",
    "centre", "floor", "ceiling", "side", "sides", "left", "right", "back",
    "top", "bottom", "edge",
})

DEFAULT_NUMERALS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
}

DEFAULT_ADJECTIVES = frozenset({
    "red", "blue", "green", "black", "white", "brown", "gray", "grey",
    "yellow", "purple", "orange", "pink", "wood", "wooden", "metal",
    "plastic", "glass", "leather", "small", "large", "big", "little",
    "tiny", "huge", "round", "square", "tall", "short", "long", "new",
    "old", "modern", "comfy", "nice",
})

DEFAULT_PHYSICAL = frozenset({
    "desk", "chair", "table", "lamp", "sofa", "couch", "settee", "bed",
    "vase", "laptop", "computer", "monitor", "screen", "plate", "dish",
    "cup", "mug", "bookcase", "bookshelf", "plant", "fern", "clock",
    "rug", "carpet", "mat", "bowl", "keyboard", "mouse", "notepad",
    "bench", "stool", "cabinet", "cupboard", "mirror", "shelf", "door",
    "window", "book", "fruit", "flower", "television", "tv", "newspaper",
    "painting", "pillow", "basket",
})

DEFAULT_COMPOUNDS = {
    "round table": "RoundTable",
    "coffee table": "CoffeeTable",
    "table lamp": "TableLamp",
}


@dataclass(frozen=True)
class Lexicon:
    """Vocabulary tables: physical-object nouns, adjectives, compound heads, numerals."""

    physical: frozenset[str]
    adjectives: frozenset[str]
    compounds: dict[str, str]
    numerals: dict[str, int]

    @classmethod
    def default(cls):
        return cls(DEFAULT_PHYSICAL, DEFAULT_ADJECTIVES,
                   dict(DEFAULT_COMPOUNDS), dict(DEFAULT_NUMERALS))

    @classmethod
    def from_categories(cls, categories, synonyms=None, extra_nouns=(),
                        extra_adjectives=(), compounds=None):
        """Build a lexicon covering a model database's category vocabulary."""
        physical = set(categories) | set(extra_nouns)
        for words in (synonyms or {}).values():
            physical.update(words)
        return cls(
            physical=frozenset(w.lower() for w in physical),
            adjectives=frozenset(w.lower() for w in
                                 set(extra_adjectives) | DEFAULT_ADJECTIVES),
            compounds=dict(compounds or {}),
            numerals=dict(DEFAULT_NUMERALS),
        )

    def to_json(self):
        return {
            "physical": sorted(self.physical),
            "adjectives": sorted(self.adjectives),
            "compounds": dict(sorted(self.compounds.items())),
            "numerals": dict(sorted(self.numerals.items())),
        }

    def save(self, path):
        from .corpus import write_json
        write_json(path, self.to_json())

    @classmethod
    def load(cls, path):
        from .corpus import read_json
        obj = read_json(path)
        return cls(
            physical=frozenset(obj.get("physical", [])),
            adjectives=frozenset(obj.get("adjectives", [])),
            compounds=dict(obj.get("compounds", {})),
            numerals={k: int(v) for k, v in obj.get("numerals", DEFAULT_NUMERALS).items()},
        )

    def canonical_category(self, head: str) -> str:
        """Apply the compound table; other heads pass through unchanged."""
        return self.compounds.get(head, head)

    def lemma(self, word: str) -> str:
        """Crude singularization against the physical table; misspellings pass through."""
        if word in self.physical:
            return word
        if word.endswith("es") and word[:-2] in self.physical:
            return word[:-2]
        if word.endswith("s") and word[:-1] in self.physical:
            return word[:-1]
        return word


@dataclass(frozen=True)
class Token:
    text: str
    index: int            # position within the sentence
    sentence_index: int


@dataclass(frozen=True)
class NounChunk:
    """A contiguous noun-phrase span with its head and modifier words."""

    tokens: tuple[Token, ...]
    head_index: int                  # index into tokens
    modifiers: tuple[str, ...] = ()
    head_term: str = ""              # compound string when matched, else head text
    count: int = 1

    @property
    def sentence_index(self):
        return self.tokens[0].sentence_index

    @property
    def span(self):
        return (self.tokens[0].index, self.tokens[-1].index + 1)

    def texts(self):
        return [t.text for t in self.tokens]


@dataclass
class Mention:
    """A candidate object reference, later merged into coreference clusters."""

    mention_id: int
    head_lemma: str
    attributes: tuple[str, ...]
    chunk: NounChunk | None
    coref_id: int = -1
    count: int = 1
    is_pronoun: bool = False
    sentence_index: int = 0
    start: int = 0  # token index within sentence, for ordering


@dataclass(frozen=True)
class SpatialRelation:
    """kind(subject, object); object may be the room sentinel."""

    kind: str
    subject: int
    object: int | str

    def __post_init__(self):
        if self.kind not in RELATION_KINDS:
            raise ValueError(f"unknown relation kind {self.kind!r}")

    def to_json(self):
        return {"kind": self.kind, "subj": self.subject, "obj": self.object}

    @classmethod
    def from_json(cls, obj):
        return cls(kind=obj["kind"], subject=int(obj["subj"]),
                   object=obj["obj"] if obj["obj"] == ROOM else int(obj["obj"]))


@dataclass(frozen=True)
class ParsedUtterance:
    """Full parse: sentence tokens, one mention per coreference cluster, relations."""

    sentences: tuple[tuple[Token, ...], ...]
    mentions: tuple[Mention, ...]
    relations: tuple[SpatialRelation, ...]

    @property
    def tokens(self):
        return tuple(t for sent in self.sentences for t in sent)

    def sentence_texts(self):
        return [[t.text for t in sent] for sent in self.sentences]


_TOKEN_RE = re.compile(r"[a-z0-9]+(?:'[a-z]+)?|[.!?,;:]")
_SENTENCE_END = frozenset({".", "!", "?"})


def tokenize_and_split(text) -> list[list[Token]]:
    """Lowercase, split off punctuation, and break into sentences."""
    pieces = _TOKEN_RE.findall(text.lower())
    sentences: list[list[Token]] = []
    current: list[Token] = []
    for piece in pieces:
        current.append(Token(piece, len(current), len(sentences)))
        if piece in _SENTENCE_END:
            sentences.append(current)
            current = []
    if current:
        sentences.append(current)
    return sentences


# POS tags used by the chunker.
_DET, _NUM, _ADJ, _NOUN, _OTHER = "DET", "NUM", "ADJ", "NOUN", "OTHER"


def _tag(text: str, lexicon: Lexicon) -> str:
    if text in DETERMINERS:
        return _DET
    if text in lexicon.numerals or (text.isdigit() and 0 < int(text) <= 10):
        return _NUM
    if text in lexicon.adjectives:
        return _ADJ
    if text in CLOSED_WORDS or text in PRONOUNS:
        return _OTHER
    if any(c.isalnum() for c in text):
        return _NOUN  # out-of-lexicon default, keeps misspellings chunkable
    return _OTHER


def _numeral_value(text: str, lexicon: Lexicon) -> int:
    if text in lexicon.numerals:
        return lexicon.numerals[text]
    return int(text)


def chunk_noun_phrases(sentence, lexicon=None) -> list[NounChunk]:
    """Maximal (determiner? (numeral|adjective|noun)* noun) spans.

    The head is the final noun, unless the span's tail matches a compound
    from the lexicon table, in which case the compound string is the head
    term. Modifiers collect the remaining adjectives and nouns.
    """
    lexicon = lexicon or Lexicon.default()
    tags = [_tag(t.text, lexicon) for t in sentence]
    chunks = []
    i = 0
    n = len(sentence)
    while i < n:
        tag = tags[i]
        starts = tag in (_NUM, _ADJ, _NOUN) or (
            tag == _DET
            and sentence[i].text not in PRONOUNS
            or (sentence[i].text in ("this", "that")
                and i + 1 < n and tags[i + 1] in (_NUM, _ADJ, _NOUN))
        )
        if not starts:
            i += 1
            continue
        j = i + 1 if tag == _DET else i
        k = j
        while k < n and tags[k] in (_NUM, _ADJ, _NOUN):
            k += 1
        # trim trailing non-nouns so the span ends at its head noun
        last_noun = -1
        for m in range(j, k):
            if tags[m] == _NOUN:
                last_noun = m
        if last_noun < 0:
            i = max(k, i + 1)
            continue
        span = sentence[i:last_noun + 1]
        head_rel = last_noun - i
        head_term = span[head_rel].text
        for width in (3, 2):
            if head_rel - width + 1 >= 0:
                candidate = " ".join(t.text for t in span[head_rel - width + 1:head_rel + 1])
                if candidate in lexicon.compounds:
                    head_term = candidate
                    break
        compound_words = set(head_term.split())
        modifiers = []
        count = 1
        for m in range(i, last_noun + 1):
            text = sentence[m].text
            if tags[m] == _NUM:
                count = _numeral_value(text, lexicon)
            elif tags[m] in (_ADJ, _NOUN) and m != last_noun and text not in compound_words:
                modifiers.append(text)
        chunks.append(NounChunk(
            tokens=tuple(span),
            head_index=head_rel,
            modifiers=tuple(modifiers),
            head_term=head_term,
            count=count,
        ))
        i = last_noun + 1
    return chunks


def filter_physical(chunks, lexicon) -> list[NounChunk]:
    """Keep chunks whose head names a physical object.

    Room-part heads (corner, wall, middle, ...) are dropped here; the
    relation extractor reads them straight off the token stream instead.
    """
    kept = []
    for chunk in chunks:
        head = lexicon.lemma(chunk.head_term)
        if head in ROOM_CONTEXT_WORDS:
            continue
        if head in lexicon.physical or " " in chunk.head_term:
            kept.append(replace(chunk, head_term=head))
    return kept


def _collect_mentions(sentences, lexicon) -> list[Mention]:
    mentions = []
    for sent in sentences:
        chunks = filter_physical(chunk_noun_phrases(sent, lexicon), lexicon)
        chunk_positions = set()
        for c in chunks:
            chunk_positions.update(range(*c.span))
        items = [(c.span[0], c) for c in chunks]
        for tok in sent:
            if tok.text in PRONOUNS and tok.index not in chunk_positions:
                items.append((tok.index, tok))
        for start, item in sorted(items, key=lambda p: p[0]):
            if isinstance(item, NounChunk):
                mentions.append(Mention(
                    mention_id=len(mentions),
                    head_lemma=item.head_term,
                    attributes=item.modifiers,
                    chunk=item,
                    count=item.count,
                    sentence_index=item.sentence_index,
                    start=start,
                ))
            else:
                mentions.append(Mention(
                    mention_id=len(mentions),
                    head_lemma=item.text,
                    attributes=(),
                    chunk=None,
                    is_pronoun=True,
                    sentence_index=item.sentence_index,
                    start=start,
                ))
    return mentions


def resolve_coreference(mentions) -> list[Mention]:
    """Assign coref_id greedily in document order.

    Definite mentions ("the X") merge with the most recent prior mention of
    the same head; pronouns merge with the most recent mention of any head.
    Unresolvable pronouns are dropped.
    """
    resolved = []
    next_cluster = 0
    for m in mentions:
        if m.is_pronoun:
            if resolved:
                m.coref_id = resolved[-1].coref_id
                resolved.append(m)
            continue
        definite = m.chunk is not None and m.chunk.tokens[0].text == "the"
        target = None
        if definite:
            for prior in reversed(resolved):
                if prior.head_lemma == m.head_lemma:
                    target = prior.coref_id
                    break
        if target is None:
            target = next_cluster
            next_cluster += 1
        m.coref_id = target
        resolved.append(m)
    return resolved


def _merge_clusters(mentions) -> list[Mention]:
    """One representative mention per cluster, attributes merged in order."""
    by_cluster: dict[int, Mention] = {}
    order = []
    for m in mentions:
        if m.coref_id not in by_cluster:
            if m.is_pronoun:
                continue
            by_cluster[m.coref_id] = Mention(
                mention_id=m.mention_id,
                head_lemma=m.head_lemma,
                attributes=tuple(m.attributes),
                chunk=m.chunk,
                coref_id=m.coref_id,
                count=m.count,
                sentence_index=m.sentence_index,
                start=m.start,
            )
            order.append(m.coref_id)
        else:
            rep = by_cluster[m.coref_id]
            extra = tuple(a for a in m.attributes if a not in rep.attributes)
            rep.attributes = rep.attributes + extra
            rep.count = max(rep.count, m.count)
    return [by_cluster[cid] for cid in order]


_SUBJECT_GAP_OK = COPULAS
_ROOM_TAIL_OK = COPULAS | {"of", "the", ROOM}


def extract_relations(sentence, cluster_spans) -> list[SpatialRelation]:
    """Match the relation phrase table against one sentence.

    cluster_spans: list of (start, end, coref_id) for mention chunks in this
    sentence, sorted by start. Handles both "<chunk> <phrase> <chunk>" and
    the fronted "<phrase> <chunk> <copula> <chunk>" word order.
    """
    texts = [t.text for t in sentence]
    in_chunk = {}
    for start, end, cid in cluster_spans:
        for i in range(start, end):
            in_chunk[i] = cid

    def chunk_before(pos):
        best = None
        for start, end, cid in cluster_spans:
            if end <= pos:
                best = (start, end, cid)
        return best

    def chunk_after(pos):
        for start, end, cid in cluster_spans:
            if start >= pos:
                return (start, end, cid)
        return None

    def gap_ok(lo, hi, allowed):
        return all(texts[i] in allowed for i in range(lo, hi))

    relations = []
    i = 0
    n = len(texts)
    while i < n:
        if i in in_chunk:
            i += 1
            continue
        match = None
        for phrase, kind in RELATION_PHRASES:
            if tuple(texts[i:i + len(phrase)]) == phrase:
                match = (phrase, kind)
                break
        if match is None:
            i += 1
            continue
        phrase, kind = match
        end = i + len(phrase)
        prev = chunk_before(i)
        prev_adjacent = prev is not None and gap_ok(prev[1], i, _SUBJECT_GAP_OK)
        if kind in ROOM_RELATION_KINDS:
            subject = None
            if prev_adjacent:
                subject = prev[2]
            else:
                nxt = chunk_after(end)
                if nxt is not None and gap_ok(end, nxt[0], _ROOM_TAIL_OK):
                    subject = nxt[2]
            if subject is not None:
                relations.append(SpatialRelation(kind, subject, ROOM))
        else:
            first = chunk_after(end)
            if first is not None and first[0] == end:
                if prev_adjacent:
                    if prev[2] != first[2]:
                        relations.append(SpatialRelation(kind, prev[2], first[2]))
                else:
                    # fronted locative: "on the table is a cup"
                    second = chunk_after(first[1])
                    if (second is not None
                            and gap_ok(first[1], second[0], _SUBJECT_GAP_OK)
                            and second[0] > first[1]
                            and second[2] != first[2]):
                        relations.append(SpatialRelation(kind, second[2], first[2]))
        i = end
    return relations


def parse(text, lexicon=None) -> ParsedUtterance:
    """Tokenize, chunk, filter, resolve coreference, and extract relations."""
    lexicon = lexicon or Lexicon.default()
    sentences = tokenize_and_split(text)
    mentions = resolve_coreference(_collect_mentions(sentences, lexicon))

    spans_by_sentence: dict[int, list] = {}
    for m in mentions:
        if m.chunk is not None:
            start, end = m.chunk.span
            spans_by_sentence.setdefault(m.sentence_index, []).append(
                (start, end, m.coref_id))
    relations = []
    seen = set()
    for si, sent in enumerate(sentences):
        spans = sorted(spans_by_sentence.get(si, []))
        for rel in extract_relations(sent, spans):
            key = (rel.kind, rel.subject, rel.object)
            if key not in seen:
                seen.add(key)
                relations.append(rel)

    merged = _merge_clusters(mentions)
    cluster_ids = {m.coref_id for m in merged}
    relations = [r for r in relations
                 if r.subject in cluster_ids
                 and (r.object == ROOM or r.object in cluster_ids)]
    return ParsedUtterance(
        sentences=tuple(tuple(s) for s in sentences),
        mentions=tuple(merged),
        relations=tuple(relations),
    )
