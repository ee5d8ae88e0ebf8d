from sceneforge.textproc import (Lexicon, ROOM, chunk_noun_phrases,
                                 filter_physical, parse, tokenize_and_split)


LEX = Lexicon.default()


def heads(text):
    return [m.head_lemma for m in parse(text, LEX).mentions]


def rels(text):
    return [(r.kind, r.subject, r.object) for r in parse(text, LEX).relations]


class TestTokenizer:
    def test_single_sentence(self):
        sents = tokenize_and_split("There is a desk.")
        assert len(sents) == 1
        assert [t.text for t in sents[0]] == ["there", "is", "a", "desk", "."]

    def test_two_sentences(self):
        assert len(tokenize_and_split("A red chair. A lamp.")) == 2

    def test_empty(self):
        assert tokenize_and_split("") == []

    def test_misspellings_kept(self):
        sents = tokenize_and_split("a dsek")
        assert [t.text for t in sents[0]] == ["a", "dsek"]

    def test_indices_contiguous(self):
        for sent in tokenize_and_split("A desk, a chair. A lamp!"):
            assert [t.index for t in sent] == list(range(len(sent)))


class TestChunker:
    def test_modifiers_and_head(self):
        sent = tokenize_and_split("a black wooden desk")[0]
        chunks = chunk_noun_phrases(sent, LEX)
        assert len(chunks) == 1
        assert chunks[0].head_term == "desk"
        assert chunks[0].modifiers == ("black", "wooden")

    def test_compound_head(self):
        chunks = chunk_noun_phrases(tokenize_and_split("a round table")[0], LEX)
        assert chunks[0].head_term == "round table"
        assert LEX.canonical_category("round table") == "RoundTable"

    def test_no_chunks(self):
        assert chunk_noun_phrases(tokenize_and_split("there is")[0], LEX) == []

    def test_numeral_count(self):
        chunks = chunk_noun_phrases(tokenize_and_split("four wood chairs")[0], LEX)
        assert chunks[0].count == 4
        assert chunks[0].modifiers == ("wood",)

    def test_no_overlaps(self):
        sent = tokenize_and_split("a red desk next to a tall green lamp and a cup")[0]
        spans = [c.span for c in chunk_noun_phrases(sent, LEX)]
        for (a1, a2), (b1, b2) in zip(spans, spans[1:]):
            assert a2 <= b1


class TestFilter:
    def test_drops_non_physical(self):
        sent = tokenize_and_split("a desk and an idea")[0]
        kept = filter_physical(chunk_noun_phrases(sent, LEX), LEX)
        assert [c.head_term for c in kept] == ["desk"]

    def test_room_words_diverted(self):
        text = "There is a white desk, a black chair, and a lamp in the corner of the room."
        parsed = parse(text, LEX)
        assert [m.head_lemma for m in parsed.mentions] == ["desk", "chair", "lamp"]
        assert [(r.kind, r.subject, r.object) for r in parsed.relations] == \
               [("in_corner", 2, ROOM)]

    def test_empty(self):
        assert filter_physical([], LEX) == []


class TestCoref:
    def test_definite_merges(self):
        parsed = parse("There is a table. The black table has a cup.", LEX)
        assert [m.head_lemma for m in parsed.mentions] == ["table", "cup"]
        assert "black" in parsed.mentions[0].attributes

    def test_indefinite_separate(self):
        assert len(parse("There is a table. There is a table.", LEX).mentions) == 2

    def test_pronoun(self):
        assert len(parse("There is a lamp. It is tall.", LEX).mentions) == 1

    def test_unresolved_pronoun_dropped(self):
        assert heads("It is nice.") == []

    def test_prefix_stability(self):
        """Adding later sentences never reassigns earlier clusters."""
        short = parse("A desk and a chair. The desk is black.", LEX)
        longer = parse("A desk and a chair. The desk is black. A lamp is near the chair.", LEX)
        short_ids = [(m.head_lemma, m.coref_id) for m in short.mentions]
        longer_ids = [(m.head_lemma, m.coref_id) for m in longer.mentions]
        assert longer_ids[:len(short_ids)] == short_ids


class TestRelations:
    def test_on(self):
        parsed = parse("There is a plate on a table.", LEX)
        plate, table = parsed.mentions
        assert rels("There is a plate on a table.") == \
               [("on", plate.coref_id, table.coref_id)]

    def test_corner(self):
        assert rels("a lamp in the corner of the room") == [("in_corner", 0, ROOM)]

    def test_no_relation(self):
        assert rels("a desk and a chair") == []

    def test_fronted_locative(self):
        parsed = parse("There in the middle is a table, on the table is a cup.", LEX)
        assert [m.head_lemma for m in parsed.mentions] == ["table", "cup"]
        table = parsed.mentions[0].coref_id
        cup = parsed.mentions[1].coref_id
        got = {(r.kind, r.subject, r.object) for r in parsed.relations}
        assert got == {("in_center", table, ROOM), ("on", cup, table)}

    def test_left_of_with_copula(self):
        parsed = parse("The lamp is to the left of the desk.", LEX)
        lamp, desk = parsed.mentions
        assert parsed.relations == parse("The lamp is to the left of the desk.", LEX).relations
        assert [(r.kind, r.subject, r.object) for r in parsed.relations] == \
               [("left_of", lamp.coref_id, desk.coref_id)]

    def test_on_top_of(self):
        assert [k for k, _, _ in rels("a cup on top of a table")] == ["on"]

    def test_endpoints_reference_clusters(self):
        parsed = parse(
            "A desk with a lamp. The lamp is on the desk. A cup is near the lamp.", LEX)
        ids = {m.coref_id for m in parsed.mentions}
        for r in parsed.relations:
            assert r.subject in ids
            assert r.object == ROOM or r.object in ids


class TestParse:
    def test_seed_sentence(self):
        parsed = parse("There is a desk and a chair.", LEX)
        assert [m.head_lemma for m in parsed.mentions] == ["desk", "chair"]
        assert parsed.relations == ()

    def test_empty(self):
        parsed = parse("", LEX)
        assert parsed.sentences == () and parsed.mentions == () and parsed.relations == ()

    def test_pure_function(self):
        text = "A red chair next to the table. It is small."
        assert parse(text, LEX) == parse(text, LEX)


class TestLexicon:
    def test_roundtrip(self, tmp_path):
        LEX.save(tmp_path / "lex.json")
        again = Lexicon.load(tmp_path / "lex.json")
        assert again.physical == LEX.physical
        assert again.compounds == LEX.compounds
        assert again.numerals == LEX.numerals

    def test_lemma(self):
        assert LEX.lemma("chairs") == "chair"
        assert LEX.lemma("dishes") == "dish"
        assert LEX.lemma("dsek") == "dsek"
