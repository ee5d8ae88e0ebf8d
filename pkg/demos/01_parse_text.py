"""Rule-based text analysis, step by step.

Walks a few room descriptions through tokenization, noun-phrase chunking,
physical-object filtering, coreference, and spatial-relation extraction.
"""

from sceneforge.textproc import (Lexicon, chunk_noun_phrases, filter_physical,
                                 parse, tokenize_and_split)

lexicon = Lexicon.default()

TEXTS = [
    "There is a desk and a chair.",
    "There is a plate on a table.",
    "There is a white desk, a black chair, and a lamp in the corner of the room.",
    "There in the middle is a table, on the table is a cup.",
    "A round table and four wood chairs. There is a vase on it.",
]

for text in TEXTS:
    print("=" * 72)
    print(text)
    sentences = tokenize_and_split(text)
    print(f"  {len(sentences)} sentence(s):")
    for sent in sentences:
        print("   tokens:", [t.text for t in sent])
        chunks = chunk_noun_phrases(sent, lexicon)
        for c in chunks:
            print(f"   chunk: {' '.join(c.texts())!r} head={c.head_term!r} "
                  f"modifiers={list(c.modifiers)} count={c.count}")
        kept = filter_physical(chunks, lexicon)
        dropped = len(chunks) - len(kept)
        if dropped:
            print(f"   ({dropped} non-physical/room chunk(s) diverted)")

    parsed = parse(text, lexicon)
    print("  after coreference:")
    for m in parsed.mentions:
        print(f"   object: {m.head_lemma!r} attributes={list(m.attributes)} "
              f"count={m.count} cluster={m.coref_id}")
    for r in parsed.relations:
        print(f"   relation: {r.kind}({r.subject}, {r.object})")
    if not parsed.relations:
        print("   relation: (none)")
