"""The four template-building conditions side by side.

Reuses the trained weights from a synthetic corpus and shows what each
condition produces for the same input text: random draws, learned top-4
(note the duplicated categories and fixed size), the rule-based parse, and
the combination, which keeps the rule skeleton but re-scores categories
(threshold 0.5) and models (0.75 mention / 0.25 utterance mix).
"""

from sceneforge.corpus import build_discrimination_set, split_corpus
from sceneforge.features import vectorize_groups
from sceneforge.grounding import build_template
from sceneforge.learner import TrainConfig, train
from sceneforge.synthetic import SyntheticSpec, gen_synthetic_corpus, typo_form
from sceneforge.textproc import parse

model_db, corpus, gold, lexicon = gen_synthetic_corpus(
    SyntheticSpec(num_categories=15, num_models=40, num_scenes=300), seed=0)
train_c, _, _ = split_corpus(corpus, seed=0)
data = vectorize_groups(build_discrimination_set(train_c, k=4, seed=0), model_db)
data.vocab.freeze()
weights = train(data, TrainConfig()).weights

texts = [
    "there is a red desk and a chair .",
    f"the room has a {typo_form('sofa')} and a white lamp .",  # misspelled sofa
    "there is a couch and a mug on a table .",                  # synonyms
]

for text in texts:
    print("=" * 72)
    print(text)
    parsed = parse(text, lexicon)
    for method in ("random", "learned", "rule", "combo"):
        template = build_template(method, model_db=model_db, weights=weights,
                                  parsed=parsed, lexicon=lexicon, seed=1)
        nodes = ", ".join(
            f"{n.category}[{n.model_id or '-'}]" + (f"x{n.count}" if n.count > 1 else "")
            for n in template.nodes) or "(empty)"
        rels = "; ".join(f"{r.kind}({r.subject},{r.object})"
                         for r in template.relations)
        print(f"  {method:8s} {nodes}" + (f"   relations: {rels}" if rels else ""))
