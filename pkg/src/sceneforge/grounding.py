"""Scene-template construction from text under four conditions.

random   - n uniformly drawn models, no relations.
learned  - the n models scored most likely by the whole utterance.
rule     - one node per coreference cluster, head word as category,
           lexicographically first model filtered by attribute keywords.
combo    - rule skeleton, with categories re-scored against learned weights
           (threshold T_c, head-word fallback) and models chosen by a mixed
           mention/utterance score (weights lambda_d, lambda_x); mentions
           whose best model score is not positive are treated as spurious
           and dropped.
"""

import random
from dataclasses import dataclass

from .corpus import ValidationError
from .features import CATEGORY, MODEL, text_ngrams
from .textproc import ROOM, Lexicon, SpatialRelation, parse

METHODS = ("random", "learned", "rule", "combo")

DEFAULT_CATEGORY_THRESHOLD = 0.5   # T_c
DEFAULT_MENTION_WEIGHT = 0.75      # lambda_d
DEFAULT_UTTERANCE_WEIGHT = 0.25    # lambda_x
DEFAULT_NODE_BUDGET = 4


@dataclass(frozen=True)
class TemplateNode:
    node_id: int
    category: str
    model_id: str | None = None
    attributes: tuple[str, ...] = ()
    count: int = 1

    def __post_init__(self):
        if not self.category:
            raise ValidationError("template node category must be non-empty")
        if self.count < 1:
            raise ValidationError("template node count must be >= 1")

    def to_json(self):
        return {
            "id": self.node_id,
            "category": self.category,
            "model": self.model_id,
            "attributes": list(self.attributes),
            "count": self.count,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            node_id=int(obj["id"]),
            category=str(obj["category"]),
            model_id=obj.get("model"),
            attributes=tuple(obj.get("attributes", [])),
            count=int(obj.get("count", 1)),
        )


@dataclass(frozen=True)
class SceneTemplate:
    nodes: tuple[TemplateNode, ...]
    relations: tuple[SpatialRelation, ...] = ()

    def __post_init__(self):
        ids = [n.node_id for n in self.nodes]
        if len(ids) != len(set(ids)):
            raise ValidationError("template node ids must be unique")
        valid = set(ids)
        for r in self.relations:
            if r.subject not in valid or (r.object != ROOM and r.object not in valid):
                raise ValidationError(f"relation {r} references a missing node")

    def to_json(self):
        return {
            "nodes": [n.to_json() for n in self.nodes],
            "relations": [r.to_json() for r in self.relations],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            nodes=tuple(TemplateNode.from_json(n) for n in obj.get("nodes", [])),
            relations=tuple(SpatialRelation.from_json(r) for r in obj.get("relations", [])),
        )

    def save(self, path):
        from .corpus import write_json
        write_json(path, self.to_json())

    @classmethod
    def load(cls, path):
        from .corpus import read_json
        return cls.from_json(read_json(path))


def score_category(weights, phrase_tokens) -> dict[str, float]:
    """Sum of category-target feature weights active for the phrase's n-grams."""
    scores: dict[str, float] = {}
    for gram in sorted(text_ngrams([phrase_tokens])):
        for target_type, target, weight in weights.entries_for_ngram(gram):
            if target_type == CATEGORY:
                scores[target] = scores.get(target, 0.0) + weight
    return scores


def choose_category(weights, mention, lexicon=None,
                    threshold=DEFAULT_CATEGORY_THRESHOLD) -> str:
    """Best-scoring category if it clears the threshold, else the head word.

    Ties break lexicographically. The head fallback passes through the
    lexicon's compound table.
    """
    lexicon = lexicon or Lexicon.default()
    phrase = mention.chunk.texts() if mention.chunk is not None else [mention.head_lemma]
    scores = score_category(weights, phrase)
    if scores:
        best = min(scores, key=lambda c: (-scores[c], c))
        if scores[best] > threshold:
            return best
    return lexicon.canonical_category(mention.head_lemma)


def _model_scores(weights, grams, candidates):
    scores = dict.fromkeys(candidates, 0.0)
    for gram in sorted(grams):
        for target_type, target, weight in weights.entries_for_ngram(gram):
            if target_type == MODEL and target in scores:
                scores[target] += weight
    return scores


def select_model(weights, category, desc_terms, utterance_sentences, model_db,
                 mention_weight=DEFAULT_MENTION_WEIGHT,
                 utterance_weight=DEFAULT_UTTERANCE_WEIGHT) -> str | None:
    """Mixed-score argmax over the category's models; None if nothing scores > 0.

    Candidates are the models of the category; when the category is unknown
    to the database the constraint is dropped and all models compete.
    score(m) = mention_weight * sum(weights over mention-term n-grams)
             + utterance_weight * sum(weights over whole-utterance n-grams).
    """
    candidates = model_db.models_of(category) or model_db.all_ids
    if not candidates:
        return None
    d_scores = _model_scores(weights, text_ngrams([desc_terms]), candidates)
    x_scores = _model_scores(weights, text_ngrams(utterance_sentences), candidates)
    best = None
    best_score = 0.0
    for m in candidates:  # sorted; first win implements the lexicographic tie-break
        s = mention_weight * d_scores[m] + utterance_weight * x_scores[m]
        if best is None or s > best_score:
            best, best_score = m, s
    return best if best_score > 0.0 else None


def build_random_template(model_db, n=DEFAULT_NODE_BUDGET, seed=0) -> SceneTemplate:
    """n uniform model draws (with replacement), one node each."""
    ids = model_db.all_ids
    if not ids:
        return SceneTemplate(nodes=())
    rng = random.Random(seed)
    nodes = tuple(
        TemplateNode(i, model_db.get(mid).category, mid)
        for i, mid in enumerate(rng.choices(ids, k=n))
    )
    return SceneTemplate(nodes=nodes)


def build_learned_template(weights, utterance_sentences, model_db,
                           n=DEFAULT_NODE_BUDGET) -> SceneTemplate:
    """Top-n models by whole-utterance feature-weight sums.

    The unit of choice is the model, so two models of one category can both
    make the cut; no relations are produced.
    """
    scores = _model_scores(weights, text_ngrams(utterance_sentences), model_db.all_ids)
    top = sorted(scores, key=lambda m: (-scores[m], m))[:n]
    nodes = tuple(
        TemplateNode(i, model_db.get(mid).category, mid) for i, mid in enumerate(top)
    )
    return SceneTemplate(nodes=nodes)


def _keyword_model(model_db, category, attributes):
    """Rule-based model choice: lexicographically first model of the category,
    preferring those whose id contains an attribute keyword."""
    candidates = model_db.models_of(category)
    if not candidates:
        return None
    if attributes:
        hits = [m for m in candidates if any(a in m.lower() for a in attributes)]
        if hits:
            return hits[0]
    return candidates[0]


def _remap_relations(relations, id_map):
    out = []
    for r in relations:
        if r.subject not in id_map:
            continue
        if r.object == ROOM:
            out.append(SpatialRelation(r.kind, id_map[r.subject], ROOM))
        elif r.object in id_map:
            out.append(SpatialRelation(r.kind, id_map[r.subject], id_map[r.object]))
    return tuple(out)


def build_rule_template(parsed, model_db, lexicon=None) -> SceneTemplate:
    """One node per coreference cluster; purely lexical model lookup."""
    lexicon = lexicon or Lexicon.default()
    nodes = []
    id_map = {}
    for mention in parsed.mentions:
        category = lexicon.canonical_category(mention.head_lemma)
        node_id = len(nodes)
        nodes.append(TemplateNode(
            node_id=node_id,
            category=category,
            model_id=_keyword_model(model_db, category, mention.attributes),
            attributes=mention.attributes,
            count=mention.count,
        ))
        id_map[mention.coref_id] = node_id
    return SceneTemplate(tuple(nodes), _remap_relations(parsed.relations, id_map))


def build_combo_template(parsed, weights, model_db, lexicon=None,
                         threshold=DEFAULT_CATEGORY_THRESHOLD,
                         mention_weight=DEFAULT_MENTION_WEIGHT,
                         utterance_weight=DEFAULT_UTTERANCE_WEIGHT) -> SceneTemplate:
    """Rule skeleton with learned category and model choices.

    Mentions for which no model scores positive are dropped as spurious;
    relations survive only when both endpoints do.
    """
    lexicon = lexicon or Lexicon.default()
    sentences = parsed.sentence_texts()
    nodes = []
    id_map = {}
    for mention in parsed.mentions:
        category = choose_category(weights, mention, lexicon, threshold)
        desc_terms = list(mention.attributes) + mention.head_lemma.split()
        model_id = select_model(weights, category, desc_terms, sentences, model_db,
                                mention_weight, utterance_weight)
        if model_id is None:
            continue
        node_id = len(nodes)
        nodes.append(TemplateNode(
            node_id=node_id,
            category=category,
            model_id=model_id,
            attributes=mention.attributes,
            count=mention.count,
        ))
        id_map[mention.coref_id] = node_id
    return SceneTemplate(tuple(nodes), _remap_relations(parsed.relations, id_map))


def build_template(method, *, model_db=None, weights=None, text=None,
                   parsed=None, lexicon=None, n=DEFAULT_NODE_BUDGET,
                   seed=0, **scoring) -> SceneTemplate:
    """Dispatch one of the four conditions from raw inputs."""
    if method not in METHODS:
        raise ValidationError(f"method must be one of {METHODS}, got {method!r}")
    if method == "random":
        if model_db is None:
            raise ValidationError("random method needs a model database")
        return build_random_template(model_db, n=n, seed=seed)

    if parsed is None and text is not None:
        parsed = parse(text, lexicon)
    if method == "learned":
        if weights is None or model_db is None:
            raise ValidationError("learned method needs weights and a model database")
        sentences = parsed.sentence_texts() if parsed is not None else []
        return build_learned_template(weights, sentences, model_db, n=n)
    if parsed is None:
        raise ValidationError(f"{method} method needs text or a parsed utterance")
    if method == "rule":
        if model_db is None:
            raise ValidationError("rule method needs a model database")
        return build_rule_template(parsed, model_db, lexicon)
    if weights is None or model_db is None:
        raise ValidationError("combo method needs weights and a model database")
    return build_combo_template(parsed, weights, model_db, lexicon, **scoring)
