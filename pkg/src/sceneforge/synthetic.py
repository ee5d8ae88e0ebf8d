"""Synthetic desk-scale corpora with known ground truth.

Generates a model catalog (opaque model ids, one color word per model
within a category), scenes drawn from it, and grammar-based descriptions
that mention every scene object. Each mention's surface form is the exact
category label, or, at the configured noise rate, a synonym or a recurring
deterministic typo; those variant forms are what the learned grounding has
to recover. The gold scene template for every description is returned
alongside, as is a lexicon covering the generated vocabulary.
"""

import math
import random
from dataclasses import dataclass
from typing import NamedTuple

from .corpus import Box, Corpus, Description, ModelDatabase, ModelRecord, Scene, \
    SceneObject, ValidationError
from .grounding import SceneTemplate, TemplateNode
from .layout import YAW_CHOICES, object_box
from .textproc import Lexicon, SpatialRelation, ROOM

# name, (width, depth, height), has stackable top surface, small enough to stack
_CATEGORY_TABLE = [
    ("desk", (1.2, 0.6, 0.75), True, False),
    ("chair", (0.45, 0.45, 0.9), False, False),
    ("table", (1.0, 1.0, 0.75), True, False),
    ("lamp", (0.3, 0.3, 1.5), False, False),
    ("sofa", (1.8, 0.85, 0.8), False, False),
    ("bed", (1.9, 1.5, 0.6), False, False),
    ("cup", (0.08, 0.08, 0.1), False, True),
    ("plate", (0.2, 0.2, 0.03), False, True),
    ("laptop", (0.35, 0.25, 0.03), False, True),
    ("monitor", (0.55, 0.2, 0.4), False, True),
    ("vase", (0.15, 0.15, 0.3), False, True),
    ("bookcase", (0.8, 0.3, 1.8), False, False),
    ("plant", (0.4, 0.4, 1.1), False, False),
    ("clock", (0.25, 0.1, 0.25), False, True),
    ("rug", (1.6, 1.2, 0.02), False, False),
    ("bowl", (0.15, 0.15, 0.08), False, True),
    ("keyboard", (0.45, 0.15, 0.03), False, True),
    ("notepad", (0.15, 0.2, 0.01), False, True),
    ("bench", (1.2, 0.4, 0.45), False, False),
    ("stool", (0.35, 0.35, 0.45), False, False),
    ("cabinet", (0.9, 0.45, 1.0), True, False),
    ("mirror", (0.6, 0.1, 1.6), False, False),
    ("book", (0.15, 0.22, 0.03), False, True),
    ("basket", (0.35, 0.35, 0.3), False, False),
]

# one well-attested variant per category keeps each form frequent enough
# for its grounding to clear the combined model's score threshold
SYNONYMS = {
    "desk": ["bureau"],
    "chair": ["seat"],
    "lamp": ["light"],
    "sofa": ["couch"],
    "bed": ["cot"],
    "cup": ["mug"],
    "plate": ["dish"],
    "laptop": ["notebook"],
    "monitor": ["screen"],
    "vase": ["urn"],
    "bookcase": ["bookshelf"],
    "plant": ["fern"],
    "rug": ["carpet"],
    "bowl": ["basin"],
    "cabinet": ["cupboard"],
    "bench": ["pew"],
    "book": ["tome"],
}

COLORS = ["red", "blue", "green", "black", "white",
          "brown", "gray", "yellow", "purple", "orange"]

ROOM_BOUNDS = Box(min=(-2.0, -2.0, 0.0), max=(2.0, 2.0, 2.5))


def typo_form(word: str) -> str:
    """Deterministic adjacent-letter swap; the same word always misspells the
    same way, so the corruption is learnable from co-occurrence."""
    for i in range(1, len(word) - 1):
        if word[i] != word[i + 1]:
            return word[:i] + word[i + 1] + word[i] + word[i + 2:]
    return word + word[-1]


@dataclass(frozen=True)
class SyntheticSpec:
    num_categories: int = 15
    num_models: int = 40
    num_scenes: int = 300
    noise: float = 0.1
    descriptions_per_scene: int = 3
    attribute_rate: float = 0.6
    min_objects: int = 1
    max_objects: int = 5
    stack_rate: float = 0.5
    relation_rate: float = 0.5

    def __post_init__(self):
        if not 5 <= self.num_categories <= len(_CATEGORY_TABLE):
            raise ValidationError(
                f"num_categories must be in [5, {len(_CATEGORY_TABLE)}]")
        if self.num_models < 2 * self.num_categories:
            raise ValidationError("need at least 2 models per category")
        if self.num_scenes < 1:
            raise ValidationError("num_scenes must be >= 1")
        if not 0.0 <= self.noise <= 1.0:
            raise ValidationError("noise must be in [0, 1]")
        if self.descriptions_per_scene < 1:
            raise ValidationError("descriptions_per_scene must be >= 1")
        if not 1 <= self.min_objects <= self.max_objects <= self.num_categories:
            raise ValidationError("need 1 <= min_objects <= max_objects <= categories")


class SyntheticCorpus(NamedTuple):
    model_db: ModelDatabase
    corpus: Corpus
    gold_templates: tuple[SceneTemplate, ...]
    lexicon: Lexicon


def _build_models(spec, rng):
    names = [row[0] for row in _CATEGORY_TABLE[:spec.num_categories]]
    base = spec.num_models // spec.num_categories
    extra = spec.num_models % spec.num_categories
    records = []
    colors = {}
    next_id = 0
    for ci, name in enumerate(names):
        _, dims, supports, _ = _CATEGORY_TABLE[ci]
        count = base + (1 if ci < extra else 0)
        for slot in range(count):
            mid = f"m{next_id:03d}"
            next_id += 1
            w, d, h = (v * rng.uniform(0.9, 1.1) for v in dims)
            records.append(ModelRecord(
                model_id=mid,
                category=name,
                dims=(w, d, h),
                support_height=h if supports else 0.0,
            ))
            colors[mid] = COLORS[slot % len(COLORS)]
    return ModelDatabase(records), colors


def _inset_uniform(rng, lo, hi, half):
    if lo + half >= hi - half:
        return (lo + hi) / 2.0
    return rng.uniform(lo + half, hi - half)


def _place_on_floor(record, placed_boxes, rng, tries=120):
    w, d, h = record.dims
    for attempt in range(tries):
        yaw = rng.choice(YAW_CHOICES)
        hx, hy = (d / 2, w / 2) if round(yaw / (math.pi / 2)) % 2 else (w / 2, d / 2)
        x = rng.uniform(ROOM_BOUNDS.min[0] + hx, ROOM_BOUNDS.max[0] - hx)
        y = rng.uniform(ROOM_BOUNDS.min[1] + hy, ROOM_BOUNDS.max[1] - hy)
        box = ((x - hx, y - hy), (x + hx, y + hy))
        clear = all(
            box[0][0] >= other[1][0] or box[1][0] <= other[0][0]
            or box[0][1] >= other[1][1] or box[1][1] <= other[0][1]
            for other in placed_boxes
        )
        if clear or attempt == tries - 1:
            placed_boxes.append(box)
            return (x, y, 0.0), yaw
    raise AssertionError("unreachable")


def _make_scene(scene_id, model_db, spec, rng):
    categories = model_db.categories
    n = rng.randint(spec.min_objects, spec.max_objects)
    chosen = rng.sample(categories, n)
    small = {row[0] for row in _CATEGORY_TABLE if row[3]}
    supports = {row[0] for row in _CATEGORY_TABLE if row[2]}

    stack_child = stack_parent = None
    if rng.random() < spec.stack_rate:
        child_cats = [c for c in chosen if c in small]
        parent_cats = [c for c in chosen if c in supports]
        if child_cats and parent_cats:
            stack_child, stack_parent = child_cats[0], parent_cats[0]

    objects = []
    placed_boxes = []
    parent_obj = {}
    order = [c for c in chosen if c != stack_child] + ([stack_child] if stack_child else [])
    for cat in order:
        record = model_db.get(rng.choice(model_db.models_of(cat)))
        if cat == stack_child and stack_parent in parent_obj:
            parent = parent_obj[stack_parent]
            prec = model_db.get(parent.model_id)
            pmin, pmax = object_box(parent, prec)
            w, d, _ = record.dims
            x = _inset_uniform(rng, pmin[0], pmax[0], w / 2)
            y = _inset_uniform(rng, pmin[1], pmax[1], d / 2)
            z = parent.position[2] + prec.support_height * parent.scale
            obj = SceneObject(record.model_id, cat, (x, y, z), 0.0)
        else:
            position, yaw = _place_on_floor(record, placed_boxes, rng)
            obj = SceneObject(record.model_id, cat, position, yaw)
        parent_obj[cat] = obj
        objects.append(obj)

    # keep scene-object order aligned with the chosen category order
    by_cat = {o.category: o for o in objects}
    ordered = tuple(by_cat[c] for c in chosen)
    stacked = (chosen.index(stack_child), chosen.index(stack_parent)) \
        if stack_child and stack_parent in parent_obj else None
    return Scene(scene_id, ordered, ROOM_BOUNDS), stacked


def _surface_form(category, rng, noise):
    # variants lean toward synonyms (describers choosing their own words);
    # typos are the rarer corruption
    if rng.random() < noise:
        synonyms = SYNONYMS.get(category, [])
        if synonyms and rng.random() < 0.7:
            return rng.choice(synonyms)
        return typo_form(category)
    return category


def _article(word):
    return "an" if word[0] in "aeiou" else "a"


def _noun_phrase(form, attribute):
    words = f"{attribute} {form}" if attribute else form
    return f"{_article(words.split()[0])} {words}"


def _listing(phrases):
    if len(phrases) == 1:
        return phrases[0]
    return ", ".join(phrases[:-1]) + " and " + phrases[-1]


def _near_pairs(scene, model_db, threshold=0.45):
    pairs = []
    boxes = [object_box(o, model_db.get(o.model_id)) for o in scene.objects]
    for i in range(len(scene.objects)):
        for j in range(len(scene.objects)):
            if i == j or scene.objects[i].position[2] != scene.objects[j].position[2]:
                continue
            (amin, amax), (bmin, bmax) = boxes[i], boxes[j]
            dx = max(amin[0] - bmax[0], bmin[0] - amax[0], 0.0)
            dy = max(amin[1] - bmax[1], bmin[1] - amax[1], 0.0)
            if 0 < math.hypot(dx, dy) < threshold:
                pairs.append((i, j))
    return pairs


def _corner_objects(scene, model_db, threshold=0.7):
    out = []
    for i, o in enumerate(scene.objects):
        (mn, mx) = object_box(o, model_db.get(o.model_id))
        cx, cy = (mn[0] + mx[0]) / 2, (mn[1] + mx[1]) / 2
        near_x = min(cx - ROOM_BOUNDS.min[0], ROOM_BOUNDS.max[0] - cx) <= threshold
        near_y = min(cy - ROOM_BOUNDS.min[1], ROOM_BOUNDS.max[1] - cy) <= threshold
        if near_x and near_y:
            out.append(i)
    return out


def _describe(scene, stacked, model_db, colors, spec, rng):
    """One description plus its gold template."""
    forms = []
    attrs = []
    for obj in scene.objects:
        forms.append(_surface_form(obj.category, rng, spec.noise))
        color = colors[obj.model_id]
        attrs.append(color if rng.random() < spec.attribute_rate else None)

    phrases = [_noun_phrase(f, a) for f, a in zip(forms, attrs)]
    opening = rng.choice(["there is", "the room has"])
    sentences = [f"{opening} {_listing(phrases)} ."]
    relations = []

    if stacked is not None:
        child, parent = stacked
        sentences.append(f"the {forms[child]} is on the {forms[parent]} .")
        relations.append(SpatialRelation("on", child, parent))

    if rng.random() < spec.relation_rate:
        near = _near_pairs(scene, model_db)
        corners = _corner_objects(scene, model_db)
        mentionable = [("near", p) for p in near[:1]] + \
                      [("corner", i) for i in corners[:1]]
        if mentionable:
            kind, what = rng.choice(mentionable)
            if kind == "near":
                i, j = what
                if not any(r.kind == "on" and {r.subject, r.object} == {i, j}
                           for r in relations):
                    sentences.append(
                        f"the {forms[i]} is next to the {forms[j]} .")
                    relations.append(SpatialRelation("next_to", i, j))
            else:
                sentences.append(
                    f"the {forms[what]} is in the corner of the room .")
                relations.append(SpatialRelation("in_corner", what, ROOM))

    text = " ".join(sentences)
    nodes = tuple(
        TemplateNode(
            node_id=i,
            category=obj.category,
            model_id=obj.model_id,
            attributes=(attrs[i],) if attrs[i] else (),
        )
        for i, obj in enumerate(scene.objects)
    )
    return text, SceneTemplate(nodes, tuple(relations))


def _build_lexicon(model_db):
    categories = model_db.categories
    synonyms = {c: SYNONYMS.get(c, []) for c in categories}
    typos = [typo_form(c) for c in categories]
    reserved = set(categories) | {s for ss in synonyms.values() for s in ss}
    collisions = reserved & set(typos)
    if collisions:
        raise AssertionError(f"typo forms collide with vocabulary: {collisions}")
    return Lexicon.from_categories(
        categories, synonyms=synonyms, extra_nouns=typos, extra_adjectives=COLORS)


def gen_synthetic_corpus(spec=SyntheticSpec(), seed=0) -> SyntheticCorpus:
    """Deterministic corpus with aligned gold templates and a covering lexicon."""
    rng = random.Random(seed)
    model_db, colors = _build_models(spec, rng)

    scenes = {}
    descriptions = []
    gold = []
    for i in range(spec.num_scenes):
        scene_id = f"s{i:04d}"
        scene, stacked = _make_scene(scene_id, model_db, spec, rng)
        scenes[scene_id] = scene
        for _ in range(spec.descriptions_per_scene):
            text, template = _describe(scene, stacked, model_db, colors, spec, rng)
            descriptions.append(Description(scene_id, text, source="synthetic"))
            gold.append(template)

    corpus = Corpus(scenes, descriptions)
    return SyntheticCorpus(model_db, corpus, tuple(gold), _build_lexicon(model_db))


def save_gold_templates(path, corpus, gold_templates):
    from .corpus import write_json
    write_json(path, [
        {"sceneId": d.scene_id, "template": t.to_json()}
        for d, t in zip(corpus.descriptions, gold_templates)
    ])


def load_gold_templates(path):
    from .corpus import read_json
    return tuple(SceneTemplate.from_json(row["template"]) for row in read_json(path))
