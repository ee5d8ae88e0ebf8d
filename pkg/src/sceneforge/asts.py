"""Aligned scene template similarity and method-comparison statistics.

The metric maximizes, over one-to-one alignments A between template nodes
and scene objects, the summed pair similarity divided by J(A) + |A|, where
J(A) counts unaligned nodes plus unaligned objects.

With T nodes and O objects, J(A) + |A| = T + O - |A|.  Pair similarities
are non-negative, so extending any alignment with extra (even zero-scoring)
pairs never lowers the ratio: some maximizer has |A| = min(T, O) and a
constant denominator max(T, O).  The metric therefore reduces to

    ASTS = (maximum-weight bipartite matching) / max(T, O),

which is solved exactly by the assignment algorithm.  asts_bruteforce
enumerates every alignment of every size straight from the definition and
guards this reduction in the test suite.
"""

import itertools
import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from .corpus import ValidationError

BRUTE_FORCE_LIMIT = 7


def _expand_nodes(template):
    return [n for n in template.nodes for _ in range(n.count)]


def pair_similarity(node, obj) -> float:
    """1 on model-id match, 0.5 on category-only match, else 0."""
    if node.model_id is not None and node.model_id == obj.model_id:
        return 1.0
    if node.category == obj.category:
        return 0.5
    return 0.0


def _similarity_matrix(template, scene):
    nodes = _expand_nodes(template)
    objects = list(scene.objects)
    S = np.zeros((len(nodes), len(objects)))
    for i, n in enumerate(nodes):
        for j, o in enumerate(objects):
            S[i, j] = pair_similarity(n, o)
    return S


def asts(template, scene) -> float:
    """Similarity in [0, 1]; two empty sides count as a perfect match."""
    S = _similarity_matrix(template, scene)
    T, O = S.shape
    if T == 0 and O == 0:
        return 1.0
    if T == 0 or O == 0:
        return 0.0
    rows, cols = linear_sum_assignment(S, maximize=True)
    return float(S[rows, cols].sum()) / max(T, O)


def asts_bruteforce(template, scene) -> float:
    """Exhaustive maximization over all one-to-one alignments of every size."""
    S = _similarity_matrix(template, scene)
    T, O = S.shape
    if min(T, O) > BRUTE_FORCE_LIMIT:
        raise ValidationError(
            f"brute force limited to min side <= {BRUTE_FORCE_LIMIT}, got {min(T, O)}")
    best = None
    for size in range(min(T, O) + 1):
        for node_subset in itertools.combinations(range(T), size):
            for obj_perm in itertools.permutations(range(O), size):
                total = sum(S[n, o] for n, o in zip(node_subset, obj_perm))
                unaligned = (T - size) + (O - size)
                denom = unaligned + size
                value = 1.0 if denom == 0 else total / denom
                if best is None or value > best:
                    best = value
    return best


def correlate(xs, ys):
    """(Pearson r, Kendall tau-b). NaN where the statistic is undefined."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if len(xs) != len(ys):
        raise ValidationError("correlate needs sequences of equal length")
    if len(xs) < 2:
        raise ValidationError("correlate needs at least 2 points")

    dx = xs - xs.mean()
    dy = ys - ys.mean()
    denominator = math.sqrt(float(dx @ dx) * float(dy @ dy))
    pearson = float(dx @ dy) / denominator if denominator > 0 else float("nan")

    concordant = discordant = 0
    n = len(xs)
    for i in range(n):
        for j in range(i + 1, n):
            product = (xs[i] - xs[j]) * (ys[i] - ys[j])
            if product > 0:
                concordant += 1
            elif product < 0:
                discordant += 1
    n0 = n * (n - 1) / 2
    denom_tau = math.sqrt((n0 - _tie_count(xs)) * (n0 - _tie_count(ys)))
    tau = (concordant - discordant) / denom_tau if denom_tau > 0 else float("nan")
    return pearson, tau


def _tie_count(values):
    _, counts = np.unique(values, return_counts=True)
    return float(sum(c * (c - 1) / 2 for c in counts))


def projected_scene(template, room_bounds=None):
    """A placeholder scene carrying a template's (category, model) multiset.

    Used to score methods against gold templates on synthetic corpora, where
    only identity matters; positions are irrelevant to the metric.
    """
    from .corpus import Box, Scene, SceneObject

    room = room_bounds or Box(min=(-2.0, -2.0, 0.0), max=(2.0, 2.0, 2.5))
    objects = tuple(
        SceneObject(model_id=n.model_id or f"unresolved:{n.category}",
                    category=n.category, position=(0.0, 0.0, 0.0))
        for n in _expand_nodes(template)
    )
    return Scene("projected", objects, room)


def evaluate_methods(corpus, weights, model_db, lexicon, methods=None,
                     gold_templates=None, seed=0, node_budget=4):
    """Mean ASTS per method over a corpus split's descriptions.

    gold_templates, when given, must align 1:1 with corpus.descriptions;
    each method's template is then scored against the projected gold
    template rather than the stored scene. The random condition derives a
    per-description seed from (seed, description index).
    """
    from .grounding import (METHODS, build_combo_template, build_learned_template,
                            build_random_template, build_rule_template)
    from .textproc import parse

    methods = list(methods or METHODS)
    for m in methods:
        if m not in METHODS:
            raise ValidationError(f"unknown method {m!r}")
    if gold_templates is not None and len(gold_templates) != len(corpus.descriptions):
        raise ValidationError("gold templates must align with corpus descriptions")

    per_description = {m: {} for m in methods}
    for idx, desc in enumerate(corpus.descriptions):
        if gold_templates is not None:
            target = projected_scene(gold_templates[idx])
        else:
            target = corpus.scenes[desc.scene_id]
        parsed = parse(desc.text, lexicon)
        sentences = parsed.sentence_texts()
        for m in methods:
            if m == "random":
                template = build_random_template(
                    model_db, n=node_budget, seed=seed * 1_000_003 + idx)
            elif m == "learned":
                template = build_learned_template(
                    weights, sentences, model_db, n=node_budget)
            elif m == "rule":
                template = build_rule_template(parsed, model_db, lexicon)
            else:
                template = build_combo_template(parsed, weights, model_db, lexicon)
            per_description[m][str(idx)] = asts(template, target)

    report = {"num_descriptions": len(corpus.descriptions), "methods": {}}
    for m in methods:
        scores = per_description[m]
        mean = sum(scores.values()) / len(scores) if scores else 0.0
        report["methods"][m] = {"mean_asts": mean, "per_description": scores}
    return report


def correlation_block(report, ratings):
    """Correlate ASTS scores with ratings keyed "method:description_index".

    Returns both the per-item correlation over all matched keys and the
    per-method-mean correlation (one point per method).
    """
    items = {}
    for m, entry in report["methods"].items():
        for idx, score in entry["per_description"].items():
            items[f"{m}:{idx}"] = score

    matched = [(items[r["descriptionId"]], float(r["rating"]))
               for r in ratings if r["descriptionId"] in items]
    block = {"num_matched": len(matched)}
    if len(matched) >= 2:
        pearson, tau = correlate([a for a, _ in matched], [b for _, b in matched])
        block["per_item"] = {"pearson": pearson, "kendall_tau": tau}

    method_scores = {}
    method_ratings = {}
    for r in ratings:
        key = r["descriptionId"]
        if key in items and ":" in key:
            method = key.split(":", 1)[0]
            method_scores.setdefault(method, []).append(items[key])
            method_ratings.setdefault(method, []).append(float(r["rating"]))
    if len(method_scores) >= 2:
        ms = sorted(method_scores)
        xs = [sum(method_scores[m]) / len(method_scores[m]) for m in ms]
        ys = [sum(method_ratings[m]) / len(method_ratings[m]) for m in ms]
        pearson, tau = correlate(xs, ys)
        block["per_method_mean"] = {"pearson": pearson, "kendall_tau": tau,
                                    "methods": ms}
    return block
