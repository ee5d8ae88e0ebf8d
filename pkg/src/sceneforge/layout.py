"""Scene synthesis from templates: best-of-N sampled placement.

Each candidate layout places objects on their support parent (the target of
an `on` relation, else the floor) at a uniform position with quarter-turn
yaw, rejects hard collisions, and scores spatial-constraint satisfaction.
The best-scoring collision-free candidate wins; if every candidate collides
the least-violating one is returned with its degraded flag set.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import Box, Scene, SceneObject, ValidationError
from .textproc import ROOM

DEFAULT_ROOM = Box(min=(-2.0, -2.0, 0.0), max=(2.0, 2.0, 2.5))

YAW_CHOICES = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)

SOFT_COLLISION_PENALTY = 0.5
SPREAD_BONUS_WEIGHT = 0.1
SPREAD_CAP = 1.0


@dataclass(frozen=True)
class LayoutConfig:
    num_samples: int = 100
    seed: int = 0
    collision_tolerance: float = 0.005
    room_bounds: Box = DEFAULT_ROOM
    near_threshold: float = 0.5
    corner_threshold: float = 0.75

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValidationError("num_samples must be >= 1")


def object_box(obj, record):
    """World AABB of a placed object; yaw is snapped to the nearest quarter
    turn so the box stays axis-aligned."""
    w, d, h = record.dims
    quarter = round(obj.yaw / (math.pi / 2)) % 4
    if quarter % 2 == 1:
        w, d = d, w
    hx, hy = 0.5 * w * obj.scale, 0.5 * d * obj.scale
    x, y, z = obj.position
    return (x - hx, y - hy, z), (x + hx, y + hy, z + h * obj.scale)


def _overlap(lo1, hi1, lo2, hi2):
    return min(hi1, hi2) - max(lo1, lo2)


def check_collision(objects, model_db, tolerance=0.005, support_pairs=()):
    """Index pairs whose boxes interpenetrate beyond tolerance on all axes.

    Pairs listed in support_pairs (stacking contacts) are exempt, since a
    support surface below the parent's bounding-box top would otherwise
    register as penetration.
    """
    boxes = [object_box(o, model_db.get(o.model_id)) for o in objects]
    exempt = {frozenset(p) for p in support_pairs}
    violations = []
    for i in range(len(objects)):
        for j in range(i + 1, len(objects)):
            if frozenset((i, j)) in exempt:
                continue
            (amin, amax), (bmin, bmax) = boxes[i], boxes[j]
            if all(_overlap(amin[k], amax[k], bmin[k], bmax[k]) > tolerance
                   for k in range(3)):
                violations.append((i, j))
    return violations


def _footprint_gap(box_a, box_b):
    (amin, amax), (bmin, bmax) = box_a, box_b
    dx = max(amin[0] - bmax[0], bmin[0] - amax[0], 0.0)
    dy = max(amin[1] - bmax[1], bmin[1] - amax[1], 0.0)
    return math.hypot(dx, dy)


def _center(box):
    (mn, mx) = box
    return ((mn[0] + mx[0]) / 2, (mn[1] + mx[1]) / 2)


def relation_satisfied(kind, subj, obj, subj_rec, obj_rec, room, config):
    """Geometric predicate for one relation; obj/obj_rec are None for room targets."""
    sbox = object_box(subj, subj_rec)
    tol = config.collision_tolerance
    if kind == "in_corner":
        cx, cy = _center(sbox)
        return (min(cx - room.min[0], room.max[0] - cx) <= config.corner_threshold
                and min(cy - room.min[1], room.max[1] - cy) <= config.corner_threshold)
    if kind == "in_center":
        cx, cy = _center(sbox)
        wx, wy = room.max[0] - room.min[0], room.max[1] - room.min[1]
        return (room.min[0] + wx / 3 <= cx <= room.max[0] - wx / 3
                and room.min[1] + wy / 3 <= cy <= room.max[1] - wy / 3)
    if kind == "inside" and obj is None:
        mn, mx = sbox
        return all(room.min[k] - tol <= mn[k] and mx[k] <= room.max[k] + tol
                   for k in range(3))
    if obj is None:
        return False
    obox = object_box(obj, obj_rec)
    if kind == "on":
        smin, smax = sbox
        omin, omax = obox
        top = obj.position[2] + obj_rec.support_height * obj.scale
        return (omin[0] - tol <= smin[0] and smax[0] <= omax[0] + tol
                and omin[1] - tol <= smin[1] and smax[1] <= omax[1] + tol
                and abs(smin[2] - top) <= max(tol, 1e-6))
    if kind == "under":
        smin, smax = sbox
        omin, omax = obox
        horizontal = (_overlap(smin[0], smax[0], omin[0], omax[0]) > 0
                      and _overlap(smin[1], smax[1], omin[1], omax[1]) > 0)
        return horizontal and smax[2] <= omin[2] + tol
    if kind == "inside":
        smin, smax = sbox
        omin, omax = obox
        return all(omin[k] - tol <= smin[k] and smax[k] <= omax[k] + tol
                   for k in range(3))
    if kind in ("near", "next_to"):
        return _footprint_gap(sbox, obox) < config.near_threshold
    sc, oc = _center(sbox), _center(obox)
    if kind == "left_of":
        return sc[0] < oc[0]
    if kind == "right_of":
        return sc[0] > oc[0]
    if kind == "in_front_of":
        return sc[1] < oc[1]
    if kind == "behind":
        return sc[1] > oc[1]
    return False


def _resolve_nodes(template, model_db):
    """(node, record) pairs for nodes that map to a database model."""
    resolved = []
    for node in template.nodes:
        model_id = node.model_id
        if model_id is None or model_id not in model_db:
            candidates = model_db.models_of(node.category)
            if not candidates:
                warnings.warn(
                    f"template node {node.node_id} ({node.category!r}) has no "
                    f"database model; skipping")
                continue
            model_id = candidates[0]
        resolved.append((node, model_db.get(model_id)))
    return resolved


def _expand_slots(resolved, relations):
    """Object slots (one per node copy) plus support-parent slot indices."""
    first_slot = {}
    slots = []
    for node, record in resolved:
        first_slot[node.node_id] = len(slots)
        for _ in range(node.count):
            slots.append({"node": node, "record": record, "parent": None})

    parent_of = {}
    for r in relations:
        if r.kind == "on" and r.object != ROOM and r.subject not in parent_of:
            parent_of[r.subject] = r.object
    # break support cycles deterministically by dropping the closing link
    for start in sorted(parent_of):
        seen = {start}
        cur = start
        while cur in parent_of:
            nxt = parent_of[cur]
            if nxt in seen:
                del parent_of[cur]
                break
            seen.add(nxt)
            cur = nxt

    for node, record in resolved:
        pid = parent_of.get(node.node_id)
        if pid is None or pid not in first_slot:
            continue
        parent_slot = first_slot[pid]
        if slots[parent_slot]["record"].support_height <= 0:
            continue  # no usable surface: stays on the floor
        for i in range(first_slot[node.node_id],
                       first_slot[node.node_id] + node.count):
            slots[i]["parent"] = parent_slot
    return slots, first_slot


def _placement_order(slots):
    def depth(i, guard=0):
        p = slots[i]["parent"]
        return 0 if p is None or guard > len(slots) else 1 + depth(p, guard + 1)
    return sorted(range(len(slots)), key=lambda i: (depth(i), i))


def _uniform(rng, lo, hi):
    if lo >= hi:
        return (lo + hi) / 2.0
    return float(rng.uniform(lo, hi))


def _sample_candidate(slots, order, room, rng):
    placements = [None] * len(slots)
    for i in order:
        slot = slots[i]
        record = slot["record"]
        yaw = float(rng.choice(YAW_CHOICES))
        w, d, h = record.dims
        if round(yaw / (math.pi / 2)) % 4 % 2 == 1:
            w, d = d, w
        hx, hy = w / 2, d / 2
        if slot["parent"] is None:
            x = _uniform(rng, room.min[0] + hx, room.max[0] - hx)
            y = _uniform(rng, room.min[1] + hy, room.max[1] - hy)
            z = room.min[2]
        else:
            parent = placements[slot["parent"]]
            prec = slots[slot["parent"]]["record"]
            pmin, pmax = parent["box"]
            x = _uniform(rng, pmin[0] + hx, pmax[0] - hx)
            y = _uniform(rng, pmin[1] + hy, pmax[1] - hy)
            z = parent["z"] + prec.support_height * parent["scale"]
        obj = SceneObject(
            model_id=record.model_id,
            category=record.category,
            position=(x, y, z),
            yaw=yaw,
            scale=1.0,
        )
        mn, mx = object_box(obj, record)
        placements[i] = {"obj": obj, "box": (mn, mx), "z": z, "scale": 1.0}
    return [p["obj"] for p in placements]


def _relation_score(objects, template, first_slot, model_db, config):
    if not template.relations:
        return 0.0, 0
    satisfied = 0
    for r in template.relations:
        sidx = first_slot.get(r.subject)
        if sidx is None or sidx >= len(objects):
            continue
        subj = objects[sidx]
        subj_rec = model_db.get(subj.model_id)
        if r.object == ROOM:
            ok = relation_satisfied(r.kind, subj, None, subj_rec, None,
                                    config.room_bounds, config)
        else:
            oidx = first_slot.get(r.object)
            if oidx is None or oidx >= len(objects):
                continue
            obj = objects[oidx]
            ok = relation_satisfied(r.kind, subj, obj, subj_rec,
                                    model_db.get(obj.model_id),
                                    config.room_bounds, config)
        if ok:
            satisfied += 1
    return satisfied / len(template.relations), satisfied


def _spread_bonus(objects, model_db):
    if len(objects) < 2:
        return 0.0
    centers = [_center(object_box(o, model_db.get(o.model_id))) for o in objects]
    total = 0.0
    for i, c in enumerate(centers):
        nearest = min(math.dist(c, other)
                      for j, other in enumerate(centers) if j != i)
        total += min(nearest, SPREAD_CAP)
    return total / len(objects)


def _support_pairs(slots):
    return {(slot["parent"], i) for i, slot in enumerate(slots)
            if slot["parent"] is not None}


def score_layout(scene, template, model_db, config=LayoutConfig()):
    """satisfied/total relations - 0.5 * colliding pairs + 0.1 * capped spread.

    Assumes the scene's objects follow the template's node order with count
    copies laid out contiguously (the order synthesize produces).
    """
    resolved = _resolve_nodes(template, model_db)
    slots, first_slot = _expand_slots(resolved, template.relations)
    objects = list(scene.objects)
    rel_term, _ = _relation_score(objects, template, first_slot, model_db, config)
    soft = len(check_collision(objects, model_db, config.collision_tolerance,
                               _support_pairs(slots)))
    return (rel_term
            - SOFT_COLLISION_PENALTY * soft
            + SPREAD_BONUS_WEIGHT * _spread_bonus(objects, model_db))


def synthesize(template, model_db, config=LayoutConfig()) -> Scene:
    """Best-of-N sampling synthesis; deterministic given config.seed.

    Candidate i draws from an RNG seeded by (seed, i), so candidates are
    independent of each other and of N. Returns the highest-scoring
    collision-free candidate, or the least-violating one flagged degraded.
    """
    resolved = _resolve_nodes(template, model_db)
    slots, first_slot = _expand_slots(resolved, template.relations)
    room = config.room_bounds
    if not slots:
        return Scene("generated", (), room)
    order = _placement_order(slots)
    support = _support_pairs(slots)

    best = None          # (score, index, objects)
    least_bad = None     # (violations, index, objects)
    for i in range(config.num_samples):
        rng = np.random.default_rng([config.seed, i])
        objects = _sample_candidate(slots, order, room, rng)
        violations = check_collision(objects, model_db,
                                     config.collision_tolerance, support)
        if violations:
            if least_bad is None or len(violations) < least_bad[0]:
                least_bad = (len(violations), i, objects)
            continue
        scene = Scene("generated", tuple(objects), room)
        score = score_layout(scene, template, model_db, config)
        if best is None or score > best[0]:
            best = (score, i, objects)

    if best is not None:
        return Scene("generated", tuple(best[2]), room)
    return Scene("generated", tuple(least_bad[2]), room, degraded=True)


_SVG_PALETTE = ("#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2",
                "#b279a2", "#eeca3b", "#9d755d", "#bab0ac", "#439894")


def render_svg(scene, model_db=None, size=640) -> str:
    """Top-down orthographic view: room rectangle plus labeled footprints."""
    room = scene.room_bounds
    wx = room.max[0] - room.min[0]
    wy = room.max[1] - room.min[1]
    margin = 0.05 * size
    scale = (size - 2 * margin) / max(wx, wy, 1e-9)

    def sx(x):
        return margin + (x - room.min[0]) * scale

    def sy(y):
        return size - margin - (y - room.min[1]) * scale  # svg y grows downward

    categories = sorted({o.category for o in scene.objects})
    color = {c: _SVG_PALETTE[i % len(_SVG_PALETTE)] for i, c in enumerate(categories)}

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="{sx(room.min[0]):.2f}" y="{sy(room.max[1]):.2f}" '
        f'width="{wx * scale:.2f}" height="{wy * scale:.2f}" '
        f'fill="#f8f8f4" stroke="#333" stroke-width="2"/>',
    ]
    for obj in sorted(scene.objects, key=lambda o: (o.position[2], o.model_id)):
        if model_db is not None and obj.model_id in model_db:
            (xmin, ymin, _), (xmax, ymax, _) = object_box(
                obj, model_db.get(obj.model_id))
        else:
            half = 0.25 * obj.scale  # fallback footprint when dims are unknown
            xmin, xmax = obj.position[0] - half, obj.position[0] + half
            ymin, ymax = obj.position[1] - half, obj.position[1] + half
        parts.append(
            f'<rect x="{sx(xmin):.2f}" y="{sy(ymax):.2f}" '
            f'width="{(xmax - xmin) * scale:.2f}" '
            f'height="{(ymax - ymin) * scale:.2f}" '
            f'fill="{color[obj.category]}" fill-opacity="0.75" stroke="#222"/>')
        parts.append(
            f'<text x="{sx(obj.position[0]):.2f}" y="{sy(obj.position[1]):.2f}" '
            f'font-size="11" text-anchor="middle" font-family="sans-serif">'
            f'{obj.category} ({obj.model_id})</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
