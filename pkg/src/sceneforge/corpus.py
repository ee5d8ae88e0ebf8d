"""Data model and IO for 3D model catalogs, scenes, descriptions, and splits.

Coordinates are meters, z is up. Object positions are the center of the
footprint at the object's bottom face.
"""

import json
import math
import random
from dataclasses import dataclass, field

DESCRIPTION_SOURCES = ("seed", "worker", "synthetic")

POSITION_TOLERANCE = 1e-6


class CorpusError(ValueError):
    """Base class for corpus loading and validation failures."""


class SchemaError(CorpusError):
    """Input file does not conform to the expected JSON schema."""


class ValidationError(CorpusError):
    """Well-formed input that violates a semantic invariant."""


def read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    except OSError as e:
        raise SchemaError(f"{path}: {e}") from e


def write_json(path, obj):
    """Canonical JSON writer: sorted keys, two-space indent, trailing newline."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_canonical(obj))


def dumps_canonical(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class Box:
    """Axis-aligned box given by min/max corners."""

    min: tuple[float, float, float]
    max: tuple[float, float, float]

    def __post_init__(self):
        if any(lo > hi for lo, hi in zip(self.min, self.max)):
            raise ValidationError(f"degenerate box: min {self.min} > max {self.max}")

    def contains_point(self, p, tol=POSITION_TOLERANCE):
        return all(lo - tol <= v <= hi + tol for v, lo, hi in zip(p, self.min, self.max))

    @property
    def size(self):
        return tuple(hi - lo for lo, hi in zip(self.min, self.max))

    def to_json(self):
        return {"min": list(self.min), "max": list(self.max)}

    @classmethod
    def from_json(cls, obj):
        return cls(min=tuple(float(v) for v in obj["min"]),
                   max=tuple(float(v) for v in obj["max"]))


@dataclass(frozen=True)
class ModelRecord:
    """One catalog entry: a 3D model with category label and bounding dims."""

    model_id: str
    category: str
    dims: tuple[float, float, float]  # (width, depth, height)
    is_room: bool = False
    support_height: float = 0.0  # height of stackable top surface, 0 if none

    def __post_init__(self):
        if not self.model_id:
            raise ValidationError("model_id must be non-empty")
        if not self.category:
            raise ValidationError(f"model {self.model_id!r}: category must be non-empty")
        if len(self.dims) != 3 or any(d <= 0 for d in self.dims):
            raise ValidationError(f"model {self.model_id!r}: dims must be 3 positive numbers")
        if self.support_height < 0:
            raise ValidationError(f"model {self.model_id!r}: support_height must be >= 0")


class ModelDatabase:
    """Catalog of ModelRecords with a category index."""

    def __init__(self, records):
        self._records: dict[str, ModelRecord] = {}
        for rec in records:
            if rec.model_id in self._records:
                raise ValidationError(f"duplicate model_id {rec.model_id!r}")
            self._records[rec.model_id] = rec
        index: dict[str, list[str]] = {}
        for mid in sorted(self._records):
            index.setdefault(self._records[mid].category, []).append(mid)
        self._category_index = index

    def __len__(self):
        return len(self._records)

    def __contains__(self, model_id):
        return model_id in self._records

    def __iter__(self):
        return iter(self._records.values())

    def get(self, model_id) -> ModelRecord:
        try:
            return self._records[model_id]
        except KeyError:
            raise KeyError(f"unknown model_id {model_id!r}") from None

    def models_of(self, category) -> list[str]:
        """Model ids with the given category, lexicographically sorted."""
        return list(self._category_index.get(category, []))

    @property
    def categories(self) -> list[str]:
        return sorted(self._category_index)

    @property
    def all_ids(self) -> list[str]:
        return sorted(self._records)

    def to_json(self):
        return [
            {
                "id": r.model_id,
                "category": r.category,
                "dims": list(r.dims),
                "isRoom": r.is_room,
                "supportHeight": r.support_height,
            }
            for r in self._records.values()
        ]

    def save(self, path):
        write_json(path, self.to_json())

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, list):
            raise SchemaError("model database must be a JSON array")
        records = []
        for i, obj in enumerate(data):
            try:
                records.append(
                    ModelRecord(
                        model_id=str(obj["id"]),
                        category=str(obj["category"]),
                        dims=tuple(float(v) for v in obj["dims"]),
                        is_room=bool(obj.get("isRoom", False)),
                        support_height=float(obj.get("supportHeight", 0.0)),
                    )
                )
            except (KeyError, TypeError, ValueError) as e:
                if isinstance(e, ValidationError):
                    raise
                raise SchemaError(f"model record #{i}: {e}") from e
        return cls(records)


def load_model_db(path) -> ModelDatabase:
    """Load models.json; rejects malformed records and duplicate ids."""
    return ModelDatabase.from_json(read_json(path))


@dataclass(frozen=True)
class SceneObject:
    """A placed model instance. yaw is rotation about z, normalized to [0, 2pi)."""

    model_id: str
    category: str
    position: tuple[float, float, float]
    yaw: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.scale <= 0:
            raise ValidationError(f"object {self.model_id!r}: scale must be > 0")
        object.__setattr__(self, "yaw", self.yaw % math.tau)
        object.__setattr__(self, "position", tuple(float(v) for v in self.position))

    def to_json(self):
        return {
            "model": self.model_id,
            "category": self.category,
            "pos": list(self.position),
            "yaw": self.yaw,
            "scale": self.scale,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            model_id=str(obj["model"]),
            category=str(obj["category"]),
            position=tuple(float(v) for v in obj["pos"]),
            yaw=float(obj.get("yaw", 0.0)),
            scale=float(obj.get("scale", 1.0)),
        )


@dataclass(frozen=True)
class Scene:
    """An arrangement of model instances inside a room box."""

    scene_id: str
    objects: tuple[SceneObject, ...]
    room_bounds: Box
    degraded: bool = field(default=False, compare=False)  # layout fallback marker

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        for o in self.objects:
            if not self.room_bounds.contains_point(o.position):
                raise ValidationError(
                    f"scene {self.scene_id!r}: object {o.model_id!r} at "
                    f"{o.position} outside room bounds"
                )

    def to_json(self):
        return {
            "id": self.scene_id,
            "room": self.room_bounds.to_json(),
            "objects": [o.to_json() for o in self.objects],
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            scene_id=str(obj["id"]),
            objects=tuple(SceneObject.from_json(o) for o in obj.get("objects", [])),
            room_bounds=Box.from_json(obj["room"]),
        )


@dataclass(frozen=True)
class Description:
    """A free-form textual description of one scene."""

    scene_id: str
    text: str
    source: str = "worker"

    def __post_init__(self):
        if not self.text:
            raise ValidationError(f"description for scene {self.scene_id!r}: empty text")
        if self.source not in DESCRIPTION_SOURCES:
            raise SchemaError(
                f"description source {self.source!r} not in {DESCRIPTION_SOURCES}"
            )

    def to_json(self):
        return {"sceneId": self.scene_id, "text": self.text, "source": self.source}

    @classmethod
    def from_json(cls, obj):
        return cls(scene_id=str(obj["sceneId"]), text=str(obj["text"]),
                   source=str(obj.get("source", "worker")))


class Corpus:
    """Scenes keyed by id plus descriptions grouped per scene. Immutable after load."""

    def __init__(self, scenes, descriptions):
        self.scenes: dict[str, Scene] = dict(scenes)
        self.descriptions: tuple[Description, ...] = tuple(descriptions)
        by_scene: dict[str, list[Description]] = {sid: [] for sid in self.scenes}
        missing = []
        for d in self.descriptions:
            if d.scene_id not in self.scenes:
                missing.append(d.scene_id)
            else:
                by_scene[d.scene_id].append(d)
        if missing:
            raise ValidationError(
                "descriptions reference unknown scenes: "
                + ", ".join(sorted(set(missing)))
            )
        self.by_scene = by_scene

    def __len__(self):
        return len(self.scenes)

    @property
    def scene_ids(self) -> list[str]:
        return sorted(self.scenes)

    def subset(self, scene_ids) -> "Corpus":
        keep = set(scene_ids)
        scenes = {sid: s for sid, s in self.scenes.items() if sid in keep}
        descriptions = [d for d in self.descriptions if d.scene_id in keep]
        return Corpus(scenes, descriptions)

    def save(self, scenes_path, descriptions_path):
        write_json(scenes_path, [s.to_json() for s in self.scenes.values()])
        write_json(descriptions_path, [d.to_json() for d in self.descriptions])


def load_corpus(scenes_path, descriptions_path) -> Corpus:
    """Load scenes.json + descriptions.json; every description must resolve."""
    scenes_data = read_json(scenes_path)
    if not isinstance(scenes_data, list):
        raise SchemaError(f"{scenes_path}: scenes file must be a JSON array")
    scenes: dict[str, Scene] = {}
    for i, obj in enumerate(scenes_data):
        try:
            scene = Scene.from_json(obj)
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, CorpusError):
                raise
            raise SchemaError(f"{scenes_path}: scene record #{i}: {e}") from e
        if scene.scene_id in scenes:
            raise ValidationError(f"duplicate scene id {scene.scene_id!r}")
        scenes[scene.scene_id] = scene

    desc_data = read_json(descriptions_path)
    if not isinstance(desc_data, list):
        raise SchemaError(f"{descriptions_path}: descriptions file must be a JSON array")
    descriptions = []
    for i, obj in enumerate(desc_data):
        try:
            descriptions.append(Description.from_json(obj))
        except (KeyError, TypeError) as e:
            raise SchemaError(f"{descriptions_path}: description record #{i}: {e}") from e
    return Corpus(scenes, descriptions)


def split_corpus(corpus, ratios=(0.70, 0.15, 0.15), seed=0, allow_empty=False):
    """Partition scenes into (train, dev, test) corpora.

    Dev and test sizes are floor(n * ratio); all remaining scenes go to
    train. Descriptions travel with their scene. Deterministic given seed.
    """
    if len(ratios) != 3 or any(r <= 0 for r in ratios):
        raise ValidationError(f"ratios must be 3 positive numbers, got {ratios}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValidationError(f"ratios must sum to 1, got {sum(ratios)}")
    n = len(corpus)
    if n < 3 and not allow_empty:
        raise ValidationError(f"cannot populate 3 splits from {n} scenes")

    n_dev = math.floor(n * ratios[1])
    n_test = math.floor(n * ratios[2])
    n_train = n - n_dev - n_test

    ids = corpus.scene_ids
    random.Random(seed).shuffle(ids)
    train_ids = ids[:n_train]
    dev_ids = ids[n_train:n_train + n_dev]
    test_ids = ids[n_train + n_dev:]
    return corpus.subset(train_ids), corpus.subset(dev_ids), corpus.subset(test_ids)


@dataclass(frozen=True)
class DiscriminationExample:
    """One (description, candidate scene) pair with a true/distractor label."""

    description: Description
    candidate: Scene
    label: bool


def build_discrimination_set(corpus, k=4, seed=0):
    """Per (scene, description) pair, one true example plus k distractors.

    Distractors are drawn uniformly without replacement from the other
    scenes of the same corpus (split), which keeps train/dev/test isolated.
    Returns a list of groups, each a list of k+1 DiscriminationExamples with
    the true example first.
    """
    scene_ids = corpus.scene_ids
    if k < 0:
        raise ValidationError("k must be >= 0")
    if k + 1 > len(scene_ids):
        raise ValidationError(
            f"need at least k+1={k + 1} scenes for k={k} distractors, have {len(scene_ids)}"
        )
    rng = random.Random(seed)
    groups = []
    for sid in scene_ids:
        others = [s for s in scene_ids if s != sid]
        for desc in corpus.by_scene[sid]:
            group = [DiscriminationExample(desc, corpus.scenes[sid], True)]
            for did in rng.sample(others, k):
                group.append(DiscriminationExample(desc, corpus.scenes[did], False))
            groups.append(group)
    return groups
