import pytest

from sceneforge.corpus import Box, ModelDatabase, ModelRecord, Scene, SceneObject
from sceneforge.features import FeatureKey, FeatureVocab, WeightVector

ROOM = Box(min=(-2.0, -2.0, 0.0), max=(2.0, 2.0, 2.5))


@pytest.fixture
def tiny_db():
    return ModelDatabase([
        ModelRecord("m_chair_a", "Chair", (0.45, 0.45, 0.9)),
        ModelRecord("m_chair_b", "Chair", (0.5, 0.5, 0.85)),
        ModelRecord("m_couch_a", "Couch", (1.8, 0.85, 0.8)),
        ModelRecord("m_desk_a", "desk", (1.2, 0.6, 0.75), support_height=0.75),
        ModelRecord("m_desk_red", "desk", (1.1, 0.6, 0.74), support_height=0.74),
        ModelRecord("m_table_a", "table", (1.0, 1.0, 0.75), support_height=0.75),
        ModelRecord("m_cup_a", "cup", (0.08, 0.08, 0.1)),
        ModelRecord("m_lamp_a", "lamp", (0.3, 0.3, 1.5)),
    ])


def make_scene(scene_id, specs, room=ROOM):
    """specs: list of (model_id, category) or (model_id, category, position)."""
    objects = []
    for i, spec in enumerate(specs):
        position = spec[2] if len(spec) > 2 else (-1.5 + 0.75 * i, 0.0, 0.0)
        objects.append(SceneObject(spec[0], spec[1], position))
    return Scene(scene_id, tuple(objects), room)


def make_weights(entries, bias=0.0):
    """WeightVector from {(ngram, target_type, target): weight}."""
    vocab = FeatureVocab()
    values = {}
    for (ngram, target_type, target), weight in entries.items():
        idx = vocab.index_of(FeatureKey(ngram, target_type, target))
        values[idx] = weight
    vocab.freeze()
    dense = [values[i] for i in range(len(vocab))]
    return WeightVector(vocab, dense, bias=bias)
