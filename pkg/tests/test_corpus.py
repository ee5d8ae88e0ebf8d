import json

import pytest
from hypothesis import given, settings, strategies as st

from sceneforge.corpus import (Corpus, Description, Scene, SceneObject,
                               SchemaError, ValidationError,
                               build_discrimination_set, load_corpus, load_model_db,
                               split_corpus)

from conftest import ROOM, make_scene


def write(path, obj):
    path.write_text(json.dumps(obj))
    return path


MODELS = [
    {"id": "m1", "category": "desk", "dims": [1.2, 0.6, 0.75],
     "isRoom": False, "supportHeight": 0.75},
    {"id": "m2", "category": "chair", "dims": [0.5, 0.5, 0.9],
     "isRoom": False, "supportHeight": 0},
]


def scene_json(sid, models=("m1",)):
    return {
        "id": sid,
        "room": {"min": [-2, -2, 0], "max": [2, 2, 2.5]},
        "objects": [
            {"model": m, "category": "desk", "pos": [0.1 * i, 0, 0],
             "yaw": 0, "scale": 1.0}
            for i, m in enumerate(models)
        ],
    }


class TestModelDb:
    def test_two_records(self, tmp_path):
        db = load_model_db(write(tmp_path / "m.json", MODELS))
        assert len(db) == 2
        assert db.categories == ["chair", "desk"]
        assert db.models_of("desk") == ["m1"]

    def test_empty(self, tmp_path):
        db = load_model_db(write(tmp_path / "m.json", []))
        assert len(db) == 0
        assert "m1" not in db
        assert db.models_of("desk") == []

    def test_duplicate_id_rejected(self, tmp_path):
        path = write(tmp_path / "m.json", [MODELS[0], MODELS[0]])
        with pytest.raises(ValidationError, match="m1"):
            load_model_db(path)

    def test_parse_failure_reports_line(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text('[\n{"id": "m1",}\n]')
        with pytest.raises(SchemaError, match="line 2"):
            load_model_db(path)

    def test_bad_dims(self, tmp_path):
        bad = dict(MODELS[0], dims=[0, 1, 1])
        with pytest.raises(ValidationError, match="dims"):
            load_model_db(write(tmp_path / "m.json", [bad]))

    def test_roundtrip(self, tmp_path, tiny_db):
        tiny_db.save(tmp_path / "m.json")
        again = load_model_db(tmp_path / "m.json")
        assert again.to_json() == tiny_db.to_json()


class TestCorpusLoad:
    def test_counts_per_scene(self, tmp_path):
        scenes = write(tmp_path / "s.json", [scene_json("s1"), scene_json("s2")])
        descs = write(tmp_path / "d.json", [
            {"sceneId": "s1", "text": "a desk", "source": "worker"},
            {"sceneId": "s1", "text": "desk again", "source": "worker"},
            {"sceneId": "s2", "text": "another desk", "source": "seed"},
        ])
        corpus = load_corpus(scenes, descs)
        assert len(corpus) == 2
        assert sorted(len(v) for v in corpus.by_scene.values()) == [1, 2]

    def test_dangling_scene_id(self, tmp_path):
        scenes = write(tmp_path / "s.json", [scene_json("s1")])
        descs = write(tmp_path / "d.json",
                      [{"sceneId": "s9", "text": "x", "source": "worker"}])
        with pytest.raises(ValidationError, match="s9"):
            load_corpus(scenes, descs)

    def test_zero_descriptions_ok(self, tmp_path):
        scenes = write(tmp_path / "s.json", [scene_json("s1")])
        corpus = load_corpus(scenes, write(tmp_path / "d.json", []))
        assert len(corpus) == 1 and corpus.descriptions == ()

    def test_empty_text_rejected(self):
        with pytest.raises(ValidationError):
            Description("s1", "")

    def test_scene_outside_bounds_rejected(self):
        with pytest.raises(ValidationError, match="outside"):
            Scene("s1", (SceneObject("m1", "desk", (5.0, 0, 0)),), ROOM)

    def test_yaw_normalized(self):
        obj = SceneObject("m1", "desk", (0, 0, 0), yaw=7.0)
        assert 0 <= obj.yaw < 6.2832

    def test_roundtrip(self, tmp_path):
        corpus = Corpus(
            {"s1": make_scene("s1", [("m1", "desk")])},
            [Description("s1", "a desk", "worker")],
        )
        corpus.save(tmp_path / "s.json", tmp_path / "d.json")
        again = load_corpus(tmp_path / "s.json", tmp_path / "d.json")
        assert again.scenes["s1"].to_json() == corpus.scenes["s1"].to_json()
        assert [d.to_json() for d in again.descriptions] == \
               [d.to_json() for d in corpus.descriptions]


def corpus_of(n):
    scenes = {f"s{i:03d}": make_scene(f"s{i:03d}", [("m1", "desk")]) for i in range(n)}
    descs = [Description(sid, f"scene {sid}", "synthetic") for sid in scenes]
    return Corpus(scenes, descs)


class TestSplit:
    def test_100_scenes(self):
        train, dev, test = split_corpus(corpus_of(100), seed=7)
        assert (len(train), len(dev), len(test)) == (70, 15, 15)

    def test_remainder_to_train(self):
        train, dev, test = split_corpus(corpus_of(10), seed=0)
        assert (len(train), len(dev), len(test)) == (8, 1, 1)

    def test_deterministic(self):
        corpus = corpus_of(50)
        a = split_corpus(corpus, seed=3)
        b = split_corpus(corpus, seed=3)
        assert [x.scene_ids for x in a] == [y.scene_ids for y in b]

    def test_partition_by_scene(self):
        corpus = corpus_of(20)
        train, dev, test = split_corpus(corpus, seed=1)
        ids = train.scene_ids + dev.scene_ids + test.scene_ids
        assert sorted(ids) == corpus.scene_ids
        for part in (train, dev, test):
            for d in part.descriptions:
                assert d.scene_id in part.scenes

    def test_too_few_scenes(self):
        with pytest.raises(ValidationError):
            split_corpus(corpus_of(2), seed=0)
        train, dev, test = split_corpus(corpus_of(2), seed=0, allow_empty=True)
        assert len(train) == 2 and len(dev) == 0 and len(test) == 0

    def test_bad_ratios(self):
        with pytest.raises(ValidationError):
            split_corpus(corpus_of(10), ratios=(0.5, 0.2, 0.2), seed=0)

    @given(n=st.integers(3, 120), seed=st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_partition_property(self, n, seed):
        corpus = corpus_of(n)
        train, dev, test = split_corpus(corpus, seed=seed)
        assert len(dev) == int(n * 0.15)
        assert len(test) == int(n * 0.15)
        assert sorted(train.scene_ids + dev.scene_ids + test.scene_ids) == corpus.scene_ids


class TestDiscriminationSet:
    def test_five_scenes_forced_draw(self):
        corpus = corpus_of(5)
        groups = build_discrimination_set(corpus, k=4, seed=11)
        assert len(groups) == 5
        for group in groups:
            assert len(group) == 5
            assert group[0].label is True
            true_id = group[0].candidate.scene_id
            distractors = {ex.candidate.scene_id for ex in group[1:]}
            assert distractors == set(corpus.scene_ids) - {true_id}

    def test_k_zero(self):
        groups = build_discrimination_set(corpus_of(3), k=0, seed=0)
        assert all(len(g) == 1 and g[0].label for g in groups)

    def test_too_many_distractors(self):
        with pytest.raises(ValidationError):
            build_discrimination_set(corpus_of(4), k=4, seed=0)

    def test_deterministic(self):
        corpus = corpus_of(30)
        a = build_discrimination_set(corpus, k=4, seed=5)
        b = build_discrimination_set(corpus, k=4, seed=5)
        assert [[e.candidate.scene_id for e in g] for g in a] == \
               [[e.candidate.scene_id for e in g] for g in b]

    @given(n=st.integers(6, 40), k=st.integers(0, 5), seed=st.integers(0, 10**6))
    @settings(max_examples=25, deadline=None)
    def test_distractor_validity(self, n, k, seed):
        groups = build_discrimination_set(corpus_of(n), k=k, seed=seed)
        for group in groups:
            assert len(group) == k + 1
            assert sum(ex.label for ex in group) == 1
            true_id = group[0].candidate.scene_id
            rest = [ex.candidate.scene_id for ex in group[1:]]
            assert true_id not in rest
            assert len(set(rest)) == len(rest)
