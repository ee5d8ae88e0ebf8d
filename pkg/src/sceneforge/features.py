"""Binary co-occurrence features between description n-grams and scene objects.

A feature key pairs a unigram or bigram with either an object category or a
specific model id. Features are presence indicators (set semantics), so
extraction is order-independent within a scene.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .corpus import write_json, read_json

CATEGORY = "category"
MODEL = "model"


@dataclass(frozen=True, order=True)
class FeatureKey:
    ngram: str
    target_type: str  # CATEGORY or MODEL
    target: str

    def __post_init__(self):
        if self.target_type not in (CATEGORY, MODEL):
            raise ValueError(f"bad target_type {self.target_type!r}")
        if not self.target:
            raise ValueError("empty feature target")
        if not self.ngram or not 1 <= self.ngram.count(" ") + 1 <= 2:
            raise ValueError(f"ngram must have 1 or 2 tokens: {self.ngram!r}")


class FeatureVocab:
    """Bijective key -> dense index map; freezes for test-time vectorization."""

    def __init__(self):
        self._index: dict[FeatureKey, int] = {}
        self._keys: list[FeatureKey] = []
        self.frozen = False

    def __len__(self):
        return len(self._keys)

    def __contains__(self, key):
        return key in self._index

    def keys(self):
        return list(self._keys)

    def key_at(self, index) -> FeatureKey:
        return self._keys[index]

    def index_of(self, key):
        """Index for key; grows the vocab unless frozen, else None for unknowns."""
        idx = self._index.get(key)
        if idx is None and not self.frozen:
            idx = len(self._keys)
            self._index[key] = idx
            self._keys.append(key)
        return idx

    def freeze(self):
        self.frozen = True
        return self

    def indices_for_target_type(self, target_type) -> np.ndarray:
        return np.array(
            [i for i, k in enumerate(self._keys) if k.target_type == target_type],
            dtype=np.int64,
        )


def _token_text(tok):
    return tok if isinstance(tok, str) else tok.text


def _is_word(text):
    return any(c.isalnum() for c in text)


def text_ngrams(sentences) -> set[str]:
    """All unigrams plus adjacent bigrams per sentence, punctuation excluded."""
    grams = set()
    for sentence in sentences:
        words = [t for t in (_token_text(tok) for tok in sentence) if _is_word(t)]
        grams.update(words)
        grams.update(f"{a} {b}" for a, b in zip(words, words[1:]))
    return grams


def pair_features(description_sentences, scene, model_db=None) -> set[FeatureKey]:
    """Cartesian product of description n-grams with the scene's distinct
    categories and distinct model ids."""
    grams = text_ngrams(description_sentences)
    categories = set()
    models = set()
    for obj in scene.objects:
        models.add(obj.model_id)
        if model_db is not None and obj.model_id in model_db:
            categories.add(model_db.get(obj.model_id).category)
        else:
            categories.add(obj.category)
    keys = set()
    for g in grams:
        for c in categories:
            keys.add(FeatureKey(g, CATEGORY, c))
        for m in models:
            keys.add(FeatureKey(g, MODEL, m))
    return keys


def vectorize(keys, vocab) -> np.ndarray:
    """Sorted dense indices for a key set. Keys are visited in canonical
    order so vocabulary growth is reproducible; frozen vocabs drop unknowns."""
    out = []
    for key in sorted(keys):
        idx = vocab.index_of(key)
        if idx is not None:
            out.append(idx)
    return np.array(sorted(out), dtype=np.int64)


class WeightVector:
    """Dense weights aligned to a FeatureVocab, plus an unregularized bias."""

    def __init__(self, vocab, values, bias=0.0):
        values = np.asarray(values, dtype=np.float64)
        if len(values) != len(vocab):
            raise ValueError(f"weight length {len(values)} != vocab size {len(vocab)}")
        self.vocab = vocab
        self.values = values
        self.bias = float(bias)
        self._ngram_index = None

    def entries_for_ngram(self, ngram):
        """(target_type, target, weight) triples for every key on this n-gram."""
        if self._ngram_index is None:
            index: dict[str, list[tuple[str, str, int]]] = {}
            for i, key in enumerate(self.vocab.keys()):
                index.setdefault(key.ngram, []).append((key.target_type, key.target, i))
            self._ngram_index = index
        return [(tt, tgt, self.values[i])
                for tt, tgt, i in self._ngram_index.get(ngram, [])]

    def masked_values(self, target_type) -> np.ndarray:
        """Copy of values with every other target type zeroed."""
        keep = self.vocab.indices_for_target_type(target_type)
        out = np.zeros_like(self.values)
        out[keep] = self.values[keep]
        return out

    def to_records(self):
        order = sorted(
            range(len(self.values)),
            key=lambda i: (-self.values[i],
                           self.vocab.key_at(i).ngram,
                           self.vocab.key_at(i).target_type,
                           self.vocab.key_at(i).target),
        )
        return [
            {
                "ngram": self.vocab.key_at(i).ngram,
                "targetType": self.vocab.key_at(i).target_type,
                "target": self.vocab.key_at(i).target,
                "weight": float(self.values[i]),
            }
            for i in order
        ]

    def save(self, path):
        write_json(path, self.to_records())

    @classmethod
    def load(cls, path):
        records = read_json(path)
        vocab = FeatureVocab()
        values = []
        for rec in records:
            key = FeatureKey(rec["ngram"], rec["targetType"], rec["target"])
            vocab.index_of(key)
            values.append(float(rec["weight"]))
        return cls(vocab.freeze(), np.array(values, dtype=np.float64))


class DiscriminationData:
    """Vectorized discrimination groups: binary design matrix, labels,
    per-group row ranges, and the vocabulary the rows are aligned to."""

    def __init__(self, X, y, group_bounds, vocab):
        self.X = X
        self.y = y
        self.group_bounds = group_bounds
        self.vocab = vocab

    @property
    def num_groups(self):
        return len(self.group_bounds)


def vectorize_groups(groups, model_db, vocab=None) -> DiscriminationData:
    """Featurize discrimination groups against a (possibly growing) vocab."""
    from .textproc import tokenize_and_split

    vocab = vocab if vocab is not None else FeatureVocab()
    indptr = [0]
    indices: list[np.ndarray] = []
    labels = []
    bounds = []
    row = 0
    for group in groups:
        start = row
        sentences = tokenize_and_split(group[0].description.text)
        for ex in group:
            keys = pair_features(sentences, ex.candidate, model_db)
            idx = vectorize(keys, vocab)
            indices.append(idx)
            indptr.append(indptr[-1] + len(idx))
            labels.append(1.0 if ex.label else 0.0)
            row += 1
        bounds.append((start, row))
    flat = np.concatenate(indices) if indices else np.array([], dtype=np.int64)
    X = sparse.csr_matrix(
        (np.ones(len(flat)), flat, np.array(indptr, dtype=np.int64)),
        shape=(row, len(vocab)),
    )
    return DiscriminationData(X, np.array(labels), bounds, vocab)
