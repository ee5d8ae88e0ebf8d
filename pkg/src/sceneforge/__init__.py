"""sceneforge: text-to-3D-scene templates with learned lexical grounding."""

from .corpus import (Box, Corpus, Description, DiscriminationExample,
                     ModelDatabase, ModelRecord, Scene, SceneObject,
                     CorpusError, SchemaError, ValidationError,
                     build_discrimination_set, load_corpus, load_model_db,
                     split_corpus)
from .features import (FeatureKey, FeatureVocab, WeightVector, pair_features,
                       text_ngrams, vectorize, vectorize_groups)
from .grounding import (SceneTemplate, TemplateNode, build_template,
                        choose_category, score_category, select_model)
from .learner import (TrainConfig, TrainResult, eval_discrimination,
                      loss_and_gradient, predict, train)
from .layout import LayoutConfig, check_collision, render_svg, score_layout, synthesize
from .asts import asts, asts_bruteforce, correlate, evaluate_methods, pair_similarity
from .synthetic import SyntheticSpec, gen_synthetic_corpus
from .textproc import (Lexicon, ParsedUtterance, SpatialRelation, parse,
                       tokenize_and_split)

__version__ = "0.1.0"
