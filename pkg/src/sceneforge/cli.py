"""Command-line pipeline orchestration.

Subcommands: gen-synthetic, split, train, discriminate, ground, generate,
asts, eval, render. All randomness flows from --seed (default: the
SCENEFORGE_SEED environment variable, else 0); every report embeds the
resolved configuration so runs are reproducible. Exit codes: 0 success,
1 validation/usage error, 2 runtime failure.
"""

import argparse
import os
import sys
from pathlib import Path

from . import grounding, layout, learner, synthetic, textproc
from .asts import asts, correlation_block, evaluate_methods
from .corpus import (CorpusError, build_discrimination_set, load_corpus,
                     load_model_db, read_json, split_corpus, write_json)
from .features import WeightVector, vectorize_groups


def _default_seed():
    value = os.environ.get("SCENEFORGE_SEED")
    return int(value) if value else 0


def _config_block(args, command):
    resolved = {k: (str(v) if isinstance(v, Path) else v)
                for k, v in sorted(vars(args).items()) if k != "func"}
    return {"command": command, "config": resolved}


def _corpus_paths(args):
    root = Path(args.corpus)
    return {
        "models": Path(args.models) if args.models else root / "models.json",
        "scenes": root / "scenes.json",
        "descriptions": root / "descriptions.json",
        "lexicon": Path(args.lexicon) if getattr(args, "lexicon", None)
                   else root / "lexicon.json",
        "gold": root / "gold_templates.json",
        "split": Path(args.split) if getattr(args, "split", None)
                 else root / "split.json",
    }


def _load_lexicon(path):
    return textproc.Lexicon.load(path) if path.exists() else textproc.Lexicon.default()


def _load_split_ids(paths, corpus, seed):
    if paths["split"].exists():
        data = read_json(paths["split"])
        return data["train"], data["dev"], data["test"]
    train, dev, test = split_corpus(corpus, seed=seed)
    return train.scene_ids, dev.scene_ids, test.scene_ids


def cmd_gen_synthetic(args):
    spec = synthetic.SyntheticSpec(
        num_categories=args.categories,
        num_models=args.models_count,
        num_scenes=args.scenes,
        noise=args.noise,
        descriptions_per_scene=args.descriptions_per_scene,
    )
    bundle = synthetic.gen_synthetic_corpus(spec, seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bundle.model_db.save(out / "models.json")
    bundle.corpus.save(out / "scenes.json", out / "descriptions.json")
    bundle.lexicon.save(out / "lexicon.json")
    synthetic.save_gold_templates(out / "gold_templates.json",
                                  bundle.corpus, bundle.gold_templates)
    write_json(out / "manifest.json", _config_block(args, "gen-synthetic"))
    print(f"wrote {len(bundle.corpus.scenes)} scenes, "
          f"{len(bundle.corpus.descriptions)} descriptions to {out}")
    return 0


def cmd_split(args):
    paths = _corpus_paths(args)
    corpus = load_corpus(paths["scenes"], paths["descriptions"])
    train, dev, test = split_corpus(corpus, seed=args.seed)
    report = _config_block(args, "split")
    report.update(train=train.scene_ids, dev=dev.scene_ids, test=test.scene_ids)
    write_json(args.out, report)
    print(f"split {len(corpus)} scenes into "
          f"{len(train)}/{len(dev)}/{len(test)} -> {args.out}")
    return 0


def _prepare_training(args, paths):
    corpus = load_corpus(paths["scenes"], paths["descriptions"])
    model_db = load_model_db(paths["models"])
    train_ids, dev_ids, test_ids = _load_split_ids(paths, corpus, args.seed)
    k = args.k_distractors
    train_groups = build_discrimination_set(corpus.subset(train_ids), k=k, seed=args.seed)
    data = vectorize_groups(train_groups, model_db)
    data.vocab.freeze()
    return corpus, model_db, data, dev_ids, test_ids


def cmd_train(args):
    paths = _corpus_paths(args)
    corpus, model_db, data, dev_ids, _ = _prepare_training(args, paths)
    config = learner.TrainConfig(l2_strength=args.l2, seed=args.seed)
    result = learner.train(data, config)
    result.weights.save(args.out)

    dev_groups = build_discrimination_set(
        corpus.subset(dev_ids), k=args.k_distractors, seed=args.seed + 1)
    dev_data = vectorize_groups(dev_groups, model_db, vocab=data.vocab)
    report = _config_block(args, "train")
    report.update({
        "iterations": result.iterations,
        "final_loss": result.final_loss,
        "gradient_norm": result.gradient_norm,
        "converged": result.converged,
        "bias": result.weights.bias,
        "num_features": len(data.vocab),
        "num_train_groups": data.num_groups,
        "dev_accuracy": {
            mode: learner.eval_discrimination(result.weights, dev_data, mode)
            for mode in learner.EVAL_MODES
        },
    })
    report_path = Path(args.report) if args.report else Path(args.out).parent / "train_report.json"
    write_json(report_path, report)
    print(f"trained {len(data.vocab)} features in {result.iterations} iterations; "
          f"dev accuracy full={report['dev_accuracy']['full']:.3f} "
          f"modelid_only={report['dev_accuracy']['modelid_only']:.3f}")
    return 0


def cmd_discriminate(args):
    paths = _corpus_paths(args)
    corpus = load_corpus(paths["scenes"], paths["descriptions"])
    model_db = load_model_db(paths["models"])
    weights = WeightVector.load(args.weights)
    _, _, test_ids = _load_split_ids(paths, corpus, args.seed)
    groups = build_discrimination_set(
        corpus.subset(test_ids), k=args.k_distractors, seed=args.seed + 2)
    data = vectorize_groups(groups, model_db, vocab=weights.vocab)
    report = _config_block(args, "discriminate")
    report["test_accuracy"] = {
        mode: learner.eval_discrimination(weights, data, mode)
        for mode in learner.EVAL_MODES
    }
    report["num_groups"] = data.num_groups
    if args.out:
        write_json(args.out, report)
    for mode, acc in report["test_accuracy"].items():
        print(f"{mode}: {acc:.4f}")
    return 0


def cmd_ground(args):
    model_db = load_model_db(args.models) if args.models else None
    weights = WeightVector.load(args.weights) if args.weights else None
    lexicon = _load_lexicon(Path(args.lexicon)) if args.lexicon else textproc.Lexicon.default()
    template = grounding.build_template(
        args.condition, model_db=model_db, weights=weights,
        text=args.text, lexicon=lexicon, seed=args.seed)
    template.save(args.out)
    print(f"{args.condition}: {len(template.nodes)} nodes, "
          f"{len(template.relations)} relations -> {args.out}")
    return 0


def cmd_generate(args):
    template = grounding.SceneTemplate.load(args.template)
    model_db = load_model_db(args.models)
    config = layout.LayoutConfig(num_samples=args.num_samples, seed=args.seed)
    scene = layout.synthesize(template, model_db, config)
    write_json(args.out, scene.to_json())
    if args.svg:
        Path(args.svg).write_text(layout.render_svg(scene, model_db))
    flag = " (degraded)" if scene.degraded else ""
    print(f"synthesized {len(scene.objects)} objects{flag} -> {args.out}")
    return 0


def cmd_asts(args):
    from .corpus import Scene
    template = grounding.SceneTemplate.load(args.template)
    scene = Scene.from_json(read_json(args.scene))
    print(asts(template, scene))
    return 0


def cmd_eval(args):
    paths = _corpus_paths(args)
    corpus = load_corpus(paths["scenes"], paths["descriptions"])
    model_db = load_model_db(paths["models"])
    lexicon = _load_lexicon(paths["lexicon"])
    weights = WeightVector.load(args.weights)
    _, dev_ids, _ = _load_split_ids(paths, corpus, args.seed)

    gold = None
    if paths["gold"].exists():
        all_gold = synthetic.load_gold_templates(paths["gold"])
        keep = set(dev_ids)
        gold = tuple(t for d, t in zip(corpus.descriptions, all_gold)
                     if d.scene_id in keep)
    dev = corpus.subset(dev_ids)

    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    report = _config_block(args, "eval")
    report.update(evaluate_methods(
        dev, weights, model_db, lexicon, methods=methods,
        gold_templates=gold, seed=args.seed))
    if args.ratings:
        ratings = read_json(args.ratings)
        report["correlation"] = correlation_block(report, ratings)
    write_json(args.out, report)
    for m in methods:
        print(f"{m:8s} mean ASTS = {report['methods'][m]['mean_asts']:.4f}")
    return 0


def cmd_render(args):
    from .corpus import Scene
    scene = Scene.from_json(read_json(args.scene))
    model_db = load_model_db(args.models) if args.models else None
    Path(args.out).write_text(layout.render_svg(scene, model_db))
    print(f"rendered {len(scene.objects)} objects -> {args.out}")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def build_parser():
    parser = _Parser(prog="sceneforge",
                     description="Text-to-3D-scene template pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--seed", type=int, default=_default_seed())
        p.set_defaults(func=func)
        return p

    p = add("gen-synthetic", cmd_gen_synthetic, help="generate a synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--scenes", type=int, default=300)
    p.add_argument("--categories", type=int, default=15)
    p.add_argument("--models-count", type=int, default=40, dest="models_count")
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--descriptions-per-scene", type=int, default=2)

    p = add("split", cmd_split, help="write a train/dev/test scene split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--models")
    p.add_argument("--out", required=True)

    p = add("train", cmd_train, help="train grounding weights on the train split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--models")
    p.add_argument("--split")
    p.add_argument("--out", required=True, help="weights.json path")
    p.add_argument("--report")
    p.add_argument("--k-distractors", type=int, default=4, dest="k_distractors")
    p.add_argument("--l2", type=float, default=1.0)

    p = add("discriminate", cmd_discriminate,
            help="evaluate discrimination accuracy on the test split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--models")
    p.add_argument("--split")
    p.add_argument("--weights", required=True)
    p.add_argument("--k-distractors", type=int, default=4, dest="k_distractors")
    p.add_argument("--out")

    p = add("ground", cmd_ground, help="build a scene template from text")
    p.add_argument("--text", required=True)
    p.add_argument("--condition", default="combo", choices=grounding.METHODS)
    p.add_argument("--weights")
    p.add_argument("--models")
    p.add_argument("--lexicon")
    p.add_argument("--out", required=True)

    p = add("generate", cmd_generate, help="synthesize a 3D scene from a template")
    p.add_argument("--template", required=True)
    p.add_argument("--models", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--svg")
    p.add_argument("--num-samples", type=int, default=100, dest="num_samples")

    p = add("asts", cmd_asts, help="score a template against a scene")
    p.add_argument("--template", required=True)
    p.add_argument("--scene", required=True)

    p = add("eval", cmd_eval, help="mean ASTS per method on the dev split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--models")
    p.add_argument("--lexicon")
    p.add_argument("--split")
    p.add_argument("--weights", required=True)
    p.add_argument("--methods", default="random,learned,rule,combo")
    p.add_argument("--ratings")
    p.add_argument("--out", required=True)

    p = add("render", cmd_render, help="render a scene to top-down SVG")
    p.add_argument("--scene", required=True)
    p.add_argument("--models")
    p.add_argument("--out", required=True)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except CorpusError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001 - boundary between library and shell
        print(f"runtime failure: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
