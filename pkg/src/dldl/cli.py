"""Command-line entry point: ``dldl {train,predict,eval,ablate,inspect-hypergraph}``.

Exit codes: 0 success, 1 runtime or data error, 2 usage error.
"""
import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import ConsistencyError, DLDLError
from .hypergraph import build_knn_hypergraph, compute_laplacian, summarize
from .inference import evaluate, predict_inductive, predict_transductive
from .model import (DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_DELTA, DEFAULT_DICT_SIZE,
                    DEFAULT_KNN, HyperParams)
from .solver import fit, fit_fixed_label

log = logging.getLogger("dldl")


def _add_hyperparams(p):
    p.add_argument("--dict-size", type=int, default=DEFAULT_DICT_SIZE, help="number of atoms K")
    p.add_argument("--knn", type=int, default=DEFAULT_KNN, help="neighbours per hyperedge")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="sparsity weight")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA, help="label term weight")
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="code smoothness weight")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6, help="relative decrease stopping tolerance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--classes", type=int, default=None,
                   help="explicit class count (required when no labels are given)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dldl", description="Semi-supervised dictionary learning with dynamic soft labels.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a model")
    p.add_argument("--features", required=True)
    p.add_argument("--labels")
    p.add_argument("--model", required=True, help="output model file")
    p.add_argument("--out", help="loss log file (default: <model>.loss)")
    _add_hyperparams(p)

    p = sub.add_parser("predict", help="classify samples with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", help="test features (inductive mode)")
    p.add_argument("--out", required=True, help="predictions file")
    p.add_argument("--transductive", action="store_true",
                   help="label the model's unlabeled training samples from F")
    p.add_argument("--scores", action="store_true", help="append per-class scores")
    p.add_argument("--test-alpha", type=float, default=None)

    p = sub.add_parser("eval", help="accuracy of a predictions file")
    p.add_argument("--predictions", required=True)
    p.add_argument("--labels", required=True, help="ground truth as index,label lines")

    p = sub.add_parser("ablate", help="dynamic vs fixed labels over several seeds")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--truth", required=True, help="ground truth used to score unlabeled samples")
    p.add_argument("--out", required=True, help="plot data: seed,dldl_acc,fixed_acc per line")
    p.add_argument("--repeats", type=int, default=1)
    _add_hyperparams(p)

    p = sub.add_parser("inspect-hypergraph", help="summarize the kNN hypergraph")
    p.add_argument("--features", required=True)
    p.add_argument("--knn", type=int, default=DEFAULT_KNN)
    p.add_argument("--eigenvalues", action="store_true",
                   help="also report the extreme Laplacian eigenvalues")
    return parser


def _validate(parser, args):
    for name in ("features", "labels", "model", "predictions", "truth"):
        if args.command == "train" and name == "model":
            continue
        path = getattr(args, name, None)
        if path is not None and not Path(path).is_file():
            parser.error(f"--{name}: no such file: {path}")
    if args.command == "predict" and not args.transductive and args.features is None:
        parser.error("predict needs --features unless --transductive is given")
    if args.command == "train" and args.labels is None and args.classes is None:
        parser.error("train needs --labels or --classes")
    if getattr(args, "repeats", 1) < 1:
        parser.error("--repeats must be >= 1")
    if hasattr(args, "dict_size"):
        try:
            _hyperparams(args)
        except DLDLError as exc:
            parser.error(str(exc))


def _hyperparams(args):
    return HyperParams(alpha=args.alpha, beta=args.beta, delta=args.delta,
                       dict_size=args.dict_size, knn=args.knn, max_iter=args.max_iter,
                       rel_tol=args.tol, seed=args.seed)


def _load_training(args):
    x = io.load_features(args.features)
    n = x.shape[1]
    if args.labels is not None:
        labels, c = io.load_labels(args.labels, n, args.classes)
    else:
        labels, c = np.full(n, -1, dtype=np.int64), args.classes
    prior = io.build_prior(labels, c)
    return x, prior


def cmd_train(args):
    hp = _hyperparams(args)
    x, prior = _load_training(args)
    lap = compute_laplacian(build_knn_hypergraph(x, hp.knn))
    log_path = args.out or f"{args.model}.loss"
    try:
        state = fit(x, prior, lap, hp)
    except ConsistencyError as exc:
        io.save_loss_log(exc.history, log_path)
        raise
    io.save_model(state, hp, args.model)
    io.save_loss_log(state.loss_history, log_path)
    for note in state.notes:
        log.info(note)
    print(f"trained {hp.dict_size} atoms in {len(state.loss_history)} iterations, "
          f"objective {state.loss_history[-1]:.6g}")
    return 0


def cmd_predict(args):
    state, hp = io.load_model(args.model)
    if args.transductive:
        report = predict_transductive(state)
    else:
        y = io.load_features(args.features)
        if y.shape[0] != state.d.shape[0]:
            raise DLDLError(f"features have dim {y.shape[0]}, model expects {state.d.shape[0]}")
        alpha = hp.alpha if args.test_alpha is None else args.test_alpha
        report = predict_inductive(state, y, alpha)
    io.save_predictions(report, args.out, with_scores=args.scores)
    return 0


def cmd_eval(args):
    pred_idx, pred = io.load_predictions(args.predictions)
    true_idx, truth = io.read_index_labels(args.labels)
    if true_idx.size == 0:
        raise DLDLError("truth file is empty")
    if pred_idx.size != true_idx.size or set(pred_idx.tolist()) != set(true_idx.tolist()):
        raise DLDLError(f"length mismatch: {pred_idx.size} predictions vs {true_idx.size} truth labels")
    acc = evaluate(pred[np.argsort(pred_idx)], truth[np.argsort(true_idx)])
    print(f"{100.0 * acc:.1f}%")
    return 0


def cmd_ablate(args):
    base = _hyperparams(args)
    x, prior = _load_training(args)
    n = x.shape[1]
    truth = np.full(n, -1, dtype=np.int64)
    t_idx, t_lab = io.read_index_labels(args.truth)
    if t_idx.size and t_idx.max() >= n:
        raise DLDLError(f"truth index {int(t_idx.max())} out of range for {n} samples")
    truth[t_idx] = t_lab
    unlabeled = np.flatnonzero(~prior.labeled_mask)
    scored = unlabeled[truth[unlabeled] >= 0]
    if scored.size == 0:
        raise DLDLError("truth covers none of the unlabeled samples")

    lap = compute_laplacian(build_knn_hypergraph(x, base.knn))
    rows = []
    for r in range(args.repeats):
        hp = HyperParams(**{**base.__dict__, "seed": base.seed + r})
        accs = []
        for trainer in (fit, fit_fixed_label):
            state = trainer(x, prior, lap, hp)
            decisions = np.argmax(state.f[:, scored], axis=0)
            accs.append(evaluate(decisions, truth[scored]))
        rows.append((hp.seed, *accs))
    io.write_text_atomic(args.out, "".join(f"{s},{a:.17g},{b:.17g}\n" for s, a, b in rows))
    dyn = float(np.mean([r[1] for r in rows]))
    fixed = float(np.mean([r[2] for r in rows]))
    print(f"transductive accuracy: dynamic {100 * dyn:.1f}% fixed {100 * fixed:.1f}%")
    print(f"difference: {100 * (dyn - fixed):+.1f} points over {len(rows)} seed(s)")
    if base.beta == 0:
        print("note: beta = 0 removes the label terms; the comparison is degenerate")
    return 0


def cmd_inspect_hypergraph(args):
    x = io.load_features(args.features)
    g = build_knn_hypergraph(x, args.knn)
    print(summarize(g, eigenvalues=args.eigenvalues))
    return 0


COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "inspect-hypergraph": cmd_inspect_hypergraph,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (DLDLError, OSError) as exc:
        print(f"dldl {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
