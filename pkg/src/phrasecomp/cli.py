"""Command-line pipeline: extract, rank, build-list, train, score, evaluate,
supervised, grid.

Every subcommand reads and writes plain TSV, takes randomness only through
explicit --seed flags, and is bit-for-bit idempotent given identical inputs.
"""

from __future__ import annotations

import argparse
import contextlib
import sys
from typing import Callable, Optional, Sequence

import numpy as np

from .datasets import FORMATS, CompoundEntry, load_dataset
from .dense import DenseEmbedding, load_dense
from .extraction import ExtractionStats, PairOccurrence, extract_lines
from .hyperbolic import PoincareEmbedding, PoincareModel
from .ranking import RankedPairList, aggregate, build_training_list, drop_top_percent, normalize
from .regression import REGRESSORS, ProtocolResult, SplitPlan, run_protocol
from .scoring import SOURCE_COMBINED, SOURCE_UNCOVERED, CompositionalityScorer
from .stats import abs_rho, spearman, wilcoxon_signed_rank, z_test


@contextlib.contextmanager
def _open_in(path: str):
    if path == "-":
        yield sys.stdin
    else:
        with open(path, "r", encoding="utf-8") as fh:
            yield fh


@contextlib.contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8") as fh:
            yield fh


def _read_pair_rows(path: str, min_cols: int = 2) -> list[tuple[str, str]]:
    pairs = []
    with _open_in(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) < min_cols:
                raise ValueError(f"{path}:{line_no}: expected at least {min_cols} columns")
            pairs.append((cols[0], cols[1]))
    return pairs


def _load_gold(args) -> list[CompoundEntry]:
    entries, report = load_dataset(
        args.dataset,
        args.format,
        dataset_id=args.dataset_id,
        phrase_col=args.phrase_col,
        score_col=args.score_col,
    )
    for line_no, message in report.errors:
        print(f"warning\t{args.dataset}:{line_no}\t{message}", file=sys.stderr)
    return entries


def _load_dense(path: str) -> DenseEmbedding:
    emb, report = load_dense(path)
    if report.rows_skipped:
        print(
            f"warning\t{path}\tskipped rows: dim_mismatch={report.dim_mismatch} "
            f"duplicates={report.duplicates} zero_norm={report.zero_norm} "
            f"unparseable={report.unparseable}",
            file=sys.stderr,
        )
    return emb


def _targets_for(entries: Sequence[CompoundEntry]) -> list[str]:
    out = []
    for e in entries:
        out.extend((e.phrase, e.w1, e.w2))
    return out


def _add_gold_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", required=True, help="gold-standard TSV")
    p.add_argument("--format", required=True, choices=FORMATS)
    p.add_argument("--dataset-id", default=None, help="label stored on entries (default per format)")
    p.add_argument("--phrase-col", type=int, default=0, help="phrase column for reddy-style files")
    p.add_argument("--score-col", type=int, default=1, help="score column for reddy-style files")


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--negatives", type=int, default=2)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--burn-in", type=int, default=10)
    p.add_argument("--l2", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)


def _model_from_args(args) -> PoincareModel:
    return PoincareModel(
        dim=args.dim,
        negatives=args.negatives,
        learning_rate=args.lr,
        epochs=args.epochs,
        burn_in_epochs=args.burn_in,
        l2_coeff=args.l2,
        seed=args.seed,
    )


def cmd_extract(args) -> int:
    stats = ExtractionStats()
    with _open_in(args.input) as src, _open_out(args.output) as dst:
        for occ in extract_lines(src, stats):
            dst.write(f"{occ.hyponym}\t{occ.hypernym}\t{occ.pattern_id}\n")
    print(
        f"extract\tsentences={stats.sentences} malformed={stats.malformed_lines} pairs={stats.pairs}",
        file=sys.stderr,
    )
    return 0


def cmd_rank(args) -> int:
    rows = _read_pair_rows(args.pairs)
    occurrences = (PairOccurrence(a, b, 0) for a, b in rows)
    ranked = normalize(aggregate(occurrences))
    ranked.save(args.output)
    print(f"rank\toccurrences={len(rows)} pairs={len(ranked)}", file=sys.stderr)
    return 0


def cmd_build_list(args) -> int:
    ranked = RankedPairList.load(args.ranked)
    if args.drop_top_percent:
        ranked = drop_top_percent(ranked, args.drop_top_percent)
    entries = _load_gold(args)
    pairs, report = build_training_list(ranked, _targets_for(entries), args.k, args.m)
    with _open_out(args.output) as dst:
        for hypo, hyper in pairs:
            dst.write(f"{hypo}\t{hyper}\n")
    print(
        f"build-list\tpairs={len(pairs)} target_pairs={report.n_target_pairs} "
        f"frequent_pairs={report.n_frequent_pairs} uncovered_targets={len(report.uncovered_targets)}",
        file=sys.stderr,
    )
    return 0


def cmd_train(args) -> int:
    pairs = _read_pair_rows(args.pairs)
    model = _model_from_args(args).fit(pairs)
    model.embedding_.save(args.output)
    print(
        f"train\tvocab={len(model.embedding_)} dim={model.embedding_.dim} "
        f"final_loss={model.final_loss_:.6f}",
        file=sys.stderr,
    )
    return 0


def cmd_score(args) -> int:
    entries = _load_gold(args)
    dense = _load_dense(args.dsm)
    poincare = PoincareEmbedding.load(args.poincare)
    ranked = RankedPairList.load(args.ranked)
    if args.drop_top_percent:
        ranked = drop_top_percent(ranked, args.drop_top_percent)
    scorer = CompositionalityScorer(
        dense, poincare, ranked, alpha=args.alpha, k=args.k, fallback=not args.no_fallback
    )
    scored, report = scorer.score_entries(entries)
    with _open_out(args.output) as dst:
        for se in scored:
            if se.source == SOURCE_UNCOVERED:
                continue
            dst.write(f"{se.entry.phrase}\t{repr(se.entry.gold)}\t{repr(se.score)}\t{se.source}\n")
    print(
        f"score\tcombined={report.combined} fallback={report.fallback} uncovered={report.uncovered}",
        file=sys.stderr,
    )
    return 0


def _read_predictions(path: str) -> list[tuple[str, float, float, str]]:
    rows = []
    with _open_in(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) != 4:
                raise ValueError(f"{path}:{line_no}: expected 4 columns")
            try:
                rows.append((cols[0], float(cols[1]), float(cols[2]), cols[3]))
            except ValueError:
                raise ValueError(f"{path}:{line_no}: bad gold or score") from None
    if not rows:
        raise ValueError(f"{path}: no prediction rows")
    return rows


def cmd_evaluate(args) -> int:
    rows_a = _read_predictions(args.predictions)
    golds = [r[1] for r in rows_a]
    scores_a = [r[2] for r in rows_a]
    lines = [
        ("n", str(len(rows_a))),
        ("rho", repr(spearman(scores_a, golds))),
        ("abs_rho", repr(abs_rho(scores_a, golds))),
    ]
    if args.compare:
        rows_b = _read_predictions(args.compare)
        b_index = {r[0]: r for r in rows_b}
        paired_a, paired_b, paired_gold = [], [], []
        for phrase, gold, score, _ in rows_a:
            other = b_index.get(phrase)
            if other is None:
                continue
            if abs(other[1] - gold) > 1e-9:
                raise ValueError(f"gold mismatch for {phrase!r} between prediction files")
            paired_a.append(score)
            paired_b.append(other[2])
            paired_gold.append(gold)
        if len(paired_a) < 2:
            raise ValueError("fewer than two common phrases between prediction files")
        wil = wilcoxon_signed_rank(paired_a, paired_b)
        zres = z_test(paired_a, paired_b)
        lines += [
            ("n_common", str(len(paired_a))),
            ("abs_rho_a", repr(abs_rho(paired_a, paired_gold))),
            ("abs_rho_b", repr(abs_rho(paired_b, paired_gold))),
            ("wilcoxon_w", repr(wil.statistic)),
            ("wilcoxon_p", repr(wil.p_value)),
            ("wilcoxon_method", wil.method),
            ("z", repr(zres.statistic)),
            ("z_p", repr(zres.p_value)),
        ]
    with _open_out(args.output) as dst:
        for key, value in lines:
            dst.write(f"{key}\t{value}\n")
    return 0


def cmd_supervised(args) -> int:
    entries = _load_gold(args)
    dense = _load_dense(args.dsm)
    poincare = PoincareEmbedding.load(args.poincare)
    model_cls = REGRESSORS[args.model]
    if args.model == "kernel-ridge":
        model = model_cls(lam=args.kr_lambda, gamma=args.kr_gamma)
    elif args.model == "pls":
        model = model_cls(n_components=args.pls_components)
    else:
        model = model_cls(k=args.knn_k)
    plan = SplitPlan(seed=args.seed, n_splits=args.splits, train_fraction=args.train_fraction)
    result = run_protocol(entries, dense, poincare, model, args.alpha, plan)
    _write_protocol(result, args.output)
    print(
        f"supervised\tmodel={args.model} alpha={args.alpha} "
        f"mean_abs_rho={result.mean_abs_rho:.4f} std={result.std_abs_rho:.4f}",
        file=sys.stderr,
    )
    return 0


def _write_protocol(result: ProtocolResult, path: str) -> None:
    with _open_out(path) as dst:
        dst.write("split_id\trho_dsm\trho_poincare\trho_mixed\n")
        for row in result.splits:
            dst.write(
                f"{row.split_id}\t{repr(row.rho_dsm)}\t{repr(row.rho_poincare)}\t{repr(row.rho_mixed)}\n"
            )
        for label, agg in (("mean", np.mean), ("std", _sample_std)):
            dst.write(
                label
                + "\t"
                + "\t".join(
                    repr(float(agg([getattr(r, f) for r in result.splits])))
                    for f in ("rho_dsm", "rho_poincare", "rho_mixed")
                )
                + "\n"
            )


def _sample_std(values) -> float:
    values = np.asarray(values, dtype=float)
    return float(values.std(ddof=1)) if len(values) > 1 else 0.0


def grid_search(
    entries: Sequence[CompoundEntry],
    dense: DenseEmbedding,
    ranked: RankedPairList,
    k_values: Sequence[int],
    m_values: Sequence[float],
    alpha_values: Sequence[float],
    drop_percent: float = 0.0,
    train_fn: Optional[Callable[[Sequence[tuple[str, str]]], PoincareEmbedding]] = None,
) -> list[dict]:
    """One evaluation per (k, m, alpha) cell on the reduced dataset.

    The embedding is retrained when k or m changes and reused across alpha
    values. Cell failures are recorded in the row, never raised.
    """
    if not (k_values and m_values and alpha_values):
        raise ValueError("grids must be non-empty")
    if train_fn is None:
        train_fn = lambda pairs: PoincareModel().fit(pairs).embedding_
    base = drop_top_percent(ranked, drop_percent) if drop_percent else ranked
    targets = _targets_for(entries)
    rows: list[dict] = []
    for k in k_values:
        for m in m_values:
            try:
                pair_list, _ = build_training_list(base, targets, k, m)
                embedding = train_fn(pair_list)
            except (ValueError, KeyError, ArithmeticError) as exc:
                for alpha in alpha_values:
                    rows.append(dict(k=k, m=m, alpha=alpha, abs_rho=float("nan"), n=0, error=str(exc)))
                continue
            for alpha in alpha_values:
                try:
                    scorer = CompositionalityScorer(
                        dense, embedding, base, alpha=alpha, k=k, fallback=False
                    )
                    scored, _ = scorer.score_entries(entries)
                    covered = [se for se in scored if se.source == SOURCE_COMBINED]
                    rho = abs_rho([se.score for se in covered], [se.entry.gold for se in covered])
                    rows.append(dict(k=k, m=m, alpha=alpha, abs_rho=rho, n=len(covered), error=""))
                except (ValueError, KeyError, ArithmeticError) as exc:
                    rows.append(dict(k=k, m=m, alpha=alpha, abs_rho=float("nan"), n=0, error=str(exc)))
    return rows


def cmd_grid(args) -> int:
    entries = _load_gold(args)
    dense = _load_dense(args.dsm)
    ranked = RankedPairList.load(args.ranked)

    def train_fn(pairs):
        return _model_from_args(args).fit(pairs).embedding_

    rows = grid_search(
        entries,
        dense,
        ranked,
        args.k_grid,
        args.m_grid,
        args.alpha_grid,
        drop_percent=args.drop_top_percent,
        train_fn=train_fn,
    )
    with _open_out(args.output) as dst:
        dst.write("k\tm\talpha\tabs_rho\tn\terror\n")
        for row in rows:
            dst.write(
                f"{row['k']}\t{row['m']}\t{row['alpha']}\t{repr(row['abs_rho'])}\t{row['n']}\t{row['error']}\n"
            )
    return 0


def _csv_list(cast):
    def parse(text: str):
        values = [cast(part) for part in text.split(",") if part != ""]
        if not values:
            raise argparse.ArgumentTypeError("empty list")
        return values

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phrasecomp",
        description="Compositionality scoring for two-word noun phrases.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="Hearst-pattern pair extraction from tagged text")
    p.add_argument("--input", default="-", help="one sentence per line, surface_TAG tokens")
    p.add_argument("--output", default="-", help="TSV: hyponym, hypernym, pattern_id")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("rank", help="aggregate occurrences into a weighted, sorted pair list")
    p.add_argument("--pairs", required=True, help="occurrence TSV from extract")
    p.add_argument("--output", required=True, help="TSV: hyponym, hypernym, count, weight")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("build-list", help="select training pairs for the ball embedding")
    p.add_argument("--ranked", required=True)
    _add_gold_flags(p)
    p.add_argument("--k", type=int, default=5, help="pairs kept per target per direction")
    p.add_argument("--m", type=float, default=10.0, help="percent of the full list appended")
    p.add_argument("--drop-top-percent", type=float, default=1.0,
                   help="discard this percent of the most frequent pairs first")
    p.add_argument("--output", required=True, help="TSV: hyponym, hypernym")
    p.set_defaults(func=cmd_build_list)

    p = sub.add_parser("train", help="train the Poincare embedding on a pair list")
    p.add_argument("--pairs", required=True, help="training TSV (first two columns used)")
    p.add_argument("--output", required=True, help="embedding text file")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="combined compositionality scores for a gold dataset")
    _add_gold_flags(p)
    p.add_argument("--dsm", required=True, help="dense word-vector text file (optionally .gz)")
    p.add_argument("--poincare", required=True, help="trained embedding file")
    p.add_argument("--ranked", required=True, help="weighted pair list for hypernym sets")
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--drop-top-percent", type=float, default=1.0,
                   help="match the drop used when the training list was built")
    p.add_argument("--no-fallback", action="store_true", help="reduced mode: skip entries without hypernym data")
    p.add_argument("--output", default="-", help="TSV: phrase, gold, score, source")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("evaluate", help="rank correlation of a predictions file; optional paired tests")
    p.add_argument("--predictions", required=True)
    p.add_argument("--compare", default=None, help="second predictions file for Wilcoxon/z tests")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("supervised", help="repeated-split regression protocol")
    _add_gold_flags(p)
    p.add_argument("--dsm", required=True)
    p.add_argument("--poincare", required=True)
    p.add_argument("--model", choices=sorted(REGRESSORS), default="kernel-ridge")
    p.add_argument("--alpha", type=float, default=0.4)
    p.add_argument("--splits", type=int, default=25)
    p.add_argument("--train-fraction", type=float, default=0.75)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kr-lambda", type=float, default=1.0)
    p.add_argument("--kr-gamma", type=float, default=None)
    p.add_argument("--pls-components", type=int, default=10)
    p.add_argument("--knn-k", type=int, default=5)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_supervised)

    p = sub.add_parser("grid", help="sweep k, m, alpha; one trained embedding per (k, m)")
    _add_gold_flags(p)
    p.add_argument("--dsm", required=True)
    p.add_argument("--ranked", required=True)
    p.add_argument("--k-grid", type=_csv_list(int), default=[5])
    p.add_argument("--m-grid", type=_csv_list(float), default=[10.0])
    p.add_argument("--alpha-grid", type=_csv_list(float), default=[0.2, 0.4, 0.6])
    p.add_argument("--drop-top-percent", type=float, default=1.0)
    _add_train_flags(p)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_grid)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error\t{exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
