"""Operator command line: ingestion, cache building, clue generation,
simulation, evaluation reports, and serving."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import babelnet, corpusfreq, embeddings
from .core import Board, RNG_ALGORITHM, format_board, generate_board, parse_board
from .engine import EngineConfig, InvalidConfig, MissingResource, build_engine, load_wordlist
from .evaluation import (
    MetricsReport,
    Trial,
    TrialConfig,
    TrialResponse,
    aggregate,
    load_responses,
    render_report,
    shuffled_display_order,
    simulate_guesser,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cluecraft")
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="load and normalize input data")
    ingest_sub = ingest.add_subparsers(dest="what", required=True)

    p = ingest_sub.add_parser("embeddings", help="validate a vector file")
    p.add_argument("--input", required=True)
    p.add_argument("--name", default="embeddings")

    p = ingest_sub.add_parser("docfreq", help="build a document-frequency table")
    p.add_argument("--input", required=True, help="directory of text files or one delimited file")
    p.add_argument("--delimiter", default=None, help="document separator line for single-file input")
    p.add_argument("--out", required=True)

    p = ingest_sub.add_parser("contexts", help="average per-occurrence context vectors")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)

    bn = sub.add_parser("babelnet", help="knowledge-graph cache operations")
    bn_sub = bn.add_subparsers(dest="what", required=True)
    p = bn_sub.add_parser("fetch", help="fetch and cache subgraphs for board words")
    p.add_argument("--words", required=True, help="board file or newline word list")
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--cache", required=True)
    p.add_argument("--budget", type=int, default=1000)

    board = sub.add_parser("board", help="board operations")
    board_sub = board.add_subparsers(dest="what", required=True)
    p = board_sub.add_parser("gen", help="generate a board from a word list")
    p.add_argument("--wordlist", required=True)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)

    p = sub.add_parser("clue", help="choose a clue for a board")
    p.add_argument("--config", required=True)
    p.add_argument("--board", required=True)
    p.add_argument("--rep", required=True)
    p.add_argument("--scoring", choices=["ours", "kim"], default="ours")
    p.add_argument("--detect", choices=["on", "off"], default="off")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("simulate", help="bot-evaluation: clue-give then guess with an embedding store")
    p.add_argument("--config", required=True)
    p.add_argument("--rep", required=True)
    p.add_argument("--guesser-rep", default=None, help="defaults to --rep")
    p.add_argument("--scoring", choices=["ours", "kim"], default="ours")
    p.add_argument("--detect", choices=["on", "off"], default="off")
    p.add_argument("--boards", type=int, default=5)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--seed", type=int, required=True)

    ev = sub.add_parser("eval", help="evaluation reports")
    ev_sub = ev.add_subparsers(dest="what", required=True)
    p = ev_sub.add_parser("report", help="aggregate a stored session's responses")
    p.add_argument("--session", required=True, help="session metadata json written by the service")
    p.add_argument("--responses", required=True, help="line-delimited responses file")
    p.add_argument("--json", action="store_true", help="emit structured output instead of a table")

    p = sub.add_parser("serve", help="run the evaluation HTTP service")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--ui", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _read_documents(path: Path, delimiter: str | None) -> list[str]:
    if path.is_dir():
        return [p.read_text(encoding="utf-8") for p in sorted(path.glob("*"))
                if p.is_file()]
    text = path.read_text(encoding="utf-8")
    if delimiter is None:
        return [text]
    docs, current = [], []
    for line in text.splitlines():
        if line.strip() == delimiter:
            if current:
                docs.append("\n".join(current))
                current = []
        else:
            current.append(line)
    if current:
        docs.append("\n".join(current))
    return docs


def _load_words(path: Path) -> list[str]:
    text = path.read_text(encoding="utf-8")
    if any(line.strip().startswith(("blue:", "red:")) for line in text.splitlines()):
        board = parse_board(text)
        return sorted(board.words)
    return load_wordlist(path)


def _cmd_ingest(args) -> int:
    if args.what == "embeddings":
        with open(args.input, encoding="utf-8") as fh:
            store = embeddings.load_embeddings(fh, args.name)
        print(f"loaded {len(store)} vectors of dim {store.dim} as {store.name!r}")
        return 0
    if args.what == "docfreq":
        docs = _read_documents(Path(args.input), args.delimiter)
        table = corpusfreq.ingest_text_documents(docs)
        corpusfreq.save_table(table, args.out)
        print(f"{table.total_docs} documents, {len(table.counts)} distinct tokens -> {args.out}")
        return 0
    if args.what == "contexts":
        with open(args.input, encoding="utf-8") as fh:
            store = embeddings.average_contexts(embeddings.parse_context_occurrences(fh))
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(f"{len(store)} {store.dim}\n")
            for token in store.tokens:
                vec = " ".join(repr(float(x)) for x in store.vector(token))
                fh.write(f"{token} {vec}\n")
        print(f"averaged {len(store)} tokens of dim {store.dim} -> {args.out}")
        return 0
    raise AssertionError(args.what)


def _cmd_babelnet(args) -> int:
    key = os.environ.get("BABELNET_KEY")
    words = _load_words(Path(args.words))
    client = babelnet.BabelNetClient(key, args.cache, daily_budget=args.budget)
    missing_cache = [
        w for w in words
        if babelnet.load_subgraph(args.cache, w) is None
    ]
    if key is None and missing_cache:
        print(
            f"error: MissingKey: BABELNET_KEY is not set and no cache exists "
            f"for {missing_cache[:5]}",
            file=sys.stderr,
        )
        return 1
    lemma_synsets = {w: client.fetch_synsets(w) for w in words}
    subgraphs = babelnet.query_edges(
        lemma_synsets,
        words,
        args.levels,
        edge_fn=client.outgoing_edges,
        synset_fn=client.synset_by_id,
    )
    for word, sub in subgraphs.items():
        babelnet.save_subgraph(args.cache, sub)
        print(f"cached {word}: {len(sub.levels)} edge groups, {len(sub.synsets)} synsets")
    return 0


def _cmd_board(args) -> int:
    words = load_wordlist(Path(args.wordlist))
    board = generate_board(words, args.n, args.seed)
    text = format_board(board) + f"# seed: {args.seed} rng: {RNG_ALGORITHM}\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_clue(args) -> int:
    engine = build_engine(EngineConfig.load(args.config))
    board = parse_board(Path(args.board).read_text(encoding="utf-8"))
    config = TrialConfig(args.rep, args.scoring, args.detect == "on")
    result = engine.choose(board, config, workers=args.workers)
    print(json.dumps(result.to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_simulate(args) -> int:
    engine = build_engine(EngineConfig.load(args.config))
    guesser_rep = args.guesser_rep or args.rep
    guesser_source = engine.source(guesser_rep)
    if guesser_source.kind != "embedding":
        raise InvalidConfig("the simulated guesser needs an embedding representation")
    config = TrialConfig(args.rep, args.scoring, args.detect == "on")
    pairs = []
    for i in range(args.boards):
        board = generate_board(engine.wordlist, args.n, args.seed + i)
        result = engine.choose(board, config)
        trial = Trial(
            id=f"sim{i:03d}",
            board=board,
            display_order=shuffled_display_order(board, args.seed + i),
            clue=result.clue,
            intended=result.intended,
            config=config,
        )
        response = simulate_guesser(guesser_source.store, trial)
        pairs.append((response, trial))
    report = aggregate(pairs)
    print("bot-evaluation (simulated guesser, not human results)")
    print(render_report(report))
    return 0


def _cmd_eval(args) -> int:
    meta = json.loads(Path(args.session).read_text(encoding="utf-8"))
    trials = {}
    for t in meta["trials"]:
        trial = Trial(
            id=t["trialId"],
            board=Board(blue=frozenset(t["blue"]), red=frozenset(t["red"])),
            display_order=tuple(t["displayOrder"]),
            clue=t["clue"],
            intended=tuple(t["intended"]),
            config=TrialConfig(
                t["config"]["representation"],
                t["config"]["scoringFn"],
                t["config"]["detect"],
            ),
        )
        trials[trial.id] = trial
    responses = load_responses(args.responses)
    report = aggregate([(r, trials[r.trial_id]) for r in responses])
    if args.json:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    else:
        print(render_report(report))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    cfg = EngineConfig.load(args.config)
    engine = build_engine(cfg)
    from .service import create_app

    app = create_app(engine, args.data, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port or cfg.service_port)
    return 0


_DISPATCH = {
    "ingest": _cmd_ingest,
    "babelnet": _cmd_babelnet,
    "board": _cmd_board,
    "clue": _cmd_clue,
    "simulate": _cmd_simulate,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (InvalidConfig, MissingResource) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError, RuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
