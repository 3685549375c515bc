"""Wiring layer: loads stores/caches per configuration and answers
clue requests for named representations."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from . import babelnet, corpusfreq, embeddings
from .cluegiver import EmbeddingSource, GraphSource, RelatednessSource, choose_clue
from .core import Board, ClueResult, normalize_token
from .corpusfreq import DocFreqTable
from .embeddings import EmbeddingStore
from .evaluation import TrialConfig
from .scoring import ScoringParams


class MissingResource(RuntimeError):
    pass


class InvalidConfig(ValueError):
    pass


@dataclass
class Engine:
    sources: dict[str, RelatednessSource]
    params: ScoringParams = field(default_factory=ScoringParams)
    df_table: DocFreqTable | None = None
    dict_store: EmbeddingStore | None = None
    wordlist: list[str] = field(default_factory=list)

    def source(self, representation: str) -> RelatednessSource:
        try:
            return self.sources[representation]
        except KeyError:
            raise InvalidConfig(
                f"unknown representation {representation!r}; "
                f"loaded: {sorted(self.sources)}"
            ) from None

    def choose(self, board: Board, config: TrialConfig, workers: int = 1) -> ClueResult:
        if config.detect and self.df_table is None and self.dict_store is None:
            raise MissingResource(
                "DETECT requested but neither a df table nor a dictionary "
                "embedding store is loaded"
            )
        return choose_clue(
            board,
            self.source(config.representation),
            params=self.params,
            scoring_fn=config.scoring_fn,
            detect=config.detect,
            df_table=self.df_table,
            dict_store=self.dict_store,
            workers=workers,
        )


@dataclass
class EngineConfig:
    """Parsed engine configuration file (INI sections: paths, scoring, service)."""

    embedding_files: dict[str, Path] = field(default_factory=dict)
    dict_embedding_file: Path | None = None
    df_table_file: Path | None = None
    babelnet_cache_dir: Path | None = None
    wordlist_file: Path | None = None
    params: ScoringParams = field(default_factory=ScoringParams)
    service_port: int = 8000

    @classmethod
    def load(cls, path: str | Path) -> "EngineConfig":
        parser = configparser.ConfigParser()
        read = parser.read(path)
        if not read:
            raise InvalidConfig(f"cannot read config file {path}")
        cfg = cls()
        base = Path(path).resolve().parent

        def resolve(value: str) -> Path:
            p = Path(value)
            p = p if p.is_absolute() else base / p
            if not p.exists():
                raise InvalidConfig(f"configured path does not exist: {p}")
            return p

        if parser.has_section("paths"):
            for key, value in parser.items("paths"):
                if key.startswith("embedding."):
                    cfg.embedding_files[key.split(".", 1)[1]] = resolve(value)
                elif key == "dict_embeddings":
                    cfg.dict_embedding_file = resolve(value)
                elif key == "df_table":
                    cfg.df_table_file = resolve(value)
                elif key == "babelnet_cache":
                    cfg.babelnet_cache_dir = resolve(value)
                elif key == "wordlist":
                    cfg.wordlist_file = resolve(value)
                else:
                    raise InvalidConfig(f"unknown paths key {key!r}")
        if parser.has_section("scoring"):
            fields = dict(parser.items("scoring"))
            kwargs = {}
            for key in ("lambda_b", "lambda_r", "lambda_t", "lambda_f", "lambda_d", "alpha"):
                if key in fields:
                    kwargs[key] = float(fields.pop(key))
            for key in ("top_t", "m", "levels"):
                if key in fields:
                    kwargs[key] = int(fields.pop(key))
            if "weights" in fields:
                kwargs["weights"] = tuple(
                    float(x) for x in fields.pop("weights").split(",")
                )
            if fields:
                raise InvalidConfig(f"unknown scoring keys {sorted(fields)}")
            cfg.params = ScoringParams(**kwargs)
        if parser.has_section("service"):
            cfg.service_port = parser.getint("service", "port", fallback=8000)
        return cfg


def load_wordlist(path: str | Path) -> list[str]:
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(normalize_token(line))
    return words


def build_engine(cfg: EngineConfig) -> Engine:
    sources: dict[str, RelatednessSource] = {}
    for name, path in sorted(cfg.embedding_files.items()):
        with open(path, encoding="utf-8") as fh:
            store = embeddings.load_embeddings(fh, name)
        sources[name] = EmbeddingSource(store, name=name)
    wordlist = load_wordlist(cfg.wordlist_file) if cfg.wordlist_file else []
    df_table = corpusfreq.load_table(cfg.df_table_file) if cfg.df_table_file else None
    dict_store = None
    if cfg.dict_embedding_file:
        with open(cfg.dict_embedding_file, encoding="utf-8") as fh:
            dict_store = embeddings.load_embeddings(fh, "dict2vec")
    if cfg.babelnet_cache_dir:
        subgraphs = {}
        for record in sorted((Path(cfg.babelnet_cache_dir) / "subgraphs").glob("*.jsonl")):
            sub = babelnet.load_subgraph(cfg.babelnet_cache_dir, record.stem)
            if sub is not None and sub.complete:
                subgraphs[sub.word] = sub
        if subgraphs:
            sources["babelnet-wsf"] = GraphSource(subgraphs, cfg.params)
    return Engine(
        sources=sources,
        params=cfg.params,
        df_table=df_table,
        dict_store=dict_store,
        wordlist=wordlist,
    )
