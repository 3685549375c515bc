"""Document-frequency tables and the FREQ rarity/commonness penalty."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

DEFAULT_ALPHA = 1.0 / 1667.0

_WORD_RE = re.compile(r"[a-z]+")


class EmptyCorpus(ValueError):
    pass


class MalformedTable(ValueError):
    pass


@dataclass(frozen=True)
class DocFreqTable:
    counts: dict[str, int]
    total_docs: int

    def __post_init__(self) -> None:
        if self.total_docs < 1:
            raise EmptyCorpus("total_docs must be >= 1")
        bad = [t for t, df in self.counts.items() if df < 1 or df > self.total_docs]
        if bad:
            raise MalformedTable(f"df out of range for {bad[:3]}")


@dataclass(frozen=True)
class FreqParams:
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphabetic characters."""
    return _WORD_RE.findall(text.lower())


def ingest_corpus(documents: Iterable[Iterable[str]]) -> DocFreqTable:
    """df of a token = number of documents containing it at least once."""
    counts: dict[str, int] = {}
    total = 0
    for doc in documents:
        total += 1
        for token in set(doc):
            counts[token] = counts.get(token, 0) + 1
    if total == 0:
        raise EmptyCorpus("no documents")
    return DocFreqTable(counts=counts, total_docs=total)


def ingest_text_documents(texts: Iterable[str]) -> DocFreqTable:
    return ingest_corpus(tokenize(t) for t in texts)


def freq_score(table: DocFreqTable, word: str, params: FreqParams) -> float:
    """Piecewise document-frequency penalty, always in [-1, -alpha].

    -(1/df) while 1/df >= alpha; -1 once a word is common enough that
    1/df < alpha, and -1 for words absent from the table (treated as
    maximally rare).
    """
    df = table.counts.get(word)
    if df is None:
        return -1.0
    inv = 1.0 / df
    if inv >= params.alpha:
        return -inv
    return -1.0


def save_table(table: DocFreqTable, path: str | Path) -> None:
    lines = [f"#totaldocs\t{table.total_docs}"]
    lines += [f"{t}\t{df}" for t, df in sorted(table.counts.items())]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_table(path: str | Path) -> DocFreqTable:
    counts: dict[str, int] = {}
    total: int | None = None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        if line.startswith("#totaldocs\t"):
            total = int(line.split("\t")[1])
            continue
        token, _, df = line.partition("\t")
        counts[token] = int(df)
    if total is None:
        raise MalformedTable(f"{path}: missing #totaldocs header")
    return DocFreqTable(counts=counts, total_docs=total)
