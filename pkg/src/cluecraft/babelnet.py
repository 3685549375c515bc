"""Knowledge-graph relatedness: subgraph fetching/caching, traversal
constraints, single-word label extraction, and path-based similarity."""

from __future__ import annotations

import datetime
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

import requests

from .core import normalize_token

HYPERNYM = "HYPERNYM"
OTHER = "OTHER"

# Relation names that count as hypernym links; configurable so naming
# changes in the upstream graph don't require code changes.
DEFAULT_HYPERNYM_RELATIONS = frozenset({"is-a", "subclass-of"})

DEFAULT_WEIGHTS = (1.0, 1.1, 1.1, 1.2)
DEFAULT_LEVELS = 3


class ApiQuotaExceeded(RuntimeError):
    pass


class NetworkFailure(RuntimeError):
    pass


class IncompleteCache(RuntimeError):
    pass


def classify_relation(
    relation_name: str,
    hypernym_relations: frozenset[str] = DEFAULT_HYPERNYM_RELATIONS,
) -> str:
    return HYPERNYM if relation_name in hypernym_relations else OTHER


@dataclass(frozen=True)
class Synset:
    id: str
    main_sense: str
    other_senses: tuple[str, ...] = ()
    pos: str = "NOUN"
    definition: str | None = None

    def __post_init__(self) -> None:
        if not self.id or not self.main_sense:
            raise ValueError("synset needs a non-empty id and main sense")


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    relation_name: str
    relation_group: str
    is_automatic: bool = False

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise ValueError(f"self-loop edge on {self.source}")


@dataclass(frozen=True)
class GraphPath:
    origin: str
    edges: tuple[Edge, ...]
    terminal: str

    def __len__(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class GraphNeighbor:
    token: str
    path_length: int
    label_weight: float
    provenance: GraphPath


@dataclass
class CachedSubgraph:
    """Per-board-word edge sets keyed by (source synset, traversal level)."""

    word: str
    origin_synset_ids: tuple[str, ...]
    synsets: dict[str, Synset] = field(default_factory=dict)
    levels: dict[tuple[str, int], tuple[Edge, ...]] = field(default_factory=dict)
    max_level: int = DEFAULT_LEVELS
    complete: bool = False


def query_edges(
    lemma_synsets: dict[str, list[Synset]],
    words: Iterable[str],
    levels: int,
    edge_fn: Callable[[str], list[Edge]],
    synset_fn: Callable[[str], Synset | None],
) -> dict[str, CachedSubgraph]:
    """Breadth-first edge retrieval around each word's synsets.

    Level 1 stores every outgoing edge; expansion to the next level only
    follows non-automatic hypernym edges.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    out: dict[str, CachedSubgraph] = {}
    for word in sorted(set(words)):
        origins = lemma_synsets.get(word, [])
        sub = CachedSubgraph(
            word=word,
            origin_synset_ids=tuple(s.id for s in origins),
            max_level=levels,
        )
        for s in origins:
            sub.synsets[s.id] = s
        frontier = list(origins)
        for level in range(1, levels + 1):
            next_ids: list[str] = []
            for synset in frontier:
                edges = tuple(edge_fn(synset.id))
                if edges:  # empty groups carry no information; keep cache canonical
                    sub.levels[(synset.id, level)] = edges
                for edge in edges:
                    if not edge.is_automatic and edge.relation_group == HYPERNYM:
                        if edge.target not in next_ids:
                            next_ids.append(edge.target)
            frontier = []
            for sid in next_ids:
                target = synset_fn(sid)
                if target is None:
                    continue
                sub.synsets.setdefault(sid, target)
                frontier.append(target)
        sub.complete = True
        out[word] = sub
    return out


def validate_path(path: GraphPath, max_level: int = DEFAULT_LEVELS) -> bool:
    """Check the traversal constraints on a candidate path.

    Every edge must be non-automatic; every edge after the first must be a
    hypernym link, and all edges after the first must share one relation
    name. The first edge may be of any type.
    """
    edges = path.edges
    if len(edges) > max_level:
        return False
    if any(e.is_automatic for e in edges):
        return False
    tail = edges[1:]
    if any(e.relation_group != HYPERNYM for e in tail):
        return False
    if tail and len({e.relation_name for e in tail}) > 1:
        return False
    return True


def extract_single_word_labels(
    main_sense: str,
    other_senses: Iterable[str],
    weights: tuple[float, float, float, float] = DEFAULT_WEIGHTS,
    min_weight: bool = False,
) -> dict[str, float]:
    """Split synset labels into single-word tokens with type weights.

    Single-word main sense -> w1; each word of a multi-word main sense ->
    w2; single-word other sense -> w3; each word of a multi-word other
    sense -> w4. Assignments are sequential dictionary writes, so by
    default a later label overwrites an earlier token's weight; with
    min_weight=True the smallest weight seen per token is kept instead.
    """
    w1, w2, w3, w4 = weights
    if not (w1 <= w2 <= w3 <= w4):
        raise ValueError(f"weights must be non-decreasing, got {weights}")
    labels: dict[str, float] = {}

    def assign(token: str, weight: float) -> None:
        if min_weight and token in labels:
            labels[token] = min(labels[token], weight)
        else:
            labels[token] = weight

    parts = main_sense.split("_")
    if len(parts) == 1:
        assign(parts[0], w1)
    else:
        for word in parts:
            assign(word, w2)
    for sense in other_senses:
        parts = sense.split("_")
        if len(parts) == 1:
            assign(parts[0], w3)
        else:
            for word in parts:
                assign(word, w4)
    return labels


def graph_neighbors(
    subgraph: CachedSubgraph,
    weights: tuple[float, float, float, float] = DEFAULT_WEIGHTS,
    min_weight_labels: bool = False,
) -> list[GraphNeighbor]:
    """Enumerate single-word neighbor tokens over all valid paths.

    A token reachable through several terminal synsets or paths keeps the
    smallest path length, then the smallest label weight. Automatic edges
    are skipped at every level.
    """
    if not subgraph.complete:
        raise IncompleteCache(f"subgraph for {subgraph.word!r} is not complete")

    # (synset, h, representative path) in breadth-first order, so the first
    # time a synset appears under a given chain state is at its minimal h.
    reached: dict[str, tuple[int, GraphPath]] = {}
    frontier: list[tuple[str, tuple[Edge, ...]]] = [
        (sid, ()) for sid in subgraph.origin_synset_ids
    ]
    seen_states: set[tuple[str, str | None]] = set()
    for sid, _ in frontier:
        reached.setdefault(sid, (0, GraphPath(subgraph.word, (), sid)))
        seen_states.add((sid, None))

    for depth in range(1, subgraph.max_level + 1):
        next_frontier: list[tuple[str, tuple[Edge, ...]]] = []
        for sid, edges_so_far in frontier:
            for edge in subgraph.levels.get((sid, depth), ()):
                if edge.is_automatic:
                    continue
                if len(edges_so_far) >= 1:
                    if edge.relation_group != HYPERNYM:
                        continue
                    if len(edges_so_far) >= 2 and edge.relation_name != edges_so_far[1].relation_name:
                        continue
                new_edges = edges_so_far + (edge,)
                chain = new_edges[1].relation_name if len(new_edges) >= 2 else None
                state = (edge.target, chain)
                if state in seen_states:
                    continue
                seen_states.add(state)
                path = GraphPath(subgraph.word, new_edges, edge.target)
                if edge.target not in reached or depth < reached[edge.target][0]:
                    reached[edge.target] = (depth, path)
                next_frontier.append((edge.target, new_edges))
        frontier = next_frontier

    best: dict[str, GraphNeighbor] = {}
    for sid, (h, path) in reached.items():
        synset = subgraph.synsets.get(sid)
        if synset is None:
            continue
        labels = extract_single_word_labels(
            synset.main_sense, synset.other_senses, weights, min_weight_labels
        )
        for token, weight in labels.items():
            current = best.get(token)
            if current is None or (h, weight) < (current.path_length, current.label_weight):
                best[token] = GraphNeighbor(token, h, weight, path)
    return [best[t] for t in sorted(best)]


def path_similarity(h: int, label_weight: float) -> float:
    """Inverse weighted path length: 1 / (weight * h + 1)."""
    if h < 0:
        raise ValueError("path length must be >= 0")
    if label_weight <= 0:
        raise ValueError("label weight must be > 0")
    return 1.0 / (label_weight * h + 1.0)


# ---------------------------------------------------------------------------
# Disk cache

def save_subgraph(cache_dir: str | Path, subgraph: CachedSubgraph) -> Path:
    """One line-delimited record file per word; last line marks completeness."""
    directory = Path(cache_dir) / "subgraphs"
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{subgraph.word}.jsonl"
    lines = []
    for sid in sorted(subgraph.synsets):
        s = subgraph.synsets[sid]
        lines.append(json.dumps({
            "record": "synset",
            "id": s.id,
            "mainSense": s.main_sense,
            "otherSenses": list(s.other_senses),
            "pos": s.pos,
            "definition": s.definition,
            "origin": s.id in subgraph.origin_synset_ids,
        }, sort_keys=True))
    for (sid, level) in sorted(subgraph.levels):
        for e in subgraph.levels[(sid, level)]:
            lines.append(json.dumps({
                "record": "edge",
                "source": e.source,
                "target": e.target,
                "relationName": e.relation_name,
                "relationGroup": e.relation_group,
                "isAutomatic": e.is_automatic,
                "level": level,
            }, sort_keys=True))
    if subgraph.complete:
        lines.append(json.dumps({"record": "complete", "levels": subgraph.max_level}))
    tmp = path.with_suffix(".tmp")
    tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
    tmp.replace(path)
    return path


def load_subgraph(cache_dir: str | Path, word: str) -> CachedSubgraph | None:
    path = Path(cache_dir) / "subgraphs" / f"{normalize_token(word)}.jsonl"
    if not path.exists():
        return None
    synsets: dict[str, Synset] = {}
    origins: list[str] = []
    levels: dict[tuple[str, int], list[Edge]] = {}
    complete = False
    max_level = DEFAULT_LEVELS
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        if rec["record"] == "synset":
            synsets[rec["id"]] = Synset(
                id=rec["id"],
                main_sense=rec["mainSense"],
                other_senses=tuple(rec["otherSenses"]),
                pos=rec.get("pos", "NOUN"),
                definition=rec.get("definition"),
            )
            if rec.get("origin"):
                origins.append(rec["id"])
        elif rec["record"] == "edge":
            key = (rec["source"], rec["level"])
            levels.setdefault(key, []).append(Edge(
                source=rec["source"],
                target=rec["target"],
                relation_name=rec["relationName"],
                relation_group=rec["relationGroup"],
                is_automatic=rec["isAutomatic"],
            ))
        elif rec["record"] == "complete":
            complete = True
            max_level = rec.get("levels", DEFAULT_LEVELS)
    return CachedSubgraph(
        word=normalize_token(word),
        origin_synset_ids=tuple(origins),
        synsets=synsets,
        levels={k: tuple(v) for k, v in levels.items()},
        max_level=max_level,
        complete=complete,
    )


# ---------------------------------------------------------------------------
# REST client with daily budget and permanent response cache

class BabelNetClient:
    """Rate-limited accessor for the BabelNet REST API.

    Every response is cached on disk; cached words never hit the network
    again. The daily request budget persists across processes.
    """

    def __init__(
        self,
        api_key: str | None,
        cache_dir: str | Path,
        base_url: str = "https://babelnet.io/v9",
        daily_budget: int = 1000,
        fetch_json: Callable[[str, dict], object] | None = None,
        sleep: Callable[[float], None] = time.sleep,
        max_retries: int = 3,
        hypernym_relations: frozenset[str] = DEFAULT_HYPERNYM_RELATIONS,
    ):
        self.api_key = api_key
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.base_url = base_url.rstrip("/")
        self.daily_budget = daily_budget
        self._fetch_json = fetch_json or self._http_fetch
        self._sleep = sleep
        self.max_retries = max_retries
        self.hypernym_relations = hypernym_relations
        self._quota_path = self.cache_dir / "quota.json"

    # -- quota -------------------------------------------------------------

    def _consume_budget(self) -> None:
        today = datetime.date.today().isoformat()
        used = 0
        if self._quota_path.exists():
            rec = json.loads(self._quota_path.read_text())
            if rec.get("date") == today:
                used = rec.get("used", 0)
        if used >= self.daily_budget:
            raise ApiQuotaExceeded(
                f"daily budget of {self.daily_budget} requests exhausted"
            )
        self._quota_path.write_text(json.dumps({"date": today, "used": used + 1}))

    # -- transport ---------------------------------------------------------

    def _http_fetch(self, path: str, params: dict) -> object:
        resp = requests.get(f"{self.base_url}/{path}", params=params, timeout=30)
        resp.raise_for_status()
        return resp.json()

    def _get(self, path: str, params: dict) -> object:
        if self.api_key is None:
            raise NetworkFailure("no API key configured (set BABELNET_KEY)")
        self._consume_budget()
        params = dict(params, key=self.api_key)
        delay = 1.0
        for attempt in range(self.max_retries):
            try:
                payload = self._get_once(path, params)
            except ApiQuotaExceeded:
                raise
            except Exception as exc:
                if attempt == self.max_retries - 1:
                    raise NetworkFailure(f"GET {path} failed: {exc}") from exc
                self._sleep(delay)
                delay *= 2
                continue
            return payload
        raise NetworkFailure(f"GET {path} failed")  # pragma: no cover

    def _get_once(self, path: str, params: dict) -> object:
        payload = self._fetch_json(path, params)
        if isinstance(payload, dict) and "message" in payload and "limit" in str(
            payload.get("message", "")
        ).lower():
            raise ApiQuotaExceeded(str(payload["message"]))
        return payload

    # -- synsets -----------------------------------------------------------

    def fetch_synsets(self, word: str) -> list[Synset]:
        word = normalize_token(word)
        cached = self._load_synsets(word)
        if cached is not None:
            return cached
        ids = self._get("getSynsetIds", {"lemma": word, "searchLang": "EN"})
        synsets: list[Synset] = []
        for entry in ids or []:
            sid = entry["id"] if isinstance(entry, dict) else str(entry)
            data = self._get("getSynset", {"id": sid, "targetLang": "EN"})
            synset = _parse_synset(sid, data)
            if synset is not None:
                synsets.append(synset)
        self._save_synsets(word, synsets)
        return synsets

    def synset_by_id(self, synset_id: str) -> Synset | None:
        path = self.cache_dir / "synsetids"
        path.mkdir(parents=True, exist_ok=True)
        record = path / f"{synset_id.replace(':', '_')}.json"
        if record.exists():
            data = json.loads(record.read_text(encoding="utf-8"))
            if data is None:
                return None
            return Synset(
                id=data["id"],
                main_sense=data["mainSense"],
                other_senses=tuple(data["otherSenses"]),
                pos=data.get("pos", "NOUN"),
                definition=data.get("definition"),
            )
        data = self._get("getSynset", {"id": synset_id, "targetLang": "EN"})
        synset = _parse_synset(synset_id, data)
        payload = None if synset is None else {
            "id": synset.id,
            "mainSense": synset.main_sense,
            "otherSenses": list(synset.other_senses),
            "pos": synset.pos,
            "definition": synset.definition,
        }
        record.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
        return synset

    def outgoing_edges(self, synset_id: str) -> list[Edge]:
        cached = self._load_edges(synset_id)
        if cached is not None:
            return cached
        data = self._get("getOutgoingEdges", {"id": synset_id})
        edges: list[Edge] = []
        for rec in data or []:
            edge = _parse_edge(synset_id, rec, self.hypernym_relations)
            if edge is not None:
                edges.append(edge)
        self._save_edges(synset_id, edges)
        return edges

    # -- per-record caches -------------------------------------------------

    def _synset_path(self, word: str) -> Path:
        d = self.cache_dir / "synsets"
        d.mkdir(parents=True, exist_ok=True)
        return d / f"{word}.jsonl"

    def _load_synsets(self, word: str) -> list[Synset] | None:
        path = self._synset_path(word)
        if not path.exists():
            return None
        synsets = []
        complete = False
        for line in path.read_text(encoding="utf-8").splitlines():
            rec = json.loads(line)
            if rec.get("record") == "complete":
                complete = True
            else:
                synsets.append(Synset(
                    id=rec["id"],
                    main_sense=rec["mainSense"],
                    other_senses=tuple(rec["otherSenses"]),
                    pos=rec.get("pos", "NOUN"),
                    definition=rec.get("definition"),
                ))
        return synsets if complete else None

    def _save_synsets(self, word: str, synsets: list[Synset]) -> None:
        lines = [json.dumps({
            "record": "synset",
            "id": s.id,
            "mainSense": s.main_sense,
            "otherSenses": list(s.other_senses),
            "pos": s.pos,
            "definition": s.definition,
        }, sort_keys=True) for s in synsets]
        lines.append(json.dumps({"record": "complete"}))
        path = self._synset_path(word)
        tmp = path.with_suffix(".tmp")
        tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
        tmp.replace(path)

    def _edges_path(self, synset_id: str) -> Path:
        d = self.cache_dir / "edges"
        d.mkdir(parents=True, exist_ok=True)
        return d / f"{synset_id.replace(':', '_')}.jsonl"

    def _load_edges(self, synset_id: str) -> list[Edge] | None:
        path = self._edges_path(synset_id)
        if not path.exists():
            return None
        edges = []
        complete = False
        for line in path.read_text(encoding="utf-8").splitlines():
            rec = json.loads(line)
            if rec.get("record") == "complete":
                complete = True
            else:
                edges.append(Edge(
                    source=rec["source"],
                    target=rec["target"],
                    relation_name=rec["relationName"],
                    relation_group=rec["relationGroup"],
                    is_automatic=rec["isAutomatic"],
                ))
        return edges if complete else None

    def _save_edges(self, synset_id: str, edges: list[Edge]) -> None:
        lines = [json.dumps({
            "record": "edge",
            "source": e.source,
            "target": e.target,
            "relationName": e.relation_name,
            "relationGroup": e.relation_group,
            "isAutomatic": e.is_automatic,
        }, sort_keys=True) for e in edges]
        lines.append(json.dumps({"record": "complete"}))
        path = self._edges_path(synset_id)
        tmp = path.with_suffix(".tmp")
        tmp.write_text("\n".join(lines) + "\n", encoding="utf-8")
        tmp.replace(path)


def _parse_synset(sid: str, data: object) -> Synset | None:
    if not isinstance(data, dict):
        return None
    senses = data.get("senses", [])
    lemmas: list[str] = []
    for sense in senses:
        props = sense.get("properties", sense)
        lemma = props.get("fullLemma") or props.get("simpleLemma") or props.get("lemma")
        if isinstance(lemma, dict):
            lemma = lemma.get("lemma")
        if lemma:
            lemmas.append(normalize_token(str(lemma)))
    if not lemmas:
        return None
    glosses = data.get("glosses", [])
    definition = glosses[0].get("gloss") if glosses else None
    seen: list[str] = []
    for lemma in lemmas:
        if lemma not in seen:
            seen.append(lemma)
    return Synset(
        id=sid,
        main_sense=seen[0],
        other_senses=tuple(seen[1:]),
        pos=str(data.get("pos", "NOUN")),
        definition=definition,
    )


def _parse_edge(
    source: str, rec: object, hypernym_relations: frozenset[str]
) -> Edge | None:
    if not isinstance(rec, dict):
        return None
    target = rec.get("target")
    pointer = rec.get("pointer", {})
    name = str(pointer.get("shortName") or pointer.get("name") or rec.get("relation", ""))
    name = name.strip().lower().replace(" ", "-")
    if not target or not name or target == source:
        return None
    group = str(pointer.get("relationGroup", "")).upper()
    if group != HYPERNYM:
        group = classify_relation(name, hypernym_relations)
    automatic = bool(pointer.get("isAutomatic", rec.get("isAutomatic", False)))
    return Edge(
        source=source,
        target=str(target),
        relation_name=name,
        relation_group=group,
        is_automatic=automatic,
    )
