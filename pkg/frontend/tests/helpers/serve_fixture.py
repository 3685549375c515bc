"""Starts the evaluation service on a deterministic fixture engine.

Usage: python3 serve_fixture.py PORT
"""

import itertools
import random
import string
import sys
import tempfile

import uvicorn

from cluecraft.cluegiver import EmbeddingSource
from cluecraft.embeddings import load_embeddings
from cluecraft.engine import Engine
from cluecraft.service import create_app


def fixture_lines(n_tokens=80, dim=12, seed=1):
    tokens = [
        "".join(p)
        for p in itertools.islice(
            itertools.product(string.ascii_lowercase, repeat=2), n_tokens
        )
    ]
    rng = random.Random(seed)
    lines = []
    for token in tokens:
        vec = [rng.randint(-5, 5) or 1 for _ in range(dim)]
        lines.append(token + " " + " ".join(str(x) for x in vec))
    return tokens, lines


def main():
    port = int(sys.argv[1])
    tokens, lines = fixture_lines()
    store = load_embeddings(lines, "glove")
    engine = Engine(
        sources={"glove": EmbeddingSource(store, name="glove")},
        wordlist=tokens[:40],
    )
    app = create_app(engine, data_dir=tempfile.mkdtemp(prefix="ui-test-"))
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


if __name__ == "__main__":
    main()
