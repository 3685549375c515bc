"""HTTP evaluation service: sessions of trials, ranked-guess collection,
and live metrics. Backs the browser UI."""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .cluegiver import UnknownBoardWord
from .core import Board, generate_board
from .engine import Engine, InvalidConfig, MissingResource
from .evaluation import (
    InvalidResponse,
    MetricsReport,
    Trial,
    TrialConfig,
    TrialResponse,
    aggregate,
    append_response,
    response_from_dict,
    shuffled_display_order,
    validate_response,
)

SCHEMA_VERSION = 1


class UnknownSession(KeyError):
    pass


class SessionComplete(RuntimeError):
    pass


class StaleTrial(RuntimeError):
    pass


@dataclass
class Session:
    id: str
    trials: list[Trial]
    created_at: float
    config_set: list[TrialConfig]
    cursor: int = 0
    responses: list[TrialResponse] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class SessionStore:
    """In-memory sessions with append-only persistence per session."""

    def __init__(self, engine: Engine, data_dir: str | Path):
        self.engine = engine
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._create_lock = threading.Lock()

    def _responses_path(self, session_id: str) -> Path:
        return self.data_dir / f"session-{session_id}.responses.jsonl"

    def create(
        self,
        board_count: int,
        config_set: list[TrialConfig],
        seed: int,
        n_per_team: int = 10,
    ) -> Session:
        if board_count < 1:
            raise InvalidConfig("boardCount must be >= 1")
        if not config_set:
            raise InvalidConfig("configSet must be non-empty")
        for config in config_set:
            self.engine.source(config.representation)  # raises InvalidConfig
        if len(self.engine.wordlist) < 2 * n_per_team:
            raise MissingResource(
                f"wordlist has {len(self.engine.wordlist)} words, "
                f"need {2 * n_per_team}"
            )
        boards: list[Board] = []
        for i in range(board_count):
            boards.append(generate_board(self.engine.wordlist, n_per_team, seed + i))
        trials: list[Trial] = []
        for b_idx, board in enumerate(boards):
            for c_idx, config in enumerate(config_set):
                try:
                    result = self.engine.choose(board, config)
                except UnknownBoardWord as exc:
                    raise MissingResource(
                        f"board word {exc.args[0]!r} is not covered by "
                        f"representation {config.representation!r}"
                    ) from exc
                trial_seed = seed + 1000 * b_idx + c_idx
                trials.append(Trial(
                    id=f"t{b_idx:03d}c{c_idx:02d}",
                    board=board,
                    display_order=shuffled_display_order(board, trial_seed),
                    clue=result.clue,
                    intended=result.intended,
                    config=config,
                ))
        # Interleave configurations so a responder never sees one config in a block.
        import random as _random
        _random.Random(seed).shuffle(trials)
        session = Session(
            id=uuid.uuid4().hex[:12],
            trials=trials,
            created_at=time.time(),
            config_set=config_set,
        )
        with self._create_lock:
            self._sessions[session.id] = session
        self._persist_meta(session)
        return session

    def _persist_meta(self, session: Session) -> None:
        path = self.data_dir / f"session-{session.id}.json"
        payload = {
            "schema": SCHEMA_VERSION,
            "sessionId": session.id,
            "createdAt": session.created_at,
            "trials": [
                {
                    "trialId": t.id,
                    "blue": sorted(t.board.blue),
                    "red": sorted(t.board.red),
                    "displayOrder": list(t.display_order),
                    "clue": t.clue,
                    "intended": list(t.intended),
                    "config": {
                        "representation": t.config.representation,
                        "scoringFn": t.config.scoring_fn,
                        "detect": t.config.detect,
                    },
                }
                for t in session.trials
            ],
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSession(session_id) from None

    def next_trial(self, session_id: str) -> tuple[Trial, int, int]:
        session = self.get(session_id)
        with session.lock:
            if session.cursor >= len(session.trials):
                raise SessionComplete(session_id)
            return session.trials[session.cursor], session.cursor, len(session.trials)

    def submit(self, session_id: str, response: TrialResponse) -> int:
        session = self.get(session_id)
        with session.lock:
            if session.cursor >= len(session.trials):
                raise SessionComplete(session_id)
            trial = session.trials[session.cursor]
            if response.trial_id != trial.id:
                raise StaleTrial(
                    f"expected response for {trial.id!r}, got {response.trial_id!r}"
                )
            validate_response(response, trial)
            session.responses.append(response)
            session.cursor += 1
            append_response(self._responses_path(session_id), response)
            return session.cursor

    def results(self, session_id: str) -> MetricsReport:
        session = self.get(session_id)
        with session.lock:
            trial_by_id = {t.id: t for t in session.trials}
            pairs = [(r, trial_by_id[r.trial_id]) for r in session.responses]
        if not pairs:
            return MetricsReport(per_config={})
        return aggregate(pairs)


def create_app(engine: Engine, data_dir: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="cluecraft evaluation service")
    store = SessionStore(engine, data_dir)
    app.state.store = store

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(
            status_code=status,
            content={"schema": SCHEMA_VERSION, "error": {"code": code, "message": message}},
        )

    @app.exception_handler(UnknownSession)
    async def _unknown_session(request: Request, exc: UnknownSession):
        return error(404, "UnknownSession", f"no session {exc.args[0]!r}")

    @app.exception_handler(SessionComplete)
    async def _session_complete(request: Request, exc: SessionComplete):
        return error(409, "SessionComplete", "all trials answered")

    @app.exception_handler(StaleTrial)
    async def _stale(request: Request, exc: StaleTrial):
        return error(409, "StaleTrial", str(exc))

    @app.exception_handler(InvalidResponse)
    async def _invalid_response(request: Request, exc: InvalidResponse):
        return error(422, "ValidationError", str(exc))

    @app.exception_handler(InvalidConfig)
    async def _invalid_config(request: Request, exc: InvalidConfig):
        return error(400, "InvalidConfig", str(exc))

    @app.exception_handler(MissingResource)
    async def _missing(request: Request, exc: MissingResource):
        return error(400, "MissingResource", str(exc))

    @app.get("/api/health")
    def health():
        return {"schema": SCHEMA_VERSION, "status": "ok"}

    @app.post("/api/sessions")
    async def create_session(request: Request):
        body = await request.json()
        try:
            config_set = [
                TrialConfig(
                    representation=c["representation"],
                    scoring_fn=c["scoringFn"],
                    detect=bool(c["detect"]),
                )
                for c in body.get("configSet", [])
            ]
        except (KeyError, TypeError) as exc:
            raise InvalidConfig(f"bad configSet entry: {exc}") from exc
        session = store.create(
            board_count=int(body.get("boardCount", 1)),
            config_set=config_set,
            seed=int(body.get("seed", 0)),
            n_per_team=int(body.get("nPerTeam", 10)),
        )
        return {
            "schema": SCHEMA_VERSION,
            "sessionId": session.id,
            "trialCount": len(session.trials),
        }

    @app.get("/api/sessions/{session_id}/next")
    def next_trial(session_id: str):
        trial, answered, total = store.next_trial(session_id)
        return {
            "schema": SCHEMA_VERSION,
            "trial": trial.public_view(),
            "progress": {"answered": answered, "total": total},
        }

    @app.post("/api/sessions/{session_id}/responses")
    async def submit_response(session_id: str, request: Request):
        body = await request.json()
        body.setdefault("timestamp", time.time())
        response = response_from_dict(body)
        answered = store.submit(session_id, response)
        session = store.get(session_id)
        return {
            "schema": SCHEMA_VERSION,
            "accepted": True,
            "progress": {"answered": answered, "total": len(session.trials)},
        }

    @app.get("/api/sessions/{session_id}/results")
    def session_results(session_id: str):
        report = store.results(session_id)
        return {"schema": SCHEMA_VERSION, "report": report.to_dict()}

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
