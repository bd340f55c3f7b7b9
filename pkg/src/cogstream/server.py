"""Live pacing service: words over newline-delimited JSON, one session per
connection.

Adaptive sessions share a global word-rate budget through the allocator;
every join, leave, and tag-driven rescore produces a fresh plan and rate
events to the affected sessions.  PEST sessions run the calibration
staircase instead: they pace at the staircase speed (outside the shared
budget), pause every `pause_interval_words` words, and adjust on
faster/slower feedback until the reader accepts with "same".  Fixed
sessions stream at one rate and touch neither mechanism.

Wire protocol (UTF-8 JSON, one object per line):

  client -> server   {"type": "start", "mode": "adaptive|pest|fixed",
                      "passage_id": "...", "text": "...?", "rate": 5.0?}
                     {"type": "feedback", "choice": "faster|slower|same"}
                     {"type": "stop"}
  server -> client   hello, word, rate, pause, score, done, error

Browsers cannot open raw sockets, so the same port also accepts WebSocket
connections (sniffed by the first byte) carrying one JSON message per text
frame; see the websocket module.

Event ordering per session: exactly one hello first, exactly one done or
error last, word seq gapless from 1, and a rate event always precedes the
first word paced at a new rate.  Error events are terminal by construction.
"""

from __future__ import annotations

import asyncio
import json
import re
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import allocator, cogload, pest
from .errors import (
    BadConfig,
    CapacityExceeded,
    CogstreamError,
    MissingScores,
    NotPaused,
    SameTooEarly,
    TooEarly,
    UnknownPassage,
)
from .simulator import PassageRecord
from .websocket import websocket_handshake, WebSocketConn

MODE_ADAPTIVE = "adaptive"
MODE_PEST = "pest"
MODE_FIXED = "fixed"
MODES = (MODE_ADAPTIVE, MODE_PEST, MODE_FIXED)

ESTIMATOR_FOG = "fog"
ESTIMATOR_TAG = "tag"
ESTIMATOR_ORACLE = "oracle"
ESTIMATORS = (ESTIMATOR_FOG, ESTIMATOR_TAG, ESTIMATOR_ORACLE)

_WORD_TOKEN_RE = re.compile(r"\S+")
_CLOSE = object()  # writer-queue sentinel: flush and hang up


@dataclass(frozen=True)
class ServerConfig:
    budget_wps: float = 10.0
    alpha: float = 0.5
    estimator: str = ESTIMATOR_FOG
    pause_interval_words: int = 30
    port: int = 8772
    host: str = "127.0.0.1"
    seed: int | None = None
    max_sessions: int = 64
    debug_scores: bool = False
    transcript_path: str | None = None

    def __post_init__(self) -> None:
        if not self.budget_wps > 0.0:
            raise BadConfig(f"budget_wps must be > 0, got {self.budget_wps!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise BadConfig(f"alpha must be in [0, 1], got {self.alpha!r}")
        if self.estimator not in ESTIMATORS:
            raise BadConfig(f"estimator must be one of {ESTIMATORS}")
        if self.pause_interval_words < 1:
            raise BadConfig("pause_interval_words must be >= 1")
        if self.max_sessions < 1:
            raise BadConfig("max_sessions must be >= 1")


@dataclass(frozen=True)
class PreparedStream:
    """Tag-stripped words plus the word index each tag takes effect at."""

    words: tuple[str, ...]
    score_marks: tuple[tuple[int, cogload.CogScore], ...]


def prepare_stream(raw_text: str) -> PreparedStream:
    """Tokenize a raw passage for pacing.

    Valid load tags are stripped; each one is pinned to the first display
    word starting at or after it, so the rate change lands before that word
    is emitted.  Words are maximal non-whitespace runs of the stripped text.
    """
    display, tag_marks = cogload.strip_tags_with_offsets(raw_text)
    tokens = list(_WORD_TOKEN_RE.finditer(display))
    words = tuple(m.group(0) for m in tokens)
    starts = [m.start() for m in tokens]
    marks: list[tuple[int, cogload.CogScore]] = []
    for offset, score in tag_marks:
        idx = len(starts)
        for i, s in enumerate(starts):
            if s >= offset:
                idx = i
                break
        marks.append((idx, score))
    return PreparedStream(words=words, score_marks=tuple(marks))


class _Session:
    """Mutable per-connection state; only the event loop touches it."""

    def __init__(self, sid: str, mode: str, conn, stream: PreparedStream,
                 score: cogload.CogScore, rate_wps: float):
        self.id = sid
        self.mode = mode
        self.conn = conn
        self.stream = stream
        self.score = score
        self.rate_wps = rate_wps
        self.cursor = 0           # next word index within the passage
        self.seq = 0              # last emitted word seq (gapless from 1)
        self.emitted = 0          # total words sent (pest wraps the passage)
        self.queue: asyncio.Queue = asyncio.Queue()
        self.closed = False       # terminal event already queued
        self.paused = False
        self.resume = asyncio.Event()
        self.rate_changed = asyncio.Event()
        self.pest_state: pest.PestState | None = None
        self.pacer: asyncio.Task | None = None
        self.writer_task: asyncio.Task | None = None


class CogstreamServer:
    """Session registry plus the asyncio protocol glue."""

    def __init__(self, config: ServerConfig,
                 passages: Sequence[PassageRecord] = ()):
        self.config = config
        self.passages = {p.id: p for p in passages}
        self._sessions: dict[str, _Session] = {}
        self._next_id = 1
        self._mutate = asyncio.Lock()
        self._seeds = np.random.SeedSequence(config.seed)
        self._transcript = (
            open(config.transcript_path, "a", encoding="utf-8")
            if config.transcript_path else None
        )
        self._server: asyncio.AbstractServer | None = None

    # -- lifecycle --------------------------------------------------------

    async def start(self) -> None:
        self._server = await asyncio.start_server(
            self._handle_connection, self.config.host, self.config.port
        )

    @property
    def port(self) -> int:
        assert self._server is not None, "server not started"
        return self._server.sockets[0].getsockname()[1]

    async def serve_forever(self) -> None:
        if self._server is None:
            await self.start()
        async with self._server:
            await self._server.serve_forever()

    async def close(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
        for sess in list(self._sessions.values()):
            await self._teardown(sess)
        if self._transcript is not None:
            self._transcript.close()

    # -- observability ------------------------------------------------------

    def snapshot(self) -> dict:
        """Registry summary; adaptive rates must re-sum to the budget."""
        sessions = [
            {
                "id": s.id,
                "mode": s.mode,
                "score": s.score,
                "rate_wps": s.rate_wps,
                "cursor": s.cursor,
            }
            for s in self._sessions.values()
        ]
        adaptive = [s.rate_wps for s in self._sessions.values()
                    if s.mode == MODE_ADAPTIVE]
        total = sum(adaptive)
        # PEST and fixed sessions pace outside the shared budget; only the
        # adaptive rates participate in conservation.
        if adaptive:
            assert abs(total - self.config.budget_wps) <= 1e-6 * self.config.budget_wps
        return {
            "sessions": sessions,
            "adaptive_rate_sum": total,
            "budget_wps": self.config.budget_wps,
        }

    def _log(self, sid: str, direction: str, payload: dict) -> None:
        if self._transcript is None:
            return
        line = {"ts": time.time(), "session": sid, "dir": direction,
                "event": payload}
        self._transcript.write(json.dumps(line, separators=(",", ":")) + "\n")
        self._transcript.flush()

    # -- outbound events ----------------------------------------------------

    def _emit(self, sess: _Session, event: dict, terminal: bool = False) -> None:
        if sess.closed:
            return
        sess.queue.put_nowait(event)
        self._log(sess.id, "out", event)
        if terminal:
            sess.closed = True
            sess.queue.put_nowait(_CLOSE)

    def _emit_error(self, sess: _Session, exc: Exception) -> None:
        name = type(exc).__name__ if isinstance(exc, CogstreamError) else "error"
        self._emit(sess, {"type": "error", "message": f"{name}: {exc}"},
                   terminal=True)

    async def _write_loop(self, sess: _Session) -> None:
        try:
            while True:
                ev = await sess.queue.get()
                if ev is _CLOSE:
                    break
                await sess.conn.send_json(ev)
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            await sess.conn.close()

    # -- registry mutations (serialized) -------------------------------------

    def _adaptive_scores(self) -> list[tuple[str, cogload.CogScore]]:
        return [(s.id, s.score) for s in self._sessions.values()
                if s.mode == MODE_ADAPTIVE]

    def _apply_plan(self) -> None:
        """Recompute adaptive rates and notify every session whose rate moved."""
        scores = self._adaptive_scores()
        if not scores:
            return
        plan = allocator.allocate(scores, self.config.alpha,
                                  self.config.budget_wps)
        for entry in plan.entries:
            sess = self._sessions[entry.session_id]
            if sess.rate_wps == entry.speed_wps:
                continue
            sess.rate_wps = entry.speed_wps
            self._emit(sess, {"type": "rate", "wps": entry.speed_wps})
            sess.rate_changed.set()

    async def _leave(self, sess: _Session) -> None:
        async with self._mutate:
            if self._sessions.pop(sess.id, None) is None:
                return
            if sess.mode == MODE_ADAPTIVE:
                self._apply_plan()

    async def _rescore(self, sess: _Session, score: cogload.CogScore) -> None:
        async with self._mutate:
            sess.score = score
            if self.config.debug_scores:
                self._emit(sess, {"type": "score", "value": score})
            if sess.mode == MODE_ADAPTIVE:
                self._apply_plan()

    # -- pacing ---------------------------------------------------------------

    async def _pace(self, sess: _Session) -> None:
        loop = asyncio.get_running_loop()
        words = sess.stream.words
        marks = list(sess.stream.score_marks)
        interval = self.config.pause_interval_words
        try:
            base = loop.time()
            while True:
                if sess.cursor >= len(words):
                    if sess.mode == MODE_PEST and words:
                        # calibration outlives one passage; cycle it
                        sess.cursor = 0
                        marks = list(sess.stream.score_marks)
                    else:
                        self._emit(sess, {"type": "done",
                                          "final_wps": sess.rate_wps},
                                   terminal=True)
                        await self._leave(sess)
                        return
                while marks and marks[0][0] <= sess.cursor:
                    _, score = marks.pop(0)
                    if self.config.estimator == ESTIMATOR_TAG:
                        await self._rescore(sess, score)
                    elif self.config.debug_scores:
                        self._emit(sess, {"type": "score", "value": score})
                # absolute-deadline schedule: the next word is due one period
                # after the previous word's deadline, not after "now"
                deadline = base + 1.0 / sess.rate_wps
                while True:
                    remaining = deadline - loop.time()
                    if remaining <= 0.0:
                        break
                    try:
                        await asyncio.wait_for(sess.rate_changed.wait(),
                                               timeout=remaining)
                    except asyncio.TimeoutError:
                        break
                    sess.rate_changed.clear()
                    deadline = base + 1.0 / sess.rate_wps
                if sess.closed:
                    return
                sess.seq += 1
                self._emit(sess, {"type": "word",
                                  "text": words[sess.cursor],
                                  "seq": sess.seq})
                sess.cursor += 1
                sess.emitted += 1
                base = deadline
                if (sess.mode == MODE_PEST
                        and sess.emitted % interval == 0):
                    await self._pause_for_feedback(sess)
                    if sess.closed:
                        return
                    base = loop.time()
        except asyncio.CancelledError:
            raise
        except Exception as exc:  # invariant: clients always get a terminal event
            self._emit_error(sess, exc)
            await self._leave(sess)

    async def _pause_for_feedback(self, sess: _Session) -> None:
        state = sess.pest_state
        assert state is not None
        options = ["faster", "slower"]
        if state.adjustment_count >= state.same_option_after:
            options.append("same")
        sess.paused = True
        sess.resume.clear()
        self._emit(sess, {"type": "pause", "options": options})
        await sess.resume.wait()
        sess.paused = False

    # -- inbound messages -----------------------------------------------------

    async def _handle_feedback(self, sess: _Session, choice: str) -> None:
        if sess.mode != MODE_PEST or not sess.paused:
            self._emit_error(sess, NotPaused("no pause is awaiting feedback"))
            await self._teardown(sess)
            return
        state = sess.pest_state
        assert state is not None
        if choice in (pest.FASTER, pest.SLOWER):
            sess.pest_state = pest.step(state, choice)
            sess.rate_wps = sess.pest_state.current_speed
            self._emit(sess, {"type": "rate", "wps": sess.rate_wps})
            sess.resume.set()
        elif choice == "same":
            try:
                final_state = pest.accept_same(state)
            except TooEarly as exc:
                self._emit_error(sess, SameTooEarly(str(exc)))
                await self._teardown(sess)
                return
            sess.pest_state = final_state
            self._emit(sess, {"type": "done",
                              "final_wps": final_state.final_speed},
                       terminal=True)
            await self._teardown(sess)
        else:
            self._emit_error(sess, BadConfig(f"unknown choice {choice!r}"))
            await self._teardown(sess)

    async def _teardown(self, sess: _Session) -> None:
        if sess.pacer is not None and not sess.pacer.done():
            sess.pacer.cancel()
        if not sess.closed:
            sess.closed = True
            sess.queue.put_nowait(_CLOSE)
        await self._leave(sess)

    # -- connection handling ----------------------------------------------------

    async def _handle_connection(self, reader: asyncio.StreamReader,
                                 writer: asyncio.StreamWriter) -> None:
        try:
            first = await reader.read(1)
        except ConnectionError:
            writer.close()
            return
        if not first:
            writer.close()
            return
        if first == b"{":
            conn = LineConn(reader, writer, preread=first)
        else:
            conn = await websocket_handshake(reader, writer, preread=first)
            if conn is None:
                return
        await self._run_session(conn)

    async def _run_session(self, conn) -> None:
        sess: _Session | None = None
        try:
            msg = await conn.recv_json()
        except (ValueError, ConnectionError, asyncio.IncompleteReadError):
            await conn.close()
            return
        if msg is None or msg.get("type") != "start":
            await conn.send_json({"type": "error",
                                  "message": "first message must be start"})
            await conn.close()
            return
        try:
            sess = await self._open_session(conn, msg)
        except CogstreamError as exc:
            name = type(exc).__name__
            await conn.send_json({"type": "error", "message": f"{name}: {exc}"})
            await conn.close()
            return
        try:
            while True:
                msg = await conn.recv_json()
                if msg is None:
                    break
                self._log(sess.id, "in", msg)
                mtype = msg.get("type")
                if mtype == "feedback":
                    await self._handle_feedback(sess, msg.get("choice"))
                elif mtype == "stop":
                    self._emit(sess, {"type": "done",
                                      "final_wps": sess.rate_wps},
                               terminal=True)
                    await self._teardown(sess)
                else:
                    self._emit_error(
                        sess, BadConfig(f"unsupported message type {mtype!r}"))
                    await self._teardown(sess)
                if sess.closed:
                    break
        except (ConnectionError, asyncio.IncompleteReadError, ValueError):
            pass
        finally:
            # reader gone: ClientGone semantics — free the budget share
            if sess is not None:
                await self._teardown(sess)
                if sess.writer_task is not None:
                    await sess.writer_task

    async def _open_session(self, conn, msg: dict) -> _Session:
        mode = msg.get("mode")
        if mode not in MODES:
            raise BadConfig(f"mode must be one of {MODES}, got {mode!r}")
        raw_text, passage = self._resolve_text(msg)
        stream = prepare_stream(raw_text)
        score = self._initial_score(mode, raw_text, stream, passage)

        if mode == MODE_PEST:
            rng = np.random.default_rng(self._seeds.spawn(1)[0])
            state = pest.start(pest.PestConfig(), rng=rng)
            rate = state.current_speed
        elif mode == MODE_FIXED:
            rate = float(msg.get("rate", self.config.budget_wps))
            if not rate > 0.0:
                raise BadConfig(f"rate must be > 0, got {rate!r}")
            state = None
        else:
            rate = 0.0  # assigned by the plan below
            state = None

        async with self._mutate:
            if len(self._sessions) >= self.config.max_sessions:
                raise CapacityExceeded(
                    f"server is at its limit of "
                    f"{self.config.max_sessions} sessions")
            sid = f"s{self._next_id}"
            self._next_id += 1
            sess = _Session(sid, mode, conn, stream, score, rate)
            sess.pest_state = state
            self._log(sid, "in", msg)
            self._sessions[sid] = sess
            previous: dict[str, float] = {}
            plan = None
            if mode == MODE_ADAPTIVE:
                previous = {s.id: s.rate_wps
                            for s in self._sessions.values()
                            if s.mode == MODE_ADAPTIVE}
                plan = allocator.allocate(self._adaptive_scores(),
                                          self.config.alpha,
                                          self.config.budget_wps)
                for entry in plan.entries:
                    self._sessions[entry.session_id].rate_wps = entry.speed_wps
            # hello is always first, then the rate the first words obey;
            # peers whose share shrank hear about it before their next word.
            self._emit(sess, {"type": "hello", "session": sid, "mode": mode,
                              "speed": sess.rate_wps})
            self._emit(sess, {"type": "rate", "wps": sess.rate_wps})
            if plan is not None:
                for entry in plan.entries:
                    other = self._sessions[entry.session_id]
                    if other is sess or previous[other.id] == entry.speed_wps:
                        continue
                    self._emit(other, {"type": "rate", "wps": entry.speed_wps})
                    other.rate_changed.set()
        sess.writer_task = asyncio.ensure_future(self._write_loop(sess))
        sess.pacer = asyncio.ensure_future(self._pace(sess))
        return sess

    def _resolve_text(self, msg: dict) -> tuple[str, PassageRecord | None]:
        pid = msg.get("passage_id")
        if pid is not None:
            passage = self.passages.get(pid)
            if passage is None or passage.text is None:
                raise UnknownPassage(f"no passage {pid!r} on this server")
            return passage.text, passage
        text = msg.get("text")
        if not text:
            raise UnknownPassage("start needs a passage_id or raw text")
        return text, None

    def _initial_score(self, mode: str, raw_text: str,
                       stream: PreparedStream,
                       passage: PassageRecord | None) -> cogload.CogScore:
        if mode != MODE_ADAPTIVE:
            return cogload.DEFAULT_SCORE
        est = self.config.estimator
        if est == ESTIMATOR_TAG:
            return cogload.DEFAULT_SCORE
        if est == ESTIMATOR_ORACLE:
            if passage is None or passage.oracle_score is None:
                raise MissingScores("oracle estimator needs a stored score")
            return passage.oracle_score
        display = " ".join(stream.words)
        return cogload.fog_to_score(cogload.gunning_fog(display).index)


class LineConn:
    """Newline-delimited JSON over a raw asyncio stream."""

    def __init__(self, reader: asyncio.StreamReader,
                 writer: asyncio.StreamWriter, preread: bytes = b""):
        self._reader = reader
        self._writer = writer
        self._preread = preread

    async def recv_json(self) -> dict | None:
        line = await self._reader.readline()
        if self._preread:
            line = self._preread + line
            self._preread = b""
        if not line:
            return None
        text = line.decode("utf-8").strip()
        if not text:
            return await self.recv_json()
        return json.loads(text)

    async def send_json(self, obj: dict) -> None:
        data = json.dumps(obj, separators=(",", ":")).encode("utf-8") + b"\n"
        self._writer.write(data)
        await self._writer.drain()

    async def close(self) -> None:
        try:
            self._writer.close()
            await self._writer.wait_closed()
        except (ConnectionError, RuntimeError):
            pass
