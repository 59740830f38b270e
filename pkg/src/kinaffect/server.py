"""Serve mode: WebSocket state broadcasting plus OSC media output.

One engine per server; WebSocket handlers feed it frames and commands and
every connected client receives the same per-hop state snapshots. Slow
clients lose old snapshots (bounded queues, drop-oldest), never block
processing.

Client -> engine messages:
  {"cmd": "start"|"teach_start"|"teach_end"|"explore"|"feedback"|"end",
   "label"?: str, "agree"?: bool}
  {"frames": [{"t": .., "persons": [{"id": .., "kp": [[x,y,conf] x 17]}]}]}

Engine -> client messages:
  {"type": "state", "hop": n, "phase": .., "persons": [{"id", "kp",
   "features", "emotion": {"dist", "top", "v", "a", "intensity",
   "confidence"}}], "group": {..}, "group_features": {..}, "audio": {..}}
  {"type": "cosmos", "url": .., "summary": {..}}
  {"type": "error", "error": .., "detail": ..}
  {"type": "ack", "cmd": ..}
"""

from __future__ import annotations

import asyncio
import json
import logging
import socket
from collections import deque

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .config import EngineConfig
from .model import FrameSource
from .osc import OscSender
from .recording import iter_records
from .session import HopResult, SessionEngine

logger = logging.getLogger(__name__)

STATE_QUEUE_LIMIT = 64


class BindError(OSError):
    pass


class _Client:
    def __init__(self, ws: WebSocket):
        self.ws = ws
        self.queue: deque[dict] = deque(maxlen=STATE_QUEUE_LIMIT)
        self.wakeup = asyncio.Event()

    def push(self, message: dict) -> None:
        self.queue.append(message)
        self.wakeup.set()


def state_message(hop: HopResult) -> dict:
    return {
        "type": "state",
        "hop": hop.hop,
        "t": round(hop.timestamp, 6),
        "phase": hop.phase.value,
        "persons": hop.persons,
        "group": hop.group,
        "group_features": hop.group_features,
        "audio": hop.audio,
    }


def create_app(
    config: EngineConfig,
    osc_sender: OscSender | None = None,
    replay_path: str | None = None,
) -> FastAPI:
    from contextlib import asynccontextmanager

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        task = None
        if replay_path:
            task = asyncio.create_task(feed_replay(replay_path))
        yield
        if task is not None:
            task.cancel()

    app = FastAPI(title="kinaffect", version="0.1.0", lifespan=lifespan)
    engine = SessionEngine(config, osc_sender=osc_sender)
    clients: list[_Client] = []

    def broadcast(message: dict) -> None:
        for client in clients:
            client.push(message)

    engine.on_hop = lambda hop: broadcast(state_message(hop))
    engine.on_cosmos = lambda cosmos: broadcast(
        {"type": "cosmos", "url": cosmos["url"], "summary": cosmos["summary"]}
    )
    app.state.engine = engine

    async def feed_replay(path: str) -> None:
        loop = asyncio.get_running_loop()
        start_wall = loop.time()
        start_t = None
        with open(path, "r", encoding="utf-8") as fh:
            for _, record in iter_records(fh):
                t = float(record["t"])
                if start_t is None:
                    start_t = t
                lag = (t - start_t) - (loop.time() - start_wall)
                if lag > 0:
                    await asyncio.sleep(lag)
                engine.submit_record(record, FrameSource.RECORDING)

    async def sender_loop(client: _Client) -> None:
        while True:
            await client.wakeup.wait()
            client.wakeup.clear()
            while client.queue:
                await client.ws.send_text(
                    json.dumps(client.queue.popleft(), separators=(",", ":"))
                )

    class MalformedMessage(ValueError):
        """Message shape or frame data bad enough to drop the client."""

    def handle_message(message: dict) -> dict | None:
        if "cmd" in message:
            cmd = message["cmd"]
            engine.handle_command(
                engine.current_time,
                cmd,
                label=message.get("label"),
                agree=message.get("agree"),
            )
            return {"type": "ack", "cmd": cmd, "phase": engine.phase.value}
        if "frames" in message:
            for record in message["frames"]:
                try:
                    engine.submit_record(record, FrameSource.LIVE)
                except (ValueError, TypeError, KeyError) as exc:
                    raise MalformedMessage(f"bad frame record: {exc}") from exc
            return None
        raise MalformedMessage("message must carry 'cmd' or 'frames'")

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        client = _Client(ws)
        clients.append(client)
        sender = asyncio.create_task(sender_loop(client))
        logger.info("client connected (%d total)", len(clients))
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    try:
                        message = json.loads(raw)
                    except json.JSONDecodeError as exc:
                        raise MalformedMessage(f"not JSON: {exc}") from exc
                    if not isinstance(message, dict):
                        raise MalformedMessage("message must be a JSON object")
                    reply = handle_message(message)
                except MalformedMessage as exc:
                    # unparseable message or corrupt frame data: error reply,
                    # then drop this client; the engine keeps running
                    await ws.send_text(json.dumps(
                        {"type": "error", "error": "MalformedMessage", "detail": str(exc)}
                    ))
                    break
                except ValueError as exc:
                    # legal-shape but rejected command (wrong phase etc.):
                    # surface inline, keep the connection
                    client.push({
                        "type": "error",
                        "error": type(exc).__name__,
                        "detail": str(exc),
                    })
                    continue
                if reply is not None:
                    client.push(reply)
        except WebSocketDisconnect:
            pass
        finally:
            sender.cancel()
            if client in clients:
                clients.remove(client)
            logger.info("client disconnected (%d left)", len(clients))

    return app


def check_port_free(host: str, port: int) -> None:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    try:
        probe.bind((host, port))
    except OSError as exc:
        raise BindError(f"cannot bind {host}:{port}: {exc}") from exc
    finally:
        probe.close()


def serve(
    config: EngineConfig,
    host: str = "127.0.0.1",
    replay_path: str | None = None,
) -> None:
    import uvicorn

    check_port_free(host, config.ws_port)
    sender = OscSender(config.osc_host, config.osc_port)
    app = create_app(config, osc_sender=sender, replay_path=replay_path)
    uvicorn.run(app, host=host, port=config.ws_port, log_level="warning")
