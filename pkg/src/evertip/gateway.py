"""Teleoperation gateway: the live simulator behind TCP and WebSocket.

One asyncio loop owns the simulator and ticks it. Clients connect over
plain TCP (JSON Lines) or WebSocket (one JSON line per message); the first
connection gets the operator role, everyone after it observes. Commands
queue between ticks and are applied in arrival order, so two targets in
one tick gap resolve last-writer-wins. Telemetry and events broadcast to
every client; per-client send queues keep one slow reader from stalling
the tick loop.

With realtime=False the loop free-runs as fast as the machine allows
(useful for tests); realtime=True paces ticks against the wall clock.
"""

from __future__ import annotations

import asyncio
import contextlib
import logging
from pathlib import Path

from .protocol import (
    CommandMessage,
    ErrorReply,
    Event,
    Hello,
    ProtocolError,
    WarningReply,
    decode_line,
    encode_message,
)
from .scene import Scene, scene_to_dict
from .session import SessionWriter, build_header
from .simulator import NoiseModel, SimConfig, Simulator
from .spray import SpraySpec

log = logging.getLogger(__name__)

SEND_QUEUE_LIMIT = 512  # frames; a client this far behind gets dropped


class _Client:
    def __init__(self, gateway: "Gateway", role: str, label: str):
        self.gateway = gateway
        self.role = role
        self.label = label
        self.last_seq = -1
        self.queue: asyncio.Queue[str | None] = asyncio.Queue(maxsize=SEND_QUEUE_LIMIT)
        self.alive = True

    def push(self, line: str):
        if not self.alive:
            return
        try:
            self.queue.put_nowait(line)
        except asyncio.QueueFull:
            log.warning("client %s too slow, dropping", self.label)
            self.alive = False

    def close(self):
        self.alive = False
        with contextlib.suppress(asyncio.QueueFull):
            self.queue.put_nowait(None)


class Gateway:
    def __init__(
        self,
        scene: Scene,
        config: SimConfig | None = None,
        spray: SpraySpec | None = None,
        noise: NoiseModel | None = None,
        seed: int = 0,
        realtime: bool = False,
        record: str | Path | None = None,
    ):
        self.sim = Simulator(scene, config=config, spray=spray, noise=noise, seed=seed)
        self.realtime = realtime
        self.clients: list[_Client] = []
        self.commands: asyncio.Queue[tuple[_Client, CommandMessage]] = asyncio.Queue()
        self._servers: list = []
        self._tick_task: asyncio.Task | None = None
        self._cmd_seq = 0
        self.writer = None
        if record is not None:
            header = build_header(
                scene_to_dict(scene),
                self.sim.config,
                self.sim.spray_spec,
                self.sim.noise,
                seed,
            )
            self.writer = SessionWriter(record, header)

    # ------------------------------------------------------- lifecycle --

    async def start(self, host: str = "127.0.0.1", port: int = 8770, ws_port: int | None = None):
        server = await asyncio.start_server(self._handle_tcp, host, port)
        self._servers.append(server)
        if ws_port is not None:
            import websockets

            ws_server = await websockets.serve(self._handle_ws, host, ws_port)
            self._servers.append(ws_server)
        self._tick_task = asyncio.create_task(self._tick_loop())

    async def stop(self):
        if self._tick_task:
            self._tick_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await self._tick_task
        for srv in self._servers:
            srv.close()
            if hasattr(srv, "wait_closed"):
                with contextlib.suppress(Exception):
                    await srv.wait_closed()
        for c in list(self.clients):
            c.close()
        if self.writer:
            self.writer.close()

    # ------------------------------------------------------ connections --

    def _admit(self, label: str) -> _Client:
        role = "operator" if not any(
            c.alive and c.role == "operator" for c in self.clients
        ) else "observer"
        client = _Client(self, role, label)
        self.clients.append(client)
        client.push(encode_message(Hello(role=role)))
        # the plan view needs the world; ship it once, as a plain event
        client.push(
            encode_message(Event(self.sim.sim_time, "scene", scene_to_dict(self.sim.scene)))
        )
        log.info("client %s connected as %s", label, role)
        return client

    def _retire(self, client: _Client):
        client.close()
        if client in self.clients:
            self.clients.remove(client)

    def _receive_line(self, client: _Client, line: str):
        try:
            msg = decode_line(line)
        except ProtocolError as e:
            client.push(encode_message(ErrorReply(str(e), field=e.field)))
            return
        if msg is None:
            client.push(encode_message(WarningReply("empty line skipped")))
            return
        if not isinstance(msg, CommandMessage):
            client.push(
                encode_message(
                    ErrorReply(f"clients send cmd messages, not {type(msg).__name__}", field="type")
                )
            )
            return
        if client.role != "operator":
            client.push(
                encode_message(ErrorReply("observers are read-only", seq=msg.seq))
            )
            return
        if msg.seq <= client.last_seq:
            client.push(
                encode_message(
                    WarningReply(
                        f"stale seq {msg.seq} (last was {client.last_seq}); dropped",
                        seq=msg.seq,
                    )
                )
            )
            return
        client.last_seq = msg.seq
        self.commands.put_nowait((client, msg))

    async def _sender(self, client: _Client, send_text):
        while True:
            line = await client.queue.get()
            if line is None or not client.alive:
                break
            await send_text(line)

    async def _handle_tcp(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        peer = writer.get_extra_info("peername")
        client = self._admit(f"tcp:{peer}")

        async def send_text(line: str):
            writer.write(line.encode() + b"\n")
            await writer.drain()

        sender = asyncio.create_task(self._sender(client, send_text))
        try:
            while True:
                raw = await reader.readline()
                if not raw:
                    break
                self._receive_line(client, raw.decode(errors="replace"))
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            self._retire(client)
            sender.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sender
            writer.close()
            with contextlib.suppress(Exception):
                await writer.wait_closed()

    async def _handle_ws(self, websocket):
        client = self._admit(f"ws:{websocket.remote_address}")

        sender = asyncio.create_task(self._sender(client, websocket.send))
        try:
            async for message in websocket:
                if isinstance(message, bytes):
                    message = message.decode(errors="replace")
                for line in message.splitlines():
                    self._receive_line(client, line)
        except Exception:
            pass
        finally:
            self._retire(client)
            sender.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await sender

    # ------------------------------------------------------------ ticks --

    def _broadcast(self, line: str):
        for c in list(self.clients):
            if c.alive:
                c.push(line)
            else:
                self._retire(c)

    def _apply_queued(self):
        while True:
            try:
                client, msg = self.commands.get_nowait()
            except asyncio.QueueEmpty:
                return
            try:
                warnings = self.sim.apply(msg.kind, msg.args)
            except ProtocolError as e:
                client.push(encode_message(ErrorReply(str(e), field=e.field, seq=msg.seq)))
                continue
            if self.writer:
                self.writer.command(
                    round(self.sim.sim_time * 1000), self._cmd_seq, msg.kind, msg.args
                )
            self._cmd_seq += 1
            for w in warnings:
                line = encode_message(WarningReply(w, seq=msg.seq))
                client.push(line)
                if self.writer:
                    self.writer.warning(w, msg.seq)

    def _flush_events(self):
        for ev in self.sim.take_events():
            line = encode_message(ev)
            self._broadcast(line)
            if self.writer:
                self.writer.event(ev)

    async def _tick_loop(self):
        sim = self.sim
        dt = sim.config.dt
        tpf = sim.config.ticks_per_frame
        loop = asyncio.get_running_loop()
        next_wall = loop.time()
        while True:
            self._apply_queued()
            self._flush_events()
            if sim.tick % tpf == 0:
                fr = sim.frame()
                line = encode_message(fr)
                self._broadcast(line)
                if self.writer:
                    self.writer.frame(fr)
            sim.step()
            self._flush_events()
            if self.realtime:
                next_wall += dt
                delay = next_wall - loop.time()
                if delay > 0:
                    await asyncio.sleep(delay)
                else:
                    next_wall = loop.time()  # fell behind; don't burst
                    await asyncio.sleep(0)
            else:
                await asyncio.sleep(0)


async def serve(
    scene: Scene,
    config: SimConfig | None = None,
    spray: SpraySpec | None = None,
    noise: NoiseModel | None = None,
    seed: int = 0,
    host: str = "127.0.0.1",
    port: int = 8770,
    ws_port: int | None = None,
    realtime: bool = True,
    record: str | Path | None = None,
):
    """Run a gateway until cancelled (the CLI entry point)."""
    gw = Gateway(
        scene, config=config, spray=spray, noise=noise, seed=seed,
        realtime=realtime, record=record,
    )
    await gw.start(host=host, port=port, ws_port=ws_port)
    log.info("gateway listening on tcp %s:%d%s", host, port,
             f" / ws :{ws_port}" if ws_port else "")
    try:
        while True:
            await asyncio.sleep(3600)
    finally:
        await gw.stop()
