"""Just enough RFC 6455 to carry the wire protocol into a browser.

The pacing server speaks newline-delimited JSON over a raw socket, which a
browser cannot open.  The same listening port therefore also accepts a
WebSocket upgrade (dispatched on the request's first byte) and exchanges
the identical JSON objects, one per text frame.  Only the server side of
the protocol is implemented: no extensions, no fragmented outgoing frames,
text and control frames only.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import json

_ACCEPT_GUID = b"258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
_MAX_HEAD = 16 * 1024
_MAX_FRAME = 1 << 20

_OP_CONT = 0x0
_OP_TEXT = 0x1
_OP_CLOSE = 0x8
_OP_PING = 0x9
_OP_PONG = 0xA


def _accept_token(key: str) -> str:
    digest = hashlib.sha1(key.encode("ascii") + _ACCEPT_GUID).digest()
    return base64.b64encode(digest).decode("ascii")


def _unmask(payload: bytes, key: bytes) -> bytes:
    repeated = (key * (len(payload) // 4 + 1))[: len(payload)]
    return bytes(a ^ b for a, b in zip(payload, repeated))


async def websocket_handshake(
    reader: asyncio.StreamReader,
    writer: asyncio.StreamWriter,
    preread: bytes = b"",
) -> "WebSocketConn | None":
    """Complete an upgrade request, or answer 400 and hang up."""
    head = bytearray(preread)
    while b"\r\n\r\n" not in head:
        if len(head) > _MAX_HEAD:
            writer.close()
            return None
        chunk = await reader.read(1024)
        if not chunk:
            writer.close()
            return None
        head.extend(chunk)
    raw_head, _, leftover = bytes(head).partition(b"\r\n\r\n")
    lines = raw_head.decode("latin-1").split("\r\n")
    headers: dict[str, str] = {}
    for line in lines[1:]:
        name, sep, value = line.partition(":")
        if sep:
            headers[name.strip().lower()] = value.strip()
    key = headers.get("sec-websocket-key")
    if (key is None
            or "websocket" not in headers.get("upgrade", "").lower()):
        writer.write(b"HTTP/1.1 400 Bad Request\r\n"
                     b"Content-Length: 0\r\nConnection: close\r\n\r\n")
        try:
            await writer.drain()
        except ConnectionError:
            pass
        writer.close()
        return None
    response = (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {_accept_token(key)}\r\n"
        "\r\n"
    )
    writer.write(response.encode("ascii"))
    await writer.drain()
    return WebSocketConn(reader, writer, preread=leftover)


class WebSocketConn:
    """One JSON object per text frame, mirroring the line-based transport."""

    def __init__(self, reader: asyncio.StreamReader,
                 writer: asyncio.StreamWriter, preread: bytes = b""):
        self._reader = reader
        self._writer = writer
        self._preread = bytearray(preread)
        self._closed = False

    async def _read_exactly(self, n: int) -> bytes:
        if self._preread:
            take = bytes(self._preread[:n])
            del self._preread[: len(take)]
            if len(take) == n:
                return take
            return take + await self._reader.readexactly(n - len(take))
        return await self._reader.readexactly(n)

    async def _read_frame(self) -> tuple[bool, int, bytes]:
        b1, b2 = await self._read_exactly(2)
        fin = bool(b1 & 0x80)
        opcode = b1 & 0x0F
        masked = bool(b2 & 0x80)
        length = b2 & 0x7F
        if length == 126:
            length = int.from_bytes(await self._read_exactly(2), "big")
        elif length == 127:
            length = int.from_bytes(await self._read_exactly(8), "big")
        if length > _MAX_FRAME:
            raise ValueError(f"frame of {length} bytes exceeds the limit")
        key = await self._read_exactly(4) if masked else b""
        payload = await self._read_exactly(length) if length else b""
        if masked:
            payload = _unmask(payload, key)
        elif length:
            # clients must mask (RFC 6455 §5.1); treat violations as EOF
            raise ConnectionResetError("unmasked client frame")
        return fin, opcode, payload

    async def recv_json(self) -> dict | None:
        message = bytearray()
        in_message = False
        while True:
            try:
                fin, opcode, payload = await self._read_frame()
            except (asyncio.IncompleteReadError, ConnectionError):
                return None
            if opcode == _OP_PING:
                await self._send_frame(_OP_PONG, payload)
                continue
            if opcode == _OP_PONG:
                continue
            if opcode == _OP_CLOSE:
                await self._send_close()
                return None
            if opcode == _OP_TEXT and not in_message:
                in_message = True
            elif not (opcode == _OP_CONT and in_message):
                raise ValueError(f"unexpected opcode {opcode:#x}")
            message.extend(payload)
            if fin:
                return json.loads(message.decode("utf-8"))

    async def _send_frame(self, opcode: int, payload: bytes) -> None:
        header = bytearray([0x80 | opcode])
        n = len(payload)
        if n < 126:
            header.append(n)
        elif n < 1 << 16:
            header.append(126)
            header.extend(n.to_bytes(2, "big"))
        else:
            header.append(127)
            header.extend(n.to_bytes(8, "big"))
        self._writer.write(bytes(header) + payload)
        await self._writer.drain()

    async def send_json(self, obj: dict) -> None:
        data = json.dumps(obj, separators=(",", ":")).encode("utf-8")
        await self._send_frame(_OP_TEXT, data)

    async def _send_close(self) -> None:
        if not self._closed:
            self._closed = True
            try:
                await self._send_frame(_OP_CLOSE, (1000).to_bytes(2, "big"))
            except (ConnectionError, RuntimeError):
                pass

    async def close(self) -> None:
        await self._send_close()
        try:
            self._writer.close()
            await self._writer.wait_closed()
        except (ConnectionError, RuntimeError):
            pass
