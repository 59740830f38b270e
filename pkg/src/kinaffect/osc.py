"""Open Sound Control 1.0 codec and UDP sender.

Messages are 4-byte aligned throughout, numerics big-endian. Supported
argument types: int32 ('i'), float32 ('f'), string ('s'), blob ('b').
"""

from __future__ import annotations

import logging
import socket
import struct
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

OscArg = int | float | str | bytes


class UnsupportedType(TypeError):
    pass


class MalformedPacket(ValueError):
    def __init__(self, offset: int, message: str):
        super().__init__(f"offset {offset}: {message}")
        self.offset = offset


@dataclass(frozen=True)
class OscPacket:
    address: str
    arguments: tuple[OscArg, ...] = ()

    def __post_init__(self):
        if not self.address.startswith("/"):
            raise ValueError(f"OSC address must start with '/': {self.address!r}")


def _pad_string(value: str) -> bytes:
    raw = value.encode("utf-8") + b"\x00"
    return raw + b"\x00" * (-len(raw) % 4)


def _pad_blob(value: bytes) -> bytes:
    raw = struct.pack(">i", len(value)) + value
    return raw + b"\x00" * (-len(raw) % 4)


def encode_osc(packet: OscPacket) -> bytes:
    out = bytearray(_pad_string(packet.address))
    tags = ","
    body = bytearray()
    for arg in packet.arguments:
        if isinstance(arg, bool):
            raise UnsupportedType("bool is not an OSC 1.0 argument type here")
        if isinstance(arg, int):
            tags += "i"
            body += struct.pack(">i", arg)
        elif isinstance(arg, float):
            tags += "f"
            body += struct.pack(">f", arg)
        elif isinstance(arg, str):
            tags += "s"
            body += _pad_string(arg)
        elif isinstance(arg, bytes):
            tags += "b"
            body += _pad_blob(arg)
        else:
            raise UnsupportedType(f"cannot encode {type(arg).__name__}")
    out += _pad_string(tags)
    out += body
    return bytes(out)


def _read_string(data: bytes, offset: int) -> tuple[str, int]:
    end = data.find(b"\x00", offset)
    if end < 0:
        raise MalformedPacket(offset, "unterminated string")
    value = data[offset:end].decode("utf-8", errors="strict")
    advance = end + 1 - offset
    advance += -advance % 4
    if offset + advance > len(data):
        raise MalformedPacket(offset, "string padding past end of packet")
    return value, offset + advance


def decode_osc(data: bytes) -> OscPacket:
    if len(data) % 4 != 0:
        raise MalformedPacket(len(data), "packet length not a multiple of 4")
    if not data:
        raise MalformedPacket(0, "empty packet")
    address, offset = _read_string(data, 0)
    if not address.startswith("/"):
        raise MalformedPacket(0, f"address must start with '/': {address!r}")
    if offset >= len(data):
        # address-only packet without a type-tag string
        return OscPacket(address)
    tags, offset = _read_string(data, offset)
    if not tags.startswith(","):
        raise MalformedPacket(offset, "type-tag string must start with ','")
    args: list[OscArg] = []
    for tag in tags[1:]:
        if tag == "i":
            if offset + 4 > len(data):
                raise MalformedPacket(offset, "truncated int32")
            args.append(struct.unpack_from(">i", data, offset)[0])
            offset += 4
        elif tag == "f":
            if offset + 4 > len(data):
                raise MalformedPacket(offset, "truncated float32")
            args.append(struct.unpack_from(">f", data, offset)[0])
            offset += 4
        elif tag == "s":
            value, offset = _read_string(data, offset)
            args.append(value)
        elif tag == "b":
            if offset + 4 > len(data):
                raise MalformedPacket(offset, "truncated blob size")
            size = struct.unpack_from(">i", data, offset)[0]
            if size < 0:
                raise MalformedPacket(offset, "negative blob size")
            offset += 4
            if offset + size > len(data):
                raise MalformedPacket(offset, "truncated blob body")
            args.append(data[offset:offset + size])
            offset += size + (-size % 4)
            if offset > len(data):
                raise MalformedPacket(offset, "blob padding past end of packet")
        else:
            raise MalformedPacket(offset, f"unsupported type tag {tag!r}")
    return OscPacket(address, tuple(args))


@dataclass
class OscSender:
    """Fire-and-forget UDP transport; socket errors are logged, never raised."""

    host: str = "127.0.0.1"
    port: int = 9000
    sent_count: int = 0
    error_count: int = 0
    _sock: socket.socket | None = field(default=None, repr=False)

    def _socket(self) -> socket.socket:
        if self._sock is None:
            self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        return self._sock

    def send(self, packet: OscPacket) -> bool:
        try:
            self._socket().sendto(encode_osc(packet), (self.host, self.port))
            self.sent_count += 1
            return True
        except OSError as exc:
            self.error_count += 1
            logger.warning("OSC send to %s:%d failed: %s", self.host, self.port, exc)
            return False

    def close(self) -> None:
        if self._sock is not None:
            self._sock.close()
            self._sock = None
