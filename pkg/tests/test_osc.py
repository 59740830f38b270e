import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinaffect.osc import (
    MalformedPacket,
    OscPacket,
    OscSender,
    UnsupportedType,
    decode_osc,
    encode_osc,
)


def test_golden_tempo_packet():
    # hand-encoded per OSC 1.0: address padded to 16, ",f" padded to 4,
    # 100.0 as big-endian float32 0x42C80000
    packet = OscPacket("/cv/audio/tempo", (100.0,))
    encoded = encode_osc(packet)
    expected = b"/cv/audio/tempo\x00" + b",f\x00\x00" + struct.pack(">f", 100.0)
    assert expected[-4:] == bytes.fromhex("42c80000")
    assert encoded == expected
    assert len(encoded) == 24


def test_golden_no_arg_packet():
    encoded = encode_osc(OscPacket("/a"))
    assert encoded == b"/a\x00\x00" + b",\x00\x00\x00"
    assert len(encoded) == 8


def test_golden_int_and_string_packet():
    encoded = encode_osc(OscPacket("/x", (7, "hi")))
    expected = (
        b"/x\x00\x00"          # address + pad
        + b",is\x00"           # tags + pad
        + struct.pack(">i", 7)
        + b"hi\x00\x00"        # string + pad
    )
    assert encoded == expected


def test_blob_encoding_alignment():
    encoded = encode_osc(OscPacket("/b", (b"\x01\x02\x03",)))
    # blob: size int32 (3) + 3 bytes + 1 pad
    assert encoded.endswith(struct.pack(">i", 3) + b"\x01\x02\x03\x00")
    assert len(encoded) % 4 == 0


def test_round_trip_basic():
    packet = OscPacket("/cv/emotion/1", (0.5, -0.25, 1.0, "happiness"))
    decoded = decode_osc(encode_osc(packet))
    assert decoded.address == packet.address
    assert decoded.arguments[3] == "happiness"
    for got, want in zip(decoded.arguments[:3], packet.arguments[:3]):
        assert got == pytest.approx(want)


def test_decode_odd_length_rejected():
    with pytest.raises(MalformedPacket):
        decode_osc(b"/a\x00\x00,f\x00")  # 7 bytes


def test_decode_truncated_float_rejected():
    data = b"/a\x00\x00" + b",f\x00\x00"  # tags promise a float, none present
    with pytest.raises(MalformedPacket) as err:
        decode_osc(data)
    assert err.value.offset == 8


def test_decode_bad_address_rejected():
    with pytest.raises(MalformedPacket):
        decode_osc(b"a\x00\x00\x00,\x00\x00\x00")


def test_encode_unsupported_type_rejected():
    with pytest.raises(UnsupportedType):
        encode_osc(OscPacket("/x", ([1, 2],)))
    with pytest.raises(UnsupportedType):
        encode_osc(OscPacket("/x", (True,)))


def test_address_must_start_with_slash():
    with pytest.raises(ValueError):
        OscPacket("nope")


osc_strings = st.text(
    alphabet=st.characters(min_codepoint=0x20, max_codepoint=0x7E),
    max_size=32,
)
osc_args = st.one_of(
    st.integers(min_value=-(2**31), max_value=2**31 - 1),
    st.floats(width=32, allow_nan=False, allow_infinity=False).map(
        lambda f: float(np.float32(f))
    ),
    osc_strings,
    st.binary(max_size=64),
)


@settings(max_examples=500, deadline=None)
@given(
    address=osc_strings.map(lambda s: "/" + s.replace("\x00", "")),
    args=st.lists(osc_args, max_size=8),
)
def test_fuzzed_round_trip_and_alignment(address, args):
    packet = OscPacket(address, tuple(args))
    encoded = encode_osc(packet)
    assert len(encoded) % 4 == 0
    decoded = decode_osc(encoded)
    assert decoded.address == packet.address
    assert len(decoded.arguments) == len(packet.arguments)
    for got, want in zip(decoded.arguments, packet.arguments):
        if isinstance(want, float):
            assert got == pytest.approx(want, rel=1e-6, abs=1e-30)
        else:
            assert got == want


def test_sender_swallows_unreachable_destination():
    sender = OscSender("203.0.113.1", 9)  # TEST-NET, nothing listens
    ok = sender.send(OscPacket("/x", (1.0,)))
    # UDP sendto rarely fails synchronously; either way the engine survives
    assert ok in (True, False)
    sender.close()


def test_sender_counts_socket_errors(monkeypatch):
    sender = OscSender("127.0.0.1", 9000)

    class FailingSocket:
        def sendto(self, *_):
            raise OSError("unreachable")

        def close(self):
            pass

    sender._sock = FailingSocket()
    assert sender.send(OscPacket("/x", (1.0,))) is False
    assert sender.error_count == 1
    assert sender.sent_count == 0
