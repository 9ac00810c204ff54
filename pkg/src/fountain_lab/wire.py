"""Bit-exact frame formats and an in-process lossy file-transfer pipeline.

All frames open with magic ``4F 46``, a version byte (1), and a frame-type
byte, and close with a big-endian CRC-32 over every preceding byte.

Data frame (type 0)::

    magic(2) version(1) type(1) session_id(8) seq_no(8)
    degree(2) indices(4 * degree) payload_len(2) payload crc32(4)

Feedback frame (type 1)::

    magic(2) version(1) type(1) session_id(8) fb_kind(1) recovered(4) crc32(4)

Session header frame (type 2), sent once at setup::

    magic(2) version(1) type(1) session_id(8) k(4) symbol_size(2)
    original_len(8) crc32(4)

Indices are explicit (not a shared-seed schedule) because feedback makes the
encoder's choices state-dependent; the receiver could not re-derive them.
``seq_no`` is the transmission slot, which lets the systematic scheme's
receiver notice the end of the index pass even when tail frames are erased.

The transfer loop runs sender and receiver as two tasks joined by in-process
queues; the erasure channel decides data-frame delivery before enqueueing.
Feedback frames and the session header travel on the control path, which is
lossless per the channel model.
"""

from __future__ import annotations

import math
import struct
import zlib
from collections import deque
from dataclasses import dataclass, field

from .channel import ErasureChannel
from .graph import CodedSymbol, SourceBlock
from .schemes import (
    Encoder,
    EveryDegreeChange,
    FeedbackKind,
    FeedbackMsg,
    FeedbackPolicy,
    Receiver,
    SchemeConfig,
    scheme_name,
)
from .sim import DEFAULT_BUDGET_FACTOR, TracePoint

__all__ = [
    "MAGIC",
    "VERSION",
    "FrameError",
    "TransferFailed",
    "DataFrame",
    "FeedbackFrame",
    "SessionHeader",
    "encode_data",
    "encode_feedback",
    "encode_header",
    "decode_frame",
    "TransferReport",
    "transfer",
    "transfer_file",
]

MAGIC = b"\x4f\x46"
VERSION = 1
TYPE_DATA = 0
TYPE_FEEDBACK = 1
TYPE_HEADER = 2

#: Every decode failure carries exactly one of these codes.
ERROR_CODES = (
    "truncated",
    "bad-magic",
    "bad-version",
    "bad-frame-type",
    "length-mismatch",
    "crc-mismatch",
    "malformed-frame",
)


class FrameError(ValueError):
    def __init__(self, code: str, detail: str = ""):
        assert code in ERROR_CODES
        self.code = code
        super().__init__(f"{code}: {detail}" if detail else code)


class TransferFailed(RuntimeError):
    """Transfer gave up (budget exceeded); carries the partial report."""

    def __init__(self, report: "TransferReport"):
        self.report = report
        super().__init__(f"budget exceeded after {report.frames_sent} data frames")


@dataclass(frozen=True)
class DataFrame:
    session_id: int
    seq_no: int
    indices: tuple[int, ...]
    payload: bytes


@dataclass(frozen=True)
class FeedbackFrame:
    session_id: int
    kind: FeedbackKind
    recovered: int


@dataclass(frozen=True)
class SessionHeader:
    session_id: int
    k: int
    symbol_size: int
    original_len: int


def _seal(body: bytes) -> bytes:
    return body + struct.pack(">I", zlib.crc32(body))


def encode_data(sym: CodedSymbol, session_id: int, seq_no: int) -> bytes:
    """Serialize a coded symbol; a None payload encodes as zero length."""
    payload = sym.payload or b""
    if len(payload) > 0xFFFF:
        raise ValueError("payload too large for the 2-byte length field")
    if sym.degree > 0xFFFF:
        raise ValueError("degree too large for the 2-byte degree field")
    body = MAGIC + struct.pack(">BBQQH", VERSION, TYPE_DATA, session_id, seq_no, sym.degree)
    body += struct.pack(f">{sym.degree}I", *sym.indices)
    body += struct.pack(">H", len(payload)) + payload
    return _seal(body)


def encode_feedback(msg: FeedbackMsg, session_id: int) -> bytes:
    body = MAGIC + struct.pack(">BBQBI", VERSION, TYPE_FEEDBACK, session_id, int(msg.kind), msg.recovered)
    return _seal(body)


def encode_header(header: SessionHeader) -> bytes:
    body = MAGIC + struct.pack(
        ">BBQIHQ", VERSION, TYPE_HEADER, header.session_id,
        header.k, header.symbol_size, header.original_len,
    )
    return _seal(body)


def _need(buf: bytes, n: int) -> None:
    if len(buf) < n:
        raise FrameError("truncated", f"need {n} bytes, have {len(buf)}")


def decode_frame(buf: bytes) -> DataFrame | FeedbackFrame | SessionHeader:
    """Parse exactly one frame; anything else raises FrameError with a code."""
    _need(buf, 4)
    if buf[:2] != MAGIC:
        raise FrameError("bad-magic", buf[:2].hex())
    if buf[2] != VERSION:
        raise FrameError("bad-version", str(buf[2]))
    ftype = buf[3]
    if ftype == TYPE_DATA:
        _need(buf, 22)
        session_id, seq_no, degree = struct.unpack(">QQH", buf[4:22])
        total = 22 + 4 * degree + 2
        _need(buf, total)
        indices = struct.unpack(f">{degree}I", buf[22:22 + 4 * degree]) if degree else ()
        (payload_len,) = struct.unpack(">H", buf[total - 2:total])
        end = total + payload_len + 4
        _need(buf, end)
        if len(buf) != end:
            raise FrameError("length-mismatch", f"{len(buf)} != {end}")
        _check_crc(buf)
        payload = buf[total:total + payload_len]
        if degree < 1 or any(b <= a for a, b in zip(indices, indices[1:])):
            raise FrameError("malformed-frame", "indices not strictly increasing")
        return DataFrame(session_id, seq_no, indices, payload)
    if ftype == TYPE_FEEDBACK:
        end = 21
        _need(buf, end)
        if len(buf) != end:
            raise FrameError("length-mismatch", f"{len(buf)} != {end}")
        _check_crc(buf)
        session_id, kind, recovered = struct.unpack(">QBI", buf[4:17])
        if kind > 3:
            raise FrameError("malformed-frame", f"feedback kind {kind}")
        return FeedbackFrame(session_id, FeedbackKind(kind), recovered)
    if ftype == TYPE_HEADER:
        end = 30
        _need(buf, end)
        if len(buf) != end:
            raise FrameError("length-mismatch", f"{len(buf)} != {end}")
        _check_crc(buf)
        session_id, k, symbol_size, original_len = struct.unpack(">QIHQ", buf[4:26])
        if k < 2 or symbol_size < 1:
            raise FrameError("malformed-frame", f"k={k}, symbol_size={symbol_size}")
        return SessionHeader(session_id, k, symbol_size, original_len)
    raise FrameError("bad-frame-type", str(ftype))


def _check_crc(buf: bytes) -> None:
    (expect,) = struct.unpack(">I", buf[-4:])
    if zlib.crc32(buf[:-4]) != expect:
        raise FrameError("crc-mismatch")


# -- file transfer over the framed link -------------------------------------


@dataclass
class TransferReport:
    scheme: str
    k: int
    symbol_size: int
    eps: float
    original_len: int
    frames_sent: int          # data frames, incl. the header handshake
    frames_delivered: int
    header_attempts: int
    feedback_frames: int
    per_phase_sent: dict[str, int]
    complete: bool
    trace: list[TracePoint] = field(default_factory=list)

    @property
    def overhead(self) -> float:
        return self.frames_sent / self.k


def _split_blocks(data: bytes, symbol_size: int) -> tuple[SourceBlock, int]:
    if not data:
        raise ValueError("input must be non-empty")
    if symbol_size < 1:
        raise ValueError("symbol_size must be >= 1")
    k = math.ceil(len(data) / symbol_size)
    if k < 2:
        # The decoding graph needs at least two nodes; shrink the symbol so
        # the input spans two of them.
        symbol_size = math.ceil(len(data) / 2)
        k = 2
    padded = data.ljust(k * symbol_size, b"\x00")
    blocks = tuple(padded[i * symbol_size:(i + 1) * symbol_size] for i in range(k))
    return SourceBlock(k, blocks), symbol_size


def transfer(
    data: bytes,
    config: SchemeConfig,
    eps: float,
    seed: int = 0,
    symbol_size: int = 1024,
    policy: FeedbackPolicy = EveryDegreeChange(),
    trial_id: int = 0,
    budget: int | None = None,
) -> tuple[bytes, TransferReport]:
    """Move ``data`` through the framed erasure link; returns (output, report).

    Raises :class:`TransferFailed` (with partial stats) when the budget runs
    out before full recovery.
    """
    source, symbol_size = _split_blocks(data, symbol_size)
    k = source.k
    if budget is None:
        budget = DEFAULT_BUDGET_FACTOR * k
    session_id = seed & 0xFFFFFFFFFFFFFFFF
    enc = Encoder(config, source, seed=seed, trial_id=trial_id, payload_mode="full")
    rcv = Receiver(k, config, policy, track_values=True)
    chan = ErasureChannel(eps, seed=seed, trial_id=trial_id)

    to_receiver: deque[bytes] = deque()
    to_sender: deque[bytes] = deque()
    trace: list[TracePoint] = []

    # Handshake: the header rides the lossless control path but still counts
    # as one transmitted frame.
    header = SessionHeader(session_id, k, symbol_size, len(data))
    to_receiver.append(encode_header(header))
    got = decode_frame(to_receiver.popleft())
    assert isinstance(got, SessionHeader)
    header_attempts = 1

    frames_sent = header_attempts
    delivered = 0
    fb_frames = 0
    slot = 0
    done = False
    while not done and frames_sent < budget:
        frame = encode_data(enc.next_symbol(), session_id, slot)
        frames_sent += 1
        if chan.deliver(slot):
            to_receiver.append(frame)
        slot += 1
        while to_receiver:
            parsed = decode_frame(to_receiver.popleft())
            assert isinstance(parsed, DataFrame)
            delivered += 1
            sym = CodedSymbol(parsed.indices, bytes(parsed.payload))
            before = rcv.recovered
            msg = rcv.receive(sym, seq=parsed.seq_no)
            if rcv.recovered > before:
                trace.append(TracePoint(frames_sent, delivered, rcv.recovered))
            if msg is not None:
                fb_frames += 1
                trace.append(TracePoint(frames_sent, delivered, rcv.recovered, event=msg.kind.name.lower()))
                to_sender.append(encode_feedback(msg, session_id))
        while to_sender:
            fb = decode_frame(to_sender.popleft())
            assert isinstance(fb, FeedbackFrame)
            enc.on_feedback(FeedbackMsg(fb.kind, fb.recovered))
            if fb.kind is FeedbackKind.COMPLETE:
                done = True

    report = TransferReport(
        scheme=scheme_name(config),
        k=k,
        symbol_size=symbol_size,
        eps=eps,
        original_len=len(data),
        frames_sent=frames_sent,
        frames_delivered=delivered,
        header_attempts=header_attempts,
        feedback_frames=fb_frames,
        per_phase_sent=dict(enc.phase_sent),
        complete=rcv.complete,
        trace=trace,
    )
    if not rcv.complete:
        raise TransferFailed(report)
    payloads = rcv.recovered_payloads()
    out = b"".join(payloads)[: len(data)]  # type: ignore[arg-type]
    return out, report


def transfer_file(
    path_in: str,
    config: SchemeConfig,
    eps: float,
    seed: int = 0,
    symbol_size: int = 1024,
    path_out: str | None = None,
    policy: FeedbackPolicy = EveryDegreeChange(),
) -> TransferReport:
    """Transfer a file through the lossy link, optionally writing the output."""
    with open(path_in, "rb") as fh:
        data = fh.read()
    out, report = transfer(data, config, eps, seed=seed, symbol_size=symbol_size, policy=policy)
    if out != data:
        raise AssertionError("reconstructed bytes differ from the input")
    if path_out is not None:
        with open(path_out, "wb") as fh:
            fh.write(out)
    return report
