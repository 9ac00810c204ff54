"""
================================================================================
DEMO 5: MOVING REAL BYTES THROUGH THE FRAMED LOSSY LINK
================================================================================

Everything above ran on abstract symbols.  This demo serializes coded
symbols into CRC-protected frames, pushes them through the erasure channel,
and reassembles a file on the other side:

  data frame:  magic | version | type | session | seq | degree | indices
               | payload_len | payload | crc32
  feedback:    magic | version | type | session | kind | recovered | crc32

Sequence numbers let the systematic receiver notice the end of the index
pass even when the tail frames were erased.  Feedback rides a lossless
control path, matching the channel model of the analysis.
================================================================================
"""

import hashlib
import random
import time

from fountain_lab import SOFC, CodedSymbol, decode_frame, encode_data, transfer

payload = random.Random(3).randbytes(256 * 1024)    # a 256 KiB "file"
print(f"input: {len(payload)} bytes, sha256 {hashlib.sha256(payload).hexdigest()[:16]}...")

print("\n--- one frame, byte by byte ---")
frame = encode_data(CodedSymbol((7,), payload[7 * 1024:7 * 1024 + 16]), session_id=42, seq_no=7)
print(f"  {frame.hex()}")
parsed = decode_frame(frame)
print(f"  parses back to seq={parsed.seq_no}, indices={parsed.indices}, "
      f"{len(parsed.payload)} payload bytes")

for eps in (0.0, 0.1):
    start = time.time()
    out, report = transfer(payload, SOFC(), eps, seed=99, symbol_size=1024)
    ok = hashlib.sha256(out).hexdigest() == hashlib.sha256(payload).hexdigest()
    print(f"\n--- transfer at erasure rate {eps} ({time.time() - start:.1f}s) ---")
    print(f"  blocks:            k = {report.k} x {report.symbol_size} bytes")
    print(f"  frames sent:       {report.frames_sent} (incl. 1 header)")
    print(f"  frames delivered:  {report.frames_delivered}")
    print(f"  overhead:          {report.overhead:.4f}")
    print(f"  feedback frames:   {report.feedback_frames}")
    print(f"  sent per phase:    {report.per_phase_sent}")
    print(f"  bit-exact output:  {ok}")

print("""
At eps=0 the transfer costs exactly one frame per block plus the header.
At eps=0.1 the overhead lands near the predicted 1.18, and the feedback
column shows the whole control cost: a few dozen tiny frames.
""")
