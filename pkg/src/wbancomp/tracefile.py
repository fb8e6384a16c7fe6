"""Hex-encoded packet trace files.

Line format, after `#`-prefixed metadata headers:

    <sample_index>,<device_id>,<bit_count>,<payload_hex>

The metadata carries the per-device sample count so a decoder can rebuild
the full sample cadence, holding the last value across suppressed samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .sink import Packet

MAGIC = "#packet-trace v1"


@dataclass
class PacketTrace:
    """Packets plus the metadata needed to replay them at sample cadence."""

    samples: int
    threshold: int = 0
    adc_bits: int = 10
    sample_period_ms: int = 0
    packets: list[tuple[int, Packet]] = field(default_factory=list)  # (seq, pkt)


def write_trace(path: str | Path, trace: PacketTrace) -> None:
    lines = [
        MAGIC,
        f"#samples={trace.samples}",
        f"#threshold={trace.threshold}",
        f"#adc_bits={trace.adc_bits}",
        f"#sample_period_ms={trace.sample_period_ms}",
    ]
    for seq, packet in trace.packets:
        lines.append(
            f"{seq},{packet.device_id},{packet.bit_count},{packet.payload.hex()}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_trace(path: str | Path) -> PacketTrace:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"trace file {path} does not exist")
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise ValueError(f"{path}: not a packet trace file")
    meta = {}
    body_start = 1
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.startswith("#"):
            body_start = lineno - 1
            break
        key, _, value = line[1:].partition("=")
        meta[key.strip()] = value.strip()
        body_start = lineno
    try:
        trace = PacketTrace(
            samples=int(meta["samples"]),
            threshold=int(meta.get("threshold", 0)),
            adc_bits=int(meta.get("adc_bits", 10)),
            sample_period_ms=int(meta.get("sample_period_ms", 0)),
        )
    except (KeyError, ValueError) as exc:
        raise ValueError(f"{path}: bad trace metadata ({exc})") from None

    for index, line in enumerate(lines[body_start:], start=0):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ValueError(f"{path}: packet {index}: expected 4 fields")
        try:
            seq = int(parts[0])
            device_id = int(parts[1])
            bit_count = int(parts[2])
            payload = bytes.fromhex(parts[3])
            packet = Packet(device_id, bit_count, payload)
        except ValueError as exc:
            raise ValueError(f"{path}: packet {index}: {exc}") from None
        if not 0 <= seq < trace.samples:
            raise ValueError(
                f"{path}: packet {index}: sample index {seq} outside "
                f"[0, {trace.samples})"
            )
        trace.packets.append((seq, packet))
    return trace
