"""Sink-side decompression: decode packets and rebuild absolute readings.

The sink keeps a reference list mapping each registered device to its last
reconstructed reading (0 before any packet, so the first packet must carry an
absolute value). Each decoded residual is added onto that reference.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bitstream import BitReader, BitString
from .codec import decode_residual

_HEADER_LEN = 3  # 1-byte device id + 2-byte big-endian bit count


class UnknownDeviceError(Exception):
    """Packet from a device that was never registered."""


class DuplicateDeviceError(Exception):
    """A device id was registered twice."""


@dataclass(frozen=True)
class Packet:
    """Wire unit between device and sink.

    Layout: 1-byte device id, 2-byte big-endian bit count, then the payload
    bytes holding exactly bit_count valid bits MSB-first, zero-padded to a
    byte boundary.
    """

    device_id: int
    bit_count: int
    payload: bytes

    def __post_init__(self):
        if not 0 <= self.device_id <= 255:
            raise ValueError(f"device_id {self.device_id} outside [0, 255]")
        if not 0 <= self.bit_count <= 0xFFFF:
            raise ValueError(f"bit_count {self.bit_count} outside [0, 65535]")
        if len(self.payload) != (self.bit_count + 7) // 8:
            raise ValueError(
                f"payload of {len(self.payload)} bytes cannot hold exactly "
                f"{self.bit_count} bits"
            )

    @classmethod
    def from_bits(cls, device_id: int, bits: BitString) -> "Packet":
        return cls(device_id, len(bits), bits.to_bytes())

    def bits(self) -> BitString:
        return BitString.from_bytes(self.payload, self.bit_count)

    def pack(self) -> bytes:
        return (
            bytes([self.device_id])
            + self.bit_count.to_bytes(2, "big")
            + self.payload
        )

    @classmethod
    def unpack(cls, blob: bytes) -> "Packet":
        if len(blob) < _HEADER_LEN:
            raise ValueError(f"packet of {len(blob)} bytes is shorter than its header")
        bit_count = int.from_bytes(blob[1:3], "big")
        return cls(blob[0], bit_count, bytes(blob[_HEADER_LEN:]))


class Sink:
    """Reference-list holder that turns residual packets back into readings."""

    def __init__(self):
        self._reference: dict[int, int] = {}

    @property
    def device_ids(self) -> tuple[int, ...]:
        return tuple(self._reference)

    def register_device(self, device_id: int) -> None:
        """Add a device to the reference list with initial reading 0."""
        if device_id in self._reference:
            raise DuplicateDeviceError(f"device {device_id} already registered")
        self._reference[device_id] = 0

    def on_packet(self, packet: Packet) -> int:
        """Decode a packet's residuals and return the updated absolute reading.

        The payload must decode into a whole number of codewords consuming
        exactly bit_count bits. Decode failures propagate as CodecError and
        leave the reference list untouched.
        """
        if packet.device_id not in self._reference:
            raise UnknownDeviceError(f"device {packet.device_id} not registered")
        reader = BitReader(packet.payload, packet.bit_count)
        residuals = []
        while reader.remaining:
            residuals.append(decode_residual(reader))
        if not residuals:
            raise ValueError("packet carries no codewords")
        value = self._reference[packet.device_id]
        for residual in residuals:
            value += residual
        self._reference[packet.device_id] = value
        return value

    def held_value(self, device_id: int) -> int:
        """Current reconstruction for a device; what suppressed samples hold at."""
        if device_id not in self._reference:
            raise UnknownDeviceError(f"device {device_id} not registered")
        return self._reference[device_id]
