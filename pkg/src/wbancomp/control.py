"""Device-side threshold filter: raw readings in, transmit/suppress decisions out.

The filter keeps the last transmitted reading per device. A new reading is
transmitted only when it differs from that memory by strictly more than the
threshold (always, in lossless mode), so the receiver's held value never
drifts from the truth by more than the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class DeviceState:
    """Per-device filter memory.

    threshold 0 is lossless mode: every change is transmitted, and with
    suppress_zero (the default) unchanged readings send nothing at all,
    which the sink reconstructs exactly by holding its last value.
    """

    device_id: int
    threshold: int
    suppress_zero: bool = True
    adc_bits: int = 10
    first_reading: bool = field(default=True, init=False)
    last_reading: int = field(default=0, init=False)
    consecutive_suppressed: int = field(default=0, init=False)

    def __post_init__(self):
        if not 0 <= self.device_id <= 255:
            raise ValueError(f"device_id {self.device_id} outside [0, 255]")
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")
        if not 1 <= self.adc_bits <= 16:
            raise ValueError("adc_bits must be in [1, 16]")

    def process_sample(self, value: int) -> int | None:
        """Return the residual to transmit, or None when the sample is suppressed.

        The first reading is transmitted as an absolute value. Afterwards a
        reading transmits its delta from the last transmitted reading when the
        variation strictly exceeds the threshold (or always at threshold 0,
        zero deltas excepted under suppress_zero). Suppression leaves
        last_reading untouched.
        """
        if not 0 <= value < (1 << self.adc_bits):
            raise ValueError(f"reading {value} outside {self.adc_bits}-bit range")
        if self.first_reading:
            self.first_reading = False
            self.last_reading = value
            self.consecutive_suppressed = 0
            return value
        variation = abs(self.last_reading - value)
        if (self.threshold > 0 and variation > self.threshold) or self.threshold == 0:
            residual = value - self.last_reading
            if residual == 0 and self.suppress_zero:
                self.consecutive_suppressed += 1
                return None
            self.last_reading = value
            self.consecutive_suppressed = 0
            return residual
        self.consecutive_suppressed += 1
        return None

    def reset(self) -> None:
        """Forget all history; the next sample is treated as the first."""
        self.first_reading = True
        self.last_reading = 0
        self.consecutive_suppressed = 0
