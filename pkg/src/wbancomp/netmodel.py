"""Deterministic model of the star network: latency, energy states, sleep.

One event loop advances simulated time over per-device sample events and
packet arrivals at the sink. Each sample runs the threshold filter, encodes
the residual when transmitted, and charges the device's energy ledger so the
per-state residency times partition the run duration exactly. Currents are
whole-device currents per state (tx, idle, sleep, cpu), so consumed charge is
current times time summed over states.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field, replace

from .bitstream import BitReader, BitString
from .codec import encode_residual
from .control import DeviceState
from .signals import TraceSpec, trace_samples
from .sink import Packet, Sink

MODES = ("CGWC", "CGLL", "CGLS")  # no compression / lossless / lossy

LEDGER_STATES = ("tx", "rx", "idle", "sleep", "cpu")

MS_PER_HOUR = 3_600_000.0


@dataclass(frozen=True)
class ChannelModel:
    """Per-packet transit delay: base latency plus an optional per-bit term."""

    base_latency_ms: float = 49.0
    per_bit_delay_ms: float = 0.0

    def __post_init__(self):
        if self.base_latency_ms < 0 or self.per_bit_delay_ms < 0:
            raise ValueError("channel delays must be non-negative")

    def transit_ms(self, bit_count: int) -> float:
        return self.base_latency_ms + self.per_bit_delay_ms * bit_count


@dataclass(frozen=True)
class RadioEnergyModel:
    """Whole-device current per radio/CPU state, plus the battery size."""

    tx_ma: float = 24.0
    rx_ma: float = 24.0
    idle_ma: float = 8.0
    sleep_ma: float = 0.2
    cpu_active_ma: float = 10.0
    wake_latency_ms: float = 0.0
    battery_mah: float = 400.0

    def __post_init__(self):
        currents = (self.tx_ma, self.rx_ma, self.idle_ma, self.sleep_ma,
                    self.cpu_active_ma)
        if any(c < 0 for c in currents):
            raise ValueError("currents must be non-negative")
        if not self.sleep_ma < self.idle_ma < self.tx_ma:
            raise ValueError("expected sleep_ma < idle_ma < tx_ma")
        if self.wake_latency_ms < 0:
            raise ValueError("wake_latency_ms must be non-negative")
        if self.battery_mah <= 0:
            raise ValueError("battery_mah must be positive")

    def current_ma(self, state: str) -> float:
        try:
            return {
                "tx": self.tx_ma,
                "rx": self.rx_ma,
                "idle": self.idle_ma,
                "sleep": self.sleep_ma,
                "cpu": self.cpu_active_ma,
            }[state]
        except KeyError:
            raise ValueError(f"unknown energy state {state!r}") from None


@dataclass(frozen=True)
class SleepPolicy:
    """Radio sleeps once a device suppresses this many samples in a row."""

    enabled: bool = False
    suppressions_before_sleep: int = 2

    def __post_init__(self):
        if self.suppressions_before_sleep < 1:
            raise ValueError("suppressions_before_sleep must be at least 1")


class EnergyLedger:
    """Accumulated time and charge per energy state for one device."""

    def __init__(self, model: RadioEnergyModel):
        self.model = model
        self.time_ms = {state: 0.0 for state in LEDGER_STATES}
        self.charge_mah = {state: 0.0 for state in LEDGER_STATES}

    def charge(self, state: str, duration_ms: float) -> None:
        """Add current(state) x duration to the ledger."""
        if duration_ms < 0:
            raise ValueError("duration must be non-negative")
        current = self.model.current_ma(state)
        self.time_ms[state] += duration_ms
        self.charge_mah[state] += current * (duration_ms / MS_PER_HOUR)

    def total_mah(self) -> float:
        return sum(self.charge_mah.values())

    def total_time_ms(self) -> float:
        return sum(self.time_ms.values())

    def average_ma(self) -> float:
        elapsed = self.total_time_ms()
        if elapsed <= 0:
            raise ValueError("ledger holds no elapsed time")
        return self.total_mah() / (elapsed / MS_PER_HOUR)


def lifetime(battery_mah: float, average_current_ma: float) -> float:
    """Battery life in hours at a steady average current draw."""
    if average_current_ma <= 0:
        raise ValueError("average current must be positive")
    return battery_mah / average_current_ma


@dataclass(frozen=True)
class DeviceConfig:
    """One wearable device in a scenario."""

    name: str
    device_id: int
    mode: str
    trace: TraceSpec
    threshold: int = 0
    cd_ms: float = 1.0
    dd_ms: float = 1.0
    suppress_zero: bool = True
    energy: RadioEnergyModel | None = None  # overrides the scenario model

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.threshold < 0:
            raise ValueError("threshold must be non-negative")
        if self.cd_ms < 0 or self.dd_ms < 0:
            raise ValueError("cd_ms and dd_ms must be non-negative")


@dataclass(frozen=True)
class Scenario:
    """Full simulation input: devices, channel, energy model, sleep policy."""

    duration_s: float
    devices: tuple[DeviceConfig, ...]
    channel: ChannelModel = ChannelModel()
    energy: RadioEnergyModel = RadioEnergyModel()
    sleep: SleepPolicy = SleepPolicy()
    seed: int = 0

    def validate(self) -> None:
        if self.duration_s <= 0:
            raise ValueError("duration_s must be positive")
        if not self.devices:
            raise ValueError("scenario needs at least one device")
        ids = [d.device_id for d in self.devices]
        if len(set(ids)) != len(ids):
            raise ValueError(f"device ids are not unique: {ids}")
        for dev in self.devices:
            spec = dev.trace
            if spec.duration_s is not None and spec.duration_s != self.duration_s:
                raise ValueError(
                    f"device {dev.name}: trace duration differs from scenario"
                )
            try:
                count = replace(spec, duration_s=self.duration_s).sample_count()
            except ValueError as exc:
                raise ValueError(f"device {dev.name}: {exc}") from None
            if count < 1:
                raise ValueError(f"device {dev.name}: no samples in duration")
            if dev.mode == "CGLL" and dev.threshold != 0:
                raise ValueError(f"device {dev.name}: CGLL requires threshold 0")
            if dev.mode == "CGLS" and dev.threshold < 1:
                raise ValueError(f"device {dev.name}: CGLS requires threshold >= 1")
            if dev.mode != "CGWC" and spec.adc_bits > 11:
                raise ValueError(
                    f"device {dev.name}: codec covers at most 11-bit readings"
                )
            model = dev.energy or self.energy
            worst_bits = spec.adc_bits if dev.mode == "CGWC" else 20
            busy = dev.cd_ms + model.wake_latency_ms + self.channel.transit_ms(worst_bits)
            if busy > spec.sample_period_ms:
                raise ValueError(
                    f"device {dev.name}: per-sample busy time {busy}ms exceeds "
                    f"the {spec.sample_period_ms}ms sample period"
                )


@dataclass
class SampleEvent:
    """One processed sample; the RunLog holds one of these per sample."""

    device_id: int
    seq: int
    time_ms: float
    value: int
    transmitted: bool
    residual: int | None
    codeword_bits: int
    cd_ms: float
    dtr_ms: float
    dd_ms: float
    arrival_ms: float | None
    reconstructed: int


@dataclass
class DeviceRun:
    """Per-device outcome summary plus its energy ledger breakdown."""

    name: str
    device_id: int
    mode: str
    threshold: int
    sample_period_ms: int
    signal: str
    battery_mah: float
    samples: int = 0
    transmitted: int = 0
    payload_bits: int = 0
    state_time_ms: dict = field(default_factory=dict)
    state_charge_mah: dict = field(default_factory=dict)

    @property
    def suppressed(self) -> int:
        return self.samples - self.transmitted

    def total_mah(self) -> float:
        return sum(self.state_charge_mah.values())


@dataclass
class RunLog:
    """Everything a simulation run produced, in deterministic order."""

    duration_ms: float
    seed: int
    events: list[SampleEvent]
    devices: list[DeviceRun]
    packets: list[tuple[int, int, Packet]]  # (device_id, seq, packet)

    def device(self, device_id: int) -> DeviceRun:
        for dev in self.devices:
            if dev.device_id == device_id:
                return dev
        raise KeyError(f"no device {device_id} in run")

    def summary_dict(self) -> dict:
        return {
            "duration_ms": self.duration_ms,
            "seed": self.seed,
            "devices": [
                {
                    "name": dev.name,
                    "device_id": dev.device_id,
                    "mode": dev.mode,
                    "threshold": dev.threshold,
                    "sample_period_ms": dev.sample_period_ms,
                    "signal": dev.signal,
                    "battery_mah": dev.battery_mah,
                    "samples": dev.samples,
                    "transmitted": dev.transmitted,
                    "payload_bits": dev.payload_bits,
                    "state_time_ms": dict(dev.state_time_ms),
                    "state_charge_mah": dict(dev.state_charge_mah),
                }
                for dev in self.devices
            ],
        }

    EVENT_FIELDS = (
        "device_id", "seq", "time_ms", "value", "transmitted", "residual",
        "codeword_bits", "cd_ms", "dtr_ms", "dd_ms", "arrival_ms",
        "reconstructed",
    )

    def events_rows(self) -> list[list]:
        rows = []
        for ev in self.events:
            rows.append([
                ev.device_id, ev.seq, ev.time_ms, ev.value,
                int(ev.transmitted),
                "" if ev.residual is None else ev.residual,
                ev.codeword_bits, ev.cd_ms, ev.dtr_ms, ev.dd_ms,
                "" if ev.arrival_ms is None else ev.arrival_ms,
                ev.reconstructed,
            ])
        return rows

    def to_json(self) -> str:
        return json.dumps(self.summary_dict(), indent=2, sort_keys=True)


class _DeviceRuntime:
    def __init__(self, cfg: DeviceConfig, scenario: Scenario):
        self.cfg = cfg
        spec = replace(cfg.trace, duration_s=scenario.duration_s)
        self.samples = trace_samples(spec)
        self.adc_bits = spec.adc_bits
        self.period_ms = spec.sample_period_ms
        self.model = cfg.energy or scenario.energy
        self.ledger = EnergyLedger(self.model)
        self.filter = None
        if cfg.mode != "CGWC":
            self.filter = DeviceState(
                device_id=cfg.device_id,
                threshold=cfg.threshold,
                suppress_zero=cfg.suppress_zero,
                adc_bits=self.adc_bits,
            )
        kind = (cfg.trace.source.kind
                if hasattr(cfg.trace.source, "kind") else "file")
        self.run = DeviceRun(
            name=cfg.name,
            device_id=cfg.device_id,
            mode=cfg.mode,
            threshold=cfg.threshold,
            sample_period_ms=self.period_ms,
            signal=kind,
            battery_mah=self.model.battery_mah,
        )

    def sleeping(self, sleep: SleepPolicy) -> bool:
        if not sleep.enabled or self.filter is None:
            return False
        return self.filter.consecutive_suppressed >= sleep.suppressions_before_sleep


_SAMPLE, _ARRIVAL = 0, 1


def simulate(scenario: Scenario) -> RunLog:
    """Run the scenario to completion and return its RunLog.

    Deterministic: the same scenario (seeds included) produces an identical
    log, event for event.
    """
    scenario.validate()
    sink = Sink()
    runtimes = [_DeviceRuntime(cfg, scenario) for cfg in scenario.devices]
    for rt in runtimes:
        if rt.cfg.mode != "CGWC":
            sink.register_device(rt.cfg.device_id)

    events: list[SampleEvent] = []
    packets: list[tuple[int, int, Packet]] = []
    heap: list[tuple] = []
    push_order = 0

    def push(time_ms: float, kind: int, payload) -> None:
        nonlocal push_order
        heapq.heappush(heap, (time_ms, push_order, kind, payload))
        push_order += 1

    for idx, rt in enumerate(runtimes):
        push(float(rt.samples[0].timestamp_ms), _SAMPLE, (idx, 0))

    while heap:
        _, _, kind, payload = heapq.heappop(heap)
        if kind == _SAMPLE:
            idx, seq = payload
            rt = runtimes[idx]
            cfg = rt.cfg
            sample = rt.samples[seq]
            t_ms = float(sample.timestamp_ms)
            was_sleeping = rt.sleeping(scenario.sleep)

            if cfg.mode == "CGWC":
                residual = None
                transmitted = True
                word = BitString(sample.value, rt.adc_bits)
                cd_ms = 0.0
                reconstructed = sample.value
            else:
                residual = rt.filter.process_sample(sample.value)
                transmitted = residual is not None
                word = encode_residual(residual) if transmitted else None
                cd_ms = cfg.cd_ms
                reconstructed = rt.filter.last_reading

            wake_ms = 0.0
            dtr_ms = 0.0
            event = SampleEvent(
                device_id=cfg.device_id, seq=seq, time_ms=t_ms,
                value=sample.value, transmitted=transmitted,
                residual=residual, codeword_bits=len(word) if word else 0,
                cd_ms=cd_ms, dtr_ms=0.0, dd_ms=0.0, arrival_ms=None,
                reconstructed=reconstructed,
            )
            if transmitted:
                if was_sleeping:
                    wake_ms = rt.model.wake_latency_ms
                dtr_ms = scenario.channel.transit_ms(len(word))
                event.dtr_ms = dtr_ms
                packet = Packet.from_bits(cfg.device_id, word)
                packets.append((cfg.device_id, seq, packet))
                rt.run.payload_bits += len(word)
                rt.run.transmitted += 1
                arrival = t_ms + cd_ms + wake_ms + dtr_ms
                push(arrival, _ARRIVAL, (idx, event, packet, arrival))
            rt.run.samples += 1
            events.append(event)

            # Energy: the sample period splits into cpu, wake, tx, and rest.
            asleep_after = rt.sleeping(scenario.sleep)
            rest_ms = rt.period_ms - cd_ms - wake_ms - dtr_ms
            rt.ledger.charge("cpu", cd_ms)
            if wake_ms:
                rt.ledger.charge("idle", wake_ms)
            if dtr_ms:
                rt.ledger.charge("tx", dtr_ms)
            rt.ledger.charge("sleep" if asleep_after else "idle", rest_ms)

            if seq + 1 < len(rt.samples):
                push(float(rt.samples[seq + 1].timestamp_ms), _SAMPLE,
                     (idx, seq + 1))
        else:
            idx, event, packet, sent_at = payload
            rt = runtimes[idx]
            if rt.cfg.mode == "CGWC":
                # Raw payload: no decompression happens at the sink.
                value = BitReader(packet.payload, packet.bit_count).read_uint(
                    rt.adc_bits)
                dd_ms = 0.0
            else:
                value = sink.on_packet(packet)
                dd_ms = rt.cfg.dd_ms
            if value != event.reconstructed:
                raise RuntimeError(
                    f"sink reconstruction {value} diverged from device-side "
                    f"{event.reconstructed} (device {event.device_id})"
                )
            event.dd_ms = dd_ms
            event.arrival_ms = sent_at + dd_ms

    for rt in runtimes:
        if rt.cfg.mode != "CGWC":
            held = sink.held_value(rt.cfg.device_id)
            if held != rt.filter.last_reading:
                raise RuntimeError(
                    f"device {rt.cfg.device_id}: sink reference {held} != "
                    f"device memory {rt.filter.last_reading}"
                )
        rt.run.state_time_ms = dict(rt.ledger.time_ms)
        rt.run.state_charge_mah = dict(rt.ledger.charge_mah)

    return RunLog(
        duration_ms=scenario.duration_s * 1000.0,
        seed=scenario.seed,
        events=events,
        devices=[rt.run for rt in runtimes],
        packets=packets,
    )
