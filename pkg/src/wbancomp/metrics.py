"""Evaluation metrics over a RunLog: delays, energy, compression ratio.

Definitions:

    PCR   packet compression ratio, (1 - comp_pkt / orig_pkt) x 100
    CD    compression delay, averaged per transmitted sample
    DD    decompression delay, averaged per delivered packet
    DTR   channel transit delay per packet
    AD    mean of CD + DD + DTR over every transmission of every device
    DEC   device energy consumption, current x time summed over states

Report numbers are serialized at 4 decimal places; the human-readable table
rounds to 2 decimals, half-up.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

from .netmodel import MS_PER_HOUR, RunLog

CSV_COLUMNS = (
    "device_id", "mode", "orig_pkt", "comp_pkt", "pcr_pct",
    "cd_ms", "dd_ms", "ad_ms", "dec_mah", "lifetime_h",
)


def compression_ratio(orig_pkt: int, comp_pkt: int) -> float:
    """Percentage of packets saved relative to an uncompressed stream."""
    if orig_pkt <= 0:
        raise ValueError("orig_pkt must be positive")
    if comp_pkt < 0 or comp_pkt > orig_pkt:
        raise ValueError(f"comp_pkt {comp_pkt} outside [0, {orig_pkt}]")
    return (1.0 - comp_pkt / orig_pkt) * 100.0


def average_delay(runlog: RunLog) -> float:
    """Mean CD + DD + DTR over all transmissions of all devices, in ms."""
    total = 0.0
    count = 0
    for ev in runlog.events:
        if ev.transmitted:
            total += ev.cd_ms + ev.dd_ms + ev.dtr_ms
            count += 1
    if count == 0:
        raise ValueError("run log holds no transmissions")
    return total / count


def display_round(value: float, places: int = 2) -> float:
    """Round half-up for table display, the way the result tables print."""
    quantum = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(quantum, rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class DeviceMetrics:
    device_id: int
    mode: str
    orig_pkt: int
    comp_pkt: int
    pcr_pct: float
    cd_ms: float
    dd_ms: float
    ad_ms: float
    dec_mah: float
    lifetime_h: float


@dataclass(frozen=True)
class RunMetrics:
    device_count: int
    transmissions: int
    ad_ms: float
    duration_s: float


def compute(runlog: RunLog) -> tuple[list[DeviceMetrics], RunMetrics]:
    """Per-device metrics plus the run-level summary."""
    if not runlog.devices:
        raise ValueError("run log holds no devices")
    per_device: dict[int, list] = {dev.device_id: [] for dev in runlog.devices}
    for ev in runlog.events:
        if ev.transmitted:
            per_device[ev.device_id].append(ev)

    duration_h = runlog.duration_ms / MS_PER_HOUR
    out = []
    for dev in runlog.devices:
        sent = per_device[dev.device_id]
        if not sent:
            raise ValueError(f"device {dev.device_id} transmitted nothing")
        cd = sum(ev.cd_ms for ev in sent) / len(sent)
        dd = sum(ev.dd_ms for ev in sent) / len(sent)
        ad = sum(ev.cd_ms + ev.dd_ms + ev.dtr_ms for ev in sent) / len(sent)
        dec = dev.total_mah()
        avg_ma = dec / duration_h
        out.append(DeviceMetrics(
            device_id=dev.device_id,
            mode=dev.mode,
            orig_pkt=dev.samples,
            comp_pkt=dev.transmitted,
            pcr_pct=compression_ratio(dev.samples, dev.transmitted),
            cd_ms=cd,
            dd_ms=dd,
            ad_ms=ad,
            dec_mah=dec,
            lifetime_h=dev.battery_mah / avg_ma,
        ))
    run = RunMetrics(
        device_count=len(runlog.devices),
        transmissions=sum(m.comp_pkt for m in out),
        ad_ms=average_delay(runlog),
        duration_s=runlog.duration_ms / 1000.0,
    )
    return out, run


def to_csv(devices: list[DeviceMetrics]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for m in devices:
        writer.writerow([
            m.device_id, m.mode, m.orig_pkt, m.comp_pkt,
            f"{m.pcr_pct:.4f}", f"{m.cd_ms:.4f}", f"{m.dd_ms:.4f}",
            f"{m.ad_ms:.4f}", f"{m.dec_mah:.4f}", f"{m.lifetime_h:.4f}",
        ])
    return buf.getvalue()


def from_csv(text: str) -> list[DeviceMetrics]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ValueError("not a metrics CSV document")
    out = []
    for row in rows[1:]:
        out.append(DeviceMetrics(
            device_id=int(row[0]), mode=row[1],
            orig_pkt=int(row[2]), comp_pkt=int(row[3]),
            pcr_pct=float(row[4]), cd_ms=float(row[5]), dd_ms=float(row[6]),
            ad_ms=float(row[7]), dec_mah=float(row[8]),
            lifetime_h=float(row[9]),
        ))
    return out


def to_json(devices: list[DeviceMetrics], run: RunMetrics) -> str:
    doc = {
        "run": {
            "device_count": run.device_count,
            "transmissions": run.transmissions,
            "ad_ms": round(run.ad_ms, 4),
            "duration_s": run.duration_s,
        },
        "devices": [
            {
                "device_id": m.device_id,
                "mode": m.mode,
                "orig_pkt": m.orig_pkt,
                "comp_pkt": m.comp_pkt,
                "pcr_pct": round(m.pcr_pct, 4),
                "cd_ms": round(m.cd_ms, 4),
                "dd_ms": round(m.dd_ms, 4),
                "ad_ms": round(m.ad_ms, 4),
                "dec_mah": round(m.dec_mah, 4),
                "lifetime_h": round(m.lifetime_h, 4),
            }
            for m in devices
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def report(runlog: RunLog, fmt: str = "csv") -> str:
    """Render the full metrics document for a run."""
    devices, run = compute(runlog)
    if fmt == "csv":
        return to_csv(devices)
    if fmt == "json":
        return to_json(devices, run)
    raise ValueError(f"unknown report format {fmt!r}")


def format_table(devices: list[DeviceMetrics], run: RunMetrics) -> str:
    """Human-readable summary, 2-decimal half-up rounding."""
    lines = [
        f"{'device':>6} {'mode':>5} {'orig':>6} {'sent':>6} {'pcr%':>7} "
        f"{'cd_ms':>6} {'dd_ms':>6} {'ad_ms':>7} {'dec_mah':>8} {'life_h':>7}"
    ]
    for m in devices:
        lines.append(
            f"{m.device_id:>6} {m.mode:>5} {m.orig_pkt:>6} {m.comp_pkt:>6} "
            f"{display_round(m.pcr_pct):>7.2f} {display_round(m.cd_ms):>6.2f} "
            f"{display_round(m.dd_ms):>6.2f} {display_round(m.ad_ms):>7.2f} "
            f"{display_round(m.dec_mah):>8.2f} {display_round(m.lifetime_h):>7.2f}"
        )
    lines.append(
        f"run: {run.device_count} devices, {run.transmissions} transmissions, "
        f"AD {display_round(run.ad_ms):.2f} ms over {run.duration_s:g} s"
    )
    return "\n".join(lines)
