from pathlib import Path

from wbancomp.codec import encode_residual
from wbancomp.control import DeviceState
from wbancomp.sink import Packet, Sink

REPO_ROOT = Path(__file__).resolve().parents[1]
SCENARIO_DIR = REPO_ROOT / "scenarios"
DATA_DIR = Path(__file__).resolve().parent / "data"


def run_pipeline(codes, threshold, suppress_zero=True, device_id=1, adc_bits=10):
    """Filter, encode, packetize, and reconstruct one stream end to end.

    Returns (per-sample reconstruction at the sink, delivered packets).
    """
    state = DeviceState(device_id=device_id, threshold=threshold,
                        suppress_zero=suppress_zero, adc_bits=adc_bits)
    sink = Sink()
    sink.register_device(device_id)
    reconstructed = []
    packets = []
    for code in codes:
        residual = state.process_sample(code)
        if residual is not None:
            packet = Packet.from_bits(device_id, encode_residual(residual))
            packets.append(packet)
            sink.on_packet(packet)
        reconstructed.append(sink.held_value(device_id))
    return reconstructed, packets
