"""Threshold-delta compression of body-sensor streams with a prefix-free
residual codec, plus a deterministic sensor-to-sink pipeline simulator with
latency and energy accounting."""

from .bitstream import BitReader, BitString, BitUnderflowError, BitWriter
from .codec import (CodecError, IncompleteCodewordError, MalformedPrefixError,
                    decode_residual, encode_prefix, encode_residual,
                    encode_suffix, group_of)
from .control import DeviceState
from .netmodel import (ChannelModel, DeviceConfig, EnergyLedger,
                       RadioEnergyModel, RunLog, Scenario, SleepPolicy,
                       lifetime, simulate)
from .signals import (FileSource, Sample, SyntheticSource, TraceSpec,
                      load_trace, quantize, synth, trace_samples)
from .sink import (DuplicateDeviceError, Packet, Sink, UnknownDeviceError)

__version__ = "0.1.0"

__all__ = [
    "BitReader", "BitString", "BitUnderflowError", "BitWriter",
    "CodecError", "IncompleteCodewordError", "MalformedPrefixError",
    "decode_residual", "encode_prefix", "encode_residual", "encode_suffix",
    "group_of",
    "DeviceState",
    "ChannelModel", "DeviceConfig", "EnergyLedger", "RadioEnergyModel",
    "RunLog", "Scenario", "SleepPolicy", "lifetime", "simulate",
    "FileSource", "Sample", "SyntheticSource", "TraceSpec", "load_trace",
    "quantize", "synth", "trace_samples",
    "DuplicateDeviceError", "Packet", "Sink", "UnknownDeviceError",
    "__version__",
]
