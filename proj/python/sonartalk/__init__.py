"""Text pipeline between a submersible and its support ship."""

from ._core import (
    ConfigError,
    DecoderContractError,
    Error,
    FrameDecoder,
    FrameTooLargeError,
    InputError,
    ScenarioError,
    StabilityFilter,
    StreamError,
    classify,
    deliveries,
    encode_frame,
    latency_report,
    protocol_version,
    segment_speakers,
    segment_text,
    simulate,
)

__all__ = [
    "ConfigError",
    "DecoderContractError",
    "Error",
    "FrameDecoder",
    "FrameTooLargeError",
    "InputError",
    "ScenarioError",
    "StabilityFilter",
    "StreamError",
    "classify",
    "deliveries",
    "encode_frame",
    "latency_report",
    "protocol_version",
    "segment_speakers",
    "segment_text",
    "simulate",
]
