"""Python bindings for the EvoK heart-rate link."""

import json as _json

from ._evok import (
    DEFAULT_PORT,
    FLAG_CONTACT_LOST,
    FLAG_WARMUP,
    FRAME_SIZE,
    Frame,
    InvalidFrame,
    InvalidProfile,
    MsgType,
    ProfileParseError,
    accepts,
    classify_zone,
    crc16,
    decode,
    detect_beats,
    display_sequence,
    encode,
    estimate_rate,
    generate_ppg,
    parse_bpm_profile,
    simulate_session,
)
from ._evok import _Receiver

__all__ = [
    "DEFAULT_PORT", "FLAG_CONTACT_LOST", "FLAG_WARMUP", "FRAME_SIZE", "Frame", "InvalidFrame", "InvalidProfile",
    "MsgType", "ProfileParseError", "Receiver", "accepts", "classify_zone", "crc16", "decode", "detect_beats",
    "display_sequence", "encode", "estimate_rate", "generate_ppg", "parse_bpm_profile", "simulate_session",
]


class Receiver(_Receiver):
    """Receiver state machine. Each event method returns the emitted effects."""

    @property
    def state(self):
        return _json.loads(self.state_json())
