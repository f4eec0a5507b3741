import json
import sys
from pathlib import Path

import pytest

import evok

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "oracles"))
import evok_oracles as oracle  # noqa: E402


def test_generate_detect_estimate():
    samples, peaks = evok.generate_ppg([(0, 75)], 120000, 50, "none", 1)
    assert len(samples) == 6000
    assert samples[1][0] - samples[0][0] == 20
    assert len(peaks) == 150
    beats = evok.detect_beats(samples)
    assert abs(len(beats) - len(peaks)) <= 1
    est = evok.estimate_rate(beats, 120000)
    assert est == {"bpm": 75, "warmed_up": True, "contact_ok": True}


def test_noise_presets_and_custom_noise():
    a, _ = evok.generate_ppg([(0, 60)], 5000, 50, "fingertip", 3)
    b, _ = evok.generate_ppg([(0, 60)], 5000, 50, {"white_noise_sigma": 0.0}, 3)
    c, _ = evok.generate_ppg([(0, 60)], 5000, 50, "none", 3)
    assert a != c and b == c
    with pytest.raises(ValueError):
        evok.generate_ppg([(0, 60)], 5000, 50, "wrist", 3)


def test_profile_parsing():
    assert evok.parse_bpm_profile("t_ms,bpm\n0,70\n# ramp\n180000,120\n") == [(0, 70), (180000, 120)]
    with pytest.raises(evok.ProfileParseError):
        evok.parse_bpm_profile("0,70\n100,abc\n")
    with pytest.raises(evok.InvalidProfile):
        evok.generate_ppg([(0, 300)], 1000)


def test_protocol_matches_oracle():
    f = evok.Frame(group_id=7, sender_id=0xDEADBEEF, seq=42, timestamp_ms=123456789, bpm=72)
    wire = evok.encode(f)
    assert len(wire) == evok.FRAME_SIZE
    assert wire == oracle.encode_frame(0, 7, 0xDEADBEEF, 42, 123456789, 72, 0)
    assert evok.decode(wire) == f
    assert evok.crc16(b"123456789") == oracle.crc16_ccitt_false(b"123456789") == 0x29B1
    assert evok.decode(wire[:-1]) == "BadLength"
    assert evok.decode(b"XX" + wire[2:]) == "BadMagic"
    flipped = bytearray(wire)
    flipped[10] ^= 0x01
    assert evok.decode(bytes(flipped)) == "BadCrc"
    with pytest.raises(evok.InvalidFrame):
        evok.encode(evok.Frame(bpm=300))


def test_accepts_wraps():
    f = evok.Frame(group_id=1, seq=0)
    assert evok.accepts(1, 0xFFFFFFFF, f)
    assert not evok.accepts(1, 0, f)
    assert not evok.accepts(2, None, f)
    assert evok.accepts(1, None, f)


def test_zones_and_display():
    assert [evok.classify_zone(b) for b in (59, 100, 130)] == ["low", "normal", "high"]
    assert evok.classify_zone(110, 80, 120) == "normal"
    assert evok.display_sequence(130) == [1, 3, 0]


def test_receiver_wrapper():
    rx = evok.Receiver(group_id=7)
    effects = rx.frame(evok.Frame(group_id=7, seq=1, bpm=80), 0)
    assert "led:green" in effects
    effects = rx.frame(evok.Frame(group_id=7, seq=2, bpm=120), 1000)
    assert rx.zone == "high"
    assert sum("beep" in e for e in effects) == 1
    rx.toggle_pause(1500)
    assert rx.state["paused"] is True
    with pytest.raises(ValueError):
        rx.set_range(120, 80, 1600)
    assert rx.state["range"] == {"low": 60, "high": 100}


def test_simulate_session_matches_oracle():
    datagrams = [(i * 1000, bytes([i % 256])) for i in range(1000)]
    out = evok.simulate_session(datagrams, drop=0.2, seed=42)
    assert len(out) == oracle.forwarded_count(42, 1000, 0.2) == 781
    assert all(out[i][0] <= out[i + 1][0] for i in range(len(out) - 1))
