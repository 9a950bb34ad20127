import json
import pathlib

import pytest

import sonartalk

SCENARIOS = pathlib.Path(__file__).resolve().parents[2] / "scenarios"


def test_frame_round_trip():
    frame = sonartalk.encode_frame(7, "speaker_1", 1.0, 2.5, "Dive complete.", "system_logs")
    assert frame[:4] == b"SNR1"
    assert int.from_bytes(frame[4:8], "big") == len(frame) - 8
    d = sonartalk.FrameDecoder()
    assert d.feed(b"noise" + frame[:10]) == []
    (msg,) = d.feed(frame[10:])
    assert msg["text"] == "Dive complete."
    assert msg["category"] == "system_logs"
    assert msg["end"] == 2.5
    assert d.stats["skipped_bytes"] == 5


def test_null_category():
    (msg,) = sonartalk.FrameDecoder().feed(sonartalk.encode_frame(1, "speaker_2", 0, 1, "Copy."))
    assert msg["category"] is None


def test_local_agreement():
    f = sonartalk.StabilityFilter()
    assert f.new_hypothesis(1, ["we", "are"]) == []
    assert f.new_hypothesis(2, ["we", "are", "at"]) == ["we", "are"]
    assert f.finalize() == ["at"]
    with pytest.raises(sonartalk.DecoderContractError):
        f.new_hypothesis(3, ["we"])


def test_speaker_segments():
    assert sonartalk.segment_speakers(["s1"] * 100) == [("s1", 0.0, 2.0)]
    assert sonartalk.segment_speakers(["s1", None] * 50) == []


def test_text_segments():
    out = sonartalk.segment_text([("speaker_1", "hatch sealed. ballast", 0.0), ("speaker_1", "venting", 1.0)])
    assert out == [("speaker_1", "hatch sealed.", "terminal"), ("speaker_1", "ballast venting", "stream_end")]


def test_classify_and_channel():
    label, sim = sonartalk.classify("battery at eighty percent")
    assert isinstance(label, str) and -1.0 <= sim <= 1.0 + 1e-9
    assert sonartalk.deliveries([(100, 0.0), (100, 0.1)]) == pytest.approx([3.533, 4.533], abs=1e-9)


def test_table1_scenario():
    r = sonartalk.simulate((SCENARIOS / "table1.json").read_text())
    rows = json.loads(r["report_json"])["rows"]
    assert [round(row["accumulated_s"], 2) for row in rows] == [2.99, 5.65, 5.71, 7.2, 10.41, 13.82]
    again = json.loads(sonartalk.latency_report(r["event_log"]))
    assert again["rows"] == rows


def test_dive_scenario():
    text = (SCENARIOS / "dive.json").read_text()
    a = sonartalk.simulate(text)
    b = sonartalk.simulate(text)
    assert a["sent_text"] == a["played_text"]
    assert set(a["sent_text"]) == {"speaker_1", "speaker_2"}
    assert a["event_log"] == b["event_log"]
    assert a["lost_msg_ids"] == []


def test_bad_scenario():
    with pytest.raises(sonartalk.ScenarioError):
        sonartalk.simulate('{"version": 1, "streams": [{"kind": "audio"}]}')
