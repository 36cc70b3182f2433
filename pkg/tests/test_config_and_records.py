from __future__ import annotations

import json
from datetime import timedelta
from pathlib import Path

import pytest

from fpf.config import Calibration, DEFAULT_CALIBRATION
from fpf.engine import Engine
from fpf.errors import ValidationError
from fpf.model import Congruence, Formality, Layer
from fpf.records import canonical
from fpf.store import Store
from fpf.times import format_ts, parse_ts

from conftest import AS_OF, T0


def test_default_tables_match_published_calibration():
    cal = DEFAULT_CALIBRATION
    assert [cal.layer_ceiling[l] for l in Layer] == [0.35, 0.75, 1.0]
    assert [cal.formality_ceiling[f] for f in Formality] == [0.70, 0.85, 0.95, 1.0]
    assert cal.congruence_penalty[Congruence.CL3] == 0.0
    assert cal.congruence_penalty[Congruence.CL2] == 0.10
    assert cal.congruence_penalty[Congruence.CL1] == 0.40
    assert cal.congruence_penalty[Congruence.CL0] == 0.90
    assert cal.decay_floor == 0.1
    assert cal.warning_window_days == 14


def test_calibration_override_from_file(tmp_path: Path):
    config = tmp_path / "cal.json"
    config.write_text(
        json.dumps(
            {
                "formality_ceiling": {"F0": 0.5, "F1": 0.85, "F2": 0.95, "F3": 1.0},
                "decay_floor": 0.2,
                "warning_window_days": 7,
            }
        ),
        encoding="utf-8",
    )
    cal = Calibration.from_file(config)
    assert cal.formality_ceiling[Formality.F0] == 0.5
    assert cal.decay_floor == 0.2
    assert cal.layer_ceiling[Layer.L0] == 0.35  # untouched keys keep defaults

    engine = Engine(calibration=cal)
    hid = engine.create_holon("h", Layer.L2, Formality.F2, "*", "actor:a", T0)
    with pytest.raises(ValidationError):
        engine.attach_evidence(hid, "note", 0.6, Formality.F0, "*", Congruence.CL3, AS_OF, T0)


def test_calibration_bad_file_rejected(tmp_path: Path):
    bad = tmp_path / "cal.json"
    bad.write_text("[1, 2, 3]", encoding="utf-8")
    with pytest.raises(ValidationError):
        Calibration.from_file(bad)
    bad.write_text('{"layer_ceiling": {"L9": 1.0}}', encoding="utf-8")
    with pytest.raises(ValidationError):
        Calibration.from_file(bad)
    with pytest.raises(ValidationError):
        Calibration.from_file(tmp_path / "absent.json")


# -- canonical record emitter -----------------------------------------------------


def test_canonical_six_decimal_floats_and_sorted_keys():
    text = canonical({"b": 0.7, "a": 1, "c": True, "d": None, "e": "x"})
    assert text == '{"a":1,"b":0.700000,"c":true,"d":null,"e":"x"}'


def test_canonical_nested_and_sets():
    text = canonical({"s": {"z", "a"}, "list": [0.5, 2], "t": parse_ts("2026-01-22")})
    assert text == '{"list":[0.500000,2],"s":["a","z"],"t":"2026-01-22T00:00:00Z"}'


def test_canonical_is_valid_json():
    blob = canonical({"x": [1.0, {"y": 0.123456789}]})
    assert json.loads(blob) == {"x": [1.0, {"y": 0.123457}]}


def test_canonical_rejects_unknown_types():
    with pytest.raises(TypeError):
        canonical({"x": object()})


# -- timestamps ----------------------------------------------------------------------


def test_parse_date_only_is_midnight_utc():
    assert format_ts(parse_ts("2026-01-15")) == "2026-01-15T00:00:00Z"


def test_parse_accepts_offset_and_z():
    assert parse_ts("2026-01-15T12:00:00+02:00") == parse_ts("2026-01-15T10:00:00Z")


def test_parse_naive_taken_as_utc():
    assert format_ts(parse_ts("2026-01-15T10:00:00")) == "2026-01-15T10:00:00Z"


def test_parse_truncates_to_seconds():
    assert format_ts(parse_ts("2026-01-15T10:00:00.999Z")) == "2026-01-15T10:00:00Z"


@pytest.mark.parametrize("bad", ["", "not-a-date", "2026-13-40", "2026-01-15T99:00:00Z"])
def test_parse_rejects_garbage(bad):
    with pytest.raises(ValidationError):
        parse_ts(bad)


# -- id stability across sessions ------------------------------------------------------


def test_ids_resume_after_reopen(tmp_path: Path):
    path = tmp_path / "fpf.log"
    engine = Engine(Store(path))
    h1 = engine.create_holon("one", Layer.L0, Formality.F0, "*", "actor:a", T0)
    engine.attach_evidence(h1, "x", 0.5, Formality.F1, "*", Congruence.CL3, AS_OF, T0)
    engine.store.close()

    resumed = Engine(Store(path))
    h2 = resumed.create_holon("two", Layer.L0, Formality.F0, "*", "actor:a", T0 + timedelta(days=1))
    e2 = resumed.attach_evidence(h2, "y", 0.5, Formality.F1, "*", Congruence.CL3, AS_OF, T0)
    assert h1 != h2
    assert e2 not in ("e1",)
    assert set(resumed.graph.holons) == {h1, h2}
    resumed.store.close()
