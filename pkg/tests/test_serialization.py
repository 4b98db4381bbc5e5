# /tests/test_serialization.py

import json

import jsonschema
import numpy as np
import pandas as pd
import pytest

from strongconverse import __version__, channels
from strongconverse.errors import InvalidParameter, IoError, NotCPTP
from strongconverse.models import RunConfig
from strongconverse.protocol import random_protocol, simulate
from strongconverse.serialization import (
    build_report,
    channel_family,
    channel_to_dict,
    decode_matrix,
    dumps,
    encode_matrix,
    load_channel,
    parse_channel_spec,
    parse_state_spec,
    protocol_from_dict,
    protocol_to_dict,
    report_frame,
    to_jsonable,
    validate_report,
    write_report,
)


def _report(**result):
    config = RunConfig(command="divergence", rho="mixed:2", sigma="mixed:2")
    return build_report(config, to_jsonable(result), True, [])


@pytest.mark.parametrize("text,d_in,d_out", [
    ("depolarizing:0.25", 2, 2),
    ("depolarizing:0.1,3", 3, 3),
    ("bsc:0.1", 2, 2),
    ("replacement:3", 3, 3),
    ("random:2,3,7", 2, 3),
    ("identity", 2, 2),
])
def test_parse_named_channels(text, d_in, d_out):
    ch = parse_channel_spec(text)
    assert (ch.d_in, ch.d_out) == (d_in, d_out)


def test_parse_channel_errors():
    with pytest.raises(InvalidParameter):
        parse_channel_spec("teleporter:1")
    with pytest.raises(InvalidParameter):
        parse_channel_spec("depolarizing:abc")
    with pytest.raises(InvalidParameter):
        parse_channel_spec("depolarizing:3.0")


def test_channel_family():
    family, lo, hi = channel_family("depolarizing:0.2")
    assert (lo, hi) == (0.0, 1.0)
    assert family(0.5).d_in == 2
    assert channel_family("bsc:0.1") is None


def test_channel_file_round_trip(tmp_path, rng):
    ch = channels.random_eb_channel(2, 2, seed=rng)
    path = tmp_path / "canal.json"
    path.write_text(json.dumps(channel_to_dict(ch)))
    loaded = load_channel(str(path))
    rho = np.diag([0.3, 0.7])
    assert np.allclose(loaded.apply_to(rho), ch.apply_to(rho), atol=1e-12)
    assert loaded.is_eb_by_construction


def test_malformed_channel_files(tmp_path):
    missing = tmp_path / "sin_kraus.json"
    missing.write_text(json.dumps({"kind": "kraus"}))
    with pytest.raises(NotCPTP):
        load_channel(str(missing))
    not_tp = tmp_path / "no_tp.json"
    not_tp.write_text(json.dumps({"kind": "kraus", "kraus": [encode_matrix(2 * np.eye(2))]}))
    with pytest.raises(NotCPTP):
        parse_channel_spec(str(not_tp))
    with pytest.raises(IoError):
        load_channel(str(tmp_path / "no_existe.json"))


def test_matrix_codec_accepts_real_entries():
    m = np.array([[1.0, 2.0 - 1.0j], [2.0 + 1.0j, 0.5]])
    assert np.array_equal(decode_matrix(encode_matrix(m)), m)
    assert np.array_equal(decode_matrix([[1, 0], [0, 1]]), np.eye(2))
    with pytest.raises(InvalidParameter):
        decode_matrix([[[1.0]]])


def test_parse_state_spec():
    assert np.allclose(parse_state_spec("mixed:3").matrix, np.eye(3) / 3)
    assert np.allclose(parse_state_spec("ket:1,2").matrix, np.diag([0.0, 1.0]))
    assert parse_state_spec("random:2,5").dim == 2
    with pytest.raises(InvalidParameter):
        parse_state_spec("thermal:2")


def test_non_finite_values_become_strings():
    data = to_jsonable({"a": np.inf, "b": -np.inf, "c": np.float64(0.5), "d": np.bool_(True)})
    assert data == {"a": "inf", "b": "-inf", "c": 0.5, "d": True}
    json.loads(dumps({"x": np.inf}))


def test_report_matches_schema():
    report = _report(value=1.0, kind="sandwiched")
    validate_report(report)
    assert report["version"] == __version__
    assert report["config"]["seed"] == 42
    report["unexpected"] = 1
    with pytest.raises(jsonschema.ValidationError):
        validate_report(report)


def test_reports_are_byte_identical(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    write_report(_report(value=0.25), str(first))
    write_report(_report(value=0.25), str(second))
    assert first.read_bytes() == second.read_bytes()
    meta = json.loads((tmp_path / "a.json.meta.json").read_text())
    assert meta["report"] == "a.json"
    assert "timestamp" in meta


def test_csv_report_uses_table(tmp_path):
    table = [{"alpha": 2.0, "chi_alpha": 0.1, "term": 0.2}, {"alpha": 4.0, "chi_alpha": 0.15, "term": 0.3}]
    path = tmp_path / "curva.csv"
    write_report(_report(table=table), str(path), "csv")
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["alpha", "chi_alpha", "term"]
    assert frame["term"].tolist() == [0.2, 0.3]


def test_flat_frame_without_table():
    frame = report_frame(_report(value=0.5))
    rows = dict(zip(frame["quantity"], frame["value"]))
    assert rows["result.value"] == 0.5
    assert rows["command"] == "divergence"


def test_write_report_io_error(tmp_path):
    blocker = tmp_path / "archivo"
    blocker.write_text("x")
    with pytest.raises(IoError):
        write_report(_report(value=0.5), str(blocker / "reporte.json"))


def test_protocol_round_trip(eb_depolarizing):
    p = random_protocol(eb_depolarizing, 2, 2, seed=3)
    data = json.loads(json.dumps(protocol_to_dict(p)))
    q = protocol_from_dict(data)
    a, _ = simulate(p)
    b, _ = simulate(q)
    assert all(np.allclose(x, y, atol=1e-12) for x, y in zip(a.states, b.states))


KRAUS_DOCUMENT = {"kind": "kraus", "d_in": 2, "d_out": 2, "ops": [[[1, 0], [0, 1]]]}
MEASURE_PREPARE_DOCUMENT = {
    "kind": "measure_prepare",
    "povm": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]],
    "states": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]],
}
NAMED_DOCUMENT = {"kind": "named", "name": "depolarizing", "params": {"lambda": 0.25}}


def _write(tmp_path, data, name="canal.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_kraus_document_with_dimensions(tmp_path):
    ch = load_channel(_write(tmp_path, KRAUS_DOCUMENT))
    rho = np.array([[0.6, 0.2 - 0.1j], [0.2 + 0.1j, 0.4]])
    assert (ch.d_in, ch.d_out) == (2, 2)
    assert np.allclose(ch.apply_to(rho), rho)


def test_measure_prepare_document(tmp_path):
    ch = load_channel(_write(tmp_path, MEASURE_PREPARE_DOCUMENT))
    plus = np.full((2, 2), 0.5)
    assert np.allclose(ch.apply_to(plus), np.eye(2) / 2)
    assert ch.is_eb_by_construction


def test_named_document_with_keyword_params(tmp_path):
    ch = load_channel(_write(tmp_path, NAMED_DOCUMENT))
    reference = channels.depolarizing(0.25)
    rho = np.array([[0.9, 0.3], [0.3, 0.1]])
    assert np.allclose(ch.apply_to(rho), reference.apply_to(rho), atol=1e-12)
    assert parse_channel_spec(_write(tmp_path, NAMED_DOCUMENT, "otro.json")).d_out == 2


@pytest.mark.parametrize("data", [
    {**KRAUS_DOCUMENT, "d_in": 3},
    {**KRAUS_DOCUMENT, "d_out": 4},
    {"kind": "named", "name": "depolarizing", "params": {"lambda": 0.25, "gamma": 1}},
    {"kind": "named", "name": "depolarizing", "params": {"lambda": 2.0}},
    {"kind": "measure_prepare", "povm": [[[1, 0], [0, 0]]], "states": [[[1, 0], [0, 0]]]},
    {"kind": "teleporter"},
])
def test_invalid_channel_documents(tmp_path, data):
    with pytest.raises(NotCPTP):
        load_channel(_write(tmp_path, data))


def test_channel_to_dict_uses_documented_keys(eb_depolarizing):
    data = channel_to_dict(eb_depolarizing)
    assert data["kind"] == "kraus"
    assert (data["d_in"], data["d_out"]) == (2, 2)
    assert len(data["ops"]) == len(eb_depolarizing.stacked)
