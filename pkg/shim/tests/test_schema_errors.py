"""4xx on schema problems, 5xx on backend problems, no silent fallbacks."""

import json

import pytest

from conftest import ENTAIL_ENVELOPE

from chartshim import protocol
from chartshim.service import ShimConfig, create_app


@pytest.mark.parametrize(
    "body",
    [
        {},
        {"prompt": "p"},
        {"prompt": "p", "image_uri": "a.png", "table_linearized": "A\tB"},
        {"prompt": "p", "table_linearized": "A\tB", "junk": 1},
        {"prompt": 5, "table_linearized": "A\tB"},
    ],
)
def test_entail_schema_violations_are_422(stub_client, body):
    assert stub_client.post(protocol.ROUTE_ENTAIL, json=body).status_code == 422


def test_chart2table_missing_uri_is_422(stub_client):
    assert stub_client.post(protocol.ROUTE_CHART2TABLE, json={}).status_code == 422


def test_rectify_missing_caption_is_422(stub_client):
    body = {"title": "T", "table_linearized": "A\tB"}
    assert stub_client.post(protocol.ROUTE_RECTIFY, json=body).status_code == 422


def test_unknown_route_is_404(stub_client):
    assert stub_client.post("/v1/nonsense", json={}).status_code == 404


def test_unrecorded_request_is_404(stub_client):
    body = {"prompt": "never recorded", "table_linearized": "A\tB"}
    resp = stub_client.post(protocol.ROUTE_ENTAIL, json=body)
    assert resp.status_code == 404
    assert "no recorded fixture" in resp.json()["detail"]


def test_corrupt_fixture_is_500(tmp_path):
    from fastapi.testclient import TestClient

    directory = str(tmp_path / "fx")
    path = protocol.write_fixture(
        directory, protocol.ROUTE_ENTAIL, ENTAIL_ENVELOPE, {"logit_yes": "wat"}
    )
    app = create_app(ShimConfig(mode="stub", fixture_dir=directory))
    with TestClient(app) as client:
        resp = client.post(protocol.ROUTE_ENTAIL, json=ENTAIL_ENVELOPE)
    assert resp.status_code == 500
    assert path.endswith(".json")


def test_fixture_with_bad_table_is_500(tmp_path):
    from fastapi.testclient import TestClient

    envelope = {"image_uri": "c.png"}
    directory = str(tmp_path / "fx")
    protocol.write_fixture(
        directory,
        protocol.ROUTE_CHART2TABLE,
        envelope,
        {"title": "T", "table_linearized": "A\tB&&&only-one-cell"},
    )
    app = create_app(ShimConfig(mode="stub", fixture_dir=directory))
    with TestClient(app) as client:
        resp = client.post(protocol.ROUTE_CHART2TABLE, json=envelope)
    assert resp.status_code == 500
    assert "invalid table" in resp.json()["detail"]


def test_config_validation():
    with pytest.raises(ValueError):
        ShimConfig(mode="stub")
    with pytest.raises(ValueError):
        ShimConfig(mode="model")
    with pytest.raises(ValueError):
        ShimConfig(mode="things")


def test_validate_linearized_accepts_the_format():
    protocol.validate_linearized("A\tB&&&1\t2&&&3\t4")
    protocol.validate_linearized("OnlyHeader")
    with pytest.raises(ValueError):
        protocol.validate_linearized("")
    with pytest.raises(ValueError):
        protocol.validate_linearized("A\tB&&&1")
    with pytest.raises(ValueError):
        protocol.validate_linearized(" \t ")


def test_fixture_files_are_sorted_json(tmp_path):
    directory = str(tmp_path / "fx")
    path = protocol.write_fixture(
        directory, protocol.ROUTE_ENTAIL, ENTAIL_ENVELOPE, {"b": 1, "a": 2}
    )
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    assert text == json.dumps({"a": 2, "b": 1}, ensure_ascii=False, sort_keys=True)
