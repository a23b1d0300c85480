import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from chartfact.table import ChartRef, parse_linearized
from chartfact.wire import (
    BackendError,
    BackendUnavailableError,
    ROUTE_CHART2TABLE,
    ROUTE_ENTAIL,
    ROUTE_RECTIFY,
    RemoteTransport,
    canonical_json,
    chart2table_envelope,
    entail_envelope,
    fixture_path,
    read_fixture,
    rectify_envelope,
    request_hash,
    write_fixture,
)

TABLE = parse_linearized("Year\tRate&&&1990\t20.4")
PROMPT = 'Does the image entail this statement: "The rate was 20.4 in 1990."?'


def test_canonical_json_is_compact_sorted_unicode():
    assert canonical_json({"b": 1, "a": "é"}) == '{"a":"é","b":1}'
    assert canonical_json([1, {"y": 2, "x": 3}]) == '[1,{"x":3,"y":2}]'


# Hashes derived by hand from the documented scheme: sha256 of the route,
# a newline, and the canonical envelope JSON with None fields dropped.
FROZEN_HASHES = [
    (
        ROUTE_ENTAIL,
        {"table_linearized": "Year\tRate&&&1990\t20.4", "prompt": PROMPT},
        "de6e03dbc32c6135fe85a6c7fe89716a6271f79adbb905ad3500456f82a4f412",
    ),
    (
        ROUTE_CHART2TABLE,
        {"image_uri": "charts/0001.png"},
        "d2bbea722de831b051436424e42c010365f8ad07b99cd3e0f6c26102fd552427",
    ),
    (
        ROUTE_RECTIFY,
        {
            "title": "Rates",
            "table_linearized": "Year\tRate&&&1990\t20.4",
            "caption": "The rate was 21.0 in 1990.",
            "template_id": "default",
        },
        "cf89301cb12cf40d44cab9f60432d0786fad5ff757bc65c41f216700430e847c",
    ),
]


@pytest.mark.parametrize("route, envelope, expected", FROZEN_HASHES)
def test_request_hash_frozen_values(route, envelope, expected):
    assert request_hash(route, envelope) == expected


def test_request_hash_drops_none_fields():
    assert (
        request_hash(ROUTE_ENTAIL, {"prompt": "p", "image_uri": "x.png", "extra": None})
        == "2b03083967e85f84d4e04fbdfaab853461c86c51cf8228b33fa89cfd10a5c8c6"
    )
    assert request_hash(ROUTE_ENTAIL, {"prompt": "p", "image_uri": "x.png"}) == (
        request_hash(ROUTE_ENTAIL, {"prompt": "p", "image_uri": "x.png", "extra": None})
    )


def test_request_hash_route_matters():
    env = {"image_uri": "x.png"}
    assert request_hash(ROUTE_ENTAIL, env) != request_hash(ROUTE_CHART2TABLE, env)


def test_entail_envelope_prefers_image():
    chart = ChartRef(id="c", image_uri="c.png", gold_table=TABLE)
    assert entail_envelope(chart, "p") == {"image_uri": "c.png", "prompt": "p"}


def test_entail_envelope_falls_back_to_gold_table():
    chart = ChartRef(id="c", gold_table=TABLE)
    assert entail_envelope(chart, "p") == {
        "table_linearized": "Year\tRate&&&1990\t20.4",
        "prompt": "p",
    }


def test_entail_envelope_bare_table():
    assert entail_envelope(TABLE, "p") == {
        "table_linearized": "Year\tRate&&&1990\t20.4",
        "prompt": "p",
    }


def test_entail_envelope_requires_some_subject():
    with pytest.raises(BackendError):
        entail_envelope(ChartRef(id="empty"), "p")


def test_chart2table_envelope_requires_image():
    assert chart2table_envelope(ChartRef(id="c", image_uri="c.png")) == {
        "image_uri": "c.png"
    }
    with pytest.raises(BackendError):
        chart2table_envelope(ChartRef(id="c", gold_table=TABLE))


def test_rectify_envelope_shape():
    assert rectify_envelope("t", "A\tB&&&1\t2", "cap") == {
        "title": "t",
        "table_linearized": "A\tB&&&1\t2",
        "caption": "cap",
        "template_id": "default",
    }


def test_fixture_write_read_round_trip(tmp_path):
    env = {"image_uri": "c.png", "prompt": "p"}
    payload = {"logit_yes": 10.0, "logit_no": -10.0}
    path = write_fixture(str(tmp_path), ROUTE_ENTAIL, env, payload)
    assert path == fixture_path(str(tmp_path), ROUTE_ENTAIL, env)
    assert path.endswith(request_hash(ROUTE_ENTAIL, env) + ".json")
    assert read_fixture(str(tmp_path), ROUTE_ENTAIL, env) == payload


def test_fixture_missing_raises(tmp_path):
    with pytest.raises(BackendUnavailableError, match="no recorded fixture"):
        read_fixture(str(tmp_path), ROUTE_ENTAIL, {"prompt": "p"})


def test_fixture_corrupt_raises(tmp_path):
    env = {"prompt": "p"}
    path = fixture_path(str(tmp_path), ROUTE_ENTAIL, env)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("{broken")
    with pytest.raises(BackendUnavailableError, match="unreadable"):
        read_fixture(str(tmp_path), ROUTE_ENTAIL, env)


def test_fixture_non_object_raises(tmp_path):
    env = {"prompt": "p"}
    path = fixture_path(str(tmp_path), ROUTE_ENTAIL, env)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([1, 2], fh)
    with pytest.raises(BackendUnavailableError, match="not a JSON object"):
        read_fixture(str(tmp_path), ROUTE_ENTAIL, env)


class ScriptedHandler(BaseHTTPRequestHandler):
    """Serves a fixed script of (status, body) responses in order."""

    script = []
    seen = []

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length)) if length else None
        type(self).seen.append((self.path, body))
        status, payload = type(self).script[min(len(type(self).seen) - 1, len(type(self).script) - 1)]
        raw = payload if isinstance(payload, bytes) else json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), ScriptedHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    ScriptedHandler.script = []
    ScriptedHandler.seen = []
    yield server
    server.shutdown()
    thread.join(timeout=5)


def transport(server):
    host, port = server.server_address
    return RemoteTransport(f"http://{host}:{port}", timeout=5, backoff=0.01)


def test_transport_retries_transient_failures(stub_server):
    ScriptedHandler.script = [(500, {}), (503, {}), (200, {"ok": True})]
    body = transport(stub_server).post(ROUTE_ENTAIL, {"prompt": "p"})
    assert body == {"ok": True}
    assert len(ScriptedHandler.seen) == 3
    assert ScriptedHandler.seen[0] == (ROUTE_ENTAIL, {"prompt": "p"})


def test_transport_gives_up_after_three(stub_server):
    ScriptedHandler.script = [(500, {})]
    with pytest.raises(BackendUnavailableError, match="after 3 attempts"):
        transport(stub_server).post(ROUTE_ENTAIL, {"prompt": "p"})
    assert len(ScriptedHandler.seen) == 3


def test_transport_4xx_fails_immediately(stub_server):
    ScriptedHandler.script = [(422, {"detail": "bad"})]
    with pytest.raises(BackendError, match="422"):
        transport(stub_server).post(ROUTE_ENTAIL, {"prompt": "p"})
    assert len(ScriptedHandler.seen) == 1


def test_transport_rejects_non_json_body(stub_server):
    ScriptedHandler.script = [(200, b"not json at all")]
    with pytest.raises(BackendUnavailableError, match="non-JSON"):
        transport(stub_server).post(ROUTE_ENTAIL, {"prompt": "p"})


def test_transport_rejects_non_object_body(stub_server):
    ScriptedHandler.script = [(200, [1, 2, 3])]
    with pytest.raises(BackendUnavailableError, match="non-object"):
        transport(stub_server).post(ROUTE_ENTAIL, {"prompt": "p"})


def test_transport_connection_refused():
    t = RemoteTransport("http://127.0.0.1:9", timeout=0.2, backoff=0.01)
    with pytest.raises(BackendUnavailableError):
        t.post(ROUTE_ENTAIL, {"prompt": "p"})
