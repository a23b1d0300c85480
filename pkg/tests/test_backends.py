import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from chartfact import wire
from chartfact.backends import (
    FixtureChart2TableBackend,
    FixtureEntailmentBackend,
    FixtureRectifier,
    GoldTableBackend,
    OracleEntailmentBackend,
    RemoteEntailmentBackend,
    TruthfulRectifier,
    make_chart2table_backend,
    make_entail_backend,
    make_rectifier_backend,
)
from chartfact.correction import MARKER, parse_rectifier_response
from chartfact.entailment import build_prompt, sentence_score
from chartfact.table import ChartRef, parse_linearized
from chartfact.wire import BackendUnavailableError

TABLE = parse_linearized("Year\tRate&&&1990\t20.4&&&2000\t26.7", title="Rates")
CHART = ChartRef(id="c1", gold_table=TABLE)


def test_make_entail_backend_selectors(tmp_path):
    assert isinstance(make_entail_backend("oracle"), OracleEntailmentBackend)
    fixture = make_entail_backend(f"fixture:{tmp_path}")
    assert isinstance(fixture, FixtureEntailmentBackend)
    assert fixture.directory == str(tmp_path)
    assert fixture.backend_id == f"fixture:{tmp_path}"
    remote = make_entail_backend("remote:http://localhost:1")
    assert isinstance(remote, RemoteEntailmentBackend)
    assert remote.base_url == "http://localhost:1"
    for bad in ("oracle:x", "fixture:", "remote:", "magic", ""):
        with pytest.raises(ValueError):
            make_entail_backend(bad)


def test_make_chart2table_backend_selectors(tmp_path):
    assert isinstance(make_chart2table_backend("gold"), GoldTableBackend)
    assert isinstance(
        make_chart2table_backend(f"fixture:{tmp_path}"), FixtureChart2TableBackend
    )
    with pytest.raises(ValueError):
        make_chart2table_backend("oracle")


def test_make_rectifier_backend_selectors(tmp_path):
    assert isinstance(make_rectifier_backend("truthful"), TruthfulRectifier)
    fixture = make_rectifier_backend(f"fixture:{tmp_path}", template_id="t9")
    assert isinstance(fixture, FixtureRectifier)
    assert fixture.template_id == "t9"
    with pytest.raises(ValueError):
        make_rectifier_backend("gold")


def test_oracle_backend_scores_from_gold_table():
    backend = OracleEntailmentBackend()
    good = backend.score(CHART, build_prompt("The rate was 20.4 in 1990."))
    bad = backend.score(CHART, build_prompt("The rate was 55.1 in 1990."))
    assert sentence_score(good) > 0.9
    assert sentence_score(bad) < 0.1


def test_oracle_backend_accepts_bare_table():
    backend = OracleEntailmentBackend()
    logits = backend.score(TABLE, build_prompt("The rate was 26.7 in 2000."))
    assert sentence_score(logits) > 0.9


def test_oracle_backend_needs_table():
    with pytest.raises(BackendUnavailableError):
        OracleEntailmentBackend().score(ChartRef(id="bare"), build_prompt("Hi there."))


def test_fixture_entail_replay(tmp_path):
    prompt = build_prompt("The rate was 20.4 in 1990.")
    envelope = wire.entail_envelope(CHART, prompt)
    wire.write_fixture(
        str(tmp_path), wire.ROUTE_ENTAIL, envelope, {"logit_yes": 2.0, "logit_no": -2.0}
    )
    backend = FixtureEntailmentBackend(str(tmp_path))
    logits = backend.score(CHART, prompt)
    assert (logits.logit_yes, logits.logit_no) == (2.0, -2.0)


def test_fixture_entail_malformed_payload(tmp_path):
    prompt = build_prompt("The rate was 20.4 in 1990.")
    envelope = wire.entail_envelope(CHART, prompt)
    wire.write_fixture(str(tmp_path), wire.ROUTE_ENTAIL, envelope, {"only_yes": 1.0})
    with pytest.raises(BackendUnavailableError, match="malformed fixture"):
        FixtureEntailmentBackend(str(tmp_path)).score(CHART, prompt)


def test_fixture_entail_missing(tmp_path):
    with pytest.raises(BackendUnavailableError, match="no recorded fixture"):
        FixtureEntailmentBackend(str(tmp_path)).score(CHART, build_prompt("Hello."))


def test_gold_table_backend_title_fallback():
    title, table = GoldTableBackend().convert(CHART)
    assert title == "Rates"
    assert table is TABLE
    untitled = ChartRef(id="u", gold_table=parse_linearized("A\tB&&&x\t1"))
    assert GoldTableBackend().convert(untitled)[0] == ""


def test_fixture_chart2table_replay(tmp_path):
    chart = ChartRef(id="img", image_uri="charts/img.png")
    envelope = wire.chart2table_envelope(chart)
    wire.write_fixture(
        str(tmp_path),
        wire.ROUTE_CHART2TABLE,
        envelope,
        {"title": "Recovered", "table_linearized": "A\tB&&&x\t1"},
    )
    title, table = FixtureChart2TableBackend(str(tmp_path)).convert(chart)
    assert title == "Recovered"
    assert table == parse_linearized("A\tB&&&x\t1", title="Recovered")


def test_fixture_chart2table_malformed(tmp_path):
    chart = ChartRef(id="img", image_uri="charts/img.png")
    envelope = wire.chart2table_envelope(chart)
    wire.write_fixture(
        str(tmp_path), wire.ROUTE_CHART2TABLE, envelope, {"title": "no table"}
    )
    with pytest.raises(BackendUnavailableError, match="malformed fixture"):
        FixtureChart2TableBackend(str(tmp_path)).convert(chart)


def test_fixture_rectifier_replay_and_template_scoping(tmp_path):
    envelope = wire.rectify_envelope("t", "A\tB&&&x\t1", "cap", "default")
    wire.write_fixture(
        str(tmp_path), wire.ROUTE_RECTIFY, envelope, {"raw_response": "NO ERRORS"}
    )
    table = parse_linearized("A\tB&&&x\t1")
    assert FixtureRectifier(str(tmp_path)).rectify("t", table, "cap") == "NO ERRORS"
    # A different template id hashes to a different request.
    other = FixtureRectifier(str(tmp_path), template_id="other")
    with pytest.raises(BackendUnavailableError, match="no recorded fixture"):
        other.rectify("t", table, "cap")


def test_truthful_rectifier_preserves_percent_suffix():
    response = TruthfulRectifier().rectify("t", TABLE, "Turnout was 99.9% in 2000.")
    _, corrected, _ = parse_rectifier_response(response)
    assert corrected == "Turnout was 26.7% in 2000."


def test_truthful_rectifier_skips_ambiguous_anchor():
    caption = "Between 1990 and 2000 the rate was 55.5."
    response = TruthfulRectifier().rectify("t", TABLE, caption)
    _, corrected, no_errors = parse_rectifier_response(response)
    assert no_errors
    assert corrected == caption


def test_truthful_rectifier_skips_unanchored_number():
    caption = "The overall rate was 55.5."
    response = TruthfulRectifier().rectify("t", TABLE, caption)
    assert parse_rectifier_response(response)[2] is True


def test_truthful_rectifier_needs_single_numeric_column():
    two_numeric = parse_linearized("A\tB&&&1.5\t2.5&&&3.5\t4.5")
    response = TruthfulRectifier().rectify("t", two_numeric, "A hit 9.9 somewhere.")
    assert parse_rectifier_response(response)[2] is True


def test_truthful_rectifier_combined_fixes():
    caption = "The rate fell to 99.9 in 2000."
    response = TruthfulRectifier().rectify("t", TABLE, caption)
    explanation, corrected, no_errors = parse_rectifier_response(response)
    assert not no_errors
    assert corrected == "The rate rose to 26.7 in 2000."
    assert explanation.count("\n") == 1
    assert MARKER not in corrected


def test_truthful_rectifier_trend_only():
    response = TruthfulRectifier().rectify(
        "t", TABLE, "The rate declined between 1990 and 2000."
    )
    _, corrected, _ = parse_rectifier_response(response)
    assert corrected == "The rate gained between 1990 and 2000."


class OneShotHandler(BaseHTTPRequestHandler):
    payload = {}

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        self.rfile.read(length)
        raw = json.dumps(type(self).payload).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)

    def log_message(self, *args):
        pass


def test_remote_entail_backend_round_trip():
    OneShotHandler.payload = {"logit_yes": 1.25, "logit_no": -0.5, "version": "1"}
    server = HTTPServer(("127.0.0.1", 0), OneShotHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        host, port = server.server_address
        backend = RemoteEntailmentBackend(f"http://{host}:{port}")
        logits = backend.score(CHART, build_prompt("The rate was 20.4 in 1990."))
        assert (logits.logit_yes, logits.logit_no) == (1.25, -0.5)
    finally:
        server.shutdown()
        thread.join(timeout=5)
