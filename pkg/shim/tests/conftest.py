import pytest
from fastapi.testclient import TestClient

from chartshim import protocol
from chartshim.service import ShimConfig, create_app

ENTAIL_ENVELOPE = {
    "prompt": 'Does the image entail this statement: "The rate rose."?',
    "table_linearized": "Year\tRate&&&2019\t3.7&&&2020\t8.1",
}
ENTAIL_PAYLOAD = {"logit_yes": 2.0, "logit_no": -2.0}

C2T_ENVELOPE = {"image_uri": "images/c1.png"}
C2T_PAYLOAD = {
    "title": "Rates",
    "table_linearized": "Year\tRate&&&2019\t3.7&&&2020\t8.1",
}

RECTIFY_ENVELOPE = {
    "title": "Rates",
    "table_linearized": "Year\tRate&&&2019\t3.7&&&2020\t8.1",
    "caption": "The rate fell.",
    "template_id": "default",
}
RECTIFY_PAYLOAD = {"raw_response": "NO ERRORS\nCORRECTED CAPTION:\nThe rate fell."}


@pytest.fixture
def fixture_dir(tmp_path):
    directory = str(tmp_path / "fixtures")
    protocol.write_fixture(
        directory, protocol.ROUTE_ENTAIL, ENTAIL_ENVELOPE, ENTAIL_PAYLOAD
    )
    protocol.write_fixture(
        directory, protocol.ROUTE_CHART2TABLE, C2T_ENVELOPE, C2T_PAYLOAD
    )
    protocol.write_fixture(
        directory, protocol.ROUTE_RECTIFY, RECTIFY_ENVELOPE, RECTIFY_PAYLOAD
    )
    return directory


@pytest.fixture
def stub_client(fixture_dir):
    app = create_app(ShimConfig(mode="stub", fixture_dir=fixture_dir))
    with TestClient(app) as client:
        yield client
