import pytest
from fastapi.testclient import TestClient
from sqlalchemy.pool import StaticPool
from sqlmodel import Session, SQLModel, create_engine

from app.config import settings
from app.database import get_session
from app.main import app

RUN = {"n": 64, "p": 0.25, "epsilon": 0.15, "num_messages": 8, "trials": 4}


@pytest.fixture
def client():
    engine = create_engine(
        "sqlite://", connect_args={"check_same_thread": False}, poolclass=StaticPool
    )
    SQLModel.metadata.create_all(engine)

    def _session():
        with Session(engine) as session:
            yield session

    app.dependency_overrides[get_session] = _session
    with TestClient(app) as c:
        yield c
    app.dependency_overrides.clear()


def test_health(client):
    assert client.get("/health").json()["status"] == "healthy"


def test_latest_without_runs(client):
    assert client.get("/experiments/latest").json()["status"] == "no_data"


def test_run_and_browse(client):
    res = client.post("/experiments/run", json=RUN)
    assert res.status_code == 200
    body = res.json()
    assert body["status"] == "success"
    assert body["run_id"] == 1
    assert body["summary"]["trials"] == 4

    client.post(
        "/experiments/run",
        json={**RUN, "strategy": "random", "strategy_params": {"q": 0.2}},
    )
    latest = client.get("/experiments/latest").json()
    assert latest["run"]["id"] == 2
    assert latest["run"]["config"]["strategy"] == "random"

    listing = client.get("/experiments", params={"kind": "simulate"}).json()
    assert listing["count"] == 2
    assert [r["id"] for r in listing["runs"]] == [2, 1]
    assert client.get("/experiments", params={"kind": "attack"}).json()["count"] == 0


def test_invalid_config_is_rejected(client):
    res = client.post("/experiments/run", json={**RUN, "strategy": "bogus"})
    assert res.status_code == 422


@pytest.fixture
def output_dir(tmp_path, monkeypatch):
    base = tmp_path / "runs"
    monkeypatch.setattr(settings, "api_output_dir", str(base))
    return base


def test_output_written_inside_output_dir(client, output_dir):
    res = client.post("/experiments/run", json={**RUN, "output_path": "a/sim.csv"})
    assert res.status_code == 200
    assert (output_dir / "a" / "sim.csv").exists()
    assert (output_dir / "a" / "sim.csv.summary.json").exists()


@pytest.mark.parametrize("path", ["../escape.csv", "a/../../escape.csv", "/tmp/abs.csv"])
def test_output_outside_output_dir_is_rejected(client, output_dir, path):
    res = client.post("/experiments/run", json={**RUN, "output_path": path})
    assert res.status_code == 422
    assert not (output_dir.parent / "escape.csv").exists()


def test_unusable_output_path(client, output_dir):
    output_dir.mkdir()
    (output_dir / "file").write_text("x")
    res = client.post("/experiments/run", json={**RUN, "output_path": "file/out.csv"})
    assert res.status_code == 422
