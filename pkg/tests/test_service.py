"""HTTP service: endpoint contracts and the search job lifecycle."""

import time

import pytest
from fastapi.testclient import TestClient

from pseudosieve.service.app import create_app


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def wait_done(client, job_id, timeout=60.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        js = client.get(f"/search/jobs/{job_id}").json()
        if js["state"] in ("done", "failed"):
            return js
        time.sleep(0.05)
    raise AssertionError("job did not finish in time")


class TestBasicEndpoints:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body["status"] == "ok"
        assert body["version"]

    def test_verify_true_and_false(self, client):
        r = client.post("/verify", json={"mode": "square", "value": "73", "p_max": 3})
        assert r.status_code == 200
        assert r.json()["result"] is True
        r = client.post("/verify", json={"mode": "square", "value": 75, "p_max": 3})
        assert r.json()["result"] is False

    def test_verify_huge_value_as_string(self, client):
        r = client.post(
            "/verify",
            json={"mode": "square", "value": "295363487400900310880401", "p_max": 359},
        )
        assert r.status_code == 200
        assert r.json()["result"] is True
        assert r.json()["value"] == "295363487400900310880401"

    def test_verify_bad_mode_rejected(self, client):
        r = client.post("/verify", json={"mode": "quartic", "value": "73", "p_max": 3})
        assert r.status_code == 422

    def test_verify_non_integer_value(self, client):
        r = client.post("/verify", json={"mode": "square", "value": "7x3", "p_max": 3})
        assert r.status_code == 422

    def test_oracle(self, client):
        r = client.post("/oracle", json={"mode": "square", "p_max": 5, "bound": "300"})
        assert r.status_code == 200
        assert r.json()["minimum"] == "241"

    def test_oracle_none(self, client):
        r = client.post("/oracle", json={"mode": "square", "p_max": 47, "bound": 1000})
        assert r.json()["minimum"] is None

    def test_oracle_bound_too_large(self, client):
        r = client.post("/oracle", json={"mode": "square", "p_max": 3, "bound": str(10**10)})
        assert r.status_code == 422

    def test_analyze(self, client):
        r = client.post("/analyze", json={"table_text": "2 3 73\n3 5 241\n"})
        assert r.status_code == 200
        body = r.json()
        assert body["kind"] == "square"
        assert len(body["rows"]) == 2
        assert body["rows"][0]["value"] == "73"
        assert body["stats"]["count"] == 2

    def test_analyze_crossover_default_other_table(self, client):
        from pseudosieve.analysis import bundled_table
        from pseudosieve.wheel import SQUARE

        rec = next(r for r in bundled_table(SQUARE) if r.n == 48)
        r = client.post(
            "/analyze",
            json={"table_text": f"{rec.n} {rec.prime} {rec.value}\n", "crossover": True},
        )
        body = r.json()
        assert body["crossover"] and body["crossover"][0]["n"] == 48
        assert abs(body["crossover"][0]["ratio"] - 2.214) < 0.005

    def test_analyze_bad_table(self, client):
        r = client.post("/analyze", json={"table_text": "2 5 73\n"})
        assert r.status_code == 422


class TestJobLifecycle:
    def test_submit_poll_results(self, client, tmp_path):
        r = client.post(
            "/search/jobs",
            json={
                "mode": "square",
                "p_max": 17,
                "x_lo": "2",
                "x_hi": "1000000",
                "output_dir": str(tmp_path / "out"),
            },
        )
        assert r.status_code == 202
        job_id = r.json()["job_id"]
        assert r.json()["state"] in ("queued", "running")

        js = wait_done(client, job_id)
        assert js["state"] == "done"
        assert js["done"] == js["total"] > 0

        res = client.get(f"/search/jobs/{job_id}/results")
        assert res.status_code == 200
        body = res.json()
        assert body["minimum"] == "18001"
        assert body["count"] >= 1
        assert body["truncated"] is False
        assert body["levels"][0]["p"] == 17
        assert body["levels"][0]["x"] == "18001"
        xs = [int(c["x"]) for c in body["candidates"]]
        assert xs == sorted(xs)
        assert (tmp_path / "out" / "results.txt").exists()

    def test_results_before_done_conflict(self, client):
        r = client.post(
            "/search/jobs",
            json={"mode": "square", "p_max": 47, "x_lo": "2", "x_hi": "50000000"},
        )
        job_id = r.json()["job_id"]
        res = client.get(f"/search/jobs/{job_id}/results")
        # large enough search that results cannot be ready instantly
        assert res.status_code in (409, 200)
        if res.status_code == 200:
            assert wait_done(client, job_id)["state"] == "done"
        else:
            wait_done(client, job_id)

    def test_unknown_job_404(self, client):
        assert client.get("/search/jobs/nope").status_code == 404
        assert client.get("/search/jobs/nope/results").status_code == 404

    def test_job_listing(self, client):
        r = client.post(
            "/search/jobs",
            json={"mode": "square", "p_max": 5, "x_lo": "2", "x_hi": "100000"},
        )
        job_id = r.json()["job_id"]
        wait_done(client, job_id)
        listed = client.get("/search/jobs").json()
        assert any(j["job_id"] == job_id for j in listed)

    def test_failed_job_reports_error(self, client, tmp_path):
        ckpt = tmp_path / "run.ckpt"
        ckpt.write_text("garbage\n", encoding="utf-8")
        r = client.post(
            "/search/jobs",
            json={
                "mode": "square",
                "p_max": 5,
                "x_lo": "2",
                "x_hi": "100000",
                "checkpoint_path": str(ckpt),
                "output_dir": str(tmp_path / "out"),
                "resume": True,
            },
        )
        js = wait_done(client, r.json()["job_id"])
        assert js["state"] == "failed"
        assert js["error"]

    def test_moduli_text_accepted(self, client):
        from pseudosieve.wheel import SQUARE, admissible_tn_residues, format_moduli_config

        m_p = 7 * 11
        text = format_moduli_config(
            [(7, list(range(7))), (11, list(range(11)))],
            [
                (8, admissible_tn_residues(SQUARE, 8, m_p)),
                (3, admissible_tn_residues(SQUARE, 3, m_p)),
                (5, list(range(5))),
            ],
        )
        r = client.post(
            "/search/jobs",
            json={
                "mode": "square",
                "p_max": 3,
                "x_lo": "2",
                "x_hi": "10000",
                "moduli_text": text,
            },
        )
        js = wait_done(client, r.json()["job_id"])
        assert js["state"] == "done"
        body = client.get(f"/search/jobs/{r.json()['job_id']}/results").json()
        assert body["minimum"] == "73"
