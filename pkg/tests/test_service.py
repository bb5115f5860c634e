"""service: HTTP routes over the synthesis handlers."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from mvirm.service import app

from test_dsl import F2_TEXT

client = TestClient(app)


@pytest.fixture(scope="module")
def f2_netlist() -> str:
    r = client.post(
        "/synth", json={"source": F2_TEXT, "emit": ["netlist"]}
    )
    assert r.status_code == 200
    return r.json()["solutions"][0]["netlist"]


class TestSynth:
    def test_fixed_polarity(self):
        r = client.post("/synth", json={"source": F2_TEXT})
        assert r.status_code == 200
        [sol] = r.json()["solutions"]
        assert sol["outputs"] == ["F2"]
        assert sol["maslov"] == 8
        assert sol["verified"] is True
        assert sol["polarity"]["X1"] == ["1111", "0101", "0011", "0111"]
        assert "maslov=8" in sol["report"]

    def test_emit_everything(self):
        r = client.post(
            "/synth",
            json={"source": F2_TEXT, "emit": ["report", "netlist", "qasm"]},
        )
        [sol] = r.json()["solutions"]
        assert sol["qasm"].startswith("OPENQASM 2.0;")
        assert json.loads(sol["netlist"])["format"] == "mvirm-netlist"

    def test_mirror_reports_clean_ancillas(self):
        r = client.post("/synth", json={"source": F2_TEXT, "mirror": True})
        [sol] = r.json()["solutions"]
        assert sol["ancillas_clean"] is True

    def test_search_scope(self):
        r = client.post(
            "/synth",
            json={"source": F2_TEXT, "search": "sample:10", "seed": 5, "top": 3},
        )
        sols = r.json()["solutions"]
        assert len(sols) == 3
        assert [s["maslov"] for s in sols] == sorted(s["maslov"] for s in sols)

    def test_missing_polarity_rejected(self):
        source = "var x: radix 2 encode(x);\nout f = x;\n"
        r = client.post("/synth", json={"source": source})
        assert r.status_code == 422
        assert "polarity" in r.json()["detail"]

    def test_bad_emit_rejected(self):
        r = client.post("/synth", json={"source": F2_TEXT, "emit": ["svg"]})
        assert r.status_code == 422


class TestTransform:
    def test_spectrum(self):
        r = client.post("/transform", json={"source": F2_TEXT})
        assert r.status_code == 200
        body = r.json()
        assert body["variables"] == ["X1", "X2"]
        got = {tuple(c["index"]) for c in body["coefficients"]}
        assert got == {(1, 1), (3, 1), (3, 3), (4, 1)}

    def test_methods_agree(self):
        a = client.post("/transform", json={"source": F2_TEXT}).json()
        b = client.post(
            "/transform",
            json={"source": F2_TEXT, "method": "products-matching"},
        ).json()
        assert a == b

    def test_requires_polarity(self):
        source = "var x: radix 2 encode(x);\nout f = x;\n"
        r = client.post("/transform", json={"source": source})
        assert r.status_code == 422


class TestCostVerify:
    def test_cost(self, f2_netlist):
        r = client.post("/cost", json={"netlist": f2_netlist})
        assert r.status_code == 200
        assert r.json()["maslov"] == 8

    def test_cost_rejects_tampered(self, f2_netlist):
        doc = json.loads(f2_netlist)
        doc["cost"]["maslov"] = 1
        r = client.post("/cost", json={"netlist": json.dumps(doc)})
        assert r.status_code == 422

    def test_verify_equivalent(self, f2_netlist):
        r = client.post(
            "/verify", json={"netlist": f2_netlist, "source": F2_TEXT}
        )
        assert r.status_code == 200
        assert r.json() == {"equivalent": True, "counterexample": None}

    def test_verify_counterexample(self, f2_netlist):
        wrong = F2_TEXT.replace("X1{0} * X2{2}", "X1{1} * X2{2}")
        r = client.post("/verify", json={"netlist": f2_netlist, "source": wrong})
        body = r.json()
        assert body["equivalent"] is False
        assert len(body["counterexample"]) == 2


class TestEnumerate:
    def test_polarities(self):
        r = client.post(
            "/enumerate",
            json={"kind": "polarities", "radix": 3, "first_row_ones": False},
        )
        body = r.json()
        assert body["count"] == 28
        assert ["100", "010", "001"] in body["items"]

    def test_limit(self):
        r = client.post(
            "/enumerate", json={"kind": "polarities", "radix": 4, "limit": 5}
        )
        body = r.json()
        assert body["count"] == 224
        assert len(body["items"]) == 5

    def test_pairings(self):
        r = client.post(
            "/enumerate",
            json={"kind": "pairings", "variables": ["a", "b", "c"], "max_group": 2},
        )
        assert r.json()["count"] == 4

    def test_bad_kind(self):
        r = client.post("/enumerate", json={"kind": "spectra"})
        assert r.status_code == 422
