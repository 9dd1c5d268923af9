"""
Unit tests for app.py (FastAPI application)
Tests cover all API endpoints, request validation and error mapping.
"""

import pytest
from fastapi.testclient import TestClient

from app import app
from settings import WorkbenchSettings, reset_settings, set_settings

# Create test client
client = TestClient(app)

R1 = "cyc(x^2 y) + y^4"


@pytest.fixture(autouse=True)
def small_settings():
    """Fixture to install fast settings for every request."""
    set_settings(WorkbenchSettings(default_cap=10, workers=2))
    yield
    reset_settings()


class TestHealthEndpoint:
    """Test the /health endpoint."""

    def test_health_returns_200(self):
        """Test health endpoint returns 200 status."""
        response = client.get("/health")
        assert response.status_code == 200

    def test_health_values(self):
        """Test health endpoint reports the configured cap."""
        data = client.get("/health").json()
        assert data["status"] == "healthy"
        assert data["default_cap"] == 10


class TestDeriveEndpoint:
    """Test the /derive endpoint."""

    def test_simple_relations(self):
        """Test simple relations of cyc(x^2 y) + y^4."""
        response = client.post("/derive", json={"potential": R1})
        assert response.status_code == 200
        data = response.json()
        assert data["relations"] == ["x y + y x", "x^2 + y^3"]
        assert data["potential"] == "x^2 y + x y x + y x^2 + y^4"
        assert data["field"] == "QQ"

    def test_ginzburg_mode(self):
        """Test Ginzburg relations."""
        data = client.post("/derive", json={"potential": R1, "mode": "ginzburg"}).json()
        assert data["relations"] == ["3 x y + 3 y x", "3 x^2 + 4 y^3"]

    def test_parse_error(self):
        """Test syntax errors map to 400 with the error type."""
        response = client.post("/derive", json={"potential": "x^^2"})
        assert response.status_code == 400
        assert response.json()["detail"].startswith("ParseError")

    def test_zero_denominator(self):
        """Test a zero denominator maps to 400."""
        response = client.post("/derive", json={"potential": "1/0 x^3"})
        assert response.status_code == 400
        assert response.json()["detail"].startswith("ParseError")

    def test_bad_field(self):
        """Test a composite characteristic maps to 400."""
        response = client.post("/derive", json={"potential": R1, "field": "GF(4)"})
        assert response.status_code == 400

    def test_empty_potential(self):
        """Test request validation."""
        response = client.post("/derive", json={"potential": ""})
        assert response.status_code == 422

    def test_bad_cap(self):
        """Test caps must be positive."""
        response = client.post("/derive", json={"potential": R1, "cap": 0})
        assert response.status_code == 422


class TestGroebnerEndpoint:
    """Test the /gb endpoint."""

    def test_relations(self):
        """Test completing an explicit relation list."""
        response = client.post("/gb", json={"relations": "x y + y x, x^2 + y^3", "cap": 10})
        assert response.status_code == 200
        data = response.json()
        assert "x y" in data["leading_words"]
        assert data["unresolved"] == 0
        assert data["complete_through"] == 8

    def test_potential(self):
        """Test completing the relations of a potential."""
        data = client.post("/gb", json={"potential": R1}).json()
        assert set(data["leading_words"]) == {"x y", "x^2", "y^3 x", "y^6"}

    def test_exactly_one_source(self):
        """Test giving both or neither source is rejected."""
        assert client.post("/gb", json={"potential": R1, "relations": "x y"}).status_code == 400
        assert client.post("/gb", json={}).status_code == 400


class TestDimensionEndpoint:
    """Test the /dim endpoint."""

    def test_r1(self):
        """Test the dimension of cyc(x^2 y) + y^4."""
        data = client.post("/dim", json={"potential": R1}).json()
        assert data["total"] == 9
        assert data["hilbert"] == [1, 2, 2, 2, 1, 1]
        assert data["finite"] is True

    def test_infinite(self):
        """Test an inconclusive run reports growth."""
        data = client.post("/dim", json={"potential": "cyc(x^2 y) + y^5"}).json()
        assert data["finite"] is False
        assert data["total"] is None


class TestCanonEndpoint:
    """Test the /canon endpoint."""

    def test_r1(self):
        """Test classification of cyc(x^2 y) + y^4."""
        data = client.post("/canon", json={"potential": R1}).json()
        assert data["representative"] == "dim9-a"
        assert data["cubic"]["label"] == "X2Y"

    def test_prime_field_rejected(self):
        """Test classification over GF(p) maps to 400."""
        response = client.post("/canon", json={"potential": R1, "field": "GF(7)"})
        assert response.status_code == 400
