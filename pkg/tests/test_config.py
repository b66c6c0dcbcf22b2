"""Tests for settings, configuration models, errors and artifact writing."""

import json

import numpy as np
import pandas as pd
import pytest
from pydantic import TypeAdapter, ValidationError

from sharp_extension.config import Settings
from sharp_extension.errors import ConfigError, FieldError, GeometryError, NumericalFailure
from sharp_extension.src.data.sample_functions import random_gaussian_polynomials, regression_family
from sharp_extension.src.io.artifacts import summary_text, write_artifacts
from sharp_extension.src.models.experiment import Criterion, ExperimentConfig, RunSummary, XiScanBlock
from sharp_extension.src.models.specs import CircleSpec, CurveSpec, L6Control, PerturbedParabolaSpec


class TestSettings:
    """Tests for environment-backed settings."""

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("SHARP_THREADS", raising=False)
        settings = Settings(_env_file=None)
        assert settings.threads == 1
        assert settings.default_arc_samples == 1025
        assert settings.l6_radii == [16.0, 24.0, 32.0]
        assert settings.damping_floor == pytest.approx(1.0 / 64.0)
        assert not settings.is_parallel

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("SHARP_THREADS", "4")
        monkeypatch.setenv("SHARP_OUTPUT_DIR", "/tmp/sharp-runs")
        settings = Settings(_env_file=None)
        assert settings.threads == 4
        assert settings.output_dir == "/tmp/sharp-runs"
        assert settings.is_parallel

    def test_rejects_zero_threads(self, monkeypatch):
        monkeypatch.setenv("SHARP_THREADS", "0")
        with pytest.raises(ValidationError):
            Settings(_env_file=None)


class TestModels:
    """Tests for curve specs and experiment blocks."""

    def test_curve_discriminator(self):
        adapter = TypeAdapter(CurveSpec)
        curve = adapter.validate_python({"kind": "perturbed_parabola", "lambda": 1.0, "a": 0.125, "halfwidth": 0.75})
        assert isinstance(curve, PerturbedParabolaSpec)
        assert curve.lam == 1.0
        assert isinstance(adapter.validate_python({"kind": "circle", "radius": 1.0, "extent": 1.0}), CircleSpec)
        with pytest.raises(ValidationError):
            adapter.validate_python({"kind": "ellipse", "radius": 1.0})

    def test_psi_degree(self):
        with pytest.raises(ValidationError):
            PerturbedParabolaSpec(lam=1.0, a=0.1, halfwidth=0.5, psi={4: 1.0})

    def test_l6_radii_order(self):
        with pytest.raises(ValidationError):
            L6Control(radii=(16.0, 12.0, 32.0))

    def test_xi_block_range(self):
        with pytest.raises(ValidationError):
            XiScanBlock(epsilons=[0.1, 0.0])

    def test_extra_keys_forbidden(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"curve": None, "unknown": 1})

    def test_aliases(self):
        config = ExperimentConfig.model_validate({"triple-limit": {"radii": [0.3, 0.2, 0.1]}})
        assert config.triple_limit.radii == [0.3, 0.2, 0.1]
        assert "triple-limit" in config.model_dump(by_alias=True)


class TestErrors:
    """Tests for the exception hierarchy."""

    def test_config_error_line(self):
        assert str(ConfigError("bad value", line=7)) == "line 7: bad value"
        assert ConfigError("bad value").line is None

    def test_value_error_family(self):
        assert issubclass(GeometryError, ValueError)
        assert issubclass(FieldError, ValueError)
        assert issubclass(NumericalFailure, RuntimeError)

    def test_numerical_failure_diagnostics(self):
        error = NumericalFailure("diverged", {"partial_integrals": [1.0, 2.0]})
        assert error.diagnostics["partial_integrals"] == [1.0, 2.0]


class TestArtifacts:
    """Tests for summary and table output."""

    @pytest.fixture
    def summary(self):
        return RunSummary(
            command="demo",
            passed=True,
            criteria=[Criterion(name="check", value=0.5, tolerance=1.0, passed=True)],
            results={"zeta": 1, "alpha": [1.0, 2.0]},
            config={},
        )

    def test_summary_sorted(self, summary):
        text = summary_text(summary)
        assert text.endswith("\n")
        assert list(json.loads(text)) == sorted(json.loads(text))
        assert text.index('"alpha"') < text.index('"zeta"')

    def test_write(self, summary, tmp_path):
        frame = pd.DataFrame({"x": [0.1, 0.2], "y": [1.0, 2.0]})
        written = write_artifacts(tmp_path / "out", "demo", summary, {"rows": frame})
        assert set(written) == {"demo.json", "demo_rows.csv"}
        assert json.loads((tmp_path / "out" / "demo.json").read_text())["command"] == "demo"
        restored = pd.read_csv(tmp_path / "out" / "demo_rows.csv")
        assert np.array_equal(restored["x"].to_numpy(), frame["x"].to_numpy())
        assert not list((tmp_path / "out").glob("*.tmp"))


class TestSampleFunctions:
    """Seeded sample families."""

    def test_regression_family_deterministic(self, circle_arc):
        first = regression_family(circle_arc, size=3)
        second = regression_family(circle_arc, size=3)
        for a, b in zip(first, second):
            assert np.array_equal(a.values, b.values)

    def test_random_polynomials_depend_on_seed(self):
        a = random_gaussian_polynomials(1.0, 2, seed=0)
        b = random_gaussian_polynomials(1.0, 2, seed=1)
        assert a != b
        assert all(p.degree <= 4 for p in a)
