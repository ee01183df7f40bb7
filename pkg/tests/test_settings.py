import pytest

from core.settings import (
    ABSTRACT_LIMIT_ENV, AFFINE_LIMIT_ENV, SHATTER_LIMIT_ENV, RunConfig, Settings, get_settings,
)


class TestSettings:
    def test_defaults(self, monkeypatch):
        """Test defaults without environment overrides"""
        for name in (SHATTER_LIMIT_ENV, ABSTRACT_LIMIT_ENV, AFFINE_LIMIT_ENV):
            monkeypatch.delenv(name, raising=False)
        assert get_settings() == Settings(16, 16, 12)

    def test_environment_override(self, monkeypatch):
        """Test limits are read from the environment on every call"""
        monkeypatch.setenv(SHATTER_LIMIT_ENV, "10")
        monkeypatch.setenv(AFFINE_LIMIT_ENV, " ")
        settings = get_settings()
        assert settings.shatter_size_limit == 10
        assert settings.affine_element_limit == 12

    @pytest.mark.parametrize("raw", ["zero", "0", "-3"])
    def test_bad_environment(self, monkeypatch, raw):
        """Test malformed overrides are reported"""
        monkeypatch.setenv(ABSTRACT_LIMIT_ENV, raw)
        with pytest.raises(ValueError):
            get_settings()

    def test_positive_limits(self):
        """Test limits must be positive"""
        with pytest.raises(ValueError):
            Settings(shatter_size_limit=0)


class TestRunConfig:
    def test_round_trip(self):
        """Test run records serialize with sorted flags"""
        run = RunConfig("fuzz-equivalence", k=3, seed=7, samples=40, workers=2,
                        flags={'dump': None, 'b2_reading': 'point-set'}, settings=Settings(10, 11, 5))
        data = run.to_dict()
        assert list(data['flags']) == ['b2_reading', 'dump']
        assert RunConfig.from_dict(data) == run

    @pytest.mark.parametrize("field,value", [("seed", -1), ("seed", 2 ** 64), ("samples", -5), ("height", 0)])
    def test_validation(self, field, value):
        """Test out-of-range run parameters"""
        with pytest.raises(ValueError):
            RunConfig("fuzz-equivalence", **{field: value})
