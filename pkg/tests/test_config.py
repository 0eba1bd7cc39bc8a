import pytest

from melobench.config import (
    AnalysisConfig,
    CONFIG_KEYS,
    InvalidConfigKeyError,
    apply_overrides,
    config_to_flat_dict,
    parse_config,
    render_config,
)


class TestOverrides:
    def test_apply_and_isolation(self):
        base = AnalysisConfig()
        out = apply_overrides(base, {"twm.p": 0.6, "tracking_mode": "dual"})
        assert out.twm.p == 0.6
        assert out.tracking_mode == "dual"
        assert base.twm.p == 0.5  # base untouched
        assert base.tracking_mode == "single"

    def test_unknown_key_lists_valid_keys(self):
        with pytest.raises(InvalidConfigKeyError) as err:
            apply_overrides(AnalysisConfig(), {"twm.zeta": 1.0})
        assert "twm.zeta" in str(err.value)
        assert "twm.p" in str(err.value)

    def test_bool_coercion(self):
        out = apply_overrides(AnalysisConfig(), {"voicing.enabled": "true"})
        assert out.voicing.enabled is True
        out = apply_overrides(AnalysisConfig(), {"voicing.enabled": False})
        assert out.voicing.enabled is False

    def test_invalid_value_rejected(self):
        with pytest.raises(ValueError):
            apply_overrides(AnalysisConfig(), {"tracking_mode": "triple"})
        with pytest.raises(ValueError):
            apply_overrides(AnalysisConfig(), {"twm.f0_min": 2000.0})  # > f0_max


class TestTextFormat:
    def test_roundtrip_fixed_point(self):
        text = render_config(AnalysisConfig())
        again = render_config(parse_config(text))
        assert text == again

    def test_roundtrip_after_overrides(self):
        config = apply_overrides(
            AnalysisConfig(),
            {"twm.q": 1.7, "tracking.smoothness_weight": 0.55, "voicing.enabled": True},
        )
        text = render_config(config)
        parsed = parse_config(text)
        assert parsed.twm.q == 1.7
        assert parsed.tracking.smoothness_weight == 0.55
        assert parsed.voicing.enabled is True
        assert render_config(parsed) == text

    def test_comments_and_blanks(self):
        text = "# a comment\n\nwindow_seconds = 0.05\n"
        config = parse_config(text)
        assert config.window_seconds == 0.05

    def test_malformed_line(self):
        with pytest.raises(ValueError):
            parse_config("window_seconds 0.05\n")

    def test_every_key_reachable(self):
        config = AnalysisConfig()
        flat = config_to_flat_dict(config)
        assert set(flat) == set(CONFIG_KEYS)
        # every key survives a render/parse cycle
        parsed = parse_config(render_config(config))
        assert config_to_flat_dict(parsed) == flat
