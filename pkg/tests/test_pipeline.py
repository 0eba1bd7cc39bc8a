import json

import numpy as np
import pytest

from melobench.audio_io import AudioClip
from melobench.cli import main
from melobench.config import AnalysisConfig, apply_overrides
from melobench.metrics import evaluate, read_contour
from melobench.pipeline import analyze, analyze_region
from melobench.synthetic import (
    make_svd_corpus,
    mix_equal_rms,
    read_corpus,
    render_harmonic,
    steady_track,
    vibrato_track,
)
from melobench.synth import write_wav
from melobench.tracking import PitchContour

SR = 44100


def vibrato_clip(duration=2.0, f0=220.0, depth=50.0, rate=5.5, partials=10, sr=SR):
    finst = vibrato_track(f0, depth, rate, duration, sr)
    return AudioClip(render_harmonic(finst, sr, partials), sr), finst


def truth_contour(contour, finst, config, sr=SR):
    """Ground truth sampled at each analysis window's center."""
    center = config.window_seconds / 2.0
    idx = np.clip(((contour.times + center) * sr).astype(int), 0, len(finst) - 1)
    return PitchContour(contour.times, finst[idx], np.zeros(len(contour)))


class TestAnalyze:
    def test_single_source_vibrato(self):
        clip, finst = vibrato_clip()
        config = AnalysisConfig()
        result = analyze(clip, config)
        truth = truth_contour(result.contour, finst, config)
        m = evaluate(result.contour, truth)
        assert m.raw_pitch_accuracy >= 0.98
        assert result.contour.voiced.mean() >= 0.98

    def test_silence_all_unvoiced(self):
        result = analyze(AudioClip(np.zeros(SR * 2), SR), AnalysisConfig())
        assert not result.contour.voiced.any()
        assert len(result.contour) > 0

    def test_polyphonic_dual_mode(self):
        clip, finst = vibrato_clip()
        drone = render_harmonic(steady_track(150.0, 2.0, SR), SR, 3, amplitudes=np.ones(3))
        mix = AudioClip(mix_equal_rms(clip.samples, drone), SR)
        config = AnalysisConfig(tracking_mode="dual")
        result = analyze(mix, config)
        truth = truth_contour(result.contour, finst, config)
        m = evaluate(result.contour, truth)
        assert m.raw_pitch_accuracy >= 0.90

    def test_determinism(self):
        clip, _ = vibrato_clip(duration=0.5)
        config = AnalysisConfig()
        a = analyze(clip, config)
        b = analyze(clip, config)
        np.testing.assert_array_equal(a.contour.f0, b.contour.f0)
        np.testing.assert_array_equal(a.contour.salience, b.contour.salience)

    def test_voicing_masking_is_subset(self):
        clip, _ = vibrato_clip(duration=1.0)
        plain = analyze(clip, AnalysisConfig())
        gated = analyze(clip, apply_overrides(AnalysisConfig(), {"voicing.enabled": True}))
        voiced_plain = plain.contour.voiced
        voiced_gated = gated.contour.voiced
        assert np.all(voiced_plain | ~voiced_gated)  # gated is a subset

    def test_diagnostics_and_lean(self):
        clip, _ = vibrato_clip(duration=0.5)
        full = analyze(clip, AnalysisConfig())
        lean = analyze(clip, AnalysisConfig(), lean=True)
        assert full.diagnostics is not None
        assert len(full.diagnostics.candidates) == len(full.contour)
        assert full.diagnostics.features.shape == (len(full.contour), 2)
        assert lean.diagnostics is None
        np.testing.assert_array_equal(full.contour.f0, lean.contour.f0)

    def test_errors_carry_stage_attribution(self):
        from melobench.pipeline import PipelineError

        clip, _ = vibrato_clip(duration=0.3)
        config = apply_overrides(AnalysisConfig(), {"voicing.enabled": True})
        config.voicing.model_path = "/nonexistent/model.json"
        with pytest.raises(PipelineError) as err:
            analyze(clip, config)
        assert err.value.stage == "voicing"
        assert "voicing" in str(err.value)

    def test_region_matches_full_run(self):
        clip, _ = vibrato_clip(duration=1.0)
        config = AnalysisConfig()
        full = analyze(clip, config)
        region = analyze_region(clip, config, first_frame=20, n_frames=30)
        np.testing.assert_array_equal(
            full.contour.times[20:50], region.contour.times[:30]
        )
        # interior frames see identical audio, so candidates and pitch agree
        # away from the DP boundary
        np.testing.assert_allclose(
            full.contour.f0[25:45], region.contour.f0[5:25], rtol=1e-6
        )


class TestCli:
    def test_analyze_eval_roundtrip(self, tmp_path, capsys):
        clip, _ = vibrato_clip(duration=0.8)
        wav = tmp_path / "in.wav"
        write_wav(clip, wav)
        out = tmp_path / "contour.tsv"
        assert main(["analyze", str(wav), "--out", str(out)]) == 0
        contour = read_contour(out)
        assert len(contour) > 0
        assert main(["eval", str(out), str(out)]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["raw_pitch_accuracy"] == 1.0
        assert report["voicing_false_alarm"] == 0.0
        assert set(report) == {
            "voicing_recall",
            "voicing_false_alarm",
            "raw_pitch_accuracy",
            "raw_chroma_accuracy",
            "overall_accuracy",
        }

    def test_analyze_with_config_and_set(self, tmp_path):
        clip, _ = vibrato_clip(duration=0.5)
        wav = tmp_path / "in.wav"
        write_wav(clip, wav)
        cfg = tmp_path / "cfg.txt"
        cfg.write_text("tracking.smoothness_weight = 0.6\n")
        out = tmp_path / "c.tsv"
        code = main(
            ["analyze", str(wav), "--config", str(cfg), "--set", "twm.p=0.4", "--out", str(out)]
        )
        assert code == 0 and out.exists()

    def test_synth_command(self, tmp_path):
        contour_path = tmp_path / "c.tsv"
        contour_path.write_text("".join(f"{i * 0.01:.3f}\t440.0\n" for i in range(50)))
        out = tmp_path / "synth.wav"
        assert main(["synth", str(contour_path), "--out", str(out), "--mode", "harmonic"]) == 0
        from melobench.audio_io import load_wav

        clip = load_wav(out)
        assert clip.duration == pytest.approx(0.5, abs=0.02)

    def test_gen_corpus_deterministic(self, tmp_path):
        out1 = tmp_path / "c1"
        out2 = tmp_path / "c2"
        assert main(["gen-corpus", "--out", str(out1), "--seed", "7", "--per-class", "2"]) == 0
        assert main(["gen-corpus", "--out", str(out2), "--seed", "7", "--per-class", "2"]) == 0
        files1 = sorted(p.name for p in out1.iterdir())
        files2 = sorted(p.name for p in out2.iterdir())
        assert files1 == files2
        for name in files1:
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_train_svd_on_corpus_dir(self, tmp_path):
        corpus = tmp_path / "corpus"
        assert main(["gen-corpus", "--out", str(corpus), "--seed", "3", "--per-class", "2"]) == 0
        segments = read_corpus(corpus)
        assert len(segments) == 4
        model_path = tmp_path / "model.json"
        code = main(
            ["train-svd", "--corpus", str(corpus), "--out", str(model_path), "--components", "1"]
        )
        assert code == 0
        doc = json.loads(model_path.read_text())
        assert doc["version"] == 1
        assert set(doc["classes"]) == {"vocal", "nonvocal"}

    def test_usage_error_exit_1(self, capsys):
        assert main(["analyze"]) == 1  # missing positional
        assert main(["bogus-command"]) == 1
        capsys.readouterr()

    def test_processing_error_exit_2(self, tmp_path, capsys):
        missing = tmp_path / "missing.wav"
        assert main(["analyze", str(missing)]) == 2
        err = capsys.readouterr().err
        assert "missing.wav" in err

    def test_malformed_contour_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.tsv"
        bad.write_text("0.0\t-3.0\n")
        assert main(["eval", str(bad), str(bad)]) == 2
        assert "bad.tsv" in capsys.readouterr().err


class TestSyntheticCorpus:
    def test_corpus_determinism(self):
        a = make_svd_corpus(seed=5, n_per_class=2)
        b = make_svd_corpus(seed=5, n_per_class=2)
        for sa, sb in zip(a, b):
            assert sa.name == sb.name and sa.vocal == sb.vocal
            np.testing.assert_array_equal(sa.clip.samples, sb.clip.samples)

    def test_equal_rms_mixing(self):
        rng = np.random.default_rng(0)
        a = 0.5 * np.sin(np.linspace(0, 100, 4000))
        b = rng.normal(0, 2.0, 4000)
        mix = mix_equal_rms(a, b)
        assert np.abs(mix).max() <= 0.9 + 1e-12
