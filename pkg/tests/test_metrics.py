import numpy as np
import pytest

from melobench.metrics import evaluate, read_contour, write_contour
from melobench.tracking import PitchContour


def contour(f0, times=None):
    f0 = np.asarray(f0, float)
    if times is None:
        times = np.arange(len(f0)) * 0.01
    return PitchContour(np.asarray(times, float), f0, np.zeros(len(f0)))


class TestEvaluate:
    def test_identity(self):
        ref = contour([220.0, 220.0, 0.0, 330.0])
        m = evaluate(ref, ref)
        assert m.voicing_recall == 1.0
        assert m.voicing_false_alarm == 0.0
        assert m.raw_pitch_accuracy == 1.0
        assert m.raw_chroma_accuracy == 1.0
        assert m.overall_accuracy == 1.0

    def test_octave_error_chroma_rescues(self):
        ref = contour([220.0, 0.0, 330.0, 440.0])
        est = contour([440.0, 0.0, 660.0, 880.0])
        m = evaluate(est, ref)
        assert m.raw_pitch_accuracy == 0.0
        assert m.raw_chroma_accuracy == 1.0
        assert m.voicing_recall == 1.0

    def test_four_frame_hand_example(self):
        # ref voiced frames 1, 2, 4; est misses frame 2's pitch by ~101
        # cents and falsely voices frame 3
        ref = contour([220.0, 220.0, 0.0, 330.0])
        est = contour([220.0, 233.1, 100.0, 330.0])
        m = evaluate(est, ref, tolerance_cents=50.0)
        assert m.voicing_recall == 1.0
        assert m.voicing_false_alarm == 1.0
        assert m.raw_pitch_accuracy == pytest.approx(2.0 / 3.0)
        assert m.raw_chroma_accuracy == pytest.approx(2.0 / 3.0)
        # frames 1 and 4 are fully correct: voicing matches and pitch is in
        # tolerance; frame 2 fails on pitch, frame 3 on voicing
        assert m.overall_accuracy == pytest.approx(0.5)

    def test_empty_reference_is_error(self):
        with pytest.raises(ValueError):
            evaluate(contour([220.0]), PitchContour.empty())

    def test_chroma_never_below_pitch_randomized(self):
        rng = np.random.default_rng(12)
        for _ in range(300):
            n = int(rng.integers(1, 40))
            ref_f0 = np.where(rng.uniform(size=n) < 0.7, rng.uniform(70, 1000, n), 0.0)
            est_f0 = np.where(rng.uniform(size=n) < 0.7, rng.uniform(70, 1000, n), 0.0)
            m = evaluate(contour(est_f0), contour(ref_f0))
            assert m.raw_chroma_accuracy >= m.raw_pitch_accuracy
            for v in m.as_dict().values():
                assert 0.0 <= v <= 1.0

    def test_transposition_invariance(self):
        rng = np.random.default_rng(13)
        n = 50
        ref_f0 = np.where(rng.uniform(size=n) < 0.8, rng.uniform(100, 800, n), 0.0)
        est_f0 = ref_f0 * np.where(ref_f0 > 0, 2 ** (rng.normal(0, 0.02, n)), 0)
        m1 = evaluate(contour(est_f0), contour(ref_f0))
        m2 = evaluate(contour(est_f0 * 1.5), contour(ref_f0 * 1.5))
        assert m1 == m2

    def test_tolerance_boundary(self):
        ref = contour([220.0])
        just_in = contour([220.0 * 2 ** (49.0 / 1200.0)])
        just_out = contour([220.0 * 2 ** (51.0 / 1200.0)])
        assert evaluate(just_in, ref).raw_pitch_accuracy == 1.0
        assert evaluate(just_out, ref).raw_pitch_accuracy == 0.0

    def test_no_unvoiced_reference_frames(self):
        ref = contour([220.0, 220.0])
        est = contour([220.0, 220.0])
        assert evaluate(est, ref).voicing_false_alarm == 0.0

    def test_grid_mismatch_warns(self):
        ref = contour([220.0] * 10)
        est = contour([220.0] * 4, times=np.arange(4) * 0.025)
        with pytest.warns(UserWarning):
            evaluate(est, ref)

    def test_estimate_frames_beyond_reference_ignored(self):
        ref = contour([220.0, 220.0])
        est = contour([220.0, 220.0, 990.0, 990.0])
        m = evaluate(est, ref)
        assert m.raw_pitch_accuracy == 1.0


class TestContourIO:
    def test_roundtrip(self, tmp_path):
        rng = np.random.default_rng(3)
        f0 = np.where(rng.uniform(size=20) < 0.7, rng.uniform(70, 1000, 20), 0.0)
        c = contour(f0)
        path = tmp_path / "c.tsv"
        write_contour(c, path)
        back = read_contour(path)
        np.testing.assert_allclose(back.times, c.times, atol=1e-6)
        np.testing.assert_allclose(back.f0, c.f0, atol=1e-4)

    def test_format_shape(self, tmp_path):
        path = tmp_path / "c.tsv"
        write_contour(contour([440.0, 0.0]), path)
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        t, f = lines[1].split("\t")
        assert float(f) == 0.0
        assert len(t.split(".")[1]) >= 3  # at least 3 decimals on time

    def test_negative_f0_rejected(self, tmp_path):
        path = tmp_path / "bad.tsv"
        path.write_text("0.000\t220.0\n0.010\t-5.0\n")
        with pytest.raises(ValueError):
            read_contour(path)

    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("# header\n\n0.000\t220.0\n")
        c = read_contour(path)
        assert len(c) == 1 and c.f0[0] == 220.0
