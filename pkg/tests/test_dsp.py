import numpy as np
import pytest

from prompttts.dsp import (
    HOP_LENGTH,
    LOG_FLOOR,
    SAMPLE_RATE,
    estimate_f0,
    estimate_rate,
    estimate_volume,
    griffin_lim,
    load_mel,
    mel_from_wave,
    read_wav,
    save_mel,
    trim_silence,
    write_wav,
)


def sine(freq, seconds=1.0, amp=0.5):
    t = np.arange(int(seconds * SAMPLE_RATE)) / SAMPLE_RATE
    return amp * np.sin(2 * np.pi * freq * t)


class TestMel:
    def test_frame_count_for_one_second(self):
        mel = mel_from_wave(sine(220))
        assert abs(mel.shape[0] - 80) <= 1
        assert mel.shape[1] == 80

    def test_silence_sits_at_log_floor(self):
        mel = mel_from_wave(np.zeros(SAMPLE_RATE))
        assert np.allclose(mel, LOG_FLOOR)

    def test_amplitude_doubling_shifts_by_log2(self):
        w = sine(300, amp=0.25)
        d = mel_from_wave(2 * w) - mel_from_wave(w)
        # only bins above the floor shift exactly
        mask = mel_from_wave(w) > LOG_FLOOR + 1.0
        assert np.allclose(d[mask], np.log(2), atol=1e-6)

    def test_too_short_raises(self):
        with pytest.raises(ValueError, match="too short"):
            mel_from_wave(np.zeros(100) + 0.1)

    def test_mel_dump_roundtrip(self, tmp_path):
        mel = mel_from_wave(sine(440))
        path = tmp_path / "b.mel"
        save_mel(path, mel)
        back = load_mel(path)
        assert back.shape == mel.shape
        assert np.allclose(back, mel, atol=1e-5)
        raw = path.read_bytes()
        frames, bins = np.frombuffer(raw[:8], dtype="<i4")
        assert (frames, bins) == mel.shape


class TestGriffinLim:
    def test_round_trip_preserves_f0(self):
        from prompttts.oracle import OracleVoiceSpec, synthesize_oracle
        from prompttts.textfront import PhonemeSeq
        seq = PhonemeSeq.from_symbols(["AA", "IY", "OW", "EH", "UW", "M", "N", "L"])
        spec = OracleVoiceSpec(180.0, "flat", 0.0, 0.2, 0.7, 0.05, seed=4)
        wave = synthesize_oracle(seq, spec)
        rebuilt = griffin_lim(mel_from_wave(wave), iterations=60)
        f0_a, f0_b = estimate_f0(wave), estimate_f0(rebuilt)
        assert f0_b == pytest.approx(f0_a, rel=0.05)

    def test_floor_mel_is_near_silent(self):
        mel = np.full((100, 80), LOG_FLOOR)
        wave = griffin_lim(mel, iterations=5)
        assert np.sqrt(np.mean(wave ** 2)) < 1e-3

    def test_output_length(self):
        mel = mel_from_wave(sine(220, seconds=2.0))
        wave = griffin_lim(mel, iterations=2)
        assert abs(len(wave) - mel.shape[0] * HOP_LENGTH) <= 800

    def test_energy_monotonicity(self):
        mel = mel_from_wave(sine(250, seconds=0.8))
        g = 2.0
        low = griffin_lim(mel, iterations=40)
        high = griffin_lim(mel + np.log(g), iterations=40)
        ratio = estimate_volume(high) / estimate_volume(low)
        assert ratio == pytest.approx(g, rel=0.10)

    def test_non_finite_mel_rejected(self):
        mel = np.full((10, 80), np.nan)
        with pytest.raises(ValueError):
            griffin_lim(mel)


class TestF0:
    def test_pure_tone(self):
        assert estimate_f0(sine(220)) == pytest.approx(220, rel=0.02)

    def test_pulse_train(self):
        w = np.zeros(SAMPLE_RATE)
        w[::160] = 1.0  # 100 Hz at 16 kHz
        assert estimate_f0(w) == pytest.approx(100, rel=0.02)

    def test_white_noise_is_unvoiced(self):
        rng = np.random.default_rng(1234)
        assert estimate_f0(rng.standard_normal(SAMPLE_RATE) * 0.3) is None

    def test_too_short_raises(self):
        with pytest.raises(ValueError):
            estimate_f0(np.zeros(HOP_LENGTH) + 0.1)


class TestRateAndVolume:
    def test_rate_definition(self):
        w = sine(200, seconds=2.0)
        assert estimate_rate(w, 10) == pytest.approx(5.0, rel=0.02)

    def test_rate_ignores_leading_trailing_silence(self):
        pad = np.zeros(SAMPLE_RATE)
        w = np.concatenate([pad, sine(200, seconds=2.0), pad])
        assert estimate_rate(w, 10) == pytest.approx(5.0, rel=0.02)

    def test_rate_errors(self):
        with pytest.raises(ValueError):
            estimate_rate(sine(200), 0)
        with pytest.raises(ValueError, match="silent"):
            estimate_rate(np.zeros(SAMPLE_RATE), 5)

    def test_volume_sine(self):
        assert estimate_volume(sine(150, amp=0.5)) == pytest.approx(0.5 / np.sqrt(2), rel=0.01)

    def test_volume_zeros(self):
        assert estimate_volume(np.zeros(1000)) == 0.0

    def test_volume_homogeneity(self):
        w = sine(333, amp=0.2) * np.hanning(SAMPLE_RATE)
        g = 3.7
        assert estimate_volume(g * w) == pytest.approx(g * estimate_volume(w), rel=1e-9)

    def test_trim_is_scale_invariant(self):
        w = np.concatenate([np.zeros(500), sine(100, 0.5), np.zeros(700)])
        assert trim_silence(w) == trim_silence(0.01 * w)


class TestWav:
    def test_roundtrip(self, tmp_path):
        w = sine(220, seconds=0.5)
        path = tmp_path / "a.wav"
        write_wav(path, w)
        back = read_wav(path)
        assert len(back) == len(w)
        assert np.max(np.abs(back - w)) < 1.0 / 32000

    def test_format_is_pcm16_mono_16k(self, tmp_path):
        import wave as wavemod
        path = tmp_path / "b.wav"
        write_wav(path, sine(220, 0.1))
        with wavemod.open(str(path)) as f:
            assert f.getnchannels() == 1
            assert f.getsampwidth() == 2
            assert f.getframerate() == 16000
