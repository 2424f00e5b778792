import struct

import numpy as np
import pytest

from f0priv.pitch import AudioBuffer, PitchConfig, WavReadError, extract_f0, read_wav
from f0priv.synth import tone
from f0priv.trajectory import validate


def wav_bytes(samples, sample_rate=16000, audio_format=1, bits=16, channels=1):
    """Minimal RIFF/WAVE writer for test fixtures."""
    if audio_format == 1 and bits == 16:
        payload = np.asarray(samples, dtype="<i2").tobytes()
    elif audio_format == 3 and bits == 32:
        payload = np.asarray(samples, dtype="<f4").tobytes()
    else:
        payload = bytes(samples)
    block_align = channels * bits // 8
    fmt = struct.pack(
        "<HHIIHH", audio_format, channels, sample_rate, sample_rate * block_align, block_align, bits
    )
    chunks = b"fmt " + struct.pack("<I", len(fmt)) + fmt
    chunks += b"data" + struct.pack("<I", len(payload)) + payload
    return b"RIFF" + struct.pack("<I", 4 + len(chunks)) + b"WAVE" + chunks


class TestReadWav:
    def test_silence_pcm16(self, tmp_path):
        path = tmp_path / "silence.wav"
        path.write_bytes(wav_bytes(np.zeros(16000, dtype=np.int16)))
        audio = read_wav(path)
        assert audio.sample_rate == 16000
        assert len(audio.samples) == 16000
        assert np.all(audio.samples == 0.0)

    def test_full_scale_negative_sample(self, tmp_path):
        path = tmp_path / "fs.wav"
        path.write_bytes(wav_bytes(np.array([-32768, 32767], dtype=np.int16)))
        audio = read_wav(path)
        assert audio.samples[0] == -1.0
        assert audio.samples[1] == pytest.approx(32767 / 32768)

    def test_float32(self, tmp_path):
        path = tmp_path / "f32.wav"
        data = np.array([0.25, -0.5, 1.5], dtype=np.float32)
        path.write_bytes(wav_bytes(data, audio_format=3, bits=32))
        audio = read_wav(path)
        assert audio.samples[0] == pytest.approx(0.25)
        assert audio.samples[2] == 1.0  # clipped into [-1, 1]

    def test_stereo_downmix(self, tmp_path):
        path = tmp_path / "st.wav"
        interleaved = np.array([16384, -16384, 8192, 8192], dtype=np.int16)
        path.write_bytes(wav_bytes(interleaved, channels=2))
        audio = read_wav(path)
        assert audio.samples[0] == pytest.approx(0.0)
        assert audio.samples[1] == pytest.approx(0.25)

    def test_mu_law_unsupported(self, tmp_path):
        path = tmp_path / "mu.wav"
        path.write_bytes(wav_bytes(b"\x00\x01\x02\x03", audio_format=7, bits=8))
        with pytest.raises(WavReadError, match="unsupported codec"):
            read_wav(path)

    def test_pcm24_unsupported(self, tmp_path):
        path = tmp_path / "p24.wav"
        path.write_bytes(wav_bytes(b"\x00" * 6, audio_format=1, bits=24))
        with pytest.raises(WavReadError, match="unsupported codec"):
            read_wav(path)

    def test_truncated_chunk(self, tmp_path):
        path = tmp_path / "trunc.wav"
        good = wav_bytes(np.zeros(100, dtype=np.int16))
        path.write_bytes(good[:-50])
        with pytest.raises(WavReadError, match="truncated"):
            read_wav(path)

    def test_zero_length_data(self, tmp_path):
        path = tmp_path / "empty.wav"
        path.write_bytes(wav_bytes(np.zeros(0, dtype=np.int16)))
        with pytest.raises(WavReadError, match="zero-length"):
            read_wav(path)

    def test_not_riff(self, tmp_path):
        path = tmp_path / "bad.wav"
        path.write_bytes(b"OggS" + b"\x00" * 40)
        with pytest.raises(WavReadError, match="RIFF"):
            read_wav(path)

    def test_sample_rate_out_of_range(self, tmp_path):
        path = tmp_path / "slow.wav"
        path.write_bytes(wav_bytes(np.zeros(10, dtype=np.int16), sample_rate=4000))
        with pytest.raises(WavReadError, match="sample rate"):
            read_wav(path)


class TestExtractF0:
    def test_pure_tone(self):
        traj = extract_f0(tone(220.0, 2.0))
        voiced = traj.values[traj.values > 0]
        assert abs(np.median(voiced) - 220.0) <= 2.0
        assert len(voiced) / traj.n_frames > 0.9

    @pytest.mark.parametrize("freq", [85.0, 140.0, 215.0, 290.0, 345.0])
    def test_tone_grid_sample(self, freq):
        traj = extract_f0(tone(freq, 1.0))
        voiced = traj.values[traj.values > 0]
        assert abs(np.median(voiced) - freq) <= 2.0

    def test_white_noise_mostly_unvoiced(self):
        rng = np.random.default_rng(7)
        audio = AudioBuffer(16000, 0.1 * rng.standard_normal(32000))  # -20 dBFS
        traj = extract_f0(audio)
        assert np.mean(traj.values > 0) < 0.2

    def test_silence_all_unvoiced(self):
        traj = extract_f0(AudioBuffer(16000, np.zeros(16000)))
        assert np.all(traj.values == 0.0)

    def test_deterministic(self):
        audio = tone(173.0, 0.8)
        a = extract_f0(audio)
        b = extract_f0(audio)
        assert np.array_equal(a.values, b.values)

    def test_output_passes_validation(self):
        rng = np.random.default_rng(8)
        samples = 0.4 * np.sin(2 * np.pi * 150 * np.arange(24000) / 16000)
        samples[8000:12000] = 0.02 * rng.standard_normal(4000)
        traj = extract_f0(AudioBuffer(16000, samples))
        assert validate(traj) == []

    def test_frame_hop_recorded(self):
        traj = extract_f0(tone(150.0, 0.5), PitchConfig(frame_hop=0.02))
        assert traj.frame_hop == pytest.approx(0.02)

    def test_audio_too_short(self):
        with pytest.raises(ValueError, match="shorter than one frame"):
            extract_f0(AudioBuffer(16000, np.zeros(100)))

    def test_config_validation(self):
        audio = tone(150.0, 0.5)
        with pytest.raises(ValueError, match="f_min"):
            extract_f0(audio, PitchConfig(f_min=30.0))
        with pytest.raises(ValueError, match="f_min"):
            extract_f0(audio, PitchConfig(f_max=9001.0))
        with pytest.raises(ValueError, match="voicing_threshold"):
            extract_f0(audio, PitchConfig(voicing_threshold=1.5))
        with pytest.raises(ValueError, match="frame_hop"):
            extract_f0(audio, PitchConfig(frame_hop=0.05, frame_len=0.025))

    def test_recording_id_passthrough(self):
        traj = extract_f0(tone(150.0, 0.5), recording_id="utt1")
        assert traj.recording_id == "utt1"
