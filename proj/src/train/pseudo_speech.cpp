#include "flowsr/train/pseudo_speech.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "flowsr/dsp/wav_io.hpp"
#include "flowsr/util/error.hpp"
#include "flowsr/util/rng.hpp"

namespace flowsr::train {

namespace {

struct Formant {
  double freq;
  double bandwidth;
};

double formant_gain(double freq, const Formant* formants, int count) {
  // Lorentzian resonances over a gentle high-frequency rolloff.
  double gain = 0.08 / (1.0 + freq / 2500.0);
  for (int i = 0; i < count; ++i) {
    const double d = (freq - formants[i].freq) / formants[i].bandwidth;
    gain += 1.0 / (1.0 + d * d);
  }
  return gain;
}

}  // namespace

dsp::AudioBuffer pseudo_speech(double seconds, int sample_rate, uint64_t seed) {
  if (seconds <= 0.0) throw ConfigError("pseudo_speech: duration must be positive");
  util::Rng rng(seed, 0x737065656368ULL);
  const size_t total = static_cast<size_t>(seconds * sample_rate);
  std::vector<double> out(total, 0.0);

  // One set of vocal-tract resonances per utterance.
  Formant formants[3] = {
      {rng.uniform(350.0, 800.0), rng.uniform(80.0, 160.0)},
      {rng.uniform(1000.0, 2200.0), rng.uniform(100.0, 220.0)},
      {rng.uniform(2300.0, 3200.0), rng.uniform(150.0, 300.0)},
  };
  const double f0_base = rng.uniform(90.0, 220.0);
  const double max_harmonic_hz = std::min(6500.0, 0.45 * sample_rate);

  size_t pos = static_cast<size_t>(rng.uniform(0.0, 0.05) * sample_rate);
  while (pos < total) {
    const double syllable_s = rng.uniform(0.10, 0.28);
    const size_t len = std::min(static_cast<size_t>(syllable_s * sample_rate), total - pos);
    if (len < 32) break;

    const double f0_start = f0_base * rng.uniform(0.85, 1.15);
    const double f0_end = f0_start * rng.uniform(0.82, 1.18);
    const double vibrato_hz = rng.uniform(4.0, 6.5);
    const double vibrato_depth = rng.uniform(0.0, 0.02);

    const double f0_peak = std::max(f0_start, f0_end) * (1.0 + vibrato_depth);
    const int harmonics = std::max(1, static_cast<int>(max_harmonic_hz / f0_peak));
    std::vector<double> amp(harmonics), phase(harmonics);
    const double f0_mid = 0.5 * (f0_start + f0_end);
    for (int h = 0; h < harmonics; ++h) {
      amp[h] = formant_gain((h + 1) * f0_mid, formants, 3) / std::pow(h + 1.0, 1.1);
      phase[h] = rng.uniform(0.0, 2.0 * M_PI);
    }

    // Per-harmonic sin/cos of the start phases; the harmonic stack is then
    // evaluated with the angle-addition recurrence per sample, which avoids
    // a trig call per (sample, harmonic).
    std::vector<double> ph_sin(harmonics), ph_cos(harmonics);
    for (int h = 0; h < harmonics; ++h) {
      ph_sin[h] = std::sin(phase[h]);
      ph_cos[h] = std::cos(phase[h]);
    }
    const size_t ramp = std::min<size_t>(len / 4, static_cast<size_t>(0.02 * sample_rate));
    double carrier_phase = 0.0;
    for (size_t n = 0; n < len; ++n) {
      const double u = static_cast<double>(n) / len;
      const double f0 = (f0_start + (f0_end - f0_start) * u) *
                        (1.0 + vibrato_depth * std::sin(2.0 * M_PI * vibrato_hz * n /
                                                        sample_rate));
      carrier_phase += 2.0 * M_PI * f0 / sample_rate;
      double env = 1.0;
      if (n < ramp) env = 0.5 - 0.5 * std::cos(M_PI * n / ramp);
      if (len - n <= ramp) env = std::min(env, 0.5 - 0.5 * std::cos(M_PI * (len - n) / ramp));
      const double s1 = std::sin(carrier_phase);
      const double c1 = std::cos(carrier_phase);
      double sh = s1, ch = c1;  // sin/cos of (h+1)*carrier_phase
      double v = 0.0;
      for (int h = 0; h < harmonics; ++h) {
        v += amp[h] * (sh * ph_cos[h] + ch * ph_sin[h]);
        const double next_s = sh * c1 + ch * s1;
        ch = ch * c1 - sh * s1;
        sh = next_s;
      }
      out[pos + n] = env * v;
    }

    pos += len;
    const double gap_s = rng.uniform() < 0.15 ? rng.uniform(0.2, 0.4) : rng.uniform(0.03, 0.12);
    pos += static_cast<size_t>(gap_s * sample_rate);
  }

  // breath noise floor, roughly -30 dB against the harmonic peak
  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak <= 0.0) {
    // degenerate draw (all gaps); keep a faint noise bed so levels exist
    peak = 1.0;
  }
  const double noise_amp = 0.03 * peak;
  double lp_state = 0.0;
  for (auto& v : out) {
    lp_state = 0.9 * lp_state + 0.1 * rng.gaussian();
    v += noise_amp * lp_state;
  }
  // headroom normalization to peak 0.5
  peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  const double norm = 0.5 / peak;
  for (auto& v : out) v *= norm;
  return dsp::AudioBuffer(std::move(out), sample_rate);
}

WavDirSpeechSource::WavDirSpeechSource(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("speech directory not found: " + dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".wav") files_.push_back(entry.path().string());
  }
  std::sort(files_.begin(), files_.end());
  if (files_.empty()) throw DataError("no .wav files in speech directory: " + dir);
}

dsp::AudioBuffer WavDirSpeechSource::draw(double seconds, int sample_rate, uint64_t seed) {
  util::Rng rng(seed, 0x776176647261ULL);
  const size_t idx =
      static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(files_.size()) - 1));
  auto audio = dsp::read_wav(files_[idx]);
  if (audio.sample_rate != sample_rate) {
    throw DataError("speech file sample rate mismatch (no resampling): " + files_[idx]);
  }
  const size_t want = static_cast<size_t>(seconds * sample_rate);
  const size_t offset =
      audio.samples.empty() ? 0 : static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(audio.samples.size()) - 1));
  std::vector<double> s(want);
  for (size_t i = 0; i < want; ++i) s[i] = audio.samples[(offset + i) % audio.samples.size()];
  return dsp::AudioBuffer(std::move(s), sample_rate);
}

}  // namespace flowsr::train
