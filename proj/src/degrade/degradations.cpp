#include "flowsr/degrade/degradations.hpp"

#include <algorithm>
#include <cmath>

#include "flowsr/dsp/fft.hpp"
#include "flowsr/util/error.hpp"
#include "flowsr/util/rng.hpp"

namespace flowsr::degrade {

dsp::AudioBuffer apply_noise(const dsp::AudioBuffer& clean, const dsp::AudioBuffer& noise,
                             double snr_db, double* gain_out) {
  if (std::isinf(snr_db) && snr_db > 0) {
    if (gain_out) *gain_out = 0.0;
    return clean;
  }
  if (noise.samples.empty()) throw DataError("apply_noise: empty noise signal");
  const size_t n = clean.samples.size();
  std::vector<double> fitted(n);
  for (size_t i = 0; i < n; ++i) fitted[i] = noise.samples[i % noise.samples.size()];
  const double clean_rms = dsp::rms(clean.samples);
  const double noise_rms = dsp::rms(fitted);
  if (noise_rms <= 0.0) throw DataError("apply_noise: silent noise signal");
  const double gain = (clean_rms / noise_rms) * std::pow(10.0, -snr_db / 20.0);
  if (gain_out) *gain_out = gain;
  dsp::AudioBuffer out = clean;
  for (size_t i = 0; i < n; ++i) out.samples[i] += gain * fitted[i];
  return out;
}

std::vector<double> make_rir(double t60_s, int sample_rate, uint64_t seed,
                             double direct_ratio) {
  if (!(t60_s > 0.0)) throw ConfigError("make_rir: t60 must be positive");
  const int len = std::max(1, static_cast<int>(std::lround(t60_s * sample_rate)));
  std::vector<double> rir(len, 0.0);
  rir[0] = direct_ratio;
  util::Rng rng(seed, 0x726972ULL);
  const double decay = -6.908 / (t60_s * sample_rate);
  for (int n = 1; n < len; ++n) rir[n] = rng.gaussian() * std::exp(decay * n);
  return rir;
}

std::vector<double> convolve_trimmed(const std::vector<double>& x,
                                     const std::vector<double>& h) {
  if (h.size() == 1) {
    std::vector<double> y = x;
    for (double& v : y) v *= h[0];
    return y;
  }
  size_t fft_len = 1;
  while (fft_len < x.size() + h.size() - 1) fft_len <<= 1;
  dsp::Fft fft(static_cast<int>(fft_len));
  std::vector<std::complex<double>> a(fft_len), b(fft_len);
  for (size_t i = 0; i < x.size(); ++i) a[i] = x[i];
  for (size_t i = 0; i < h.size(); ++i) b[i] = h[i];
  fft.forward(a.data());
  fft.forward(b.data());
  for (size_t i = 0; i < fft_len; ++i) a[i] *= b[i];
  fft.inverse(a.data());
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = a[i].real();
  return y;
}

dsp::AudioBuffer apply_reverb(const dsp::AudioBuffer& clean, double t60_s, uint64_t seed,
                              double direct_ratio) {
  const auto rir = make_rir(t60_s, clean.sample_rate, seed, direct_ratio);
  return dsp::AudioBuffer(convolve_trimmed(clean.samples, rir), clean.sample_rate);
}

dsp::AudioBuffer apply_bandlimit(const dsp::AudioBuffer& clean, double cutoff_hz, int order,
                                 FilterType type) {
  const auto sections = butterworth(type, order, cutoff_hz, clean.sample_rate);
  return dsp::AudioBuffer(filter_cascade(sections, clean.samples), clean.sample_rate);
}

dsp::AudioBuffer apply_clip(const dsp::AudioBuffer& clean, double threshold, bool hard) {
  if (!(threshold > 0.0)) throw ConfigError("apply_clip: threshold must be positive");
  dsp::AudioBuffer out = clean;
  if (hard) {
    for (double& v : out.samples) v = std::clamp(v, -threshold, threshold);
  } else {
    for (double& v : out.samples) v = threshold * std::tanh(v / threshold);
  }
  return out;
}

dsp::AudioBuffer apply_codec_proxy(const dsp::AudioBuffer& clean, int bit_depth,
                                   int decimation) {
  if (bit_depth < 4 || bit_depth > 16) {
    throw ConfigError("codec proxy: bit_depth must be in [4, 16]");
  }
  if (decimation != 1 && decimation != 2 && decimation != 4) {
    throw ConfigError("codec proxy: decimation must be 1, 2 or 4");
  }
  constexpr double kMu = 255.0;
  const double levels = static_cast<double>(1 << (bit_depth - 1));
  const double log1p_mu = std::log1p(kMu);
  dsp::AudioBuffer out = clean;
  for (double& v : out.samples) {
    const double x = std::clamp(v, -1.0, 1.0);
    const double y = std::copysign(std::log1p(kMu * std::abs(x)) / log1p_mu, x);
    const double yq = std::round(y * levels) / levels;
    v = std::copysign((std::pow(1.0 + kMu, std::abs(yq)) - 1.0) / kMu, yq);
  }
  if (decimation > 1) {
    for (size_t i = 0; i < out.samples.size(); ++i) {
      out.samples[i] = out.samples[i - (i % decimation)];
    }
  }
  return out;
}

dsp::ComplexSpectrogram apply_mask_rects(const dsp::ComplexSpectrogram& spec,
                                         const std::vector<MaskRect>& rects) {
  dsp::ComplexSpectrogram out = spec;
  for (const auto& r : rects) {
    for (int l = r.l0; l < r.l0 + r.lw; ++l) {
      for (int f = r.f0; f < r.f0 + r.fw; ++f) out.at(f, l) = 0.0;
    }
  }
  return out;
}

dsp::ComplexSpectrogram apply_tf_mask(const dsp::ComplexSpectrogram& spec, int patch_count,
                                      int max_f, int max_l, uint64_t seed,
                                      std::vector<MaskRect>* rects_out) {
  if (patch_count < 0) throw ConfigError("tf mask: patch_count must be >= 0");
  if (max_f > spec.bins || max_l > spec.frames || max_f < 1 || max_l < 1) {
    if (patch_count > 0) {
      throw ConfigError("tf mask: patch size exceeds spectrogram dimensions");
    }
  }
  util::Rng rng(seed, 0x6d61736bULL);
  std::vector<MaskRect> rects;
  for (int p = 0; p < patch_count; ++p) {
    MaskRect r;
    r.fw = static_cast<int>(rng.uniform_int(1, max_f));
    r.lw = static_cast<int>(rng.uniform_int(1, max_l));
    r.f0 = static_cast<int>(rng.uniform_int(0, spec.bins - r.fw));
    r.l0 = static_cast<int>(rng.uniform_int(0, spec.frames - r.lw));
    rects.push_back(r);
  }
  if (rects_out) *rects_out = rects;
  return apply_mask_rects(spec, rects);
}

dsp::AudioBuffer apply_level_shift(const dsp::AudioBuffer& clean, double gain_db) {
  const double gain = std::pow(10.0, gain_db / 20.0);
  dsp::AudioBuffer out = clean;
  for (double& v : out.samples) v *= gain;
  return out;
}

}  // namespace flowsr::degrade
